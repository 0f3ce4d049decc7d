"""
Localized Laplace integrals
===========================

``c0_tilde(tau)`` against the Gamma-function oracle, the explicit lower
floor, and the power-log law read off the Newton data.
"""

# %%
import numpy as np

from newtonkernel.asymfit import compensated_ratio_fit, exponent_scan, predicted_law
from newtonkernel.expr import parse_model
from newtonkernel.fixtures import get
from newtonkernel.newton import newton_data
from newtonkernel.quad import GridSpec, QuadConfig, c0_floor, c0_full_monomial, c0_tilde

# %%
# With a wide cutoff the whole Gaussian mass of x1^2 + x2^4 sits on the
# plateau, so the localized integral equals the closed form.
f = parse_model("x1^2 + x2^4")
cfg = QuadConfig(cutoff_R=3.0)
for tau in (1e2, 1e4, 1e6):
    got = c0_tilde(f, tau, cfg)
    want = c0_full_monomial((2, 4), tau)
    print(f"tau={tau:8.0e}  c0={got.value:.12e}  oracle={want:.12e}  rel={abs(got.value / want - 1):.1e}")

# %%
# vertex_d2_a has d = 2 and m = 2, so tau * c0 / log(tau) levels off.
g = get("vertex_d2_a").model
law = predicted_law(newton_data(g), "c0")
taus = GridSpec(1e3, 1e6, 4).points()
curve = [c0_tilde(g, float(t)) for t in taus]
for s in curve:
    print(f"tau={s.abscissa:9.3e}  compensated={s.value * s.abscissa / np.log(s.abscissa):.5f}  floor={c0_floor(g, s.abscissa):.3e}")
fit = compensated_ratio_fit(curve, law)
print(f"law a={law.a} k={law.k}: C={fit.law.C:.5f} drift={fit.drift:.2%} passed={fit.passed}")

# %%
# A blind scan recovers the same exponents from the numbers alone.
wide = [c0_tilde(g, float(t)) for t in GridSpec(1e4, 1e9, 4).points()]
scan = exponent_scan(wide, "tau_to_inf")
print(f"scan: a_est={scan.a_est:.4f} -> {scan.a_snapped}, k_est={scan.k_est}")
