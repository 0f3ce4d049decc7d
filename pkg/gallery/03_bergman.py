"""
Bergman kernel on the diagonal
==============================

The restricted kernel ``B(rho)`` of the model domain ``{r + F(z) < 0}``
at the points ``(0, -rho)``, for the Siegel half space and a log-corrected
fixture.
"""

# %%
import math

from newtonkernel.asymfit import compensated_ratio_fit, exponent_scan, predicted_law
from newtonkernel.expr import parse_model
from newtonkernel.fixtures import get
from newtonkernel.newton import newton_data
from newtonkernel.quad import GridSpec, QuadConfig, bergman_curve

# %%
# Siegel: B(rho) = 1 / (4 pi^2 rho^3) up to exponentially small terms.
cfg = QuadConfig(rho_grid=GridSpec(1e-5, 1e-2, 2))
for s in bergman_curve(parse_model("x1^2"), cfg):
    print(f"rho={s.abscissa:8.1e}  4 pi^2 rho^3 B = {4 * math.pi**2 * s.abscissa**3 * s.value:.10f}")

# %%
# vertex_d2_a: d = 2, m = 2, so B ~ C rho^-3 / log(1/rho).
f = get("vertex_d2_a").model
cfg = QuadConfig(rho_grid=GridSpec(1e-6, 1e-2, 8))
curve = bergman_curve(f, cfg)
law = predicted_law(newton_data(f), "bergman")
fit = compensated_ratio_fit(curve, law)
print(f"predicted a={law.a}, log power {law.k}; C={fit.law.C:.5f}, final-decade drift {fit.drift:.2%}")
scan = exponent_scan(curve)
print(f"blind scan: a_est={scan.a_est:.4f} -> {scan.a_snapped}, k_est={scan.k_est}")

# %%
# Scaling F by 2 rescales the kernel exactly: B_{2F}(rho) = B_F(rho/2) / 4.
from newtonkernel.quad import bergman_B

lhs = bergman_B(f.scaled(2), 1e-3, cfg).value
rhs = bergman_B(f, 5e-4, cfg).value / 4
print(f"scaling identity: {lhs:.10e} vs {rhs:.10e}")
