"""
Localization and the sandwich bounds
====================================

The cutoff costs only an exponentially small amount of Laplace mass, and
flat terms sit between the polynomial part and a convenient upper bound.
"""

# %%
import numpy as np

from newtonkernel.asymfit import gap_decay_check, sandwich_check
from newtonkernel.expr import parse_model
from newtonkernel.fixtures import get
from newtonkernel.quad import GridSpec, QuadConfig

# %%
# For x1^2 the mass outside the plateau decays at least like exp(-0.5 tau).
rep = gap_decay_check(parse_model("x1^2"), np.linspace(1.0, 50.0, 8))
print(f"eps={rep.eps}, fitted rate {rep.rate:.3f} >= predicted {2 * rep.eps}")
print("e(tau) exp(0.5 tau):", [f"{v:.2e}" for v in rep.scaled])

# %%
# edge_d3 with M = 4. The pointwise inequalities need a ball of radius
# about 1/3, so the cutoff shrinks before the curves are computed.
f = get("edge_d3").model
rep = sandwich_check(f, M=4, cfg=QuadConfig(rho_grid=GridSpec(1e-9, 1e-6, 4)))
print(f"R used {rep.R:.3f}; pointwise at R=1: {rep.pointwise_ok}; ordering: {rep.ordering_ok}")
for name, fit in rep.fits.items():
    print(f"  {name:2s} C={fit.law.C:.6f} drift={fit.drift:.2%}")
