"""
Local zeta function and fiber integrals
=======================================

Pole order of ``Z(s)`` at ``s = -2/d`` and the Mellin/Laplace pipeline
through the fiber function ``H(u) = dG/du``.
"""

# %%
from newtonkernel.asymfit import pole_order_probe
from newtonkernel.expr import parse_model
from newtonkernel.quad import fiber_H, laplace_from_fiber, laplace_L, zeta_from_fiber, zeta_Z

# %%
# x1^2 x2^2 has d = 2 and m = 2: (s + 1)^2 Z(s) settles to a positive value.
f = parse_model("x1^2*x2^2")
rep = pole_order_probe(f)
print("pole order 2:", [f"{g:.5f}" for g in rep.ratios], f"spread {rep.drift:.2%}")
wrong = pole_order_probe(f, order=3)
print("pole order 3:", [f"{g:.5f}" for g in wrong.ratios], f"spread {wrong.drift:.2%}")

# %%
# The fiber function of x1^2 x2^2 grows like log(1/u) near zero.
for u in (1e-4, 1e-6, 1e-8):
    print(f"H({u:.0e}) = {fiber_H(f, u).value:.6f}")

# %%
# Laplace and Mellin transforms of the tabulated H reproduce the direct
# integrals.
for tau in (10.0, 100.0):
    print(f"L({tau:5.0f}): fiber {laplace_from_fiber(f, tau):.8e}  direct {laplace_L(f, tau).value:.8e}")
for s in (0.5, 1.0, 2.0):
    print(f"Z({s:3.1f}):   fiber {zeta_from_fiber(f, s):.8e}  direct {zeta_Z(f, s).value:.8e}")
