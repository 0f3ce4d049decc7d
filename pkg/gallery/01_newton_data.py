"""
Newton data of a model function
===============================

Parse a model, build its Newton polyhedron, and read off the distance
``d``, the principal face, the multiplicity ``m`` and the axis intercepts.
"""

# %%
from newtonkernel.expr import parse_model, render
from newtonkernel.fixtures import corpus
from newtonkernel.newton import check_nondegenerate, newton_data

f = parse_model("x1^6 + x1^2*x2^4 + exp(-1/(x2^2))")
print("model:", render(f))

# %%
# The flat term leaves no trace in the polyhedron: only the two monomials
# span it, and the x2 axis is never reached.
nd = newton_data(f)
print("vertices:", nd.polyhedron.vertices)
print("facets (a, l):", [(p.a, p.l) for p in nd.polyhedron.facets])
print(f"d = {nd.d}, m = {nd.m}, compact principal face: {nd.principal_compact}")
print("rho =", [str(r) for r in nd.rho], " D'Angelo type:", nd.dangelo_type)
print("principal part:", render(f.polynomial_part()) if nd.principal_part else "-")

# %%
# Nondegeneracy: positive even gamma-parts are certified without sampling;
# an indefinite one is searched for critical zeros on the torus.
print("verdict:", check_nondegenerate(f).kind)
from newtonkernel.newton import polynomial_verdict

square = [(1, (4, 0)), (-2, (2, 2)), (1, (0, 4))]  # (x1^2 - x2^2)^2
print("(x1^2 - x2^2)^2:", polynomial_verdict(square, 2))

# %%
# The whole reference corpus at a glance.
print(f"{'name':16s} {'d':>5s} {'m':>2s} {'compact':>8s}  rho")
for fx in corpus():
    nd = newton_data(fx.model)
    print(f"{fx.name:16s} {str(nd.d):>5s} {nd.m:2d} {str(nd.principal_compact):>8s}  {[str(r) for r in nd.rho]}")
