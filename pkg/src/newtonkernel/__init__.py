"""Newton polyhedra of rotation-invariant model functions and numerical
checks of the Bergman, Laplace and local zeta asymptotics they predict."""

__version__ = "0.1.0"

from .expr import ModelFunction, ParseError, evaluate, parse_model, render
from .newton import INF, NewtonData, check_nondegenerate, gamma_part, newton_data
from .polytope import newton_polyhedron

__all__ = [
    "__version__",
    "INF",
    "ModelFunction",
    "NewtonData",
    "ParseError",
    "check_nondegenerate",
    "evaluate",
    "gamma_part",
    "newton_data",
    "newton_polyhedron",
    "parse_model",
    "render",
]
