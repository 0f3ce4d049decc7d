"""Newton data of a model function: distance, principal face, multiplicity,
axis intercepts (D'Angelo type), gamma-parts and nondegeneracy checks."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.optimize import least_squares

from .expr import ModelFunction, MonomialTerm, render
from .polytope import (
    Face,
    NewtonPolyhedron,
    ValidPair,
    compact_faces,
    contains,
    minimal_face_containing,
    newton_polyhedron,
)

__all__ = [
    "INF",
    "NewtonData",
    "GammaPart",
    "Verdict",
    "newton_data",
    "gamma_part",
    "check_euler_identity",
    "check_nondegenerate",
    "polynomial_verdict",
    "axis_intercepts_by_scan",
]


class _Infinity:
    """Tagged infinite value for axis intercepts that do not exist."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __str__(self):
        return "inf"

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("newtonkernel.INF")

    def __lt__(self, other):
        return False

    def __gt__(self, other):
        return other is not self

    def __le__(self, other):
        return other is self

    def __ge__(self, other):
        return True


INF = _Infinity()


@dataclass(frozen=True)
class NewtonData:
    d: Fraction
    diagonal_point: tuple[Fraction, ...]
    principal_face: Face
    m: int
    principal_compact: bool
    convenient: bool
    rho: tuple
    rho_max: object
    principal_part: tuple[MonomialTerm, ...]
    polyhedron: NewtonPolyhedron

    @property
    def dangelo_type(self):
        # equal to the largest axis intercept for model domains
        return self.rho_max

    def to_json(self) -> dict:
        def q(v):
            if v is INF:
                return "inf"
            v = Fraction(v)
            return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"

        pp = ""
        if self.principal_part:
            pp = render(ModelFunction(self.polyhedron.dim, self.principal_part))
        return {
            "d": q(self.d),
            "m": self.m,
            "compact": self.principal_compact,
            "convenient": self.convenient,
            "rho": [q(r) for r in self.rho],
            "dangelo_type": q(self.rho_max),
            "principal_face": {
                "dim": self.principal_face.dim,
                "vertices": [list(map(int, v)) for v in self.principal_face.vertices],
                "pairs": [p.as_list() for p in self.principal_face.pairs],
            },
            "principal_part": pp,
        }


@dataclass(frozen=True)
class GammaPart:
    face: Face
    poly: tuple[MonomialTerm, ...]

    def evaluate(self, x) -> np.ndarray:
        return _poly_eval(_as_terms(self.poly), np.asarray(x, float))

    def gradient(self, x) -> np.ndarray:
        return _poly_grad(_as_terms(self.poly), np.asarray(x, float))


def _axis_intercepts(P: NewtonPolyhedron) -> tuple:
    out = []
    for j in range(P.dim):
        if any(f.l > 0 and f.a[j] == 0 for f in P.facets):
            out.append(INF)
        else:
            out.append(max([Fraction(f.l, f.a[j]) for f in P.facets if f.l > 0], default=Fraction(0)))
    return tuple(out)


def axis_intercepts_by_scan(P: NewtonPolyhedron) -> tuple:
    """``min{t : t e_j in P}`` by scanning integers with the membership test.

    Intercepts are integers (they are attained at support points on the
    axis), and if the axis meets ``P`` at all it does so by ``t = max p_j``.
    """
    out = []
    for j in range(P.dim):
        top = max(p[j] for p in P.support)
        hit = INF
        for t in range(0, top + 1):
            e = [0] * P.dim
            e[j] = t
            if contains(P, e):
                hit = Fraction(t)
                break
        out.append(hit)
    return tuple(out)


def newton_data(f: ModelFunction) -> NewtonData:
    P = newton_polyhedron(f.support)
    n = P.dim
    d = max(Fraction(fc.l, sum(fc.a)) for fc in P.facets)
    diag = (d,) * n
    face = minimal_face_containing(P, diag)
    rho = _axis_intercepts(P)
    scan = axis_intercepts_by_scan(P)
    if rho != scan:
        raise AssertionError(f"axis intercept routes disagree: {rho} vs {scan}")
    rho_max = INF if any(r is INF for r in rho) else max(rho)
    principal = ()
    if face.compact:
        principal = tuple(t for t in f.monomials if all(p.tight(t.alpha) for p in face.pairs))
    return NewtonData(
        d=d,
        diagonal_point=diag,
        principal_face=face,
        m=n - face.dim,
        principal_compact=face.compact,
        convenient=rho_max is not INF,
        rho=rho,
        rho_max=rho_max,
        principal_part=principal,
        polyhedron=P,
    )


def gamma_part(f: ModelFunction, face: Face) -> GammaPart:
    if not face.compact:
        raise ValueError("gamma-parts are defined for compact faces only")
    return GammaPart(face, tuple(t for t in f.monomials if all(p.tight(t.alpha) for p in face.pairs)))


# ---------------------------------------------------------------------------
# polynomials as (coeff, alpha) lists: lets tests feed sign-indefinite
# gamma-parts that the model grammar rejects

def _as_terms(poly) -> list[tuple[float, tuple[int, ...]]]:
    out = []
    for t in poly:
        if isinstance(t, MonomialTerm):
            out.append((float(t.coeff), t.alpha))
        else:
            c, a = t
            out.append((float(c), tuple(int(v) for v in a)))
    return out


def _poly_eval(terms, x: np.ndarray) -> np.ndarray:
    return sum(c * np.prod(np.power(x, a), axis=-1) for c, a in terms)


def _poly_grad(terms, x: np.ndarray) -> np.ndarray:
    grads = []
    for j in range(x.shape[-1]):
        g = np.zeros(x.shape[:-1])
        for c, a in terms:
            if a[j] == 0:
                continue
            b = list(a)
            b[j] -= 1
            g = g + c * a[j] * np.prod(np.power(x, b), axis=-1)
        grads.append(g)
    return np.stack(grads, axis=-1)


def _grad_scale(terms, x: np.ndarray) -> np.ndarray:
    """Size of the individual terms contributing to the gradient."""
    s = np.zeros(x.shape[:-1])
    for c, a in terms:
        mag = abs(c) * np.prod(np.power(np.abs(x), a), axis=-1)
        s = s + mag * sum(a[j] / np.abs(x[..., j]) for j in range(x.shape[-1]))
    return s


def check_euler_identity(g, samples, pair: ValidPair | None = None) -> float:
    """Max relative residual of ``l g(x) = sum_j a_j x_j dg/dx_j``.

    ``g`` is a :class:`GammaPart` or a list of ``(coeff, alpha)``; ``pair``
    defaults to the face's summed defining pair.
    """
    if pair is None:
        pair = g.face.defining_pair()
    terms = _as_terms(g.poly if isinstance(g, GammaPart) else g)
    x = np.atleast_2d(np.asarray(samples, float))
    val = _poly_eval(terms, x)
    grad = _poly_grad(terms, x)
    lhs = pair.l * val
    rhs = (grad * x * np.asarray(pair.a, float)).sum(axis=-1)
    return float(np.max(np.abs(lhs - rhs) / (1 + np.abs(lhs))))


@dataclass(frozen=True)
class Verdict:
    kind: str  # "certified" | "sampled" | "degenerate"
    witness: tuple[float, ...] | None = None
    face: Face | None = None

    @property
    def nondegenerate(self) -> bool:
        return self.kind != "degenerate"


def polynomial_verdict(poly, n: int, sample_count: int = 64, seed: int = 0) -> Verdict:
    """Nondegeneracy verdict for a single gamma-part polynomial.

    Positive coefficients on even exponents give a positivity certificate.
    Otherwise the gradient is searched for a common zero on per-orthant
    log-uniform grids in ``[1e-3, 1e3]`` plus random points, and the best
    candidates are polished with a least-squares root solve.
    """
    terms = _as_terms(poly)
    if all(c > 0 and all(v % 2 == 0 for v in a) for c, a in terms):
        return Verdict("certified")
    rng = np.random.default_rng(seed)
    per_axis = max(3, int(round(sample_count ** (1.0 / n))))
    ladder = np.logspace(-3, 3, per_axis)
    pts = []
    for signs in itertools.product((1.0, -1.0), repeat=n):
        grid = np.array(list(itertools.product(ladder, repeat=n)))
        pts.append(grid * np.array(signs))
    rand = 10.0 ** rng.uniform(-3, 3, size=(10 * sample_count, n))
    rand *= rng.choice((-1.0, 1.0), size=rand.shape)
    pts.append(rand)
    pts = np.concatenate(pts)

    def scaled_grad(x):
        return _poly_grad(terms, x) / np.maximum(_grad_scale(terms, x), 1e-300)[..., None]

    score = np.linalg.norm(scaled_grad(pts), axis=-1)
    for idx in np.argsort(score)[:10]:
        x0 = pts[idx]
        # stay inside the orthant of the start point: optimise log|x|
        sgn = np.sign(x0)
        sol = least_squares(lambda y: scaled_grad(sgn * np.exp(y)), np.log(np.abs(x0)), xtol=1e-15, ftol=1e-15, gtol=1e-15)
        x = sgn * np.exp(sol.x)
        if np.linalg.norm(_poly_grad(terms, x)) < 1e-12 * _grad_scale(terms, x):
            return Verdict("degenerate", tuple(float(v) for v in x))
    return Verdict("sampled")


def check_nondegenerate(f: ModelFunction, sample_count: int = 64, seed: int = 0) -> Verdict:
    """Verdict over every compact face of ``N_+(f)``; the first degenerate
    face wins, then the weakest of certified/sampled."""
    P = newton_polyhedron(f.support)
    kinds = []
    for face in compact_faces(P):
        v = polynomial_verdict(gamma_part(f, face).poly, f.dim, sample_count, seed)
        if v.kind == "degenerate":
            return Verdict("degenerate", v.witness, face)
        kinds.append(v.kind)
    return Verdict("sampled" if "sampled" in kinds else "certified")
