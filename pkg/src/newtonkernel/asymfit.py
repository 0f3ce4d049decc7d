"""Predicted power-log laws from Newton data, and their numerical checks.

A law is ``C x^{-a} L^k`` with ``L = log(1/x)`` for ``x -> 0`` variables and
``L = log x`` for ``tau -> inf``.  The log power ``k`` is signed: the Bergman
restriction carries its log factor in the denominator, so its law has
``k = -(m - 1)`` while the Laplace-side laws have ``k = m - 1``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Sequence

import numpy as np

from .expr import ModelFunction, MonomialTerm
from .newton import NewtonData, check_nondegenerate, newton_data
from .quad import CurveSample, QuadConfig, bergman_curve, zeta_Z

__all__ = [
    "VARIABLES",
    "TARGETS",
    "AsymptoticLaw",
    "FitReport",
    "ScanResult",
    "SandwichReport",
    "InapplicableError",
    "predicted_law",
    "compensated_ratio_fit",
    "exponent_scan",
    "pole_order_probe",
    "principal_face_preserved",
    "sandwich_upper",
    "sandwich_radius",
    "sandwich_check",
    "GapReport",
    "plateau_infimum",
    "gap_decay_check",
]

VARIABLES = ("rho_to_0", "tau_to_inf", "u_to_0", "s_to_pole")
TARGETS = ("bergman", "c0", "laplace", "fiber", "zeta_pole")

DELTAS = (0.2, 0.1, 0.05, 0.025, 0.0125)


class InapplicableError(ValueError):
    """The principal face is noncompact, so no leading law is predicted."""


@dataclass(frozen=True)
class AsymptoticLaw:
    C: float | None  # None while unfitted
    a: Fraction
    k: int
    variable: str

    def __post_init__(self):
        if self.variable not in VARIABLES:
            raise ValueError(f"unknown variable {self.variable!r}")

    @property
    def to_zero(self) -> bool:
        return self.variable in ("rho_to_0", "u_to_0")

    def log_factor(self, x):
        x = np.asarray(x, float)
        return np.log(1 / x) if self.to_zero else np.log(x)

    def compensated(self, x, value):
        """``value x^a / L^k``: constant when ``value`` follows the law."""
        x = np.asarray(x, float)
        return np.asarray(value, float) * x ** float(self.a) / self.log_factor(x) ** self.k

    def __call__(self, x):
        if self.C is None:
            raise ValueError("law has no fitted constant")
        x = np.asarray(x, float)
        return self.C * x ** -float(self.a) * self.log_factor(x) ** self.k

    def with_constant(self, C: float) -> "AsymptoticLaw":
        return AsymptoticLaw(C, self.a, self.k, self.variable)

    def to_json(self) -> dict:
        return {"C": self.C, "a": _qstr(self.a), "k": self.k, "variable": self.variable}


def _qstr(q) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class FitReport:
    law: AsymptoticLaw
    drift: float
    threshold: float
    passed: bool
    samples_used: tuple[float, float]
    ratios: tuple[float, ...] = field(default=(), repr=False)

    def to_json(self) -> dict:
        return {
            "law": self.law.to_json(),
            "drift": self.drift,
            "threshold": self.threshold,
            "passed": self.passed,
            "samples_used": list(self.samples_used),
        }


def default_threshold(k: int) -> float:
    return 0.05 if k == 0 else 0.15


def predicted_law(nd: NewtonData, target: str) -> AsymptoticLaw:
    if target not in TARGETS:
        raise ValueError(f"unknown target {target!r}")
    if not nd.principal_compact:
        raise InapplicableError(
            "principal face is noncompact: the leading-term law needs a compact principal face; "
            "the kernel then follows a different (non power-log) growth"
        )
    inv = Fraction(2) / nd.d
    m = nd.m
    if target == "bergman":
        return AsymptoticLaw(None, inv + 2, -(m - 1), "rho_to_0")
    if target in ("c0", "laplace"):
        return AsymptoticLaw(None, inv, m - 1, "tau_to_inf")
    if target == "fiber":
        return AsymptoticLaw(None, 1 - inv, m - 1, "u_to_0")
    # pole location -2/d, order m
    return AsymptoticLaw(None, -inv, m, "s_to_pole")


def _as_arrays(samples: Sequence[CurveSample]) -> tuple[np.ndarray, np.ndarray]:
    x = np.array([s.abscissa for s in samples], float)
    v = np.array([s.value for s in samples], float)
    order = np.argsort(x)
    return x[order], v[order]


def _final_decade(x: np.ndarray, to_zero: bool) -> np.ndarray:
    # small relative slack so that a grid endpoint exactly one decade away counts
    if to_zero:
        return x <= x[0] * 10 * (1 + 1e-9)
    return x >= x[-1] / 10 / (1 + 1e-9)


def compensated_ratio_fit(samples: Sequence[CurveSample], law: AsymptoticLaw, threshold: float | None = None) -> FitReport:
    """Constant and drift of the compensated ratio over the asymptotic decade."""
    if law.variable == "s_to_pole":
        raise ValueError("pole laws are checked with pole_order_probe")
    x, v = _as_arrays(samples)
    if len(x) < 2 or math.log10(x[-1] / x[0]) < 2 - 1e-9:
        raise ValueError("need at least two decades of samples")
    if np.any(v <= 0):
        raise ValueError("samples must be positive")
    thr = default_threshold(law.k) if threshold is None else threshold
    sel = _final_decade(x, law.to_zero)
    r = law.compensated(x[sel], v[sel])
    C = float(np.median(r))
    drift = float((r.max() - r.min()) / C)
    return FitReport(
        law.with_constant(C),
        drift,
        thr,
        bool(drift <= thr),
        (float(x[sel][0]), float(x[sel][-1])),
        tuple(float(q) for q in r),
    )


@dataclass(frozen=True)
class ScanResult:
    a_est: float
    a_err: float
    a_snapped: Fraction
    k_est: int
    drifts: dict

    def to_json(self) -> dict:
        return {
            "a_est": self.a_est,
            "a_err": self.a_err,
            "a_snapped": _qstr(self.a_snapped),
            "k_est": self.k_est,
        }


K_RANGE = range(-4, 5)


def exponent_scan(samples: Sequence[CurveSample], variable: str = "rho_to_0", max_den: int = 12) -> ScanResult:
    """Blind ``(a, k)`` identification.

    Local slopes ``-dlog v/dlog x`` equal ``a + k'/L`` up to higher order
    (``k'`` the log power, sign by orientation), so a linear fit of the
    slopes against ``1/L`` over the last two decades extrapolates ``a`` to
    ``L = inf`` (one Richardson step in ``1/L``).  ``a`` is then snapped to
    the nearest rational of denominator ``<= max_den`` and ``k`` picked by
    minimal compensated drift.
    """
    law0 = AsymptoticLaw(None, Fraction(0), 0, variable)
    x, v = _as_arrays(samples)
    if len(x) < 4 or math.log10(x[-1] / x[0]) < 3 - 1e-9:
        raise ValueError("need at least three decades of samples")
    if np.any(v <= 0):
        raise ValueError("samples must be positive")
    dv = np.diff(v)
    if not (np.all(dv < 0) or np.all(dv > 0)):
        raise ValueError("samples are not monotone")
    lx, lv = np.log(x), np.log(v)
    mid = 0.5 * (lx[1:] + lx[:-1])
    slope = -np.diff(lv) / np.diff(lx)
    if law0.to_zero:
        sel = mid <= lx[0] + 2 * math.log(10)
        L = -mid[sel]
    else:
        sel = mid >= lx[-1] - 2 * math.log(10)
        L = mid[sel]
    A = np.vstack([np.ones(sel.sum()), 1 / L]).T
    coef, res, *_ = np.linalg.lstsq(A, slope[sel], rcond=None)
    a_est = float(coef[0])
    resid = slope[sel] - A @ coef
    dof = max(sel.sum() - 2, 1)
    cov = np.linalg.pinv(A.T @ A) * float(resid @ resid) / dof
    a_err = float(math.sqrt(max(cov[0, 0], 0.0)))
    a_snap = Fraction(a_est).limit_denominator(max_den)
    drifts = {}
    for k in K_RANGE:
        law = AsymptoticLaw(None, a_snap, k, variable)
        sel2 = _final_decade(x, law.to_zero)
        r = law.compensated(x[sel2], v[sel2])
        drifts[k] = float((r.max() - r.min()) / np.median(r))
    k_est = min(drifts, key=lambda k: (drifts[k], abs(k)))
    return ScanResult(a_est, a_err, a_snap, k_est, drifts)


def pole_order_probe(
    f: ModelFunction,
    nd: NewtonData | None = None,
    cfg: QuadConfig = QuadConfig(),
    order: int | None = None,
    threshold: float = 0.10,
    deltas: Sequence[float] = DELTAS,
) -> FitReport:
    """``g(delta) = delta^m Z(-2/d + delta)`` should settle to a positive
    constant as ``delta -> 0``; ``order`` overrides ``m`` for negative
    controls."""
    nd = newton_data(f) if nd is None else nd
    law = predicted_law(nd, "zeta_pole")
    if not check_nondegenerate(f).nondegenerate:
        raise ValueError("gamma-part is degenerate: no pole-order prediction")
    m = law.k if order is None else order
    s0 = float(law.a)
    g = []
    for dlt in deltas:
        z = zeta_Z(f, s0 + dlt, cfg)
        g.append(dlt**m * z.value)
    g = np.array(g)
    if np.any(g <= 0):
        raise ValueError(f"nonpositive (s + 2/d)^m Z(s) values {g}: contradicts positivity of the leading coefficient")
    tail = g[-3:]
    spread = float((tail.max() - tail.min()) / np.median(tail))
    return FitReport(
        AsymptoticLaw(float(g[-1]), law.a, m, "s_to_pole"),
        spread,
        threshold,
        bool(spread <= threshold),
        (float(min(deltas)), float(sorted(deltas)[2])),
        tuple(float(q) for q in g),
    )


# ---------------------------------------------------------------------------
# sandwich

def sandwich_upper(f0: ModelFunction, M: int) -> ModelFunction:
    n = f0.dim
    extra = tuple(MonomialTerm(tuple(2 * M if i == j else 0 for i in range(n)), Fraction(1)) for j in range(n))
    return ModelFunction(n, f0.monomials + extra)


def principal_face_preserved(f0: ModelFunction, f1: ModelFunction) -> bool:
    a, b = newton_data(f0), newton_data(f1)
    fa, fb = a.principal_face, b.principal_face
    return a.d == b.d and fa.compact and fb.compact and set(fa.vertices) == set(fb.vertices) and set(fa.pairs) == set(fb.pairs)


@dataclass(frozen=True)
class SandwichReport:
    M: int
    R: float  # cutoff radius the curves were computed with
    pointwise_ok: bool
    ordering_ok: bool
    violations: tuple[float, ...]
    fits: dict  # name -> FitReport for "F0", "F", "F1"
    curves: dict = field(repr=False, default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.ordering_ok and self.fits["F0"].passed and self.fits["F1"].passed

    def to_json(self) -> dict:
        return {
            "M": self.M,
            "R": self.R,
            "pointwise_ok": self.pointwise_ok,
            "ordering_ok": self.ordering_ok,
            "violations": list(self.violations),
            "fits": {k: v.to_json() for k, v in self.fits.items()},
            "passed": self.passed,
        }


def _pointwise_sandwich(f: ModelFunction, f0: ModelFunction, f1: ModelFunction, R: float, per_axis: int = 41) -> bool:
    from .expr import evaluate

    axis = np.linspace(0, R, per_axis)
    pts = np.array(np.meshgrid(*[axis] * f.dim, indexing="ij")).reshape(f.dim, -1).T
    pts = pts[np.linalg.norm(pts, axis=1) <= R]
    v0, v, v1 = (np.asarray(evaluate(g, pts)) for g in (f0, f, f1))
    return bool(np.all(v0 <= v) and np.all(v <= v1))


def sandwich_radius(f: ModelFunction, f0: ModelFunction, f1: ModelFunction, R: float, shrink: float = 0.8, tries: int = 30) -> float:
    """Largest ``R * shrink^k`` on whose ball ``f0 <= f <= f1`` holds pointwise."""
    for _ in range(tries):
        if _pointwise_sandwich(f, f0, f1, R):
            return R
        R *= shrink
    raise InapplicableError("no cutoff radius found on which the sandwich holds pointwise")


def sandwich_check(f: ModelFunction, M: int | None = None, cfg: QuadConfig = QuadConfig()) -> SandwichReport:
    """Bergman curves of ``F0 <= F <= F1`` with ``F0`` the polynomial part of
    ``f`` and ``F1 = F0 + sum_j x_j^{2M}``.

    The inequalities are local, so the cutoff radius is shrunk from
    ``cfg.cutoff_R`` until they hold pointwise on the ball; only then does
    the ordering of the Bergman restrictions follow.  ``pointwise_ok``
    reports the check at the original radius.
    """
    f0 = f.polynomial_part()
    nd0 = newton_data(f0)
    if not nd0.principal_compact:
        raise InapplicableError("principal face is noncompact: no M preserves it")
    if M is None:
        M = next((m for m in range(2, 65, 2) if principal_face_preserved(f0, sandwich_upper(f0, m))), None)
        if M is None:
            raise InapplicableError("no even M <= 64 preserves the principal face")
    f1 = sandwich_upper(f0, M)
    if not principal_face_preserved(f0, f1):
        raise ValueError(f"M={M} changes the principal face")
    pointwise = _pointwise_sandwich(f, f0, f1, cfg.cutoff_R)
    R = sandwich_radius(f, f0, f1, cfg.cutoff_R)
    qcfg = replace(cfg, cutoff_R=R)
    curves = {name: bergman_curve(g, qcfg) for name, g in (("F0", f0), ("F", f), ("F1", f1))}
    bad = []
    for s0, s, s1 in zip(curves["F0"], curves["F"], curves["F1"]):
        if s0.value > s.value + s0.est_error + s.est_error or s.value > s1.value + s.est_error + s1.est_error:
            bad.append(s.abscissa)
    law = predicted_law(nd0, "bergman")
    fits = {name: compensated_ratio_fit(c, law) for name, c in curves.items()}
    return SandwichReport(M, R, pointwise, not bad, tuple(bad), fits, curves)


# ---------------------------------------------------------------------------
# localization decay

@dataclass(frozen=True)
class GapReport:
    eps: float  # inf of f outside the plateau
    rate: float  # fitted decay rate of log e(tau)
    scaled: tuple[float, ...]  # e(tau) exp(2 eps tau)
    bounded: bool
    samples: tuple[CurveSample, ...] = field(repr=False, default=())

    def to_json(self) -> dict:
        return {"eps": self.eps, "fitted_rate": self.rate, "predicted_rate": 2 * self.eps, "bounded": self.bounded}


def plateau_infimum(f: ModelFunction, R: float, per_axis: int = 129) -> float:
    """``min f`` on ``|x| = R/2`` in the orthant: the infimum outside the
    plateau for coordinatewise increasing ``f``."""
    from .expr import evaluate

    n = f.dim
    if n == 1:
        return float(evaluate(f, np.array([R / 2])))
    ang = np.linspace(0, np.pi / 2, per_axis)
    grids = np.meshgrid(*[ang] * (n - 1), indexing="ij")
    pts = np.ones((grids[0].size, n))
    for j, g in enumerate(grids):
        pts[:, j] *= np.cos(g.ravel())
        pts[:, j + 1 :] *= np.sin(g.ravel())[:, None]
    return float(np.min(evaluate(f, (R / 2) * np.abs(pts))))


def gap_decay_check(f: ModelFunction, taus: Sequence[float], cfg: QuadConfig = QuadConfig(), slack: float = 1e-6) -> GapReport:
    """``e(tau) e^{2 eps tau}`` must show no growth: its running values never
    exceed the first one (up to ``slack`` relative)."""
    from .quad import localization_gap

    eps = plateau_infimum(f, cfg.cutoff_R)
    samples = tuple(localization_gap(f, float(t), cfg) for t in taus)
    t = np.array([s.abscissa for s in samples])
    e = np.array([s.value for s in samples])
    scaled = e * np.exp(2 * eps * t)
    pos = e > 0
    rate = float(-np.polyfit(t[pos], np.log(e[pos]), 1)[0]) if pos.sum() >= 2 else float("inf")
    bounded = bool(np.all(scaled <= scaled[0] * (1 + slack) + 1e-300))
    return GapReport(eps, rate, tuple(float(v) for v in scaled), bounded, samples)
