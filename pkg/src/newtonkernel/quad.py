"""Quadrature for the radial integrals attached to a model function.

All integrals live on the positive orthant after the polar reduction
``z_j = x_j e^{i theta_j}``, which trades each complex variable for
``2 pi x_j dx_j``.  The bulk integrals run on log coordinates
``x_j = R e^{-t_j}`` so that QUADPACK sees smooth integrands on all scales
from ``R`` down to ``tau^{-1/2}``; the integrand is a numba ``cfunc`` handed
to :func:`scipy.integrate.nquad` as a ``LowLevelCallable``.
"""
from __future__ import annotations

import csv
import functools
import io
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from numba import carray, cfunc, njit, types
from scipy import LowLevelCallable, special
from scipy.integrate import IntegrationWarning, nquad, quad
from scipy.interpolate import CubicSpline, PchipInterpolator
from scipy.optimize import brentq

from .expr import ModelFunction, evaluate

__all__ = [
    "GridSpec",
    "QuadConfig",
    "CurveSample",
    "QuadratureError",
    "bump",
    "c0_tilde",
    "c0_full_monomial",
    "c0_floor",
    "laplace_L",
    "C0Table",
    "c0_table",
    "bergman_B",
    "bergman_curve",
    "zeta_Z",
    "distribution_G",
    "fiber_H",
    "sup_on_support",
    "FiberTable",
    "fiber_table",
    "laplace_from_fiber",
    "zeta_from_fiber",
    "localization_gap",
    "write_csv",
]


@dataclass(frozen=True)
class GridSpec:
    lo: float
    hi: float
    per_decade: int

    def __post_init__(self):
        if not (0 < self.lo < self.hi) or self.per_decade < 1:
            raise ValueError(f"bad grid {self}")

    def points(self) -> np.ndarray:
        num = int(round(math.log10(self.hi / self.lo) * self.per_decade)) + 1
        return np.logspace(math.log10(self.lo), math.log10(self.hi), max(num, 2))


@dataclass(frozen=True)
class QuadConfig:
    cutoff_R: float = 1.0
    rel_tol: float = 1e-9
    abs_tol: float = 0.0
    max_subdivisions: int = 200
    # None: derived from rho_grid so the Laplace tail beyond the table is negligible
    tau_grid: GridSpec | None = None
    rho_grid: GridSpec = GridSpec(1e-5, 1e-2, 8)
    U_box: float = 3.0
    workers: int = 1

    def __post_init__(self):
        if self.cutoff_R <= 0:
            raise ValueError("cutoff_R must be positive")
        if not 0 < self.rel_tol < 1 or not 0 <= self.abs_tol < 1:
            raise ValueError("tolerances must lie in (0, 1)")
        if self.tau_grid is not None and self.tau_grid.lo < 1:
            raise ValueError("tau grid must start at tau >= 1")

    def table_grid(self) -> GridSpec:
        if self.tau_grid is not None:
            return self.tau_grid
        return GridSpec(1.0, max(10.0, 50.0 / self.rho_grid.lo), 16)


@dataclass(frozen=True)
class CurveSample:
    abscissa: float
    value: float
    est_error: float

    def __post_init__(self):
        if not math.isfinite(self.value) or self.est_error < 0:
            raise ValueError(f"invalid sample {self}")


class QuadratureError(RuntimeError):
    def __init__(self, message: str, best: CurveSample | None = None):
        super().__init__(message)
        self.best = best


def bump(r, R: float = 1.0):
    """Radial cutoff: 1 on ``[0, R/2]``, 0 on ``[R, inf)``, C^inf between."""
    r = np.asarray(r, float)
    s = np.clip((r - R / 2) / (R / 2), 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore"):
        h1 = np.where(s < 1, np.exp(-1 / np.where(s < 1, 1 - s, 1.0)), 0.0)
        h0 = np.where(s > 0, np.exp(-1 / np.where(s > 0, s, 1.0)), 0.0)
    return h1 / (h1 + h0)


# ---------------------------------------------------------------------------
# compiled integrand
#
# xx layout: coordinates (n of them), then
#   kind, R, p, nm, (c, a_1..a_n) * nm, nf, (c, b_1..b_n) * nf, n
# with p = tau (Laplace, gap) or s (zeta).

K_LAPLACE, K_ZETA, K_MASS, K_GAP = 0, 1, 2, 3


@njit(cache=True)
def _psi(r, R):
    s = (r - 0.5 * R) / (0.5 * R)
    if s <= 0.0:
        return 1.0, 0.0
    if s >= 1.0:
        return 0.0, 1.0
    a = math.exp(-1.0 / (1.0 - s))
    b = math.exp(-1.0 / s)
    return a / (a + b), b / (a + b)


@njit(cache=True)
def _log_term(xx, n, p, lR, flat):
    """Log of one term at log coordinates; ``-inf`` where it vanishes."""
    e = 0.0
    for j in range(n):
        e += xx[p + 1 + j] * (lR - xx[j])
    if not flat:
        return math.log(xx[p]) + e
    # c * exp(-1/x^b) with x^b -> 0 giving -inf
    return -math.inf if e < -700.0 else math.log(xx[p]) - math.exp(-e)


@njit(cache=True)
def _sum_terms(xx, n, p0, lR, shift):
    """``sum exp(log term - shift)`` and the max log term (for log-sum-exp)."""
    acc = 0.0
    mx = -math.inf
    p = p0 + 1
    for flat in (False, True):
        cnt = int(xx[p - 1])
        for _ in range(cnt):
            v = _log_term(xx, n, p, lR, flat)
            if v > mx:
                mx = v
            if v - shift > -745.0:
                acc += math.exp(v - shift)
            p += n + 1
        p += 1
    return acc, mx


@njit(cache=True)
def _f_linear(xx, n, p0):
    nm = int(xx[p0])
    p = p0 + 1
    f = 0.0
    for _ in range(nm):
        t = xx[p]
        for j in range(n):
            a = xx[p + 1 + j]
            if a != 0.0:
                t *= xx[j] ** a
        f += t
        p += n + 1
    nf = int(xx[p])
    p += 1
    for _ in range(nf):
        xb = 1.0
        for j in range(n):
            b = xx[p + 1 + j]
            if b != 0.0:
                xb *= xx[j] ** b
        if xb > 1.0 / 745.0:
            f += xx[p] * math.exp(-1.0 / xb)
        p += n + 1
    return f


@cfunc(types.double(types.intc, types.CPointer(types.double)), cache=True)
def _integrand(nargs, xx_):
    xx = carray(xx_, (nargs,))
    n = int(xx[nargs - 1])
    kind = int(xx[n])
    R = xx[n + 1]
    par = xx[n + 2]
    if kind == K_GAP:
        r2 = 0.0
        jac = 1.0
        for j in range(n):
            r2 += xx[j] * xx[j]
            jac *= xx[j]
        _, gap = _psi(math.sqrt(r2), R)
        if gap == 0.0:
            return 0.0
        return math.exp(-2.0 * par * _f_linear(xx, n, n + 3)) * gap * jac
    lR = math.log(R)
    r2 = 0.0
    st = 0.0
    for j in range(n):
        x = R * math.exp(-xx[j])
        r2 += x * x
        st += xx[j]
    phi, _ = _psi(math.sqrt(r2), R)
    if phi == 0.0:
        return 0.0
    # R^{2n} e^{-2 sum t}: product of x_j times the Jacobian of x_j = R e^{-t_j}
    logw = 2.0 * n * lR - 2.0 * st
    if kind == K_MASS:
        return math.exp(logw) * phi
    if kind == K_LAPLACE:
        f, _ = _sum_terms(xx, n, n + 3, lR, 0.0)
        return math.exp(logw - 2.0 * par * f) * phi
    # zeta: exp(s log f) with log f by log-sum-exp
    _, mx = _sum_terms(xx, n, n + 3, lR, 0.0)
    acc, _ = _sum_terms(xx, n, n + 3, lR, mx)
    return math.exp(logw + par * (mx + math.log(acc))) * phi


_LLC = LowLevelCallable(_integrand.ctypes)


def _pack(f: ModelFunction, kind: int, R: float, par: float) -> tuple[float, ...]:
    mc, ma, fc, fb = f.arrays()
    args = [float(kind), float(R), float(par), float(len(mc))]
    for c, a in zip(mc, ma):
        args += [float(c), *map(float, a)]
    args.append(float(len(fc)))
    for c, b in zip(fc, fb):
        args += [float(c), *map(float, b)]
    args.append(float(f.dim))
    return tuple(args)


def _t_max(tau: float) -> float:
    # deepest relevant scale is x ~ tau^{-1/2} (smallest even exponent 2);
    # mass below R e^{-16} more is under e^{-32} relative
    return 16.0 + 0.5 * math.log(max(tau, 1.0))


def _nquad(ranges, args, cfg: QuadConfig, label: str, epsrel: float | None = None):
    opts = {
        "epsrel": cfg.rel_tol if epsrel is None else epsrel,
        "epsabs": cfg.abs_tol,
        "limit": cfg.max_subdivisions,
    }
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", IntegrationWarning)
        val, err = nquad(_LLC, ranges, args=args, opts=opts)
    tol = max(cfg.abs_tol, opts["epsrel"] * abs(val))
    if caught and err > 10 * tol:
        raise QuadratureError(
            f"{label}: tolerance not met ({err:.3g} > {tol:.3g})", CurveSample(float("nan"), val, err)
        )
    return val, err


# ---------------------------------------------------------------------------
# Laplace-type integrals

def laplace_L(f: ModelFunction, tau: float, cfg: QuadConfig = QuadConfig()) -> CurveSample:
    """``int_{R_+^n} e^{-2 tau f} phi prod x_j dx``."""
    if tau < 0:
        raise ValueError("tau must be nonnegative")
    n = f.dim
    val, err = _nquad([[0.0, _t_max(tau)]] * n, _pack(f, K_LAPLACE, cfg.cutoff_R, tau), cfg, f"L({tau})")
    if val <= 0:
        raise QuadratureError(f"nonpositive Laplace integral at tau={tau}", CurveSample(tau, val, err))
    return CurveSample(float(tau), val, err)


def c0_tilde(f: ModelFunction, tau: float, cfg: QuadConfig = QuadConfig()) -> CurveSample:
    """Localized ``c_0(tau)^2``: ``(2 pi)^n`` times :func:`laplace_L`."""
    s = laplace_L(f, tau, cfg)
    w = (2 * math.pi) ** f.dim
    return CurveSample(s.abscissa, w * s.value, w * s.est_error)


def c0_full_monomial(alpha: Sequence[int], tau: float) -> float:
    """Closed form of ``(2 pi)^n int_{R_+^n} e^{-2 tau f} prod x_j dx`` for
    ``f = sum_j x_j^{alpha_j}``.

    For ``n = 1`` this is the monomial ``x^alpha``.  A single monomial in
    ``n >= 2`` variables has a divergent full-domain integral, so the
    separable sum of axis powers is the convergent oracle there; it
    factorizes into ``prod_j Gamma(2/alpha_j) / (alpha_j (2 tau)^{2/alpha_j})``.
    """
    alpha = [int(a) for a in alpha]
    if any(a <= 0 for a in alpha):
        raise ValueError("every exponent must be positive for a convergent full-domain integral")
    out = 1.0
    for a in alpha:
        out *= 2 * math.pi * math.gamma(2 / a) / (a * (2 * tau) ** (2 / a))
    return out


def _flat_slope_bound(beta_sum: float, half: float) -> float:
    """``max_{0<r<=half} exp(-r^{-b}) / r``."""
    r = min(beta_sum ** (1 / beta_sum), half)
    return math.exp(-(r ** -beta_sum)) / r


def c0_floor(f: ModelFunction, tau: float, cfg: QuadConfig = QuadConfig()) -> float:
    """Explicit lower bound ``C tau^{-2n}``-type for :func:`c0_tilde`.

    On ``|x| <= R/2`` every term is bounded by a multiple of ``|x|``, so
    ``f <= A |x|`` there and the integral over that ball is computed exactly
    in polar form.
    """
    n = f.dim
    half = cfg.cutoff_R / 2
    A = sum(float(t.coeff) * half ** (sum(t.alpha) - 1) for t in f.monomials)
    A += sum(float(t.coeff) * _flat_slope_bound(float(sum(t.beta)), half) for t in f.flats)
    sphere = 2.0 ** (1 - n) / math.gamma(n)  # int of prod omega_j over the orthant sphere
    lam = 2 * A * tau
    return (2 * math.pi) ** n * sphere * math.gamma(2 * n) * special.gammainc(2 * n, lam * half) / lam ** (2 * n)


# ---------------------------------------------------------------------------
# Bergman restriction

@dataclass(frozen=True)
class C0Table:
    """``c~_0`` on a log grid of ``tau`` plus the head nodes on ``[0, 1]``."""

    tau: np.ndarray
    value: np.ndarray
    rel_err: float
    head_nodes: np.ndarray
    head_weights: np.ndarray
    head_values: np.ndarray
    law: tuple[float, float, float] | None  # (C, a, k) for the tail
    law_drift: float

    @functools.cached_property
    def spline(self) -> CubicSpline:
        return CubicSpline(np.log(self.tau), np.log(self.value))

    @functools.cached_property
    def pchip(self) -> PchipInterpolator:
        return PchipInterpolator(np.log(self.tau), np.log(self.value))


def _c0_worker(job):
    f, tau, cfg = job
    return c0_tilde(f, tau, cfg)


def _map(jobs, workers: int):
    if workers > 1:
        with ProcessPoolExecutor(workers) as ex:
            return list(ex.map(_c0_worker, jobs))
    return [_c0_worker(j) for j in jobs]


_HEAD_GL = 16


def _tail_law(f: ModelFunction, tau: np.ndarray, val: np.ndarray) -> tuple[tuple[float, float, float], float]:
    from .newton import newton_data  # local: newton is heavier and optional here

    nd = newton_data(f)
    last = tau >= tau[-1] / 10
    L = np.log(tau[last])
    if nd.principal_compact:
        a, k = 2 / float(nd.d), float(nd.m - 1)
    else:
        k = 0.0
        a = -np.polyfit(np.log(tau[last]), np.log(val[last]), 1)[0]
    r = val[last] * tau[last] ** a / L**k
    C = float(np.median(r))
    return (C, float(a), k), float((r.max() - r.min()) / C)


def c0_table(f: ModelFunction, cfg: QuadConfig = QuadConfig()) -> C0Table:
    grid = cfg.table_grid().points()
    samples = _map([(f, float(t), cfg) for t in grid], cfg.workers)
    val = np.array([s.value for s in samples])
    rel = max(s.est_error / s.value for s in samples)
    x, w = np.polynomial.legendre.leggauss(_HEAD_GL)
    nodes = 0.5 * (x + 1) * grid[0]
    weights = 0.5 * w * grid[0]
    head = np.array([s.value for s in _map([(f, float(t), cfg) for t in nodes], cfg.workers)])
    law, drift = _tail_law(f, grid, val)
    return C0Table(grid, val, rel, nodes, weights, head, law, drift)


@functools.lru_cache(maxsize=32)
def _cached_table(f: ModelFunction, cfg: QuadConfig) -> C0Table:
    return c0_table(f, cfg)


def _bergman_from_table(tab: C0Table, rho: float, rel_tol: float) -> CurveSample:
    vlo, vhi = math.log(tab.tau[0]), math.log(tab.tau[-1])

    def middle(interp):
        def g(v):
            return math.exp(-2 * rho * math.exp(v) + 2 * v - float(interp(v)))

        # the integrand peaks near tau ~ 1/rho
        peak = min(max(-math.log(rho), vlo), vhi)
        pts = [p for p in (peak - 2, peak, peak + 2) if vlo < p < vhi]
        with warnings.catch_warnings():
            # roundoff near 1e-12 on the spline integrand is harmless here
            warnings.simplefilter("ignore", IntegrationWarning)
            return quad(g, vlo, vhi, points=pts or None, epsabs=0, epsrel=1e-12, limit=400)

    mid, mid_err = middle(tab.spline)
    mid_alt, _ = middle(tab.pchip)
    head = float(np.sum(tab.head_weights * np.exp(-2 * rho * tab.head_nodes) * tab.head_nodes / tab.head_values))

    tail = 0.0
    T = tab.tau[-1]
    if 2 * rho * T < 60:
        C, a, k = tab.law
        if tab.law_drift > 0.10:
            raise QuadratureError(
                f"tail fit unstable (drift {tab.law_drift:.2%} over the last decade); extend the tau grid",
                None,
            )
        tail, _ = quad(lambda t: math.exp(-2 * rho * t) * t ** (1 + a) / (C * math.log(t) ** k), T, np.inf, epsrel=1e-10)
    tot = (head + mid + tail) / (2 * math.pi)
    err = (mid_err + abs(mid - mid_alt) + tail * tab.law_drift) / (2 * math.pi) + tot * tab.rel_err
    return CurveSample(float(rho), tot, err)


def bergman_B(f: ModelFunction, rho: float, cfg: QuadConfig = QuadConfig()) -> CurveSample:
    """``(1/2 pi) int_0^inf e^{-2 rho tau} tau / c~_0(tau) d tau``."""
    if rho <= 0:
        raise ValueError("rho must be positive")
    return _bergman_from_table(_cached_table(f, cfg), float(rho), cfg.rel_tol)


def bergman_curve(f: ModelFunction, cfg: QuadConfig = QuadConfig(), rhos: Iterable[float] | None = None) -> list[CurveSample]:
    tab = _cached_table(f, cfg)
    rhos = cfg.rho_grid.points() if rhos is None else rhos
    return [_bergman_from_table(tab, float(r), cfg.rel_tol) for r in rhos]


# ---------------------------------------------------------------------------
# local zeta function

ZETA_MARGIN = 0.005


def zeta_Z(f: ModelFunction, s: float, cfg: QuadConfig = QuadConfig()) -> CurveSample:
    """``int f^s phi prod x_j dx`` on the orthant."""
    from .newton import newton_data

    d = float(newton_data(f).d)
    if s <= -2 / d + ZETA_MARGIN:
        raise ValueError(f"s={s} is within {ZETA_MARGIN} of the leading pole at {-2 / d:.6g}")
    val, err = _nquad([[0.0, np.inf]] * f.dim, _pack(f, K_ZETA, cfg.cutoff_R, s), cfg, f"Z({s})")
    return CurveSample(float(s), val, err)


# ---------------------------------------------------------------------------
# distribution and fiber functions

@njit(cache=True)
def _f_log_coords(t, R, mc, ma, fc, fb):
    lR = math.log(R)
    n = t.shape[0]
    f = 0.0
    for k in range(mc.shape[0]):
        e = 0.0
        for j in range(n):
            e += ma[k, j] * (lR - t[j])
        f += mc[k] * math.exp(e)
    for k in range(fc.shape[0]):
        e = 0.0
        for j in range(n):
            e += fb[k, j] * (lR - t[j])
        if e > -700.0:
            y = math.exp(-e)
            if y < 745.0:
                f += fc[k] * math.exp(-y)
    return f


def distribution_G(f: ModelFunction, u: float, cfg: QuadConfig = QuadConfig()) -> CurveSample:
    """Mass of ``phi prod x_j dx`` on ``{f < u}``.

    ``f`` is decreasing in each log coordinate, so for fixed outer
    coordinates the sublevel set in the innermost one is a half line
    ``[t*, inf)`` with ``t*`` found by bracketing.
    """
    R = cfg.cutoff_R
    mc, ma, fc, fb = (np.asarray(a, float) for a in f.arrays())
    ma = ma.reshape(len(mc), f.dim)
    fb = fb.reshape(len(fc), f.dim)
    n = f.dim
    t = np.zeros(n)
    hi_cap = 800.0

    def inner_range(*rest):
        t[1:] = rest[: n - 1]

        def g(t0):
            t[0] = t0
            return _f_log_coords(t, R, mc, ma, fc, fb) - u

        if g(0.0) < 0:
            return [0.0, np.inf]
        if g(hi_cap) >= 0:
            return [hi_cap, hi_cap]
        hi = 1.0
        while g(hi) >= 0:
            hi *= 2
        return [brentq(g, 0.0 if hi == 1.0 else hi / 2, hi, xtol=1e-14, rtol=1e-15), np.inf]

    ranges = [inner_range] + [[0.0, np.inf]] * (n - 1)
    val, err = _nquad(ranges, _pack(f, K_MASS, R, 0.0), cfg, f"G({u})")
    return CurveSample(float(u), val, err)


def fiber_H(f: ModelFunction, u: float, cfg: QuadConfig = QuadConfig(), noise_tol: float = 1e-4) -> CurveSample:
    """``dG/du`` by central differences (step ``u/64``) with one Richardson step.

    ``est_error`` adds the quadrature noise of ``G`` amplified by ``1/h`` and
    the step-halving difference; the noise part alone must stay below
    ``noise_tol`` relative to ``max(H, G_total/u)`` (``H`` itself vanishes
    above the range of ``f`` on the cutoff support).
    """
    if u <= 0:
        raise ValueError("u must be positive")
    h = u / 64

    def D(step):
        a = distribution_G(f, u + step, cfg)
        b = distribution_G(f, u - step, cfg)
        return (a.value - b.value) / (2 * step), (a.est_error + b.est_error) / (2 * step)

    d1, e1 = D(h)
    d2, e2 = D(h / 2)
    val = (4 * d2 - d1) / 3
    noise = (4 * e2 + e1) / 3
    scale = max(abs(val), _total_mass(f, cfg) / u)
    if noise > noise_tol * scale:
        raise QuadratureError(f"finite-difference noise too large for H({u})", CurveSample(u, val, noise))
    return CurveSample(float(u), val, noise + abs(d2 - d1) / 3)


@functools.lru_cache(maxsize=32)
def _total_mass(f: ModelFunction, cfg: QuadConfig) -> float:
    return zeta_Z(f, 0.0, cfg).value


def sup_on_support(f: ModelFunction, R: float, per_axis: int = 65) -> float:
    """Max of ``f`` on the orthant part of ``|x| <= R`` (sampled on the sphere,
    where the max of a coordinatewise increasing ``f`` sits)."""
    n = f.dim
    if n == 1:
        return float(evaluate(f, np.array([R])))
    ang = np.linspace(0, np.pi / 2, per_axis)
    grids = np.meshgrid(*[ang] * (n - 1), indexing="ij")
    pts = np.ones((grids[0].size, n))
    for j, g in enumerate(grids):
        pts[:, j] *= np.cos(g.ravel())
        pts[:, j + 1 :] *= np.sin(g.ravel())[:, None]
    return float(np.max(evaluate(f, R * np.abs(pts))))


@dataclass(frozen=True)
class FiberTable:
    u: np.ndarray
    H: np.ndarray
    G_min: float  # G at u[0]
    est_rel: float


def fiber_table(f: ModelFunction, cfg: QuadConfig = QuadConfig(), decades: float = 10.0, per_decade: int = 12) -> FiberTable:
    # margin: the sampled sup can sit slightly below the true one
    top = 1.05 * sup_on_support(f, cfg.cutoff_R)
    num = int(decades * per_decade)
    # odd point count for Simpson
    u = top * np.logspace(-decades, 0, num + 1 if num % 2 == 0 else num + 2)
    samples = [fiber_H(f, float(x), cfg) for x in u]
    H = np.array([s.value for s in samples])
    rel = max(s.est_error for s in samples) / max(abs(H).max(), 1e-300)
    return FiberTable(u, H, distribution_G(f, float(u[0]), cfg).value, rel)


@functools.lru_cache(maxsize=8)
def _cached_fiber(f: ModelFunction, cfg: QuadConfig) -> FiberTable:
    return fiber_table(f, cfg)


def _simpson_log(tab: FiberTable, weight) -> float:
    from scipy.integrate import simpson

    v = np.log(tab.u)
    return float(simpson(weight(tab.u) * tab.H * tab.u, x=v))


def laplace_from_fiber(f: ModelFunction, tau: float, cfg: QuadConfig = QuadConfig()) -> float:
    """``int_0^inf e^{-2 tau u} H(u) du`` on the tabulated fiber function."""
    tab = _cached_fiber(f, cfg)
    return tab.G_min + _simpson_log(tab, lambda u: np.exp(-2 * tau * u))


def zeta_from_fiber(f: ModelFunction, s: float, cfg: QuadConfig = QuadConfig()) -> float:
    """``int_0^inf u^s H(u) du`` on the tabulated fiber function."""
    tab = _cached_fiber(f, cfg)
    return tab.u[0] ** s * tab.G_min / (1 + s) + _simpson_log(tab, lambda u: u**s)


# ---------------------------------------------------------------------------
# localization gap

def localization_gap(f: ModelFunction, tau: float, cfg: QuadConfig = QuadConfig()) -> CurveSample:
    """``(2 pi)^n int_{[0,U]^n} e^{-2 tau f} (1 - phi) prod x_j dx``, the part of
    the full Laplace mass removed by the cutoff."""
    R, U = cfg.cutoff_R, cfg.U_box
    if U < R:
        raise ValueError("U_box must contain the bump support")
    val, err = _nquad([[0.0, U]] * f.dim, _pack(f, K_GAP, R, tau), cfg, f"e({tau})")
    w = (2 * math.pi) ** f.dim
    return CurveSample(float(tau), w * max(val, 0.0), w * err)


# ---------------------------------------------------------------------------

def _fmt(x: float) -> str:
    return repr(float(x))


def write_csv(samples: Iterable[CurveSample], path=None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["abscissa", "value", "est_error"])
    for s in samples:
        w.writerow([_fmt(s.abscissa), _fmt(s.value), _fmt(s.est_error)])
    text = buf.getvalue()
    if path is not None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return text
