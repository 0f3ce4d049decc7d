"""Acceptance criteria 1-10.

Each criterion is a function returning an :class:`Outcome`; the pytest
wrappers assert on it and record one PASS/FAIL line that ``conftest.py``
prints in the terminal summary.  Run this file directly for the same lines
without pytest::

    python tests/test_acceptance.py [criterion numbers...]
"""
from __future__ import annotations

import functools
import math
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import pytest

from newtonkernel.asymfit import (
    compensated_ratio_fit,
    exponent_scan,
    gap_decay_check,
    pole_order_probe,
    predicted_law,
    sandwich_check,
)
from newtonkernel.expr import parse_model
from newtonkernel.fixtures import get
from newtonkernel.newton import check_euler_identity, gamma_part, newton_data
from newtonkernel.polytope import compact_faces
from newtonkernel.quad import (
    CurveSample,
    GridSpec,
    QuadConfig,
    bergman_B,
    bergman_curve,
    c0_tilde,
    laplace_from_fiber,
    laplace_L,
    zeta_from_fiber,
    zeta_Z,
)

REFERENCE = ("edge_d3", "vertex_d2_a", "vertex_d2_b", "vertex_3d", "noncompact")

# criterion 2 range and the deeper one where the pre-asymptotic correction has decayed
RHO_C2 = GridSpec(1e-5, 1e-2, 8)
RHO_DEEP = GridSpec(1e-9, 1e-6, 8)
RHO_C3 = GridSpec(1e-6, 1e-2, 8)
# 3-D fixture: loosened inner tolerance and an explicit tau table
CFG_3D = QuadConfig(rel_tol=1e-6, rho_grid=RHO_C3, tau_grid=GridSpec(1.0, 5e7, 8))


@dataclass
class Outcome:
    number: int
    passed: bool
    detail: str
    elapsed: float = 0.0
    extra: dict = field(default_factory=dict)

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"criterion {self.number:2d}: {tag}  {self.detail}  [{self.elapsed:.1f} s]"


def _timed(number):
    def wrap(fn):
        @functools.wraps(fn)
        @functools.lru_cache(maxsize=None)
        def run() -> Outcome:
            t0 = time.perf_counter()
            out = fn()
            out.number = number
            out.elapsed = time.perf_counter() - t0
            return out

        return run

    return wrap


def _model(name):
    return get(name).model


@functools.lru_cache(maxsize=None)
def _curve(name: str, cfg: QuadConfig):
    return tuple(bergman_curve(_model(name), cfg))


def _bergman_fit(name: str, cfg: QuadConfig, threshold=None):
    nd = newton_data(_model(name))
    return compensated_ratio_fit(_curve(name, cfg), predicted_law(nd, "bergman"), threshold)


# ---------------------------------------------------------------------------
# criteria

@_timed(1)
def criterion_1() -> Outcome:
    bad = []
    for name in REFERENCE:
        fx = get(name)
        nd = newton_data(fx.model)
        got = (nd.d, nd.m, nd.principal_compact, nd.convenient, nd.rho)
        want = (fx.d, fx.m, fx.compact, fx.convenient, fx.rho)
        if got != want or not isinstance(nd.d, Fraction):
            bad.append(f"{name}: {got} != {want}")
    return Outcome(1, not bad, "Newton data exact on 5 fixtures" if not bad else "; ".join(bad))


@_timed(2)
def criterion_2() -> Outcome:
    rep = _bergman_fit("edge_d3", QuadConfig(rho_grid=RHO_C2), threshold=0.05)
    deep = _bergman_fit("edge_d3", QuadConfig(rho_grid=RHO_DEEP), threshold=0.05)
    detail = (
        f"edge_d3 B*rho^(8/3) drift {rep.drift:.2%} on [1e-5,1e-2] (limit 5%); "
        f"{deep.drift:.2%} on [1e-9,1e-6]"
    )
    return Outcome(2, rep.passed, detail, extra={"fit": rep, "deep": deep})


def _c3_fixture(name, cfg):
    nd = newton_data(_model(name))
    law = predicted_law(nd, "bergman")
    rep = compensated_ratio_fit(_curve(name, cfg), law, threshold=0.15)
    return rep, law


@_timed(3)
def criterion_3() -> Outcome:
    parts, ok = [], True
    reps = {}
    for name, cfg, want in (
        ("vertex_d2_a", QuadConfig(rho_grid=RHO_C3), (3, 1)),
        ("vertex_d2_b", QuadConfig(rho_grid=RHO_C3), (3, 1)),
        ("vertex_3d", CFG_3D, (3, 2)),
    ):
        rep, law = _c3_fixture(name, cfg)
        reps[name] = rep
        # the log factor divides: B ~ C rho^-a (log 1/rho)^-k
        law_ok = (law.a, -law.k) == want
        ok &= rep.passed and law_ok
        parts.append(f"{name} (a,k)=({law.a},{-law.k}) drift {rep.drift:.2%}")
    return Outcome(3, ok, "; ".join(parts) + " (limit 15%)", extra=reps)


@_timed(4)
def criterion_4() -> Outcome:
    f = parse_model("x1^2")
    cfg = QuadConfig(rho_grid=GridSpec(1e-5, 1e-3, 8))
    vals = np.array([4 * math.pi**2 * s.abscissa**3 * s.value for s in bergman_curve(f, cfg)])
    ok = bool(np.all((vals >= 0.99) & (vals <= 1.01)))
    return Outcome(4, ok, f"x1^2: 4 pi^2 rho^3 B in [{vals.min():.6f}, {vals.max():.6f}] for rho <= 1e-3")


@_timed(5)
def criterion_5() -> Outcome:
    f = _model("vertex_d2_a")
    taus = GridSpec(1e3, 1e6, 8).points()
    vals = np.array([c0_tilde(f, float(t)).value for t in taus])
    r = taus * vals / np.log(taus)
    spread = float((r.max() - r.min()) / np.median(r))
    law = predicted_law(newton_data(f), "c0")
    rep = compensated_ratio_fit([CurveSample(float(t), float(v), 0.0) for t, v in zip(taus, vals)], law, 0.15)
    ok = spread <= 0.15 and rep.passed and (law.a, law.k) == (1, 1)
    return Outcome(5, ok, f"vertex_d2_a tau*c0/log tau drift {spread:.2%} over [1e3,1e6], {rep.drift:.2%} final decade (limit 15%)")


@_timed(6)
def criterion_6() -> Outcome:
    prod = pole_order_probe(parse_model("x1^2*x2^2"), deltas=(0.05, 0.025, 0.0125))
    siegel = pole_order_probe(parse_model("x1^2"), deltas=(0.05, 0.025, 0.0125))
    limit = siegel.law.C
    ok = prod.passed and all(g > 0 for g in prod.ratios) and abs(limit - 0.5) <= 0.02 * 0.5
    return Outcome(
        6,
        ok,
        f"x1^2*x2^2 (s+1)^2 Z spread {prod.drift:.2%} (limit 10%); x1^2 (s+1) Z -> {limit:.4f} (1/2 within 2%)",
    )


@_timed(7)
def criterion_7() -> Outcome:
    f = parse_model("x1^2*x2^2")
    errs = []
    for tau in (10.0, 100.0):
        direct = laplace_L(f, tau).value
        errs.append(("L", tau, abs(laplace_from_fiber(f, tau) / direct - 1)))
    for s in (0.5, 1.0, 2.0):
        direct = zeta_Z(f, s).value
        errs.append(("Z", s, abs(zeta_from_fiber(f, s) / direct - 1)))
    worst = max(e for *_, e in errs)
    return Outcome(7, worst <= 0.01, f"x1^2*x2^2 fiber vs direct: worst relative gap {worst:.2e} (limit 1%)")


@_timed(8)
def criterion_8() -> Outcome:
    f = parse_model("x1^2")
    rep = gap_decay_check(f, np.linspace(1.0, 50.0, 50))
    ok = rep.bounded and abs(2 * rep.eps - 0.5) < 1e-12
    s = np.array(rep.scaled)
    return Outcome(8, ok, f"x1^2 e(tau) e^(0.5 tau) from {s[0]:.3g} to {s[-1]:.3g}, max {s.max():.3g}, bounded={rep.bounded}")


@_timed(9)
def criterion_9() -> Outcome:
    rep = sandwich_check(_model("edge_d3"), M=4, cfg=QuadConfig(rho_grid=RHO_C2))
    fits = {k: v.drift for k, v in rep.fits.items()}
    ok = rep.ordering_ok and rep.fits["F0"].drift <= 0.05 and rep.fits["F1"].drift <= 0.05
    return Outcome(
        9,
        ok,
        f"edge_d3 M=4 R={rep.R:.3f} ordering={rep.ordering_ok}; drift F0 {fits['F0']:.2%}, F {fits['F']:.2%}, F1 {fits['F1']:.2%} (limit 5%)",
        extra={"report": rep},
    )


def _scaling() -> float:
    f = _model("vertex_d2_a")
    cfg = QuadConfig()
    worst = 0.0
    for rho in (1e-2, 1e-3, 1e-4):
        lhs = bergman_B(f.scaled(2), rho, cfg).value
        rhs = bergman_B(f, rho / 2, cfg).value / 4
        worst = max(worst, abs(lhs / rhs - 1))
    return worst


def _cutoff(name, grid) -> tuple[bool, str]:
    fits = [_bergman_fit(name, QuadConfig(cutoff_R=R, rho_grid=grid)) for R in (1.0, 1.5)]
    dC = abs(fits[0].law.C - fits[1].law.C)
    tol = 2 * max(f.drift for f in fits) * abs(fits[0].law.C)
    return dC <= tol, f"{name} dC/C {dC / fits[0].law.C:.1e}"


def _swap(base, grid) -> tuple[bool, str]:
    scans = [exponent_scan(_curve(name, QuadConfig(rho_grid=grid))) for name in (base, base + "_p4")]
    keys = [(s.a_snapped, s.k_est) for s in scans]
    return keys[0] == keys[1], f"{base} p2 {keys[0][0]},{keys[0][1]} p4 {keys[1][0]},{keys[1][1]}"


def _euler() -> float:
    worst = 0.0
    rng = np.random.default_rng(7)
    for name in REFERENCE + ("siegel", "convenient_edge"):
        f = _model(name)
        P = newton_data(f).polyhedron
        for face in compact_faces(P):
            x = rng.uniform(0.1, 2.0, size=(64, f.dim))
            worst = max(worst, check_euler_identity(gamma_part(f, face), x))
    return worst


@_timed(10)
def criterion_10() -> Outcome:
    scale = _scaling()
    cut = [_cutoff("edge_d3", RHO_C2), _cutoff("vertex_d2_a", RHO_C3), _cutoff("vertex_d2_b", RHO_C3)]
    swap = [
        _swap("vertex_d2_a", RHO_C3),
        _swap("vertex_d2_b", RHO_C3),
        # the fixture-1 scan only resolves (8/3, 0) once rho <= 1e-6
        _swap("edge_d3", GridSpec(1e-10, 1e-6, 8)),
    ]
    euler = _euler()
    ok = scale <= 1e-6 and all(c for c, _ in cut) and all(s for s, _ in swap) and euler <= 1e-10
    detail = (
        f"scaling {scale:.1e}; cutoff " + ", ".join(d for _, d in cut) + "; swap " + ", ".join(d for _, d in swap)
        + f"; Euler residual {euler:.1e}"
    )
    return Outcome(10, ok, detail)


CRITERIA = {i: globals()[f"criterion_{i}"] for i in range(1, 11)}


# ---------------------------------------------------------------------------
# pytest wrappers

def _check(number: int, record):
    out = CRITERIA[number]()
    record(out.line())
    assert out.passed, out.line()
    return out


def test_criterion_1_newton_data(acceptance_record):
    out = _check(1, acceptance_record)
    assert out.elapsed < 1.0


@pytest.mark.slow
def test_criterion_2_pure_power_bergman(acceptance_record):
    _check(2, acceptance_record)


@pytest.mark.slow
def test_criterion_2_supplement_deeper_rho():
    """The fixture-1 ratio does settle below 5%, one law at deeper rho."""
    deep = CRITERIA[2]().extra["deep"]
    assert deep.drift <= 0.05


@pytest.mark.slow
def test_criterion_3_log_corrected_bergman(acceptance_record):
    _check(3, acceptance_record)


def test_criterion_4_siegel_oracle(acceptance_record):
    _check(4, acceptance_record)


def test_criterion_5_c0_law(acceptance_record):
    _check(5, acceptance_record)


def test_criterion_6_pole_probe(acceptance_record):
    _check(6, acceptance_record)


@pytest.mark.slow
def test_criterion_7_fiber_pipeline(acceptance_record):
    _check(7, acceptance_record)


def test_criterion_8_localization(acceptance_record):
    _check(8, acceptance_record)


@pytest.mark.slow
def test_criterion_9_sandwich(acceptance_record):
    _check(9, acceptance_record)


@pytest.mark.slow
def test_criterion_9_supplement_deeper_rho():
    """Both sandwich bounds pass the 5% drift once rho reaches 1e-9."""
    rep = sandwich_check(_model("edge_d3"), M=4, cfg=QuadConfig(rho_grid=RHO_DEEP))
    assert rep.ordering_ok
    assert rep.fits["F0"].drift <= 0.05 and rep.fits["F1"].drift <= 0.05


@pytest.mark.slow
def test_criterion_10_invariance(acceptance_record):
    _check(10, acceptance_record)


if __name__ == "__main__":
    wanted = [int(a) for a in sys.argv[1:]] or list(CRITERIA)
    for i in wanted:
        print(CRITERIA[i]().line(), flush=True)
