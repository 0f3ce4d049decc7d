from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from newtonkernel.asymfit import (
    AsymptoticLaw,
    InapplicableError,
    compensated_ratio_fit,
    default_threshold,
    exponent_scan,
    gap_decay_check,
    plateau_infimum,
    pole_order_probe,
    predicted_law,
    principal_face_preserved,
    sandwich_check,
    sandwich_radius,
    sandwich_upper,
)
from newtonkernel.expr import parse_model
from newtonkernel.fixtures import get
from newtonkernel.newton import newton_data
from newtonkernel.quad import CurveSample, GridSpec, QuadConfig


def synthetic(law: AsymptoticLaw, grid: GridSpec, wiggle=0.0):
    x = grid.points()
    v = law(x) * (1 + wiggle * np.sin(np.log(x)))
    return [CurveSample(float(a), float(b), 0.0) for a, b in zip(x, v)]


def test_predicted_laws():
    nd = newton_data(get("vertex_d2_a").model)
    assert (predicted_law(nd, "bergman").a, predicted_law(nd, "bergman").k) == (3, -1)
    assert (predicted_law(nd, "c0").a, predicted_law(nd, "c0").k) == (1, 1)
    assert (predicted_law(nd, "fiber").a, predicted_law(nd, "fiber").k) == (0, 1)
    assert (predicted_law(nd, "zeta_pole").a, predicted_law(nd, "zeta_pole").k) == (-1, 2)
    nd = newton_data(get("edge_d3").model)
    assert predicted_law(nd, "bergman").a == Fraction(8, 3)
    with pytest.raises(InapplicableError):
        predicted_law(newton_data(get("noncompact").model), "bergman")
    with pytest.raises(ValueError):
        predicted_law(nd, "nope")


def test_default_threshold():
    assert default_threshold(0) == 0.05 and default_threshold(-2) == 0.15


def test_fit_recovers_constant():
    law = AsymptoticLaw(2.5, Fraction(8, 3), -1, "rho_to_0")
    rep = compensated_ratio_fit(synthetic(law, GridSpec(1e-6, 1e-2, 8)), law.with_constant(None))
    assert rep.law.C == pytest.approx(2.5) and rep.drift < 1e-12 and rep.passed
    assert rep.samples_used == pytest.approx((1e-6, 1e-5))


def test_fit_uses_final_decade_for_tau():
    law = AsymptoticLaw(1.0, Fraction(1), 1, "tau_to_inf")
    rep = compensated_ratio_fit(synthetic(law, GridSpec(1e3, 1e6, 8)), law)
    assert rep.samples_used == pytest.approx((1e5, 1e6))


def test_fit_flags_drift():
    law = AsymptoticLaw(1.0, Fraction(3), 0, "rho_to_0")
    rep = compensated_ratio_fit(synthetic(law, GridSpec(1e-5, 1e-2, 8), wiggle=0.1), law)
    assert not rep.passed and rep.drift > 0.05


def test_fit_input_checks():
    law = AsymptoticLaw(1.0, Fraction(3), 0, "rho_to_0")
    with pytest.raises(ValueError):
        compensated_ratio_fit(synthetic(law, GridSpec(1e-3, 1e-2, 8)), law)
    with pytest.raises(ValueError):
        AsymptoticLaw(1.0, Fraction(3), 0, "nowhere")


@given(
    st.sampled_from([Fraction(3), Fraction(8, 3), Fraction(5, 2), Fraction(7, 3), Fraction(4)]),
    st.integers(-2, 2),
    st.floats(0.01, 100.0),
)
@settings(max_examples=40, deadline=None)
def test_exponent_scan_recovers_power_log(a, k, C):
    law = AsymptoticLaw(C, a, k, "rho_to_0")
    scan = exponent_scan(synthetic(law, GridSpec(1e-12, 1e-6, 8)))
    assert scan.a_snapped == a and scan.k_est == k


def test_exponent_scan_tau_direction():
    law = AsymptoticLaw(3.0, Fraction(1), 1, "tau_to_inf")
    scan = exponent_scan(synthetic(law, GridSpec(1e6, 1e12, 8)), "tau_to_inf")
    assert (scan.a_snapped, scan.k_est) == (1, 1)


def test_exponent_scan_needs_monotone_data():
    law = AsymptoticLaw(1.0, Fraction(0), 0, "rho_to_0")
    with pytest.raises(ValueError):
        exponent_scan(synthetic(law, GridSpec(1e-6, 1e-2, 8), wiggle=0.5))


def test_pole_probe_product_and_negative_control():
    f = parse_model("x1^2*x2^2")
    rep = pole_order_probe(f)
    assert rep.passed and all(g > 0 for g in rep.ratios)
    # one extra power of delta drives the product to zero
    wrong = pole_order_probe(f, order=3)
    assert not wrong.passed


def test_pole_probe_siegel_limit():
    rep = pole_order_probe(parse_model("x1^2"))
    assert rep.law.C == pytest.approx(0.5, rel=0.02)


def test_sandwich_upper_preserves_principal_face():
    f0 = get("edge_d3").model.polynomial_part()
    assert not principal_face_preserved(f0, sandwich_upper(f0, 2))
    f1 = sandwich_upper(f0, 4)
    assert principal_face_preserved(f0, f1)
    assert f1.support == ((8, 0), (6, 0), (2, 4), (0, 8))


def test_plateau_infimum():
    assert plateau_infimum(parse_model("x1^2"), 1.0) == pytest.approx(0.25)
    assert plateau_infimum(parse_model("x1^2 + x2^2"), 2.0) == pytest.approx(1.0)


def test_gap_decay_bounded():
    rep = gap_decay_check(parse_model("x1^2"), np.linspace(1.0, 20.0, 20))
    assert rep.bounded and rep.eps == pytest.approx(0.25)
    assert rep.rate >= 2 * rep.eps - 1e-9
    assert rep.to_json()["predicted_rate"] == pytest.approx(0.5)


def test_sandwich_radius_shrinks_to_pointwise_ball():
    f = get("edge_d3").model
    f0 = f.polynomial_part()
    f1 = sandwich_upper(f0, 4)
    # x2^8 >= exp(-1/x2^2) fails for 0.34 < x2 < 0.84
    assert sandwich_radius(f, f0, f1, 1.0) == pytest.approx(0.8**5)
    assert sandwich_radius(f0, f0, f1, 1.0) == 1.0


def test_sandwich_degenerate_and_refusal():
    cfg = QuadConfig(rho_grid=GridSpec(1e-3, 1e-1, 4))
    rep = sandwich_check(parse_model("x1^6 + x1^2*x2^4"), 4, cfg)
    assert rep.R == 1.0 and rep.pointwise_ok and rep.ordering_ok
    for a, b in zip(rep.curves["F0"], rep.curves["F"]):
        assert a.value == b.value
    with pytest.raises(InapplicableError):
        sandwich_check(parse_model("x1^2 + exp(-1/(x2^2))"), 4, cfg)
    with pytest.raises(ValueError):
        sandwich_check(parse_model("x1^6 + x1^2*x2^4"), 2, cfg)
