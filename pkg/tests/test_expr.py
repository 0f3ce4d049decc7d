from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from newtonkernel.expr import (
    FlatTerm,
    ModelFunction,
    MonomialTerm,
    ParseError,
    evaluate,
    parse_model,
    render,
)


def test_parse_fixture_text():
    f = parse_model("x1^6 + x1^2*x2^4 + exp(-1/(x2^2))")
    assert f.dim == 2
    assert f.support == ((6, 0), (2, 4))
    assert f.flats == (FlatTerm((Fraction(0), Fraction(2))),)


def test_parse_coefficients_and_spacing():
    f = parse_model(" 3/2 * x1^2 x2^2 + 0.5x1^4 ")
    assert {m.alpha: m.coeff for m in f.monomials} == {(2, 2): Fraction(3, 2), (4, 0): Fraction(1, 2)}


def test_rational_flat_exponent():
    f = parse_model("x1^2 + exp(-1/(x2^(3/2)))")
    assert f.flats[0].beta == (0, Fraction(3, 2))


def test_repeated_factors_accumulate():
    assert parse_model("x1*x1").support == ((2,),)


def test_duplicate_monomials_merge():
    f = parse_model("x1^2 + 2*x1^2")
    assert f.monomials == (MonomialTerm((2,), Fraction(3)),)


def test_dim_embedding():
    f = parse_model("x1^2", dim=3)
    assert f.support == ((2, 0, 0),)
    with pytest.raises(ParseError):
        parse_model("x3^2", dim=2)


@pytest.mark.parametrize(
    "text, pos",
    [
        ("x1^3", 3),
        ("x1^2 + x2", 7),
        ("-x1^2", 1),
        ("-2*x1^2", 0),
        ("x1^2 + $", 7),
        ("", 0),
        ("exp(-1/(x1^2))", 0),
        ("x1^2 + exp(-2/(x1^2))", 12),
        ("x0^2", 0),
    ],
)
def test_parse_errors_carry_position(text, pos):
    with pytest.raises(ParseError) as err:
        parse_model(text)
    assert err.value.position == pos


def test_render_round_trip_and_order():
    f = parse_model("exp(-1/(x2^2)) + x1^2*x2^4 + 2*x1^6")
    assert render(f) == "2*x1^6 + x1^2*x2^4 + exp(-1/(x2^2))"
    assert parse_model(render(f)) == f


def test_evaluate_and_flat_underflow():
    f = parse_model("x1^2 + exp(-1/(x2^2))")
    x = np.array([[0.5, 0.0], [0.5, 1.0], [0.0, 0.01]])
    np.testing.assert_allclose(evaluate(f, x), [0.25, 0.25 + np.exp(-1.0), 0.0])
    assert evaluate(f, np.array([0.5, 1.0])) == pytest.approx(0.25 + np.exp(-1.0))


def test_model_rejects_invalid_terms():
    with pytest.raises(ValueError):
        MonomialTerm((1,))
    with pytest.raises(ValueError):
        MonomialTerm((0, 0))
    with pytest.raises(ValueError):
        FlatTerm((0,))
    with pytest.raises(ValueError):
        ModelFunction(1, ())


def test_transforms():
    f = parse_model("x1^2 + x2^4 + exp(-1/(x2^2))")
    assert f.polynomial_part().flats == ()
    assert f.scaled(2).monomials[0].coeff == 2
    assert f.permuted((1, 0)) == parse_model("x2^2 + x1^4 + exp(-1/(x1^2))")
    assert f.plus(parse_model("x1^2*x2^2")).support == ((2, 2), (2, 0), (0, 4))


even = st.integers(0, 4).map(lambda k: 2 * k)


@st.composite
def models(draw):
    n = draw(st.integers(1, 3))
    alphas = draw(st.lists(st.tuples(*[even] * n).filter(any), min_size=1, max_size=4))
    coeffs = draw(st.lists(st.fractions(min_value=Fraction(1, 8), max_value=8, max_denominator=8), min_size=len(alphas), max_size=len(alphas)))
    mons = tuple(MonomialTerm(a, c) for a, c in zip(alphas, coeffs))
    flats = ()
    if draw(st.booleans()):
        beta = draw(st.tuples(*[st.sampled_from([0, 1, 2, Fraction(1, 2)])] * n).filter(any))
        flats = (FlatTerm(beta),)
    return ModelFunction(n, mons, flats)


@given(models())
@settings(max_examples=60, deadline=None)
def test_render_parse_identity(f):
    assert parse_model(render(f), dim=f.dim) == f


@given(models(), st.data())
@settings(max_examples=40, deadline=None)
def test_evaluate_is_nonnegative_and_scales(f, data):
    x = np.array(data.draw(st.lists(st.floats(0, 2), min_size=f.dim, max_size=f.dim)))
    v = evaluate(f, x)
    assert v >= 0
    assert evaluate(f.scaled(3), x) == pytest.approx(3 * v, rel=1e-12, abs=1e-300)
