import json

import pytest

from newtonkernel.fixtures import corpus, corpus_json, get
from newtonkernel.newton import newton_data


@pytest.mark.parametrize("fx", corpus(), ids=lambda fx: fx.name)
def test_fixture_matches_newton_data(fx):
    nd = newton_data(fx.model)
    assert (nd.d, nd.m, nd.principal_compact, nd.convenient, nd.rho) == (fx.d, fx.m, fx.compact, fx.convenient, fx.rho)


def test_reference_group():
    names = [fx.name for fx in corpus() if fx.group == "reference"]
    assert names == ["edge_d3", "vertex_d2_a", "vertex_d2_b", "vertex_3d", "noncompact"]
    assert get("noncompact").bergman is None


def test_flat_swaps_share_polynomial_part():
    for fx in corpus():
        if fx.group == "flat_swap":
            base = get(fx.name.removesuffix("_p4"))
            assert fx.model.polynomial_part() == base.model.polynomial_part()
            assert fx.model.flats != base.model.flats


def test_corpus_json_shape():
    data = json.loads(corpus_json())
    assert data[0] == {
        "name": "edge_d3",
        "model": "x1^6 + x1^2*x2^4 + exp(-1/(x2^2))",
        "group": "reference",
        "d": "3",
        "m": 1,
        "compact": True,
        "convenient": False,
        "rho": ["6", "inf"],
        "bergman": {"a": "8/3", "k": 0},
    }
    assert data[4]["bergman"] == "inapplicable"
    with pytest.raises(KeyError):
        get("nope")
