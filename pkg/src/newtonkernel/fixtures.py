"""Reference model functions with their expected Newton data.

Expected ``(d, m)`` are hull-derived; the stored Bergman exponents follow
from them as ``a = 2/d + 2`` and a log power ``k = m - 1`` that sits in the
denominator, i.e. ``B(rho) ~ C rho^{-a} (log 1/rho)^{-k}``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .expr import ModelFunction, parse_model
from .newton import INF

__all__ = ["Fixture", "corpus", "get", "corpus_json"]


@dataclass(frozen=True)
class Fixture:
    name: str
    text: str
    group: str  # "reference" | "synthetic" | "flat_swap"
    d: Fraction
    m: int
    compact: bool
    convenient: bool
    rho: tuple
    bergman: tuple[Fraction, int] | None  # None: no leading law (noncompact)

    def __post_init__(self):
        if self.bergman is not None:
            a, k = self.bergman
            if a != 2 / self.d + 2 or k != self.m - 1:
                raise ValueError(f"fixture {self.name}: stored law {self.bergman} inconsistent with d={self.d}, m={self.m}")
        elif self.compact:
            raise ValueError(f"fixture {self.name}: compact principal face needs a law")

    @property
    def model(self) -> ModelFunction:
        return parse_model(self.text)

    def to_json(self) -> dict:
        def q(v):
            if v is INF:
                return "inf"
            v = Fraction(v)
            return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"

        return {
            "name": self.name,
            "model": self.text,
            "group": self.group,
            "d": q(self.d),
            "m": self.m,
            "compact": self.compact,
            "convenient": self.convenient,
            "rho": [q(r) for r in self.rho],
            "bergman": "inapplicable" if self.bergman is None else {"a": q(self.bergman[0]), "k": self.bergman[1]},
        }


F = Fraction


def _law(d, m):
    return (2 / F(d) + 2, m - 1)


@lru_cache(maxsize=1)
def corpus() -> tuple[Fixture, ...]:
    fx = [
        Fixture("edge_d3", "x1^6 + x1^2*x2^4 + exp(-1/(x2^2))", "reference", F(3), 1, True, False, (F(6), INF), _law(3, 1)),
        Fixture("vertex_d2_a", "x1^6 + x1^2*x2^2 + exp(-1/(x2^2))", "reference", F(2), 2, True, False, (F(6), INF), _law(2, 2)),
        Fixture(
            "vertex_d2_b",
            "x1^2*x2^2 + exp(-1/(x1^2)) + exp(-1/(x2^2))",
            "reference",
            F(2),
            2,
            True,
            False,
            (INF, INF),
            _law(2, 2),
        ),
        Fixture(
            "vertex_3d",
            "x1^8 + x2^8 + x1^2*x2^2*x3^2 + exp(-1/(x3^2))",
            "reference",
            F(2),
            3,
            True,
            False,
            (F(8), F(8), INF),
            _law(2, 3),
        ),
        Fixture("noncompact", "x1^2 + exp(-1/(x2^2))", "reference", F(2), 1, False, False, (F(2), INF), None),
        Fixture("siegel", "x1^2", "synthetic", F(2), 1, True, True, (F(2),), _law(2, 1)),
        Fixture("convenient_edge", "x1^6 + x2^4", "synthetic", F(12, 5), 1, True, True, (F(6), F(4)), _law(F(12, 5), 1)),
        Fixture("edge_d3_p4", "x1^6 + x1^2*x2^4 + exp(-1/(x2^4))", "flat_swap", F(3), 1, True, False, (F(6), INF), _law(3, 1)),
        Fixture("vertex_d2_a_p4", "x1^6 + x1^2*x2^2 + exp(-1/(x2^4))", "flat_swap", F(2), 2, True, False, (F(6), INF), _law(2, 2)),
        Fixture(
            "vertex_d2_b_p4",
            "x1^2*x2^2 + exp(-1/(x1^4)) + exp(-1/(x2^4))",
            "flat_swap",
            F(2),
            2,
            True,
            False,
            (INF, INF),
            _law(2, 2),
        ),
        Fixture(
            "vertex_3d_p4",
            "x1^8 + x2^8 + x1^2*x2^2*x3^2 + exp(-1/(x3^4))",
            "flat_swap",
            F(2),
            3,
            True,
            False,
            (F(8), F(8), INF),
            _law(2, 3),
        ),
    ]
    return tuple(fx)


def get(name: str) -> Fixture:
    for f in corpus():
        if f.name == name:
            return f
    raise KeyError(name)


def corpus_json(indent: int | None = 2) -> str:
    return json.dumps([f.to_json() for f in corpus()], indent=indent, ensure_ascii=False)


if __name__ == "__main__":
    print(corpus_json())
