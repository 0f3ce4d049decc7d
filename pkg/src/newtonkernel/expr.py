"""Model functions: sums of positive even monomials in ``x_j = |z_j|`` plus
explicit flat terms ``c * exp(-1/x^beta)``.

The text grammar is::

    model := term ("+" term)*
    term  := [coeff ["*"]] factor+          (monomial)
           | [coeff ["*"]] "exp(-1/(" factor+ "))"
    factor:= "x" INDEX ["^" exponent] ["*"]

Coefficients and exponents are rational literals (``3``, ``0.5``, ``3/2`` or
a parenthesised ``(3/2)`` in exponent position).  Whitespace is ignored.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "ParseError",
    "MonomialTerm",
    "FlatTerm",
    "ModelFunction",
    "parse_model",
    "render",
    "evaluate",
]

# exp(-y) underflows to exactly 0.0 in double precision beyond this
_EXP_UNDERFLOW = 745.2


class ParseError(ValueError):
    """Invalid model text.  ``position`` is a 0-based character offset."""

    def __init__(self, message: str, position: int | None = None):
        self.message = message
        self.position = position
        where = f" at position {position}" if position is not None else ""
        super().__init__(f"{message}{where}")


def _fmt_rational(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True, order=True)
class MonomialTerm:
    """``coeff * prod(x_j ** alpha_j)`` with ``alpha`` even, nonzero."""

    alpha: tuple[int, ...]
    coeff: Fraction = Fraction(1)

    def __post_init__(self):
        object.__setattr__(self, "coeff", Fraction(self.coeff))
        object.__setattr__(self, "alpha", tuple(int(a) for a in self.alpha))
        if self.coeff <= 0:
            raise ValueError(f"monomial coefficient must be positive, got {self.coeff}")
        if any(a < 0 or a % 2 for a in self.alpha):
            raise ValueError(f"monomial exponents must be even and nonnegative, got {self.alpha}")
        if not any(self.alpha):
            raise ValueError("constant monomial is not allowed (F(0) = 0)")

    @property
    def dim(self) -> int:
        return len(self.alpha)


@dataclass(frozen=True, order=True)
class FlatTerm:
    """``coeff * exp(-1 / prod(x_j ** beta_j))``; flat wherever some
    ``x_j`` with ``beta_j > 0`` tends to zero."""

    beta: tuple[Fraction, ...]
    coeff: Fraction = Fraction(1)

    def __post_init__(self):
        object.__setattr__(self, "coeff", Fraction(self.coeff))
        object.__setattr__(self, "beta", tuple(Fraction(b) for b in self.beta))
        if self.coeff <= 0:
            raise ValueError(f"flat term coefficient must be positive, got {self.coeff}")
        if any(b < 0 for b in self.beta):
            raise ValueError(f"flat term exponents must be nonnegative, got {self.beta}")
        if not any(self.beta):
            raise ValueError("flat term needs at least one positive exponent")

    @property
    def dim(self) -> int:
        return len(self.beta)


@dataclass(frozen=True)
class ModelFunction:
    """Radial profile ``f(x) = F(z)``; immutable, validated on construction."""

    dim: int
    monomials: tuple[MonomialTerm, ...]
    flats: tuple[FlatTerm, ...] = ()
    _arrays: tuple = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dimension must be at least 1")
        mons = _merge_monomials(self.monomials)
        flats = tuple(sorted(self.flats))
        if not mons:
            raise ValueError("model function is flat at the origin: at least one monomial is required")
        for t in (*mons, *flats):
            if t.dim != self.dim:
                raise ValueError(f"term {t} has dimension {t.dim}, expected {self.dim}")
        object.__setattr__(self, "monomials", mons)
        object.__setattr__(self, "flats", flats)

    @property
    def support(self) -> tuple[tuple[int, ...], ...]:
        return tuple(m.alpha for m in self.monomials)

    def polynomial_part(self) -> "ModelFunction":
        return ModelFunction(self.dim, self.monomials)

    def scaled(self, lam) -> "ModelFunction":
        lam = Fraction(lam)
        if lam <= 0:
            raise ValueError("scale factor must be positive")
        return ModelFunction(
            self.dim,
            tuple(MonomialTerm(m.alpha, m.coeff * lam) for m in self.monomials),
            tuple(FlatTerm(t.beta, t.coeff * lam) for t in self.flats),
        )

    def plus(self, other: "ModelFunction") -> "ModelFunction":
        if other.dim != self.dim:
            raise ValueError("dimension mismatch")
        return ModelFunction(self.dim, self.monomials + other.monomials, self.flats + other.flats)

    def permuted(self, perm: Sequence[int]) -> "ModelFunction":
        """Coordinates reordered so that new coordinate ``i`` is old ``perm[i]``."""
        return ModelFunction(
            self.dim,
            tuple(MonomialTerm(tuple(m.alpha[p] for p in perm), m.coeff) for m in self.monomials),
            tuple(FlatTerm(tuple(t.beta[p] for p in perm), t.coeff) for t in self.flats),
        )

    def arrays(self):
        """Float arrays ``(mono_coeff, mono_alpha, flat_coeff, flat_beta)``."""
        if self._arrays is None:
            arr = (
                np.array([float(m.coeff) for m in self.monomials]),
                np.array([m.alpha for m in self.monomials], dtype=float).reshape(-1, self.dim),
                np.array([float(t.coeff) for t in self.flats]),
                np.array([[float(b) for b in t.beta] for t in self.flats], dtype=float).reshape(-1, self.dim),
            )
            object.__setattr__(self, "_arrays", arr)
        return self._arrays

    def __str__(self):
        return render(self)


def _merge_monomials(terms: Iterable[MonomialTerm]) -> tuple[MonomialTerm, ...]:
    acc: dict[tuple[int, ...], Fraction] = {}
    for t in terms:
        acc[t.alpha] = acc.get(t.alpha, Fraction(0)) + t.coeff
    return tuple(MonomialTerm(a, c) for a, c in sorted(acc.items(), reverse=True))


# ---------------------------------------------------------------------------
# parsing

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d*)?(?:/\d+)?|\.\d+)|(?P<var>x(?P<idx>\d+))"
    r"|(?P<exp>exp)|(?P<op>[-+*^/()]))"
)


class _Lexer:
    def __init__(self, text: str):
        self.text = text
        self.tokens: list[tuple[str, str, int]] = []
        pos = 0
        while pos < len(text):
            if text[pos:].strip() == "":
                break
            m = _TOKEN.match(text, pos)
            if not m or m.end() == pos:
                bad = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
                raise ParseError(f"unexpected character {text[bad]!r}", bad)
            kind = next(k for k in ("num", "var", "exp", "op") if m.group(k) is not None)
            self.tokens.append((kind, m.group(kind), m.start(kind)))
            pos = m.end()
        self.i = 0

    def peek(self, value: str | None = None, kind: str | None = None) -> bool:
        if self.i >= len(self.tokens):
            return False
        k, v, _ = self.tokens[self.i]
        return (kind is None or k == kind) and (value is None or v == value)

    def pos(self) -> int:
        return self.tokens[self.i][2] if self.i < len(self.tokens) else len(self.text)

    def take(self, value: str | None = None, kind: str | None = None) -> tuple[str, str, int]:
        if not self.peek(value, kind):
            want = repr(value) if value else kind
            got = repr(self.tokens[self.i][1]) if self.i < len(self.tokens) else "end of input"
            raise ParseError(f"expected {want}, got {got}", self.pos())
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def done(self) -> bool:
        return self.i >= len(self.tokens)


def _number(lex: _Lexer) -> tuple[Fraction, int]:
    pos = lex.pos()
    sign = 1
    if lex.peek("-"):
        lex.take("-")
        sign = -1
    if lex.peek("("):
        lex.take("(")
        q, _ = _number(lex)
        lex.take(")")
        return sign * q, pos
    _, text, _ = lex.take(kind="num")
    return sign * Fraction(text), pos


def _factors(lex: _Lexer) -> tuple[dict[int, Fraction], list[tuple[int, Fraction, int]]]:
    """Parse ``x_i^e`` factors; returns accumulated exponents and raw factors."""
    exps: dict[int, Fraction] = {}
    raw = []
    while lex.peek(kind="var"):
        _, name, pos = lex.take(kind="var")
        idx = int(name[1:])
        if idx < 1:
            raise ParseError("variable indices start at 1", pos)
        e = Fraction(1)
        epos = pos
        if lex.peek("^"):
            lex.take("^")
            e, epos = _number(lex)
        exps[idx] = exps.get(idx, Fraction(0)) + e
        raw.append((idx, e, epos))
        if lex.peek("*") and lex.i + 1 < len(lex.tokens) and lex.tokens[lex.i + 1][0] == "var":
            lex.take("*")
    return exps, raw


def _term(lex: _Lexer):
    start = lex.pos()
    coeff = Fraction(1)
    if lex.peek(kind="num") or lex.peek("-") or lex.peek("("):
        coeff, cpos = _number(lex)
        if coeff <= 0:
            raise ParseError(f"coefficient must be positive, got {_fmt_rational(coeff)}", cpos)
        if lex.peek("*"):
            lex.take("*")
    if lex.peek(kind="exp"):
        lex.take(kind="exp")
        lex.take("(")
        lex.take("-")
        _, one, opos = lex.take(kind="num")
        if Fraction(one) != 1:
            raise ParseError("flat terms must have the form exp(-1/(...))", opos)
        lex.take("/")
        paren = lex.peek("(")
        if paren:
            lex.take("(")
        exps, raw = _factors(lex)
        if not raw:
            raise ParseError("expected a monomial inside exp(-1/(...))", lex.pos())
        if paren:
            lex.take(")")
        lex.take(")")
        for _, e, epos in raw:
            if e < 0:
                raise ParseError("flat term exponents must be nonnegative", epos)
        if not any(exps.values()):
            raise ParseError("flat term has zero exponent vector", start)
        return ("flat", coeff, exps, start)
    exps, raw = _factors(lex)
    if not raw:
        raise ParseError("expected a variable factor or exp(...)", lex.pos())
    for _, e, epos in raw:
        if e.denominator != 1 or e < 0:
            raise ParseError(f"monomial exponent must be a nonnegative integer, got {_fmt_rational(e)}", epos)
    for idx, e in exps.items():
        if e % 2:
            pos = max(p for i, _, p in raw if i == idx)
            raise ParseError(f"odd exponent {e} on x{idx}; only even powers of |z_j| are allowed", pos)
    if not any(exps.values()):
        raise ParseError("constant term is not allowed (F(0) = 0)", start)
    return ("mono", coeff, exps, start)


def parse_model(text: str, dim: int | None = None) -> ModelFunction:
    """Parse model text into a validated :class:`ModelFunction`.

    ``dim`` embeds the model in a higher dimension than the largest variable
    index used (unused coordinates get zero exponents).
    """
    lex = _Lexer(text)
    if lex.done():
        raise ParseError("empty model", 0)
    terms = [_term(lex)]
    while not lex.done():
        lex.take("+")
        terms.append(_term(lex))
    n = max(max(exps) for _, _, exps, _ in terms)
    if dim is not None:
        if dim < n:
            raise ParseError(f"model uses x{n} but dim={dim}")
        n = dim
    mons, flats = [], []
    for kind, coeff, exps, _ in terms:
        vec = [exps.get(i + 1, Fraction(0)) for i in range(n)]
        if kind == "mono":
            mons.append(MonomialTerm(tuple(int(v) for v in vec), coeff))
        else:
            flats.append(FlatTerm(tuple(vec), coeff))
    if not mons:
        raise ParseError("all-flat input: the model must contain a monomial term", 0)
    return ModelFunction(n, tuple(mons), tuple(flats))


def _render_factors(vec) -> str:
    parts = []
    for i, e in enumerate(vec):
        e = Fraction(e)
        if e == 0:
            continue
        if e == 1:
            parts.append(f"x{i + 1}")
        elif e.denominator == 1:
            parts.append(f"x{i + 1}^{e.numerator}")
        else:
            parts.append(f"x{i + 1}^({_fmt_rational(e)})")
    return "*".join(parts)


def render(f: ModelFunction) -> str:
    """Canonical text: monomials in descending lexicographic ``alpha``, then
    flat terms in ascending ``beta``."""
    out = []
    for m in f.monomials:
        body = _render_factors(m.alpha)
        out.append(body if m.coeff == 1 else f"{_fmt_rational(m.coeff)}*{body}")
    for t in f.flats:
        body = f"exp(-1/({_render_factors(t.beta)}))"
        out.append(body if t.coeff == 1 else f"{_fmt_rational(t.coeff)}*{body}")
    return " + ".join(out)


# ---------------------------------------------------------------------------
# evaluation

def flat_values(coeff: float, beta: np.ndarray, x: np.ndarray) -> np.ndarray:
    """``coeff * exp(-1/x^beta)`` with exact zero where ``x^beta`` is zero or
    so small that the exponential underflows."""
    xb = np.prod(np.power(x, beta), axis=-1)
    out = np.zeros_like(xb)
    live = xb > 1.0 / _EXP_UNDERFLOW
    out[live] = coeff * np.exp(-1.0 / xb[live])
    return out


def evaluate(f: ModelFunction, x) -> np.ndarray | float:
    """Evaluate ``f`` at ``x`` (shape ``(n,)`` or ``(..., n)``), ``x >= 0``."""
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 1
    x = np.atleast_2d(x)
    if x.shape[-1] != f.dim:
        raise ValueError(f"expected points of dimension {f.dim}, got {x.shape[-1]}")
    mc, ma, fc, fb = f.arrays()
    val = np.zeros(x.shape[:-1])
    for c, a in zip(mc, ma):
        val += c * np.prod(np.power(x, a), axis=-1)
    for c, b in zip(fc, fb):
        val += flat_values(c, b, x)
    return float(val[0]) if scalar else val
