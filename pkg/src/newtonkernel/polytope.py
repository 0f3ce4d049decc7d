"""Exact rational geometry of Newton polyhedra ``conv(S) + R_+^n``.

Everything here works over :class:`fractions.Fraction`; no floating point.
Facets are found by enumerating hyperplanes spanned by affinely independent
generators (support points and the recession directions ``e_j``) and keeping
the valid ones.  This is exponential in ``n`` and intended for ``n <= 6`` and
a few dozen support points.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

__all__ = [
    "MAX_DIM",
    "ValidPair",
    "Face",
    "NewtonPolyhedron",
    "newton_polyhedron",
    "contains",
    "minimal_face_containing",
    "face_lattice_points",
    "compact_faces",
    "rank",
]

MAX_DIM = 6

Point = tuple  # tuple of int or Fraction


def _dot(a: Sequence, p: Sequence):
    return sum(x * y for x, y in zip(a, p))


def _rref(rows: list[list[Fraction]], ncols: int) -> tuple[list[list[Fraction]], list[int]]:
    m = [list(r) for r in rows]
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [v * inv for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                fac = m[i][c]
                m[i] = [a - fac * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(vectors: Iterable[Sequence]) -> int:
    rows = [[Fraction(v) for v in vec] for vec in vectors]
    if not rows:
        return 0
    return len(_rref(rows, len(rows[0]))[1])


def _nullspace_1d(rows: list[list[Fraction]], n: int) -> list[Fraction] | None:
    """Generator of a one-dimensional nullspace, else ``None``."""
    if rows:
        red, piv = _rref(rows, n)
    else:
        red, piv = [], []
    free = [c for c in range(n) if c not in piv]
    if len(free) != 1:
        return None
    fc = free[0]
    vec = [Fraction(0)] * n
    vec[fc] = Fraction(1)
    for row, pc in zip(red, piv):
        vec[pc] = -row[fc]
    return vec


def _primitive(vec: Sequence[Fraction]) -> tuple[int, ...]:
    den = 1
    for v in vec:
        den = den * v.denominator // math.gcd(den, v.denominator)
    ints = [int(v * den) for v in vec]
    g = 0
    for v in ints:
        g = math.gcd(g, abs(v))
    return tuple(v // g for v in ints)


@dataclass(frozen=True, order=True)
class ValidPair:
    """Half-space ``<a, x> >= l``; ``a`` primitive in ``Z_+^n``."""

    a: tuple[int, ...]
    l: int

    def value(self, q: Sequence) -> Fraction:
        return _dot(self.a, q)

    def tight(self, q: Sequence) -> bool:
        return self.value(q) == self.l

    def as_list(self) -> list[int]:
        return [*self.a, self.l]


@dataclass(frozen=True)
class NewtonPolyhedron:
    dim: int
    support: tuple[Point, ...]
    vertices: tuple[Point, ...]
    facets: tuple[ValidPair, ...]

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "support": [list(map(int, p)) for p in self.support],
            "vertices": [list(map(int, p)) for p in self.vertices],
            "facets": [f.as_list() for f in self.facets],
        }


@dataclass(frozen=True)
class Face:
    """``P`` intersected with the hyperplanes of ``pairs`` (all of ``P`` when
    ``pairs`` is empty)."""

    pairs: tuple[ValidPair, ...]
    dim: int
    compact: bool
    vertices: tuple[Point, ...]
    recession: tuple[int, ...]
    polyhedron: NewtonPolyhedron = field(repr=False, compare=False)

    @property
    def is_trivial(self) -> bool:
        return not self.pairs

    def defining_pair(self) -> ValidPair:
        """The valid pair obtained by summing the facet pairs through the face.
        It cuts out exactly this face; all entries of ``a`` are positive iff
        the face is compact."""
        if not self.pairs:
            return ValidPair((0,) * self.polyhedron.dim, 0)
        a = tuple(sum(p.a[j] for p in self.pairs) for j in range(self.polyhedron.dim))
        return ValidPair(a, sum(p.l for p in self.pairs))

    def compact_by_pairs(self) -> bool:
        """Compactness via the valid-pair criterion: some defining valid pair
        has every ``a_j > 0``.  Independent of the recession bookkeeping."""
        if not self.pairs:
            return False
        pair = self.defining_pair()
        if not all(a > 0 for a in pair.a):
            return False
        # the summed pair must cut out the same vertex set
        cut = tuple(v for v in self.polyhedron.vertices if pair.tight(v))
        return set(cut) == set(self.vertices)

    def on_face(self, q: Sequence) -> bool:
        return contains(self.polyhedron, q) and all(p.tight(q) for p in self.pairs)


def _pareto_minimal(points: Sequence[Point]) -> list[Point]:
    out = []
    for p in points:
        dominated = any(q != p and all(qi <= pi for qi, pi in zip(q, p)) for q in points)
        if not dominated:
            out.append(p)
    return out


def newton_polyhedron(support: Iterable[Sequence]) -> NewtonPolyhedron:
    """Build the Newton polyhedron of a finite support set (exact)."""
    pts = sorted({tuple(int(v) for v in p) for p in support})
    if not pts:
        raise ValueError("support set is empty")
    n = len(pts[0])
    if any(len(p) != n for p in pts):
        raise ValueError("support points have inconsistent dimension")
    if n > MAX_DIM:
        raise ValueError(f"dimension {n} exceeds the supported maximum {MAX_DIM}")
    if any(v < 0 for p in pts for v in p):
        raise ValueError("support points must lie in Z_+^n")
    gens = _pareto_minimal(pts)
    facets: set[ValidPair] = set()
    for k in range(1, n + 1):
        for chosen in itertools.combinations(gens, k):
            base = chosen[0]
            diffs = [[Fraction(a - b) for a, b in zip(p, base)] for p in chosen[1:]]
            for dirs in itertools.combinations(range(n), n - k):
                rows = diffs + [[Fraction(int(j == d)) for j in range(n)] for d in dirs]
                vec = _nullspace_1d(rows, n)
                if vec is None:
                    continue
                if all(v <= 0 for v in vec):
                    vec = [-v for v in vec]
                if any(v < 0 for v in vec):
                    continue
                a = _primitive(vec)
                l = _dot(a, base)
                if all(_dot(a, q) >= l for q in gens):
                    facets.add(ValidPair(a, int(l)))
    facet_list = tuple(sorted(facets))
    vertices = tuple(
        p for p in gens if rank(f.a for f in facet_list if f.tight(p)) == n
    )
    return NewtonPolyhedron(n, tuple(pts), vertices, facet_list)


def contains(P: NewtonPolyhedron, q: Sequence) -> bool:
    q = [Fraction(v) for v in q]
    if len(q) != P.dim:
        raise ValueError("dimension mismatch")
    return all(v >= 0 for v in q) and all(f.value(q) >= f.l for f in P.facets)


def _face_from_pairs(P: NewtonPolyhedron, pairs: Sequence[ValidPair]) -> Face:
    pairs = tuple(sorted(set(pairs)))
    verts = tuple(v for v in P.vertices if all(p.tight(v) for p in pairs))
    rec = tuple(j for j in range(P.dim) if all(p.a[j] == 0 for p in pairs))
    if verts:
        base = verts[0]
        spans = [[Fraction(a - b) for a, b in zip(v, base)] for v in verts[1:]]
        spans += [[Fraction(int(i == j)) for i in range(P.dim)] for j in rec]
        dim = rank(spans) if spans else 0
    else:
        dim = -1
    return Face(pairs, dim, not rec and bool(verts), verts, rec, P)


def minimal_face_containing(P: NewtonPolyhedron, q: Sequence) -> Face:
    """Intersection of every facet hyperplane through ``q``."""
    if not contains(P, q):
        raise ValueError(f"point {tuple(q)} is not in the polyhedron")
    q = [Fraction(v) for v in q]
    return _face_from_pairs(P, [f for f in P.facets if f.tight(q)])


def compact_faces(P: NewtonPolyhedron) -> list[Face]:
    """All nonempty compact faces, each listed once (vertices first)."""
    seen: dict[tuple, Face] = {}
    for v in P.vertices:
        through = [f for f in P.facets if f.tight(v)]
        for k in range(1, len(through) + 1):
            for sub in itertools.combinations(through, k):
                face = _face_from_pairs(P, sub)
                if not face.compact:
                    continue
                # canonical form: all facets containing the face
                full = [f for f in P.facets if all(f.tight(w) for w in face.vertices)]
                face = _face_from_pairs(P, full)
                seen.setdefault(face.vertices, face)
    return sorted(seen.values(), key=lambda f: (f.dim, f.vertices))


def face_lattice_points(face: Face) -> list[tuple[int, ...]]:
    """Integer points of a compact face."""
    if not face.compact:
        raise ValueError("lattice points are only enumerated on compact faces")
    lo = [min(v[j] for v in face.vertices) for j in range(face.polyhedron.dim)]
    hi = [max(v[j] for v in face.vertices) for j in range(face.polyhedron.dim)]
    ranges = [range(int(math.ceil(a)), int(math.floor(b)) + 1) for a, b in zip(lo, hi)]
    return [p for p in itertools.product(*ranges) if face.on_face(p)]
