"""Exact linear algebra over the integers and the rationals.

Matrices are tuples of rows with Python ``int`` entries, vectors are tuples of
:class:`fractions.Fraction`.  Nothing here touches floating point.

Volumes of polytopes are computed in a fixed coordinate chart of the ambient
affine subspace (the pivot coordinates of its reduced row echelon basis).  The
chart depends only on the subspace, so two polytopes living in the same
subspace get comparable volumes and their ratio is chart independent.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import factorial, gcd, lcm
from typing import Iterable, Sequence

Matrix = tuple[tuple[int, ...], ...]
RationalVector = tuple[Fraction, ...]


class InvalidInput(ValueError):
    """Raised when an argument violates a documented precondition."""


class ConsistencyError(RuntimeError):
    """Raised when an internal cross-check fails."""


# ---------------------------------------------------------------- matrices


def as_matrix(rows: Iterable[Iterable[int]]) -> Matrix:
    out = tuple(tuple(int(x) for x in row) for row in rows)
    if not out or any(len(r) != len(out) for r in out):
        raise InvalidInput("matrix must be square and non-empty")
    return out


def as_vector(values: Iterable) -> RationalVector:
    return tuple(Fraction(v) for v in values)


def identity(d: int) -> Matrix:
    return tuple(tuple(int(i == j) for j in range(d)) for i in range(d))


def elementary(d: int, i: int, j: int) -> Matrix:
    """``I + M_ij``: the identity with an extra 1 in row ``i``, column ``j``."""
    if i == j:
        raise InvalidInput("elementary matrix needs i != j")
    rows = [list(r) for r in identity(d)]
    rows[i][j] = 1
    return tuple(tuple(r) for r in rows)


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    cols = list(zip(*b))
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in cols) for row in a)


def mat_vec(q: Sequence[Sequence], y: Sequence) -> tuple:
    return tuple(sum(x * v for x, v in zip(row, y)) for row in q)


def mat_pow(a: Matrix, n: int) -> Matrix:
    result = identity(len(a))
    base = a
    while n:
        if n & 1:
            result = mat_mul(result, base)
        base = mat_mul(base, base)
        n >>= 1
    return result


def det_int(m: Sequence[Sequence[int]]) -> int:
    """Determinant of an integer matrix by fraction-free Bareiss elimination."""
    a = [list(r) for r in m]
    n = len(a)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for r in range(k + 1, n):
                if a[r][k]:
                    a[k], a[r] = a[r], a[k]
                    sign = -sign
                    break
            else:
                return 0
        akk = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            row_i, row_k = a[i], a[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * akk - aik * row_k[j]) // prev
        prev = akk
    return sign * a[-1][-1]


def det_rational(m: Sequence[Sequence[Fraction]]) -> Fraction:
    """Determinant of a rational matrix; rows are cleared to integers first."""
    scale = 1
    rows = []
    for row in m:
        den = lcm(*(Fraction(x).denominator for x in row)) if row else 1
        scale *= den
        rows.append([int(Fraction(x) * den) for x in row])
    return Fraction(det_int(rows), scale)


# ------------------------------------------------------- projective action


def projectivize(q: Matrix, y: Sequence) -> RationalVector:
    """``Qy / |Qy|`` with ``|.|`` the entry sum."""
    y = as_vector(y)
    # Q is integral, so clearing y's denominators leaves the ratio unchanged
    den = lcm(*(x.denominator for x in y))
    qy = mat_vec(q, [x.numerator * (den // x.denominator) for x in y])
    total = sum(qy)
    if total == 0:
        raise InvalidInput("Qy has zero entry sum")
    return tuple(Fraction(v, total) for v in qy)


def column_sums(q: Matrix) -> tuple[int, ...]:
    return tuple(sum(col) for col in zip(*q))


def is_C_distributed(q: Matrix, C) -> bool:
    """Every ratio of column sums lies strictly inside ``(1/C, C)``."""
    C = Fraction(C)
    if C <= 1:
        raise InvalidInput("C must exceed 1")
    sums = column_sums(q)
    return Fraction(max(sums), min(sums)) < C


def jacobian_ratio(q: Matrix, y1: Sequence, y2: Sequence, k: int) -> Fraction:
    """``J(y1)/J(y2) = (|Q y2| / |Q y1|)**(k+1)`` for the restricted map."""
    s1 = sum(mat_vec(q, as_vector(y1)))
    s2 = sum(mat_vec(q, as_vector(y2)))
    return (Fraction(s2) / s1) ** (k + 1)


# --------------------------------------------------------------- polytopes


def _integer_row(v: Sequence) -> list[int]:
    xs = [Fraction(x) for x in v]
    den = lcm(*(x.denominator for x in xs)) if xs else 1
    return [x.numerator * (den // x.denominator) for x in xs]


def _rref_pivots(vectors: Sequence[Sequence[Fraction]]) -> list[int]:
    """Pivot columns of the row space, by fraction-free elimination."""
    rows = [_integer_row(v) for v in vectors]
    pivots: list[int] = []
    r = 0
    ncols = len(rows[0]) if rows else 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        p = rows[r]
        for i in range(r + 1, len(rows)):
            f = rows[i][c]
            if f:
                row = [a * p[c] - f * b for a, b in zip(rows[i], p)]
                g = gcd(*row)
                rows[i] = [a // g for a in row] if g > 1 else row
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return pivots


def affine_rank(points: Sequence[Sequence[Fraction]]) -> int:
    if len(points) <= 1:
        return 0
    p0 = points[0]
    return len(_rref_pivots([[a - b for a, b in zip(p, p0)] for p in points[1:]]))


def chart(points: Sequence[Sequence[Fraction]]) -> list[int]:
    """Pivot coordinates of the direction space of the affine hull."""
    if len(points) <= 1:
        return []
    p0 = points[0]
    return _rref_pivots([[a - b for a, b in zip(p, p0)] for p in points[1:]])


def simplex_volume(points: Sequence[Sequence[Fraction]], coords: Sequence[int]) -> Fraction:
    """Volume of a simplex measured in the coordinates ``coords``."""
    k = len(points) - 1
    if k == 0:
        return Fraction(1)
    # each point as an integer vector over its own common denominator
    cleared = []
    for p in points:
        xs = [p[c] for c in coords]
        den = lcm(*(x.denominator for x in xs))
        cleared.append((den, [x.numerator * (den // x.denominator) for x in xs]))
    d0, n0 = cleared[0]
    rows = [[a * d0 - b * dp for a, b in zip(np_, n0)] for dp, np_ in cleared[1:]]
    scale = d0**k
    for dp, _ in cleared[1:]:
        scale *= dp
    return Fraction(abs(det_int(rows)), scale * factorial(k))


@dataclass(frozen=True)
class Polytope:
    """Convex hull of ``vertices`` with intrinsic dimension ``dim``.

    ``simplices`` optionally records a triangulation as index tuples into
    ``vertices``.  Projective images keep it, so volumes of images stay cheap.
    """

    vertices: tuple[RationalVector, ...]
    dim: int
    simplices: tuple[tuple[int, ...], ...] | None = None

    @classmethod
    def from_points(cls, points, dim: int | None = None, simplices=None) -> "Polytope":
        verts: list[RationalVector] = []
        index: dict[RationalVector, int] = {}
        remap = []
        for p in points:
            v = as_vector(p)
            if v not in index:
                index[v] = len(verts)
                verts.append(v)
            remap.append(index[v])
        if simplices is not None:
            simplices = tuple(tuple(remap[i] for i in s) for s in simplices)
        if dim is None:
            dim = affine_rank(verts)
        return cls(tuple(verts), dim, simplices)

    @property
    def ambient(self) -> int:
        return len(self.vertices[0])

    def image(self, q: Matrix) -> "Polytope":
        """Image under the projectivized map ``y -> Qy/|Qy|``."""
        return Polytope(tuple(projectivize(q, v) for v in self.vertices), self.dim, self.simplices)

    def scaled(self, center: Sequence, t) -> "Polytope":
        c, t = as_vector(center), Fraction(t)
        verts = tuple(tuple(ci + t * (vi - ci) for vi, ci in zip(v, c)) for v in self.vertices)
        return Polytope(verts, self.dim, self.simplices)


def _facets(points: list[list[Fraction]], k: int) -> list[frozenset[int]]:
    """Facets of a full-dimensional point set in ``Q^k`` by brute force."""
    facets: set[frozenset[int]] = set()
    n = len(points)
    for combo in combinations(range(n), k):
        base = points[combo[0]]
        rows = [[a - b for a, b in zip(points[i], base)] for i in combo[1:]]
        # normal vector by cofactor expansion of the (k-1) x k edge matrix
        normal = []
        for c in range(k):
            minor = [[r[j] for j in range(k) if j != c] for r in rows]
            normal.append((-1) ** c * det_rational(minor))
        if all(x == 0 for x in normal):
            continue
        sides = set()
        on = []
        for i, p in enumerate(points):
            s = sum(nc * (a - b) for nc, a, b in zip(normal, p, base))
            if s == 0:
                on.append(i)
            else:
                sides.add(s > 0)
        if len(sides) == 1:
            facets.add(frozenset(on))
    return list(facets)


def hull_triangulation(points: Sequence[Sequence[Fraction]]) -> list[tuple[int, ...]]:
    """Pulling triangulation of ``conv(points)`` from brute-force facets.

    Exponential in the dimension; meant as an independent check on small
    polytopes, not as a workhorse.
    """
    pts = [as_vector(p) for p in points]
    idx = list(range(len(pts)))
    return _pull(pts, idx)


def _pull(pts, idx):
    sub = [pts[i] for i in idx]
    k = affine_rank(sub)
    if k == 0:
        return [(idx[0],)]
    coords = chart(sub)
    local = [[p[c] for c in coords] for p in sub]
    if k == 1:
        lo = min(range(len(idx)), key=lambda i: local[i][0])
        hi = max(range(len(idx)), key=lambda i: local[i][0])
        return [(idx[lo], idx[hi])]
    apex = 0
    out = []
    for facet in _facets(local, k):
        if apex in facet:
            continue
        for s in _pull(pts, [idx[i] for i in sorted(facet)]):
            out.append((idx[apex], *s))
    return out


def polytope_volume(p: Polytope) -> Fraction:
    """Exact ``dim``-volume of ``p`` in the chart of its affine hull.

    Returns 0 when the vertices span less than ``p.dim`` dimensions.
    """
    verts = p.vertices
    coords = chart(verts)
    if len(coords) < p.dim:
        return Fraction(0)
    if p.dim == 0:
        return Fraction(1)
    simplices = p.simplices if p.simplices is not None else hull_triangulation(verts)
    return sum((simplex_volume([verts[i] for i in s], coords) for s in simplices), Fraction(0))


def hull_volume(p: Polytope) -> Fraction:
    """Volume ignoring any stored triangulation (independent recomputation)."""
    return polytope_volume(Polytope(p.vertices, p.dim, None))
