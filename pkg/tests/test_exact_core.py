from fractions import Fraction
from itertools import permutations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rauzylab.exact_core import (
    InvalidInput,
    Polytope,
    column_sums,
    det_int,
    det_rational,
    elementary,
    hull_volume,
    identity,
    is_C_distributed,
    jacobian_ratio,
    mat_mul,
    mat_pow,
    polytope_volume,
    projectivize,
)

F = Fraction


def elementary_products(d, max_len=8):
    pairs = [(i, j) for i in range(d) for j in range(d) if i != j]
    return st.lists(st.sampled_from(pairs), max_size=max_len).map(
        lambda ps: _product(d, ps)
    )


def _product(d, ps):
    q = identity(d)
    for i, j in ps:
        q = mat_mul(q, elementary(d, i, j))
    return q


def simplex_points(d):
    return st.lists(st.integers(1, 50), min_size=d, max_size=d).map(lambda xs: tuple(F(x, sum(xs)) for x in xs))


def brute_det(m):
    n = len(m)
    total = 0
    for p in permutations(range(n)):
        inv = sum(1 for a in range(n) for b in range(a + 1, n) if p[a] > p[b])
        term = (-1) ** inv
        for r in range(n):
            term *= m[r][p[r]]
        total += term
    return total


# --- examples


def test_projectivize_examples():
    assert projectivize(identity(2), (F(1, 3), F(2, 3))) == (F(1, 3), F(2, 3))
    assert projectivize(((1, 1), (1, 2)), (F(1, 2), F(1, 2))) == (F(2, 5), F(3, 5))
    assert projectivize(((1, 0), (3, 1)), (1, 0)) == (F(1, 4), F(3, 4))


def test_column_sums_examples():
    assert column_sums(identity(3)) == (1, 1, 1)
    assert column_sums(((1, 1), (1, 2))) == (2, 3)
    assert column_sums(((1, 0), (3, 1))) == (4, 1)


def test_C_distributed_examples():
    assert is_C_distributed(identity(2), 2)
    assert is_C_distributed(((1, 1), (1, 2)), 2)
    assert not is_C_distributed(((1, 0), (3, 1)), 2)
    with pytest.raises(InvalidInput):
        is_C_distributed(identity(2), 1)


def test_jacobian_examples():
    q = ((1, 1), (1, 2))
    assert jacobian_ratio(q, (F(1, 3), F(2, 3)), (F(1, 3), F(2, 3)), 1) == 1
    assert jacobian_ratio(q, (1, 0), (0, 1), 1) == F(9, 4)


def test_volume_examples():
    seg = Polytope.from_points([(1, 0), (0, 1)])
    assert polytope_volume(seg) == 1
    assert polytope_volume(seg.image(((1, 0), (3, 1)))) == F(1, 4)
    cube_corner = Polytope.from_points([(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 1)])
    half = cube_corner.scaled((F(1, 3), F(1, 3), F(1, 3)), F(1, 2))
    assert polytope_volume(half) / polytope_volume(cube_corner) == F(1, 8)


def test_degenerate_volume_is_zero():
    flat = Polytope((( F(1, 2), F(1, 2), F(0)), (F(1, 4), F(3, 4), F(0)), (F(0), F(1), F(0))), 2)
    assert polytope_volume(flat) == 0


# --- properties


@given(elementary_products(4))
def test_det_unimodular(q):
    assert det_int(q) in (1, -1)
    assert all(any(col) for col in zip(*q))


@given(st.lists(st.lists(st.integers(-5, 5), min_size=4, max_size=4), min_size=4, max_size=4))
def test_bareiss_matches_permutation_expansion(m):
    assert det_int(m) == brute_det(m)
    assert det_rational([[F(x) for x in r] for r in m]) == brute_det(m)


@given(elementary_products(3), elementary_products(3), simplex_points(3))
def test_projectivize_functorial(q1, q2, y):
    assert projectivize(mat_mul(q1, q2), y) == projectivize(q1, projectivize(q2, y))


@given(st.integers(0, 6))
def test_mat_pow(n):
    q = ((1, 1), (0, 1))
    assert mat_pow(q, n) == ((1, n), (0, 1))


@st.composite
def subdivided_simplex(draw):
    """A 2-simplex in the plane cut into pieces by a random interior point."""
    pts = draw(st.lists(st.tuples(st.integers(-20, 20), st.integers(-20, 20)), min_size=3, max_size=3, unique=True))
    a, b, c = [tuple(F(x) for x in p) for p in pts]
    if (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]) == 0:
        a, b, c = (F(0), F(0)), (F(7), F(0)), (F(0), F(5))
    w = draw(st.lists(st.integers(1, 9), min_size=3, max_size=3))
    s = sum(w)
    p = tuple((w[0] * a[i] + w[1] * b[i] + w[2] * c[i]) / s for i in range(2))
    return (a, b, c), p


@given(subdivided_simplex())
def test_volume_additive(data):
    (a, b, c), p = data
    whole = polytope_volume(Polytope.from_points([a, b, c]))
    pieces = sum(polytope_volume(Polytope.from_points(tri)) for tri in [(a, b, p), (b, c, p), (a, c, p)])
    assert whole == pieces


@given(elementary_products(3, 5))
def test_stored_triangulation_agrees_with_hull(q):
    square = Polytope.from_points(
        [(F(1, 2), F(1, 2), 0), (F(1, 2), 0, F(1, 2)), (0, F(1, 2), F(1, 2)), (0, 0, 1)],
        simplices=[(0, 1, 2), (1, 2, 3)],
    )
    img = square.image(q)
    assert polytope_volume(img) == hull_volume(img)


def _restricted_map(q, y):
    d = len(q)
    full = np.append(y, 1 - y.sum())
    img = q @ full
    return (img / img.sum())[: d - 1]


def _fd_jacobian(q, y, h=1e-6):
    k = len(y)
    cols = []
    for i in range(k):
        e = np.zeros(k)
        e[i] = h
        cols.append((_restricted_map(q, y + e) - _restricted_map(q, y - e)) / (2 * h))
    return abs(np.linalg.det(np.array(cols).T))


@given(st.integers(2, 5).flatmap(lambda d: st.tuples(elementary_products(d, 6), simplex_points(d), simplex_points(d))))
def test_jacobian_matches_finite_difference(data):
    q, y1, y2 = data
    d = len(q)
    qf = np.array(q, dtype=float)
    j1 = _fd_jacobian(qf, np.array([float(v) for v in y1[:-1]]))
    j2 = _fd_jacobian(qf, np.array([float(v) for v in y2[:-1]]))
    exact = float(jacobian_ratio(q, y1, y2, d - 1))
    assert abs(j1 / j2 - exact) <= 1e-6 * exact
