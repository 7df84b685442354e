"""Distortion checks and the numeric side of the Borel-Cantelli argument.

``bc_assemble`` builds ``X_n`` as the union of the sets indexed by
``m in [s(n), t(n)]`` at level ``n``, with

    s(n) = sum_{i<=n} i**(j-1),   t(n) = sum_{i<=n+1} i**(j-1),

and bounds its measures from tables of per-set bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

from .exact_core import InvalidInput, Matrix, Polytope, mat_vec


def is_uniformly_distorted(q: Matrix, w: Polytope, C) -> bool:
    """``(max_v |Qv| / min_v |Qv|)**(k+1) <= C`` over the vertices of ``W``.

    ``|Qy|`` is affine in ``y`` on the simplex, so the extremes of the
    Jacobian ``1/|Qy|**(k+1)`` sit at vertices.
    """
    C = Fraction(C)
    if C <= 1:
        raise InvalidInput("C must exceed 1")
    sums = [sum(mat_vec(q, v)) for v in w.vertices]
    return (Fraction(max(sums)) / min(sums)) ** (w.dim + 1) <= C


def relative_probability_bounds(C, d: int, kappa_measure) -> tuple[Fraction, Fraction]:
    """``(kappa/c, min(1, c kappa))`` with ``c = C**d``."""
    C = Fraction(C)
    if C < 1:
        raise InvalidInput("C must be at least 1")
    c = C**d
    k = Fraction(kappa_measure)
    return k / c, min(Fraction(1), c * k)


def s_of(n: int, j: int) -> int:
    return sum(i ** (j - 1) for i in range(1, n + 1))


def t_of(n: int, j: int) -> int:
    return sum(i ** (j - 1) for i in range(1, n + 2))


@dataclass(frozen=True)
class Level:
    n: int
    members: tuple[int, ...]
    lower: Fraction | None
    upper: Fraction | None
    nu_upper: Fraction | None


def bc_assemble(
    measures_l: Mapping[tuple[int, int], tuple],
    measures_v: Mapping[tuple[int, int], object],
    j: int,
    n_range: Iterable[int],
    pairwise_c=None,
    m_range: Callable[[int], Sequence[int]] | None = None,
) -> dict:
    """Bounds on ``l(X_n)`` and ``nu(X_n)`` and the smallest fitting ``A`` and ``rho``.

    ``measures_l[(m, n)] = (lo, hi)`` and ``measures_v[(m, n)] = nu`` (an upper
    bound is enough).  The lower bound on ``l(X_n)`` is the largest member
    bound, improved by inclusion-exclusion ``sum lo - sum c hi_1 hi_2`` when a
    pairwise constant ``c`` is given.  ``m_range`` overrides the default
    ``range(s(n), t(n) + 1)``.  Levels with missing table entries are
    reported as unavailable.
    """
    if j < 1:
        raise InvalidInput("j must be positive")
    levels, unavailable = [], []
    for n in n_range:
        ms = tuple(m_range(n)) if m_range else tuple(range(s_of(n, j), t_of(n, j) + 1))
        if any((m, n) not in measures_l or (m, n) not in measures_v for m in ms):
            unavailable.append(n)
            continue
        los = [Fraction(measures_l[m, n][0]) for m in ms]
        his = [Fraction(measures_l[m, n][1]) for m in ms]
        lower = max(los)
        if pairwise_c is not None:
            c = Fraction(pairwise_c)
            cross = sum(c * his[a] * his[b] for a in range(len(ms)) for b in range(a + 1, len(ms)))
            lower = max(lower, sum(los) - cross)
        upper = min(Fraction(1), sum(his))
        nu = min(Fraction(1), sum(Fraction(measures_v[m, n]) for m in ms))
        levels.append(Level(n, ms, lower, upper, nu))
    A = rho = None
    if levels:
        A_cands = []
        for lv in levels:
            A_cands.append(lv.n * lv.upper)
            A_cands.append(math.inf if lv.lower == 0 else 1 / (lv.n * lv.lower))
        A = max(A_cands)
        rho = max(float(lv.nu_upper) ** (1 / lv.n) for lv in levels)
    return {
        "j": j,
        "levels": [
            {"n": lv.n, "members": list(lv.members), "lower": lv.lower, "upper": lv.upper, "nu_upper": lv.nu_upper}
            for lv in levels
        ],
        "unavailable": unavailable,
        "min_A": A,
        "min_rho": rho,
        "lebesgue_sum_lower": sum((lv.lower for lv in levels), Fraction(0)),
        "harmonic_sum_upper": sum((lv.nu_upper for lv in levels), Fraction(0)),
    }


TAIL_SHARE = 1e-2


@dataclass(frozen=True)
class Verdict:
    lebesgue_diverges: bool
    harmonic_converges: bool
    log_growth: float  # increase of the partial sum per unit of log N, second half
    decay_exponent: float  # p in term ~ n**-p, fitted on the second half
    harmonic_sum: Fraction
    harmonic_tail_bound: float | None
    limsup_lower: Fraction | None
    label: str


def _terms(series) -> list[Fraction]:
    return [Fraction(x) for x in series]


def bc_verdict(l_series: Sequence, v_series: Sequence, pairwise_c=None) -> Verdict:
    """Diagnose ``sum l_n`` (divergent?) against ``sum nu_n`` (convergent?).

    Series are indexed from ``n = 1``.  Divergence is judged from the decay of
    the terms over the second half: power decay with exponent at most 1
    counts as divergent.  Convergence of ``sum nu_n`` needs a ratio bound
    ``r < 1`` over the whole second half whose geometric tail is at most
    ``TAIL_SHARE`` of the partial sum.  With both and a
    pairwise constant ``c``, the Lebesgue measure of the limsup set is at
    least ``1/(4c)``.
    """
    ls, vs = _terms(l_series), _terms(v_series)
    if len(ls) < 4:
        raise InvalidInput("need at least four Lebesgue terms")
    half = len(ls) // 2
    idx = [i for i in range(half, len(ls)) if ls[i] > 0]
    xs = [math.log(i + 1) for i in idx]
    ys = [math.log(ls[i]) for i in idx]
    p = -_slope(xs, ys) if len(idx) >= 2 else math.inf
    partial = [sum(ls[: i + 1]) for i in range(len(ls))]
    log_growth = float(partial[-1] - partial[half - 1]) / math.log(len(ls) / half)
    diverges = p <= 1.05

    harm_sum = sum(vs, Fraction(0))
    tail = None
    vh = vs[len(vs) // 2 :]
    if len(vh) >= 2 and all(v > 0 for v in vh):
        r = max(float(b / a) for a, b in zip(vh, vh[1:]))
        if r < 1:
            tail = float(vs[-1]) * r / (1 - r)
    converges = (tail is not None and tail <= TAIL_SHARE * float(harm_sum)) or (
        len(vs) > 0 and all(v == 0 for v in vs[-3:])
    )
    lower = None
    if diverges and pairwise_c is not None:
        lower = 1 / (4 * Fraction(pairwise_c))
    if diverges and converges:
        label = "singular-pattern: yes"
    elif not diverges:
        label = "no mass at limsup"
    else:
        label = "inconclusive"
    return Verdict(diverges, converges, log_growth, p, harm_sum, tail, lower, label)


def _slope(xs, ys) -> float:
    n = len(xs)
    mx, my = sum(xs) / n, sum(ys) / n
    sxx = sum((x - mx) ** 2 for x in xs)
    return sum((x - mx) * (y - my) for x, y in zip(xs, ys)) / sxx
