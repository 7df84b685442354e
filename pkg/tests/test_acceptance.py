"""Acceptance gate: ten criteria at their stated tolerances and time limits.

Each test prints one ``AC<k> PASS|FAIL`` line; the lines are repeated in the
terminal summary.  Run alone with ``pytest tests/test_acceptance.py -s``.
"""

import functools
import math
import time
import traceback
from fractions import Fraction
from itertools import product

import numpy as np

from rauzylab.exact_core import is_C_distributed
from rauzylab.measure_lab import bc_assemble, bc_verdict
from rauzylab.surface_builder import (
    analyze_regions,
    build_phi0,
    cdist_experiment,
    dehn_twist_sequence,
    expected_Q0,
    supported_cases,
    twist_band,
    twist_power,
    twist_volume_law,
    twist_volume_ratio,
)
from rauzylab.iet_core import torus
from rauzylab.torus_lab import (
    Word,
    cylinder_interval,
    cylinder_length,
    letters_matrix,
    measure_X,
    tree_harmonic_X,
    word_matrix,
)
from rauzylab.walk_sim import XTarget, decay_fit, free_model, harmonic_estimates, tree_model, wilson

F = Fraction
RESULTS: list[str] = []


def criterion(number, title, limit_s):
    """Time the test, print its verdict line, and fail it if over the time limit."""

    def wrap(fn):
        @functools.wraps(fn)
        def run():
            t0 = time.perf_counter()
            detail, ok = "", False
            try:
                detail = fn() or ""
                ok = True
            except AssertionError as e:
                detail = str(e).splitlines()[0] if str(e) else "assertion failed"
                raise
            except Exception as e:
                detail = f"{type(e).__name__}: {e}"
                traceback.print_exc()
                raise
            finally:
                dt = time.perf_counter() - t0
                if ok and dt > limit_s:
                    ok = False
                    detail += f" over the {limit_s:g}s limit"
                line = f"AC{number} {'PASS' if ok else 'FAIL'} {title} [{dt:.1f}s] {detail}".rstrip()
                RESULTS.append(line)
                print(line)
            assert dt <= limit_s, f"took {dt:.1f}s, limit {limit_s}s"

        return run

    return wrap


def r_words(max_len):
    for n in range(1, max_len + 1):
        for tail in product("RL", repeat=n - 1):
            yield "R" + "".join(tail)


@criterion(1, "exact Lebesgue law l(X(1,n)) = 1/(n+1), n <= 50", 1)
def test_ac1_lebesgue_law():
    for n in range(1, 51):
        lo, hi = measure_X(1, n, 50)
        # {a_1 > n} is the cylinder of R^(n+1)
        via_cylinder = cylinder_length(Word((n + 1,)))
        assert lo == hi == via_cylinder == F(1, n + 1), f"n={n}: {lo}, {hi}, {via_cylinder}"
    return "50/50 exact"


@criterion(2, "exact harmonic law nu(X(n,n)) = 2^-n and tree-walk Monte Carlo", 60)
def test_ac2_harmonic_law():
    for n in range(1, 16, 2):
        assert tree_harmonic_X(n) == F(1, 2**n), f"n={n}"
    ns = list(range(1, 7))
    trials = 100_000
    ests = harmonic_estimates(tree_model(), [XTarget(n, n) for n in ns], steps=400, trials=trials, seed=2026)
    worst = []
    for n, e in zip(ns, ests):
        exact = 2.0**-n
        assert e.ci_lo <= exact <= e.ci_hi, f"n={n}: {exact} outside [{e.ci_lo:.5f}, {e.ci_hi:.5f}]"
        worst.append(abs(e.point - exact) / e.half_width)
    return f"odd n<=15 exact; MC n<=6 inside Wilson CI (max |err|/halfwidth {max(worst):.2f})"


@criterion(3, "every switch stage of length <= 14 is 2-distributed", 60)
def test_ac3_switch_stages():
    checked = bad = 0
    for letters in r_words(14):
        if len(letters) >= 2 and letters[-1] != letters[-2]:
            checked += 1
            bad += not is_C_distributed(letters_matrix(letters), 2)
    assert bad == 0, f"{bad} counterexamples among {checked}"
    return f"{checked} stages, 0 counterexamples"


@criterion(4, "torus cylinder partition and l = 1/(cd), length <= 12", 60)
def test_ac4_cylinder_partition():
    count = 0
    for letters in r_words(12):
        w = Word.from_letters(letters)
        (_, _), (c, d) = word_matrix(w)
        assert cylinder_interval(w).length == F(1, c * d), letters
        if len(letters) < 12:
            kids = [cylinder_length(Word.from_letters(letters + x)) for x in "RL"]
            assert sum(kids) == cylinder_length(w), letters
        count += 1
    return f"{count} words exact"


AC5_CASES = [(4, 0), (5, 0), (3, 1), (2, 2), (1, 3), (2, 3), (0, 5), (0, 6), (1, 1)]


@criterion(5, "surface constructions: triangles, punctured monogons, Euler", 10)
def test_ac5_constructions():
    notes = []
    for g, m in AC5_CASES:
        comb = build_phi0(g, m)
        prof = analyze_regions(comb)
        assert (1 - comb.d) + len(prof.regions) == 2 - 2 * g, f"Euler fails at {(g, m)}"
        assert prof.punctures == m, f"{(g, m)}: {prof.punctures} punctures"
        if (g, m) == (1, 1):
            (r,) = prof.regions
            assert r.punctured and r.corner_count == 4, f"(1,1) region {r}"
            notes.append(f"(1,1): one punctured region, {r.corner_count} corners ({r.cusp_count} cusps)")
        else:
            assert prof.triangles == 4 * g - 4 + m, f"{(g, m)}: {prof.triangles} triangles"
            assert prof.monogons == m, f"{(g, m)}: {prof.monogons} monogons"
            assert len(prof.regions) == prof.triangles + prof.monogons
    return "; ".join([f"{len(AC5_CASES)} cases"] + notes)


@criterion(6, "Dehn-twist loop closes, Q0 = I + 2 sum M[B,a], Q_n(a) = e_a + 2n e_B, n <= 100", 10)
def test_ac6_twist_loop():
    cases = supported_cases(6, 6)
    for gm in cases:
        comb = build_phi0(*gm)
        seq = dehn_twist_sequence(comb)
        assert seq.end == comb, f"{gm} does not close"
        q0 = seq.cumulative
        assert q0 == expected_Q0(comb), f"{gm}: Q0 differs"
        idx = comb.index()
        b = idx[twist_band(comb)]
        tops = sorted({idx[x] for x in comb.top} - {b})
        want = np.eye(comb.d, dtype=np.int64)
        q0n = np.array(q0, dtype=np.int64)
        q = np.eye(comb.d, dtype=np.int64)
        for n in range(1, 101):
            q = q @ q0n
            want[b, tops] = 2 * n
            assert (q == want).all(), f"{gm}: Q_{n} columns"
        assert twist_power(comb, 100) == tuple(map(tuple, want.tolist()))
    return f"{len(cases)} constructions (g <= 6, m <= 6)"


AC7_HULL_ALL = [(0, 4), (0, 5), (1, 2), (0, 6)]
AC7_HULL_SOME = [(1, 3)]


@criterion(7, "twist-volume law (n+1)^-(d-2), n <= 100, hull-confirmed", 60)
def test_ac7_twist_volume():
    for gm in AC7_HULL_ALL + AC7_HULL_SOME + [(2, 2), (4, 0)]:
        comb = build_phi0(*gm)
        j = comb.d - 2
        for n in range(0, 101):
            r = twist_volume_ratio(comb, n)
            assert r == F(1, (n + 1) ** j), f"{gm} n={n}: {r}"
            if n:
                assert F(1, 2**j) <= r * n**j <= 1
            if gm in AC7_HULL_ALL or (gm in AC7_HULL_SOME and n in (1, 10, 100)):
                assert twist_volume_ratio(comb, n, "hull") == r, f"{gm} n={n}: hull volume differs"
    return f"{len(AC7_HULL_ALL) + len(AC7_HULL_SOME) + 2} constructions; hull on {AC7_HULL_ALL} all n, (1,3) n=1,10,100"


@criterion(8, "C-distribution recurrence, C=100, 1000 samples, 10^4 steps", 600)
def test_ac8_cdist():
    rep = cdist_experiment(build_phi0(0, 4), 100, trials=1000, max_steps=10_000, seed=1)
    frac = rep["hit_fraction"]
    tor = cdist_experiment(torus(), 100, trials=200, max_steps=10_000, seed=1)
    assert frac >= F(99, 100), f"hit fraction {float(frac):.3f}"
    return (
        f"(0,4): {rep['hits']}/1000 hit, late-hit {float(rep['late_hit_fraction']):.3f},"
        f" halted {rep['halted']}; torus {float(tor['hit_fraction']):.3f}"
    )


@criterion(9, "exponential harmonic decay vs 1/n Lebesgue decay for X(n,n), n = 2..10", 600)
def test_ac9_discrepancy():
    ns = list(range(2, 11))
    ests = harmonic_estimates(free_model(), [XTarget(n, n) for n in ns], steps=200, trials=100_000, seed=9)
    fit = decay_fit(list(zip(ns, ests)))
    assert fit.rate < 1, f"fitted rate {fit.rate}"
    for (n, a), b in zip(zip(ns, ests), ests[1:]):
        # a rise beyond the noise would contradict decay
        assert not b.ci_lo > a.ci_hi, f"nu(X({n + 1})) significantly above nu(X({n}))"
    worst = 0.0
    for n in ns:
        lo, hi = measure_X(n, n, 50)
        assert n * hi <= 16 and n * lo >= F(1, 16), f"n={n}: n*l in [{float(n * lo):.4f}, {float(n * hi):.4f}]"
        worst = max(worst, float(n * hi), float(1 / (n * lo)))
    indet = max(e.indeterminate_frac for e in ests)
    return f"rate {fit.rate:.3f} (r2 {fit.r_squared:.3f}), max indeterminate {indet:.4f}; n*l within factor {worst:.2f}"


@criterion(10, "Borel-Cantelli verdict on exact torus tables", 60)
def test_ac10_borel_cantelli():
    ns = list(range(1, 102, 2))
    ml = {(n, n): (F(1, n + 1), F(1, n + 1)) for n in ns}
    mv = {(n, n): tree_harmonic_X(n) for n in ns}
    rep = bc_assemble(ml, mv, 1, ns, m_range=lambda n: [n])
    lows = {lv["n"]: lv["lower"] for lv in rep["levels"]}
    growth = float(sum(v for n, v in lows.items() if 11 < n <= 101))
    target = 0.5 * math.log(101 / 11)
    assert abs(growth - target) <= 0.1 * target, f"growth {growth:.4f} vs {target:.4f}"
    assert rep["harmonic_sum_upper"] < F(2, 3)
    v = bc_verdict([lows[n] for n in ns], [mv[n, n] for n in ns])
    assert v.label == "singular-pattern: yes", v.label
    return f"growth {growth:.4f} vs (1/2)ln(101/11) = {target:.4f}; sum nu = {float(rep['harmonic_sum_upper']):.6f} < 2/3"
