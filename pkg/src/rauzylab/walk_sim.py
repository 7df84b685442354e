"""Random walks on 2x2 integer matrices and their limit points on the line.

A walk multiplies i.i.d. increments on the right, ``w_n = w_{n-1} g_n``.  Its
limit point is located through the two column slopes ``a/c`` and ``b/d`` of
``w_n``.  For products of nonnegative matrices the bracket is exactly
``w_n([0, oo])``, and the brackets are nested.  For general increments both
columns still converge to the limit point, but the bracket need not contain
it.  There the bracket is padded by its own width on each side before it is
compared with a target set.

Randomness is counter based: trial ``i`` under seed ``s`` draws from Philox
with key ``s`` and ``i`` in the top word of the counter, so results do not
depend on how trials are split between worker processes.
"""

from __future__ import annotations

import csv
import json
import math
from bisect import bisect_right
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .exact_core import InvalidInput, Matrix, as_matrix, identity, mat_mul
from .torus_lab import L, R, Word, cylinder_interval

Z95 = 1.959963984540054
R_INV: Matrix = ((1, 0), (-1, 1))
L_INV: Matrix = ((1, -1), (0, 1))


class Unavailable(RuntimeError):
    pass


# ------------------------------------------------------------ distributions


def _det2(m: Matrix) -> int:
    return m[0][0] * m[1][1] - m[0][1] * m[1][0]


@dataclass(frozen=True)
class Distribution:
    """Finitely supported step law ``mu``; ``start`` premultiplies every walk."""

    support: tuple[tuple[Matrix, Fraction], ...]
    start: Matrix = ((1, 0), (0, 1))

    def __post_init__(self):
        if not self.support:
            raise InvalidInput("empty support")
        total = Fraction(0)
        for m, p in self.support:
            if len(m) != 2 or abs(_det2(m)) != 1:
                raise InvalidInput(f"{m} is not a 2x2 matrix of determinant +-1")
            if p <= 0:
                raise InvalidInput("probabilities must be positive")
            total += p
        if total != 1:
            raise InvalidInput(f"probabilities sum to {total}, not 1")

    @classmethod
    def uniform(cls, mats: Iterable[Matrix], start: Matrix = ((1, 0), (0, 1))) -> "Distribution":
        mats = [as_matrix(m) for m in mats]
        return cls(tuple((m, Fraction(1, len(mats))) for m in mats), as_matrix(start))

    @property
    def positive(self) -> bool:
        return all(x >= 0 for m, _ in self.support for row in m for x in row) and all(
            x >= 0 for row in self.start for x in row
        )

    def sampler(self) -> tuple[int, list[int]]:
        """Common denominator ``D`` and cumulative numerators for integer draws."""
        den = lcm(*(p.denominator for _, p in self.support))
        cum, acc = [], 0
        for _, p in self.support:
            acc += p.numerator * (den // p.denominator)
            cum.append(acc)
        return den, cum

    def to_json(self) -> list | dict:
        steps = [{"matrix": [list(r) for r in m], "p": f"{p.numerator}/{p.denominator}"} for m, p in self.support]
        if self.start == identity(2):
            return steps
        return {"start": [list(r) for r in self.start], "steps": steps}

    @classmethod
    def from_json(cls, data) -> "Distribution":
        start = ((1, 0), (0, 1))
        if isinstance(data, dict):
            start = as_matrix(data.get("start", start))
            data = data["steps"]
        return cls(tuple((as_matrix(e["matrix"]), Fraction(str(e["p"]))) for e in data), start)


def tree_model() -> Distribution:
    """Forward walk on the Farey tree: a forced first R, then fair R/L letters."""
    return Distribution.uniform([R, L], start=R)


def free_model() -> Distribution:
    """Uniform on ``{R, L, R^-1, L^-1}``."""
    return Distribution.uniform([R, L, R_INV, L_INV])


NAMED = {"tree": tree_model, "uniform4": free_model, "RL": lambda: Distribution.uniform([R, L])}


def load_mu(spec: str) -> Distribution:
    if spec in NAMED:
        return NAMED[spec]()
    return Distribution.from_json(json.loads(Path(spec).read_text()))


def rng_for(seed: int, trial: int) -> np.random.Generator:
    # trial index in the top counter word: streams never overlap
    counter = np.array([0, 0, 0, trial % (1 << 64)], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=seed % (1 << 128), counter=counter))


# ------------------------------------------------------------------- traces


@dataclass(frozen=True)
class WalkTrace:
    seed: int
    products: tuple[Matrix, ...]
    length: int
    trial: int = 0


def sample_path(mu: Distribution, steps: int, seed: int, trial: int = 0) -> WalkTrace:
    if steps < 1:
        raise InvalidInput("steps must be positive")
    den, cum = mu.sampler()
    draws = rng_for(seed, trial).integers(0, den, size=steps)
    w = mu.start
    products = []
    for u in draws:
        w = mat_mul(w, mu.support[bisect_right(cum, int(u))][0])
        products.append(w)
    return WalkTrace(seed, tuple(products), steps, trial)


@dataclass(frozen=True)
class Boundary:
    """Bracket ``[lo, hi]`` of the limit point; ``hi is None`` stands for oo."""

    lo: Fraction
    hi: Fraction | None
    resolved: bool

    @property
    def width(self):
        return None if self.hi is None else self.hi - self.lo


UNRESOLVED = Boundary(Fraction(0), None, False)


def matrix_boundary(q: Matrix) -> Boundary:
    (a, b), (c, d) = q
    if c == 0 or d == 0:
        return UNRESOLVED
    x, y = Fraction(b, d), Fraction(a, c)
    return Boundary(min(x, y), max(x, y), True)


def boundary_point(trace: WalkTrace) -> Boundary:
    if trace.length < 1:
        raise InvalidInput("empty trace")
    return matrix_boundary(trace.products[-1])


# ------------------------------------------------------------------ targets


def _frac(x: Fraction) -> tuple[int, int]:
    return x.numerator, x.denominator


@dataclass(frozen=True)
class XTarget:
    """``X(m, n) = {a_m > n}``."""

    m: int
    n: int

    def classify(self, lo: Fraction, hi: Fraction):
        return self.classify_q(*_frac(Fraction(lo)), *_frac(Fraction(hi)))

    def classify_q(self, p1: int, q1: int, p2: int, q2: int):
        """Decide for ``[p1/q1, p2/q2]`` (positive denominators): True, False or None.

        Walks down the continued fraction digits with the Gauss map while the
        whole interval shares them.
        """
        if p2 < 0 or p1 > q1:
            return False
        if p1 < 0 or p2 > q2:
            return None
        for i in range(1, self.m + 1):
            if i == self.m:
                if p2 * (self.n + 1) <= q2:
                    return True
                if p1 * (self.n + 1) >= q1:
                    return False
                return None
            if p1 == 0:
                return None
            k = q2 // p2
            if p1 * (k + 1) < q1:
                return None
            p1, q1, p2, q2 = q2 - k * p2, p2, q1 - k * p1, p1
        return None

    def __str__(self):
        return f"X({self.m},{self.n})"


@dataclass(frozen=True)
class IntervalTarget:
    lo: Fraction
    hi: Fraction

    def classify(self, lo: Fraction, hi: Fraction):
        if self.lo <= lo and hi <= self.hi:
            return True
        if hi < self.lo or lo > self.hi:
            return False
        return None

    def classify_q(self, p1: int, q1: int, p2: int, q2: int):
        a, b = _frac(self.lo)
        c, d = _frac(self.hi)
        if a * q1 <= p1 * b and p2 * d <= c * q2:
            return True
        if p2 * b < a * q2 or p1 * d > c * q1:
            return False
        return None

    def __str__(self):
        return f"[{self.lo},{self.hi}]"


def parse_target(text: str):
    t = text.replace(" ", "")
    if t.startswith("X(") and t.endswith(")"):
        m, n = (int(v) for v in t[2:-1].split(","))
        return XTarget(m, n)
    if t.startswith("[") and t.endswith("]"):
        lo, hi = (Fraction(v) for v in t[1:-1].split(","))
        return IntervalTarget(lo, hi)
    if t.startswith("cyl:"):
        t = t[4:]
    iv = cylinder_interval(Word.parse(t))
    return IntervalTarget(iv.lo, iv.hi)


def classify(target, b: Boundary, pad: bool):
    if not b.resolved:
        return None
    lo, hi = b.lo, b.hi
    if pad:
        w = hi - lo
        lo, hi = lo - w, hi + w
    return target.classify(lo, hi)


# --------------------------------------------------------------- estimates


@dataclass(frozen=True)
class Estimate:
    point: float
    ci_lo: float
    ci_hi: float
    trials: int
    indeterminate: int = 0

    @property
    def indeterminate_frac(self) -> float:
        return self.indeterminate / self.trials if self.trials else 0.0

    @property
    def half_width(self) -> float:
        return (self.ci_hi - self.ci_lo) / 2


def wilson(successes: int, trials: int, z: float = Z95) -> tuple[float, float]:
    if trials == 0:
        return 0.0, 1.0
    p = successes / trials
    den = 1 + z * z / trials
    centre = (p + z * z / (2 * trials)) / den
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / den
    return max(0.0, centre - half), min(1.0, centre + half)


def make_estimate(successes: int, trials: int, indeterminate: int = 0) -> Estimate:
    lo, hi = wilson(successes, trials)
    point = successes / trials if trials else 0.0
    return Estimate(point, min(lo, point), max(hi, point), trials, indeterminate)


def _run_chunk(args) -> tuple[list[int], list[int]]:
    mu, targets, steps, seed, first, last = args
    den, cum = mu.sampler()
    mats = [m for m, _ in mu.support]
    positive = mu.positive
    k = len(targets)
    inside = [0] * k
    undecided = [0] * k
    chunk = 32 if positive else steps
    for trial in range(first, last):
        rng = rng_for(seed, trial)
        (a, b), (c, d) = mu.start
        state = [None] * k
        open_ = set(range(k))
        done = 0
        while done < steps and open_:
            n_draw = min(chunk, steps - done)
            for u in rng.integers(0, den, size=n_draw):
                (p, q), (r, s) = mats[bisect_right(cum, int(u))]
                a, b, c, d = a * p + b * r, a * q + b * s, c * p + d * r, c * q + d * s
                done += 1
                if positive and c and d:
                    # nonnegative entries: the bracket is [b/d, a/c] up to order
                    if b * c <= a * d:
                        ends = (b, d, a, c)
                    else:
                        ends = (a, c, b, d)
                    for j in list(open_):
                        v = targets[j].classify_q(*ends)
                        if v is not None:
                            state[j] = v
                            open_.discard(j)
                    if not open_:
                        break
        if open_ and not positive:
            bnd = matrix_boundary(((a, b), (c, d)))
            for j in list(open_):
                v = classify(targets[j], bnd, pad=True)
                if v is not None:
                    state[j] = v
                    open_.discard(j)
        for j in range(k):
            if state[j] is None:
                undecided[j] += 1
            elif state[j]:
                inside[j] += 1
    return inside, undecided


def harmonic_estimates(
    mu: Distribution,
    targets: Sequence,
    steps: int,
    trials: int,
    seed: int,
    threads: int = 1,
) -> list[Estimate]:
    """Estimate ``nu(target)`` for several targets from one set of sample paths.

    A trace counts towards the estimate when its boundary bracket lies in the
    target.  Traces still undecided after ``steps`` are reported in
    ``indeterminate`` and counted as outside.  For positive step laws the
    walk stops as soon as every target is decided.
    """
    if steps < 1 or trials < 1:
        raise InvalidInput("steps and trials must be positive")
    targets = list(targets)
    k = len(targets)
    threads = max(1, threads)
    bounds = np.linspace(0, trials, threads + 1).astype(int)
    jobs = [(mu, targets, steps, seed, int(bounds[i]), int(bounds[i + 1])) for i in range(threads)]
    if threads == 1:
        results = [_run_chunk(jobs[0])]
    else:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_run_chunk, jobs))
    inside = [sum(r[0][j] for r in results) for j in range(k)]
    undecided = [sum(r[1][j] for r in results) for j in range(k)]
    return [make_estimate(inside[j], trials, undecided[j]) for j in range(k)]


def harmonic_estimate(mu: Distribution, target, steps: int, trials: int, seed: int, threads: int = 1) -> Estimate:
    if isinstance(target, str):
        target = parse_target(target)
    return harmonic_estimates(mu, [target], steps, trials, seed, threads)[0]


# --------------------------------------------------------------------- fits


@dataclass(frozen=True)
class DecayFit:
    rate: float
    r_squared: float
    curvature: float  # quadratic coefficient of log(estimate) against n
    points: int


def decay_fit(points: Iterable[tuple[int, object]]) -> DecayFit:
    """Least squares fit of ``log(estimate)`` against ``n``; ``rate = exp(slope)``."""
    xs, ys = [], []
    for n, est in points:
        v = est.point if isinstance(est, Estimate) else float(est)
        if v > 0:
            xs.append(float(n))
            ys.append(math.log(v))
    if len(xs) < 3:
        raise Unavailable("need at least three nonzero estimates")
    x, y = np.array(xs), np.array(ys)
    slope, icept = np.polyfit(x, y, 1)
    resid = y - (slope * x + icept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 1.0
    curv = float(np.polyfit(x, y, 2)[0]) if len(xs) >= 3 else 0.0
    return DecayFit(float(math.exp(slope)), r2, curv, len(xs))


def write_csv(path, rows: Iterable[tuple[int, Estimate]]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["n", "estimate", "ci_lo", "ci_hi", "indeterminate_frac"])
        for n, e in rows:
            w.writerow([n, repr(e.point), repr(e.ci_lo), repr(e.ci_hi), repr(e.indeterminate_frac)])
