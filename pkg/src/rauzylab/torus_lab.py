"""The two-band (torus) model: words in R and L, continued fractions, cylinders.

Coordinates are ``(lambda_2, lambda_1)`` so that

    R = [[1, 0], [1, 1]],   L = [[1, 1], [0, 1]]

act on the slope ``x = lambda_2 / lambda_1`` as Moebius maps.  The cylinder of
a word ``w`` is the image of ``[0, oo]`` under its matrix, an interval with
endpoints ``b/d`` and ``a/c`` and length ``1/(c d)``.  The empty word is
assigned ``[0, 1]``, the cylinder of ``R``: every ``x`` in ``(0, 1)`` begins
with ``R``.

``X(m, n) = {x : a_m(x) > n}`` where ``x = [0; a_1, a_2, ...]``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from math import prod

from .exact_core import ConsistencyError, InvalidInput, Matrix, mat_mul
from .iet_core import expand, torus

R: Matrix = ((1, 0), (1, 1))
L: Matrix = ((1, 1), (0, 1))
LETTER = {"R": R, "L": L}


@dataclass(frozen=True)
class Word:
    """Run-length word ``R^{a_1} L^{a_2} R^{a_3} ...``.

    ``partial`` marks a final block that may still continue (a prefix rather
    than a complete expansion); it does not change the matrix.
    """

    runs: tuple[int, ...] = ()
    partial: bool = False

    def __post_init__(self):
        if any(a < 1 for a in self.runs):
            raise InvalidInput("run lengths must be positive")

    @classmethod
    def from_letters(cls, letters: str, partial: bool = False) -> "Word":
        letters = letters.strip()
        if letters and letters[0] != "R":
            raise InvalidInput("words start with R")
        runs = [len(m.group(0)) for m in re.finditer(r"R+|L+", letters)]
        if "".join(letters.split()).replace("R", "").replace("L", ""):
            raise InvalidInput(f"bad letters in {letters!r}")
        return cls(tuple(runs), partial)

    @classmethod
    def parse(cls, text: str) -> "Word":
        """Accepts ``RRL``, ``R2L`` or ``R^2 L`` style input."""
        letters = expand_letters(text)
        return cls.from_letters(letters)

    @property
    def letters(self) -> str:
        return "".join(("R" if i % 2 == 0 else "L") * a for i, a in enumerate(self.runs))

    def __len__(self) -> int:
        return sum(self.runs)

    def __str__(self) -> str:
        return "".join(
            ("R" if i % 2 == 0 else "L") + (str(a) if a > 1 else "") for i, a in enumerate(self.runs)
        ) or "()"


def expand_letters(text: str) -> str:
    """``R3L2`` -> ``RRRLL``."""
    text = text.replace("^", "").replace(" ", "")
    out = []
    pos = 0
    for m in re.finditer(r"([RL])(\d*)", text):
        if m.start() != pos:
            raise InvalidInput(f"cannot parse word {text!r}")
        out.append(m.group(1) * int(m.group(2) or 1))
        pos = m.end()
    if pos != len(text):
        raise InvalidInput(f"cannot parse word {text!r}")
    return "".join(out)


@dataclass(frozen=True)
class Interval:
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        if self.lo > self.hi:
            raise InvalidInput("interval with lo > hi")

    @property
    def length(self) -> Fraction:
        return self.hi - self.lo

    def __contains__(self, x) -> bool:
        return self.lo <= x <= self.hi


def letters_matrix(letters: str) -> Matrix:
    """Product of the letter matrices; any R/L string, not just R-initial."""
    q: Matrix = ((1, 0), (0, 1))
    for ch in letters:
        q = mat_mul(q, LETTER[ch])
    return q


def word_matrix(w: Word) -> Matrix:
    q: Matrix = ((1, 0), (0, 1))
    for i, a in enumerate(w.runs):
        # R^a = [[1,0],[a,1]], L^a = [[1,a],[0,1]]
        q = mat_mul(q, ((1, 0), (a, 1)) if i % 2 == 0 else ((1, a), (0, 1)))
    return q


def matrix_interval(q: Matrix) -> Interval:
    (a, b), (c, d) = q
    if c == 0 or d == 0:
        raise InvalidInput("matrix does not map [0, oo] into the finite line")
    x, y = Fraction(b, d), Fraction(a, c)
    return Interval(min(x, y), max(x, y))


def cylinder_interval(w: Word) -> Interval:
    if not w.runs:
        return Interval(Fraction(0), Fraction(1))
    return matrix_interval(word_matrix(w))


def cylinder_length(w: Word) -> Fraction:
    """``1/(c d)`` from the bottom row of the word matrix."""
    if not w.runs:
        return Fraction(1)
    (_, _), (c, d) = word_matrix(w)
    return Fraction(1, c * d)


def cf_digits(x: Fraction) -> list[int]:
    p, q = x.numerator, x.denominator
    digits = []
    while p:
        a, r = divmod(q, p)
        digits.append(a)
        q, p = p, r
    return digits


def cf_expand(x) -> Word:
    """The splitting word of a rational slope, one run per partial quotient."""
    x = Fraction(x)
    if not 0 < x < 1:
        raise InvalidInput("x must lie in (0, 1)")
    return Word(tuple(cf_digits(x)))


def torus_widths(x) -> dict[str, Fraction]:
    """Widths ``(lambda_1, lambda_2) = (1/(1+x), x/(1+x))`` on the torus exchange."""
    x = Fraction(x)
    return {"1": 1 / (1 + x), "2": x / (1 + x)}


def iet_letters(x, max_steps: int = 10**6) -> str:
    """Letters from Rauzy induction on the torus exchange, tie-completed.

    Induction on rational data stops at a tie one letter before the end of
    the continued fraction word; the tie means the last block gains one more
    copy of its letter, which is appended here.
    """
    seq = expand(torus(), torus_widths(x), max_steps)
    letters = "".join("R" if s.winner == "1" else "L" for s in seq.steps)
    if seq.status == "critical widths are equal":
        letters += letters[-1] if letters else "R"
    return letters


# --------------------------------------------------------------- X(m, n)

PRECISION = 256
MAX_LEAVES = 2_000_000


def effective_budget(m: int, budget: int, max_leaves: int = MAX_LEAVES) -> int:
    """Largest ``B <= budget`` with ``B**(m-1) <= max_leaves``."""
    if m <= 1:
        return budget
    b = budget
    while b > 1 and b ** (m - 1) > max_leaves:
        b -= 1
    return b


def _prefix_rows(m: int, budget: int):
    """Bottom rows ``(c, d)`` of all depth ``m-1`` prefixes with digits <= budget.

    Depth-first; the last block is yielded together with its letter parity so
    the caller can append the next block.
    """
    stack = [(0, 1, 0)]
    while stack:
        c, d, depth = stack.pop()
        if depth == m - 1:
            yield c, d
            continue
        if depth % 2 == 0:  # R-block
            for a in range(1, budget + 1):
                stack.append((c + a * d, d, depth + 1))
        else:
            for a in range(1, budget + 1):
                stack.append((c, d + a * c, depth + 1))


def measure_X(m: int, n: int, depth_budget: int, max_leaves: int = MAX_LEAVES) -> tuple[Fraction, Fraction]:
    """Certified bounds ``lower <= l(X(m, n)) <= upper``.

    For ``m = 1`` the exact value ``1/(n+1)``.  Otherwise the sum of
    ``l({a_m > n} & C)`` over the cylinders ``C`` fixing ``a_1..a_{m-1}``, all at
    most the budget, is a lower bound.  The discarded cylinders (the tail)
    still fix ``a_1..a_{m-1}``; on each, ``t = T^{m-1} x`` has density
    ``(1+r)/(1+rt)**2`` with ``r <= 1``, so ``{a_m > n} = {t < 1/(n+1)}`` takes at
    most a fraction ``2/(n+2)`` of it.  Terms are accumulated as multiples of
    ``2**-PRECISION``, rounded down for the lower bound and up for the upper.
    The budget is reduced if ``budget**(m-1)`` exceeds ``max_leaves``.
    """
    if m < 1 or n < 1:
        raise InvalidInput("need m >= 1 and n >= 1")
    if m == 1:
        v = Fraction(1, n + 1)
        return v, v
    budget = effective_budget(m, depth_budget, max_leaves)
    one = 1 << PRECISION
    k = n + 1
    lo_sum = hi_sum = covered = 0
    r_block = (m - 1) % 2 == 0  # block m is an R-block when m is odd
    for c, d in _prefix_rows(m, budget):
        if r_block:
            den_k, den_1 = (c + k * d) * d, (c + d) * d
        else:
            den_k, den_1 = c * (d + k * c), c * (d + c)
        q, r = divmod(one, den_k)
        lo_sum += q
        hi_sum += q + (r > 0)
        covered += one // den_1
    lower = Fraction(lo_sum, one)
    upper = Fraction(hi_sum, one) + Fraction(2 * (one - covered), (n + 2) * one)
    if not lower <= upper:
        raise ConsistencyError("measure_X bounds out of order")
    return lower, upper


def tree_harmonic_X(n: int) -> Fraction:
    """``nu(X(n, n))`` for the forward walk on the tree, by path counting.

    After the forced first letter R every letter is a fair choice between R
    and L, so the blocks are independent and geometric.  Once block ``n`` has
    started, ``a_n > n`` means the next ``n`` letters all repeat its letter.
    Continuations are counted with a two-state transfer (run alive / broken).
    """
    if n < 1 or n % 2 == 0:
        raise InvalidInput("n must be a positive odd integer")
    alive, broken = 1, 0
    for _ in range(n):
        alive, broken = alive, alive + 2 * broken
    return Fraction(alive, alive + broken)


def harmonic_union(ns) -> Fraction:
    """Exact ``nu`` of a union of ``X(n, n)`` over distinct ``n`` (independent blocks)."""
    return 1 - prod((1 - tree_harmonic_X(n) for n in set(ns)), start=Fraction(1))


def almost_independence_check(m: int, n: int, budget: int, max_leaves: int = MAX_LEAVES) -> Fraction | None:
    """Certified upper bound on ``l(X_mm & X_nn) / (l(X_mm) l(X_nn))``.

    Conditioned on a cylinder fixing ``a_1..a_m`` the Gauss shift ``T^m x`` has
    density ``(1+r)/(1+rt)**2`` with ``r <= 1``, hence at most 2.  This gives
    ``l(X_mm & X_nn) <= 2 l(X_mm) l(X(n-m, n))``.  ``None`` means unbounded at
    this budget.
    """
    if m == n:
        lo, _ = measure_X(m, m, budget, max_leaves)
        return None if lo == 0 else 1 / lo
    if not (m < n and m % 2 == 1 and n % 2 == 1):
        raise InvalidInput("need odd m < n")
    lo_n, _ = measure_X(n, n, budget, max_leaves)
    _, hi_shift = measure_X(n - m, n, budget, max_leaves)
    if lo_n == 0:
        return None
    return 2 * hi_shift / lo_n


def singularity_demo(n_max: int, budget: int = 50, max_leaves: int = MAX_LEAVES) -> dict:
    """Partial sums of both measures of ``X(n, n)`` over odd ``n <= n_max``."""
    if n_max < 1 or n_max % 2 == 0:
        raise InvalidInput("n_max must be a positive odd integer")
    ns = list(range(1, n_max + 1, 2))
    bounds = {n: measure_X(n, n, budget, max_leaves) for n in ns}
    leb, harm, surrogate = [], [], []
    lo_acc = hi_acc = nu_acc = s_acc = Fraction(0)
    for n in ns:
        lo_acc += bounds[n][0]
        hi_acc += bounds[n][1]
        nu_acc += tree_harmonic_X(n)
        s_acc += Fraction(1, n + 1)
        leb.append({"n": n, "lower": lo_acc, "upper": hi_acc, "budget": effective_budget(n, budget, max_leaves)})
        harm.append({"n": n, "exact": nu_acc})
        surrogate.append({"n": n, "exact": s_acc})
    unions = {}
    for k in sorted({1, max(1, n_max - 4)}):
        members = [n for n in ns if n >= k]
        unions[f"k={k}"] = {
            "members": members,
            "lebesgue_lower": max(bounds[n][0] for n in members),
            "lebesgue_upper": min(Fraction(1), sum(bounds[n][1] for n in members)),
            "harmonic_exact": harmonic_union(members),
        }
    return {
        "lebesgue_partial": leb,
        "lebesgue_surrogate_partial": surrogate,
        "harmonic_partial": harm,
        "union_bounds": unions,
    }

