"""Labeled interval exchanges, classical and non-classical, and Rauzy induction.

A combinatorial type lists band labels by their ends along the top and the
bottom of the base interval, left to right.  Every label appears exactly
twice.  A band with both ends on one side is orientation reversing; ``S_t``
and ``S_b`` collect those with both ends on top and on bottom respectively.

Width data are dictionaries ``label -> Fraction``.  The cocycle convention is
``old widths = E @ new widths`` with ``E = I + M[winner, loser]``, and the
cumulative matrix of a sequence is the left-to-right product ``Q = Q' E``.
Matrix rows and columns follow :attr:`Combinatorics.labels`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Mapping, Sequence

from .exact_core import (
    InvalidInput,
    Matrix,
    Polytope,
    elementary,
    identity,
    mat_mul,
)

TOP, BOTTOM = "top", "bottom"


class InductionHalt(Exception):
    """The Rauzy step is undefined: equal critical widths or a shared band."""

    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


class InfeasibleMove(InvalidInput):
    """The requested split produces an invalid combinatorial type."""


def label_key(label: str):
    return (0, int(label), "") if label.isdigit() else (1, 0, label)


@dataclass(frozen=True)
class Combinatorics:
    top: tuple[str, ...]
    bottom: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "top", tuple(str(x) for x in self.top))
        object.__setattr__(self, "bottom", tuple(str(x) for x in self.bottom))

    @classmethod
    def parse(cls, top: str, bottom: str) -> "Combinatorics":
        return cls(tuple(top.split()), tuple(bottom.split()))

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(sorted(set(self.top) | set(self.bottom), key=label_key))

    @property
    def d(self) -> int:
        return len(self.labels)

    @property
    def S_t(self) -> frozenset[str]:
        return frozenset(x for x in self.top if self.top.count(x) == 2)

    @property
    def S_b(self) -> frozenset[str]:
        return frozenset(x for x in self.bottom if self.bottom.count(x) == 2)

    @property
    def two_sided(self) -> tuple[str, ...]:
        return tuple(x for x in self.labels if x in self.top and x in self.bottom)

    @property
    def classical(self) -> bool:
        return not self.S_t and not self.S_b

    def index(self) -> dict[str, int]:
        return {x: i for i, x in enumerate(self.labels)}

    def problems(self) -> list[str]:
        out = []
        if not self.top or not self.bottom:
            out.append("each side needs at least one end")
        for x in self.labels:
            if self.top.count(x) + self.bottom.count(x) != 2:
                out.append(f"label {x!r} does not occur exactly twice")
        if bool(self.S_t) != bool(self.S_b):
            out.append("switch condition cannot hold: one of S_t, S_b is empty")
        return out

    def is_valid(self) -> bool:
        return not self.problems()

    def check(self) -> "Combinatorics":
        probs = self.problems()
        if probs:
            raise InvalidInput("; ".join(probs))
        return self

    def serialize(self) -> str:
        return f"{' '.join(self.top)} / {' '.join(self.bottom)}"

    def __str__(self) -> str:
        return self.serialize()


WidthVector = dict  # label -> Fraction


def normalize(w: Mapping[str, Fraction]) -> dict[str, Fraction]:
    total = sum(w.values())
    return {k: Fraction(v) / total for k, v in w.items()}


def validate(comb: Combinatorics, w: Mapping) -> bool:
    """Positivity, unit total and the switch condition, checked exactly."""
    if set(w) != set(comb.labels):
        raise InvalidInput(f"width labels {sorted(w)} do not match {list(comb.labels)}")
    w = {k: Fraction(v) for k, v in w.items()}
    if any(v <= 0 for v in w.values()) or sum(w.values()) != 1:
        return False
    return sum(w[x] for x in comb.S_t) == sum(w[x] for x in comb.S_b)


@dataclass(frozen=True)
class SplitStep:
    winner: str
    loser: str
    side_of_winner_critical_end: str
    elementary: Matrix

    @property
    def letter(self) -> str:
        """``t`` if the top critical band won, ``b`` otherwise."""
        return "t" if self.side_of_winner_critical_end == TOP else "b"


def critical(comb: Combinatorics) -> tuple[str, str]:
    """``(alpha_1, alpha_0)``: the bands owning the rightmost top and bottom ends."""
    return comb.top[-1], comb.bottom[-1]


def split(comb: Combinatorics, winner_side: str) -> tuple[Combinatorics, str, str]:
    """Purely combinatorial split; ``winner_side`` says whose critical band wins.

    Returns ``(new_comb, winner, loser)``.  Raises :class:`InductionHalt` if the
    same band holds both critical positions and :class:`InfeasibleMove` if the
    result is not a valid type.
    """
    a1, a0 = critical(comb)
    if a1 == a0:
        raise InductionHalt("same band in both critical positions")
    if winner_side == TOP:
        winner, loser, wside, lside = a1, a0, list(comb.top), list(comb.bottom)
    elif winner_side == BOTTOM:
        winner, loser, wside, lside = a0, a1, list(comb.bottom), list(comb.top)
    else:
        raise InvalidInput(f"unknown side {winner_side!r}")
    lside.pop()  # the loser's critical end
    if winner in lside:
        # winner has an end on each side: reinsert right of its other end
        lside.insert(lside.index(winner) + 1, loser)
    else:
        # both winner ends on its critical side: move across, left of the other end
        other = wside.index(winner)
        wside.insert(other, loser)
    if winner_side == TOP:
        new = Combinatorics(tuple(wside), tuple(lside))
    else:
        new = Combinatorics(tuple(lside), tuple(wside))
    if not new.is_valid():
        raise InfeasibleMove(f"split of {comb} with {winner_side} winner gives {new}")
    return new, winner, loser


def make_step(comb: Combinatorics, winner_side: str) -> tuple[Combinatorics, SplitStep]:
    new, winner, loser = split(comb, winner_side)
    idx = comb.index()
    e = elementary(comb.d, idx[winner], idx[loser])
    return new, SplitStep(winner, loser, winner_side, e)


def rauzy_step(comb: Combinatorics, w: Mapping) -> tuple[Combinatorics, dict, SplitStep]:
    """One step of Rauzy induction on a valid pair ``(comb, w)``."""
    if not validate(comb, w):
        raise InvalidInput("width data fail positivity, normalization or switch condition")
    a1, a0 = critical(comb)
    if a1 == a0:
        raise InductionHalt("same band in both critical positions")
    if w[a1] == w[a0]:
        raise InductionHalt("critical widths are equal")
    side = TOP if w[a1] > w[a0] else BOTTOM
    new, step = make_step(comb, side)
    nw = {k: Fraction(v) for k, v in w.items()}
    nw[step.winner] -= nw[step.loser]
    return new, normalize(nw), step


@dataclass(frozen=True)
class SplittingSequence:
    start: Combinatorics
    steps: tuple[SplitStep, ...]
    end: Combinatorics
    cumulative: Matrix
    status: str = "max_steps"  # or a halt reason
    end_widths: dict | None = field(default=None, compare=False)

    @property
    def letters(self) -> str:
        return "".join(s.letter for s in self.steps)

    def __len__(self) -> int:
        return len(self.steps)


def right_multiply_elementary(cols: list[list[int]], wi: int, li: int) -> None:
    """In-place ``Q <- Q (I + M[wi, li])`` on a column-major matrix."""
    cw, cl = cols[wi], cols[li]
    for r in range(len(cl)):
        cl[r] += cw[r]


def from_columns(cols: list[list[int]]) -> Matrix:
    return tuple(zip(*cols))


def expand(comb: Combinatorics, w: Mapping, max_steps: int) -> SplittingSequence:
    """Iterate :func:`rauzy_step` until ``max_steps`` or a halt."""
    idx = comb.index()
    d = comb.d
    cols = [list(c) for c in identity(d)]
    steps = []
    cur, cw, status = comb, {k: Fraction(v) for k, v in w.items()}, "max_steps"
    if not validate(comb, cw):
        raise InvalidInput("width data fail positivity, normalization or switch condition")
    for _ in range(max_steps):
        try:
            cur, cw, step = rauzy_step(cur, cw)
        except InductionHalt as h:
            status = h.reason
            break
        steps.append(step)
        right_multiply_elementary(cols, idx[step.winner], idx[step.loser])
    return SplittingSequence(comb, tuple(steps), cur, from_columns(cols), status, cw)


def replay(start: Combinatorics, letters: str) -> SplittingSequence:
    """Sequence from a string of ``t``/``b`` winner sides, without widths."""
    idx = start.index()
    cols = [list(c) for c in identity(start.d)]
    cur, steps = start, []
    for ch in letters:
        cur, step = make_step(cur, TOP if ch == "t" else BOTTOM)
        steps.append(step)
        right_multiply_elementary(cols, idx[step.winner], idx[step.loser])
    return SplittingSequence(start, tuple(steps), cur, from_columns(cols), "replay")


def product(steps: Sequence[SplitStep], d: int) -> Matrix:
    q = identity(d)
    for s in steps:
        q = mat_mul(q, s.elementary)
    return q


# ------------------------------------------------------ configuration space


def unit(d: int, i: int) -> tuple[Fraction, ...]:
    return tuple(Fraction(int(j == i)) for j in range(d))


def staircase(a: int, b: int) -> list[list[tuple[int, int]]]:
    """Staircase triangulation of ``Delta_a x Delta_b`` as monotone lattice paths."""
    out = []

    def walk(i, j, path):
        if i == a and j == b:
            out.append(path)
            return
        if i < a:
            walk(i + 1, j, path + [(i + 1, j)])
        if j < b:
            walk(i, j + 1, path + [(i, j + 1)])

    walk(0, 0, [(0, 0)])
    return out


def configuration_polytope(comb: Combinatorics) -> Polytope:
    """Hull of ``e_ab = (e_a + e_b)/2`` (a in S_t, b in S_b) and ``e_g`` (g two-sided).

    Comes with an exact triangulation: the join of the simplex on the
    two-sided bands with the staircase triangulation of the product of the
    simplices on ``S_t`` and ``S_b``.  All its simplices have equal volume.
    """
    comb.check()
    idx = comb.index()
    d = comb.d
    st = sorted(comb.S_t, key=label_key)
    sb = sorted(comb.S_b, key=label_key)
    gam = list(comb.two_sided)
    verts = []
    grid = {}
    for i, a in enumerate(st):
        for j, b in enumerate(sb):
            grid[i, j] = len(verts)
            verts.append(tuple((x + y) / 2 for x, y in zip(unit(d, idx[a]), unit(d, idx[b]))))
    tail = []
    for g in gam:
        tail.append(len(verts))
        verts.append(unit(d, idx[g]))
    if st:
        simplices = tuple(
            tuple(grid[p] for p in path) + tuple(tail) for path in staircase(len(st) - 1, len(sb) - 1)
        )
        dim = len(st) + len(sb) - 2 + len(gam)
    else:
        simplices = (tuple(tail),)
        dim = len(gam) - 1
    return Polytope(tuple(verts), dim, simplices)


def cylinder(seq: SplittingSequence) -> Polytope:
    """Width data (at ``seq.start``) whose expansion begins with ``seq``."""
    return configuration_polytope(seq.end).image(seq.cumulative)


# ---------------------------------------------------------------- .iex files

_WIDTH = re.compile(r"^(\S+)=(-?\d+)(?:/(\d+))?$")


def format_iex(comb: Combinatorics, w: Mapping | None = None) -> str:
    lines = [f"top: {' '.join(comb.top)}", f"bottom: {' '.join(comb.bottom)}"]
    if w is not None:
        parts = []
        for k in comb.labels:
            v = Fraction(w[k])
            parts.append(f"{k}={v.numerator}/{v.denominator}")
        lines.append("widths: " + " ".join(parts))
    return "\n".join(lines) + "\n"


def parse_iex(text: str) -> tuple[Combinatorics, dict | None]:
    fields = {}
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, rest = line.partition(":")
        if not sep or key.strip() not in ("top", "bottom", "widths"):
            raise InvalidInput(f"bad .iex line: {raw!r}")
        fields[key.strip()] = rest.split()
    if "top" not in fields or "bottom" not in fields:
        raise InvalidInput(".iex needs top: and bottom: lines")
    comb = Combinatorics(tuple(fields["top"]), tuple(fields["bottom"]))
    w = None
    if "widths" in fields:
        w = {}
        for tok in fields["widths"]:
            m = _WIDTH.match(tok)
            if not m:
                raise InvalidInput(f"bad width token {tok!r}")
            w[m.group(1)] = Fraction(int(m.group(2)), int(m.group(3) or 1))
    return comb, w


def read_iex(path) -> tuple[Combinatorics, dict | None]:
    return parse_iex(Path(path).read_text())


def write_iex(path, comb: Combinatorics, w: Mapping | None = None) -> None:
    Path(path).write_text(format_iex(comb, w))


def torus() -> Combinatorics:
    """The classical two-band exchange ``2 1 / 1 2``."""
    return Combinatorics(("2", "1"), ("1", "2"))

