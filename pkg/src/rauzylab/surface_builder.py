"""Initial combinatorics for a surface of genus g with m punctures, and its twist.

Every ``phi0`` built here has one orientation-preserving band ``B`` whose top
end is leftmost on top and whose bottom end is rightmost on bottom; all other
bands are orientation reversing.  The only exception is the two-band torus.

The bottom side carries the one-holed torus pattern ``x y z x y z`` (or a
single arch ``d d`` in genus zero).  The top side nests arches.  A basic block
``1 3 4 1 2 3 4 2`` contributes one handle and two ideal triangles; a lone
arch ``p p`` bounds a punctured monogon.  Inside the arch ``a`` the leftover
polygon is cut into triangles by a fan of further nested arches.

Validation is by region analysis.  The base interval is one fat vertex, and
its ends are read counter-clockwise: bottom left to right, then top right to
left.  Bands are untwisted strips.  A corner between consecutive ends is a
cusp except at the two ends of the base interval.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from fractions import Fraction
from typing import Sequence

from .exact_core import (
    ConsistencyError,
    InvalidInput,
    Matrix,
    hull_volume,
    identity,
    mat_pow,
    polytope_volume,
)
from .iet_core import (
    BOTTOM,
    TOP,
    Combinatorics,
    InductionHalt,
    SplittingSequence,
    configuration_polytope,
    replay,
    split,
)
from .walk_sim import Estimate, make_estimate, rng_for


class UnsupportedSurface(InvalidInput):
    pass


class ConstructionFailure(ConsistencyError):
    pass


class InvalidTrack(InvalidInput):
    pass


# --------------------------------------------------------------- regions


@dataclass(frozen=True)
class Region:
    cusp_count: int
    corner_count: int
    punctured: bool
    corners: tuple[tuple[str, str], ...]


@dataclass(frozen=True)
class RegionProfile:
    regions: tuple[Region, ...]
    d: int

    @property
    def euler(self) -> int:
        """Euler characteristic of the closed surface (regions capped off)."""
        return 1 - self.d + len(self.regions)

    @property
    def genus(self) -> int:
        return (2 - self.euler) // 2

    @property
    def punctures(self) -> int:
        return sum(r.punctured for r in self.regions)

    @property
    def triangles(self) -> int:
        return sum(1 for r in self.regions if r.cusp_count == 3 and not r.punctured)

    @property
    def monogons(self) -> int:
        return sum(1 for r in self.regions if r.cusp_count == 1 and r.punctured)

    def summary(self) -> dict:
        return {
            "d": self.d,
            "genus": self.genus,
            "punctures": self.punctures,
            "euler": self.euler,
            "triangles": self.triangles,
            "punctured_monogons": self.monogons,
            "regions": [
                {"cusp_count": r.cusp_count, "corner_count": r.corner_count, "punctured": r.punctured}
                for r in self.regions
            ],
        }


def analyze_regions(comb: Combinatorics) -> RegionProfile:
    """Complementary regions of the track from a boundary walk of the ribbon graph.

    Regions with one or two cusps must contain a puncture; a region with no
    cusp at all means the track does not fill.
    """
    comb.check()
    ends = [x for x in comb.bottom] + [x for x in reversed(comb.top)]
    n = len(ends)
    where: dict[str, list[int]] = {}
    for k, x in enumerate(ends):
        where.setdefault(x, []).append(k)
    partner = {}
    for ks in where.values():
        partner[ks[0]], partner[ks[1]] = ks[1], ks[0]
    smooth = {len(comb.bottom) - 1, n - 1}
    seen: set[int] = set()
    regions = []
    for k0 in range(n):
        if k0 in seen:
            continue
        cycle = []
        k = k0
        while k not in seen:
            seen.add(k)
            cycle.append(k)
            k = partner[(k + 1) % n]
        cusps = sum(1 for c in cycle if c not in smooth)
        if cusps == 0:
            raise InvalidTrack(f"region without cusps in {comb}")
        corners = tuple((ends[c], ends[(c + 1) % n]) for c in cycle)
        regions.append(Region(cusps, len(cycle), cusps <= 2, corners))
    regions.sort(key=lambda r: (r.cusp_count, r.corners))
    prof = RegionProfile(tuple(regions), comb.d)
    if prof.euler % 2 or prof.euler > 2:
        raise InvalidTrack(f"Euler characteristic {prof.euler} is not that of a closed orientable surface")
    return prof


# ---------------------------------------------------------- constructions

BOTTOM_HANDLE = ("x", "y", "z", "x", "y", "z")


def basic_block(i: int) -> list[str]:
    k = [f"k{i}_{j}" for j in range(1, 5)]
    return [k[0], k[2], k[3], k[0], k[1], k[2], k[3], k[1]]


def arch(name: str, inner: Sequence[str] = ()) -> list[str]:
    return [name, *inner, name]


def _fan(sides: list[list[str]], idx: int = 1) -> list[str]:
    # the polygon inside an arch has len(sides) + 1 cusps; nested arches cut it
    if len(sides) <= 2:
        return [e for s in sides for e in s]
    return sides[0] + arch(f"a{idx}", _fan(sides[1:], idx + 1))


def _arch_a_content(blocks: int, monogons: int, first_block: int = 0) -> list[str]:
    sides: list[list[str]] = []
    for i in range(blocks):
        b = basic_block(first_block + i)
        sides += [b[:4], b[4:]]  # a block is two sides of the polygon
    sides += [arch(f"p{j + 1}") for j in range(monogons)]
    if len(sides) == 1:
        # a single monogon arch: inside arch a it would leave a bigon
        return []
    return _fan(sides)


@dataclass(frozen=True)
class ConstructionCase:
    case: str
    g: int
    m: int
    reconstructed: bool = False


def construction_case(g: int, m: int) -> ConstructionCase:
    if g < 0 or m < 0:
        raise UnsupportedSurface("g and m must be nonnegative")
    if m == 0 and g >= 4:
        return ConstructionCase("1", g, m)
    if m == 1 and g >= 3:
        return ConstructionCase("2", g, m)
    if m == 2 and g >= 2:
        return ConstructionCase("3", g, m)
    if m >= 3 and g >= 1:
        return ConstructionCase("4", g, m)
    if g == 0 and m >= 5:
        return ConstructionCase("5", g, m)
    if (g, m) in SPECIALS:
        return ConstructionCase("special", g, m, reconstructed=(g, m) != (1, 1))
    raise UnsupportedSurface(f"no construction for genus {g} with {m} punctures")


def _special(g: int, m: int) -> tuple[list[str], list[str]]:
    handle = list(BOTTOM_HANDLE) + ["B"]
    if (g, m) == (1, 1):
        return ["2", "1"], ["1", "2"]
    if (g, m) == (0, 4):
        return ["B", "a", "a"], ["b", "b", "B"]
    if (g, m) == (1, 2):
        return ["B", "a", "a"], handle
    if (g, m) == (2, 0):
        return ["B", "u", "v", "w", "u", "v", "w"], handle
    if (g, m) == (2, 1):
        return ["B", *basic_block(1), "a", "a"], handle
    if (g, m) == (3, 0):
        b1, b2 = basic_block(1), basic_block(2)
        # one chord through both blocks splits the leftover quadrilateral
        return ["B", *b1[:4], "q", *b1[4:], *b2[:4], "q", *b2[4:]], handle
    raise UnsupportedSurface(f"no special construction for ({g}, {m})")


SPECIALS = {(1, 1), (0, 4), (1, 2), (2, 0), (2, 1), (3, 0)}


def _general(case: ConstructionCase) -> tuple[list[str], list[str]]:
    g, m = case.g, case.m
    bottom = list(BOTTOM_HANDLE)
    if case.case == "1":
        a = _arch_a_content(g - 3, 0, 3)
        top = ["B", *arch("a", a), *arch("b", basic_block(1)), *arch("c", basic_block(2))]
    elif case.case == "2":
        a = _arch_a_content(g - 2, 0, 2)
        top = ["B", *arch("a", a), *arch("b", basic_block(1)), *arch("c")]
    elif case.case == "3":
        top = ["B", *arch("a", _arch_a_content(g - 1, 0, 1)), *arch("b"), *arch("c")]
    elif case.case == "4":
        top = ["B", *arch("a", _arch_a_content(g - 1, m - 2, 1)), *arch("b"), *arch("c")]
    else:
        top = ["B", *arch("a", _arch_a_content(0, m - 4)), *arch("b"), *arch("c")]
        bottom = ["d", "d"]
    return top, bottom + ["B"]


def build_phi0(g: int, m: int) -> Combinatorics:
    """Initial combinatorics for genus ``g`` with ``m`` punctures, validated."""
    case = construction_case(g, m)
    top, bottom = _special(g, m) if case.case == "special" else _general(case)
    comb = Combinatorics(tuple(top), tuple(bottom))
    problems = phi0_problems(comb, g, m)
    if problems:
        raise ConstructionFailure(f"({g}, {m}) candidate {comb} fails: {'; '.join(problems)}")
    return comb


def twist_band(comb: Combinatorics) -> str:
    """The band whose top end is leftmost and bottom end rightmost."""
    if comb.top[0] != comb.bottom[-1]:
        raise InvalidInput(f"{comb} does not have the initial shape")
    return comb.top[0]


def phi0_problems(comb: Combinatorics, g: int, m: int) -> list[str]:
    out = comb.problems()
    if out:
        return out
    try:
        b = twist_band(comb)
    except InvalidInput as e:
        return [str(e)]
    others = [x for x in comb.two_sided if x != b]
    if others and comb.d > 2:
        out.append(f"extra orientation-preserving bands {others}")
    prof = analyze_regions(comb)
    if (prof.genus, prof.punctures) != (g, m):
        out.append(f"regions give genus {prof.genus} with {prof.punctures} punctures")
    if comb.d > 2:
        if prof.triangles != 4 * g - 4 + m or prof.monogons != m or len(prof.regions) != prof.triangles + m:
            out.append(f"region profile {prof.triangles} triangles, {prof.monogons} monogons")
    return out


# ------------------------------------------------------------- Dehn twist


def twist_letters(comb: Combinatorics) -> str:
    """Winner sides of one twist loop: ``B`` wins every split.

    One rotation of the top side takes ``t - 1`` splits (``t`` top ends) and
    splits ``B`` once by every other top end.  Bands with both ends on top
    are then done; a band with one top end (the torus) needs a second
    rotation.
    """
    b = twist_band(comb)
    counts = Counter(x for x in comb.top if x != b)
    if set(counts.values()) == {2}:
        rotations = 1
    elif set(counts.values()) == {1}:
        rotations = 2
    else:
        raise InvalidInput(f"{comb}: top bands mix one and two top ends")
    return "b" * (rotations * (len(comb.top) - 1))


def dehn_twist_sequence(comb: Combinatorics) -> SplittingSequence:
    b = twist_band(comb)
    seq = replay(comb, twist_letters(comb))
    if seq.end != comb or any(s.winner != b for s in seq.steps):
        raise ConstructionFailure(f"twist loop from {comb} ends at {seq.end}")
    return seq


def expected_Q0(comb: Combinatorics) -> Matrix:
    """``I + 2 sum M[B, alpha]`` over bands ``alpha != B`` with an end on top."""
    idx = comb.index()
    b = twist_band(comb)
    rows = [list(r) for r in identity(comb.d)]
    for a in set(comb.top) - {b}:
        rows[idx[b]][idx[a]] += 2
    return tuple(tuple(r) for r in rows)


def twist_power(comb: Combinatorics, n: int) -> Matrix:
    return mat_pow(dehn_twist_sequence(comb).cumulative, n)


def twist_volume_ratio(comb: Combinatorics, n: int, method: str = "triangulation") -> Fraction:
    """``l(JQ_n(W0)) / l(W0)`` as an exact rational.

    ``method="triangulation"`` transports the stored triangulation of ``W0``;
    ``method="hull"`` recomputes both volumes from convex hulls.
    """
    if n < 0:
        raise InvalidInput("n must be nonnegative")
    w0 = configuration_polytope(comb)
    image = w0.image(twist_power(comb, n))
    if method == "hull":
        return hull_volume(image) / hull_volume(w0)
    return polytope_volume(image) / _base_volume(comb)


@lru_cache(maxsize=None)
def _base_volume(comb: Combinatorics) -> Fraction:
    return polytope_volume(configuration_polytope(comb))


def twist_volume_law(comb: Combinatorics, n: int) -> Fraction:
    """Closed form: ``(n+1)**-(d-2)``, or ``1/(2n+1)`` for the classical torus."""
    if comb.classical:
        if comb.d != 2:
            raise InvalidInput("closed form known for the torus only among classical types")
        return Fraction(1, 2 * n + 1)
    return Fraction(1, (n + 1) ** (comb.d - 2))


# ---------------------------------------------------------- sampling in W


def sample_widths(comb: Combinatorics, rng, bits: int = 2048) -> list[int]:
    """Uniform point of ``W`` as integer widths (scaled by ``2**(bits+1)``).

    Picks one of the equal-volume simplices of the stored triangulation, then
    uniform barycentric coordinates as spacings of sorted ``bits``-bit draws.
    """
    w = configuration_polytope(comb)
    simplices = w.simplices
    scale = 1 << bits
    while True:
        s = simplices[int(rng.integers(0, len(simplices)))] if len(simplices) > 1 else simplices[0]
        cuts = sorted(_draw_bits(rng, bits) for _ in range(len(s) - 1))
        bary = [hi - lo for lo, hi in zip([0, *cuts], [*cuts, scale])]
        widths = [0] * comb.d
        for coeff, vi in zip(bary, s):
            for j, x in enumerate(w.vertices[vi]):
                if x:
                    widths[j] += coeff * int(2 * x)
        if all(widths):
            return widths


def _draw_bits(rng, bits: int) -> int:
    words = rng.integers(0, 1 << 63, size=(bits + 62) // 63, dtype="int64")
    v = 0
    for x in words:
        v = (v << 63) | int(x)
    return v >> (63 * len(words) - bits)


class _Stepper:
    """Integer Rauzy induction with a cache of combinatorial transitions."""

    def __init__(self, start: Combinatorics):
        self.idx = start.index()
        self.nodes = [start]
        self.ids = {start: 0}
        self.trans: dict[tuple[int, str], tuple[int, int, int]] = {}
        self.crit: list[tuple[int, int]] = []
        self._crit(start)

    def _crit(self, c: Combinatorics):
        self.crit.append((self.idx[c.top[-1]], self.idx[c.bottom[-1]]))

    def move(self, node: int, side: str) -> tuple[int, int, int]:
        key = (node, side)
        if key not in self.trans:
            new, w, l = split(self.nodes[node], side)
            if new not in self.ids:
                self.ids[new] = len(self.nodes)
                self.nodes.append(new)
                self._crit(new)
            self.trans[key] = (self.ids[new], self.idx[w], self.idx[l])
        return self.trans[key]

    def step(self, node: int, widths: list[int]):
        """Advance in place; returns ``(node, winner, loser, side)`` or ``None`` on a halt."""
        top_i, bot_i = self.crit[node]
        if top_i == bot_i or widths[top_i] == widths[bot_i]:
            return None
        side = TOP if widths[top_i] > widths[bot_i] else BOTTOM
        new, wi, li = self.move(node, side)
        widths[wi] -= widths[li]
        return new, wi, li, side


def _hits(stepper: _Stepper, widths: list[int], C: Fraction, max_steps: int, stop_after: int | None = None):
    """Steps ``k >= 1`` at which the node is the start and ``Q`` is C-distributed."""
    sums = [1] * len(widths)
    node, hits = 0, []
    for k in range(1, max_steps + 1):
        res = stepper.step(node, widths)
        if res is None:
            return hits, k - 1, True
        node, wi, li, _ = res
        sums[li] += sums[wi]
        if node == 0 and max(sums) * C.denominator < C.numerator * min(sums):
            hits.append(k)
            if stop_after is not None and len(hits) >= stop_after:
                return hits, k, False
    return hits, max_steps, False


def cdist_experiment(
    comb: Combinatorics, C, trials: int, max_steps: int, seed: int, bits: int = 2048
) -> dict:
    """How soon uniformly sampled expansions reach a C-distributed stage at ``comb``.

    A hit is a stage after at least one split whose node equals ``comb`` and
    whose cumulative matrix is C-distributed.  A sample whose integer widths
    run out (a tie) before ``max_steps`` stops there.
    """
    C = Fraction(C)
    if C <= 1:
        raise InvalidInput("C must exceed 1")
    first, counts, late, halted = [], [], 0, 0
    stepper = _Stepper(comb)
    for t in range(trials):
        rng = rng_for(seed, t)
        widths = sample_widths(comb, rng, bits)
        hits, used, halt = _hits(stepper, widths, C, max_steps)
        halted += halt
        counts.append(len(hits))
        if hits:
            first.append(hits[0])
            late += hits[-1] > max_steps // 2
    if trials == 0:
        return {"trials": 0, "hits": 0, "hit_fraction": None, "histogram": {}}
    hist = Counter(_bucket(k) for k in first)
    return {
        "trials": trials,
        "C": C,
        "max_steps": max_steps,
        "hits": len(first),
        "hit_fraction": Fraction(len(first), trials),
        "late_hit_fraction": Fraction(late, trials),
        "halted": halted,
        "mean_hits": sum(counts) / trials,
        "histogram": {k: hist[k] for k in sorted(hist, key=lambda s: int(s.split("-")[0]))},
        "first_hit_max": max(first) if first else None,
    }


def _bucket(k: int) -> str:
    lo = 1
    while lo * 2 <= k:
        lo *= 2
    return f"{lo}-{2 * lo - 1}"


def ymn_lebesgue(
    comb: Combinatorics,
    m: int,
    n: int,
    trials: int,
    seed: int,
    C=100,
    max_steps: int = 10_000,
    bits: int = 2048,
) -> Estimate:
    """Monte Carlo ``l(Y(m, n)) / l(W0)``.

    Expand a uniform sample to its ``m``-th C-distributed stage at ``comb``
    (``m = 0`` is the start) and test whether the next splits are ``n`` full
    twist loops.  Samples that never reach the stage, or run out of precision
    before the test is decided, are indeterminate and count as misses.
    """
    if m < 0 or n < 1:
        raise InvalidInput("need m >= 0 and n >= 1")
    C = Fraction(C)
    loop = twist_letters(comb)
    need = n * len(loop)
    stepper = _Stepper(comb)
    good = undecided = 0
    for t in range(trials):
        rng = rng_for(seed, t)
        widths = sample_widths(comb, rng, bits)
        if m > 0:
            hits, _, _ = _hits(stepper, widths, C, max_steps, stop_after=m)
            if len(hits) < m:
                undecided += 1
                continue
        node, ok = 0, True
        for _ in range(need):
            res = stepper.step(node, widths)
            if res is None:
                ok = None
                break
            node, _, _, side = res
            if side != BOTTOM:
                ok = False
                break
        if ok is None:
            undecided += 1
        elif ok:
            good += 1
    return make_estimate(good, trials, undecided)


def supported_cases(max_genus: int = 6, max_punctures: int = 8) -> list[tuple[int, int]]:
    out = []
    for g in range(max_genus + 1):
        for m in range(max_punctures + 1):
            try:
                construction_case(g, m)
            except UnsupportedSurface:
                continue
            out.append((g, m))
    return out

