"""The labeled Rauzy diagram reachable from a combinatorial type.

Nodes are :class:`Combinatorics` values compared by exact labeled equality.
Each node has at most two arrows, ``t`` (top critical band wins) and ``b``
(bottom critical band wins); an arrow is absent when the split is undefined.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field

from .exact_core import InvalidInput
from .iet_core import BOTTOM, TOP, Combinatorics, InductionHalt, InfeasibleMove, split


class Unavailable(RuntimeError):
    """Raised when an analysis needs a fully explored graph."""


@dataclass
class RauzyGraph:
    nodes: list[Combinatorics] = field(default_factory=list)
    edges: list[tuple[Combinatorics, Combinatorics, str]] = field(default_factory=list)
    truncated: bool = False

    def successors(self) -> dict[Combinatorics, list[tuple[Combinatorics, str]]]:
        out: dict = {v: [] for v in self.nodes}
        for a, b, letter in self.edges:
            out[a].append((b, letter))
        return out

    def out_degree(self, v: Combinatorics) -> int:
        return sum(1 for a, _, _ in self.edges if a == v)


def moves(comb: Combinatorics) -> list[tuple[str, Combinatorics]]:
    out = []
    for letter, side in (("t", TOP), ("b", BOTTOM)):
        try:
            new, _, _ = split(comb, side)
        except (InductionHalt, InfeasibleMove):
            continue
        out.append((letter, new))
    return out


def explore(start: Combinatorics, node_limit: int) -> RauzyGraph:
    """Breadth-first closure under splits, stopping at ``node_limit`` nodes.

    Edges are recorded only between discovered nodes; when the limit cuts the
    search short ``truncated`` is set.
    """
    start.check()
    if node_limit < 1:
        raise InvalidInput("node_limit must be positive")
    g = RauzyGraph()
    seen = {start}
    g.nodes.append(start)
    queue = deque([start])
    while queue:
        v = queue.popleft()
        for letter, w in moves(v):
            if w not in seen:
                if len(seen) >= node_limit:
                    g.truncated = True
                    continue
                seen.add(w)
                g.nodes.append(w)
                queue.append(w)
            g.edges.append((v, w, letter))
    return g


def strongly_connected_components(g: RauzyGraph) -> list[list[Combinatorics]]:
    """Iterative Tarjan."""
    succ = {v: [w for w, _ in ws] for v, ws in g.successors().items()}
    index: dict = {}
    low: dict = {}
    on_stack: set = set()
    stack: list = []
    comps = []
    counter = 0
    for root in g.nodes:
        if root in index:
            continue
        work = [(root, iter(succ[root]))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(succ[w])))
                    advanced = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                low[work[-1][0]] = min(low[work[-1][0]], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                comps.append(comp)
    return comps


def attractors(g: RauzyGraph) -> list[frozenset[Combinatorics]]:
    """Strongly connected components with no arrow leaving them."""
    if g.truncated:
        raise Unavailable("graph was truncated; attractors are not determined")
    succ = g.successors()
    out = []
    for comp in strongly_connected_components(g):
        members = frozenset(comp)
        if all(w in members for v in comp for w, _ in succ[v]):
            out.append(members)
    order = {v: i for i, v in enumerate(g.nodes)}
    return sorted(out, key=lambda c: min(order[v] for v in c))


def _name(c: Combinatorics) -> str:
    return c.serialize()


def export_dot(g: RauzyGraph) -> str:
    lines = ["digraph rauzy {"]
    for v in g.nodes:
        lines.append(f'  "{_name(v)}";')
    for a, b, letter in g.edges:
        lines.append(f'  "{_name(a)}" -> "{_name(b)}" [label="{letter}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def to_json(g: RauzyGraph) -> dict:
    return {
        "nodes": [_name(v) for v in g.nodes],
        "edges": [{"from": _name(a), "to": _name(b), "letter": letter} for a, b, letter in g.edges],
        "truncated": g.truncated,
    }


def dumps(g: RauzyGraph) -> str:
    return json.dumps(to_json(g), indent=2)


def unlabeled(c: Combinatorics) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Forget labels: relabel bands by first appearance, top then bottom."""
    names: dict[str, int] = {}
    for x in c.top + c.bottom:
        names.setdefault(x, len(names))
    return tuple(names[x] for x in c.top), tuple(names[x] for x in c.bottom)


def reduced_node_count(g: RauzyGraph) -> int:
    return len({unlabeled(v) for v in g.nodes})
