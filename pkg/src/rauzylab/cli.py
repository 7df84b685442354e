"""Command line entry point: ``python -m rauzylab <group> <command> ...``.

Exit status is 0 on success, 1 on invalid input and 2 when an internal
consistency check fails.  Exact rationals are printed as ``"p/q"``.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .exact_core import ConsistencyError, InvalidInput, as_matrix, column_sums, is_C_distributed
from .iet_core import (
    Combinatorics,
    configuration_polytope,
    cylinder,
    expand,
    format_iex,
    read_iex,
    replay,
)


class UsageError(Exception):
    pass


class Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


# ------------------------------------------------------------------ output


def to_jsonable(obj):
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, Combinatorics):
        return obj.serialize()
    if hasattr(obj, "__dataclass_fields__"):
        return {k: to_jsonable(getattr(obj, k)) for k in obj.__dataclass_fields__}
    if isinstance(obj, float) and obj == float("inf"):
        return "inf"
    return obj


def emit(args, payload: dict, text: str | None = None) -> None:
    data = to_jsonable(payload)
    compact = json.dumps(data, separators=(",", ":"))
    if args.out:
        Path(args.out).write_text(compact + "\n")
    if args.json:
        out = compact
    elif text is not None:
        out = text
    else:
        out = "\n".join(f"{k}: {json.dumps(v) if isinstance(v, (dict, list)) else v}" for k, v in data.items())
    print(out)


# -------------------------------------------------------------- helpers


def load_comb(args) -> tuple[Combinatorics, dict | None]:
    from .surface_builder import build_phi0

    if getattr(args, "infile", None):
        return read_iex(args.infile)
    if getattr(args, "g", None) is not None and getattr(args, "m", None) is not None:
        return build_phi0(args.g, args.m), None
    raise InvalidInput("give --in FILE.iex or --g/--m")


def parse_matrix(text: str):
    return as_matrix(json.loads(text))


# ---------------------------------------------------------------- torus


def cmd_torus_cylinder(args):
    from .torus_lab import Word, cylinder_interval, cylinder_length, word_matrix

    w = Word.parse(args.word)
    iv = cylinder_interval(w)
    emit(
        args,
        {"word": str(w), "matrix": [list(r) for r in word_matrix(w)], "lo": iv.lo, "hi": iv.hi, "length": cylinder_length(w)},
    )


def cmd_torus_cf(args):
    from .torus_lab import cf_expand, cylinder_interval, iet_letters

    x = Fraction(args.x)
    w = cf_expand(x)
    iv = cylinder_interval(w)
    emit(args, {"x": x, "word": str(w), "runs": list(w.runs), "iet_letters": iet_letters(x), "lo": iv.lo, "hi": iv.hi})


def cmd_torus_xmn(args):
    from .torus_lab import measure_X

    lo, hi = measure_X(args.m, args.n, args.budget)
    emit(args, {"lower": lo, "upper": hi})


def cmd_torus_demo(args):
    from .torus_lab import singularity_demo

    emit(args, singularity_demo(args.nmax, args.budget))


# ----------------------------------------------------------------- walk


def cmd_walk_simulate(args):
    from .walk_sim import boundary_point, load_mu, sample_path

    trace = sample_path(load_mu(args.mu), args.steps, args.seed, args.trial)
    b = boundary_point(trace)
    emit(
        args,
        {
            "seed": trace.seed,
            "trial": trace.trial,
            "steps": trace.length,
            "final": [list(r) for r in trace.products[-1]],
            "resolved": b.resolved,
            "lo": b.lo,
            "hi": b.hi,
        },
    )


def cmd_walk_estimate(args):
    from .walk_sim import harmonic_estimates, load_mu, parse_target, write_csv

    targets = [parse_target(t) for t in (args.target or ["X(3,3)"])]
    ests = harmonic_estimates(load_mu(args.mu), targets, args.steps, args.trials, args.seed, args.threads)
    rows = []
    for t, e in zip(targets, ests):
        n = getattr(t, "n", len(rows) + 1)
        rows.append((n, e))
    if args.csv:
        write_csv(args.csv, rows)
    emit(
        args,
        {
            "estimates": [
                {"target": str(t), "n": n, "estimate": e.point, "ci_lo": e.ci_lo, "ci_hi": e.ci_hi,
                 "indeterminate_frac": e.indeterminate_frac, "trials": e.trials}
                for t, (n, e) in zip(targets, rows)
            ]
        },
    )


def cmd_walk_fit(args):
    import csv

    from .walk_sim import decay_fit

    with open(args.infile) as fh:
        pts = [(int(r["n"]), float(r["estimate"])) for r in csv.DictReader(fh)]
    f = decay_fit(pts)
    emit(args, {"rate": f.rate, "r_squared": f.r_squared, "curvature": f.curvature, "points": f.points})


# ------------------------------------------------------------------ iet


def cmd_iet_expand(args):
    comb, w = load_comb(args)
    if w is None:
        raise InvalidInput("the .iex file needs a widths: line")
    seq = expand(comb, w, args.max_steps)
    emit(
        args,
        {
            "steps": len(seq),
            "status": seq.status,
            "letters": seq.letters,
            "winners": [s.winner for s in seq.steps],
            "end": seq.end,
            "cumulative": [list(r) for r in seq.cumulative],
            "column_sums": list(column_sums(seq.cumulative)),
        },
    )


def cmd_iet_cylinder(args):
    from .exact_core import polytope_volume

    comb, _ = load_comb(args)
    seq = replay(comb, args.letters)
    cyl = cylinder(seq)
    base = configuration_polytope(comb)
    emit(
        args,
        {
            "end": seq.end,
            "vertices": [list(v) for v in cyl.vertices],
            "dim": cyl.dim,
            "relative_volume": polytope_volume(cyl) / polytope_volume(base) if seq.end == comb else None,
        },
    )


# ---------------------------------------------------------------- rauzy


def _graph(args):
    from .rauzy_graph import explore

    comb, _ = load_comb(args)
    return explore(comb, args.limit)


def cmd_rauzy_explore(args):
    from .rauzy_graph import export_dot, to_json

    g = _graph(args)
    if args.dot:
        print(export_dot(g), end="")
        return
    emit(args, to_json(g), f"nodes: {len(g.nodes)}\nedges: {len(g.edges)}\ntruncated: {g.truncated}")


def cmd_rauzy_attractors(args):
    from .rauzy_graph import attractors

    g = _graph(args)
    emit(args, {"attractors": [sorted(c.serialize() for c in a) for a in attractors(g)]})


def cmd_rauzy_dot(args):
    from .rauzy_graph import export_dot

    print(export_dot(_graph(args)), end="")


# -------------------------------------------------------------- surface


def cmd_surface_build(args):
    from .surface_builder import build_phi0, construction_case

    comb = build_phi0(args.g, args.m)
    case = construction_case(args.g, args.m)
    if args.out:
        # --out takes the .iex file here, not the report
        Path(args.out).write_text(format_iex(comb))
        args.out = None
    emit(
        args,
        {"g": args.g, "m": args.m, "case": case.case, "reconstructed": case.reconstructed, "d": comb.d,
         "top": " ".join(comb.top), "bottom": " ".join(comb.bottom)},
        format_iex(comb).rstrip("\n"),
    )


def cmd_surface_regions(args):
    from .surface_builder import analyze_regions

    comb, _ = load_comb(args)
    emit(args, analyze_regions(comb).summary())


def cmd_surface_twist(args):
    from .surface_builder import dehn_twist_sequence, twist_volume_law, twist_volume_ratio

    comb, _ = load_comb(args)
    seq = dehn_twist_sequence(comb)
    law = twist_volume_law(comb, args.n)
    if args.hull:
        ratio = twist_volume_ratio(comb, args.n, "hull")
    elif args.exact:
        ratio = twist_volume_ratio(comb, args.n)
    else:
        ratio = law
    if ratio != law:
        raise ConsistencyError(f"twist volume {ratio} differs from closed form {law}")
    emit(args, {"ratio": ratio} if args.json else {"ratio": ratio, "loop_length": len(seq), "d": comb.d})


def cmd_surface_cdist(args):
    from .surface_builder import cdist_experiment

    comb, _ = load_comb(args)
    emit(args, cdist_experiment(comb, Fraction(args.C), args.trials, args.max_steps, args.seed))


def cmd_surface_ymn(args):
    from .surface_builder import twist_volume_law, ymn_lebesgue

    comb, _ = load_comb(args)
    e = ymn_lebesgue(comb, args.ym, args.n, args.trials, args.seed, Fraction(args.C), args.max_steps)
    out = {"estimate": e.point, "ci_lo": e.ci_lo, "ci_hi": e.ci_hi, "indeterminate_frac": e.indeterminate_frac}
    if args.ym == 0:
        out["exact"] = twist_volume_law(comb, args.n)
    emit(args, out)


# -------------------------------------------------------------- measure


def cmd_measure_distortion(args):
    from .measure_lab import is_uniformly_distorted

    comb, _ = load_comb(args)
    seq = replay(comb, args.letters)
    w = configuration_polytope(seq.end)
    C = Fraction(args.C)
    emit(
        args,
        {
            "column_sums": list(column_sums(seq.cumulative)),
            "C_distributed": is_C_distributed(seq.cumulative, C),
            "uniformly_distorted": is_uniformly_distorted(seq.cumulative, w, C),
        },
    )


def cmd_measure_bc(args):
    from .measure_lab import bc_assemble, bc_verdict
    from .torus_lab import tree_harmonic_X

    ns = list(range(1, args.nmax + 1, 2))
    ml = {(n, n): (Fraction(1, n + 1), Fraction(1, n + 1)) for n in ns}
    mv = {(n, n): tree_harmonic_X(n) for n in ns}
    rep = bc_assemble(ml, mv, 1, ns, m_range=lambda n: [n])
    v = bc_verdict([ml[n, n][0] for n in ns], [mv[n, n] for n in ns], args.pairwise_c)
    rep["verdict"] = v
    emit(args, rep)


# --------------------------------------------------------------- parser


def build_parser() -> Parser:
    common = Parser(add_help=False)
    g = common.add_argument_group("global")
    g.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    g.add_argument("--trials", type=int, default=argparse.SUPPRESS)
    g.add_argument("--json", action="store_true", default=argparse.SUPPRESS)
    g.add_argument("--csv", default=argparse.SUPPRESS)
    g.add_argument("--out", default=argparse.SUPPRESS)
    g.add_argument("--threads", type=int, default=argparse.SUPPRESS)

    p = Parser(prog="rauzylab", parents=[common], description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"rauzylab {__version__}")
    groups = p.add_subparsers(dest="group", parser_class=Parser)

    def leaf(sub, name, func, **kw):
        q = sub.add_parser(name, parents=[common], **kw)
        q.set_defaults(func=func)
        return q

    def comb_args(q):
        q.add_argument("--in", dest="infile")
        q.add_argument("--g", type=int)
        q.add_argument("--m", type=int)

    t = groups.add_parser("torus").add_subparsers(dest="cmd", parser_class=Parser)
    q = leaf(t, "cylinder", cmd_torus_cylinder)
    q.add_argument("--word", required=True)
    q = leaf(t, "cf", cmd_torus_cf)
    q.add_argument("--x", required=True)
    q = leaf(t, "xmn", cmd_torus_xmn)
    q.add_argument("--m", type=int, required=True)
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--budget", type=int, default=50)
    q = leaf(t, "demo", cmd_torus_demo)
    q.add_argument("--nmax", type=int, default=11)
    q.add_argument("--budget", type=int, default=50)

    w = groups.add_parser("walk").add_subparsers(dest="cmd", parser_class=Parser)
    q = leaf(w, "simulate", cmd_walk_simulate)
    q.add_argument("--mu", default="uniform4")
    q.add_argument("--steps", type=int, default=100)
    q.add_argument("--trial", type=int, default=0)
    q = leaf(w, "estimate", cmd_walk_estimate)
    q.add_argument("--mu", default="uniform4")
    q.add_argument("--target", action="append")
    q.add_argument("--steps", type=int, default=200)
    q = leaf(w, "fit", cmd_walk_fit)
    q.add_argument("--in", dest="infile", required=True)

    i = groups.add_parser("iet").add_subparsers(dest="cmd", parser_class=Parser)
    q = leaf(i, "expand", cmd_iet_expand)
    comb_args(q)
    q.add_argument("--max-steps", type=int, default=100)
    q = leaf(i, "cylinder", cmd_iet_cylinder)
    comb_args(q)
    q.add_argument("--letters", default="")

    r = groups.add_parser("rauzy").add_subparsers(dest="cmd", parser_class=Parser)
    for name, func in (("explore", cmd_rauzy_explore), ("attractors", cmd_rauzy_attractors), ("dot", cmd_rauzy_dot)):
        q = leaf(r, name, func)
        comb_args(q)
        q.add_argument("--limit", type=int, default=1000)
        if name == "explore":
            q.add_argument("--dot", action="store_true")

    s = groups.add_parser("surface").add_subparsers(dest="cmd", parser_class=Parser)
    q = leaf(s, "build", cmd_surface_build)
    q.add_argument("--g", type=int, required=True)
    q.add_argument("--m", type=int, required=True)
    q = leaf(s, "regions", cmd_surface_regions)
    comb_args(q)
    q = leaf(s, "twist", cmd_surface_twist)
    comb_args(q)
    q.add_argument("--n", type=int, default=1)
    q.add_argument("--exact", action="store_true", help="compute the volume ratio exactly and check the closed form")
    q.add_argument("--hull", action="store_true", help="recompute both volumes from convex hulls (slow beyond about 8 bands)")
    q = leaf(s, "cdist", cmd_surface_cdist)
    comb_args(q)
    q.add_argument("--C", default="100")
    q.add_argument("--max-steps", type=int, default=10_000)
    q = leaf(s, "ymn", cmd_surface_ymn)
    comb_args(q)
    q.add_argument("--ym", type=int, default=0, help="which C-distributed stage (0 = start)")
    q.add_argument("--n", type=int, default=1)
    q.add_argument("--C", default="100")
    q.add_argument("--max-steps", type=int, default=10_000)

    m = groups.add_parser("measure").add_subparsers(dest="cmd", parser_class=Parser)
    q = leaf(m, "distortion", cmd_measure_distortion)
    comb_args(q)
    q.add_argument("--letters", default="")
    q.add_argument("--C", default="2")
    q = leaf(m, "bc", cmd_measure_bc)
    q.add_argument("--nmax", type=int, default=101)
    q.add_argument("--pairwise-c", dest="pairwise_c", default=None)
    return p


DEFAULTS = {"seed": 0, "trials": 1000, "json": False, "csv": None, "out": None, "threads": 1}


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except SystemExit as e:  # --help / --version
        return int(e.code or 0)
    for k, v in DEFAULTS.items():
        if not hasattr(args, k):
            setattr(args, k, v)
    if not hasattr(args, "func"):
        parser.print_usage(sys.stderr)
        return 1
    try:
        args.func(args)
    except ConsistencyError as e:
        print(f"consistency failure: {e}", file=sys.stderr)
        return 2
    except (InvalidInput, ValueError, KeyError, FileNotFoundError) as e:
        print(f"invalid input: {e}", file=sys.stderr)
        return 1
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
