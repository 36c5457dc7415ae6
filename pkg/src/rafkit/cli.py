"""Command-line front end.

Pair files hold two Newick strings, one per line; text after ``#`` is
ignored.  All solver output is deterministic for fixed inputs; wall-clock
timings are only included where explicitly requested so that repeated runs
stay byte-identical.

Exit codes: 0 success, 1 usage or parse error, 2 timeout (bounds emitted).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from math import ceil
from pathlib import Path

from .approx import greedy_mast_raf
from .caterpillar_dp import caterpillar_xp_decide
from .gadgets import (check_structural_lemmas, hardness_instance,
                      nochain_caterpillar_family, unbounded_maf_instance)
from .mast import mast, mast_bruteforce
from .pims import erdos_szekeres_partition, pims_exact
from .raf import (RafPartition, maf_bruteforce, mraf_bounds, mraf_exact,
                  validate_af, validate_raf)
from .reduction import find_common_chains, subtree_reduce
from .trees import (NewickError, PhyloTree, align_pair, identity_caterpillar,
                    parse_newick, random_tree, write_newick)

DEFAULT_TIMEOUT = 300.0


class UsageError(Exception):
    pass


def read_pair_file(path) -> tuple:
    lines = []
    with open(path) as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if line:
                lines.append(line)
    if len(lines) != 2:
        raise UsageError(f"{path}: expected exactly two Newick lines, "
                         f"got {len(lines)}")
    try:
        t1 = parse_newick(lines[0])
        t2 = parse_newick(lines[1], universe=t1.labels)
    except NewickError as exc:
        raise UsageError(f"{path}: {exc}") from exc
    return t1, t2


def read_permutation_file(path) -> tuple:
    with open(path) as fh:
        tokens = fh.read().split()
    try:
        values = tuple(int(tok) for tok in tokens)
    except ValueError as exc:
        raise UsageError(f"{path}: permutation file must hold integers") from exc
    if sorted(values) != list(range(1, len(values) + 1)):
        raise UsageError(f"{path}: not a permutation of 1..n")
    return values


def timeout_from(args) -> float:
    if args.timeout is not None:
        return args.timeout
    env = os.environ.get("RAF_TIMEOUT")
    if env:
        return float(env)
    return DEFAULT_TIMEOUT


def emit(data) -> None:
    json.dump(data, sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")


# -- solver commands -----------------------------------------------------------


def cmd_exact(args) -> int:
    t1, t2 = read_pair_file(args.pair)
    budget = timeout_from(args)
    trace = subtree_reduce(t1, t2)
    r1, r2 = trace.final_pair
    strategy = args.strategy.replace("-", "_")
    result = mraf_exact(r1, r2, strategy=strategy, budget=budget)
    partition = trace.expand_partition(result.partition, t1)
    out = {
        "pair": Path(args.pair).name,
        "n": t1.n,
        "strategy": args.strategy,
        "exact": result.exact,
        "size": partition.size,
        "distance": partition.distance,
        "lower": result.lower if not result.exact else partition.size,
        "reduced": bool(trace.steps),
        "reduction_steps": len(trace.steps),
        "partition": partition.to_json(t1.labels),
    }
    if args.timings:
        out["elapsed_s"] = round(result.elapsed, 3)
    emit(out)
    return 0 if result.exact else 2


def cmd_mast(args) -> int:
    t1, t2 = read_pair_file(args.pair)
    res = mast(t1, t2)
    emit({
        "pair": Path(args.pair).name,
        "n": t1.n,
        "size": res.size,
        "taxa": sorted(t1.labels[t] for t in res.taxa),
    })
    return 0


def cmd_approx(args) -> int:
    t1, t2 = read_pair_file(args.pair)
    part = greedy_mast_raf(t1, t2)
    emit({
        "pair": Path(args.pair).name,
        "n": t1.n,
        "size": part.size,
        "partition": part.to_json(t1.labels),
    })
    return 0


def cmd_bounds(args) -> int:
    t1, t2 = read_pair_file(args.pair)
    b = mraf_bounds(t1, t2)
    emit({
        "pair": Path(args.pair).name,
        "n": t1.n,
        "lower": b.lower,
        "upper": b.upper,
        "witness_upper": b.witness_upper.to_json(t1.labels),
    })
    return 0


def cmd_chains(args) -> int:
    t1, t2 = read_pair_file(args.pair)
    trace = subtree_reduce(t1, t2)
    chains = find_common_chains(t1, t2)
    emit({
        "pair": Path(args.pair).name,
        "common_cherry_steps": [list(s) for s in trace.steps],
        "common_chains": [sorted(t1.labels[t] for t in ch) for ch in chains],
    })
    return 0


def cmd_pims(args) -> int:
    values = read_permutation_file(args.permfile)
    n = len(values)
    if n <= 20:
        part = pims_exact(values)
        method = "exact"
    else:
        part = erdos_szekeres_partition(values)
        method = "erdos-szekeres"
    emit({
        "n": n,
        "method": method,
        "size": part.size,
        "classes": [{"direction": d, "positions": [p + 1 for p in ps]}
                    for d, ps in part.classes],
    })
    return 0


# -- report ----------------------------------------------------------------------


REPORT_COLUMNS = ["pair", "n", "mraf", "mraf_lower", "mraf_upper", "mast",
                  "ceil_n_over_mast", "greedy", "maf"]
TIMING_COLUMNS = ["t_mraf_s", "t_mast_s", "t_greedy_s", "t_maf_s"]


def _report_row(path, budget, with_timings):
    name = Path(path).name
    try:
        t1, t2 = read_pair_file(path)
    except UsageError as exc:
        return {"pair": name, "error": str(exc)}
    row = {"pair": name, "n": t1.n}
    clock = time.monotonic
    t0 = clock()
    m = mast(t1, t2)
    t_mast = clock() - t0
    row["mast"] = m.size
    row["ceil_n_over_mast"] = ceil(t1.n / m.size)
    t0 = clock()
    greedy = greedy_mast_raf(t1, t2)
    t_greedy = clock() - t0
    row["greedy"] = greedy.size
    t0 = clock()
    trace = subtree_reduce(t1, t2)
    r1, r2 = trace.final_pair
    result = mraf_exact(r1, r2, budget=budget)
    t_mraf = clock() - t0
    if result.exact:
        row["mraf"] = result.size
        row["mraf_lower"] = result.size
        row["mraf_upper"] = result.size
    else:
        row["mraf"] = None
        row["mraf_lower"] = max(result.lower, row["ceil_n_over_mast"])
        row["mraf_upper"] = greedy.size
    t0 = clock()
    if t1.n <= 12:
        row["maf"] = maf_bruteforce(t1, t2).size
    else:
        row["maf"] = None
    t_maf = clock() - t0
    if with_timings:
        row["t_mraf_s"] = round(t_mraf, 3)
        row["t_mast_s"] = round(t_mast, 3)
        row["t_greedy_s"] = round(t_greedy, 3)
        row["t_maf_s"] = round(t_maf, 3)
    return row


def cmd_report(args) -> int:
    directory = Path(args.directory)
    if not directory.is_dir():
        raise UsageError(f"{directory}: not a directory")
    budget = timeout_from(args)
    paths = sorted(p for p in directory.iterdir()
                   if p.is_file() and not p.name.startswith("."))
    rows = [_report_row(p, budget, args.timings) for p in paths]
    if args.out == "json":
        emit({"rows": rows})
        return 0
    columns = list(REPORT_COLUMNS)
    if args.timings:
        columns += TIMING_COLUMNS
    print(",".join(columns))
    for row in rows:
        if "error" in row:
            print(f"{row['pair']},ERROR: {row['error']}")
            continue
        cells = []
        for col in columns:
            val = row.get(col)
            cells.append("" if val is None else str(val))
        print(",".join(cells))
    return 0


# -- generators -------------------------------------------------------------------


def _emit_pair(t1, t2, comment):
    print(f"# {comment}")
    print(write_newick(t1))
    print(write_newick(t2))


def cmd_gadget(args) -> int:
    if args.family == "hardness":
        values = tuple(int(tok) for tok in args.pi.split())
        inst = hardness_instance(values, args.alpha, args.beta)
        _emit_pair(inst.t1, inst.t2,
                   f"hardness gadget pi={values} alpha={args.alpha} "
                   f"beta={args.beta} leaves={inst.t1.n}")
        if args.meta:
            meta = {
                "pi": list(values),
                "alpha": args.alpha,
                "beta": args.beta,
                "perm_taxa": sorted(inst.t1.labels[t] for t in inst.perm_taxa),
                "side_caterpillars": {
                    name: sorted(inst.t1.labels[t] for t in taxa)
                    for name, taxa in sorted(inst.side_caterpillars.items())},
                "class_sets": {
                    name: sorted(inst.t1.labels[t] for t in taxa)
                    for name, taxa in sorted(inst.class_sets.items())},
            }
            Path(args.meta).write_text(json.dumps(meta, indent=2,
                                                  sort_keys=True))
        return 0
    if args.family == "obs2":
        if args.base:
            base = parse_newick(Path(args.base).read_text())
        else:
            n = args.n or 3
            if n >= 4:
                base = identity_caterpillar(n)
            else:
                base = parse_newick("(" + ",".join(str(i) for i in
                                                   range(1, n + 1)) + ");")
        t1, t2 = unbounded_maf_instance(base)
        _emit_pair(t1, t2, f"cherry-mismatch family on base n={base.n}, "
                           f"{t1.n} taxa")
        return 0
    if args.family == "nochain":
        t1, t2 = nochain_caterpillar_family(args.m)
        _emit_pair(t1, t2, f"no-cherry-no-chain family m={args.m}")
        return 0
    raise UsageError(f"unknown gadget family {args.family!r}")


# -- checking ----------------------------------------------------------------------


def cmd_check(args) -> int:
    t1, t2 = read_pair_file(args.pair)
    data = json.loads(Path(args.partition).read_text())
    partition = RafPartition.from_json(data, t1.labels)
    out = {"pair": Path(args.pair).name, "kind": partition.kind,
           "size": partition.size}
    try:
        out["valid_raf"] = validate_raf(t1, t2, partition)
        out["valid_af"] = (validate_af(t1, t2, partition)
                           if (args.af or partition.kind == "AF")
                           else None)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if args.meta:
        meta = json.loads(Path(args.meta).read_text())
        inst = hardness_instance(tuple(meta["pi"]), meta["alpha"],
                                 meta["beta"])
        out["structural_violations"] = check_structural_lemmas(inst, partition)
    emit(out)
    return 0


# -- entry point --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rafkit",
        description="Relaxed agreement forests for unrooted binary trees")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("exact", help="minimum RAF of a pair file")
    p.add_argument("pair")
    p.add_argument("--strategy", choices=["bnb", "cover-dp"], default="bnb")
    p.add_argument("--timeout", type=float, default=None)
    p.add_argument("--timings", action="store_true")
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("mast", help="maximum agreement subtree")
    p.add_argument("pair")
    p.set_defaults(func=cmd_mast)

    p = sub.add_parser("approx", help="greedy MAST-stripping RAF")
    p.add_argument("pair")
    p.set_defaults(func=cmd_approx)

    p = sub.add_parser("bounds", help="cheap lower/upper bounds")
    p.add_argument("pair")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("chains", help="common cherries and chains report")
    p.add_argument("pair")
    p.set_defaults(func=cmd_chains)

    p = sub.add_parser("pims", help="minimum monotone partition of a permutation")
    p.add_argument("permfile")
    p.set_defaults(func=cmd_pims)

    p = sub.add_parser("report", help="solve every pair file in a directory")
    p.add_argument("directory")
    p.add_argument("--out", choices=["csv", "json"], default="csv")
    p.add_argument("--timeout", type=float, default=None)
    p.add_argument("--timings", action="store_true")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("gadget", help="emit a generated tree pair")
    p.add_argument("family", choices=["hardness", "obs2", "nochain"])
    p.add_argument("--pi", default="1 2 3 4")
    p.add_argument("--alpha", type=int, default=1)
    p.add_argument("--beta", type=int, default=1)
    p.add_argument("--base", default=None)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--m", type=int, default=4)
    p.add_argument("--meta", default=None)
    p.set_defaults(func=cmd_gadget)

    p = sub.add_parser("check", help="validate a partition against a pair")
    p.add_argument("pair")
    p.add_argument("partition")
    p.add_argument("--af", action="store_true")
    p.add_argument("--meta", default=None)
    p.set_defaults(func=cmd_check)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (NewickError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
