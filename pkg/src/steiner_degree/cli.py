"""Command-line driver: ``steiner-degree <command> ...``.

Exit codes: 0 success, 1 bad input or I/O failure, 2 infeasible instance,
3 iteration or round cap exceeded.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import sys
import time
from pathlib import Path

from . import __version__, kernels
from .experiments import SUITES, pool_size, run_suite, spread_solution
from .generators import generate, rng_for
from .instance import (GstInstance, InstanceError, KTreeInstance, SubTree, check, covers, gst_from_json,
                       is_feasible, ktree_from_json, max_degree, to_json)
from .ktree import GstSolverFailed, RoundCapExceeded, solve_md_ktree
from .lp import build_lp, dump_lp, verify_fractional
from .oracle import InfeasibleError, OracleError, brute_md_gst, brute_md_ktree, brute_min_cost_tree
from .rounding import (DEGREE_CONST, ITER_CAP_CONST, TAU_CONST, IterationCapExceeded, best_root_solution,
                       default_iteration_cap, degree_concentration_report, edge_marginals,
                       estimate_connect_probs, round_to_cover, solve_bd_gst_tree, solve_md_gst_tree)
from .simplex import LpInfeasible
from .treewidth import reduce_instance, solve_md_gst_btw, to_dot

EXIT_OK, EXIT_INPUT, EXIT_INFEASIBLE, EXIT_CAP = 0, 1, 2, 3


class CliError(Exception):
    def __init__(self, message: str, code: int = EXIT_INPUT):
        super().__init__(message)
        self.code = code


# ------------------------------------------------ I/O helpers

def load_instance(path: str) -> GstInstance | KTreeInstance:
    try:
        doc = json.loads(Path(path).read_text())
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise CliError(f"{path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise CliError(f"{path}: top level must be an object")
    return ktree_from_json(doc) if "k" in doc else gst_from_json(doc)


def dumps(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def describe(instance) -> dict:
    body = json.dumps(to_json(instance), sort_keys=True, separators=(",", ":"))
    out = {"sha256": hashlib.sha256(body.encode()).hexdigest(), "n": instance.graph.n,
           "m": len(instance.graph.edges)}
    if isinstance(instance, GstInstance):
        out.update(groups=len(instance.groups), root=instance.root, q=instance.q,
                   max_group_size=instance.max_group_size)
    else:
        out.update(terminals=len(instance.terminals), k=instance.k)
    return out


def tree_json(tree: SubTree, graph=None) -> dict:
    out = {"edges": [list(e) for e in tree.sorted_edges()], "nodes": sorted(tree.nodes),
           "max_degree": max_degree(tree)}
    if graph is not None:
        c = tree.cost(graph)
        out["cost"] = int(c) if c.denominator == 1 else str(c)
    return out


def to_csv(columns: list[str], rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=columns, extrasaction="ignore", lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: (json.dumps(v) if isinstance(v, (list, dict)) else v) for k, v in r.items()})
    return buf.getvalue()


def emit(args, report: dict, columns: list[str], rows: list[dict]) -> None:
    if getattr(args, "timing", False):
        report["wall_time_s"] = round(time.perf_counter() - args._start, 3)
    text = dumps(report) if args.format == "json" else to_csv(columns, rows)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def base_config(args, **extra) -> dict:
    cfg = {"seed": args.seed, "version": __version__}
    cfg.update(extra)
    return cfg


def gst_overrides(instance, args) -> GstInstance:
    if not isinstance(instance, GstInstance):
        raise CliError("expected a group Steiner instance (no 'k' field)")
    changes = {}
    if getattr(args, "root", None) is not None:
        changes["root"] = args.root
    if getattr(args, "cover_threshold", None) is not None:
        changes["cover_threshold"] = args.cover_threshold
    return check(instance.replace(**changes)) if changes else instance


def node_rows(tree: SubTree, instance: GstInstance) -> list[dict]:
    deg = tree.degrees()
    return [{"node": v, "degree": deg.get(v, 0), "bound": instance.bound(v),
             "ratio": round(deg.get(v, 0) / instance.bound(v), 9),
             "groups": list(instance.node_groups[v])} for v in sorted(tree.nodes)]


NODE_COLUMNS = ["node", "degree", "bound", "ratio", "groups"]


# ------------------------------------------------ commands

def cmd_gen(args) -> None:
    params = {k: v for k, v in {
        "n": args.n, "w": args.w, "leaves": args.leaves, "groups": args.groups,
        "group_size": args.group_size, "rows": args.rows, "cols": args.cols, "k": args.k,
        "terminal_count": args.terminal_count, "root": args.root, "max_cost": args.max_cost,
    }.items() if v is not None}
    if args.unbounded:
        params["bounded"] = False
    if args.kind == "hitting-set-star":
        if args.sets is None:
            raise CliError("hitting-set-star needs --sets, e.g. '[[1,2],[2,3]]'")
        try:
            params["sets"] = json.loads(args.sets)
        except json.JSONDecodeError as exc:
            raise CliError(f"--sets is not valid JSON: {exc}") from exc
    try:
        inst = generate(args.kind, params, args.seed)
    except (KeyError, TypeError, ValueError) as exc:
        raise CliError(f"invalid parameters for {args.kind}: {exc}") from exc
    text = dumps(to_json(inst))
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_solve_tree(args) -> None:
    inst = gst_overrides(load_instance(args.instance), args)
    if not inst.graph.is_tree():
        raise CliError("solve-tree needs a tree input; use btw for general graphs")
    rng = rng_for(args.seed)
    objective = args.objective
    if objective == "auto":
        objective = "bd" if inst.bounds is not None else "md"
    cfg = base_config(args, objective=objective, iter_cap=args.iter_cap,
                      default_iter_cap=default_iteration_cap(inst), iter_cap_const=ITER_CAP_CONST,
                      degree_const=DEGREE_CONST, root=inst.root, cover_threshold=inst.cover_threshold)
    if objective == "bd":
        sol = best_root_solution(inst)
        if args.dump_lp:
            dump_lp(build_lp(inst, monotone_rows=True, root=sol.root), args.dump_lp)
        res = solve_bd_gst_tree(inst, rng, args.iter_cap, solution=sol, seed=args.seed)
        result = {"tree": tree_json(res.tree, inst.graph), "lp_objective": round(res.lp_objective, 9),
                  "lp_root": res.root, "iterations": res.iterations,
                  "max_degree_ratio": round(res.max_degree_ratio, 9),
                  "cost_ratio": round(float(res.cost) / res.lp_objective, 9) if res.lp_objective > 0 else None,
                  "covered_groups": covers(res.tree, inst), "nodes": node_rows(res.tree, inst)}
        if args.trace:
            result["trace"] = res.trace.to_json()
        tree = res.tree
    else:
        if args.dump_lp:
            root = inst.root if inst.root is not None else min(inst.groups, key=len)[0]
            dump_lp(build_lp(inst.replace(root=root), monotone_rows=True), args.dump_lp)
        tree = solve_md_gst_tree(inst, rng, args.iter_cap)
        result = {"tree": tree_json(tree, inst.graph), "covered_groups": covers(tree, inst),
                  "nodes": node_rows(tree, inst)}
    result["feasible"] = is_feasible(tree, inst)
    report = {"command": "solve-tree", "config": cfg, "instance": describe(inst), "result": result}
    emit(args, report, NODE_COLUMNS, result["nodes"])


def cmd_btw(args) -> None:
    inst = gst_overrides(load_instance(args.instance), args)
    rng = rng_for(args.seed)
    w, ci = reduce_instance(inst, args.w)
    if args.dot:
        Path(args.dot).write_text(to_dot(ci.sep_tree, ci))
    tree = solve_md_gst_btw(inst, w, rng)
    st = ci.sep_tree
    result = {"width": w, "separator_nodes": len(st.nodes), "height": st.height,
              "separators": [{"index": nd.index, "members": list(nd.members), "parent": nd.parent,
                              "level": nd.level, "leaf": nd.is_leaf} for nd in st.nodes],
              "back_edges": [list(e) for e in ci.back_edges],
              "tree": tree_json(tree, inst.graph), "feasible": is_feasible(tree, inst),
              "nodes": node_rows(tree, inst)}
    report = {"command": "btw", "config": base_config(args, w=w, requested_w=args.w, root=inst.root),
              "instance": describe(inst), "result": result}
    emit(args, report, NODE_COLUMNS, result["nodes"])


def _gst_solver(name: str, rng):
    if name == "oracle":
        return lambda gi: brute_md_gst(gi).best_tree
    if name == "btw":
        return lambda gi: solve_md_gst_btw(gi, None, rng)
    raise CliError(f"unknown solver {name!r}")


def cmd_ktree(args) -> None:
    inst = load_instance(args.instance)
    if not isinstance(inst, KTreeInstance):
        raise CliError("ktree needs an instance with 'terminals' and 'k'")
    rng = rng_for(args.seed)
    out = solve_md_ktree(inst, _gst_solver(args.solver, rng), args.mode, rng=rng, order_seed=args.order_seed)
    rows = out.rows or [{"round": i + 1, "groups": len(gi.groups), "q": gi.q}
                        for i, gi in enumerate(out.instances)]
    result = out.to_json()
    result["tree"] = tree_json(out.tree, inst.graph)
    result["rows"] = rows
    cfg = base_config(args, mode=args.mode, solver=args.solver, order_seed=args.order_seed)
    report = {"command": "ktree", "config": cfg, "instance": describe(inst), "result": result}
    cols = ["round", "a", "b", "full_bins", "degree", "terminals"] if out.rows else ["round", "groups", "q"]
    emit(args, report, cols, rows)


def cmd_oracle(args) -> None:
    inst = load_instance(args.instance)
    if isinstance(inst, KTreeInstance):
        res = brute_md_ktree(inst)
        result = {"problem": "md-ktree", "objective": res.objective, "tree": tree_json(res.best_tree),
                  "terminals": list(res.optimum_terminals)}
    else:
        inst = gst_overrides(inst, args)
        if args.min_cost:
            res = brute_min_cost_tree(inst)
            if res is None:
                raise CliError("infeasible: no subtree respects the degree bounds", EXIT_INFEASIBLE)
            c = res.objective
            result = {"problem": "bd-gst-cost", "objective": int(c) if c.denominator == 1 else str(c),
                      "tree": tree_json(res.best_tree, inst.graph)}
        else:
            res = brute_md_gst(inst)
            result = {"problem": "md-gst", "objective": res.objective, "tree": tree_json(res.best_tree)}
    report = {"command": "oracle", "config": base_config(args, min_cost=args.min_cost),
              "instance": describe(inst), "result": result}
    emit(args, report, ["problem", "objective"], [result])


def cmd_stats(args) -> None:
    inst = gst_overrides(load_instance(args.instance), args)
    if not inst.graph.is_tree():
        raise CliError("stats needs a tree input")
    rng = rng_for(args.seed)
    sol = best_root_solution(inst)
    rep = verify_fractional(sol)
    marg = edge_marginals(sol, args.trials, rng)
    probs = estimate_connect_probs(sol, inst.groups, args.trials, rng)
    spread = estimate_connect_probs(spread_solution(sol), inst.groups, args.trials, rng)
    cap = default_iteration_cap(inst) if args.iter_cap is None else args.iter_cap
    _, trace = round_to_cover(sol, rng, cap, args.seed)
    conc = degree_concentration_report(trace, sol)
    edges = [{"edge": list(e), "x": round(float(sol.x[j]), 9), "freq": round(float(marg[j]), 9)}
             for j, e in enumerate(sol.edges)]
    result = {"lp_objective": round(sol.objective, 9), "lp_root": sol.root,
              "min_group_flow": round(rep.min_group_flow, 9), "max_degree_violation": round(rep.max_degree_violation, 9),
              "edges": edges,
              "group_connect_prob": [round(float(p), 9) for p in probs],
              "spread_connect_prob": [round(float(p), 9) for p in spread],
              "iterations": trace.iterations, "trace": trace.to_json(),
              "concentration": [{"node": c.node, "case": c.case, "tau": round(c.tau, 9), "degree": c.degree,
                                 "independent_sum": c.independent_sum, "bound": c.bound,
                                 "threshold": round(c.threshold, 9), "ok": c.ok} for c in conc]}
    cfg = base_config(args, trials=args.trials, iter_cap=cap, tau_const=TAU_CONST, degree_const=DEGREE_CONST)
    report = {"command": "stats", "config": cfg, "instance": describe(inst), "result": result}
    emit(args, report, ["edge", "x", "freq"], edges)


def cmd_bench(args) -> None:
    names = list(SUITES) if args.suite == "all" else [args.suite]
    out, rows = {}, []
    for name in names:
        res = run_suite(name, args.seed, args.runs)
        out[name] = res
        rows.append({"suite": name, "passed": res["passed"], **{k: v for k, v in res["summary"].items()
                                                                   if not isinstance(v, (list, dict))}})
    cfg = base_config(args, suites=names, runs=args.runs, backend=kernels.backend())
    report = {"command": "bench", "config": cfg, "result": out}
    if args.format == "json":
        emit(args, report, [], [])
    else:
        cols = ["suite", "passed"] + sorted({k for r in rows for k in r} - {"suite", "passed"})
        emit(args, report, cols, rows)
    for r in rows:
        print(f"{r['suite']:<10} {'PASS' if r['passed'] else 'FAIL'}  " +
              "  ".join(f"{k}={v}" for k, v in r.items() if k not in ("suite", "passed")), file=sys.stderr)


# ------------------------------------------------ parser

def _nonneg(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return v


def _pos(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="steiner-degree", description="Degree-bounded group Steiner tree tools.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, fmt=True):
        sp.add_argument("--seed", type=_nonneg, default=0, help="u64 seed (default 0)")
        sp.add_argument("--out", help="write the report here instead of stdout")
        if fmt:
            sp.add_argument("--format", choices=("json", "csv"), default="json")
            sp.add_argument("--timing", action="store_true", help="add wall time (breaks byte equality)")

    g = sub.add_parser("gen", help="generate an instance file")
    g.add_argument("kind", choices=("random-tree", "bounded-tw", "star", "hitting-set-star", "grid-strip"))
    common(g, fmt=False)
    for name in ("n", "w", "leaves", "groups", "group-size", "rows", "cols", "k", "terminal-count", "max-cost"):
        g.add_argument(f"--{name}", type=_pos)
    g.add_argument("--root", type=_nonneg)
    g.add_argument("--sets", help="JSON list of sets for hitting-set-star")
    g.add_argument("--unbounded", action="store_true", help="random-tree without degree bounds")
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("solve-tree", help="LP rounding on a tree input")
    s.add_argument("instance")
    common(s)
    s.add_argument("--root", type=_nonneg)
    s.add_argument("--cover-threshold", type=_pos)
    s.add_argument("--iter-cap", type=_pos)
    s.add_argument("--objective", choices=("auto", "bd", "md"), default="auto",
                   help="bd: bicriteria with the instance bounds; md: min max degree")
    s.add_argument("--dump-lp", help="write the LP in CPLEX LP format")
    s.add_argument("--trace", action="store_true", help="include the rounding trace")
    s.set_defaults(func=cmd_solve_tree)

    b = sub.add_parser("btw", help="min-degree GST on a bounded-treewidth graph")
    b.add_argument("instance")
    common(b)
    b.add_argument("--w", type=_pos, help="separator width (default: smallest that works)")
    b.add_argument("--root", type=_nonneg)
    b.add_argument("--cover-threshold", type=_pos)
    b.add_argument("--dot", help="write the separator tree as Graphviz DOT")
    b.set_defaults(func=cmd_btw)

    k = sub.add_parser("ktree", help="min-degree Steiner k-tree via GST")
    k.add_argument("instance")
    common(k)
    k.add_argument("--mode", choices=("randomized", "derandomized"), default="randomized")
    k.add_argument("--solver", choices=("oracle", "btw"), default="oracle")
    k.add_argument("--order-seed", type=_nonneg, help="shuffle terminals before hashing")
    k.set_defaults(func=cmd_ktree)

    o = sub.add_parser("oracle", help="exact solver for small instances (n <= 16)")
    o.add_argument("instance")
    common(o)
    o.add_argument("--root", type=_nonneg)
    o.add_argument("--cover-threshold", type=_pos)
    o.add_argument("--min-cost", action="store_true", help="min-cost bounded tree (tree inputs)")
    o.set_defaults(func=cmd_oracle)

    st = sub.add_parser("stats", help="empirical rounding statistics on a tree input")
    st.add_argument("instance")
    common(st)
    st.add_argument("--root", type=_nonneg)
    st.add_argument("--cover-threshold", type=_pos)
    st.add_argument("--trials", type=_pos, default=10_000)
    st.add_argument("--iter-cap", type=_pos)
    st.set_defaults(func=cmd_stats)

    be = sub.add_parser("bench", help="run an experiment suite")
    be.add_argument("--suite", choices=("all", *SUITES), default="all")
    be.add_argument("--runs", type=_pos, help="trial count (suite default otherwise)")
    common(be)
    be.set_defaults(func=cmd_bench)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    args._start = time.perf_counter()
    try:
        pool_size()
        args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (LpInfeasible, InfeasibleError) as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (IterationCapExceeded, RoundCapExceeded) as exc:
        print(f"cap exceeded: {exc}", file=sys.stderr)
        return EXIT_CAP
    except GstSolverFailed as exc:
        cause = exc.__cause__
        if isinstance(cause, (LpInfeasible, InfeasibleError)):
            print(f"infeasible: {exc}", file=sys.stderr)
            return EXIT_INFEASIBLE
        if isinstance(cause, IterationCapExceeded):
            print(f"cap exceeded: {exc}", file=sys.stderr)
            return EXIT_CAP
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (InstanceError, OracleError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
