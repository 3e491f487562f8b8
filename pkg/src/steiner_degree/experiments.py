"""Seeded experiment suites behind ``bench`` and the acceptance tests.

Every suite is a list of independent trials.  Trial ``i`` draws its
randomness from ``rng_for(seed, suite_id, i)``, so results do not depend on
how trials are scheduled; the pool merges them back by trial index.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from functools import partial
from typing import Callable

import numpy as np

from .generators import (balanced_binary_tree, bounded_tw_graph, planted_bounds, random_groups,
                         random_tree, random_tree_instance, rng_for)
from .instance import GstInstance, KTreeInstance, SubTree, check, covers, is_feasible, max_degree
from .ktree import find_prime, full_bins_exists, residue_counts, solve_md_ktree
from .lp import build_lp, group_flows, integral_point, min_cut_values, row_activity, solve_lp
from .oracle import brute_md_gst, brute_md_ktree, brute_min_cost_tree
from .rounding import (DEGREE_CONST, ITER_CAP_CONST, IterationCapExceeded, degree_concentration_report,
                       edge_marginals, estimate_connect_probs, fractional_solution, solve_bd_gst_tree)
from .treewidth import (BackEdgeViolation, balance_limit, build_separator_tree, connect_separators, contract,
                        height_bound, reduce_instance, rewire_back_edges, solve_md_gst_btw)

THREADS_ENV = "STEINER_DEGREE_THREADS"
TOL = 1e-6


def pool_size() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise ValueError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None


def run_trials(fn: Callable[[int, int], dict], seed: int, count: int) -> list[dict]:
    """Run ``fn(seed, i)`` for ``i < count``; rows come back ordered by ``i``."""
    workers = min(pool_size(), count)
    if workers <= 1:
        return [fn(seed, i) for i in range(count)]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(partial(_call, fn, seed), range(count)))


def _call(fn, seed, i):
    return fn(seed, i)


def _check(passed: bool, value, threshold) -> dict:
    return {"passed": bool(passed), "value": value, "threshold": threshold}


def _round(x: float, nd: int = 9) -> float:
    return float(round(float(x), nd)) + 0.0


def _log2c(x: int) -> int:
    return math.ceil(math.log2(x))


# ------------------------------------------------ 1. LP soundness

def _lp_trial(seed: int, i: int) -> dict:
    rng = rng_for(seed, 1, i)
    n = int(rng.integers(4, 13))
    inst = random_tree_instance(n, int(rng.integers(1, 5)), 3, rng, bounded=True)
    opt = brute_min_cost_tree(inst)
    plain = solve_lp(build_lp(inst, monotone_rows=False))
    mono = solve_lp(build_lp(inst, monotone_rows=True))
    row = {"trial": i, "n": n, "groups": len(inst.groups), "lp": _round(plain.objective),
           "lp_monotone": _round(mono.objective), "opt": None, "violation": False, "row_residual": 0.0}
    if opt is not None:
        o = float(opt.objective)
        row["opt"] = _round(o)
        row["violation"] = plain.objective > o + TOL or mono.objective > o + TOL
        model = build_lp(inst, monotone_rows=True)
        ub, eq = row_activity(model, integral_point(model, opt.best_tree.edges))
        row["row_residual"] = _round(max(0.0, ub.max(initial=0.0), np.abs(eq).max(initial=0.0)))
    return row


def suite_lp(seed: int = 0, count: int = 200) -> dict:
    rows = run_trials(_lp_trial, seed, count)
    bad = sum(r["violation"] for r in rows)
    resid = max(r["row_residual"] for r in rows)
    return {"rows": rows,
            "summary": {"violations": bad, "max_integral_row_residual": resid,
                        "mean_gap": _round(np.mean([r["opt"] - r["lp"] for r in rows if r["opt"] is not None]))},
            "checks": {"lp_below_opt": _check(bad == 0, bad, 0),
                       "integral_points_feasible": _check(resid <= TOL, resid, TOL)}}


# ------------------------------------------------ 2. cut / flow

def _cutflow_trial(seed: int, i: int) -> dict:
    rng = rng_for(seed, 2, i)
    n = int(rng.integers(3, 12))
    graph = random_tree(n, rng, 10)
    inst = check(GstInstance.build(graph, random_groups(n, int(rng.integers(1, 4)), 3, rng, exclude=(0,)), 0))
    base = solve_lp(build_lp(inst, with_degree_rows=False))
    xs = [base.x]
    for _ in range(4):
        x = rng.random(len(base.x))
        xs.append(x)
        xs.append(np.clip(x * rng.uniform(0.3, 1.5), 0.0, 1.0))
    worst, disagree = 0.0, 0
    for x in xs:
        sol = base.with_x(np.asarray(x, dtype=float))
        flows, cuts = group_flows(sol), min_cut_values(sol)
        for f, c in zip(flows, cuts):
            worst = max(worst, abs(f - c))
            if (f >= 1 - TOL) != (c >= 1 - TOL):
                disagree += 1
    return {"trial": i, "edges": n - 1, "vectors": len(xs), "max_abs_diff": _round(worst, 12),
            "disagreements": disagree}


def suite_cutflow(seed: int = 0, count: int = 50) -> dict:
    rows = run_trials(_cutflow_trial, seed, count)
    bad = sum(r["disagreements"] + (r["max_abs_diff"] > TOL) for r in rows)
    return {"rows": rows,
            "summary": {"violations": bad, "max_abs_diff": max(r["max_abs_diff"] for r in rows)},
            "checks": {"cut_flow_agree": _check(bad == 0, bad, 0)}}


# ------------------------------------------------ 3. rounding marginals

MARGINAL_FACTORS = (0.9, 0.55, 0.75, 0.35, 0.6, 0.8, 0.45)


def marginal_instance():
    """Depth-3 binary tree with a fixed monotone fractional ``x``."""
    g = balanced_binary_tree(3)
    inst = check(GstInstance.build(g, [list(range(7, 15))], 0))
    sol = solve_lp(build_lp(inst, with_degree_rows=False))
    x = np.zeros(len(sol.edges))
    for j in range(len(sol.edges)):
        up = x[sol.parent[j]] if sol.parent[j] >= 0 else 1.0
        x[j] = up * MARGINAL_FACTORS[j % len(MARGINAL_FACTORS)]
    return sol.with_x(x)


def suite_marginals(seed: int = 0, trials: int = 100_000) -> dict:
    sol = marginal_instance()
    freq = edge_marginals(sol, trials, rng_for(seed, 3))
    rows = []
    for j, e in enumerate(sol.edges):
        x = float(sol.x[j])
        tol = 3 * math.sqrt(x * (1 - x) / trials) + 1e-3
        rows.append({"edge": list(e), "x": _round(x), "freq": _round(freq[j]),
                     "abs_err": _round(abs(freq[j] - x)), "tolerance": _round(tol),
                     "ok": bool(abs(freq[j] - x) <= tol)})
    bad = sum(not r["ok"] for r in rows)
    return {"rows": rows, "summary": {"edges": len(rows), "outside": bad, "trials": trials},
            "checks": {"marginals_within_3sigma": _check(bad == 0, bad, 0)}}


# ------------------------------------------------ 4. connection probability

CONNECT_SIZES = (8, 16, 32, 64)


def spread_solution(sol):
    """Feasible monotone ``x`` splitting each group's unit flow evenly over its members:
    ``x_e = max_g |g below e| / |g|``."""
    inst = sol.instance
    best = np.zeros(len(sol.edges))
    for grp in inst.groups:
        below = np.zeros(inst.graph.n)
        below[list(grp)] = 1.0 / len(grp)
        for j in reversed(range(len(sol.edges))):
            c = int(sol.child[j])
            u, v = sol.edges[j]
            below[u if v == c else v] += below[c]
        best = np.maximum(best, below[sol.child])
    return sol.with_x(np.minimum(best, 1.0))


def _connect_trial(seed: int, i: int, trials: int = 10_000) -> dict:
    rng = rng_for(seed, 4, i)
    N = CONNECT_SIZES[i % len(CONNECT_SIZES)]
    n = 3 * N + 1
    graph = random_tree(n, rng, 10)
    groups = [sorted(int(v) for v in rng.choice(np.arange(1, n), size=N, replace=False)) for _ in range(4)]
    inst = check(GstInstance.build(graph, groups, 0))
    sol = fractional_solution(inst, 0)
    spread = spread_solution(sol)
    need = 0.1 / math.log2(N)
    row = {"trial": i, "N": N, "n": n, "lp": _round(sol.objective), "threshold": _round(need), "pairs": 4}
    for key, s in (("lp", sol), ("spread", spread)):
        probs = estimate_connect_probs(s, inst.groups, trials, rng)
        row[f"{key}_probs"] = [_round(p) for p in probs]
        row[f"{key}_passing"] = int(sum(p >= need for p in probs))
        row[f"{key}_min_flow"] = _round(min(group_flows(s)))
    return row


def suite_connect(seed: int = 0, count: int = 20, trials: int = 10_000) -> dict:
    rows = run_trials(partial(_connect_trial, trials=trials), seed, count)
    total = sum(r["pairs"] for r in rows)
    summary, checks = {"pairs": total}, {}
    for key in ("lp", "spread"):
        ok = sum(r[f"{key}_passing"] for r in rows)
        frac = _round(ok / total)
        summary[f"{key}_passing"] = ok
        summary[f"{key}_min_prob"] = min(min(r[f"{key}_probs"]) for r in rows)
        summary[f"{key}_min_ratio_to_threshold"] = _round(min(min(r[f"{key}_probs"]) / r["threshold"] for r in rows))
        checks[f"connection_probability_{key}"] = _check(frac >= 0.95, frac, 0.95)
    return {"rows": rows, "summary": summary, "checks": checks}


# ------------------------------------------------ 5. bicriteria rounding on trees

def bicriteria_instance(rng: np.random.Generator, n: int = 200, n_groups: int = 8) -> GstInstance:
    graph = random_tree(n, rng, 10)
    groups = []
    for _ in range(n_groups):
        size = int(rng.integers(2, 9))
        groups.append(sorted(int(v) for v in rng.choice(np.arange(1, n), size=size, replace=False)))
    bounds = planted_bounds(graph, 0, groups, rng)
    return check(GstInstance.build(graph, groups, 0, bounds))


def _bicriteria_trial(seed: int, i: int) -> dict:
    rng = rng_for(seed, 5, i)
    inst = bicriteria_instance(rng)
    n, N, S = inst.graph.n, inst.max_group_size, len(inst.groups)
    row = {"trial": i, "n": n, "N": N, "groups": S, "iter_limit": ITER_CAP_CONST * _log2c(N) * _log2c(S),
           "degree_limit": _round(DEGREE_CONST * math.log2(n) ** 2)}
    try:
        res = solve_bd_gst_tree(inst, rng, seed=seed)
    except IterationCapExceeded:
        row.update(ok=False, capped=True)
        return row
    conc = degree_concentration_report(res.trace, res.solution)
    row.update(ok=True, capped=False, cost=str(res.cost), lp=_round(res.lp_objective),
               cost_ratio=_round(float(res.cost) / res.lp_objective), iterations=res.iterations,
               max_degree_ratio=_round(res.max_degree_ratio), max_degree=max_degree(res.tree),
               concentration_violations=_round(sum(not c.ok for c in conc) / n),
               cases={c: sum(r.case == c for r in conc) for c in ("high", "mid", "low")},
               feasible=covers(res.tree, inst) >= inst.q and res.tree.is_tree())
    return row


def suite_theorem3(seed: int = 0, count: int = 100) -> dict:
    rows = run_trials(_bicriteria_trial, seed, count)
    done = [r for r in rows if r["ok"]]
    deg_ok = sum(r["max_degree_ratio"] <= r["degree_limit"] and r["feasible"] for r in done)
    it_ok = sum(r["iterations"] <= r["iter_limit"] for r in done)
    mean_ratio = _round(np.mean([r["cost_ratio"] for r in done])) if done else float("inf")
    ratio_limit = 16 * max(_log2c(r["N"]) * _log2c(r["groups"]) for r in rows)
    conc = _round(np.mean([r["concentration_violations"] for r in done])) if done else 1.0
    n = rows[0]["n"]
    need_deg, need_it = math.ceil(0.99 * count), math.ceil(0.95 * count)
    return {"rows": rows,
            "summary": {"runs": count, "completed": len(done), "mean_cost_ratio": mean_ratio,
                        "max_cost_ratio": max((r["cost_ratio"] for r in done), default=None),
                        "max_degree_ratio": max((r["max_degree_ratio"] for r in done), default=None),
                        "max_iterations": max((r["iterations"] for r in done), default=None),
                        "mean_concentration_violations": conc},
            "checks": {"degree_bound": _check(deg_ok >= need_deg, deg_ok, need_deg),
                       "iterations": _check(it_ok >= need_it, it_ok, need_it),
                       "mean_cost_ratio": _check(mean_ratio <= ratio_limit, mean_ratio, ratio_limit),
                       "concentration": _check(conc <= 1 / n, conc, _round(1 / n))}}


# ------------------------------------------------ 6. two-point sampling

def pair_probabilities(k: int, p: int) -> np.ndarray:
    """Exact ``P[i, i2 both in bin j]`` over all ``(a, b)``: array ``[i, i2, j]`` for ``i, i2 < p``."""
    a = np.arange(1, p)[:, None, None]
    b = np.arange(p)[None, :, None]
    i = np.arange(p)[None, None, :]
    bins = ((a * i + b) % p) % k                       # (a, b, i)
    flat = bins.reshape(-1, p)
    out = np.zeros((p, p, k))
    for j in range(k):
        hit = (flat == j).astype(np.int64)
        out[:, :, j] = hit.T @ hit
    return out / (p * (p - 1))


def suite_twopoint(seed: int = 0, k_max: int = 64, pair_k_max: int = 8, samples: int = 100,
                   k_full: int = 16) -> dict:
    rows = []
    low_viol = upper_excess = 0
    for k in range(1, k_max + 1):
        p = find_prime(k)
        counts = residue_counts(k, p)
        probs = [Fraction(c, p) for c in counts]
        lower = Fraction(1, k) - Fraction(2, p)
        lv = sum(pr < lower for pr in probs)
        ue = sum(pr >= Fraction(1, k) for pr in probs)
        low_viol += lv
        upper_excess += ue
        rows.append({"k": k, "p": p, "min_prob": str(min(probs)), "max_prob": str(max(probs)),
                     "lower_bound": str(lower), "below_lower": lv, "at_least_1_over_k": ue})
    pair_viol = pair_formula = 0
    pair_rows = []
    for k in range(1, pair_k_max + 1):
        p = find_prime(k)
        pp = pair_probabilities(k, p)
        iu = ~np.eye(p, dtype=bool)
        worst = float(pp[iu].max())
        bound = (1 / k + 1 / p) ** 2
        counts = np.array(residue_counts(k, p))
        exact = counts * (counts - 1) / (p * (p - 1))
        pair_formula += int(np.abs(pp[iu] - exact[None, :]).max() > 1e-12)
        pair_viol += int(worst > bound + 1e-12)
        pair_rows.append({"k": k, "p": p, "max_pair_prob": _round(worst), "bound": _round(bound),
                          "one_over_k_sq": _round(1 / k ** 2)})
    rng = rng_for(seed, 6)
    p = find_prime(k_full)
    need = math.ceil(k_full / 3)
    full_rows = []
    for s in range(samples):
        r_star = sorted(int(v) for v in rng.choice(4 * k_full, size=k_full, replace=False))
        a, b, full = full_bins_exists(r_star, k_full, p)
        full_rows.append({"sample": s, "a": a, "b": b, "full_bins": full})
    full_ok = sum(r["full_bins"] >= need for r in full_rows)
    return {"rows": rows, "pair_rows": pair_rows, "full_rows": full_rows,
            "summary": {"lower_violations": low_viol, "bins_at_least_1_over_k": upper_excess,
                        "pair_bound_violations": pair_viol, "pair_formula_mismatch": pair_formula,
                        "full_bin_successes": full_ok},
            "checks": {"bin_lower_bound": _check(low_viol == 0, low_viol, 0),
                       "pair_bound": _check(pair_viol == 0 and pair_formula == 0, pair_viol + pair_formula, 0),
                       "full_bins": _check(full_ok == samples, full_ok, samples)}}


# ------------------------------------------------ 7. k-tree pipeline

def ktree_instance(rng: np.random.Generator, n_max: int = 12) -> KTreeInstance:
    n = int(rng.integers(6, n_max + 1))
    graph = bounded_tw_graph(n, int(rng.integers(1, 4)), rng, drop=0.5)
    size = int(rng.integers(max(2, n // 2), n + 1))
    terms = sorted(int(v) for v in rng.choice(n, size=size, replace=False))
    return check(KTreeInstance.build(graph, terms, int(rng.integers(1, size + 1))))


def oracle_gst(instance: GstInstance) -> SubTree:
    return brute_md_gst(instance).best_tree


def _ktree_trial(seed: int, i: int, mode: str = "randomized") -> dict:
    rng = rng_for(seed, 7, i)
    inst = ktree_instance(rng)
    opt = brute_md_ktree(inst)
    out = solve_md_ktree(inst, oracle_gst, mode, rng=rng)
    limit = 8 * _log2c(inst.k + 2) * opt.objective
    return {"trial": i, "n": inst.graph.n, "terminals": len(inst.terminals), "k": inst.k,
            "oracle_degree": opt.objective, "degree": out.degree, "rounds": out.rounds,
            "found": len(out.terminals), "limit": limit,
            "ratio_log_k": _round(out.degree / (max(opt.objective, 1) * math.log2(inst.k + 2))),
            "ratio_log_n": _round(out.degree / (max(opt.objective, 1) * math.log2(max(inst.graph.n, 2)))),
            "ok_terminals": len(out.terminals) >= inst.k and out.tree.is_tree() and out.tree.in_graph(inst.graph),
            "ok_degree": out.degree <= limit}


def suite_theorem1(seed: int = 0, count: int = 100, mode: str = "randomized") -> dict:
    rows = run_trials(partial(_ktree_trial, mode=mode), seed, count)
    term_ok = sum(r["ok_terminals"] for r in rows)
    deg_ok = sum(r["ok_degree"] for r in rows)
    need = math.ceil(0.95 * count)
    return {"rows": rows,
            "summary": {"runs": count, "terminal_successes": term_ok, "degree_successes": deg_ok,
                        "max_ratio": max(r["degree"] / max(r["oracle_degree"], 1) for r in rows)},
            "checks": {"k_terminals": _check(term_ok == count, term_ok, count),
                       "degree_ratio": _check(deg_ok >= need, deg_ok, need)}}


# ------------------------------------------------ 8. separator pipeline

def edge_degree(edge_sets) -> dict[int, int]:
    deg: dict[int, int] = {}
    for e in set().union(*map(set, edge_sets)) if edge_sets else ():
        for v in e:
            deg[v] = deg.get(v, 0) + 1
    return deg


def _separator_trial(seed: int, i: int) -> dict:
    rng = rng_for(seed, 8, i)
    w = 1 + i % 3
    n = int(rng.integers(10, 61))
    g = bounded_tw_graph(n, w, rng)
    st = build_separator_tree(g, w)
    size_bad = sum(len(nd.members) > w + 1 for nd in st.nodes if not nd.is_leaf)
    size_bad += sum(len(nd.members) > st.leaf_threshold for nd in st.nodes if nd.is_leaf)
    comp_bad = 0
    for nd in st.nodes:
        if nd.is_leaf:
            continue
        lim = balance_limit(len(nd.region))
        rest = set(nd.region) - set(nd.members)
        comp_bad += sum(len(c) > lim for c in g.induced_components(rest))
    e_prime = connect_separators(g, st)
    deg = edge_degree(list(e_prime.values()))
    deg_limit = 2 * (w + 1) * st.levels
    deg_bad = sum(d > deg_limit for d in deg.values())
    try:
        contract(g, st, e_prime, [[0]])
        back_bad = 0
    except BackEdgeViolation:
        back_bad = 1
    return {"trial": i, "n": n, "w": w, "nodes": len(st.nodes), "height": st.height,
            "height_limit": height_bound(n), "max_separator": max(len(nd.members) for nd in st.nodes),
            "max_e_prime_degree": max(deg.values(), default=0), "degree_limit": deg_limit,
            "size_violations": size_bad, "component_violations": comp_bad,
            "height_violation": int(st.height > height_bound(n)), "degree_violations": deg_bad,
            "back_edge_violation": back_bad}


def suite_separator(seed: int = 0, count: int = 200) -> dict:
    rows = run_trials(_separator_trial, seed, count)
    tot = {k: sum(r[k] for r in rows) for k in ("size_violations", "component_violations",
                                               "height_violation", "degree_violations",
                                               "back_edge_violation")}
    return {"rows": rows,
            "summary": dict(tot, max_height=max(r["height"] for r in rows),
                            max_e_prime_degree=max(r["max_e_prime_degree"] for r in rows)),
            "checks": {k: _check(v == 0, v, 0) for k, v in tot.items()}}


# ------------------------------------------------ 9. bounded treewidth end to end

def btw_instance(rng: np.random.Generator, n_max: int = 14, w_max: int = 2) -> tuple[GstInstance, int]:
    w = int(rng.integers(1, w_max + 1))
    n = int(rng.integers(6, n_max + 1))
    g = bounded_tw_graph(n, w, rng)
    groups = random_groups(n, int(rng.integers(2, 5)), 3, rng)
    return check(GstInstance.build(g, groups)), w


def _btw_trial(seed: int, i: int) -> dict:
    rng = rng_for(seed, 9, i)
    inst, w = btw_instance(rng)
    opt = brute_md_gst(inst)
    tree = solve_md_gst_btw(inst, w, rng)
    n = inst.graph.n
    limit = DEGREE_CONST * math.log2(n) ** 3 * opt.objective
    d = max_degree(tree)
    feas = is_feasible(tree, inst) and tree.in_graph(inst.graph)
    return {"trial": i, "n": n, "w": w, "oracle_degree": opt.objective, "degree": d,
            "limit": _round(limit), "feasible": bool(feas), "ok_degree": d <= limit}


def suite_theorem2(seed: int = 0, count: int = 50) -> dict:
    rows = run_trials(_btw_trial, seed, count)
    feas = sum(r["feasible"] for r in rows)
    deg = sum(r["ok_degree"] for r in rows)
    need = math.ceil(0.96 * count)
    return {"rows": rows,
            "summary": {"runs": count, "feasible": feas, "degree_successes": deg,
                        "max_ratio": _round(max(r["degree"] / max(r["oracle_degree"], 1) for r in rows))},
            "checks": {"feasible": _check(feas == count, feas, count),
                       "degree_ratio": _check(deg >= need, deg, need)}}


# ------------------------------------------------ 10. rewiring

def _rewire_trial(seed: int, i: int) -> dict:
    rng = rng_for(seed, 10, i)
    inst, w = btw_instance(rng, n_max=12)
    _, ci = reduce_instance(inst, w)
    gp = ci.graph_instance()
    opt = brute_md_gst(gp)
    d_in = opt.objective
    out = rewire_back_edges(opt.best_tree.edges, ci)
    if not out.edges:
        out = SubTree.from_edges((), opt.best_tree.nodes)
    levels = ci.sep_tree.levels
    deg_in, deg_out = opt.best_tree.degrees(), out.degrees()
    limit = 2 * (w + 1) * levels * d_in
    worst = max((deg_out.get(v, 0) - deg_in.get(v, 0) for v in out.nodes), default=0)
    in_tprime = all(ci.t_prime.has_edge(u, v) for u, v in out.edges)
    return {"trial": i, "n": inst.graph.n, "w": w, "supernodes": gp.graph.n,
            "back_edges_used": sum(not ci.t_prime.has_edge(u, v) for u, v in opt.best_tree.edges),
            "d_in": d_in, "max_increase": worst, "limit": limit, "in_t_prime": in_tprime,
            "is_tree": out.is_tree(), "covers": covers(out, gp) >= gp.q,
            "ok": in_tprime and out.is_tree() and covers(out, gp) >= gp.q and worst <= limit}


def suite_rewire(seed: int = 0, count: int = 50) -> dict:
    rows = run_trials(_rewire_trial, seed, count)
    bad = sum(not r["ok"] for r in rows)
    return {"rows": rows,
            "summary": {"runs": count, "violations": bad,
                        "with_back_edges": sum(r["back_edges_used"] > 0 for r in rows),
                        "max_increase": max(r["max_increase"] for r in rows)},
            "checks": {"rewire": _check(bad == 0, bad, 0)}}


SUITES: dict[str, Callable[..., dict]] = {
    "lp": suite_lp,
    "cutflow": suite_cutflow,
    "marginals": suite_marginals,
    "connect": suite_connect,
    "theorem3": suite_theorem3,
    "twopoint": suite_twopoint,
    "theorem1": suite_theorem1,
    "separator": suite_separator,
    "theorem2": suite_theorem2,
    "rewire": suite_rewire,
}

# keyword naming the size parameter of each suite (``--runs`` on the CLI)
RUNS_PARAM = {"lp": "count", "cutflow": "count", "marginals": "trials", "connect": "count",
              "theorem3": "count", "twopoint": "samples", "theorem1": "count", "separator": "count",
              "theorem2": "count", "rewire": "count"}


def run_suite(name: str, seed: int = 0, runs: int | None = None, **kwargs) -> dict:
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    if runs is not None:
        kwargs[RUNS_PARAM[name]] = runs
    out = SUITES[name](seed=seed, **kwargs)
    out["passed"] = all(c["passed"] for c in out["checks"].values())
    return out
