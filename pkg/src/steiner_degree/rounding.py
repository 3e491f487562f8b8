"""Dependent randomized rounding on trees and the solvers built on it.

Each iteration keeps edge ``e`` with probability ``x_e / x_p(e)`` and
retains only edges whose kept path reaches the root, so an edge is
connected with probability exactly ``x_e``.  Iterations repeat with fresh
randomness until enough groups are connected.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import kernels
from .instance import Edge, GstInstance, SubTree, canon, check, covers, max_degree
from .lp import FractionalSolution, build_lp, monotonize, solve_lp
from .simplex import LpInfeasible

ITER_CAP_CONST = 64
DEGREE_CONST = 40
TAU_CONST = 1.0
_BATCH = 64


class IterationCapExceeded(RuntimeError):
    pass


@dataclass
class RoundingTrace:
    seed: int | None
    root: int
    sampled: list[list[Edge]] = field(default_factory=list)
    newly_connected: list[list[int]] = field(default_factory=list)
    degree: dict[int, int] = field(default_factory=dict)
    sum_degree: dict[int, int] = field(default_factory=dict)

    @property
    def iterations(self) -> int:
        return len(self.sampled)

    def to_json(self) -> dict:
        return {
            "seed": self.seed,
            "root": self.root,
            "iterations": self.iterations,
            "sampled": [[list(e) for e in it] for it in self.sampled],
            "newly_connected": self.newly_connected,
            "degree": {str(v): d for v, d in sorted(self.degree.items())},
            "independent_sum_degree": {str(v): d for v, d in sorted(self.sum_degree.items())},
        }


@dataclass
class BicriteriaResult:
    tree: SubTree
    cost: Fraction
    degree_ratios: dict[int, float]
    iterations: int
    root: int
    lp_objective: float
    trace: RoundingTrace
    solution: FractionalSolution

    @property
    def max_degree_ratio(self) -> float:
        return max(self.degree_ratios.values(), default=0.0)


def default_iteration_cap(instance: GstInstance) -> int:
    return ITER_CAP_CONST * math.ceil(math.log2(instance.max_group_size + 2)) * math.ceil(
        math.log2(len(instance.groups) + 2))


def _membership(sol: FractionalSolution, groups) -> tuple[np.ndarray, np.ndarray]:
    n = sol.instance.graph.n
    member = np.zeros((len(groups), n), dtype=bool)
    for gi, g in enumerate(groups):
        member[gi, list(g)] = True
    root_member = member[:, sol.root].copy()
    return member, root_member


def sample_connected(sol: FractionalSolution, uniforms: np.ndarray) -> np.ndarray:
    """Boolean (trials x edges) mask of root-connected edges for pre-drawn uniforms."""
    return kernels.connect_mask(sol.parent, sol.ratios(), uniforms)


def round_once(sol: FractionalSolution, rng: np.random.Generator) -> set[Edge]:
    """One rounding pass; returns the kept edges joined to the root."""
    mask = sample_connected(sol, rng.random((1, len(sol.edges))))[0]
    return {sol.edges[j] for j in np.flatnonzero(mask)}


def edge_marginals(sol: FractionalSolution, trials: int, rng: np.random.Generator,
                   chunk: int = 20000) -> np.ndarray:
    """Empirical frequency with which each edge ends up connected to the root."""
    counts = np.zeros(len(sol.edges))
    done = 0
    while done < trials:
        t = min(chunk, trials - done)
        counts += sample_connected(sol, rng.random((t, len(sol.edges)))).sum(axis=0)
        done += t
    return counts / trials


def estimate_connect_probs(sol: FractionalSolution, groups, trials: int, rng: np.random.Generator,
                           chunk: int = 10000) -> np.ndarray:
    """Fraction of single rounding passes whose output touches each group."""
    member, root_member = _membership(sol, groups)
    hits = np.zeros(len(groups))
    done = 0
    while done < trials:
        t = min(chunk, trials - done)
        conn = sample_connected(sol, rng.random((t, len(sol.edges))))
        hits += kernels.group_hits(conn, sol.child, member, root_member).sum(axis=0)
        done += t
    return hits / trials


def estimate_connect_prob(sol: FractionalSolution, group, trials: int, rng: np.random.Generator) -> float:
    return float(estimate_connect_probs(sol, [tuple(group)], trials, rng)[0])


def prune(edges, root: int | None, instance: GstInstance) -> SubTree:
    """Drop leaves (never the root, if given) whose groups stay covered without them."""
    adj: dict[int, set[int]] = {} if root is None else {root: set()}
    for u, v in edges:
        adj.setdefault(u, set()).add(v)
        adj.setdefault(v, set()).add(u)
    hold = [0] * len(instance.groups)
    for v in adj:
        for gi in instance.node_groups[v]:
            hold[gi] += 1
    if root is None:
        held = sum(1 for h in hold if h)
        lone = [v for v in sorted(adj) if len(instance.node_groups[v]) == held]
        if lone:
            return SubTree.single(lone[0])
    changed = True
    while changed:
        changed = False
        for v in sorted(adj):
            if v == root or len(adj[v]) != 1:
                continue
            if all(hold[gi] > 1 for gi in instance.node_groups[v]):
                (u,) = adj.pop(v)
                adj[u].discard(v)
                for gi in instance.node_groups[v]:
                    hold[gi] -= 1
                changed = True
    return SubTree.from_edges({canon(u, v) for u in adj for v in adj[u]}, adj.keys())


def _candidate_roots(instance: GstInstance) -> list[int]:
    if instance.root is not None:
        return [instance.root]
    if instance.q == len(instance.groups):
        # every feasible tree meets the smallest group
        return list(min(instance.groups, key=lambda g: (len(g), g)))
    return list(range(instance.graph.n))


def fractional_solution(instance: GstInstance, root: int) -> FractionalSolution:
    model = build_lp(instance, with_degree_rows=True, monotone_rows=True, root=root)
    return monotonize(solve_lp(model))


def best_root_solution(instance: GstInstance) -> FractionalSolution:
    """LP solution at the candidate root with the smallest LP value (ties: smaller id)."""
    best = None
    for r in _candidate_roots(instance):
        try:
            sol = fractional_solution(instance, r)
        except LpInfeasible:
            continue
        if best is None or sol.objective < best.objective - 1e-12:
            best = sol
    if best is None:
        raise LpInfeasible("infeasible for every candidate root")
    return best


def round_to_cover(sol: FractionalSolution, rng: np.random.Generator, iteration_cap: int,
                   seed: int | None = None) -> tuple[set[Edge], RoundingTrace]:
    """Repeat rounding passes until ``q`` groups touch the union; returns (union, trace)."""
    inst = sol.instance
    member, root_member = _membership(sol, inst.groups)
    connected = root_member.copy()
    union: set[Edge] = set()
    trace = RoundingTrace(seed, sol.root)
    ratio = sol.ratios()
    m = len(sol.edges)
    while connected.sum() < inst.q:
        if trace.iterations >= iteration_cap:
            raise IterationCapExceeded(
                f"iteration cap exceeded ({iteration_cap}); rerun with another seed")
        batch = min(_BATCH, iteration_cap - trace.iterations)
        conn = kernels.connect_mask(sol.parent, ratio, rng.random((batch, m)))
        hits = kernels.group_hits(conn, sol.child, member, root_member)
        for t in range(batch):
            idx = np.flatnonzero(conn[t])
            new = np.flatnonzero(hits[t] & ~connected)
            connected |= hits[t]
            kept = [sol.edges[j] for j in idx]
            trace.sampled.append(kept)
            trace.newly_connected.append([int(g) for g in new])
            for u, v in kept:
                trace.sum_degree[u] = trace.sum_degree.get(u, 0) + 1
                trace.sum_degree[v] = trace.sum_degree.get(v, 0) + 1
            union.update(kept)
            if connected.sum() >= inst.q:
                break
    for u, v in union:
        trace.degree[u] = trace.degree.get(u, 0) + 1
        trace.degree[v] = trace.degree.get(v, 0) + 1
    return union, trace


def solve_bd_gst_tree(instance: GstInstance, rng: np.random.Generator, iteration_cap: int | None = None,
                      solution: FractionalSolution | None = None, seed: int | None = None) -> BicriteriaResult:
    """Bicriteria solver for degree-bounded group Steiner tree on a tree input.

    Without a given root, each candidate root is tried and the one with the
    smallest LP value wins.  The output is the pruned union of all passes.
    """
    check(instance)
    if not instance.graph.is_tree():
        raise ValueError("graph is not a tree")
    sol = solution if solution is not None else best_root_solution(instance)
    cap = default_iteration_cap(instance) if iteration_cap is None else iteration_cap
    union, trace = round_to_cover(sol, rng, cap, seed)
    tree = prune(union, sol.root, instance)
    deg = tree.degrees()
    ratios = {v: deg.get(v, 0) / instance.bound(v) for v in sorted(tree.nodes)}
    return BicriteriaResult(tree, tree.cost(instance.graph), ratios, trace.iterations,
                            sol.root, sol.objective, trace, sol)


def solve_md_gst_tree(instance: GstInstance, rng: np.random.Generator,
                      iteration_cap: int | None = None) -> SubTree:
    """Min-degree group Steiner tree on a tree input.

    Binary-searches a uniform bound ``d`` (zero costs) for the smallest value
    whose LP is feasible, rounding at every feasible probe, and returns the
    probe tree with the smallest realised max degree.
    """
    check(instance)
    g = instance.graph
    roots = _candidate_roots(instance)
    best: tuple | None = None
    for r in roots:
        if covers(SubTree.single(r), instance) >= instance.q:
            key = (0, 0, r)
            if best is None or key < best[0]:
                best = (key, SubTree.single(r))
            continue
        zero = instance.replace(graph=g.with_costs([0] * len(g.edges)), root=r)
        lo, hi = 1, max(1, g.n - 1)
        while lo <= hi:
            d = (lo + hi) // 2
            probe = zero.replace(bounds=[d] * g.n)
            try:
                sol = fractional_solution(probe, r)
            except LpInfeasible:
                lo = d + 1
                continue
            res = solve_bd_gst_tree(probe, rng, iteration_cap, solution=sol)
            key = (max_degree(res.tree), len(res.tree.edges), r)
            if best is None or key < best[0]:
                best = (key, res.tree)
            hi = d - 1
    if best is None:
        raise LpInfeasible("no feasible degree bound")
    return best[1]


@dataclass(frozen=True)
class NodeConcentration:
    node: int
    load_ratio: float       # x(delta(v)) / x_{e_v}
    tau: float
    case: str               # "high", "mid" or "low"
    degree: int
    independent_sum: int
    bound: int
    threshold: float

    @property
    def ok(self) -> bool:
        return self.degree <= self.threshold


def degree_concentration_report(trace: RoundingTrace, sol: FractionalSolution,
                                 instance: GstInstance | None = None, tau_const: float = TAU_CONST,
                                 degree_const: float = DEGREE_CONST) -> list[NodeConcentration]:
    """Label every node by its expected-degree regime and check its realised degree.

    ``tau_v = iterations * x(delta(v)) / x_{e_v}``; regimes split at 1 and at
    ``tau_const * log2 n``.  The degree threshold is ``degree_const * log2(n)^2 * b_v``.
    """
    inst = sol.instance if instance is None else instance
    n = inst.graph.n
    logn = math.log2(max(n, 2))
    load: dict[int, float] = {}
    up: dict[int, float] = {sol.root: sol.x_f}
    for j, (u, v) in enumerate(sol.edges):
        load[u] = load.get(u, 0.0) + float(sol.x[j])
        load[v] = load.get(v, 0.0) + float(sol.x[j])
        up[int(sol.child[j])] = float(sol.x[j])
    rows = []
    for v in range(n):
        ratio = load.get(v, 0.0) / up[v] if up.get(v, 0.0) > 0 else 0.0
        tau = trace.iterations * ratio
        case = "high" if tau >= tau_const * logn else ("mid" if tau >= 1 else "low")
        b = inst.bound(v)
        rows.append(NodeConcentration(v, ratio, tau, case, trace.degree.get(v, 0),
                                      trace.sum_degree.get(v, 0), b, degree_const * logn ** 2 * b))
    return rows
