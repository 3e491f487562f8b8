"""Flow form of the group-cut LP on a rooted tree, with degree rows.

For every group one unit of flow leaves the root and reaches an auxiliary
sink hooked to all group members; edge capacities are the ``x`` values.
By max-flow/min-cut this is exactly the family ``x(delta(A)) >= 1`` over
cuts separating the root from the group.  On a tree every useful flow path
runs downward, so only downward arcs are modelled.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from pathlib import Path

import numpy as np
from scipy import sparse
from scipy.optimize import linprog

from .instance import Edge, GstInstance, InstanceError, RootedTree, canon
from .simplex import LpInfeasible, solve_general

SOLVER_TOL = 1e-9
VERIFY_TOL = 1e-6


class MonotonizationError(RuntimeError):
    """Clamping ``x_e <= x_p(e)`` lost group connectivity; carries the instance."""

    def __init__(self, message, instance):
        super().__init__(message)
        self.instance = instance


@dataclass
class LpModel:
    instance: GstInstance
    tree: RootedTree
    edges: tuple[Edge, ...]          # top-down, edge j is the parent edge of child[j]
    child: np.ndarray
    parent: np.ndarray               # index of parent edge, -1 at the root
    names: list[str]
    c: np.ndarray
    A_ub: sparse.csr_matrix
    b_ub: np.ndarray
    A_eq: sparse.csr_matrix
    b_eq: np.ndarray
    upper: np.ndarray
    row_names_ub: list[str] = field(default_factory=list)
    row_names_eq: list[str] = field(default_factory=list)

    @property
    def n_edges(self) -> int:
        return len(self.edges)


@dataclass(frozen=True, eq=False)
class FractionalSolution:
    instance: GstInstance
    root: int
    edges: tuple[Edge, ...]
    child: np.ndarray
    parent: np.ndarray
    x: np.ndarray
    objective: float
    x_f: float = 1.0

    def as_dict(self) -> dict[Edge, float]:
        return {e: float(v) for e, v in zip(self.edges, self.x)}

    def parent_value(self, j: int) -> float:
        p = self.parent[j]
        return self.x_f if p < 0 else float(self.x[p])

    def ratios(self) -> np.ndarray:
        """``x_e / x_p(e)`` with 0/0 read as 0."""
        px = np.where(self.parent < 0, self.x_f, self.x[np.maximum(self.parent, 0)])
        with np.errstate(divide="ignore", invalid="ignore"):
            r = np.where(px > 0, self.x / px, 0.0)
        return np.clip(r, 0.0, 1.0)

    def with_x(self, x: np.ndarray) -> "FractionalSolution":
        costs = _edge_costs(self.instance, self.edges)
        return FractionalSolution(self.instance, self.root, self.edges, self.child, self.parent,
                                  x, float(costs @ x), self.x_f)


def _edge_costs(instance: GstInstance, edges) -> np.ndarray:
    return np.array([float(instance.graph.cost(u, v)) for u, v in edges], dtype=float)


def _layout(instance: GstInstance, root: int):
    tree = RootedTree.of(instance.graph, root)
    order = tree.order[1:]
    index = {v: j for j, v in enumerate(order)}
    edges = tuple(tree.parent_edge(v) for v in order)
    child = np.array(order, dtype=np.int64)
    parent = np.array([index.get(tree.parent[v], -1) for v in order], dtype=np.int64)
    return tree, edges, child, parent, index


def build_lp(instance: GstInstance, with_degree_rows: bool = True, monotone_rows: bool = False,
             root: int | None = None) -> LpModel:
    """Assemble the flow LP for a tree instance.

    Variables: ``x_j`` per edge, then per group a downward flow per edge and
    a sink arc per member.  Degree rows read ``x(delta(v)) - b_v x_{e_v} <= 0``
    (``x_{e_v}`` is the constant 1 at the root).  ``monotone_rows`` adds the
    valid inequalities ``x_e <= x_p(e)``.
    """
    root = instance.root if root is None else root
    if root is None:
        raise InstanceError(["root missing"])
    if not instance.graph.is_tree():
        raise InstanceError(["graph is not a tree"])
    tree, edges, child, parent, index = _layout(instance, root)
    m = len(edges)
    names = [f"x_{u}_{v}" for u, v in edges]
    ub_rows, ub_rhs, ub_names = [], [], []
    eq_rows, eq_rhs, eq_names = [], [], []
    nvar = m
    kids = {v: [index[c] for c in tree.children[v]] for v in tree.order}

    for gi, grp in enumerate(instance.groups):
        fbase = nvar
        names += [f"f{gi}_{u}_{v}" for u, v in edges]
        nvar += m
        sink = {}
        for v in grp:
            sink[v] = nvar
            names.append(f"s{gi}_{v}")
            nvar += 1
        for v in tree.order:
            row = {}
            for j in kids[v]:
                row[fbase + j] = 1.0
            if v in sink:
                row[sink[v]] = 1.0
            if v == root:
                eq_rows.append(row)
                eq_rhs.append(1.0)
            else:
                row[fbase + index[v]] = -1.0
                eq_rows.append(row)
                eq_rhs.append(0.0)
            eq_names.append(f"flow{gi}_{v}")
        for j in range(m):
            ub_rows.append({fbase + j: 1.0, j: -1.0})
            ub_rhs.append(0.0)
            ub_names.append(f"cap{gi}_{j}")

    if with_degree_rows and instance.bounds is not None:
        for v in tree.order:
            b = instance.bounds[v]
            row = {j: 1.0 for j in kids[v]}
            if v == root:
                ub_rows.append(row)
                ub_rhs.append(float(b))
            else:
                row[index[v]] = 1.0 - b
                ub_rows.append(row)
                ub_rhs.append(0.0)
            ub_names.append(f"deg_{v}")
    if monotone_rows:
        for j in range(m):
            if parent[j] >= 0:
                ub_rows.append({j: 1.0, int(parent[j]): -1.0})
                ub_rhs.append(0.0)
                ub_names.append(f"mono_{j}")

    c = np.zeros(nvar)
    c[:m] = _edge_costs(instance, edges)
    upper = np.full(nvar, np.inf)
    upper[:m] = 1.0
    return LpModel(instance, tree, edges, child, parent, names, c,
                   _to_csr(ub_rows, nvar), np.array(ub_rhs), _to_csr(eq_rows, nvar), np.array(eq_rhs),
                   upper, ub_names, eq_names)


def _to_csr(rows, ncols) -> sparse.csr_matrix:
    data, ri, ci = [], [], []
    for i, row in enumerate(rows):
        for j, v in sorted(row.items()):
            ri.append(i)
            ci.append(j)
            data.append(v)
    return sparse.csr_matrix((data, (ri, ci)), shape=(len(rows), ncols))


def solve_lp(model: LpModel, method: str = "highs") -> FractionalSolution:
    """Optimal ``x`` for the model.

    ``method="highs"`` runs HiGHS dual simplex at 1e-9 tolerances;
    ``method="exact"`` runs the rational Bland's-rule simplex (small models).
    Raises ``LpInfeasible`` when the degree rows leave no feasible point.
    """
    m = model.n_edges
    if method == "exact":
        ub = model.A_ub.toarray()
        eq = model.A_eq.toarray()
        to_q = lambda a: [Fraction(float(v)).limit_denominator() for v in a]
        sol = solve_general(to_q(model.c), [to_q(r) for r in ub], to_q(model.b_ub),
                            [to_q(r) for r in eq], to_q(model.b_eq),
                            [None if np.isinf(u) else Fraction(int(u)) for u in model.upper])
        x = np.array([float(v) for v in sol.x[:m]])
        objective = float(sol.objective)
    else:
        res = linprog(model.c, A_ub=model.A_ub if model.A_ub.shape[0] else None,
                      b_ub=model.b_ub if model.A_ub.shape[0] else None,
                      A_eq=model.A_eq if model.A_eq.shape[0] else None,
                      b_eq=model.b_eq if model.A_eq.shape[0] else None,
                      bounds=list(zip(np.zeros(len(model.c)), model.upper)),
                      method="highs-ds",
                      options={"primal_feasibility_tolerance": SOLVER_TOL,
                               "dual_feasibility_tolerance": SOLVER_TOL})
        if res.status == 2:
            raise LpInfeasible("infeasible")
        if res.status != 0:
            raise RuntimeError(f"LP solver failed: {res.message}")
        x = np.clip(res.x[:m], 0.0, 1.0) + 0.0
        objective = float(res.fun)
    return FractionalSolution(model.instance, model.tree.root, model.edges, model.child,
                              model.parent, x, objective)


def monotonize(sol: FractionalSolution) -> FractionalSolution:
    """Clamp ``x_e <= x_p(e)`` from the root down, then re-check every group's flow."""
    x = sol.x.copy()
    for j in range(len(x)):
        p = sol.parent[j]
        cap = sol.x_f if p < 0 else x[p]
        if x[j] > cap:
            x[j] = cap
    if np.array_equal(x, sol.x):
        return sol
    out = sol.with_x(x)
    before = group_flows(sol)
    after = group_flows(out)
    broken = [g for g, (a, b) in enumerate(zip(before, after)) if a >= 1 - VERIFY_TOL and b < 1 - VERIFY_TOL]
    if broken:
        raise MonotonizationError(f"monotonization broke feasibility for groups {broken}", sol.instance)
    return out


def group_flows(sol: FractionalSolution) -> list[float]:
    """Max flow from the root to each group under capacities ``x`` (dummy root edge caps it at ``x_f``)."""
    inst = sol.instance
    m = len(sol.edges)
    kids: dict[int, list[int]] = {}
    for j in range(m):
        pnode = sol.root if sol.parent[j] < 0 else int(sol.child[sol.parent[j]])
        kids.setdefault(pnode, []).append(j)
    order = [sol.root] + [int(v) for v in sol.child]
    out = []
    for grp in inst.groups:
        members = set(grp)
        reach: dict[int, float] = {}
        for v in reversed(order):
            if v in members:
                reach[v] = np.inf
            else:
                reach[v] = sum(min(float(sol.x[j]), reach[int(sol.child[j])]) for j in kids.get(v, ()))
        out.append(float(min(sol.x_f, reach[sol.root])))
    return out


@dataclass(frozen=True)
class FractionalReport:
    group_flows: tuple[float, ...]
    min_group_flow: float
    max_degree_violation: float
    max_monotone_violation: float

    @property
    def feasible(self) -> bool:
        return self.min_group_flow >= 1 - VERIFY_TOL and self.max_degree_violation <= VERIFY_TOL


def degree_residuals(sol: FractionalSolution, bounds=None) -> dict[int, float]:
    """``x(delta(v)) - b_v x_{e_v}`` per node (positive means violated)."""
    inst = sol.instance
    bounds = inst.bounds if bounds is None else bounds
    if bounds is None:
        return {}
    incident: dict[int, float] = {}
    up: dict[int, float] = {sol.root: sol.x_f}
    for j, (u, v) in enumerate(sol.edges):
        incident[u] = incident.get(u, 0.0) + float(sol.x[j])
        incident[v] = incident.get(v, 0.0) + float(sol.x[j])
        up[int(sol.child[j])] = float(sol.x[j])
    res = {}
    for v in range(inst.graph.n):
        load = incident.get(v, 0.0)
        if v == sol.root:
            res[v] = load - bounds[v]
        else:
            res[v] = load - bounds[v] * up.get(v, 0.0)
    return res


def verify_fractional(sol: FractionalSolution, instance: GstInstance | None = None) -> FractionalReport:
    if instance is not None and instance is not sol.instance:
        sol = FractionalSolution(instance, sol.root, sol.edges, sol.child, sol.parent, sol.x,
                                 sol.objective, sol.x_f)
    flows = group_flows(sol)
    resid = degree_residuals(sol)
    mono = 0.0
    for j in range(len(sol.x)):
        mono = max(mono, float(sol.x[j]) - sol.parent_value(j))
    return FractionalReport(tuple(flows), min(flows, default=1.0),
                            max([0.0] + [r for r in resid.values()]), max(0.0, mono))


def characteristic_solution(instance: GstInstance, root: int, tree_edges) -> FractionalSolution:
    """The 0/1 vector of an integral subtree, laid out like an LP solution."""
    _, edges, child, parent, _ = _layout(instance, root)
    chosen = {canon(u, v) for u, v in tree_edges}
    x = np.array([1.0 if e in chosen else 0.0 for e in edges])
    return FractionalSolution(instance, root, edges, child, parent, x,
                              float(_edge_costs(instance, edges) @ x))


def row_activity(model: LpModel, x_full: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(A_ub x - b_ub, A_eq x - b_eq) for a full variable vector."""
    return model.A_ub @ x_full - model.b_ub, model.A_eq @ x_full - model.b_eq


def integral_point(model: LpModel, tree_edges) -> np.ndarray | None:
    """A full primal point (x and flows) realising an integral subtree containing the root.

    Each group's unit of flow follows the tree path to its first member found
    in the subtree.  Returns ``None`` if the subtree misses a group.
    """
    inst = model.instance
    chosen = {canon(u, v) for u, v in tree_edges}
    full = np.zeros(len(model.c))
    for j, e in enumerate(model.edges):
        full[j] = 1.0 if e in chosen else 0.0
    nodes = {model.tree.root} | {v for e in chosen for v in e}
    col = {name: i for i, name in enumerate(model.names)}
    for gi, grp in enumerate(inst.groups):
        hit = [v for v in grp if v in nodes]
        if not hit:
            return None
        v = min(hit, key=lambda t: (len(model.tree.path_to_root(t)), t))
        full[col[f"s{gi}_{v}"]] = 1.0
        for e in model.tree.path_to_root(v):
            full[col[f"f{gi}_{e[0]}_{e[1]}"]] = 1.0
    return full


# ------------------------------------------------ cut enumeration cross-check

def cut_family(instance: GstInstance, root: int):
    """All (group index, crossing edge indices) for cuts ``A`` with root outside and group inside.

    Exponential; meant for trees with at most a dozen edges.
    """
    _, edges, _, _, _ = _layout(instance, root)
    others = [v for v in range(instance.graph.n) if v != root]
    out = []
    for gi, grp in enumerate(instance.groups):
        if root in grp:
            continue
        members = set(grp)
        free = [v for v in others if v not in members]
        for r in range(len(free) + 1):
            for extra in combinations(free, r):
                A = members | set(extra)
                crossing = tuple(j for j, (u, v) in enumerate(edges) if (u in A) != (v in A))
                out.append((gi, crossing))
    return out


def min_cut_values(sol: FractionalSolution) -> list[float]:
    """Per group, min over enumerated cuts of ``x(delta(A))`` (1.0 if the root is in the group)."""
    best = [np.inf] * len(sol.instance.groups)
    for gi, crossing in cut_family(sol.instance, sol.root):
        best[gi] = min(best[gi], float(sum(sol.x[j] for j in crossing)))
    return [min(1.0, b) for b in best]


def solve_cut_lp(instance: GstInstance, with_degree_rows: bool = True, root: int | None = None) -> float:
    """Optimum of the explicit cut-listing LP (small trees only)."""
    root = instance.root if root is None else root
    tree, edges, child, parent, index = _layout(instance, root)
    m = len(edges)
    rows, rhs = [], []
    for _, crossing in cut_family(instance, root):
        r = np.zeros(m)
        r[list(crossing)] = -1.0
        rows.append(r)
        rhs.append(-1.0)
    if with_degree_rows and instance.bounds is not None:
        for v in tree.order:
            r = np.zeros(m)
            for c in tree.children[v]:
                r[index[c]] = 1.0
            if v == root:
                rhs.append(float(instance.bounds[v]))
            else:
                r[index[v]] += 1.0 - instance.bounds[v]
                rhs.append(0.0)
            rows.append(r)
    res = linprog(_edge_costs(instance, edges), A_ub=np.array(rows) if rows else None,
                  b_ub=np.array(rhs) if rows else None, bounds=[(0, 1)] * m, method="highs-ds",
                  options={"primal_feasibility_tolerance": SOLVER_TOL,
                           "dual_feasibility_tolerance": SOLVER_TOL})
    if res.status == 2:
        raise LpInfeasible("infeasible")
    return float(res.fun)


# ------------------------------------------------ interchange dump

def _fmt(v: float) -> str:
    return repr(float(v)) if v != int(v) else str(int(v))


def dump_lp(model: LpModel, path: str | Path) -> None:
    """Write the model in CPLEX LP text format."""
    lines = ["\\ flow LP for group Steiner tree on a rooted tree", "Minimize", " obj:"]
    terms = [f" + {_fmt(cv)} {model.names[j]}" for j, cv in enumerate(model.c) if cv != 0]
    lines.append("".join(terms) if terms else " 0 " + model.names[0])
    lines.append("Subject To")

    def emit(A, b, names, sense):
        A = A.tocsr()
        for i in range(A.shape[0]):
            lo, hi = A.indptr[i], A.indptr[i + 1]
            body = "".join(
                f" {'+' if v >= 0 else '-'} {_fmt(abs(v))} {model.names[j]}"
                for j, v in zip(A.indices[lo:hi], A.data[lo:hi])
            )
            lines.append(f" {names[i]}:{body} {sense} {_fmt(b[i])}")

    emit(model.A_ub, model.b_ub, model.row_names_ub, "<=")
    emit(model.A_eq, model.b_eq, model.row_names_eq, "=")
    lines.append("Bounds")
    for j, u in enumerate(model.upper):
        lines.append(f" 0 <= {model.names[j]} <= {_fmt(u)}" if np.isfinite(u) else f" {model.names[j]} >= 0")
    lines.append("End")
    Path(path).write_text("\n".join(lines) + "\n")
