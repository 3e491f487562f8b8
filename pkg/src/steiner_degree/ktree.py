"""Reductions from Min-Degree Steiner k-Tree to Min-Degree Group Steiner Tree.

Terminals are thrown into bins that act as groups, either uniformly at
random or through the pairwise-independent hash ``((a*i + b) mod p) mod k``.
A GST solver connects one terminal per bin; rounds repeat on the remaining
terminals, with everything collected so far merged into a root supernode,
until ``k`` terminals are spanned.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import kernels
from .instance import Graph, GstInstance, KTreeInstance, SubTree, canon, check, max_degree

GstSolver = Callable[[GstInstance], SubTree]
ROUND_CAP_CONST = 10


class RoundCapExceeded(RuntimeError):
    pass


class GstSolverFailed(RuntimeError):
    pass


class NoPairFound(RuntimeError):
    pass


def is_prime(m: int) -> bool:
    if m < 2:
        return False
    return all(m % d for d in range(2, math.isqrt(m) + 1))


def find_prime(k: int) -> int:
    """Smallest prime in ``[2k, 4k]`` (one exists by Bertrand's postulate)."""
    if k < 1:
        raise ValueError("k must be positive")
    return next(p for p in range(2 * k, 4 * k + 1) if is_prime(p))


def bin_count(k: int) -> int:
    if k < 4:
        return 1
    return max(1, math.ceil(k / (5 * math.log2(k))))


def random_bins(terminals: Sequence[int], k: int, rng: np.random.Generator) -> list[tuple[int, ...]]:
    """Throw each terminal into one of ``ceil(k / (5 log2 k))`` bins; empty bins are dropped."""
    nb = bin_count(k)
    draws = rng.integers(nb, size=len(terminals))
    bins: list[list[int]] = [[] for _ in range(nb)]
    for t, j in zip(terminals, draws):
        bins[int(j)].append(int(t))
    return [tuple(sorted(b)) for b in bins if b]


@dataclass(frozen=True)
class BinAssignment:
    k: int
    p: int
    a: int
    b: int
    terminals: tuple[int, ...]
    mode: str = "two-point"

    def bin_of(self, i: int) -> int:
        return ((self.a * i + self.b) % self.p) % self.k

    @property
    def map(self) -> dict[int, int]:
        """Terminal index -> bin."""
        return {i: self.bin_of(i) for i in range(len(self.terminals))}

    @property
    def residue_count(self) -> list[int]:
        return residue_counts(self.k, self.p)

    def hit_probability(self, j: int) -> float:
        return self.residue_count[j] / self.p

    def groups(self) -> list[tuple[int, ...]]:
        bins: list[list[int]] = [[] for _ in range(self.k)]
        for i, t in enumerate(self.terminals):
            bins[self.bin_of(i)].append(t)
        return [tuple(sorted(b)) for b in bins if b]


def residue_counts(k: int, p: int) -> list[int]:
    """``|{0 <= r < p : r mod k == j}|`` for each bin ``j``."""
    out = [0] * k
    for r in range(p):
        out[r % k] += 1
    return out


def two_point_bins(terminals: Sequence[int], k: int, a: int, b: int, p: int | None = None) -> BinAssignment:
    p = find_prime(k) if p is None else p
    if not 1 <= a <= p - 1:
        raise ValueError(f"a={a} outside [1, {p - 1}]")
    if not 0 <= b <= p - 1:
        raise ValueError(f"b={b} outside [0, {p - 1}]")
    return BinAssignment(k, p, a, b, tuple(terminals))


def pair_hit_probability(i: int, i2: int, j: int, k: int, p: int) -> float:
    """Exact probability over all ``(a, b)`` that terminals ``i`` and ``i2`` both land in bin ``j``."""
    hits = 0
    for a in range(1, p):
        for b in range(p):
            if ((a * i + b) % p) % k == j and ((a * i2 + b) % p) % k == j:
                hits += 1
    return hits / (p * (p - 1))


def full_bins_exists(r_star: Sequence[int], k: int, p: int | None = None) -> tuple[int, int, int]:
    """First ``(a, b)`` (a-major order) putting terminals of ``r_star`` into at
    least ``ceil(k/3)`` distinct bins; returns ``(a, b, full_bins)``.

    ``r_star`` holds terminal indices in the hashing order.
    """
    p = find_prime(k) if p is None else p
    need = math.ceil(k / 3)
    counts = kernels.full_bin_counts(np.asarray(r_star, dtype=np.int64), k, p)
    hits = np.argwhere(counts >= need)
    if hits.size == 0:
        raise NoPairFound(f"no (a, b) gives {need} full bins for k={k}, p={p}")
    a_idx, b = hits[0]
    return int(a_idx) + 1, int(b), int(counts[a_idx, b])


def attach_binary_tree_gadget(instance: GstInstance, leaf_count: int) -> GstInstance:
    """Hang a complete binary tree with ``leaf_count`` leaves below the root and
    put every new leaf in every group.

    Caveat kept from the construction: a single gadget leaf then covers all
    groups, so this is a fixture only; the solvers use partial cover instead.
    """
    if leaf_count < 1:
        raise ValueError("leaf_count must be at least 1")
    if instance.root is None:
        raise ValueError("root missing")
    g = instance.graph
    size = 2 * leaf_count - 1
    base = g.n
    new_edges = [(instance.root, base)]
    for i in range(size):
        for c in (2 * i + 1, 2 * i + 2):
            if c < size:
                new_edges.append((base + i, base + c))
    leaves = [base + i for i in range(size) if 2 * i + 1 >= size]
    edges = [(u, v, c) for (u, v), c in zip(g.edges, g.costs)] + new_edges
    graph = Graph.from_edges(g.n + size, edges)
    groups = [tuple(grp) + tuple(leaves) for grp in instance.groups]
    bounds = None if instance.bounds is None else list(instance.bounds) + [3] * size
    return check(GstInstance.build(graph, groups, instance.root, bounds, instance.cover_threshold))


# ------------------------------------------------ iterative reduction

@dataclass
class _Contracted:
    graph: Graph
    to_new: dict[int, int]
    to_old: list[int]
    root: int | None


def _contract(graph: Graph, collected: set[int]) -> _Contracted:
    if not collected:
        return _Contracted(graph, {v: v for v in range(graph.n)}, list(range(graph.n)), None)
    rest = [v for v in range(graph.n) if v not in collected]
    to_new = {v: i + 1 for i, v in enumerate(rest)}
    for v in collected:
        to_new[v] = 0
    edges = set()
    for u, v in graph.edges:
        a, b = to_new[u], to_new[v]
        if a != b:
            edges.add(canon(a, b))
    return _Contracted(Graph.from_edges(len(rest) + 1, sorted(edges)), to_new, [-1] + rest, 0)


def _expand(tree: SubTree, con: _Contracted, graph: Graph, collected: set[int],
            base_edges: set) -> tuple[set, set[int]]:
    """Map a tree on the contracted graph back to original edges merged with ``base_edges``."""
    deg: dict[int, int] = {}
    for u, v in base_edges:
        deg[u] = deg.get(u, 0) + 1
        deg[v] = deg.get(v, 0) + 1
    edges = set(base_edges)
    nodes = set(collected)
    for a, b in sorted(tree.edges):
        if con.root is not None and 0 in (a, b):
            out = con.to_old[b if a == 0 else a]
            c = min((w for w in graph.adj[out] if w in collected), key=lambda w: (deg.get(w, 0), w))
            e = canon(c, out)
        else:
            e = canon(con.to_old[a], con.to_old[b])
        edges.add(e)
        for w in e:
            deg[w] = deg.get(w, 0) + 1
    for v in tree.nodes:
        if con.root is None or v != 0:
            nodes.add(con.to_old[v])
    for u, v in edges:
        nodes.update((u, v))
    return edges, nodes


@dataclass
class ReductionOutcome:
    tree: SubTree
    terminals: tuple[int, ...]
    degree: int
    rounds: int
    mode: str
    rows: list[dict] = field(default_factory=list)
    instances: list[GstInstance] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "mode": self.mode,
            "degree": self.degree,
            "rounds": self.rounds,
            "terminals": list(self.terminals),
            "edges": [list(e) for e in self.tree.sorted_edges()],
            "nodes": sorted(self.tree.nodes),
        }


def round_cap(k: int) -> int:
    return ROUND_CAP_CONST * math.ceil(math.log2(k + 2)) ** 2


def solve_md_ktree(instance: KTreeInstance, gst_solver: GstSolver, mode: str = "randomized",
                   rng: np.random.Generator | None = None, order_seed: int | None = None) -> ReductionOutcome:
    """Build a tree spanning at least ``k`` terminals from repeated GST calls.

    ``mode="randomized"`` draws random bins each round and covers all of them;
    ``mode="derandomized"`` sweeps every ``(a, b)`` of the two-point hash,
    asks for ``ceil(k'/3)`` bins, and keeps the sweep result with the smallest
    max degree.  ``order_seed`` shuffles the terminal order before hashing.
    """
    check(instance)
    if mode not in ("randomized", "derandomized"):
        raise ValueError(f"unknown mode {mode!r}")
    if mode == "randomized" and rng is None:
        raise ValueError("randomized mode needs an rng")
    graph = instance.graph
    order = list(instance.terminals)
    if order_seed is not None:
        order = [order[i] for i in np.random.default_rng(order_seed).permutation(len(order))]
    term_set = set(order)
    collected: set[int] = set()
    edges: set = set()
    outcome = ReductionOutcome(SubTree.empty(), (), 0, 0, mode)
    cap = round_cap(instance.k)
    while len(collected & term_set) < instance.k:
        outcome.rounds += 1
        if outcome.rounds > cap:
            raise RoundCapExceeded(f"round cap {cap} exceeded")
        k_left = instance.k - len(collected & term_set)
        remaining = [t for t in order if t not in collected]
        con = _contract(graph, collected)
        mapped = [con.to_new[t] for t in remaining]

        def run(groups, q):
            gi = GstInstance.build(con.graph, groups, con.root, None, q)
            try:
                t = gst_solver(gi)
            except Exception as exc:  # solver failures surface as one error type
                raise GstSolverFailed(str(exc)) from exc
            new_edges, new_nodes = _expand(t, con, graph, collected, edges)
            return gi, t, new_edges, new_nodes

        if mode == "randomized":
            groups = random_bins(mapped, k_left, rng)
            gi, _, edges, collected = run(groups, None)
            outcome.instances.append(gi)
        else:
            p = find_prime(k_left)
            need = math.ceil(k_left / 3)
            cache: dict = {}
            best = None
            for a in range(1, p):
                for b in range(p):
                    groups = two_point_bins(mapped, k_left, a, b, p).groups()
                    q = min(need, len(groups))
                    key = (tuple(groups), q)
                    if key not in cache:
                        cache[key] = run(groups, q)
                    gi, t, new_edges, new_nodes = cache[key]
                    merged = SubTree.from_edges(new_edges, new_nodes)
                    got = len(new_nodes & term_set)
                    full = sum(1 for g in groups if not t.nodes.isdisjoint(g))
                    deg = max_degree(merged)
                    outcome.rows.append({"round": outcome.rounds, "a": a, "b": b, "full_bins": full,
                                         "degree": deg, "terminals": got})
                    rank = (deg, -got)
                    if best is None or rank < best[0]:
                        best = (rank, gi, new_edges, new_nodes)
            _, gi, edges, collected = best
            outcome.instances.append(gi)
    tree = SubTree.from_edges(edges, collected)
    outcome.tree = tree
    outcome.terminals = tuple(sorted(tree.nodes & term_set))
    outcome.degree = max_degree(tree)
    return outcome
