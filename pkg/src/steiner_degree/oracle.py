"""Exponential-time exact solvers used as ground truth.

Everything here enumerates connected vertex subsets as bitmasks, so the
node count is capped at ``MAX_NODES``.  Ties between optimal trees are
broken by fewer edges, then by the lexicographically smaller sorted edge
list, which keeps golden outputs stable.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .instance import (
    Graph,
    GstInstance,
    InstanceError,
    KTreeInstance,
    SubTree,
    check,
)

MAX_NODES = 16


class OracleError(RuntimeError):
    pass


class InfeasibleError(OracleError):
    pass


@dataclass(frozen=True)
class OracleResult:
    best_tree: SubTree
    objective: int | Fraction
    optimum_terminals: tuple[int, ...] | None = None


def _bits(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def _nbr_masks(graph: Graph) -> list[int]:
    masks = [0] * graph.n
    for u, v in graph.edges:
        masks[u] |= 1 << v
        masks[v] |= 1 << u
    return masks


def _connected(mask: int, nbr: Sequence[int]) -> bool:
    low = mask & -mask
    reached = low
    frontier = low
    while frontier:
        grow = 0
        for v in _bits(frontier):
            grow |= nbr[v]
        frontier = grow & mask & ~reached
        reached |= frontier
    return reached == mask


def connected_subsets(graph: Graph, must_contain: int | None = None) -> list[int]:
    """All connected vertex subsets as bitmasks, ordered by (size, sorted node tuple)."""
    if graph.n > MAX_NODES:
        raise OracleError(f"instance too large (n={graph.n} > {MAX_NODES})")
    nbr = _nbr_masks(graph)
    need = 0 if must_contain is None else 1 << must_contain
    found = [m for m in range(1, 1 << graph.n) if m & need == need and _connected(m, nbr)]
    found.sort(key=lambda m: (bin(m).count("1"), _bits(m)))
    return found


def _cut_lower_bound(nodes: list[int], nbr: Sequence[int], mask: int) -> int:
    """Largest number of components left by deleting one node of the induced graph.

    A spanning tree must give that node at least that many edges.
    """
    best = 1 if len(nodes) >= 2 else 0
    if len(nodes) <= 2:
        return best
    for v in nodes:
        rest = mask & ~(1 << v)
        comps = 0
        while rest:
            low = rest & -rest
            reached = frontier = low
            while frontier:
                grow = 0
                for u in _bits(frontier):
                    grow |= nbr[u]
                frontier = grow & rest & ~reached
                reached |= frontier
            rest &= ~reached
            comps += 1
        best = max(best, comps)
    return best


def _lexmin_tree(nodes: list[int], edges: list[tuple[int, int]], d: int) -> list[tuple[int, int]] | None:
    """Lexicographically smallest spanning tree with max degree <= d, or None.

    Include-first branching over the sorted edge list, with union-find and a
    reachability prune on the edges still available.
    """
    size = len(nodes)
    if size == 1:
        return []
    if d < 1 or (size > 2 and d < 2):
        return None
    pos = {v: i for i, v in enumerate(nodes)}
    m = len(edges)
    eu = [pos[u] for u, _ in edges]
    ev = [pos[v] for _, v in edges]
    deg = [0] * size
    chosen: list[int] = []
    comp = list(range(size))

    def find(x):
        while comp[x] != x:
            x = comp[x]
        return x

    def still_connectable(start: int) -> bool:
        # chosen edges plus undecided edges whose endpoints have spare degree
        adj: list[list[int]] = [[] for _ in range(size)]
        for i in chosen:
            adj[eu[i]].append(ev[i])
            adj[ev[i]].append(eu[i])
        for i in range(start, m):
            a, b = eu[i], ev[i]
            if deg[a] < d and deg[b] < d and find(a) != find(b):
                adj[a].append(b)
                adj[b].append(a)
        seen = [False] * size
        seen[0] = True
        stack = [0]
        cnt = 1
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if not seen[y]:
                    seen[y] = True
                    cnt += 1
                    stack.append(y)
        return cnt == size

    def search(i: int) -> bool:
        if len(chosen) == size - 1:
            return True
        if m - i < size - 1 - len(chosen):
            return False
        if not still_connectable(i):
            return False
        a, b = eu[i], ev[i]
        ra, rb = find(a), find(b)
        if ra != rb and deg[a] < d and deg[b] < d:
            comp[ra] = rb
            deg[a] += 1
            deg[b] += 1
            chosen.append(i)
            if search(i + 1):
                return True
            chosen.pop()
            deg[a] -= 1
            deg[b] -= 1
            comp[ra] = ra
        return search(i + 1)

    if search(0):
        return [edges[i] for i in chosen]
    return None


def _induced_edges(graph: Graph, mask: int) -> list[tuple[int, int]]:
    return [(u, v) for u, v in graph.edges if (mask >> u) & 1 and (mask >> v) & 1]


def _min_degree_tree(graph: Graph, candidates: Iterable[int]) -> tuple[int, list[tuple[int, int]], int]:
    """Best (degree, edges, mask) over candidate node sets given in (size, lex) order."""
    nbr = _nbr_masks(graph)
    best_d, best_size, best_edges, best_mask = None, None, None, None
    for mask in candidates:
        nodes = _bits(mask)
        size = len(nodes)
        if best_d is not None:
            cap = best_d if size == best_size else best_d - 1
            lower = 0 if size == 1 else (1 if size == 2 else 2)
            if lower > cap:
                continue
        edges = _induced_edges(graph, mask)
        lower = _cut_lower_bound(nodes, nbr, mask)
        if best_d is None:
            cap = max((bin(nbr[v] & mask).count("1") for v in nodes), default=0)
        if lower > cap:
            continue
        tree = _lexmin_tree(nodes, edges, cap)
        if tree is None:
            continue
        d = cap
        while d > lower:
            lower_tree = _lexmin_tree(nodes, edges, d - 1)
            if lower_tree is None:
                break
            tree, d = lower_tree, d - 1
        realized = _tree_degree(tree)
        key = (realized, size, tree)
        if best_d is None or key < (best_d, best_size, best_edges):
            best_d, best_size, best_edges, best_mask = realized, size, tree, mask
    if best_d is None:
        raise InfeasibleError("infeasible: no subtree meets the cover requirement")
    return best_d, best_edges, best_mask


def _tree_degree(edges: list[tuple[int, int]]) -> int:
    deg: dict[int, int] = {}
    for u, v in edges:
        deg[u] = deg.get(u, 0) + 1
        deg[v] = deg.get(v, 0) + 1
    return max(deg.values(), default=0)


def _group_masks(groups) -> list[int]:
    out = []
    for g in groups:
        m = 0
        for v in g:
            m |= 1 << v
        out.append(m)
    return out


def brute_md_gst(instance: GstInstance) -> OracleResult:
    """Exact Min-Degree Group Steiner Tree: minimum max degree over subtrees
    covering at least ``q`` groups (and containing the root, when one is set)."""
    check(instance)
    g = instance.graph
    gm = _group_masks(instance.groups)
    q = instance.q
    cands = [m for m in connected_subsets(g, instance.root) if sum(1 for x in gm if x & m) >= q]
    d, edges, mask = _min_degree_tree(g, cands)
    return OracleResult(SubTree.from_edges(edges, _bits(mask)), d)


def brute_md_ktree(instance: KTreeInstance) -> OracleResult:
    """Exact Min-Degree Steiner k-Tree; also reports the terminal set it spans."""
    check(instance)
    g = instance.graph
    tm = _group_masks([instance.terminals])[0]
    cands = [m for m in connected_subsets(g) if bin(m & tm).count("1") >= instance.k]
    d, edges, mask = _min_degree_tree(g, cands)
    return OracleResult(SubTree.from_edges(edges, _bits(mask)), d, tuple(_bits(mask & tm)))


def brute_min_cost_tree(instance: GstInstance) -> OracleResult | None:
    """Cheapest subtree of a tree input that contains the root, covers ``q``
    groups and obeys the degree bounds; ``None`` when no such subtree exists."""
    check(instance)
    g = instance.graph
    if not g.is_tree():
        raise InstanceError(["graph is not a tree"])
    if instance.root is None:
        raise InstanceError(["root missing"])
    gm = _group_masks(instance.groups)
    best = None
    for mask in connected_subsets(g, instance.root):
        if sum(1 for x in gm if x & mask) < instance.q:
            continue
        edges = _induced_edges(g, mask)
        deg: dict[int, int] = {}
        for u, v in edges:
            deg[u] = deg.get(u, 0) + 1
            deg[v] = deg.get(v, 0) + 1
        if any(dv > instance.bound(v) for v, dv in deg.items()):
            continue
        cost = sum((g.cost(u, v) for u, v in edges), Fraction(0))
        key = (cost, len(edges), edges)
        if best is None or key < best[0]:
            best = (key, SubTree.from_edges(edges, _bits(mask)))
    if best is None:
        return None
    return OracleResult(best[1], best[0][0])


def gen_hitting_set_star(sets: Sequence[Iterable]) -> GstInstance:
    """Star with root 0 joined to every element; the groups are the sets.

    Elements are relabelled to nodes ``1..m`` in sorted order, so the
    optimum degree of the root equals the minimum hitting set size.
    """
    fam = [sorted(set(s)) for s in sets]
    if not fam:
        raise ValueError("no sets given")
    if any(not s for s in fam):
        raise ValueError("empty set present")
    universe = sorted(set().union(*fam))
    label = {x: i + 1 for i, x in enumerate(universe)}
    graph = Graph.from_edges(len(universe) + 1, [(0, label[x]) for x in universe])
    return check(GstInstance.build(graph, [[label[x] for x in s] for s in fam], root=0))
