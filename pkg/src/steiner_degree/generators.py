"""Seeded instance generators for tests, experiments and the ``gen`` command."""
from __future__ import annotations

import numpy as np

from .instance import Graph, GstInstance, KTreeInstance, RootedTree, canon, check
from .oracle import gen_hitting_set_star


def rng_for(seed: int, *stream: int) -> np.random.Generator:
    """Independent generator for a named substream of ``seed``."""
    return np.random.default_rng([int(seed), *map(int, stream)])


def random_tree(n: int, rng: np.random.Generator, max_cost: int = 1) -> Graph:
    """Random recursive tree on ``0..n-1`` (node ``v`` hangs off a uniform earlier node)."""
    edges = []
    for v in range(1, n):
        u = int(rng.integers(v))
        c = 1 if max_cost <= 1 else int(rng.integers(1, max_cost + 1))
        edges.append((u, v, c))
    return Graph.from_edges(n, edges)


def random_groups(n: int, count: int, max_size: int, rng: np.random.Generator, exclude=()) -> list[list[int]]:
    pool = np.array([v for v in range(n) if v not in set(exclude)])
    out = []
    for _ in range(count):
        size = int(rng.integers(1, max_size + 1))
        out.append(sorted(int(v) for v in rng.choice(pool, size=min(size, len(pool)), replace=False)))
    return out


def planted_bounds(graph: Graph, root: int, groups, rng: np.random.Generator, low: int = 1, high: int = 3) -> list[int]:
    """Degree bounds that a planted tree (root paths to one member per group) respects;
    other nodes get uniform bounds in ``[low, high]``."""
    rt = RootedTree.of(graph, root)
    planted = set()
    for grp in groups:
        v = int(rng.choice(grp))
        planted.update(rt.path_to_root(v))
    deg = [0] * graph.n
    for u, v in planted:
        deg[u] += 1
        deg[v] += 1
    return [max(deg[v], int(rng.integers(low, high + 1))) for v in range(graph.n)]


def random_tree_instance(n: int, n_groups: int, max_group: int, rng: np.random.Generator,
                         bounded: bool = True, max_cost: int = 10) -> GstInstance:
    graph = random_tree(n, rng, max_cost)
    groups = random_groups(n, n_groups, max_group, rng, exclude=(0,))
    bounds = planted_bounds(graph, 0, groups, rng) if bounded else None
    return check(GstInstance.build(graph, groups, 0, bounds))


def bounded_tw_graph(n: int, w: int, rng: np.random.Generator, drop: float = 0.3) -> Graph:
    """A ``w``-tree on ``n`` nodes, relabelled at random, with random edges removed
    while the graph stays connected.  Its treewidth is at most ``w``."""
    if n <= w + 1:
        edges = {(u, v) for u in range(n) for v in range(u + 1, n)}
        cliques = []
    else:
        base = list(range(w + 1))
        edges = {(u, v) for u in base for v in base if u < v}
        cliques = [tuple(base)]
        for v in range(w + 1, n):
            clique = cliques[int(rng.integers(len(cliques)))]
            for u in clique:
                edges.add((u, v))
            for i in range(len(clique)):
                cliques.append(tuple(sorted(clique[:i] + clique[i + 1:] + (v,))))
    perm = rng.permutation(n)
    edges = sorted({canon(int(perm[u]), int(perm[v])) for u, v in edges})
    for e in [edges[i] for i in rng.permutation(len(edges))]:
        if rng.random() >= drop:
            continue
        trial = [x for x in edges if x != e]
        if Graph.from_edges(n, trial).is_connected():
            edges = trial
    return Graph.from_edges(n, edges)


def star(leaves: int) -> Graph:
    return Graph.from_edges(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def path(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def grid_strip(rows: int, cols: int) -> Graph:
    """``rows x cols`` grid; treewidth at most ``min(rows, cols)``."""
    idx = lambda r, c: r * cols + c
    edges = [(idx(r, c), idx(r, c + 1)) for r in range(rows) for c in range(cols - 1)]
    edges += [(idx(r, c), idx(r + 1, c)) for r in range(rows - 1) for c in range(cols)]
    return Graph.from_edges(rows * cols, edges)


def balanced_binary_tree(depth: int) -> Graph:
    n = 2 ** (depth + 1) - 1
    return Graph.from_edges(n, [((v - 1) // 2, v) for v in range(1, n)])


def generate(kind: str, params: dict, seed: int) -> GstInstance | KTreeInstance:
    """Deterministic instance for ``(kind, params, seed)``; used by the ``gen`` command."""
    rng = rng_for(seed)
    groups_n = int(params.get("groups", 3))
    gsize = int(params.get("group_size", 3))
    if kind == "star":
        leaves = int(params.get("leaves", 4))
        g = star(leaves)
        groups = params.get("group_list") or [[v] for v in range(1, leaves + 1)]
        return check(GstInstance.build(g, groups, 0))
    if kind == "hitting-set-star":
        return gen_hitting_set_star(params["sets"])
    if kind == "random-tree":
        n = int(params.get("n", 12))
        return random_tree_instance(n, groups_n, gsize, rng, bounded=bool(params.get("bounded", True)),
                                    max_cost=int(params.get("max_cost", 10)))
    if kind == "bounded-tw":
        n, w = int(params.get("n", 14)), int(params.get("w", 2))
        g = bounded_tw_graph(n, w, rng)
    elif kind == "grid-strip":
        g = grid_strip(int(params.get("rows", 2)), int(params.get("cols", 6)))
    else:
        raise ValueError(f"unknown kind {kind!r}")
    if "k" in params:
        terms = params.get("terminals")
        if terms is None:
            count = int(params.get("terminal_count", g.n))
            terms = sorted(int(v) for v in rng.choice(g.n, size=min(count, g.n), replace=False))
        return check(KTreeInstance.build(g, terms, int(params["k"])))
    return check(GstInstance.build(g, random_groups(g.n, groups_n, gsize, rng), params.get("root")))
