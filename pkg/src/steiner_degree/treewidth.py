"""Separator-tree reduction of bounded-treewidth graphs to low-height trees.

Pipeline: recursive 4/5-balanced separators -> connect each separator
inside its own region -> contract separators and leaf components into
supernodes -> solve on the hierarchy tree -> expand back into the graph.

The hierarchy tree ``T'`` is the parent/child structure of the separator
tree.  A child's separator is not always adjacent to its parent's, so
every hierarchy link is realised by a shortest path inside the child's
region plus the parent separator.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import kernels
from .instance import Edge, Graph, GstInstance, SubTree, bfs_parents, canon, check
from .rounding import prune, solve_md_gst_tree


class SeparatorNotFound(RuntimeError):
    pass


class BackEdgeViolation(RuntimeError):
    pass


def balance_limit(size: int) -> int:
    return (4 * size + 4) // 5


def balanced_separator(graph: Graph, w: int, nodes=None) -> tuple[int, ...]:
    """Smallest nonempty vertex set (at most ``w + 1`` nodes, lexicographic among
    equals) whose removal leaves components of at most ``ceil(4h/5)`` nodes,
    where ``h`` is the number of nodes considered."""
    nodes = sorted(range(graph.n) if nodes is None else nodes)
    pos = {v: i for i, v in enumerate(nodes)}
    indptr = [0]
    indices: list[int] = []
    for v in nodes:
        nb = [pos[u] for u in graph.adj[v] if u in pos]
        indices.extend(nb)
        indptr.append(len(indices))
    limit = balance_limit(len(nodes))
    for size in range(1, min(w + 1, len(nodes)) + 1):
        combo = kernels.first_separator(np.array(indptr), np.array(indices, dtype=np.int64), size, limit)
        if combo.size and combo[0] >= 0:
            return tuple(nodes[i] for i in combo)
    raise SeparatorNotFound(f"no separator within width bound w={w} for {len(nodes)} nodes")


@dataclass(frozen=True)
class SepNode:
    index: int
    members: tuple[int, ...]     # separator set, or the whole component for a leaf
    region: tuple[int, ...]      # vertex set of the component it was taken from
    is_leaf: bool
    parent: int
    level: int
    children: tuple[int, ...] = ()


@dataclass(frozen=True)
class SeparatorTree:
    nodes: tuple[SepNode, ...]
    width: int
    owner: tuple[int, ...]       # vertex -> index of the node holding it

    @property
    def leaf_threshold(self) -> int:
        return self.width + 1

    @property
    def height(self) -> int:
        return max(nd.level for nd in self.nodes)

    @property
    def levels(self) -> int:
        return self.height + 1

    def ancestors(self, i: int) -> list[int]:
        out = []
        p = self.nodes[i].parent
        while p >= 0:
            out.append(p)
            p = self.nodes[p].parent
        return out

    def is_ancestor(self, a: int, d: int) -> bool:
        return a in self.ancestors(d)


def build_separator_tree(graph: Graph, w: int) -> SeparatorTree:
    """Recursive separator decomposition; components of at most ``w + 1`` nodes become leaves."""
    if not graph.is_connected():
        raise ValueError("graph is not connected")
    raw: list[dict] = []
    queue = deque([(tuple(range(graph.n)), -1, 0)])
    while queue:
        region, parent, level = queue.popleft()
        idx = len(raw)
        if parent >= 0:
            raw[parent]["children"].append(idx)
        if len(region) <= w + 1:
            raw.append(dict(members=region, region=region, is_leaf=True, parent=parent, level=level, children=[]))
            continue
        sep = balanced_separator(graph, w, region)
        raw.append(dict(members=sep, region=region, is_leaf=False, parent=parent, level=level, children=[]))
        rest = set(region) - set(sep)
        for comp in graph.induced_components(rest):
            queue.append((tuple(comp), idx, level + 1))
    owner = [-1] * graph.n
    nodes = []
    for i, r in enumerate(raw):
        for v in r["members"]:
            owner[v] = i
        nodes.append(SepNode(i, tuple(r["members"]), tuple(r["region"]), r["is_leaf"], r["parent"],
                             r["level"], tuple(r["children"])))
    return SeparatorTree(tuple(nodes), w, tuple(owner))


def _path_edges(parents: dict[int, int], target: int) -> list[Edge]:
    out = []
    while parents[target] != -1:
        out.append(canon(target, parents[target]))
        target = parents[target]
    return out


def connect_separators(graph: Graph, sep_tree: SeparatorTree) -> dict[int, tuple[Edge, ...]]:
    """Edges that connect every separator / leaf inside its own region.

    Leaves get a BFS spanning tree; a separator gets hop-shortest paths from
    its smallest member to each other member within its region.
    """
    out: dict[int, tuple[Edge, ...]] = {}
    for nd in sep_tree.nodes:
        allowed = set(nd.members) if nd.is_leaf else set(nd.region)
        u = nd.members[0]
        par = bfs_parents(graph.adj, u, allowed)
        edges: set[Edge] = set()
        targets = nd.members[1:]
        for s in targets:
            if s not in par:
                raise AssertionError(f"separator node {s} unreachable within region")
            edges.update(_path_edges(par, s))
        if nd.is_leaf:
            edges = {canon(v, p) for v, p in par.items() if p != -1}
        out[nd.index] = tuple(sorted(edges))
    return out


def link_paths(graph: Graph, sep_tree: SeparatorTree) -> dict[int, tuple[Edge, ...]]:
    """For each non-root node, a shortest path from its members to its parent's separator,
    running through its own region only."""
    out: dict[int, tuple[Edge, ...]] = {}
    for nd in sep_tree.nodes:
        if nd.parent < 0:
            continue
        targets = set(sep_tree.nodes[nd.parent].members)
        allowed = set(nd.region) | targets
        parent = {v: -1 for v in nd.members}
        queue = deque(nd.members)
        hit = None
        while queue and hit is None:
            x = queue.popleft()
            for y in graph.adj[x]:
                if y in allowed and y not in parent:
                    parent[y] = x
                    if y in targets:
                        hit = y
                        break
                    queue.append(y)
        if hit is None:
            raise AssertionError(f"node {nd.index} cannot reach its parent separator")
        out[nd.index] = tuple(sorted(_path_edges(parent, hit)))
    return out


@dataclass(frozen=True)
class ContractedInstance:
    sep_tree: SeparatorTree
    g_prime: Graph               # supernode graph
    t_prime: Graph               # hierarchy tree on supernodes
    back_edges: tuple[Edge, ...]
    connect: dict                # supernode -> E' edges inside G
    links: dict                  # supernode -> edges realising its link to the parent
    groups: tuple[tuple[int, ...], ...]
    root: int | None             # supernode holding the instance root, if any

    @property
    def expand(self) -> dict[int, tuple[int, ...]]:
        return {nd.index: nd.members for nd in self.sep_tree.nodes}

    @property
    def height(self) -> int:
        return self.sep_tree.height

    def tree_instance(self) -> GstInstance:
        return GstInstance.build(self.t_prime, self.groups, self.root)

    def graph_instance(self) -> GstInstance:
        return GstInstance.build(self.g_prime, self.groups, self.root)


def contract(graph: Graph, sep_tree: SeparatorTree, e_prime: dict, groups, root: int | None = None,
             links: dict | None = None) -> ContractedInstance:
    """Collapse every separator / leaf into a supernode and check that each
    remaining edge joins a supernode to one of its ancestors."""
    owner = sep_tree.owner
    for nd in sep_tree.nodes:
        if len(nd.members) > 1:
            sub = {v: [] for v in nd.members}
            es = e_prime.get(nd.index, ())
            reach = set()
            adj: dict[int, list[int]] = {}
            for u, v in es:
                adj.setdefault(u, []).append(v)
                adj.setdefault(v, []).append(u)
            stack = [nd.members[0]]
            reach.add(nd.members[0])
            while stack:
                x = stack.pop()
                for y in adj.get(x, ()):
                    if y not in reach:
                        reach.add(y)
                        stack.append(y)
            if not set(sub) <= reach:
                raise AssertionError(f"supernode {nd.index} is not connected by E'")
    gp_edges = set()
    for u, v in graph.edges:
        a, b = owner[u], owner[v]
        if a == b:
            continue
        if not (sep_tree.is_ancestor(a, b) or sep_tree.is_ancestor(b, a)):
            raise BackEdgeViolation(f"cross edge ({u}, {v}) joins unrelated supernodes {a}, {b}")
        gp_edges.add(canon(a, b))
    tree_edges = {canon(nd.index, nd.parent) for nd in sep_tree.nodes if nd.parent >= 0}
    back = sorted(e for e in gp_edges if e not in tree_edges)
    m = len(sep_tree.nodes)
    g_prime = Graph.from_edges(m, sorted(gp_edges | tree_edges))
    t_prime = Graph.from_edges(m, sorted(tree_edges))
    new_groups = tuple(tuple(sorted({owner[v] for v in grp})) for grp in groups)
    return ContractedInstance(sep_tree, g_prime, t_prime, tuple(back), dict(e_prime),
                              links if links is not None else link_paths(graph, sep_tree), new_groups,
                              None if root is None else owner[root])


def _tprime_path(sep_tree: SeparatorTree, a: int, d: int) -> list[Edge]:
    out = []
    while d != a:
        p = sep_tree.nodes[d].parent
        out.append(canon(d, p))
        d = p
    return out


def rewire_back_edges(edges, ci: ContractedInstance) -> SubTree:
    """Replace every backward edge ``(ancestor, descendant)`` by the hierarchy path between them."""
    st = ci.sep_tree
    tree_edges = set(ci.t_prime.edges)
    out: set[Edge] = set()
    nodes: set[int] = set()
    for a, b in edges:
        e = canon(a, b)
        nodes.update(e)
        if e in tree_edges:
            out.add(e)
            continue
        anc, desc = (a, b) if st.is_ancestor(a, b) else (b, a)
        if not st.is_ancestor(anc, desc):
            raise BackEdgeViolation(f"edge {e} is neither a hierarchy nor a backward edge")
        out.update(_tprime_path(st, anc, desc))
    return SubTree.from_edges(out, nodes)


def expand_solution(tree: SubTree, ci: ContractedInstance, graph: Graph) -> set[Edge]:
    """Original edges realising a subtree of ``T'``: each used supernode's E' plus each link path."""
    edges: set[Edge] = set()
    for s in tree.nodes:
        edges.update(ci.connect.get(s, ()))
    for a, b in tree.edges:
        child = a if ci.sep_tree.nodes[a].parent == b else b
        edges.update(ci.links[child])
    return edges


def _spanning_tree(edges, start: int) -> set[Edge]:
    adj: dict[int, list[int]] = {start: []}
    for u, v in edges:
        adj.setdefault(u, []).append(v)
        adj.setdefault(v, []).append(u)
    adj = {v: sorted(nb) for v, nb in adj.items()}
    par = bfs_parents(adj, start)
    return {canon(v, p) for v, p in par.items() if p != -1}


TreeSolver = Callable[[GstInstance], SubTree]


def auto_width(graph: Graph, max_w: int | None = None) -> tuple[int, SeparatorTree]:
    """Smallest ``w = 1, 2, ...`` for which the separator tree builds."""
    top = graph.n if max_w is None else max_w
    for w in range(1, top + 1):
        try:
            return w, build_separator_tree(graph, w)
        except SeparatorNotFound:
            continue
    raise SeparatorNotFound("no width up to the node count works")


def reduce_instance(instance: GstInstance, w: int | None = None):
    g = instance.graph
    if w is None:
        w, st = auto_width(g)
    else:
        st = build_separator_tree(g, w)
    e_prime = connect_separators(g, st)
    ci = contract(g, st, e_prime, instance.groups, instance.root)
    return w, ci


def solve_md_gst_btw(instance: GstInstance, w: int | None = None, rng: np.random.Generator | None = None,
                     tree_solver: TreeSolver | None = None) -> SubTree:
    """Min-degree GST on a bounded-treewidth graph via the hierarchy tree ``T'``."""
    check(instance)
    rng = np.random.default_rng(0) if rng is None else rng
    solver = tree_solver if tree_solver is not None else (lambda inst: solve_md_gst_tree(inst, rng))
    _, ci = reduce_instance(instance, w)
    sol = solver(ci.tree_instance())
    edges = expand_solution(sol, ci, instance.graph)
    start = instance.root if instance.root is not None else min(
        ci.sep_tree.nodes[min(sol.nodes)].members)
    if not edges:
        return prune(set(), start, instance) if instance.root is not None else SubTree.single(start)
    span = _spanning_tree(edges, start)
    return prune(span, instance.root, instance)


def height_bound(n: int) -> int:
    return math.ceil(math.log(max(n, 2), 5 / 4)) + 1


def to_dot(sep_tree: SeparatorTree, ci: ContractedInstance | None = None) -> str:
    lines = ["graph separator_tree {"]
    for nd in sep_tree.nodes:
        shape = "box" if nd.is_leaf else "ellipse"
        label = ",".join(map(str, nd.members))
        lines.append(f'  s{nd.index} [shape={shape}, label="{nd.index}: {{{label}}}"];')
    for nd in sep_tree.nodes:
        if nd.parent >= 0:
            lines.append(f"  s{nd.parent} -- s{nd.index};")
    if ci is not None:
        for a, b in ci.back_edges:
            lines.append(f"  s{a} -- s{b} [style=dashed];")
    lines.append("}")
    return "\n".join(lines) + "\n"
