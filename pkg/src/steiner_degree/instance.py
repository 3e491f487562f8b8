"""Graphs, subtrees and problem instances shared by every solver.

Node ids are dense integers ``0..n-1``.  Edges are stored canonically as
``(u, v)`` with ``u < v`` and sorted; groups are sorted, duplicate-free
tuples.  Instances are immutable values.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence, Union

Edge = tuple[int, int]


class InstanceError(ValueError):
    """Raised when an instance violates its invariants."""

    def __init__(self, errors: Sequence[str]):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


def canon(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


def as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("boolean is not a cost")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(str(value))
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"unsupported cost {value!r}")


@dataclass(frozen=True)
class Graph:
    n: int
    edges: tuple[Edge, ...]
    costs: tuple[Fraction, ...] = ()

    @classmethod
    def from_edges(cls, n: int, edges: Iterable, costs: Iterable | None = None) -> "Graph":
        """Build a graph, canonicalising edge orientation and order.

        ``edges`` items may be ``(u, v)`` or ``(u, v, cost)``; explicit
        ``costs`` override per-edge ones.  Missing costs default to 1.
        """
        raw = []
        for item in edges:
            if len(item) == 3:
                u, v, c = item
            else:
                (u, v), c = item, 1
            raw.append((int(u), int(v), as_fraction(c)))
        if costs is not None:
            costs = list(costs)
            raw = [(u, v, as_fraction(c)) for (u, v, _), c in zip(raw, costs)]
        raw = sorted((min(u, v), max(u, v), c) for u, v, c in raw)
        return cls(int(n), tuple((u, v) for u, v, _ in raw), tuple(c for _, _, c in raw))

    def __post_init__(self):
        if not self.costs:
            object.__setattr__(self, "costs", tuple(Fraction(1) for _ in self.edges))

    @cached_property
    def adj(self) -> tuple[tuple[int, ...], ...]:
        nbrs: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.edges:
            if 0 <= u < self.n and 0 <= v < self.n and u != v:
                nbrs[u].append(v)
                nbrs[v].append(u)
        return tuple(tuple(sorted(set(a))) for a in nbrs)

    @cached_property
    def edge_index(self) -> dict[Edge, int]:
        return {e: i for i, e in enumerate(self.edges)}

    def cost(self, u: int, v: int) -> Fraction:
        return self.costs[self.edge_index[canon(u, v)]]

    def has_edge(self, u: int, v: int) -> bool:
        return canon(u, v) in self.edge_index

    def with_costs(self, costs: Sequence) -> "Graph":
        return Graph(self.n, self.edges, tuple(as_fraction(c) for c in costs))

    def is_connected(self) -> bool:
        if self.n == 0:
            return True
        return len(bfs_order(self.adj, 0)) == self.n

    def is_tree(self) -> bool:
        return len(self.edges) == self.n - 1 and self.is_connected()

    def induced_components(self, nodes: Iterable[int]) -> list[list[int]]:
        """Connected components of the subgraph induced by ``nodes``, each sorted."""
        allowed = set(nodes)
        seen: set[int] = set()
        comps = []
        for s in sorted(allowed):
            if s in seen:
                continue
            comp = [s]
            seen.add(s)
            queue = deque([s])
            while queue:
                u = queue.popleft()
                for w in self.adj[u]:
                    if w in allowed and w not in seen:
                        seen.add(w)
                        comp.append(w)
                        queue.append(w)
            comps.append(sorted(comp))
        return comps


def bfs_order(adj, source: int, allowed=None) -> list[int]:
    seen = {source}
    order = [source]
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for w in adj[u]:
            if w not in seen and (allowed is None or w in allowed):
                seen.add(w)
                order.append(w)
                queue.append(w)
    return order


def bfs_parents(adj, source: int, allowed=None) -> dict[int, int]:
    """Parent map of a BFS tree (neighbours visited in sorted order); source maps to -1."""
    parent = {source: -1}
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for w in adj[u]:
            if w not in parent and (allowed is None or w in allowed):
                parent[w] = u
                queue.append(w)
    return parent


@dataclass(frozen=True)
class SubTree:
    """An edge set forming a tree.  ``nodes`` is explicit so a bare node is a valid tree."""

    edges: frozenset
    nodes: frozenset

    @classmethod
    def from_edges(cls, edges: Iterable, nodes: Iterable[int] = ()) -> "SubTree":
        es = frozenset(canon(int(u), int(v)) for u, v in edges)
        ns = set(int(v) for v in nodes)
        for u, v in es:
            ns.add(u)
            ns.add(v)
        return cls(es, frozenset(ns))

    @classmethod
    def single(cls, v: int) -> "SubTree":
        return cls(frozenset(), frozenset([int(v)]))

    @classmethod
    def empty(cls) -> "SubTree":
        return cls(frozenset(), frozenset())

    def sorted_edges(self) -> list[Edge]:
        return sorted(self.edges)

    def degrees(self) -> dict[int, int]:
        deg = {v: 0 for v in self.nodes}
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg

    def is_tree(self) -> bool:
        if not self.nodes:
            return not self.edges
        if len(self.edges) != len(self.nodes) - 1:
            return False
        adj: dict[int, list[int]] = {v: [] for v in self.nodes}
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        start = min(self.nodes)
        return len(bfs_order(adj, start)) == len(self.nodes)

    def in_graph(self, graph: Graph) -> bool:
        return all(graph.has_edge(u, v) for u, v in self.edges) and all(
            0 <= v < graph.n for v in self.nodes
        )

    def cost(self, graph: Graph) -> Fraction:
        return sum((graph.cost(u, v) for u, v in self.edges), Fraction(0))


@dataclass(frozen=True)
class GstInstance:
    graph: Graph
    groups: tuple[tuple[int, ...], ...]
    root: int | None = None
    bounds: tuple[int, ...] | None = None
    cover_threshold: int | None = None

    @classmethod
    def build(cls, graph: Graph, groups, root=None, bounds=None, cover_threshold=None) -> "GstInstance":
        gs = tuple(tuple(sorted(set(int(v) for v in g))) for g in groups)
        bs = None if bounds is None else tuple(int(b) for b in bounds)
        return cls(graph, gs, None if root is None else int(root), bs, cover_threshold)

    @property
    def q(self) -> int:
        return len(self.groups) if self.cover_threshold is None else self.cover_threshold

    @property
    def max_group_size(self) -> int:
        return max((len(g) for g in self.groups), default=0)

    @cached_property
    def node_groups(self) -> tuple[tuple[int, ...], ...]:
        """For every node, the indices of groups containing it."""
        memb: list[list[int]] = [[] for _ in range(self.graph.n)]
        for gi, g in enumerate(self.groups):
            for v in g:
                if 0 <= v < self.graph.n:
                    memb[v].append(gi)
        return tuple(tuple(m) for m in memb)

    def bound(self, v: int) -> int:
        return self.graph.n if self.bounds is None else self.bounds[v]

    def replace(self, **changes) -> "GstInstance":
        fields_ = dict(graph=self.graph, groups=self.groups, root=self.root,
                       bounds=self.bounds, cover_threshold=self.cover_threshold)
        fields_.update(changes)
        return GstInstance.build(**fields_)


@dataclass(frozen=True)
class KTreeInstance:
    graph: Graph
    terminals: tuple[int, ...]
    k: int

    @classmethod
    def build(cls, graph: Graph, terminals, k: int) -> "KTreeInstance":
        return cls(graph, tuple(sorted(set(int(t) for t in terminals))), int(k))


Instance = Union[GstInstance, KTreeInstance]


def _graph_errors(g: Graph) -> list[str]:
    errs = []
    if g.n < 1:
        errs.append("node count must be positive")
    seen = set()
    for (u, v), c in zip(g.edges, g.costs):
        if u == v:
            errs.append(f"self-loop at node {u}")
        if not (0 <= u < g.n and 0 <= v < g.n):
            errs.append(f"edge ({u}, {v}): node out of range")
        if (u, v) in seen:
            errs.append(f"parallel edge ({u}, {v})")
        seen.add((u, v))
        if c < 0:
            errs.append(f"edge ({u}, {v}): negative cost")
    return errs


def validate(instance: Instance) -> list[str]:
    """Every violated invariant of ``instance``; an empty list means ok."""
    g = instance.graph
    errs = _graph_errors(g)
    if isinstance(instance, KTreeInstance):
        for t in instance.terminals:
            if not 0 <= t < g.n:
                errs.append(f"terminal {t}: node out of range")
        if instance.k < 1:
            errs.append("k must be positive")
        if instance.k > len(instance.terminals):
            errs.append("k exceeds terminal count")
        return errs
    if not instance.groups:
        errs.append("no groups")
    for i, grp in enumerate(instance.groups):
        if not grp:
            errs.append(f"group {i} is empty")
        for v in grp:
            if not 0 <= v < g.n:
                errs.append(f"group {i}: node out of range ({v})")
    if instance.root is not None and not 0 <= instance.root < g.n:
        errs.append(f"root {instance.root}: node out of range")
    if instance.bounds is not None:
        if len(instance.bounds) != g.n:
            errs.append("bounds length differs from node count")
        if any(b < 1 for b in instance.bounds):
            errs.append("nonpositive degree bound")
    if instance.cover_threshold is not None and not 1 <= instance.cover_threshold <= len(instance.groups):
        errs.append("cover threshold outside [1, |groups|]")
    return errs


def check(instance: Instance) -> Instance:
    errs = validate(instance)
    if errs:
        raise InstanceError(errs)
    return instance


def max_degree(tree: SubTree) -> int:
    return max(tree.degrees().values(), default=0)


def covered_groups(tree: SubTree, instance: GstInstance) -> list[int]:
    return [i for i, g in enumerate(instance.groups) if not tree.nodes.isdisjoint(g)]


def covers(tree: SubTree, instance: GstInstance) -> int:
    """Number of groups intersected by the tree's node set."""
    return len(covered_groups(tree, instance))


def is_feasible(tree: SubTree, instance: GstInstance) -> bool:
    if not tree.is_tree() or not tree.in_graph(instance.graph):
        return False
    if instance.root is not None and instance.root not in tree.nodes:
        return False
    return covers(tree, instance) >= instance.q


def terminal_count(tree: SubTree, instance: KTreeInstance) -> int:
    return len(tree.nodes.intersection(instance.terminals))


# ---------------------------------------------------------------- JSON

_FIELDS = {"n", "edges", "root", "groups", "bounds", "terminals", "k", "cover_threshold"}


def _cost_json(c: Fraction):
    return int(c) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _read_graph(doc: dict) -> Graph:
    unknown = set(doc) - _FIELDS
    if unknown:
        raise InstanceError([f"unknown field {k!r}" for k in sorted(unknown)])
    if "n" not in doc or "edges" not in doc:
        raise InstanceError(["missing 'n' or 'edges'"])
    edges = []
    for e in doc["edges"]:
        if len(e) not in (2, 3):
            raise InstanceError([f"malformed edge {e!r}"])
        edges.append(tuple(e))
    return Graph.from_edges(doc["n"], edges)


def gst_from_json(doc: dict) -> GstInstance:
    graph = _read_graph(doc)
    inst = GstInstance.build(graph, doc.get("groups", []), doc.get("root"),
                             doc.get("bounds"), doc.get("cover_threshold"))
    return check(inst)


def ktree_from_json(doc: dict) -> KTreeInstance:
    graph = _read_graph(doc)
    if "terminals" not in doc or "k" not in doc:
        raise InstanceError(["k-tree instance needs 'terminals' and 'k'"])
    return check(KTreeInstance.build(graph, doc["terminals"], doc["k"]))


def to_json(instance: Instance, **extra) -> dict:
    g = instance.graph
    doc: dict = {
        "n": g.n,
        "edges": [[u, v] if c == 1 else [u, v, _cost_json(c)] for (u, v), c in zip(g.edges, g.costs)],
    }
    if isinstance(instance, GstInstance):
        if instance.root is not None:
            doc["root"] = instance.root
        doc["groups"] = [list(grp) for grp in instance.groups]
        if instance.bounds is not None:
            doc["bounds"] = list(instance.bounds)
        if instance.cover_threshold is not None:
            doc["cover_threshold"] = instance.cover_threshold
    else:
        doc["groups"] = []
        doc["terminals"] = list(instance.terminals)
        doc["k"] = instance.k
    doc.update(extra)
    return doc


@dataclass(frozen=True)
class RootedTree:
    """A tree graph rooted at ``root``: parent/children maps and a top-down order."""

    graph: Graph
    root: int
    parent: dict = field(hash=False)
    order: tuple[int, ...] = ()

    @classmethod
    def of(cls, graph: Graph, root: int) -> "RootedTree":
        if not graph.is_tree():
            raise InstanceError(["graph is not a tree"])
        parent = bfs_parents(graph.adj, root)
        return cls(graph, root, parent, tuple(bfs_order(graph.adj, root)))

    @cached_property
    def children(self) -> dict[int, list[int]]:
        ch: dict[int, list[int]] = {v: [] for v in self.order}
        for v in self.order[1:]:
            ch[self.parent[v]].append(v)
        return ch

    def parent_edge(self, v: int) -> Edge:
        return canon(v, self.parent[v])

    def path_to_root(self, v: int) -> list[Edge]:
        out = []
        while v != self.root:
            out.append(self.parent_edge(v))
            v = self.parent[v]
        return out
