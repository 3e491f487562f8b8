import math

import pytest

from steiner_degree.generators import bounded_tw_graph, grid_strip, path, random_tree, rng_for, star
from steiner_degree.instance import Graph, GstInstance, SubTree, is_feasible, max_degree
from steiner_degree.oracle import brute_md_gst
from steiner_degree.treewidth import (BackEdgeViolation, SeparatorNotFound, balance_limit, balanced_separator,
                                      build_separator_tree, connect_separators, contract, height_bound,
                                      reduce_instance, rewire_back_edges, solve_md_gst_btw, to_dot)


def cycle(n):
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def test_balance_limit():
    assert balance_limit(6) == 5 and balance_limit(5) == 4 and balance_limit(10) == 8


def test_separator_examples():
    assert balanced_separator(star(4), 0) == (0,)
    assert balanced_separator(path(5), 0) == (0,)
    # on C6 a single vertex already leaves a path of 5 <= ceil(24/5) nodes
    sep = balanced_separator(cycle(6), 1)
    assert sep == (0,)
    rest = set(range(6)) - set(sep)
    assert max(map(len, cycle(6).induced_components(rest))) <= 5


def test_separator_not_found():
    k10 = Graph.from_edges(10, [(i, j) for i in range(10) for j in range(i + 1, 10)])
    with pytest.raises(SeparatorNotFound):
        balanced_separator(k10, 0)


def test_tiny_graph_is_single_leaf():
    st = build_separator_tree(path(2), 1)
    assert len(st.nodes) == 1 and st.nodes[0].is_leaf and st.height == 0


def test_path_height():
    st = build_separator_tree(path(9), 1)
    assert st.height <= height_bound(9)


def test_grid_sizes():
    st = build_separator_tree(grid_strip(3, 3), 3)
    assert all(len(nd.members) <= 4 for nd in st.nodes)


def _check_structure(g, st):
    owner_count = [0] * g.n
    for nd in st.nodes:
        for v in nd.members:
            owner_count[v] += 1
        if nd.parent >= 0:
            par = st.nodes[nd.parent]
            assert set(nd.region) <= set(par.region) - set(par.members)
            assert len(nd.region) <= balance_limit(len(par.region))
        if nd.is_leaf:
            assert len(nd.members) <= st.leaf_threshold
            assert len(g.induced_components(nd.members)) == 1
    assert owner_count == [1] * g.n


@pytest.mark.parametrize("seed", range(20))
def test_structure_invariants(seed):
    rng = rng_for(seed, 51)
    w = 1 + seed % 3
    g = bounded_tw_graph(int(rng.integers(8, 40)), w, rng)
    st = build_separator_tree(g, w)
    _check_structure(g, st)
    assert st.height <= height_bound(g.n)


def test_connect_trivial_cases():
    st = build_separator_tree(star(4), 1)
    e = connect_separators(star(4), st)
    assert all(e[nd.index] == () for nd in st.nodes if len(nd.members) == 1)


@pytest.mark.parametrize("seed", range(10))
def test_connect_edges_stay_in_region(seed):
    rng = rng_for(seed, 52)
    g = bounded_tw_graph(30, 2, rng)
    st = build_separator_tree(g, 2)
    for idx, edges in connect_separators(g, st).items():
        region = set(st.nodes[idx].region)
        assert all(u in region and v in region and g.has_edge(u, v) for u, v in edges)


@pytest.mark.parametrize("seed", range(8))
def test_tree_input_contracts(seed):
    g = random_tree(30, rng_for(seed, 53))
    st = build_separator_tree(g, 1)
    ci = contract(g, st, connect_separators(g, st), [[3]])
    assert ci.t_prime.is_tree() and ci.height <= height_bound(30)


def test_single_supernode():
    g = path(2)
    st = build_separator_tree(g, 1)
    ci = contract(g, st, connect_separators(g, st), [[1]], root=0)
    assert ci.g_prime.n == 1 and ci.t_prime.edges == () and ci.groups == ((0,),)


def test_group_inside_separator():
    g = star(4)
    st = build_separator_tree(g, 1)
    ci = contract(g, st, connect_separators(g, st), [[0]])
    assert ci.groups == ((st.owner[0],),)


def test_cross_edge_detected():
    g = cycle(6)
    st = build_separator_tree(g, 1)
    ci = contract(g, st, connect_separators(g, st), [[1]])
    assert ci.t_prime.is_tree()
    # an edge joining two sibling leaves is not a backward edge
    leaves = [nd.index for nd in st.nodes if nd.is_leaf]
    sibs = [(a, b) for a in leaves for b in leaves if a < b and st.nodes[a].parent == st.nodes[b].parent]
    if sibs:
        with pytest.raises(BackEdgeViolation):
            rewire_back_edges([sibs[0]], ci)


def _ci(seed, n=14, w=2):
    rng = rng_for(seed, 54)
    g = bounded_tw_graph(n, w, rng)
    inst = GstInstance.build(g, [[int(rng.integers(n))], [int(rng.integers(n))]])
    return inst, reduce_instance(inst, w)[1]


def test_rewire_identity_on_tprime_edges():
    _, ci = _ci(1)
    edges = list(ci.t_prime.edges[:3])
    assert rewire_back_edges(edges, ci).edges == frozenset(edges)


def test_rewire_single_back_edge():
    for seed in range(20):
        _, ci = _ci(seed)
        if ci.back_edges:
            a, d = ci.back_edges[0]
            anc, desc = (a, d) if ci.sep_tree.is_ancestor(a, d) else (d, a)
            out = rewire_back_edges([(a, d)], ci)
            hops = len(ci.sep_tree.ancestors(desc)) - len(ci.sep_tree.ancestors(anc))
            assert len(out.edges) == hops and out.is_tree()
            assert {anc, desc} <= out.nodes
            return
    pytest.fail("no backward edge in 20 seeds")


@pytest.mark.parametrize("seed", range(15))
def test_btw_end_to_end(seed):
    rng = rng_for(seed, 55)
    n = int(rng.integers(6, 14))
    g = bounded_tw_graph(n, 2, rng)
    inst = GstInstance.build(g, [sorted({int(v) for v in rng.choice(n, 2)}) for _ in range(3)],
                             root=None if seed % 2 else 0)
    t = solve_md_gst_btw(inst, 2, rng)
    assert is_feasible(t, inst) and t.in_graph(g)
    d = brute_md_gst(inst).objective
    assert max_degree(t) <= 40 * math.log2(n) ** 3 * max(d, 1)


def test_btw_root_region_group():
    g = grid_strip(2, 5)
    _, ci = reduce_instance(GstInstance.build(g, [[0]]), 2)
    root_members = set(ci.sep_tree.nodes[0].members)
    v = min(root_members)
    t = solve_md_gst_btw(GstInstance.build(g, [sorted(root_members)]), 2)
    assert t.nodes <= root_members and v in root_members


def test_btw_auto_width():
    g = grid_strip(2, 6)
    t = solve_md_gst_btw(GstInstance.build(g, [[0], [11]]))
    assert is_feasible(t, GstInstance.build(g, [[0], [11]]))


def test_dot_export():
    _, ci = _ci(3)
    text = to_dot(ci.sep_tree, ci)
    assert text.startswith("graph separator_tree {") and text.rstrip().endswith("}")
    assert text.count(" -- ") == len(ci.t_prime.edges) + len(ci.back_edges)


def test_contract_rejects_cross_edges():
    from steiner_degree.treewidth import SepNode, SeparatorTree
    g = path(3)
    nodes = (SepNode(0, (0,), (0, 1, 2), False, -1, 0, (1, 2)),
             SepNode(1, (1,), (1,), True, 0, 1), SepNode(2, (2,), (2,), True, 0, 1))
    st = SeparatorTree(nodes, 1, (0, 1, 2))
    with pytest.raises(BackEdgeViolation):
        contract(g, st, {0: (), 1: (), 2: ()}, [[2]], links={1: (), 2: ()})
