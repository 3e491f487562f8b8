import math

import numpy as np
import pytest

from steiner_degree.experiments import spread_solution
from steiner_degree.generators import balanced_binary_tree, path, random_tree, rng_for, star
from steiner_degree.instance import Graph, GstInstance, covers, is_feasible, max_degree
from steiner_degree.lp import build_lp, solve_lp
from steiner_degree.oracle import brute_md_gst, gen_hitting_set_star
from steiner_degree.rounding import (IterationCapExceeded, default_iteration_cap, degree_concentration_report,
                                     edge_marginals, estimate_connect_prob, round_once, round_to_cover,
                                     solve_bd_gst_tree, solve_md_gst_tree)


def _sol(inst, x=None):
    base = solve_lp(build_lp(inst, with_degree_rows=False))
    return base if x is None else base.with_x(np.asarray(x, dtype=float))


def test_all_ones_and_all_zeros():
    inst = GstInstance.build(balanced_binary_tree(2), [[3]], 0)
    rng = rng_for(0)
    assert round_once(_sol(inst, np.ones(6)), rng) == set(inst.graph.edges)
    assert round_once(_sol(inst, np.zeros(6)), rng) == set()


def test_path_telescoping_marginal():
    inst = GstInstance.build(path(3), [[2]], 0)
    sol = _sol(inst, [0.8, 0.4])
    freq = edge_marginals(sol, 100_000, rng_for(1))
    assert freq[1] == pytest.approx(0.4, abs=0.02)
    assert freq[0] == pytest.approx(0.8, abs=0.02)


def test_connect_prob_examples():
    inst = GstInstance.build(path(4), [[0, 3], [3]], 0)
    sol = _sol(inst, np.ones(3))
    assert estimate_connect_prob(sol, [0, 3], 100, rng_for(2)) == 1.0
    assert estimate_connect_prob(sol, [3], 100, rng_for(2)) == 1.0


def test_binary_tree_leaves_spread_solution():
    inst = GstInstance.build(balanced_binary_tree(3), [list(range(7, 15))], 0)
    sol = spread_solution(_sol(inst))
    assert np.allclose(sorted(set(np.round(sol.x, 9))), [0.125, 0.25, 0.5])
    p = estimate_connect_prob(sol, range(7, 15), 10_000, rng_for(3))
    assert p >= 0.1 / math.log2(8)


def test_single_group_returns_path():
    g = Graph.from_edges(5, [(0, 1, 2), (1, 2, 3), (0, 3, 1), (3, 4, 1)])
    inst = GstInstance.build(g, [[2]], 0)
    res = solve_bd_gst_tree(inst, rng_for(4))
    assert res.tree.sorted_edges() == [(0, 1), (1, 2)]
    assert res.cost == 5 and res.iterations == 1


def test_root_groups_give_empty_tree():
    inst = GstInstance.build(path(4), [[0], [0, 2]], 0)
    res = solve_bd_gst_tree(inst, rng_for(5))
    assert res.tree.edges == frozenset() and res.tree.nodes == frozenset({0}) and res.cost == 0


def test_md_examples():
    inst = GstInstance.build(star(3), [[1], [2], [3]])
    assert max_degree(solve_md_gst_tree(inst, rng_for(6))) == 3
    t = solve_md_gst_tree(GstInstance.build(path(6), [[5]], 0), rng_for(6))
    assert max_degree(t) <= 2 and is_feasible(t, GstInstance.build(path(6), [[5]], 0))
    hs = gen_hitting_set_star([{1, 2}, {2, 3}])
    d = max_degree(solve_md_gst_tree(hs, rng_for(6)))
    assert d <= 40 * math.log2(hs.graph.n) ** 2 * brute_md_gst(hs).objective


@pytest.mark.parametrize("seed", range(20))
def test_output_is_pruned_rooted_tree(seed):
    rng = rng_for(seed, 21)
    g = random_tree(40, rng, 10)
    groups = [sorted(int(v) for v in rng.choice(np.arange(1, 40), size=4, replace=False)) for _ in range(5)]
    inst = GstInstance.build(g, groups, 0, cover_threshold=None if seed % 2 else 3)
    res = solve_bd_gst_tree(inst, rng, seed=seed)
    t = res.tree
    assert t.is_tree() and 0 in t.nodes and t.in_graph(g)
    assert covers(t, inst) >= inst.q
    deg = t.degrees()
    for v, d in deg.items():
        if d == 1 and v != 0:
            held = inst.node_groups[v]
            # a leaf must be the only tree node of some group
            assert any(sum(1 for u in t.nodes if gi in inst.node_groups[u]) == 1 for gi in held)


def test_trace_is_deterministic():
    rng_a, rng_b = rng_for(7), rng_for(7)
    g = random_tree(60, rng_for(8), 10)
    inst = GstInstance.build(g, [[10, 20, 30], [40, 50]], 0)
    a = solve_bd_gst_tree(inst, rng_a, seed=7).trace.to_json()
    b = solve_bd_gst_tree(inst, rng_b, seed=7).trace.to_json()
    assert a == b


def test_iteration_cap():
    inst = GstInstance.build(star(2), [[1, 2]], 0)
    sol = _sol(inst, [1e-6, 1e-6])
    with pytest.raises(IterationCapExceeded):
        round_to_cover(sol, rng_for(9), 3)
    assert default_iteration_cap(inst) == 64 * 2 * 2


def test_concentration_report():
    g = balanced_binary_tree(2)
    inst = GstInstance.build(g, [[3]], 0, bounds=[2] * 7)
    sol = _sol(inst, [1.0, 0.5, 1.0, 0.0, 0.0, 0.0])
    union, trace = round_to_cover(sol, rng_for(10), 100)
    rep = {r.node: r for r in degree_concentration_report(trace, sol)}
    assert rep[6].degree == 0 and rep[6].ok
    # node 1: x(delta) = 1 + 1 = 2 = b_v * x_{e_v}
    assert rep[1].load_ratio == pytest.approx(2.0)
    assert rep[1].tau == pytest.approx(trace.iterations * 2)
    assert all(r.independent_sum >= r.degree for r in rep.values())
