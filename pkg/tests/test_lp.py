import numpy as np
import pytest

from steiner_degree.generators import path, random_tree, random_tree_instance, rng_for, star
from steiner_degree.instance import Graph, GstInstance
from steiner_degree.lp import (build_lp, characteristic_solution, dump_lp, group_flows, integral_point,
                               min_cut_values, monotonize, row_activity, solve_cut_lp, solve_lp,
                               verify_fractional)
from steiner_degree.oracle import brute_md_gst, brute_min_cost_tree
from steiner_degree.simplex import LpInfeasible, LpUnbounded, solve_general, solve_standard


def test_star_two_members_lp_value_one():
    inst = GstInstance.build(star(2), [[1, 2]], 0)
    sol = solve_lp(build_lp(inst, with_degree_rows=False))
    assert sol.objective == pytest.approx(1.0, abs=1e-9)
    assert sol.x.sum() == pytest.approx(1.0, abs=1e-9)


def test_path_forces_both_edges():
    g = Graph.from_edges(3, [(0, 1, 3), (1, 2, 4)])
    sol = solve_lp(build_lp(GstInstance.build(g, [[2]], 0)))
    assert sol.objective == pytest.approx(7.0)
    assert np.allclose(sol.x, 1.0)


def test_root_degree_one_forces_equality():
    inst = GstInstance.build(star(2), [[1, 2]], 0, bounds=[1, 1, 1])
    sol = solve_lp(build_lp(inst))
    assert sol.objective == pytest.approx(1.0)
    assert sol.x.sum() == pytest.approx(1.0)


def test_root_group_costs_nothing():
    inst = GstInstance.build(path(4), [[0]], 0)
    sol = solve_lp(build_lp(inst))
    assert sol.objective == pytest.approx(0.0) and np.allclose(sol.x, 0.0)


def test_infeasible_degree_rows():
    inst = GstInstance.build(star(3), [[1], [2], [3]], 0, bounds=[2, 1, 1, 1])
    with pytest.raises(LpInfeasible):
        solve_lp(build_lp(inst))


def _sol_with(inst, x):
    base = solve_lp(build_lp(inst, with_degree_rows=False))
    return base.with_x(np.asarray(x, dtype=float))


def test_monotonize_examples():
    inst = GstInstance.build(path(3), [[2]], 0)
    mono = _sol_with(inst, [1.0, 1.0])
    assert monotonize(mono) is mono
    fixed = monotonize(_sol_with(inst, [0.4, 0.7]))
    assert fixed.x.tolist() == [0.4, 0.4]
    depth1 = _sol_with(GstInstance.build(star(2), [[1]], 0), [1.0, 0.0])
    assert monotonize(depth1).x.tolist() == [1.0, 0.0]


@pytest.mark.parametrize("seed", range(20))
def test_monotonize_never_increases(seed):
    rng = rng_for(seed, 11)
    inst = GstInstance.build(random_tree(9, rng, 5), [[int(rng.integers(1, 9))]], 0)
    sol = _sol_with(inst, rng.random(8))
    out = monotonize(sol)
    assert np.all(out.x <= sol.x + 1e-15) and out.objective <= sol.objective + 1e-12
    assert out.x_f == sol.x_f


def test_verify_examples():
    inst = GstInstance.build(path(3), [[2]], 0, bounds=[1, 2, 1])
    rep = verify_fractional(characteristic_solution(inst, 0, path(3).edges))
    assert rep.min_group_flow >= 1 and rep.max_degree_violation == 0 and rep.feasible
    zero = verify_fractional(_sol_with(inst, [0.0, 0.0]))
    assert zero.min_group_flow == 0


@pytest.mark.parametrize("seed", range(50))
def test_oracle_trees_verify_feasible(seed):
    rng = rng_for(seed, 12)
    inst = random_tree_instance(int(rng.integers(4, 11)), int(rng.integers(1, 4)), 3, rng, bounded=False)
    res = brute_md_gst(inst)
    rep = verify_fractional(characteristic_solution(inst, 0, res.best_tree.edges))
    assert rep.feasible


@pytest.mark.parametrize("seed", range(30))
def test_integral_points_satisfy_every_row(seed):
    inst = random_tree_instance(9, 3, 3, rng_for(seed, 13))
    opt = brute_min_cost_tree(inst)
    model = build_lp(inst, monotone_rows=True)
    ub, eq = row_activity(model, integral_point(model, opt.best_tree.edges))
    assert ub.max() <= 1e-12 and np.abs(eq).max() <= 1e-12


@pytest.mark.parametrize("seed", range(15))
def test_flow_lp_equals_cut_lp(seed):
    inst = random_tree_instance(8, 2, 3, rng_for(seed, 14))
    flow = solve_lp(build_lp(inst)).objective
    assert flow == pytest.approx(solve_cut_lp(inst), abs=1e-7)


@pytest.mark.parametrize("seed", range(15))
def test_min_cuts_match_flows(seed):
    rng = rng_for(seed, 15)
    inst = GstInstance.build(random_tree(8, rng, 5), [[3, 5], [int(rng.integers(1, 8))]], 0)
    sol = _sol_with(inst, rng.random(7))
    assert np.allclose(group_flows(sol), min_cut_values(sol), atol=1e-12)


@pytest.mark.parametrize("seed", range(8))
def test_exact_simplex_agrees_with_highs(seed):
    inst = random_tree_instance(6, 2, 2, rng_for(seed, 16))
    model = build_lp(inst, monotone_rows=True)
    a, b = solve_lp(model), solve_lp(model, method="exact")
    assert a.objective == pytest.approx(b.objective, abs=1e-6)


def test_simplex_small_problems():
    from fractions import Fraction as F
    sol = solve_standard([-1, -1, 0, 0], [[1, 2, 1, 0], [3, 1, 0, 1]], [4, 6])
    assert sol.objective == F(-14, 5)
    gen = solve_general([1, 1], A_ub=[[-1, -1]], b_ub=[-1], upper=[F(1), F(1)])
    assert gen.objective == 1
    with pytest.raises(LpInfeasible):
        solve_general([1], A_ub=[[1], [-1]], b_ub=[1, -2])
    with pytest.raises(LpUnbounded):
        solve_general([-1], A_ub=[[-1]], b_ub=[0])


def test_dump_lp(tmp_path):
    inst = GstInstance.build(Graph.from_edges(3, [(0, 1, 2), (1, 2)]), [[2]], 0, bounds=[1, 2, 1])
    out = tmp_path / "m.lp"
    dump_lp(build_lp(inst), out)
    text = out.read_text()
    for word in ("Minimize", "Subject To", "Bounds", "End", "x_0_1"):
        assert word in text
