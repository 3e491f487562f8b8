import math
from fractions import Fraction

import numpy as np
import pytest

from steiner_degree.experiments import oracle_gst, pair_probabilities
from steiner_degree.generators import path, rng_for, star
from steiner_degree.instance import GstInstance, KTreeInstance, is_feasible, max_degree
from steiner_degree.ktree import (attach_binary_tree_gadget, bin_count, find_prime, full_bins_exists,
                                  pair_hit_probability, random_bins, residue_counts, solve_md_ktree,
                                  two_point_bins)
from steiner_degree.oracle import brute_md_ktree


def test_find_prime_examples():
    assert find_prime(3) == 7 and find_prime(1) == 2 and find_prime(10) == 23


def test_bin_counts():
    assert bin_count(4) == 1 and bin_count(2) == 1
    assert bin_count(64) == 3
    bins = random_bins(list(range(64)), 64, rng_for(0))
    assert len(bins) <= 3 and sorted(v for b in bins for v in b) == list(range(64))
    assert random_bins([5, 6, 7], 3, rng_for(0)) == [(5, 6, 7)]


def test_two_point_formula():
    ba = two_point_bins(list(range(10)), 3, 2, 3, 7)
    assert ba.bin_of(4) == 1
    ident = two_point_bins(list(range(10)), 3, 1, 0, 7)
    assert all(ident.bin_of(i) == (i % 7) % 3 for i in range(10))
    with pytest.raises(ValueError):
        two_point_bins([0], 3, 0, 0, 7)


def test_residue_counts_and_hit_probability():
    assert residue_counts(2, 5) == [3, 2]
    ba = two_point_bins([0, 1], 2, 1, 0, 5)
    assert ba.hit_probability(0) == 0.6


@pytest.mark.parametrize("k", range(1, 65))
def test_bin_lower_bound_exact(k):
    p = find_prime(k)
    for c in residue_counts(k, p):
        assert Fraction(c, p) >= Fraction(1, k) - Fraction(2, p)


def test_bins_can_exceed_one_over_k():
    # the "less than 1/k" upper claim fails whenever k does not divide p
    k, p = 3, find_prime(3)
    assert max(Fraction(c, p) for c in residue_counts(k, p)) > Fraction(1, k)


@pytest.mark.parametrize("k", range(1, 9))
def test_pair_probabilities(k):
    p = find_prime(k)
    pp = pair_probabilities(k, p)
    counts = np.array(residue_counts(k, p))
    exact = counts * (counts - 1) / (p * (p - 1))
    off = ~np.eye(p, dtype=bool)
    assert np.allclose(pp[off], np.broadcast_to(exact, pp[off].shape))
    assert pp[off].max() <= (1 / k + 1 / p) ** 2 + 1e-12
    # spot-check against direct enumeration
    assert pp[0, p - 1, 0] == pytest.approx(pair_hit_probability(0, p - 1, 0, k, p))


def test_full_bins_examples():
    a, b, full = full_bins_exists([0], 1, 2)
    assert full == 1
    a, b, full = full_bins_exists(range(8), 8, 17)
    assert full >= 3 and 1 <= a <= 16 and 0 <= b <= 16


@pytest.mark.parametrize("seed", range(20))
def test_full_bins_random(seed):
    r = rng_for(seed, 41).choice(64, size=16, replace=False)
    assert full_bins_exists(sorted(r), 16)[2] >= math.ceil(16 / 3)


def test_gadget():
    base = GstInstance.build(star(2), [[1], [2]], 0)
    one = attach_binary_tree_gadget(base, 1)
    assert one.graph.n == 4 and all(3 in g for g in one.groups)
    four = attach_binary_tree_gadget(base, 4)
    assert four.graph.n == 3 + 7
    deg = [len(four.graph.adj[v]) for v in range(3, 10)]
    assert max(deg) <= 3
    assert len(four.graph.adj[0]) == len(base.graph.adj[0]) + 1
    leaves = [v for v in range(3, 10) if len(four.graph.adj[v]) == 1]
    assert len(leaves) == 4 and all(set(leaves) <= set(g) for g in four.groups)


def test_k_one_single_round():
    inst = KTreeInstance.build(path(5), [1, 3], 1)
    out = solve_md_ktree(inst, oracle_gst, rng=rng_for(0))
    assert out.rounds == 1 and out.degree == 0 and len(out.terminals) >= 1


@pytest.mark.parametrize("mode", ["randomized", "derandomized"])
@pytest.mark.parametrize("k", [2, 4, 6])
def test_path_degree_at_most_two(mode, k):
    inst = KTreeInstance.build(path(8), range(8), k)
    out = solve_md_ktree(inst, oracle_gst, mode, rng=rng_for(k))
    assert len(out.terminals) >= k and out.degree <= 2 and out.tree.is_tree()


@pytest.mark.parametrize("seed", range(6))
def test_derandomized_is_deterministic_and_valid(seed):
    from steiner_degree.experiments import ktree_instance
    inst = ktree_instance(rng_for(seed, 42), n_max=9)
    inst = KTreeInstance.build(inst.graph, inst.terminals, min(inst.k, 5))
    a = solve_md_ktree(inst, oracle_gst, "derandomized", order_seed=seed)
    b = solve_md_ktree(inst, oracle_gst, "derandomized", order_seed=seed)
    assert a.to_json() == b.to_json() and a.rows == b.rows
    assert len(a.terminals) >= inst.k and a.tree.is_tree() and a.tree.in_graph(inst.graph)
    d_star = brute_md_ktree(inst).objective
    assert a.degree <= 8 * math.ceil(math.log2(inst.k + 2)) * max(d_star, 1)
