import json
from fractions import Fraction

import pytest

from steiner_degree.instance import (Graph, GstInstance, InstanceError, KTreeInstance, RootedTree, SubTree,
                                     check, covers, gst_from_json, is_feasible, ktree_from_json, max_degree,
                                     to_json, validate)
from steiner_degree.generators import path, star


def test_validate_ok_minimal_path():
    inst = GstInstance.build(path(4), [[3]], 0)
    assert validate(inst) == []


def test_validate_node_out_of_range():
    inst = GstInstance.build(path(4), [[9]], 0)
    assert any("node out of range" in e for e in validate(inst))


def test_validate_k_exceeds_terminals():
    inst = KTreeInstance.build(path(4), [0, 1, 2], 5)
    assert any("k exceeds terminal count" in e for e in validate(inst))


def test_validate_reports_every_error():
    inst = GstInstance.build(path(4), [[], [7]], 0, bounds=[1, 0, 1, 1])
    errs = validate(inst)
    assert len(errs) >= 3
    with pytest.raises(InstanceError):
        check(inst)


def test_graph_rejects_loops_and_parallel_edges():
    assert validate(GstInstance.build(Graph.from_edges(3, [(0, 0), (0, 1)]), [[1]]))
    assert validate(GstInstance.build(Graph.from_edges(3, [(0, 1), (1, 0)]), [[1]]))


def test_max_degree_examples():
    assert max_degree(SubTree.from_edges(star(4).edges)) == 4
    assert max_degree(SubTree.from_edges([(0, 1)])) == 1
    assert max_degree(SubTree.from_edges(path(5).edges)) == 2
    assert max_degree(SubTree.single(3)) == 0


def test_covers_examples():
    g = path(3)
    inst = GstInstance.build(g, [[1], [2]], 0)
    assert covers(SubTree.from_edges([(0, 1)]), inst) == 1
    assert covers(SubTree.from_edges(g.edges), inst) == 2
    assert covers(SubTree.single(0), GstInstance.build(g, [[0]], 0)) == 1


def test_feasible_needs_root():
    inst = GstInstance.build(path(3), [[2]], 0)
    assert not is_feasible(SubTree.single(2), inst)
    assert is_feasible(SubTree.from_edges(path(3).edges), inst)


def test_subtree_shape_checks():
    assert SubTree.from_edges([(0, 1), (1, 2)]).is_tree()
    assert not SubTree.from_edges([(0, 1), (2, 3)]).is_tree()
    assert not SubTree.from_edges([(0, 1), (1, 2), (0, 2)]).is_tree()
    assert not SubTree.from_edges([(0, 2)]).in_graph(path(3))


def test_json_round_trip_with_rational_costs():
    g = Graph.from_edges(3, [(0, 1, "1/3"), (1, 2, 2.5)])
    inst = GstInstance.build(g, [[2]], 0, bounds=[1, 2, 1], cover_threshold=1)
    doc = json.loads(json.dumps(to_json(inst)))
    back = gst_from_json(doc)
    assert back == inst
    assert back.graph.cost(0, 1) == Fraction(1, 3)
    assert back.graph.cost(1, 2) == Fraction(5, 2)


def test_json_rejects_unknown_fields():
    with pytest.raises(InstanceError):
        gst_from_json({"n": 2, "edges": [[0, 1]], "groups": [[1]], "colour": "red"})


def test_ktree_json():
    inst = ktree_from_json({"n": 3, "edges": [[0, 1], [1, 2]], "terminals": [0, 2], "k": 2})
    assert inst.k == 2 and inst.terminals == (0, 2)


def test_cover_threshold_bounds():
    assert validate(GstInstance.build(path(3), [[1]], 0, cover_threshold=2))
    assert validate(GstInstance.build(path(3), [[1]], 0, cover_threshold=0))


def test_rooted_tree_paths():
    rt = RootedTree.of(path(4), 0)
    assert rt.path_to_root(3) == [(2, 3), (1, 2), (0, 1)]
    assert rt.parent_edge(1) == (0, 1)
