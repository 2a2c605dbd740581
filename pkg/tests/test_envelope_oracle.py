import random
from itertools import combinations

import pytest
from hypothesis import given, settings, strategies as st

from feyncat.graph_core import Graph, Subgraph, corolla, is_tree
from feyncat.morphisms import find_isomorphism, SizeLimitExceeded, contract_edge
from feyncat.decorations import surface_type
from feyncat.envelope_oracle import (
    graph_key, ribbon_key, enumerate_connected_graphs, enumerate_ribbon_graphs, ribbon_contract,
    pi0_forest_contraction, realizable_surface_types, genus_bijection, ribbon_bijection,
    spanning_tree_mutation_graph, is_connected, tree_exchange, classify_nc_fibers, report_lines,
)
from helpers import random_graph, random_iso, theta


def test_small_enumerations():
    (c,) = enumerate_connected_graphs(["1"], 0)
    assert c.tails == ["1"] and len(c.vertices) == 1
    gs = enumerate_connected_graphs([], 1)
    shapes = sorted((len(g.vertices), len(g.edges)) for g in gs)
    assert shapes == [(1, 0), (1, 1), (2, 1)]
    assert [graph_key(g) for g in enumerate_connected_graphs(["1", "2"], 2)] == \
        [graph_key(g) for g in enumerate_connected_graphs(["1", "2"], 2)]
    with pytest.raises(SizeLimitExceeded):
        enumerate_connected_graphs([], 7)


def test_dedup_agrees_with_isomorphism_search():
    # canonical keys versus the backtracking search, pairwise
    gs = enumerate_connected_graphs(["1", "2"], 2)
    for a, b in combinations(gs, 2):
        assert find_isomorphism(a, b, fix_tails=True) is None
    for g in gs:
        assert g.tails == ["1", "2"] and len(g.components()) == 1


@given(st.integers(0, 10**6))
@settings(max_examples=60, deadline=None)
def test_graph_key_is_invariant(seed):
    rng = random.Random(seed)
    g = random_graph(rng)
    inner = [f for f in sorted(g.flags) if g.is_edge_flag(f)]
    vs = sorted(g.vertices)
    # rename edge flags and vertices, keep tails
    h = g.rename(dict(zip(inner, rng.sample(inner, len(inner)))), dict(zip(vs, rng.sample(vs, len(vs)))))
    assert find_isomorphism(g, h, fix_tails=True) is not None
    assert graph_key(g) == graph_key(h)


def test_genus_case_examples():
    r = genus_bijection(["1", "2"], 3)
    assert r["invariants"] == [0, 1, 2, 3] and r["injective"] and r["surjective"]
    # one-vertex graphs with the same loop number are one class
    roses = [g for g in enumerate_connected_graphs(["1"], 2) if len(g.vertices) == 1]
    classes = pi0_forest_contraction(roses + [g for g in enumerate_connected_graphs(["1"], 2)
                                               if len(g.vertices) > 1])
    assert sorted(c.invariant for c in classes) == [0, 1, 2]


def test_ribbon_case_small():
    r = ribbon_bijection(["1"], 2)
    assert r["injective"] and r["surjective"]
    assert r["classes"] == len(realizable_surface_types(["1"], 2))


def test_every_class_has_one_vertex_representative():
    for c in pi0_forest_contraction(enumerate_connected_graphs(["1"], 3)):
        assert len(c.representative.vertices) == 1


def test_ribbon_contract_keeps_type():
    for rg in enumerate_ribbon_graphs(["1"], 2):
        g = rg.graph
        for a, b in g.edges:
            if g.boundary[a] != g.boundary[b]:
                c = ribbon_contract(rg, (a, b))
                assert next(iter(surface_type(c).values())) == next(iter(surface_type(rg).values()))
                assert ribbon_key(c) is not None


def test_theta_tree_graph():
    T = spanning_tree_mutation_graph(theta())
    assert T.number_of_nodes() == 3 and T.number_of_edges() == 3 and is_connected(T)


def test_tree_input():
    path = Graph(["a", "b", "c", "d"], ["u", "v", "w"], {"a": "u", "b": "v", "c": "v", "d": "w"},
                 [("a", "b"), ("c", "d")])
    T = spanning_tree_mutation_graph(path)
    assert T.number_of_nodes() == 1 and is_connected(T)


def test_tree_exchange():
    g = theta()
    t = frozenset([("a1", "b1")])
    assert tree_exchange(g, t, ("a1", "b1"), ("a2", "b2")) == frozenset([("a2", "b2")])


def test_nc_fibers():
    cl = classify_nc_fibers(["1", "2"], 1, 1)
    parts = [c.partition for c in cl]
    assert len(parts) == len(set(parts)) == 18
    # two corollas merging onto *_{1,2}
    assert ((("1",), 0), (("2",), 0)) in parts
    # equal blocks but different genus labels are different classes
    assert ((("1", "2"), 0),) in parts and ((("1", "2"), 1),) in parts


def test_report_lines():
    lines = report_lines(pi0_forest_contraction(enumerate_connected_graphs(["1"], 1)))
    assert len(lines) == 2 and lines[0].startswith("class 0:")
