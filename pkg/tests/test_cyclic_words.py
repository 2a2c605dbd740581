import random

import pytest
from hypothesis import given, settings, strategies as st
from networkx.utils import UnionFind

from feyncat.graph_core import Graph
from feyncat.decorations import PolycyclicOrder, RibbonGraph, SurfaceType, surf_glue, surf_self_glue
from feyncat.cyclic_words import (
    CyclicWord, WordError, NotALoop, BadSplit, NotATail, MultipleVertices, Move, parse, to_string,
    graph_from_word, word_from_graph, surface_type, boundary_profile, mutate, lemma_move, inverse_move, replay,
    neighbours, normalize, is_normal_form, normal_form_for, glue_words, self_glue, rename, shape_key, all_words,
    mutation_class, chord_diagram,
)
from helpers import random_word

seeds = st.integers(0, 10**6)


def test_parse_and_print():
    w = parse("(A t B C t* D)")
    assert w.tails == ["A", "B", "C", "D"] and w.loops == [("t", "t*")]
    assert parse(to_string(w)) == w
    assert parse("(B A)") == parse("(A B)")
    odd = parse("(1 2 3 4 | 1=2 3=4)")
    assert parse(to_string(odd)) == odd
    with pytest.raises(WordError):
        parse("(a a)")
    with pytest.raises(WordError):
        parse("(a* b)")


def test_rose_word():
    g = Graph(["1", "2", "3", "4"], ["v"], {f: "v" for f in "1234"}, {"1": "2", "2": "1", "3": "4", "4": "3"})
    w = word_from_graph(RibbonGraph(g, {"v": PolycyclicOrder.from_cycles([["1", "2", "3", "4"]])}))
    assert rename(w, {"1": "t", "2": "t*", "3": "u", "4": "u*"}) == parse("(t t* u u*)")
    two = Graph(["a"], ["v", "w"], {"a": "v"}, {})
    with pytest.raises(MultipleVertices):
        word_from_graph(RibbonGraph(two, {"v": [["a"]]}))


def test_corolla_word():
    c = Graph(["a", "b"], ["v"], {"a": "v", "b": "v"}, {})
    w = word_from_graph(RibbonGraph(c, {"v": [["a", "b"]]}))
    assert w.tails == ["a", "b"] and not w.loops


@given(seeds)
@settings(max_examples=80, deadline=None)
def test_graph_round_trip(seed):
    rng = random.Random(seed)
    w = random_word(rng, rng.randint(0, 3), rng.randint(0, 5))
    assert word_from_graph(graph_from_word(w)) == w


def test_lemma_move():
    w = parse("(A t B C t* D)")
    assert lemma_move(w, "t", 1, 1) == parse("(D t C B t* A)")
    # empty C
    assert lemma_move(parse("(A t B t* C)"), "t", 1, 1) == parse("(A C t B t*)")
    assert mutate(parse("(A t B t* C)"), "t", (0, 1)) == parse("(A C t B t*)")
    with pytest.raises(NotALoop):
        mutate(w, "A")
    with pytest.raises(BadSplit):
        mutate(w, "t", (5, 0))


@given(seeds)
@settings(max_examples=150, deadline=None)
def test_mutation_invariants(seed):
    rng = random.Random(seed)
    w = random_word(rng, rng.randint(0, 3), rng.randint(1, 4))
    moves = list(neighbours(w))
    if not moves:
        return
    m, v = rng.choice(moves)
    assert surface_type(v) == surface_type(w)
    assert boundary_profile(v) == boundary_profile(w)
    back = inverse_move(w, m)
    assert mutate(v, back.loop, (back.inner, back.outer)) == w


@pytest.mark.parametrize("text,st_", [
    ("(a b a* b*)", SurfaceType(1, 1)),
    ("(e e*)", SurfaceType(0, 2)),
    ("()", SurfaceType(0, 1)),
])
def test_tail_free_types(text, st_):
    nf, t, trace = normalize(parse(text))
    assert t == st_ and trace == [] and nf.word == parse(text)


def test_normalize_examples():
    nf, t, trace = normalize(parse("(A t B C t* D)"))
    assert is_normal_form(nf.word) and replay(parse("(A t B C t* D)"), trace) == nf.word
    assert [str(m) for m in trace] == ["t:0,1"]
    w = parse("(s A t B t* C s*)")
    nf, t, trace = normalize(w)
    assert replay(w, trace) == nf.word and t == surface_type(w)
    assert nf.g == 0 and nf.p_slots == 1


@given(seeds)
@settings(max_examples=150, deadline=None)
def test_normalize_properties(seed):
    rng = random.Random(seed)
    w = random_word(rng, rng.randint(0, 4), rng.randint(0, 5))
    nf, t, trace = normalize(w)
    assert replay(w, trace) == nf.word
    assert surface_type(nf.word) == t == surface_type(w)
    assert normalize(nf.word)[2] == [] and normalize(nf.word)[0].word == nf.word
    if w.tails:
        tmpl = normal_form_for(t)
        assert is_normal_form(tmpl) and surface_type(tmpl) == t
        assert nf.g == t.g and nf.p_slots == t.p
        sizes = [len(c) for c in nf.cycles]
        assert sizes == sorted(sizes) and all(s > 0 for s in sizes)


def test_glue_examples():
    g = glue_words(parse("(s)"), "s", parse("(t)"), "t")
    assert g == parse("()") and surface_type(g) == surf_glue(
        surface_type(parse("(s)")), "s", surface_type(parse("(t)")), "t")
    assert self_glue(parse("(a b)"), "a", "b") == parse("(a a*)")
    with pytest.raises(NotATail):
        glue_words(parse("(s)"), "x", parse("(t)"), "t")


@given(seeds)
@settings(max_examples=150, deadline=None)
def test_glue_matches_surface_table(seed):
    rng = random.Random(seed)
    w1 = random_word(rng, rng.randint(1, 3), rng.randint(0, 3), "a")
    w2 = random_word(rng, rng.randint(1, 3), rng.randint(0, 3), "b")
    s, t = rng.choice(w1.tails), rng.choice(w2.tails)
    assert surface_type(glue_words(w1, s, w2, t)) == surf_glue(surface_type(w1), s, surface_type(w2), t)
    w = random_word(rng, rng.randint(2, 4), rng.randint(0, 3), "c")
    s, t = rng.sample(w.tails, 2)
    assert surface_type(self_glue(w, s, t)) == surf_self_glue(surface_type(w), s, t)


def _classes(tails, loops):
    words = list(all_words(tails, loops))
    keys = {shape_key(w): w for w in words}
    uf = UnionFind(keys)
    for k, w in keys.items():
        for _, v in neighbours(w):
            uf.union(k, shape_key(v))
    return keys, list(uf.to_sets())


@pytest.mark.parametrize("tails", [["1"], ["1", "2"]])
@pytest.mark.parametrize("loops", [0, 1, 2])
def test_classes_biject_with_types(tails, loops):
    keys, classes = _classes(tails, loops)
    types = [{surface_type(keys[k]) for k in c} for c in classes]
    assert all(len(t) == 1 for t in types)
    flat = [next(iter(t)) for t in types]
    assert len(set(flat)) == len(flat)


def test_mutation_class_bfs():
    w = parse("(A x0 x0* x1 x1*)")
    assert shape_key(w) in mutation_class(w)
    assert shape_key(parse("(A x0 x1 x0* x1*)")) not in mutation_class(w)


def test_chord_diagram():
    out = chord_diagram(parse("(A t t*)"))
    assert out.splitlines()[0] == "points 3" and "chord 1 2" in out
