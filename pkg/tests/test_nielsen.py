import random

import pytest
from hypothesis import given, settings, strategies as st

from twistlab.errors import BoundExhausted, PreconditionFailed
from twistlab.graphs import Graph, make_graphmap, prepare, rose_of
from twistlab.nielsen import (E_BETA, E_BETA_EBAR, FIXED_LOOP, analyze, build_sigma, find_inp,
                              fixed_subgroup_generators, induced_at, rank_report,
                              sigma_rank_check)
from twistlab.oracle import fixed_words
from twistlab.stallings import SubgroupGraph
from twistlab.words import Basis, Endo

import corpus

B = Basis.of("a b")


def rose(images, names="a b"):
    return prepare(rose_of(Endo.from_strings(Basis.of(names), images))[0])


def test_find_inp_rose_example():
    m = rose(["a", "b a"])
    top = find_inp(m, 1)
    assert top.shape == E_BETA_EBAR and top.text(m) == "b a b'"
    assert m.apply(top.path) == top.path
    low = find_inp(m, 0)
    assert low.shape == FIXED_LOOP and low.text(m) == "a"


def test_zero_stratum_has_no_inp():
    g = Graph.build(["v", "w"], [("a", "v", "v"), ("c", "w", "v"), ("b", "v", "v")])
    m = prepare(make_graphmap(g, {"v": "v", "w": "v"}, {"a": "a", "c": "a", "b": "b a"}))
    zero = [i for i, k in enumerate(m.kinds()) if k == "zero"]
    assert zero and find_inp(m, zero[0]) is None


def test_ebeta_inp_between_vertices():
    # w is not fixed; c d is a Nielsen path from v to the fixed vertex x
    g = Graph.build(["v", "w", "x"], [("a", "v", "v"), ("b", "x", "x"), ("c", "v", "w"),
                                      ("d", "w", "x")])
    m = prepare(make_graphmap(g, {"v": "v", "w": "x", "x": "x"},
                              {"a": "a", "b": "b", "c": "c d", "d": ""}))
    inp = find_inp(m, m.stratum_of(2))
    assert inp.shape == E_BETA and m.graph.format_path(inp.path) == "c d"
    assert (inp.start, inp.end) == (0, 2)


def test_inconclusive_search_is_reported():
    m = rose(["a", "b a", "c b"], "a b c")
    with pytest.raises(BoundExhausted):
        build_sigma(m)


def test_sigma_examples():
    sg = build_sigma(rose(["a", "b a"]))
    assert [p.text(sg.m) for p in sg.inps] == ["a", "b a b'"]
    assert sg.vertices == [0]
    ident = rose(["a", "b", "c"], "a b c")
    assert [p.path for p in build_sigma(ident).inps] == [(1,), (2,), (3,)]
    g = Graph.build(["v", "w"], [("a", "v", "w"), ("b", "w", "v")])
    swap = prepare(make_graphmap(g, {"v": "w", "w": "v"}, {"a": "b", "b": "a"}))
    assert build_sigma(swap).vertices == [] and build_sigma(swap).inps == []


@pytest.mark.parametrize("images,names,rank,s", [
    (["a", "b a"], "a b", 2, 1),
    (["a", "b"], "a b", 2, 1),
    (["a", "b", "c", "d"], "a b c d", 4, 1),
    (["a"], "a", 1, 1),
])
def test_rank_report_examples(images, names, rank, s):
    rep = rank_report(build_sigma(rose(images, names)))
    assert (rep.rank, rep.s, rep.maximal) == (rank, s, True)


def test_analysis_report_format():
    text = analyze(rose(["a", "b a"])).format()
    assert text == ("analysis\nstratum 1 level a\nstratum 2 level b\n"
                    "inp 1 FixedLoop a\ninp 2 EBetaEbar b a b'\n"
                    "component v0 rank 2\nrank 2\ns 1\nmaximal true\nend\n")


def test_fixed_subgroup_generators_examples():
    sg = build_sigma(rose(["a", "b a"]))
    assert [str(w) for w in fixed_subgroup_generators(sg, 0)] == ["a", "b a b'"]
    sg = build_sigma(rose(["a", "b"]))
    assert [str(w) for w in fixed_subgroup_generators(sg, 0)] == ["a", "b"]
    with pytest.raises(PreconditionFailed):
        fixed_subgroup_generators(build_sigma(rose(["a", "b"])), 5)


def test_rank_one_component_generator():
    g = Graph.build(["v", "w"], [("a", "v", "v"), ("b", "w", "w"), ("c", "v", "w"),
                                 ("d", "w", "w")])
    m = prepare(make_graphmap(g, {"v": "v", "w": "w"},
                              {"a": "a", "b": "b", "c": "c b", "d": "d"}))
    a = analyze(m)
    ranks = dict(a.report.components)
    assert ranks == {0: 2, 1: 2}
    aut, _ = induced_at(a.m, 1)
    for w in fixed_subgroup_generators(a.sigma, 1):
        assert aut(w) == w


def test_generators_match_oracle_and_chain_inequalities():
    rng = random.Random(5)
    for _ in range(12):
        m = corpus.scrambled(rng, corpus.good_rep(rng), rng.randint(0, 2))
        a = analyze(m)
        rep = a.report
        assert rep.rank <= rep.n
        for lo, hi in zip(rep.sigma_reduced, rep.sigma_reduced[1:]):
            assert hi <= lo + 1
        assert all(s <= g for s, g in zip(rep.sigma_reduced, rep.graph_reduced))
        if rep.maximal:
            assert rep.sigma_reduced == rep.graph_reduced
        for v, _ in rep.components:
            assert sigma_rank_check(a.sigma, v)
            aut, _ = induced_at(a.m, v)
            gens = fixed_subgroup_generators(a.sigma, v)
            sg = SubgroupGraph(aut.basis, gens)
            assert all(sg.contains(w) for w in fixed_words(aut, 5))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000))
def test_inps_are_fixed_and_unique_per_height(seed):
    rng = random.Random(seed)
    m = corpus.scrambled(rng, corpus.good_rep(rng), rng.randint(0, 3))
    a = analyze(m)
    heights = [p.height for p in a.sigma.inps]
    assert len(heights) == len(set(heights))
    for p in a.sigma.inps:
        assert a.m.apply(p.path) == p.path
