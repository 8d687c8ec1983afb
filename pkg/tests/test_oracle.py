from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings

from sparsecol import (
    Graph,
    OracleSizeError,
    SamplerConfig,
    brute_chromatic,
    brute_strong_index,
    chvatal_graph,
    complete_graph,
    cycle_graph,
    exact_sampler_stats,
    membership_probability_exact,
    path_graph,
    petersen_graph,
)

from conftest import graphs


def test_chromatic_examples():
    assert brute_chromatic(complete_graph(4)) == 4
    assert brute_chromatic(cycle_graph(5)) == 3
    assert brute_chromatic(chvatal_graph()) == 4
    assert brute_chromatic(petersen_graph()) == 3
    assert brute_chromatic(Graph.empty(3)) == 1
    assert brute_chromatic(Graph.empty(0)) == 0


def test_chromatic_cap():
    with pytest.raises(OracleSizeError):
        brute_chromatic(Graph.empty(25))


@settings(max_examples=60, deadline=None)
@given(graphs(max_vertices=9))
def test_chromatic_is_minimal(g):
    import itertools

    k = brute_chromatic(g)
    assert k <= g.max_degree + 1
    # no proper colouring with k - 1 colours exists
    if k >= 2 and g.n <= 7:
        for assign in itertools.product(range(k - 1), repeat=g.n):
            assert any(assign[u] == assign[v] for u, v in g.edges())


def test_strong_index_examples():
    assert brute_strong_index(path_graph(3)) == 2
    assert brute_strong_index(cycle_graph(5)) == 5
    assert brute_strong_index(path_graph(4)) == 3


def test_strong_index_cap():
    with pytest.raises(OracleSizeError):
        brute_strong_index(complete_graph(8))


def test_sampler_k2():
    ex = exact_sampler_stats(complete_graph(2), Fraction(1))
    assert ex.p_in == (Fraction(1, 2), Fraction(1, 2))
    assert sum(ex.p_in) == 1


def test_sampler_k3():
    ex = exact_sampler_stats(complete_graph(3), Fraction(1, 2))
    assert ex.p_in == (Fraction(7, 24),) * 3


def test_sampler_edgeless():
    p = Fraction(3, 7)
    ex = exact_sampler_stats(Graph.empty(3), p)
    assert ex.p_in == (p, p, p)


def test_sampler_size_cap_and_range():
    with pytest.raises(OracleSizeError):
        exact_sampler_stats(Graph.empty(13), Fraction(1, 2))
    with pytest.raises(ValueError):
        exact_sampler_stats(complete_graph(2), Fraction(3, 2))


@settings(max_examples=40, deadline=None)
@given(graphs(max_vertices=7))
def test_sampler_matches_binomial_form(g):
    for ratio in (Fraction(1, 3), Fraction(1)):
        cfg = SamplerConfig(ratio * max(g.max_degree, 1))
        ex = exact_sampler_stats(g, cfg.activation_probability(g))
        for v in range(g.n):
            assert ex.p_in[v] == membership_probability_exact(g, v, cfg)
            assert ex.inclusion_exclusion_holds(v)
            assert 0 <= ex.p_nonempty[v] <= 1


def test_permutation_cap_skips_joint_statistics():
    g = cycle_graph(8)
    ex = exact_sampler_stats(g, Fraction(1), permutation_cap=5)
    assert ex.skipped_subsets == 1
    assert ex.e_ir[0] is None and ex.inclusion_exclusion_holds(0)
    cfg = SamplerConfig(2)
    assert ex.p_in[0] == membership_probability_exact(g, 0, cfg)


def test_sampler_json():
    js = exact_sampler_stats(path_graph(3), Fraction(1, 2)).to_json()
    assert js["p_in"][0]["den"] > 0 and js["skipped_subsets"] == 0
