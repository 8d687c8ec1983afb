from __future__ import annotations

import random

import pytest

from sparsecol import (
    Graph,
    NibbleConfig,
    StrongColouring,
    brute_strong_index,
    cycle_graph,
    gnp_graph,
    path_graph,
    star_graph,
    strong_edge_colour,
    theorem8_sparsity_constant,
    validate_strong,
)
from sparsecol.strong import strong_coefficient, trivial_strong_bound


@pytest.mark.parametrize(
    "g, count", [(path_graph(3), 2), (cycle_graph(5), 5), (star_graph(6), 6), (path_graph(4), 3)]
)
def test_examples(g, count):
    sc, rep = strong_edge_colour(g, NibbleConfig())
    assert sc.colour_count == count
    assert rep.validation.passed
    assert rep.trivial_bound == trivial_strong_bound(g.max_degree)


def test_edgeless_rejected():
    with pytest.raises(ValueError):
        strong_edge_colour(Graph.empty(4), NibbleConfig())


def test_validate_each_edge_own_colour():
    g = cycle_graph(6)
    sc = StrongColouring({e: i for i, e in enumerate(g.edges())})
    assert validate_strong(g, sc).passed


def test_validate_incident_edges_fail():
    g = path_graph(3)
    val = validate_strong(g, StrongColouring({(0, 1): 0, (1, 2): 0}))
    assert not val.passed and len(val.violations) == 1


def test_validate_joined_edges_fail():
    g = path_graph(4)
    val = validate_strong(g, StrongColouring({(0, 1): 0, (1, 2): 1, (2, 3): 0}))
    assert not val.passed


def test_validate_missing_edge():
    val = validate_strong(path_graph(3), StrongColouring({(0, 1): 0}))
    assert not val.passed and val.missing_edges == ((1, 2),)


def test_strong_sparsity_constant():
    assert strong_coefficient(0) == pytest.approx(0.9)
    c, s = theorem8_sparsity_constant(0.228)
    assert c == pytest.approx(1.4468, abs=1e-4)
    assert s == pytest.approx(0.2766, abs=1e-4)
    theorem8_sparsity_constant(0.3)
    with pytest.raises(ValueError):
        theorem8_sparsity_constant(0.31)
    with pytest.raises(ValueError):
        theorem8_sparsity_constant(-0.01)


def test_random_graphs_valid_and_bounded():
    rng = random.Random(2)
    for i in range(60):
        g = gnp_graph(rng.randint(4, 30), rng.uniform(0.05, 0.3), seed=i)
        if g.edge_count == 0 or g.max_degree > 8:
            continue
        sc, rep = strong_edge_colour(g, NibbleConfig(seed=i))
        assert rep.validation.passed
        assert sc.colour_count <= trivial_strong_bound(g.max_degree)
        assert set(sc.edge_colours) == set(g.edges())


def test_small_graphs_match_oracle():
    rng = random.Random(8)
    checked = 0
    for i in range(200):
        g = gnp_graph(rng.randint(3, 8), rng.uniform(0.2, 0.6), seed=i)
        if not 1 <= g.edge_count <= 10:
            continue
        sc, _ = strong_edge_colour(g, NibbleConfig(seed=i))
        opt = brute_strong_index(g)
        assert sc.colour_count >= opt
        checked += 1
    assert checked > 50


def test_girth_six_graph_runs_nibble_on_core():
    from sparsecol import projective_plane_incidence

    # girth 6 and Delta = 8: every edge has exactly 2 * 8 * 7 = 112 neighbours in L(G)^2
    g = projective_plane_incidence(7)
    sc, rep = strong_edge_colour(g, NibbleConfig(seed=1), epsilon=0.25)
    assert rep.core_degree == 112 and rep.core_size == g.edge_count
    assert rep.validation.passed and not rep.fallback_used
    assert rep.core_sigma is not None and rep.sigma_used == pytest.approx(0.277)
    assert sc.colour_count <= rep.trivial_bound
    js = rep.to_json()
    assert {"colour_count", "trivial_bound", "budget_1772", "core_size", "validation"} <= set(js)


def test_default_epsilon_core_empty_at_small_delta():
    from sparsecol import projective_plane_incidence

    _, rep = strong_edge_colour(projective_plane_incidence(7), NibbleConfig())
    assert rep.core_size == 0 and rep.peeled == 456
