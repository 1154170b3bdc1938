import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from _support import all_simple_path_costs, random_geometric_graph
from rfdmrp.rfd import (
    RfdParams,
    StrandedDrop,
    TerrainGraph,
    decreasing_gradient,
    dijkstra_path,
    erode_and_deposit,
    forward_probabilities,
    path_cost,
    run_rfd,
    select_forward_position,
)


def line_graph(altitudes=None):
    # 0 -- 1 -- 2, unit spacing, destination 2
    pos = {0: (0.0, 0.0), 1: (1.0, 0.0), 2: (2.0, 0.0)}
    return TerrainGraph(pos, [(0, 1), (1, 2)], [0], 2, altitudes=altitudes)


def diamond_graph():
    # two branches of very different length between source 3 and destination 0
    pos = {0: (0.0, 0.0), 1: (10.0, 5.0), 2: (10.0, -40.0), 3: (20.0, 0.0)}
    edges = [(3, 1), (1, 0), (3, 2), (2, 0)]
    return TerrainGraph(pos, edges, [3], 0)


def test_default_altitudes_are_distance_to_destination():
    g = line_graph()
    assert g.altitude[0] == pytest.approx(2.0)
    assert g.altitude[1] == pytest.approx(1.0)
    assert g.altitude[2] == 0.0


def test_destination_altitude_forced_to_zero():
    g = line_graph(altitudes={0: 5.0, 1: 3.0, 2: 9.0})
    assert g.altitude[2] == 0.0


def test_graph_validation_errors():
    pos = {0: (0.0, 0.0), 1: (1.0, 0.0)}
    with pytest.raises(ValueError):
        TerrainGraph(pos, [(0, 2)], [0], 1)
    with pytest.raises(ValueError):
        TerrainGraph(pos, [(0, 0)], [0], 1)
    with pytest.raises(ValueError):
        TerrainGraph(pos, [], [5], 1)
    with pytest.raises(ValueError):
        TerrainGraph(pos, [], [0], 7)
    with pytest.raises(ValueError):
        TerrainGraph(pos, [], [0], 1, altitudes={0: -1.0, 1: 0.0})


def test_decreasing_gradient_hand_values():
    g = line_graph(altitudes={0: 10.0, 1: 4.0, 2: 0.0})
    # (10 - 4) / 1
    assert decreasing_gradient(g, 0, 1) == pytest.approx(6.0)
    assert decreasing_gradient(g, 1, 0) == pytest.approx(-6.0)
    g2 = line_graph(altitudes={0: 4.0, 1: 4.0, 2: 0.0})
    assert decreasing_gradient(g2, 0, 1) == 0.0


def test_zero_distance_edge_has_no_gradient():
    pos = {0: (1.0, 1.0), 1: (1.0, 1.0), 2: (3.0, 0.0)}
    g = TerrainGraph(pos, [(0, 1), (1, 2)], [0], 2)
    with pytest.raises(ValueError):
        decreasing_gradient(g, 0, 1)


def test_forward_probabilities_proportional_to_gradient():
    # i=0 at altitude 10 with two downhill neighbors: gradients 3 and 1
    pos = {0: (0.0, 0.0), 1: (2.0, 0.0), 2: (0.0, 2.0), 3: (5.0, 5.0)}
    g = TerrainGraph(pos, [(0, 1), (0, 2), (1, 3), (2, 3)], [0], 3,
                     altitudes={0: 10.0, 1: 4.0, 2: 8.0, 3: 0.0})
    probs = forward_probabilities(g, 0)
    assert probs[1] == pytest.approx(0.75)
    assert probs[2] == pytest.approx(0.25)
    assert sum(probs.values()) == pytest.approx(1.0, abs=1e-12)


def test_selection_frequencies_match_probabilities():
    pos = {0: (0.0, 0.0), 1: (2.0, 0.0), 2: (0.0, 2.0), 3: (5.0, 5.0)}
    g = TerrainGraph(pos, [(0, 1), (0, 2), (1, 3), (2, 3)], [0], 3,
                     altitudes={0: 10.0, 1: 4.0, 2: 8.0, 3: 0.0})
    rng = np.random.default_rng(123)
    draws = 40000
    counts = {1: 0, 2: 0}
    for _ in range(draws):
        counts[select_forward_position(g, 0, rng)] += 1
    expected = [0.75 * draws, 0.25 * draws]
    _, p = stats.chisquare([counts[1], counts[2]], expected)
    assert p > 0.01


def test_stranded_drop_raised_when_all_uphill():
    g = line_graph(altitudes={0: 0.0, 1: 5.0, 2: 0.0})
    with pytest.raises(StrandedDrop):
        select_forward_position(g, 0, np.random.default_rng(0))


def test_erode_and_deposit_hand_values():
    g = line_graph(altitudes={0: 10.0, 1: 8.0, 2: 0.0})
    # DG(0,1) = 2.0, rate 0.1 -> erode 0.2, deposit 0.2
    erode_and_deposit(g, 0, 1, RfdParams(erosion_rate=0.1, sediment_fraction=1.0))
    assert g.altitude[0] == pytest.approx(9.8)
    assert g.altitude[1] == pytest.approx(8.2)


def test_erosion_never_raises_destination():
    g = line_graph(altitudes={0: 10.0, 1: 8.0, 2: 0.0})
    erode_and_deposit(g, 1, 2, RfdParams())
    assert g.altitude[2] == 0.0
    assert g.altitude[1] < 8.0


def test_erosion_clamps_at_zero():
    g = line_graph(altitudes={0: 0.05, 1: 0.0, 2: 0.0})
    erode_and_deposit(g, 0, 1, RfdParams(erosion_rate=10.0))
    assert g.altitude[0] == 0.0


@given(seed=st.integers(min_value=0, max_value=10**6), moves=st.integers(min_value=1, max_value=60))
@settings(max_examples=40, deadline=None)
def test_altitude_invariants_hold_under_random_walks(seed, moves):
    g, source = random_geometric_graph(seed % 50 + 1)
    rng = np.random.default_rng(seed)
    params = RfdParams()
    current = source
    for _ in range(moves):
        try:
            nxt = select_forward_position(g, current, rng)
        except StrandedDrop:
            current = source
            continue
        erode_and_deposit(g, current, nxt, params)
        current = nxt if nxt != g.destination else source
    assert g.altitude[g.destination] == 0.0
    assert all(a >= 0.0 for a in g.altitude.values())


def test_run_rfd_two_vertex_graph():
    pos = {0: (0.0, 0.0), 1: (3.0, 0.0)}
    g = TerrainGraph(pos, [(0, 1)], [1], 0)
    res = run_rfd(g, RfdParams(), np.random.default_rng(0))
    assert res.paths[1] == [1, 0]
    assert res.converged


def test_run_rfd_converges_to_short_diamond_branch():
    g = diamond_graph()
    res = run_rfd(g, RfdParams(), np.random.default_rng(42))
    shortest, cost = dijkstra_path(g, 3)
    assert res.paths[3] == shortest == [3, 1, 0]
    assert path_cost(g, res.paths[3]) == pytest.approx(cost)


def test_run_rfd_reports_no_path_when_stranded_forever():
    g = line_graph(altitudes={0: 0.0, 1: 5.0, 2: 0.0})
    res = run_rfd(g, RfdParams(max_iterations=40), np.random.default_rng(1))
    assert res.paths[0] is None
    assert not res.converged
    assert res.iterations == 40


def test_run_rfd_disconnected_source():
    pos = {0: (0.0, 0.0), 1: (5.0, 0.0), 2: (50.0, 50.0)}
    g = TerrainGraph(pos, [(0, 1)], [2], 0)
    res = run_rfd(g, RfdParams(max_iterations=30), np.random.default_rng(1))
    assert res.paths[2] is None


def test_run_rfd_does_not_mutate_caller_graph():
    g = diamond_graph()
    before = dict(g.altitude)
    run_rfd(g, RfdParams(), np.random.default_rng(3))
    assert g.altitude == before


def test_run_rfd_deterministic_for_same_seed():
    g = diamond_graph()
    a = run_rfd(g, RfdParams(), np.random.default_rng(99))
    b = run_rfd(g, RfdParams(), np.random.default_rng(99))
    assert a.paths == b.paths
    assert a.iterations == b.iterations


def test_rfd_params_validation():
    with pytest.raises(ValueError):
        RfdParams(erosion_rate=0.0)
    with pytest.raises(ValueError):
        RfdParams(sediment_fraction=-0.1)
    with pytest.raises(ValueError):
        RfdParams(max_iterations=0)
    with pytest.raises(ValueError):
        RfdParams(convergence_window=0)


def test_dijkstra_matches_exhaustive_enumeration():
    for seed in range(1, 11):
        g, source = random_geometric_graph(seed)
        path, cost = dijkstra_path(g, source)
        costs = all_simple_path_costs(g, source)
        assert costs, "generator must produce connected graphs"
        assert cost == pytest.approx(min(costs), rel=1e-12)
        assert path[0] == source and path[-1] == g.destination
        assert path_cost(g, path) == pytest.approx(cost, rel=1e-12)


def test_dijkstra_unreachable():
    pos = {0: (0.0, 0.0), 1: (5.0, 0.0), 2: (50.0, 50.0)}
    g = TerrainGraph(pos, [(0, 1)], [2], 0)
    path, cost = dijkstra_path(g, 2)
    assert path is None
    assert cost == math.inf


def test_run_rfd_near_optimal_on_most_small_graphs():
    # heuristic quality floor: within 10% of the shortest path on >= 90%
    # of 100 seeded random graphs
    good = 0
    for seed in range(1, 101):
        g, source = random_geometric_graph(seed)
        res = run_rfd(g, RfdParams(), np.random.default_rng(seed))
        _, best = dijkstra_path(g, source)
        found = res.paths[source]
        if found is not None and (best == 0 or path_cost(g, found) / best <= 1.10):
            good += 1
    assert good >= 90
