import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from specroute.congestion import (
    ConflictGraph,
    brute_force_min_rounds,
    build_conflict_graph,
    chromatic_number,
    clique_rounds,
    complete_graph,
    cycle_graph,
    enumerate_labeled_graphs,
    greedy_bus_assignment,
    greedy_colouring,
    is_proper_round,
    max_clique_size,
    rounds_formula,
    validate_round_formula,
)
from specroute.errors import ResourceError


def brute_chromatic(g):
    """Smallest c admitting a proper colouring, by trying every assignment."""
    if g.m == 0:
        return 0
    for c in range(1, g.m + 1):
        for colours in itertools.product(range(c), repeat=g.m):
            if all(colours[a] != colours[b] for a, b in g.edges()):
                return c
    return g.m


graphs = st.integers(0, 7).flatmap(
    lambda m: st.lists(st.tuples(st.integers(0, max(m - 1, 0)), st.integers(0, max(m - 1, 0))), max_size=15).map(
        lambda es: ConflictGraph.from_edges(m, [(a, b) for a, b in es if a != b])
    )
)


def test_conflict_graph_examples():
    mirror = [list(range(i, 8 - i)) for i in range(4)]
    assert build_conflict_graph(mirror) == complete_graph(4)
    assert build_conflict_graph([[0, 1], [2, 3], [4, 5]]).edges() == []
    assert build_conflict_graph([[0, 1, 2], [3, 1, 4]]) == complete_graph(2)


def test_chromatic_examples():
    assert chromatic_number(complete_graph(6)) == 6
    assert chromatic_number(ConflictGraph.from_edges(4, [])) == 1
    assert chromatic_number(cycle_graph(5)) == brute_chromatic(cycle_graph(5)) == 3
    assert chromatic_number(cycle_graph(6)) == 2
    with pytest.raises(ResourceError):
        chromatic_number(complete_graph(25))


@settings(max_examples=60, deadline=None)
@given(graphs)
def test_chromatic_matches_brute_force(g):
    chi = chromatic_number(g)
    assert chi == max(brute_chromatic(g), 1 if g.m else 0)
    assert max_clique_size(g) <= chi <= g.max_degree() + 1 or g.m == 0
    colours = greedy_colouring(g)
    assert all(colours[a] != colours[b] for a, b in g.edges())


def test_rounds_formula_examples():
    assert rounds_formula(4, 2) == 2
    assert rounds_formula(1, 3) == 1
    for m in range(1, 9):
        for K in (1, 2, 3):
            assert rounds_formula(m, K) == clique_rounds(m, K) == -(-m // K)


def test_brute_force_rounds_examples():
    assert brute_force_min_rounds(complete_graph(4), 2) == 2
    for K in (1, 2, 3):
        assert brute_force_min_rounds(ConflictGraph.from_edges(5, []), K) == 1
    with pytest.raises(ResourceError):
        brute_force_min_rounds(complete_graph(11), 2)


@settings(max_examples=40, deadline=None)
@given(graphs, st.integers(1, 3))
def test_brute_force_rounds_equal_formula(g, K):
    want = rounds_formula(chromatic_number(g), K) if g.m else 0
    assert brute_force_min_rounds(g, K) == want


def test_enumeration_counts():
    counts = [sum(1 for _ in enumerate_labeled_graphs(n)) for n in range(1, 6)]
    assert counts == [1, 2, 8, 64, 1024]
    assert sum(counts) == 1099
    with pytest.raises(ValueError):
        next(enumerate_labeled_graphs(6))


def test_validator_small_runs():
    rep = validate_round_formula(1, [1])
    assert (rep.graphs_checked, rep.discrepancies) == (1, 0)
    rep = validate_round_formula(3, [2])
    assert rep.graphs_per_n[3] == 8
    assert (rep.graphs_checked, rep.discrepancies) == (11, 0)
    rep = validate_round_formula(4, [1, 2, 3])
    assert (rep.graphs_checked, rep.discrepancies) == (75, 0)


def test_greedy_assignment_examples():
    crossing = [[0, 1, 2], [3, 1, 4], [5, 1, 6]]
    a = greedy_bus_assignment(crossing, 3)
    assert a.n_rounds == 1
    assert [a.bus_of(i)[1] for i in range(3)] == [1, 2, 3]
    disjoint = greedy_bus_assignment([[0, 1], [2, 3], [4, 5]], 1)
    assert disjoint.n_rounds == 1 and set(disjoint.rounds[0].values()) == {1}
    hotspot = [list(range(i, 8 - i)) for i in range(4)]
    h = greedy_bus_assignment(hotspot, 2)
    assert [len(r) for r in h.rounds] == [2, 2]
    assert h.n_rounds == brute_force_min_rounds(build_conflict_graph(hotspot), 2)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.lists(st.integers(0, 9), min_size=2, max_size=4, unique=True), min_size=1, max_size=7), st.integers(1, 3))
def test_greedy_assignment_is_proper(routes, K):
    g = build_conflict_graph(routes)
    a = greedy_bus_assignment(routes, K)
    assert sorted(v for r in a.rounds for v in r) == list(range(len(routes)))
    assert all(is_proper_round(g, r) for r in a.rounds)
    assert all(1 <= b <= K for r in a.rounds for b in r.values())
    assert a.n_rounds >= brute_force_min_rounds(g, K)
