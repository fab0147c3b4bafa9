"""Sampler, structural predicates, and cycle census against hand-built cases."""

import numpy as np
import pytest

from hypertrees.errors import (
    BudgetExceededError,
    DivisibilityError,
    ParameterError,
    RejectionLimitError,
)
from hypertrees.model import (
    Configuration,
    Hypergraph,
    admissible_orders,
    census_cycles,
    count_spanning_trees,
    has_spanning_tree,
    is_connected,
    is_simple,
    is_spanning_tree,
    project,
    sample_configuration,
    sample_simple_hypergraph,
    validate_params,
)


# ---------------------------------------------------------------------------
# parameters
# ---------------------------------------------------------------------------

def test_divisibility_flags():
    p = validate_params(2, 3, 3)
    assert p.divides_points and p.divides_tree and p.admissible
    assert p.num_parts == 2
    assert p.tree_size == 1

    p = validate_params(3, 4, 7)
    assert not p.divides_points
    assert p.divides_tree
    assert not p.admissible
    with pytest.raises(DivisibilityError):
        p.num_parts

    p = validate_params(2, 3, 4)
    assert p.divides_points is False
    assert p.divides_tree is False


def test_divisibility_report_keys():
    report = validate_params(3, 4, 7).divisibility_report()
    assert report == {
        "s_divides_rn": False,
        "s_minus_1_divides_n_minus_1": True,
    }


@pytest.mark.parametrize("r,s,n", [(1, 2, 3), (2, 1, 3), (2, 2, 0), (0, 0, 0)])
def test_out_of_range_params_raise(r, s, n):
    with pytest.raises(ParameterError):
        validate_params(r, s, n)


def test_non_integer_params_raise():
    with pytest.raises(ParameterError):
        validate_params(2.0, 3, 3)


def test_admissible_orders_lists_exactly_the_lattice():
    assert admissible_orders(2, 3, 6) == [3, 9, 15, 21, 27, 33]
    assert admissible_orders(3, 2, 6) == [2, 4, 6, 8, 10, 12]
    for r, s in [(2, 3), (4, 5), (3, 4)]:
        ladder = admissible_orders(r, s, 8)
        assert ladder == sorted(set(ladder))
        for lo, hi in zip(ladder, ladder[1:]):
            for n in range(lo + 1, hi):
                assert (r * n) % s != 0 or (n - 1) % (s - 1) != 0
        for n in ladder:
            assert (r * n) % s == 0 and (n - 1) % (s - 1) == 0


def test_admissible_orders_start_offset():
    assert admissible_orders(2, 3, 2, start=10) == [15, 21]


# ---------------------------------------------------------------------------
# hand-built configurations
# ---------------------------------------------------------------------------

def triangle_config() -> Configuration:
    """(r=2, s=2, n=3) pairing whose projection is the 3-cycle graph."""
    params = validate_params(2, 2, 3)
    parts = (
        ((0, 0), (1, 0)),
        ((0, 1), (2, 0)),
        ((1, 1), (2, 1)),
    )
    return Configuration(params, parts)


def doubled_triple_config() -> Configuration:
    """(r=2, s=3, n=3) pairing projecting to the edge {0,1,2} twice."""
    params = validate_params(2, 3, 3)
    parts = (
        ((0, 0), (1, 0), (2, 0)),
        ((0, 1), (1, 1), (2, 1)),
    )
    return Configuration(params, parts)


def loop_heavy_config() -> Configuration:
    """(r=2, s=3, n=3) pairing with one repeated cell in each part."""
    params = validate_params(2, 3, 3)
    parts = (
        ((0, 0), (0, 1), (1, 0)),
        ((1, 1), (2, 0), (2, 1)),
    )
    return Configuration(params, parts)


def quadruple_cover_config() -> Configuration:
    """(r=3, s=3, n=4): all four triples on four vertices, every pair of
    edges overlapping in exactly two vertices."""
    params = validate_params(3, 3, 4)
    parts = (
        ((0, 0), (1, 0), (2, 0)),
        ((0, 1), (2, 2), (3, 1)),
        ((0, 2), (1, 2), (3, 2)),
        ((1, 1), (2, 1), (3, 0)),
    )
    return Configuration(params, parts)


def loose_triangle_config() -> Configuration:
    """(r=2, s=3, n=6): four triples pairwise sharing exactly one vertex,
    so every one of the four edge triples is a loose 3-cycle."""
    params = validate_params(2, 3, 6)
    parts = (
        ((0, 0), (1, 0), (2, 0)),
        ((0, 1), (4, 1), (5, 0)),
        ((1, 1), (3, 1), (5, 1)),
        ((2, 1), (3, 0), (4, 0)),
    )
    return Configuration(params, parts)


def test_hand_built_configurations_validate():
    for config in (
        triangle_config(),
        doubled_triple_config(),
        loop_heavy_config(),
        quadruple_cover_config(),
        loose_triangle_config(),
    ):
        config.validate()


def test_projection_of_triangle():
    h = project(triangle_config())
    assert h.edges == ((0, 1), (0, 2), (1, 2))
    assert is_simple(h)
    assert is_connected(h)


def test_census_triangle():
    census = census_cycles(triangle_config(), 3)
    assert dict(census.counts) == {1: 0, 2: 0, 3: 1}
    assert dict(census.overlap_pairs) == {}


def test_census_doubled_triple():
    census = census_cycles(doubled_triple_config(), 2)
    assert dict(census.counts) == {1: 0, 2: 0}
    assert dict(census.overlap_pairs) == {3: 1}


def test_census_loops():
    census = census_cycles(loop_heavy_config(), 2)
    assert census.counts[1] == 2
    assert census.counts[2] == 0


def test_census_overlap_two_pairs():
    census = census_cycles(quadruple_cover_config(), 4)
    assert dict(census.counts) == {1: 0, 2: 6, 3: 0, 4: 0}
    assert dict(census.overlap_pairs) == {}


def test_census_loose_three_cycles():
    census = census_cycles(loose_triangle_config(), 4)
    assert dict(census.counts) == {1: 0, 2: 0, 3: 4, 4: 0}


def test_census_rejects_bad_jmax():
    with pytest.raises(ParameterError):
        census_cycles(triangle_config(), 0)


def test_doubled_graph_edge_counts_as_two_cycle():
    params = validate_params(2, 2, 2)
    doubled = Configuration(params, (((0, 0), (1, 0)), ((0, 1), (1, 1))))
    census = census_cycles(doubled, 2)
    assert census.counts[2] == 1
    two_loops = Configuration(params, (((0, 0), (0, 1)), ((1, 0), (1, 1))))
    census = census_cycles(two_loops, 2)
    assert census.counts[1] == 2
    assert census.counts[2] == 0


# ---------------------------------------------------------------------------
# structural predicates
# ---------------------------------------------------------------------------

def test_is_simple():
    assert is_simple(Hypergraph(3, ((0, 1), (0, 2), (1, 2))))
    assert not is_simple(Hypergraph(2, ((0, 0), (1, 1))))
    assert not is_simple(Hypergraph(2, ((0, 1), (0, 1))))
    assert not is_simple(Hypergraph(3, ((0, 0, 1), (1, 2, 2))))


def test_is_connected():
    assert is_connected(Hypergraph(1, ()))
    assert not is_connected(Hypergraph(2, ()))
    assert is_connected(Hypergraph(3, ((0, 1), (1, 2))))
    assert not is_connected(Hypergraph(4, ((0, 1), (2, 3))))
    assert is_connected(Hypergraph(5, ((0, 1, 2), (2, 3, 4))))


def test_spanning_tree_predicate_on_triangle():
    h = project(triangle_config())
    assert is_spanning_tree(h, [0, 1])
    assert is_spanning_tree(h, [0, 2])
    assert is_spanning_tree(h, [1, 2])
    assert not is_spanning_tree(h, [0])
    assert not is_spanning_tree(h, [0, 1, 2])
    assert count_spanning_trees(h) == 3
    assert has_spanning_tree(h)


def test_spanning_tree_count_complete_graph():
    edges = tuple(
        (u, v) for u in range(4) for v in range(u + 1, 4)
    )
    h = Hypergraph(4, edges)
    assert count_spanning_trees(h) == 16  # Cayley: 4^2


def test_spanning_tree_rejects_when_tree_size_not_integral():
    h = project(quadruple_cover_config())
    assert not has_spanning_tree(h)
    assert count_spanning_trees(h) == 0
    assert not is_spanning_tree(h, [0])


def test_spanning_tree_one_vertex():
    h = Hypergraph(1, ())
    assert is_spanning_tree(h, [])
    assert count_spanning_trees(h) == 1


def test_repeated_edges_counted_by_position():
    h = Hypergraph(2, ((0, 1), (0, 1)))
    assert count_spanning_trees(h) == 2


def test_spanning_tree_budget():
    edges = tuple(
        (u, v) for u in range(8) for v in range(u + 1, 8)
    )
    h = Hypergraph(8, edges)
    with pytest.raises(BudgetExceededError):
        count_spanning_trees(h, budget=100)


# ---------------------------------------------------------------------------
# sampling
# ---------------------------------------------------------------------------

def test_sample_configuration_is_deterministic_per_seed():
    params = validate_params(3, 4, 8)
    a = sample_configuration(params, seed=123)
    b = sample_configuration(params, seed=123)
    c = sample_configuration(params, seed=124)
    assert a == b
    assert a != c


def test_sample_configuration_canonical_and_valid():
    params = validate_params(3, 4, 8)
    for seed in range(20):
        sample_configuration(params, seed=seed).validate()


def test_sample_configuration_requires_point_divisibility():
    with pytest.raises(DivisibilityError):
        sample_configuration(validate_params(3, 2, 5), seed=0)


def test_shared_generator_advances():
    params = validate_params(2, 3, 9)
    rng = np.random.default_rng(0)
    draws = {sample_configuration(params, rng=rng) for _ in range(8)}
    assert len(draws) > 1


def test_sample_simple_hypergraph_is_simple_and_regular():
    params = validate_params(3, 4, 8)
    h = sample_simple_hypergraph(params, seed=5)
    assert is_simple(h)
    assert len(h.edges) == params.num_parts
    degree = [0] * params.n
    for e in h.edges:
        for v in e:
            degree[v] += 1
    assert degree == [3] * 8


def test_sample_simple_hypergraph_gives_up_when_impossible():
    params = validate_params(2, 2, 2)
    with pytest.raises(RejectionLimitError):
        sample_simple_hypergraph(params, max_rejects=50, seed=0)


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def test_configuration_json_round_trip():
    config = sample_configuration(validate_params(3, 4, 8), seed=9)
    again = Configuration.from_json_dict(config.to_json_dict())
    assert again == config


def test_hypergraph_json_round_trip():
    h = sample_simple_hypergraph(validate_params(2, 3, 9), seed=1)
    assert Hypergraph.from_json(h.to_json()) == h


def test_census_json_uses_string_keys():
    data = census_cycles(doubled_triple_config(), 2).to_json_dict()
    assert data["counts"] == {"1": 0, "2": 0}
    assert data["overlap_pairs"] == {"3": 1}


def test_hypergraph_rejects_malformed_edges():
    with pytest.raises(ParameterError):
        Hypergraph(3, ((1, 0),))
    with pytest.raises(ParameterError):
        Hypergraph(3, ((0, 3),))
    with pytest.raises(ParameterError):
        Hypergraph(3, ((0, 1), (0, 1, 2)))
