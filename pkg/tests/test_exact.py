"""Exact rational formulas against exhaustive enumeration and identities."""

import math
from fractions import Fraction

import pytest

from hypertrees.errors import (
    BudgetExceededError,
    DivisibilityError,
    DomainError,
    ParameterError,
)
from hypertrees.exact import (
    brute_moment,
    chu_identity,
    compositions,
    count_trees_with_degrees,
    count_uniform_trees,
    enumerate_configurations,
    enumerate_uniform_trees,
    expected_tree_count,
    generalized_binomial,
    log_fraction,
    log_tree_count_second_moment,
    num_partitions,
    second_moment_terms,
    tree_component_sum_identity,
    tree_count_second_moment,
)
from hypertrees.model import is_spanning_tree, validate_params

# exact moments verified against literal enumeration of every configuration
FROZEN_MOMENTS = {
    (2, 3, 3): (Fraction(4, 5), Fraction(8, 5)),
    (3, 2, 4): (Fraction(72, 11), Fraction(26568, 385)),
    (2, 2, 3): (Fraction(8, 5), Fraction(24, 5)),
}

FROZEN_TREE_COUNTS = {
    (3, 2): 3,
    (4, 2): 16,
    (5, 2): 125,
    (5, 3): 15,
    (7, 3): 735,
}


# ---------------------------------------------------------------------------
# closed-form counts
# ---------------------------------------------------------------------------

def test_num_partitions():
    assert num_partitions(0, 3) == 1
    assert num_partitions(6, 2) == 15
    assert num_partitions(6, 3) == 10
    assert num_partitions(5, 2) == 0
    with pytest.raises(ParameterError):
        num_partitions(-2, 2)


@pytest.mark.parametrize("n,s", sorted(FROZEN_TREE_COUNTS))
def test_count_uniform_trees_frozen(n, s):
    assert count_uniform_trees(n, s) == FROZEN_TREE_COUNTS[(n, s)]


def test_count_uniform_trees_edge_cases():
    assert count_uniform_trees(1, 3) == 1
    assert count_uniform_trees(2, 2) == 1
    assert count_uniform_trees(6, 3) == 0  # (s-1) does not divide (n-1)
    with pytest.raises(ParameterError):
        count_uniform_trees(0, 2)


def test_count_trees_with_degrees_graph_cases():
    # star with center 0, then a path with fixed leaves {0, 1}
    assert count_trees_with_degrees([3, 1, 1, 1], 2) == 1
    assert count_trees_with_degrees([1, 1, 2, 2], 2) == 2
    assert count_trees_with_degrees([1, 1, 1, 1, 2], 3) == 3


def test_count_trees_with_degrees_validation():
    with pytest.raises(ParameterError):
        count_trees_with_degrees([1], 2)
    with pytest.raises(ParameterError):
        count_trees_with_degrees([0, 2, 1, 1], 2)
    with pytest.raises(DivisibilityError):
        count_trees_with_degrees([1, 1, 1, 1], 3)
    with pytest.raises(ParameterError):
        count_trees_with_degrees([1, 1, 1, 1], 2)


@pytest.mark.parametrize("n,s", sorted(FROZEN_TREE_COUNTS))
def test_degree_sums_recover_totals(n, s):
    t = (n - 1) // (s - 1)
    total = 0
    for extra in compositions(s * t - n, n):
        total += count_trees_with_degrees([1 + e for e in extra], s)
    assert total == FROZEN_TREE_COUNTS[(n, s)]


# ---------------------------------------------------------------------------
# enumeration oracles
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("n,s", [(4, 2), (5, 2), (5, 3), (7, 3)])
def test_enumerate_uniform_trees_matches_formula(n, s):
    trees = enumerate_uniform_trees(n, s)
    assert len(trees) == count_uniform_trees(n, s)
    assert len(set(trees)) == len(trees)
    t = (n - 1) // (s - 1)
    for tree in trees:
        assert is_spanning_tree(tree, range(t))


def test_enumerate_uniform_trees_inadmissible_is_empty():
    assert enumerate_uniform_trees(6, 3) == []


def test_enumerate_uniform_trees_budget():
    with pytest.raises(BudgetExceededError):
        enumerate_uniform_trees(9, 2, budget=10)


def test_enumerate_configurations_counts():
    params = validate_params(2, 3, 3)
    configs = list(enumerate_configurations(params))
    assert len(configs) == num_partitions(6, 3) == 10
    assert len(set(configs)) == 10
    for config in configs:
        config.validate()


def test_enumerate_configurations_budget_and_divisibility():
    with pytest.raises(BudgetExceededError):
        list(enumerate_configurations(validate_params(2, 2, 3), budget=5))
    with pytest.raises(DivisibilityError):
        list(enumerate_configurations(validate_params(3, 2, 5)))


# ---------------------------------------------------------------------------
# moments
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("r,s,n", sorted(FROZEN_MOMENTS))
def test_frozen_moments(r, s, n):
    params = validate_params(r, s, n)
    mean, second = FROZEN_MOMENTS[(r, s, n)]
    assert expected_tree_count(params) == mean
    assert tree_count_second_moment(params) == second


@pytest.mark.parametrize("r,s,n", [(2, 2, 5), (4, 2, 3), (3, 3, 3)])
def test_moments_match_enumeration(r, s, n):
    params = validate_params(r, s, n)
    assert expected_tree_count(params) == brute_moment(params, power=1)
    assert tree_count_second_moment(params) == brute_moment(params, power=2)


def test_logfloat_second_moment_tracks_exact():
    for key in FROZEN_MOMENTS:
        params = validate_params(*key)
        exact_value = tree_count_second_moment(params)
        via_logs = tree_count_second_moment(params, mode="logfloat")
        assert math.isclose(via_logs, float(exact_value), rel_tol=1e-10)
        assert math.isclose(
            log_tree_count_second_moment(params),
            log_fraction(exact_value),
            rel_tol=1e-12,
        )


def test_second_moment_rejects_unknown_mode():
    with pytest.raises(ParameterError):
        tree_count_second_moment(validate_params(2, 3, 3), mode="float")


def test_moments_require_admissible_params():
    with pytest.raises(DivisibilityError):
        expected_tree_count(validate_params(3, 2, 5))
    with pytest.raises(DivisibilityError):
        tree_count_second_moment(validate_params(2, 3, 4))


def test_second_moment_terms_structure():
    params = validate_params(2, 3, 3)
    terms = second_moment_terms(params)
    assert set(terms) == {(0, 3)}
    assert terms[(0, 3)] == Fraction(4, 5)

    params = validate_params(3, 2, 4)
    terms = second_moment_terms(params)
    for (k, b), value in terms.items():
        assert 2 <= b <= 4 and 0 <= k <= 4 - b
        assert value > 0
    total = expected_tree_count(params) + sum(terms.values(), Fraction(0))
    assert total == FROZEN_MOMENTS[(3, 2, 4)][1]


def test_brute_moment_zeroth_power_is_one():
    assert brute_moment(validate_params(2, 3, 3), power=0) == 1


def test_brute_moment_cycle_orders():
    # average number of repeated-cell parts over all 10 pairings of (2,3,3)
    params = validate_params(2, 3, 3)
    mean_loops = brute_moment(params, cycle_orders=(1,), power=0)
    assert mean_loops == Fraction(6, 5)


def test_brute_moment_rejects_negative_power():
    with pytest.raises(ParameterError):
        brute_moment(validate_params(2, 3, 3), power=-1)


# ---------------------------------------------------------------------------
# identities backing the lattice sum
# ---------------------------------------------------------------------------

def test_generalized_binomial():
    assert generalized_binomial(Fraction(1, 2), 2) == Fraction(-1, 8)
    assert generalized_binomial(7, 3) == 35
    assert generalized_binomial(Fraction(3, 4), 0) == 1
    with pytest.raises(ParameterError):
        generalized_binomial(1, -1)


def test_compositions():
    assert list(compositions(3, 2)) == [(0, 3), (1, 2), (2, 1), (3, 0)]
    assert list(compositions(0, 0)) == [()]
    assert list(compositions(2, 0)) == []
    assert len(list(compositions(5, 3))) == math.comb(7, 2)


@pytest.mark.parametrize(
    "m,b,xs,z",
    [
        (3, 2, (Fraction(1, 2), 3), Fraction(2, 3)),
        (4, 3, (1, 2, Fraction(-1, 2)), 2),
        (2, 4, (Fraction(5, 3), 0, 1, 2), Fraction(1, 7)),
        (5, 2, (4, 4), 1),
    ],
)
def test_chu_identity(m, b, xs, z):
    lhs, rhs = chu_identity(m, b, xs, z)
    assert lhs == rhs


def test_chu_identity_validates_arity():
    with pytest.raises(ParameterError):
        chu_identity(2, 3, (1, 2), 1)


def test_tree_component_sum_identity_grid():
    for b in range(2, 9):
        lhs, rhs = tree_component_sum_identity(3, 2, 8, b)
        assert lhs == rhs
    for b in (3, 5, 7, 9):
        lhs, rhs = tree_component_sum_identity(2, 3, 9, b)
        assert lhs == rhs
    for b in (2, 5, 8):
        lhs, rhs = tree_component_sum_identity(4, 4, 11, b)
        assert lhs == rhs


def test_tree_component_sum_identity_validation():
    with pytest.raises(ParameterError):
        tree_component_sum_identity(3, 2, 8, 1)
    with pytest.raises(DivisibilityError):
        tree_component_sum_identity(2, 3, 9, 4)


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------

def test_log_fraction():
    assert log_fraction(Fraction(8, 5)) == pytest.approx(math.log(1.6))
    huge = Fraction(math.factorial(400), math.factorial(200))
    assert log_fraction(huge) == pytest.approx(
        math.lgamma(401) - math.lgamma(201), rel=1e-13
    )
    with pytest.raises(DomainError):
        log_fraction(Fraction(0))
