"""Spectral pairs, cycle-weight identities, and the limit-variable sampler."""

import math
from fractions import Fraction

import numpy as np
import pytest

from hypertrees.errors import (
    DegenerateParametersError,
    DomainError,
    ParameterError,
)
from hypertrees.exact import expected_tree_count, log_fraction
from hypertrees.model import validate_params
from hypertrees.spectral import (
    asymptotic_simple_probability,
    asymptotic_tree_count,
    default_j_start,
    joint_moment_weights_closed,
    joint_moment_weights_recurrence,
    joint_moment_weights_series,
    lambda_zeta_square,
    log_asymptotic_tree_count,
    log_asymptotic_tree_count_simple,
    sample_limit,
    sample_limit_batch,
    second_moment_ratio,
    select_j_max,
    simplicity_correction,
    spectral_pair,
    tilt_base,
    variance_sum,
    variance_sum_preconditions,
    weight_factorization_sides,
)

GRID = [(r, s) for r in range(2, 7) for s in range(2, 7) if (r, s) != (2, 2)]


# ---------------------------------------------------------------------------
# pairs and the tilt base
# ---------------------------------------------------------------------------

def test_spectral_pair_values():
    pair = spectral_pair(3, 2, 1)
    assert pair.lam == 1
    assert pair.zeta == Fraction(-3, 4)

    pair = spectral_pair(3, 2, 2)
    assert pair.lam == 1
    assert pair.zeta == Fraction(-7, 16)
    assert pair.zeta == (Fraction(1, 2) ** 2 - 2) / 4


def test_spectral_pair_zeta_floor():
    # zeta_1 = -1 exactly when r = 2 and s >= 3
    assert spectral_pair(2, 3, 1).zeta == -1
    assert spectral_pair(2, 5, 1).zeta == -1
    assert spectral_pair(3, 3, 1).zeta > -1
    for r, s in GRID:
        for j in range(1, 8):
            assert spectral_pair(r, s, j).zeta >= -1


def test_spectral_pair_small_cases():
    assert spectral_pair(2, 3, 2) == spectral_pair(2, 3, 2)
    pair = spectral_pair(2, 3, 3)
    assert pair.lam == Fraction(4, 3)
    assert pair.zeta == Fraction(-1, 4)


def test_spectral_pair_validation():
    with pytest.raises(ParameterError):
        spectral_pair(1, 2, 1)
    with pytest.raises(ParameterError):
        spectral_pair(3, 2, 0)


def test_tilt_base():
    assert tilt_base(3, 2) == Fraction(1, 2)
    assert tilt_base(2, 3) == 0
    assert tilt_base(2, 5) == -2
    assert tilt_base(6, 5) == Fraction(6, 5) - 4


def test_spectral_pair_json():
    data = spectral_pair(3, 2, 1).to_json_dict(3, 2)
    assert data == {"r": 3, "s": 2, "j": 1, "lambda": "1/1", "zeta": "-3/4"}


# ---------------------------------------------------------------------------
# asymptotic first moment
# ---------------------------------------------------------------------------

def test_log_asymptotic_tracks_exact_mean():
    gaps = []
    for n in (20, 40, 80, 160):
        params = validate_params(3, 2, n)
        exact_log = log_fraction(expected_tree_count(params))
        gaps.append(abs(log_asymptotic_tree_count(params) - exact_log))
    assert gaps[-1] < 0.015
    assert gaps == sorted(gaps, reverse=True)
    for wide, tight in zip(gaps, gaps[1:]):
        assert tight / wide == pytest.approx(0.5, abs=0.1)  # gap falls off as 1/n


def test_log_asymptotic_tracks_exact_mean_triple_edges():
    params = validate_params(2, 3, 99)
    exact_log = log_fraction(expected_tree_count(params))
    assert abs(log_asymptotic_tree_count(params) - exact_log) < 0.05


def test_asymptotic_tree_count_plain_value():
    params = validate_params(3, 2, 10)
    assert asymptotic_tree_count(params) == pytest.approx(
        math.exp(log_asymptotic_tree_count(params))
    )


def test_asymptotic_rejects_degenerate_pair():
    with pytest.raises(DegenerateParametersError):
        log_asymptotic_tree_count(validate_params(2, 2, 10))


def test_asymptotic_rejects_inadmissible_n():
    with pytest.raises(DomainError):
        log_asymptotic_tree_count(validate_params(3, 2, 5))


def test_simplicity_correction_exponents():
    correction = simplicity_correction(3, 2)
    assert correction.spectral_exponent == Fraction(3, 4)
    assert correction.quoted_exponent == Fraction(1, 2)
    assert not correction.agree
    for r, s in GRID:
        assert simplicity_correction(r, s).agree == (r == s)


def test_simple_conditioning_shifts_log_mean():
    params = validate_params(3, 2, 20)
    shift = log_asymptotic_tree_count_simple(params) - log_asymptotic_tree_count(params)
    assert shift == pytest.approx(0.75)


def test_asymptotic_simple_probability():
    assert asymptotic_simple_probability(3, 2) == pytest.approx(math.exp(-2))
    assert asymptotic_simple_probability(2, 3) == pytest.approx(math.exp(-1))
    assert asymptotic_simple_probability(4, 5) == pytest.approx(math.exp(-6))


# ---------------------------------------------------------------------------
# xi routes
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("r,s", [(3, 2), (2, 3), (4, 5), (6, 6)])
def test_xi_routes_agree(r, s):
    j_max = 12
    by_recurrence = joint_moment_weights_recurrence(r, s, j_max)
    by_series = joint_moment_weights_series(r, s, j_max)
    closed = joint_moment_weights_closed(r, s, j_max)
    assert by_recurrence == by_series == closed


def test_xi_equals_lambda_times_one_plus_zeta():
    for r, s in ((3, 2), (2, 3), (5, 4)):
        closed = joint_moment_weights_closed(r, s, 10)
        for j, value in enumerate(closed, start=1):
            pair = spectral_pair(r, s, j)
            assert value == pair.lam * (1 + pair.zeta)


def test_xi_rejects_degenerate_pair():
    with pytest.raises(DegenerateParametersError):
        joint_moment_weights_recurrence(2, 2, 5)
    with pytest.raises(DegenerateParametersError):
        joint_moment_weights_series(2, 2, 5)


def test_weight_factorization():
    for r, s in ((3, 2), (2, 3), (4, 5)):
        lhs, rhs = weight_factorization_sides(r, s, 16)
        assert lhs == rhs


# ---------------------------------------------------------------------------
# variance series
# ---------------------------------------------------------------------------

def test_variance_preconditions_failures():
    assert not variance_sum_preconditions(2, 2)["unit_ratio"]
    assert not variance_sum_preconditions(2, 5)["squared_ratio"]
    assert variance_sum_preconditions(2, 5)["linear_ratio"]
    assert not variance_sum_preconditions(2, 6)["squared_ratio"]
    assert not variance_sum_preconditions(3, 6)["squared_ratio"]
    assert all(variance_sum_preconditions(3, 2).values())
    assert all(variance_sum_preconditions(2, 3).values())


def test_variance_sum_anchor_values():
    result = variance_sum(3, 2)
    assert result.value == pytest.approx(9 / math.sqrt(14), rel=1e-14)
    assert result.series_value == pytest.approx(result.value, rel=1e-12)
    assert result.tail_bound < 1e-13

    result = variance_sum(2, 3)
    assert result.value == pytest.approx(4.0, rel=1e-14)
    assert result.series_value == pytest.approx(4.0, rel=1e-12)


def test_variance_sum_rejects_divergent_parameters():
    with pytest.raises(DomainError):
        variance_sum(2, 2)
    with pytest.raises(DomainError):
        variance_sum(2, 6)


def test_lambda_zeta_square_positive_and_shrinking():
    terms = [lambda_zeta_square(3, 2, j) for j in range(1, 30)]
    assert all(t >= 0 for t in terms)
    assert terms[20] < terms[5]


def test_second_moment_ratio_matches_variance_sum():
    assert second_moment_ratio(3, 2) == pytest.approx(variance_sum(3, 2).value)
    assert second_moment_ratio(2, 3) == pytest.approx(4.0)


def test_second_moment_ratio_rejects_subcritical():
    with pytest.raises(DomainError):
        second_moment_ratio(2, 2)
    with pytest.raises(DomainError):
        second_moment_ratio(3, 5)


# ---------------------------------------------------------------------------
# W sampler
# ---------------------------------------------------------------------------

def test_default_j_start():
    assert default_j_start(2) == 3
    assert default_j_start(3) == 2
    assert default_j_start(7) == 2
    with pytest.raises(ParameterError):
        default_j_start(1)


def test_select_j_max_is_minimal():
    j, tail = select_j_max(3, 2)
    assert tail < 1e-12
    assert lambda_zeta_square(3, 2, j) < 1e-14
    assert lambda_zeta_square(3, 2, j - 1) >= 1e-14 or j == 1


def test_select_j_max_rejects_degenerate_pair():
    with pytest.raises(DomainError):
        select_j_max(2, 2)


def test_sampler_deterministic_per_seed():
    a = sample_limit_batch(3, 2, 64, seed=11)
    b = sample_limit_batch(3, 2, 64, seed=11)
    c = sample_limit_batch(3, 2, 64, seed=12)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
    assert sample_limit(3, 2, seed=11) == float(sample_limit_batch(3, 2, 1, seed=11)[0])


def test_sampler_output_shape_and_range():
    samples = sample_limit_batch(3, 2, 1000, seed=0)
    assert samples.shape == (1000,)
    assert np.all(samples >= 0)
    assert np.all(np.isfinite(samples))


def test_sampler_kills_samples_at_zeta_floor():
    # at r = 2 the j = 1 factor has zeta = -1, so any Z_1 > 0 zeroes W
    samples = sample_limit_batch(2, 3, 4000, j_start=1, j_max=6, seed=3)
    zero_rate = float((samples == 0).mean())
    assert 0.55 < zero_rate < 0.71  # 1 - exp(-1) plus sampling noise
    survivors = samples[samples > 0]
    assert np.all(survivors > 0)


def test_sampler_skips_conditioned_cycles():
    samples = sample_limit_batch(2, 3, 1000, j_start=2, j_max=8, seed=4)
    assert float((samples == 0).mean()) == 0.0


def test_sampler_mean_is_near_one():
    samples = sample_limit_batch(3, 2, 200_000, seed=5)
    se = samples.std(ddof=1) / math.sqrt(len(samples))
    assert abs(samples.mean() - 1.0) < 4 * se


def test_sampler_validation():
    with pytest.raises(ParameterError):
        sample_limit_batch(3, 2, 0, seed=1)
    with pytest.raises(ParameterError):
        sample_limit_batch(3, 2, 4, j_start=0, seed=1)
    with pytest.raises(ParameterError):
        sample_limit_batch(3, 2, 4, j_start=5, j_max=4, seed=1)


def test_sampler_shared_generator_advances():
    rng = np.random.default_rng(9)
    a = sample_limit_batch(3, 2, 8, rng=rng)
    b = sample_limit_batch(3, 2, 8, rng=rng)
    assert not np.array_equal(a, b)
