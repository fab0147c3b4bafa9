"""Cycle statistics and the limiting behaviour of the spanning-tree count.

For j >= 1 the number of (loose) j-cycles in a random configuration is
asymptotically Poisson with mean

    lambda_j = ((r-1)(s-1))^j / (2j),

and conditioning on a j-cycle multiplies the expected spanning-tree count
by 1 + zeta_j with

    zeta_j = ((r/(r-1) - s + 1)^j - 2) / ((r-1)(s-1))^j.

Both are exact rationals here.  The limit law of Y / E Y is the product
W = prod_j (1+zeta_j)^(Z_j) exp(-lambda_j zeta_j) over independent
Z_j ~ Poisson(lambda_j); it has mean 1 and second moment
exp(sum lambda_j zeta_j^2), and it vanishes exactly when some Z_j > 0
with zeta_j = -1, which happens only at (r, s) = (2, 2) (all j) and at
r = 2, s >= 3 (j = 1).

The per-cycle joint-moment weights xi_j = lambda_j (1 + zeta_j) are also
derived two independent ways (a double recurrence and a generating
function) as a consistency check on the closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from .errors import DegenerateParametersError, DomainError, ParameterError
from .model import ModelParams
from .series import RationalSeries

# beyond this mean the Poisson is replaced by its Gaussian limit; the
# switch point is far above anything statistically distinguishable and
# well below numpy's own hard ceiling
_POISSON_EXACT_MAX = 1e15


# ---------------------------------------------------------------------------
# spectral pairs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SpectralPair:
    """lambda_j and zeta_j for one cycle length j, as exact rationals."""

    j: int
    lam: Fraction
    zeta: Fraction

    def to_json_dict(self, r: int, s: int) -> dict:
        return {
            "r": r,
            "s": s,
            "j": self.j,
            "lambda": _fraction_str(self.lam),
            "zeta": _fraction_str(self.zeta),
        }


def _fraction_str(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def _check_rs(r: int, s: int) -> None:
    if r < 2 or s < 2:
        raise ParameterError(f"need r >= 2 and s >= 2, got (r, s) = ({r}, {s})")


def spectral_pair(r: int, s: int, j: int) -> SpectralPair:
    """Exact (lambda_j, zeta_j).  zeta_j >= -1 always, with equality exactly
    at (2, 2) for every j and at r = 2, s >= 3 for j = 1."""
    _check_rs(r, s)
    if j < 1:
        raise ParameterError(f"cycle length j must be at least 1, got {j}")
    growth = ((r - 1) * (s - 1)) ** j
    lam = Fraction(growth, 2 * j)
    shrink = (Fraction(r, r - 1) - s + 1) ** j
    zeta = (shrink - 2) / growth
    return SpectralPair(j, lam, zeta)


def tilt_base(r: int, s: int) -> Fraction:
    """The rational base r/(r-1) - s + 1 whose powers drive zeta_j."""
    _check_rs(r, s)
    return Fraction(r, r - 1) - s + 1


# ---------------------------------------------------------------------------
# asymptotic first moment
# ---------------------------------------------------------------------------

def log_asymptotic_tree_count(params: ModelParams) -> float:
    """log of the asymptotic mean spanning-tree count along the lattice.

    E Y ~ ((s-1) sqrt(r-1) / (n (rs-r-s)^((s+1)/(2(s-1)))))
          * base^(n/s)  with
    base = (s-1)^r (r-1)^((r-1)s) / (r^(rs-r-s) (rs-r-s)^((rs-r-s)/(s-1))).

    Undefined at (r, s) = (2, 2), where rs - r - s vanishes.
    """
    r, s, n = params.r, params.s, params.n
    _check_rs(r, s)
    gamma = r * s - r - s
    if gamma == 0:
        raise DegenerateParametersError(
            "the asymptotic tree-count formula degenerates at (r, s) = (2, 2)"
        )
    if not (params.divides_points and params.divides_tree):
        raise DomainError(
            f"n={n} is not admissible for (r, s) = ({r}, {s})"
        )
    per_n = (
        r * math.log(s - 1)
        + (r - 1) * s * math.log(r - 1)
        - gamma * math.log(r)
        - Fraction(gamma, s - 1) * math.log(gamma)
    )
    return (
        math.log(s - 1)
        + 0.5 * math.log(r - 1)
        - math.log(n)
        - (s + 1) / (2 * (s - 1)) * math.log(gamma)
        + n * per_n / s
    )


def asymptotic_tree_count(params: ModelParams) -> float:
    return math.exp(log_asymptotic_tree_count(params))


@dataclass(frozen=True)
class SimplicityCorrection:
    """Two candidate exponents for the simple-hypergraph correction factor.

    Conditioning the mean tree count on simplicity multiplies it by
    exp(-lambda_1 zeta_1) = exp((rs-s-1)/(2(r-1))); that is the exponent
    used by this package.  A closed form quoting (rs-r-1)/(2(r-1)) is
    also in circulation; the two agree only when r = s, so both are kept
    visible instead of silently picking one.
    """

    spectral_exponent: Fraction
    quoted_exponent: Fraction

    @property
    def agree(self) -> bool:
        return self.spectral_exponent == self.quoted_exponent


def simplicity_correction(r: int, s: int) -> SimplicityCorrection:
    _check_rs(r, s)
    pair = spectral_pair(r, s, 1)
    return SimplicityCorrection(
        spectral_exponent=-pair.lam * pair.zeta,
        quoted_exponent=Fraction(r * s - r - 1, 2 * (r - 1)),
    )


def log_asymptotic_tree_count_simple(params: ModelParams) -> float:
    """log asymptotic mean tree count conditioned on the projection being
    simple: the unconditional value plus -lambda_1 zeta_1."""
    correction = simplicity_correction(params.r, params.s)
    return log_asymptotic_tree_count(params) + float(correction.spectral_exponent)


def asymptotic_tree_count_simple(params: ModelParams) -> float:
    return math.exp(log_asymptotic_tree_count_simple(params))


def asymptotic_simple_probability(r: int, s: int) -> float:
    """Limiting probability that the projected hypergraph is simple:
    exp(-(r^2-1)/4) for s = 2, exp(-(r-1)(s-1)/2) for s >= 3."""
    _check_rs(r, s)
    if s == 2:
        return math.exp(-(r * r - 1) / 4)
    return math.exp(-(r - 1) * (s - 1) / 2)


# ---------------------------------------------------------------------------
# joint-moment weights xi_j, three routes
# ---------------------------------------------------------------------------

def _mu_beta(r: int, s: int) -> tuple[Fraction, Fraction]:
    gamma = r * s - r - s
    if gamma == 0:
        raise DegenerateParametersError(
            "xi recurrence parameters degenerate at (r, s) = (2, 2)"
        )
    return Fraction(gamma * gamma, r - 1), Fraction(r - 2, gamma)


def joint_moment_weights_recurrence(r: int, s: int, j_max: int) -> list[Fraction]:
    """xi_1..xi_j_max via the double recurrence

    c(j, 1) = mu (j - 1 + beta),
    c(j, l) = mu sum_{k=0}^{j-2} (k + beta) c(j-k-1, l-1),
    xi_j    = (1/2) sum_{l=1}^{j} c(j, l) / l,

    with mu = (rs-r-s)^2/(r-1) and beta = (r-2)/(rs-r-s).
    """
    _check_rs(r, s)
    mu, beta = _mu_beta(r, s)
    c = [[Fraction(0)] * (j_max + 1) for _ in range(j_max + 1)]
    for j in range(1, j_max + 1):
        c[j][1] = mu * (j - 1 + beta)
        for level in range(2, j + 1):
            acc = Fraction(0)
            for k in range(0, j - 1):
                acc += (k + beta) * c[j - k - 1][level - 1]
            c[j][level] = mu * acc
    return [
        sum((c[j][level] / level for level in range(1, j + 1)), Fraction(0)) / 2
        for j in range(1, j_max + 1)
    ]


def _weight_generating_function(r: int, s: int, order: int) -> RationalSeries:
    mu, beta = _mu_beta(r, s)
    geom = RationalSeries.geometric(order)
    x = RationalSeries.x(order)
    return mu * (x * x * geom * geom + beta * x * geom)


def joint_moment_weights_series(r: int, s: int, j_max: int) -> list[Fraction]:
    """xi_1..xi_j_max as -(1/2) [x^j] log(1 - f(x)) with
    f(x) = mu (x^2/(1-x)^2 + beta x/(1-x))."""
    _check_rs(r, s)
    f = _weight_generating_function(r, s, j_max)
    log_series = f.log_one_minus()
    return [-log_series[j] / 2 for j in range(1, j_max + 1)]


def joint_moment_weights_closed(r: int, s: int, j_max: int) -> list[Fraction]:
    """xi_j = lambda_j (1 + zeta_j) = (a^j + ((r-1)(s-1))^j - 2)/(2j)
    with a = r/(r-1) - s + 1."""
    _check_rs(r, s)
    a = tilt_base(r, s)
    growth = (r - 1) * (s - 1)
    return [
        (a**j + Fraction(growth) ** j - 2) / (2 * j)
        for j in range(1, j_max + 1)
    ]


def weight_factorization_sides(
    r: int, s: int, order: int
) -> tuple[RationalSeries, RationalSeries]:
    """Both sides of (1 - f(x)) (1-x)^2 = (1 - a x)(1 - (r-1)(s-1) x).

    The right side being a quadratic with those two roots is what makes
    the closed form for xi_j drop out of the log series.
    """
    f = _weight_generating_function(r, s, order)
    x = RationalSeries.x(order)
    one = RationalSeries.constant(1, order)
    lhs = (one - f) * (one - x) * (one - x)
    a = tilt_base(r, s)
    rhs = (one - a * x) * (one - (r - 1) * (s - 1) * x)
    return lhs, rhs


# ---------------------------------------------------------------------------
# the variance series sum lambda_j zeta_j^2
# ---------------------------------------------------------------------------

class VarianceSum(NamedTuple):
    value: float         # exp(sum_j lambda_j zeta_j^2), closed form
    series_value: float  # exp of the numerically accumulated partial sum
    tail_bound: float    # bound on the neglected tail of the exponent
    terms: int           # number of terms accumulated


def variance_sum_preconditions(r: int, s: int) -> dict[str, bool]:
    """The convergence conditions behind the closed form: all three ratio
    magnitudes below one and a positive discriminant."""
    _check_rs(r, s)
    a = tilt_base(r, s)
    growth = (r - 1) * (s - 1)
    disc = r * r - r * s + r + s - 1
    return {
        "squared_ratio": a * a < growth,
        "linear_ratio": abs(a) < growth,
        "unit_ratio": 1 < growth,
        "discriminant_positive": disc > 0,
    }


def _require_variance_preconditions(r: int, s: int) -> None:
    conditions = variance_sum_preconditions(r, s)
    failed = [name for name, ok in conditions.items() if not ok]
    if failed:
        raise DomainError(
            f"variance series conditions fail at (r, s) = ({r}, {s}): "
            + ", ".join(failed)
        )


def variance_sum(r: int, s: int, tail_target: float = 1e-13) -> VarianceSum:
    """exp(sum_j lambda_j zeta_j^2) with a numeric cross-check.

    The closed form is r^2 sqrt(s-1) /
    sqrt((r^2-rs+r+s-1)(rs-r-s)(r-1)); the series route accumulates
    float(lambda_j zeta_j^2) until a geometric bound caps the tail below
    ``tail_target``.
    """
    _require_variance_preconditions(r, s)
    disc = r * r - r * s + r + s - 1
    gamma = r * s - r - s
    closed = r * r * math.sqrt(s - 1) / math.sqrt(disc * gamma * (r - 1))
    partial = 0.0
    j = 0
    while True:
        j += 1
        term = lambda_zeta_square(r, s, j)
        partial += term
        tail = _variance_tail_bound(r, s, j)
        if term < 1e-18 and tail < tail_target:
            break
        if j > 100_000:
            raise DomainError("variance series failed to converge")
    return VarianceSum(closed, math.exp(partial), tail, j)


def lambda_zeta_square(r: int, s: int, j: int) -> float:
    """float(lambda_j zeta_j^2), computed from the exact rationals."""
    pair = spectral_pair(r, s, j)
    return float(pair.lam * pair.zeta * pair.zeta)


def _variance_tail_bound(r: int, s: int, j: int) -> float:
    """Geometric bound on sum_{i > j} lambda_i zeta_i^2.

    lambda_i zeta_i^2 <= M_i = (|a|^i + 2)^2 / (2 i g^i) and
    M_{i+1} <= q M_i with q = max(a^2, 1)/g, valid whenever q < 1.
    """
    a = tilt_base(r, s)
    g = (r - 1) * (s - 1)
    q = float(max(a * a, Fraction(1)) / g)
    if q >= 1.0:
        return math.inf
    m_next = float((abs(a) ** (j + 1) + 2) ** 2 / (2 * (j + 1) * Fraction(g) ** (j + 1)))
    return m_next / (1.0 - q)


def second_moment_ratio(r: int, s: int) -> float:
    """Limit of E Y^2 / (E Y)^2 in the supercritical regime:
    r^2 sqrt(s-1) / sqrt((r^2-rs+r+s-1)(rs-r-s)(r-1)).

    Only meaningful where the tree count actually concentrates, so
    subcritical parameters are rejected.
    """
    from .threshold import Phase, classify

    _check_rs(r, s)
    if classify(r, s) is not Phase.SUPERCRITICAL:
        raise DomainError(
            f"(r, s) = ({r}, {s}) is subcritical; the second-moment ratio "
            "formula does not apply"
        )
    disc = r * r - r * s + r + s - 1
    gamma = r * s - r - s
    return r * r * math.sqrt(s - 1) / math.sqrt(disc * gamma * (r - 1))


# ---------------------------------------------------------------------------
# sampling the limit variable W
# ---------------------------------------------------------------------------

def default_j_start(s: int) -> int:
    """First cycle length not conditioned away in the simple-graph limit:
    3 for graphs (s = 2), 2 for s >= 3."""
    if s < 2:
        raise ParameterError(f"need s >= 2, got {s}")
    return 3 if s == 2 else 2


def select_j_max(
    r: int, s: int, term_tol: float = 1e-14, tail_tol: float = 1e-12
) -> tuple[int, float]:
    """Smallest truncation point j with lambda_j zeta_j^2 < term_tol and
    the geometric tail bound below tail_tol.  Raises DomainError where the
    variance series diverges (notably (2, 2)), in which case callers must
    choose a truncation explicitly."""
    _check_rs(r, s)
    j = 0
    while True:
        j += 1
        term = lambda_zeta_square(r, s, j)
        tail = _variance_tail_bound(r, s, j)
        if term < term_tol and tail < tail_tol:
            return j, tail
        if not math.isfinite(tail) and j >= 4:
            raise DomainError(
                f"tail of the variance series does not converge at "
                f"(r, s) = ({r}, {s}); pass an explicit j_max"
            )
        if j > 100_000:
            raise DomainError("no admissible truncation point found")


def sample_limit_batch(
    r: int,
    s: int,
    size: int,
    j_start: int = 1,
    j_max: int | None = None,
    seed: int | None = None,
    *,
    rng: np.random.Generator | None = None,
) -> np.ndarray:
    """Draw ``size`` samples of the truncated limit product
    W = prod_{j=j_start}^{j_max} (1+zeta_j)^(Z_j) exp(-lambda_j zeta_j).

    Z_j are independent Poisson(lambda_j), drawn in ascending j from one
    seeded stream, so results are reproducible per seed.  The log of each
    factor is accumulated in the compensated form
    (Z-lambda) log1p(zeta) + lambda (log1p(zeta) - zeta), which stays
    accurate when zeta is tiny and lambda is huge.  Factors with
    zeta_j = -1 send a sample to exactly zero whenever Z_j > 0.  Means
    above ~1e15 use the Gaussian limit of the Poisson, whose contribution
    reduces to g*sqrt(lambda_j zeta_j^2) - lambda_j zeta_j^2/2.
    """
    _check_rs(r, s)
    if size < 1:
        raise ParameterError("size must be positive")
    if j_start < 1:
        raise ParameterError("j_start must be at least 1")
    if j_max is None:
        j_max, _ = select_j_max(r, s)
    if j_max < j_start:
        raise ParameterError(f"j_max={j_max} is below j_start={j_start}")
    if rng is None:
        rng = np.random.default_rng(seed)
    log_acc = np.zeros(size)
    dead = np.zeros(size, dtype=bool)
    for j in range(j_start, j_max + 1):
        pair = spectral_pair(r, s, j)
        try:
            lam_f = float(pair.lam)
        except OverflowError:
            lam_f = math.inf
        if pair.zeta == -1:
            z = rng.poisson(lam_f, size)
            dead |= z > 0
            log_acc += lam_f
            continue
        if lam_f < _POISSON_EXACT_MAX:
            zeta_f = float(pair.zeta)
            z = rng.poisson(lam_f, size)
            log1p_zeta = math.log1p(zeta_f)
            log_acc += (z - lam_f) * log1p_zeta + lam_f * (log1p_zeta - zeta_f)
        else:
            t = float(pair.lam * pair.zeta * pair.zeta)
            spread = math.copysign(math.sqrt(t), pair.zeta)
            log_acc += rng.standard_normal(size) * spread - t / 2
    out = np.exp(log_acc)
    out[dead] = 0.0
    return out


def sample_limit(
    r: int,
    s: int,
    j_start: int = 1,
    j_max: int | None = None,
    seed: int | None = None,
) -> float:
    """One sample of the truncated limit product W; see sample_limit_batch."""
    return float(sample_limit_batch(r, s, 1, j_start, j_max, seed)[0])
