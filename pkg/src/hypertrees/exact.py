"""Exact rational counting for the configuration model.

Everything here is integer or big-rational arithmetic; no floats enter
except in the explicitly named log-space variants.  The centrepiece is
the pair of spanning-tree moments over a uniform configuration:

  first moment   E Y = r^n s^t ((r-1)n)! (n-1)! (rn/s)!
                       / ((rn)! t! (((rs-r-s)n+s)/(s(s-1)))!)

  second moment  E Y^2 = E Y + sum over lattice points (k, b) of a(k, b)

with t = (n-1)/(s-1) and the summand a(k, b) given in
``_second_moment_term``.  Tiny instances are cross-checked against
literal enumeration of all configurations (``brute_moment``), which is
the ground truth this module is calibrated against.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from typing import Iterator, Sequence

from .errors import (
    BudgetExceededError,
    DivisibilityError,
    DomainError,
    IntegralityError,
    ParameterError,
)
from .model import (
    DEFAULT_ENUMERATION_BUDGET,
    Configuration,
    Hypergraph,
    ModelParams,
    census_cycles,
    count_spanning_trees,
    project,
)


# ---------------------------------------------------------------------------
# closed-form counts
# ---------------------------------------------------------------------------

def num_partitions(t: int, s: int) -> int:
    """Partitions of t labelled points into unordered parts of size s.

    p(t) = t! / ((t/s)! (s!)^(t/s)); zero when s does not divide t,
    and p(0) = 1.
    """
    if t < 0:
        raise ParameterError(f"t must be nonnegative, got {t}")
    if t % s != 0:
        return 0
    groups = t // s
    return math.factorial(t) // (math.factorial(groups) * math.factorial(s) ** groups)


def count_uniform_trees(n: int, s: int) -> int:
    """Labelled s-uniform trees on n vertices.

    n^(t-1) (n-1)! / (t! ((s-1)!)^t) with t = (n-1)/(s-1); zero when
    (s-1) does not divide (n-1), one for the single-vertex tree.
    """
    if n < 1:
        raise ParameterError(f"n must be at least 1, got {n}")
    if n == 1:
        return 1
    if (n - 1) % (s - 1) != 0:
        return 0
    t = (n - 1) // (s - 1)
    value = Fraction(n ** (t - 1) * math.factorial(n - 1),
                     math.factorial(t) * math.factorial(s - 1) ** t)
    return _as_integer(value, "tree count")


def count_trees_with_degrees(degrees: Sequence[int], s: int) -> int:
    """Labelled s-uniform trees with the given vertex degree sequence.

    (s-1) (n-2)! / ((s-1)!)^((n-1)/(s-1)) * prod 1/(deg_i - 1)!.
    The degrees must be positive and sum to s(n-1)/(s-1).
    """
    n = len(degrees)
    if n < 2:
        raise ParameterError("a degree sequence needs at least two vertices")
    if any(d < 1 for d in degrees):
        raise ParameterError("tree degrees must all be at least 1")
    if (n - 1) % (s - 1) != 0:
        raise DivisibilityError(f"s-1={s - 1} does not divide n-1={n - 1}")
    t = (n - 1) // (s - 1)
    if sum(degrees) != s * t:
        raise ParameterError(
            f"degrees sum to {sum(degrees)}, expected s(n-1)/(s-1) = {s * t}"
        )
    value = Fraction((s - 1) * math.factorial(n - 2),
                     math.factorial(s - 1) ** t)
    for d in degrees:
        value /= math.factorial(d - 1)
    return _as_integer(value, "degree-restricted tree count")


def _as_integer(value: Fraction, label: str) -> int:
    if value.denominator != 1:
        raise IntegralityError(f"{label} evaluated to non-integer {value}")
    return value.numerator


# ---------------------------------------------------------------------------
# exhaustive enumeration oracles
# ---------------------------------------------------------------------------

def enumerate_uniform_trees(
    n: int, s: int, budget: int = DEFAULT_ENUMERATION_BUDGET
) -> list[Hypergraph]:
    """All labelled s-uniform trees on vertex set range(n), edge-sorted.

    Backtracks over candidate edges in lexicographic order, keeping only
    extensions that merge s fresh components, so every tree appears
    exactly once.  Refuses when the candidate-subset count exceeds the
    budget.
    """
    if n == 1:
        return [Hypergraph(1, ())]
    if (n - 1) % (s - 1) != 0:
        return []
    t = (n - 1) // (s - 1)
    candidates = list(itertools.combinations(range(n), s))
    if math.comb(len(candidates), t) > budget:
        raise BudgetExceededError(
            f"C({len(candidates)},{t}) candidate edge sets exceed the budget of {budget}"
        )
    trees: list[Hypergraph] = []
    chosen: list[tuple[int, ...]] = []

    from .model import _merges_fresh_components, _UnionFind

    uf = _UnionFind(n)

    def extend(start: int) -> None:
        if len(chosen) == t:
            trees.append(Hypergraph(n, tuple(chosen)))
            return
        for idx in range(start, len(candidates) - (t - len(chosen)) + 1):
            trail: list[int] = []
            if _merges_fresh_components(uf, candidates[idx], trail):
                chosen.append(candidates[idx])
                extend(idx + 1)
                chosen.pop()
                for child in reversed(trail):
                    uf.undo(child)

    extend(0)
    return trees


def enumerate_configurations(
    params: ModelParams, budget: int = DEFAULT_ENUMERATION_BUDGET
) -> Iterator[Configuration]:
    """Yield every partition of the rn points into parts of size s.

    Parts come out in canonical order (each part sorted, parts sorted by
    their smallest point).  Refuses upfront when p(rn) exceeds the budget.
    """
    total = num_partitions(params.total_points, params.s)
    if total == 0:
        raise DivisibilityError(
            f"s={params.s} does not divide rn={params.total_points}"
        )
    if total > budget:
        raise BudgetExceededError(
            f"p({params.total_points}) = {total} configurations exceed the budget of {budget}"
        )
    r, s = params.r, params.s

    def split(points: tuple[int, ...]) -> Iterator[tuple[tuple[int, ...], ...]]:
        if not points:
            yield ()
            return
        head, rest = points[0], points[1:]
        for combo in itertools.combinations(rest, s - 1):
            part = (head, *combo)
            taken = set(combo)
            remaining = tuple(p for p in rest if p not in taken)
            for tail in split(remaining):
                yield (part, *tail)

    for raw in split(tuple(range(params.total_points))):
        parts = tuple(tuple((p // r, p % r) for p in part) for part in raw)
        yield Configuration(params, parts)


# ---------------------------------------------------------------------------
# spanning-tree moments
# ---------------------------------------------------------------------------

def expected_tree_count(params: ModelParams) -> Fraction:
    """Exact mean number of spanning trees of the projected multigraph."""
    _require_admissible(params)
    r, s, n = params.r, params.s, params.n
    t = params.tree_size
    leftover = _exact_div((r * s - r - s) * n + s, s * (s - 1),
                          "((rs-r-s)n+s)/(s(s-1))")
    num = (r ** n) * (s ** t) * math.factorial((r - 1) * n) \
        * math.factorial(n - 1) * math.factorial(params.num_parts)
    den = math.factorial(r * n) * math.factorial(t) * math.factorial(leftover)
    return Fraction(num, den)


def second_moment_terms(params: ModelParams) -> dict[tuple[int, int], Fraction]:
    """The lattice summands a(k, b) of the exact second moment, keyed by (k, b).

    b runs over 2 <= b <= n with b = 1 (mod s-1); k over
    0 <= k <= (n-b)/(s-1).  Terms whose factorial arguments would be
    negative count zero ways and are omitted; a fractional factorial
    argument can only come from inadmissible inputs and raises.
    """
    _require_admissible(params)
    r, s, n = params.r, params.s, params.n
    rn_s = params.num_parts
    terms: dict[tuple[int, int], Fraction] = {}
    for b in range(2, n + 1):
        if (b - 1) % (s - 1) != 0:
            continue
        b_steps = (b - 1) // (s - 1)
        spare_parts = rn_s - _exact_div(n + b - 2, s - 1, "(n+b-2)/(s-1)")
        if spare_parts < 0:
            continue
        for k in range(0, (n - b) // (s - 1) + 1):
            if (r - 1) * n - k - b < 0:
                continue
            terms[(k, b)] = _second_moment_term(
                r, s, n, k, b, b_steps, spare_parts, rn_s
            )
    return terms


def _second_moment_term(
    r: int, s: int, n: int, k: int, b: int,
    b_steps: int, spare_parts: int, rn_s: int,
) -> Fraction:
    """One summand of the exact second moment.

    a(k, b) = r^n (b-1) (r-1)^(k+b) (s-1)^k s^((n+b-2)/(s-1))
              * (k+b-2)! ((r-1)n-k-b)! (rn/s)! n!
              / (b k! (((b-1)/(s-1))!)^2
                 * ((rs-r-s)n/(s(s-1)) - (b-2)/(s-1))!
                 * ((n-(s-1)k-b)/(s-1))! (rn)!)

    The (s-1)^k factor makes the b-indexed slice of the sum collapse the
    inner product of generalized binomials correctly (the substitution
    behind it scales each index by (r-1)(s-1), not by r-1 alone); dropping
    it breaks the second-moment identity at every instance with s >= 3
    and k >= 1, as direct enumeration shows.
    """
    s_exp = _exact_div(n + b - 2, s - 1, "(n+b-2)/(s-1)")
    residual = _exact_div(n - (s - 1) * k - b, s - 1, "(n-(s-1)k-b)/(s-1)")
    num = (r ** n) * (b - 1) * ((r - 1) ** (k + b)) * ((s - 1) ** k) \
        * (s ** s_exp) * math.factorial(k + b - 2) \
        * math.factorial((r - 1) * n - k - b) * math.factorial(rn_s) \
        * math.factorial(n)
    den = b * math.factorial(k) * math.factorial(b_steps) ** 2 \
        * math.factorial(spare_parts) * math.factorial(residual) \
        * math.factorial(r * n)
    return Fraction(num, den)


def tree_count_second_moment(params: ModelParams, mode: str = "exact") -> Fraction | float:
    """Exact E Y^2 (mode="exact") or its float evaluation via log-gamma
    (mode="logfloat").  The two agree to better than 1e-10 relative
    wherever the float does not overflow."""
    if mode == "exact":
        return expected_tree_count(params) + sum(
            second_moment_terms(params).values(), Fraction(0)
        )
    if mode == "logfloat":
        return math.exp(log_tree_count_second_moment(params))
    raise ParameterError(f"unknown mode {mode!r}, expected 'exact' or 'logfloat'")


def log_tree_count_second_moment(params: ModelParams) -> float:
    """log E Y^2 in floating point, summing the lattice in log space."""
    _require_admissible(params)
    r, s, n = params.r, params.s, params.n
    rn_s = params.num_parts
    logs = [log_fraction(expected_tree_count(params))]
    lg = math.lgamma
    for b in range(2, n + 1):
        if (b - 1) % (s - 1) != 0:
            continue
        b_steps = (b - 1) // (s - 1)
        s_exp = (n + b - 2) // (s - 1)
        spare_parts = rn_s - s_exp
        if spare_parts < 0:
            continue
        for k in range(0, (n - b) // (s - 1) + 1):
            if (r - 1) * n - k - b < 0:
                continue
            residual = (n - (s - 1) * k - b) // (s - 1)
            log_term = (
                n * math.log(r)
                + math.log(b - 1)
                + (k + b) * math.log(r - 1)
                + (k * math.log(s - 1) if s > 2 else 0.0)
                + s_exp * math.log(s)
                + lg(k + b - 1)
                + lg((r - 1) * n - k - b + 1)
                + lg(rn_s + 1)
                + lg(n + 1)
                - math.log(b)
                - lg(k + 1)
                - 2.0 * lg(b_steps + 1)
                - lg(spare_parts + 1)
                - lg(residual + 1)
                - lg(r * n + 1)
            )
            logs.append(log_term)
    return _log_sum_exp(logs)


def brute_moment(
    params: ModelParams,
    cycle_orders: Sequence[int] = (),
    power: int = 1,
    budget: int = DEFAULT_ENUMERATION_BUDGET,
) -> Fraction:
    """Ground-truth joint moment by full enumeration of the configuration space.

    Returns the exact average of Y^power * prod_j (X_j)_(x_j) over every
    configuration, where Y is the spanning-tree count, X_j the j-cycle
    census entries, x = cycle_orders the falling-factorial orders, and
    (m)_a = m(m-1)...(m-a+1).  Feasible only while p(rn) fits the budget.
    """
    if power < 0:
        raise ParameterError("power must be nonnegative")
    j_max = len(cycle_orders)
    total = Fraction(0)
    count = 0
    for config in enumerate_configurations(params, budget=budget):
        count += 1
        value = Fraction(1)
        if power:
            y = count_spanning_trees(project(config), budget=budget)
            if y == 0:
                continue
            value *= y ** power
        if j_max:
            census = census_cycles(config, j_max)
            for j, order in enumerate(cycle_orders, start=1):
                value *= _falling(census.counts.get(j, 0), order)
                if value == 0:
                    break
        total += value
    return total / count


def _falling(m: int, a: int) -> int:
    out = 1
    for i in range(a):
        out *= m - i
    return out


# ---------------------------------------------------------------------------
# binomial identities backing the second-moment derivation
# ---------------------------------------------------------------------------

def generalized_binomial(x: Fraction | int, k: int) -> Fraction:
    """C(x, k) = x(x-1)...(x-k+1)/k! for arbitrary rational x; C(x, 0) = 1."""
    if k < 0:
        raise ParameterError("k must be nonnegative")
    x = Fraction(x)
    num = Fraction(1)
    for i in range(k):
        num *= x - i
    return num / math.factorial(k)


def compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    """All tuples of ``parts`` nonnegative integers summing to ``total``."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in compositions(total - first, parts - 1):
            yield (first, *rest)


def chu_identity(
    m: int, b: int, xs: Sequence[Fraction | int], z: Fraction | int
) -> tuple[Fraction, Fraction]:
    """Both sides of the multivariate Chu-Vandermonde convolution.

    sum over k_1+...+k_b = m of prod C(x_i + k_i z, k_i)
      = sum_k C(k+b-2, k) C(x_1+...+x_b + m z - k, m-k) z^k.

    Returned as (lhs, rhs) so callers can assert equality; both sides are
    exact rationals.
    """
    if b != len(xs):
        raise ParameterError(f"got {len(xs)} parameters for b={b}")
    z = Fraction(z)
    xs = [Fraction(x) for x in xs]
    lhs = Fraction(0)
    for combo in compositions(m, b):
        term = Fraction(1)
        for x_i, k_i in zip(xs, combo):
            term *= generalized_binomial(x_i + k_i * z, k_i)
            if term == 0:
                break
        lhs += term
    x_sum = sum(xs, Fraction(0))
    rhs = Fraction(0)
    for k in range(m + 1):
        rhs += (
            generalized_binomial(k + b - 2, k)
            * generalized_binomial(x_sum + m * z - k, m - k)
            * z**k
        )
    return lhs, rhs


def tree_component_sum_identity(r: int, s: int, n: int, b: int) -> tuple[int, int]:
    """Both sides of the collapsed sum over b-part component size profiles.

    The left side enumerates ordered profiles (nu_1, ..., nu_b) of
    positive sizes with nu_i = 1 (mod s-1) summing to n, weighting each by
    prod C((r-1)nu_i - 1, (nu_i-1)/(s-1)); the right side is the closed
    single sum it collapses to,

      sum_k C(k+b-2, k) C((r-1)n-b-k, (n-b)/(s-1)-k) ((r-1)(s-1))^k.

    Returned as (lhs, rhs).  Requires 2 <= b <= n with (s-1) | (n-b).
    """
    if not 2 <= b <= n:
        raise ParameterError(f"b must lie in [2, n], got b={b}, n={n}")
    if (n - b) % (s - 1) != 0:
        raise DivisibilityError(
            f"s-1={s - 1} does not divide n-b={n - b}"
        )
    m = (n - b) // (s - 1)
    lhs = 0
    for combo in compositions(m, b):
        term = 1
        for k_i in combo:
            term *= math.comb((r - 1) * (s - 1) * k_i + r - 2, k_i)
            if term == 0:
                break
        lhs += term
    rhs = 0
    unit = (r - 1) * (s - 1)
    for k in range(m + 1):
        rhs += (
            math.comb(k + b - 2, k)
            * math.comb((r - 1) * n - b - k, m - k)
            * unit**k
        )
    return lhs, rhs


# ---------------------------------------------------------------------------
# shared helpers
# ---------------------------------------------------------------------------

def _require_admissible(params: ModelParams) -> None:
    if not params.divides_points:
        raise DivisibilityError(
            f"s={params.s} does not divide rn={params.total_points}"
        )
    if not params.divides_tree:
        raise DivisibilityError(
            f"s-1={params.s - 1} does not divide n-1={params.n - 1}"
        )


def _exact_div(numerator: int, denominator: int, label: str) -> int:
    if numerator % denominator != 0:
        raise IntegralityError(
            f"{label} = {numerator}/{denominator} is not an integer"
        )
    return numerator // denominator


def log_fraction(value: Fraction) -> float:
    """Float log of a positive rational, safe for huge numerators."""
    if value <= 0:
        raise DomainError(f"cannot take log of {value}")
    return math.log(value.numerator) - math.log(value.denominator)


def _log_sum_exp(logs: Sequence[float]) -> float:
    peak = max(logs)
    return peak + math.log(math.fsum(math.exp(v - peak) for v in logs))
