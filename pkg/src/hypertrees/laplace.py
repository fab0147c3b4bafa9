"""Variational analysis behind the second moment of the tree count.

The exact second-moment sum is indexed by two densities: alpha (shared
tree edges per vertex, roughly) and beta (the complementary overlap
coordinate).  Writing the summand as psi * b_n * exp(n * phi) over the
domain

    K = {(alpha, beta): alpha >= 0, beta >= 0, (s-1) alpha + beta <= 1},

the sum localizes around the interior maximum of phi, which sits at

    alpha0 = 1/(r(s-1)),  beta0 = (rs-r-s)/(r(s-1)),

whenever the growth rate L(r, s) is positive.  This module evaluates
phi, its gradient and Hessian (differentiated by hand, cross-checked by
finite differences in the tests), the ridge parameterisation along which
phi_alpha vanishes, a numeric global maximizer, and the prefactors that
assemble into the asymptotic second moment.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BoundaryDominatesError, DomainError, ParameterError

_BOUNDARY_SLACK = 1e-15


@dataclass(frozen=True)
class LaplacePoint:
    alpha: float
    beta: float

    def in_domain(self, s: int) -> bool:
        """Membership in K, with a hair of floating-point slack."""
        return (
            self.alpha >= -_BOUNDARY_SLACK
            and self.beta >= -_BOUNDARY_SLACK
            and (s - 1) * self.alpha + self.beta <= 1 + _BOUNDARY_SLACK
        )


def _check_rs(r: int, s: int) -> None:
    if r < 2 or s < 2:
        raise ParameterError(f"need r >= 2 and s >= 2, got ({r}, {s})")
    if r * s - r - s <= 0:
        raise DomainError(
            f"the variational problem degenerates at (r, s) = ({r}, {s})"
        )


def _g(x: float) -> float:
    """x log x extended by g(0) = 0; arguments within 1e-15 of zero are
    clamped to the boundary, anything more negative is a domain error."""
    if x < -_BOUNDARY_SLACK:
        raise DomainError(f"g argument {x} is negative")
    if x <= 0:
        return 0.0
    return x * math.log(x)


def phi(p: LaplacePoint, r: int, s: int) -> float:
    """The exponential-scale part of the second-moment summand."""
    _check_rs(r, s)
    if not p.in_domain(s):
        raise DomainError(f"({p.alpha}, {p.beta}) lies outside the domain")
    a, b = p.alpha, p.beta
    return (
        (a + b) * math.log(r - 1)
        + _g(a + b)
        + _g(r - 1 - a - b)
        - 2 / (s - 1) * _g(b)
        - _g(a)
        - _g(r * s - r - s - s * b) / (s * (s - 1))
        - _g(1 - (s - 1) * a - b) / (s - 1)
    )


def phi_at_origin(r: int, s: int) -> float:
    """phi(0, 0) = (r-1) log(r-1) - ((rs-r-s)/(s(s-1))) log(rs-r-s), the
    boundary value that competes with the interior maximum."""
    _check_rs(r, s)
    gamma = r * s - r - s
    return (r - 1) * math.log(r - 1) - gamma * math.log(gamma) / (s * (s - 1))


def phi_at_max_closed(r: int, s: int) -> float:
    """Closed form of phi(alpha0, beta0):
    2(r-1)log(r-1) - (2(rs-r-s)/(s(s-1)))log(rs-r-s)
    + (r/s)log(s-1) - ((rs-r-s)/s)log r."""
    _check_rs(r, s)
    gamma = r * s - r - s
    return (
        2 * (r - 1) * math.log(r - 1)
        - 2 * gamma * math.log(gamma) / (s * (s - 1))
        + r * math.log(s - 1) / s
        - gamma * math.log(r) / s
    )


def stationary_point(r: int, s: int) -> LaplacePoint:
    _check_rs(r, s)
    denom = r * (s - 1)
    return LaplacePoint(1 / denom, (r * s - r - s) / denom)


def _require_interior(p: LaplacePoint, r: int, s: int) -> None:
    a, b = p.alpha, p.beta
    if (
        a <= 0
        or b <= 0
        or (s - 1) * a + b >= 1
        or r * s - r - s - s * b <= 0
        or r - 1 - a - b <= 0
    ):
        raise DomainError(
            f"({a}, {b}) is not interior to the domain for (r, s) = ({r}, {s})"
        )


def grad_phi(p: LaplacePoint, r: int, s: int) -> tuple[float, float]:
    """Analytic first partials of phi at an interior point.

    phi_alpha = log((r-1)(alpha+beta) E) - log(alpha (r-1-alpha-beta)),
    phi_beta  = log((r-1)(alpha+beta)) - log(r-1-alpha-beta)
                + (log((rs-r-s-s beta) E) - 2 log beta)/(s-1),
    where E = 1 - (s-1) alpha - beta.
    """
    _check_rs(r, s)
    _require_interior(p, r, s)
    a, b = p.alpha, p.beta
    ab = a + b
    rest = r - 1 - ab
    edge = 1 - (s - 1) * a - b
    gamma_b = r * s - r - s - s * b
    d_alpha = (
        math.log(r - 1) + math.log(ab) - math.log(rest)
        - math.log(a) + math.log(edge)
    )
    d_beta = (
        math.log(r - 1)
        + math.log(ab)
        - math.log(rest)
        + (math.log(gamma_b) + math.log(edge) - 2 * math.log(b)) / (s - 1)
    )
    return d_alpha, d_beta


def hessian_phi(p: LaplacePoint, r: int, s: int) -> list[list[float]]:
    """Analytic second partials, differentiating grad_phi once more:

    phi_aa = 1/(a+b) + 1/(r-1-a-b) - 1/a - (s-1)/E
    phi_ab = 1/(a+b) + 1/(r-1-a-b) - 1/E
    phi_bb = 1/(a+b) + 1/(r-1-a-b)
             + (-s/(rs-r-s-sb) - 1/E - 2/b)/(s-1)
    with E = 1 - (s-1)a - b.
    """
    _check_rs(r, s)
    _require_interior(p, r, s)
    a, b = p.alpha, p.beta
    common = 1 / (a + b) + 1 / (r - 1 - a - b)
    edge = 1 - (s - 1) * a - b
    gamma_b = r * s - r - s - s * b
    h_aa = common - 1 / a - (s - 1) / edge
    h_ab = common - 1 / edge
    h_bb = common + (-s / gamma_b - 1 / edge - 2 / b) / (s - 1)
    return [[h_aa, h_ab], [h_ab, h_bb]]


def neg_hessian_det_closed(r: int, s: int) -> float:
    """det(-H0) = r^3 (s-1)^2 (r^2-rs+r+s-1) / ((r-1)^2 (rs-r-s))."""
    _check_rs(r, s)
    gamma = r * s - r - s
    disc = r * r - r * s + r + s - 1
    return r**3 * (s - 1) ** 2 * disc / ((r - 1) ** 2 * gamma)


def hessian_trace_closed(r: int, s: int) -> float:
    """trace(H0) = -(r^2/((r-1)(rs-r-s)^2) + r(2r-1)/((r-1)(rs-r-s))
    + (r^2-4r+1) r/(r-1)^2 + rs(s-1)); negative wherever the variance
    machinery applies."""
    _check_rs(r, s)
    gamma = r * s - r - s
    return -(
        r * r / ((r - 1) * gamma * gamma)
        + r * (2 * r - 1) / ((r - 1) * gamma)
        + (r * r - 4 * r + 1) * r / (r - 1) ** 2
        + r * s * (s - 1)
    )


# ---------------------------------------------------------------------------
# the ridge
# ---------------------------------------------------------------------------

def ridge(x: float, r: int, s: int) -> LaplacePoint:
    """The curve along which phi_alpha vanishes:
    alpha(x) = (1+x)/D, beta(x) = (rs-r-s)/D with
    D = rs - r + sx + x(x+1)/(r-1).  Passes through the stationary point
    at x = 0 and stays interior to K for x > -1."""
    _check_rs(r, s)
    if x <= -1:
        raise DomainError(f"ridge parameter must exceed -1, got {x}")
    denom = r * s - r + s * x + x * (x + 1) / (r - 1)
    return LaplacePoint((1 + x) / denom, (r * s - r - s) / denom)


def ridge_equation_residual(x: float, r: int, s: int) -> float:
    """(rs-r-s)(1 + x/(r-1))^(s-2) - (1+x)(rs-r-s + sx + x(x+1)/(r-1)).

    Zeros of this expression are the candidate stationary points along
    the ridge; x = 0 is always one, exactly, and the sign-change pattern
    elsewhere distinguishes the small-s and large-s regimes.
    """
    _check_rs(r, s)
    if x <= -1:
        raise DomainError(f"ridge parameter must exceed -1, got {x}")
    gamma = r * s - r - s
    return (1 + x / (r - 1)) ** (s - 2) * gamma - (1 + x) * (
        gamma + s * x + x * (x + 1) / (r - 1)
    )


def ridge_residual_sign_changes(
    r: int, s: int, lo: float = -0.999, hi: float = 50.0, points: int = 20_000
) -> list[float]:
    """Approximate roots of the ridge equation found by sign changes on a
    uniform grid; exact zeros hit by a grid point are included once."""
    _check_rs(r, s)
    xs = np.linspace(lo, hi, points)
    values = np.array([ridge_equation_residual(float(x), r, s) for x in xs])
    roots: list[float] = []
    for i in range(len(xs) - 1):
        v0, v1 = values[i], values[i + 1]
        if v0 == 0.0:
            roots.append(float(xs[i]))
        elif v0 * v1 < 0:
            roots.append(float((xs[i] + xs[i + 1]) / 2))
    if values[-1] == 0.0:
        roots.append(float(xs[-1]))
    return roots


# ---------------------------------------------------------------------------
# numeric global maximization
# ---------------------------------------------------------------------------

def _phi_or_nan(a: float, b: float, r: int, s: int) -> float:
    try:
        return phi(LaplacePoint(a, b), r, s)
    except DomainError:
        return math.nan


def maximize_phi(
    r: int,
    s: int,
    grid_resolution: int = 400,
    refine_tolerance: float = 1e-12,
) -> tuple[LaplacePoint, float]:
    """Locate the global maximum of phi over K numerically.

    A dense grid scan picks the best feasible start, then damped Newton
    ascent on the analytic gradient runs until its sup-norm drops below
    refine_tolerance.  If the boundary value phi(0, 0) matches or beats
    the refined interior value, the interior point is not the global
    maximum (the subcritical situation) and BoundaryDominatesError is
    raised.  The refined point is also required to coincide with the
    predicted stationary point to about single-precision accuracy, which
    guards against converging to a spurious ridge point.
    """
    _check_rs(r, s)
    if grid_resolution < 10:
        raise ParameterError("grid_resolution below 10 is not meaningful")
    best: tuple[float, float, float] | None = None
    for a in np.linspace(0.0, 1.0 / (s - 1), grid_resolution):
        b_cap = 1.0 - (s - 1) * a
        for b in np.linspace(0.0, b_cap, grid_resolution):
            value = _phi_or_nan(float(a), float(b), r, s)
            if math.isnan(value):
                continue
            if best is None or value > best[0]:
                best = (value, float(a), float(b))
    assert best is not None
    origin_value = phi_at_origin(r, s)
    point = LaplacePoint(best[1], best[2])
    try:
        point = _newton_ascent(point, r, s, refine_tolerance)
    except DomainError:
        raise BoundaryDominatesError(
            f"ascent from the grid maximum left the interior at "
            f"(r, s) = ({r}, {s}); the boundary dominates"
        )
    value = phi(point, r, s)
    if value <= origin_value:
        raise BoundaryDominatesError(
            f"phi(0, 0) = {origin_value} is not exceeded by the interior "
            f"value {value} at (r, s) = ({r}, {s})"
        )
    predicted = stationary_point(r, s)
    drift = math.hypot(point.alpha - predicted.alpha, point.beta - predicted.beta)
    if drift > 1e-6:
        raise ArithmeticError(
            f"numeric maximum ({point.alpha}, {point.beta}) is {drift} away "
            "from the predicted stationary point"
        )
    return point, value


def _newton_ascent(
    start: LaplacePoint, r: int, s: int, tolerance: float
) -> LaplacePoint:
    point = start
    value = phi(point, r, s)
    for _ in range(200):
        try:
            g = grad_phi(point, r, s)
        except DomainError:
            # grid maxima can sit on the boundary where the gradient
            # blows up; nudge inward before the first Newton step
            point = _nudge_interior(point, r, s)
            g = grad_phi(point, r, s)
        if max(abs(g[0]), abs(g[1])) < tolerance:
            return point
        h = hessian_phi(point, r, s)
        det = h[0][0] * h[1][1] - h[0][1] * h[1][0]
        if det == 0:
            raise DomainError("singular Hessian during ascent")
        step_a = -(h[1][1] * g[0] - h[0][1] * g[1]) / det
        step_b = -(h[0][0] * g[1] - h[1][0] * g[0]) / det
        if max(abs(step_a), abs(step_b)) < 1e-8:
            # endgame: improvements in phi drop below one double ulp, so
            # the value-based line search cannot see them; the undamped
            # step is safe here and converges quadratically on the
            # gradient itself
            candidate = LaplacePoint(point.alpha + step_a, point.beta + step_b)
            try:
                _require_interior(candidate, r, s)
            except DomainError:
                return point
            point, value = candidate, phi(candidate, r, s)
            continue
        scale = 1.0
        for _ in range(60):
            candidate = LaplacePoint(
                point.alpha + scale * step_a, point.beta + scale * step_b
            )
            try:
                _require_interior(candidate, r, s)
                candidate_value = phi(candidate, r, s)
            except DomainError:
                scale /= 2
                continue
            if candidate_value >= value:
                point, value = candidate, candidate_value
                break
            scale /= 2
        else:
            return point
    raise DomainError("ascent failed to converge")


def _nudge_interior(p: LaplacePoint, r: int, s: int) -> LaplacePoint:
    predicted = stationary_point(r, s)
    for weight in (1e-6, 1e-4, 1e-2, 1e-1, 0.5):
        candidate = LaplacePoint(
            (1 - weight) * p.alpha + weight * predicted.alpha,
            (1 - weight) * p.beta + weight * predicted.beta,
        )
        try:
            _require_interior(candidate, r, s)
            return candidate
        except DomainError:
            continue
    return predicted


# ---------------------------------------------------------------------------
# prefactors
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LaplacePrefactors:
    """Pieces of the asymptotic second moment
    E Y^2 ~ 2 pi psi0 / (det(lattice) sqrt(det(-H0))) * b_n n e^(n phi0),
    with det(lattice) = s - 1.  log_second_moment is the log of the
    right-hand side; b_n itself leaves double range for large n (0.0 or
    inf depending on the sign of its exponent), so the log form is the
    one to consume."""

    r: int
    s: int
    n: int
    log_b_n: float
    b_n: float
    psi_direct: float
    psi_closed: float
    phi0: float
    neg_hessian_det: float
    ratio_constant: float
    log_second_moment: float

    def to_json_dict(self) -> dict:
        return {
            "r": self.r,
            "s": self.s,
            "n": self.n,
            "log_b_n": self.log_b_n,
            "b_n": self.b_n,
            "psi_direct": self.psi_direct,
            "psi_closed": self.psi_closed,
            "phi0": self.phi0,
            "neg_hessian_det": self.neg_hessian_det,
            "ratio_constant": self.ratio_constant,
            "log_second_moment": self.log_second_moment,
        }


def psi_weight(p: LaplacePoint, r: int, s: int) -> float:
    """The subexponential weight
    sqrt(r-1-a-b) / ((a+b)^(3/2) (rs-r-s(1+b))^(1/2+2/(s-1))
    b^(1-2/(s-1)) sqrt(a) sqrt(1-b-(s-1)a)).

    At s = 2 the beta exponent is -1 and the middle exponent is 5/2; the
    expression is evaluated literally in that case too.
    """
    _check_rs(r, s)
    a, b = p.alpha, p.beta
    ab = a + b
    gamma_b = r * s - r - s * (1 + b)
    edge = 1 - b - (s - 1) * a
    if min(a, b, ab, gamma_b, edge) <= 0 or r - 1 - ab <= 0:
        raise DomainError(
            f"psi is evaluated only strictly inside its domain, got ({a}, {b})"
        )
    return math.sqrt(r - 1 - ab) / (
        ab ** 1.5
        * gamma_b ** (0.5 + 2 / (s - 1))
        * b ** (1 - 2 / (s - 1))
        * math.sqrt(a)
        * math.sqrt(edge)
    )


def psi_at_max_closed(r: int, s: int) -> float:
    """psi(alpha0, beta0) = r^(7/2) (s-1)^(5/2) /
    (sqrt(r-1) (rs-r-s)^(2s/(s-1)))."""
    _check_rs(r, s)
    gamma = r * s - r - s
    return r ** 3.5 * (s - 1) ** 2.5 / (math.sqrt(r - 1) * gamma ** (2 * s / (s - 1)))


def log_b_n(r: int, s: int, n: int) -> float:
    """log of b_n = ((s-1)^2/(2 pi n^3)) ((s-1)^(r/s)/r^((rs-r-s)/s))^n."""
    _check_rs(r, s)
    if n < 1:
        raise ParameterError(f"n must be positive, got {n}")
    gamma = r * s - r - s
    per_n = r * math.log(s - 1) / s - gamma * math.log(r) / s
    return 2 * math.log(s - 1) - math.log(2 * math.pi) - 3 * math.log(n) + n * per_n


def second_moment_ratio_constant(r: int, s: int) -> float:
    """2 pi psi0 / ((s-1) sqrt(det(-H0))), the constant relating the
    assembled second moment to b_n n e^(n phi0)."""
    return (
        2
        * math.pi
        * psi_at_max_closed(r, s)
        / ((s - 1) * math.sqrt(neg_hessian_det_closed(r, s)))
    )


def laplace_prefactors(r: int, s: int, n: int) -> LaplacePrefactors:
    """Evaluate every prefactor at the stationary point, both routes."""
    point = stationary_point(r, s)
    log_bn = log_b_n(r, s, n)
    phi0 = phi_at_max_closed(r, s)
    constant = second_moment_ratio_constant(r, s)
    if log_bn <= -745:
        b_n_value = 0.0
    elif log_bn >= 710:
        b_n_value = math.inf
    else:
        b_n_value = math.exp(log_bn)
    return LaplacePrefactors(
        r=r,
        s=s,
        n=n,
        log_b_n=log_bn,
        b_n=b_n_value,
        psi_direct=psi_weight(point, r, s),
        psi_closed=psi_at_max_closed(r, s),
        phi0=phi0,
        neg_hessian_det=neg_hessian_det_closed(r, s),
        ratio_constant=constant,
        log_second_moment=math.log(constant) + log_bn + math.log(n) + n * phi0,
    )
