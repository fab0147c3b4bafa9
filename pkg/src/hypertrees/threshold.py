"""The growth-rate function L(r, s) and the phase boundary rho(s).

L(r, s) is the per-vertex logarithmic growth rate of the expected
spanning-tree count:

    L(r, s) = (r/s) log(s-1) + (r-1) log(r-1)
              - ((rs-r-s)/s) log r - ((rs-r-s)/(s(s-1))) log(rs-r-s).

For s in {2, 3, 4} (excluding the degenerate pair (2, 2)) it is positive
for every r, so the expected count grows exponentially.  For s >= 5 it
changes sign once, at a unique rho(s) > 2; spanning trees appear
asymptotically almost surely for r > rho(s) and vanish for r <= rho(s).

Root-finding runs at 40 decimal digits because L is a difference of
large near-cancelling terms near its root; double precision alone cannot
certify residuals at the 1e-12 level for larger s.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from functools import lru_cache

import mpmath

from .errors import DomainError, ParameterError

_DPS = 40
_BISECTION_STEPS = 140


def _check_domain(r: float, s: int) -> None:
    if s < 2:
        raise ParameterError(f"need s >= 2, got s = {s}")
    if r <= 1:
        raise DomainError(f"L(r, s) needs r > 1, got r = {r}")
    if r * s - r - s <= 0:
        raise DomainError(
            f"L(r, s) needs rs - r - s > 0, got r = {r}, s = {s}"
        )


def L(r: float, s: int) -> float:
    """Growth rate of the expected tree count per vertex; see module doc."""
    _check_domain(r, s)
    gamma = r * (s - 1) - s
    return (
        r / s * math.log(s - 1)
        + (r - 1) * math.log(r - 1)
        - gamma / s * math.log(r)
        - gamma / (s * (s - 1)) * math.log(gamma)
    )


def _L_mp(r, s: int):
    """L evaluated with mpmath arithmetic at the active precision."""
    r = mpmath.mpf(r)
    gamma = r * (s - 1) - s
    return (
        r / s * mpmath.log(s - 1)
        + (r - 1) * mpmath.log(r - 1)
        - gamma / s * mpmath.log(r)
        - gamma / (s * (s - 1)) * mpmath.log(gamma)
    )


def L_prime(r: float, s: int) -> float:
    """dL/dr = 1/r + log(r-1) - ((s-1)/s) log r - (1/s) log(r - s/(s-1))."""
    _check_domain(r, s)
    return (
        1 / r
        + math.log(r - 1)
        - (s - 1) / s * math.log(r)
        - math.log(r - s / (s - 1)) / s
    )


def _L_prime_mp(r, s: int):
    r = mpmath.mpf(r)
    return (
        1 / r
        + mpmath.log(r - 1)
        - mpmath.mpf(s - 1) / s * mpmath.log(r)
        - mpmath.log(r - mpmath.mpf(s) / (s - 1)) / s
    )


def L_double_prime(r: float, s: int) -> float:
    """d^2L/dr^2 = (1/r^2) (1/(r-1) - r/(rs-r-s))."""
    _check_domain(r, s)
    gamma = r * (s - 1) - s
    return (1 / (r - 1) - r / gamma) / (r * r)


def inflection_point(s: int) -> float:
    """The r where L'' changes sign: (s + sqrt(s(s-4)))/2, real for s >= 4.
    It sits strictly between s/2 and s, so L is concave in r beyond s."""
    if s < 4:
        raise DomainError(f"L'' has no sign change for s = {s} < 4")
    return (s + math.sqrt(s * (s - 4))) / 2


# ---------------------------------------------------------------------------
# the root rho(s)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ThresholdReport:
    """Solution of L(rho, s) = 0 with its bounds and quality measures.

    residual is |L(rho, s)| evaluated in high precision at the reported
    double; identity_residual is the defining identity
    (s-1)^rho (rho-1)^(s(rho-1)) = rho^(rho s - rho - s)
    (rho s - rho - s)^((rho s - rho - s)/(s-1)) checked in log form.
    """

    s: int
    rho: float
    rho_minus: float
    rho_plus: float
    expansion: float
    bracket: tuple[float, float]
    residual: float
    identity_residual: float

    def to_json_dict(self) -> dict:
        return {
            "s": self.s,
            "rho": self.rho,
            "rho_minus": self.rho_minus,
            "rho_plus": self.rho_plus,
            "expansion": self.expansion,
            "bracket": list(self.bracket),
            "residual": self.residual,
            "identity_residual": self.identity_residual,
        }


def _require_threshold_s(s: int) -> None:
    if s < 5:
        raise DomainError(
            f"L(., s) has no root for s = {s}; the growth rate is positive "
            "for every r when s <= 4"
        )


def rho_bounds(s: int) -> tuple[float, float]:
    """(e^(s-2)/(s-1) - (s-1)/2, e^(s-2)/(s-1) - (s-3)/2), a unit-width
    interval containing rho(s)."""
    _require_threshold_s(s)
    center = math.exp(s - 2) / (s - 1)
    return center - (s - 1) / 2, center - (s - 3) / 2


def rho_expansion(s: int) -> float:
    """Two-term expansion e^(s-2)/(s-1) - (s^2-3s+1)/(2(s-1)); the error
    term decays like s^4 e^(-s)."""
    _require_threshold_s(s)
    return math.exp(s - 2) / (s - 1) - (s * s - 3 * s + 1) / (2 * (s - 1))


@lru_cache(maxsize=None)
def rho(s: int) -> ThresholdReport:
    """Locate the sign change of L(., s) by bisection at 40 digits.

    The bracket is (2, rho_plus + 1) for s = 5, where the root may lie
    below s, and (s, rho_plus + 1) for s >= 6, where it always lies above
    s.  L is strictly increasing on the bracket in both cases.
    """
    _require_threshold_s(s)
    rho_minus, rho_plus = rho_bounds(s)
    lo_f = 2.0 + 1e-9 if s == 5 else s + 1e-9
    hi_f = rho_plus + 1.0
    with mpmath.workdps(_DPS):
        lo, hi = mpmath.mpf(lo_f), mpmath.mpf(hi_f)
        f_lo, f_hi = _L_mp(lo, s), _L_mp(hi, s)
        if not (f_lo < 0 < f_hi):
            raise DomainError(
                f"no sign change of L on the bracket ({lo_f}, {hi_f}) "
                f"for s = {s}"
            )
        for _ in range(_BISECTION_STEPS):
            mid = (lo + hi) / 2
            if _L_mp(mid, s) < 0:
                lo = mid
            else:
                hi = mid
        root = (lo + hi) / 2
        for _ in range(4):
            root = root - _L_mp(root, s) / _L_prime_mp(root, s)
        rho_f = float(root)
        residual = abs(_L_mp(rho_f, s))
        identity_residual = abs(s * _L_mp(rho_f, s))
        report = ThresholdReport(
            s=s,
            rho=rho_f,
            rho_minus=rho_minus,
            rho_plus=rho_plus,
            expansion=rho_expansion(s),
            bracket=(lo_f, hi_f),
            residual=float(residual),
            identity_residual=float(identity_residual),
        )
    if not (report.rho_minus < report.rho < report.rho_plus):
        raise DomainError(f"root for s = {s} escaped its bounds")
    if report.rho <= 2 or (s >= 6 and report.rho <= s):
        raise DomainError(f"root for s = {s} violates its lower bounds")
    return report


# ---------------------------------------------------------------------------
# phase classification
# ---------------------------------------------------------------------------

class Phase(enum.Enum):
    SUPERCRITICAL = "supercritical"
    SUBCRITICAL = "subcritical"


def classify(r: int, s: int) -> Phase:
    """Supercritical means a spanning tree exists asymptotically almost
    surely.  That holds for s in {2, 3, 4} except at (2, 2), and for
    s >= 5 exactly when r > rho(s); the boundary r = rho(s) itself is
    subcritical."""
    if r < 2 or s < 2:
        raise ParameterError(f"need r >= 2 and s >= 2, got ({r}, {s})")
    if s <= 4:
        return Phase.SUBCRITICAL if (r, s) == (2, 2) else Phase.SUPERCRITICAL
    return _classify_against(r, rho(s).rho)


def _classify_against(r: int, rho_value: float) -> Phase:
    return Phase.SUPERCRITICAL if r > rho_value else Phase.SUBCRITICAL


def classification_stable(s: int, perturbation: float = 1e-8) -> bool:
    """Whether perturbing rho(s) by +-perturbation flips the phase of any
    integer r in [2, ceil(rho) + 2].  Guards against a root landing so
    close to an integer that rounding could change the phase map."""
    value = rho(s).rho
    for r in range(2, math.ceil(value) + 3):
        baseline = _classify_against(r, value)
        for shifted in (value - perturbation, value + perturbation):
            if _classify_against(r, shifted) is not baseline:
                return False
    return True


# ---------------------------------------------------------------------------
# table reproduction
# ---------------------------------------------------------------------------

def round_3dp(x: float) -> str:
    """Half-up rounding to three decimal places, as a string."""
    return str(Decimal(repr(x)).quantize(Decimal("0.001"), rounding=ROUND_HALF_UP))


def round_2sf(x: float) -> str:
    """Half-up rounding to two significant figures, as a plain string."""
    d = Decimal(repr(x))
    if d == 0:
        return "0"
    quantum = Decimal(1).scaleb(d.adjusted() - 1)
    rounded = d.quantize(quantum, rounding=ROUND_HALF_UP)
    return format(rounded, "f")


def threshold_table_rows(s_lo: int, s_hi: int) -> list[dict[str, object]]:
    """Rows (s, rho_minus, rho, rho_plus) rounded half-up to 3 d.p."""
    if not 5 <= s_lo <= s_hi:
        raise ParameterError(f"need 5 <= s_lo <= s_hi, got [{s_lo}, {s_hi}]")
    rows = []
    for s in range(s_lo, s_hi + 1):
        report = rho(s)
        rows.append(
            {
                "s": s,
                "rho_minus": round_3dp(report.rho_minus),
                "rho": round_3dp(report.rho),
                "rho_plus": round_3dp(report.rho_plus),
            }
        )
    return rows


def sign_table_rows(s_lo: int, s_hi: int) -> list[dict[str, object]]:
    """Rows (s, L at rho_minus, L at rho_plus) to two significant figures.

    L is evaluated in high precision first; near the root it is the small
    difference of terms that grow like e^(s-2) log(...), so double
    precision would corrupt the second significant figure by s = 11.
    """
    if not 5 <= s_lo <= s_hi:
        raise ParameterError(f"need 5 <= s_lo <= s_hi, got [{s_lo}, {s_hi}]")
    rows = []
    with mpmath.workdps(_DPS):
        for s in range(s_lo, s_hi + 1):
            report = rho(s)
            at_minus = float(_L_mp(report.rho_minus, s))
            at_plus = float(_L_mp(report.rho_plus, s))
            rows.append(
                {
                    "s": s,
                    "L_at_rho_minus": round_2sf(at_minus),
                    "L_at_rho_plus": round_2sf(at_plus),
                }
            )
    return rows
