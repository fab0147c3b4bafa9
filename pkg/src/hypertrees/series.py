"""Truncated power series with exact rational coefficients.

Just enough arithmetic for generating-function work at fixed order:
ring operations, the geometric series, and log(1 - u) for series with
zero constant term.  Coefficients are ``fractions.Fraction`` throughout,
so identities checked with these series are exact, not numerical.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .errors import DomainError, ParameterError


class RationalSeries:
    """A power series modulo x^(order+1), held as a coefficient tuple."""

    __slots__ = ("coeffs", "order")

    def __init__(self, coeffs: Sequence[Fraction | int], order: int) -> None:
        if order < 0:
            raise ParameterError("series order must be nonnegative")
        padded = [Fraction(c) for c in coeffs[: order + 1]]
        padded.extend([Fraction(0)] * (order + 1 - len(padded)))
        self.coeffs = tuple(padded)
        self.order = order

    # -- constructors ------------------------------------------------------

    @classmethod
    def constant(cls, value: Fraction | int, order: int) -> "RationalSeries":
        return cls([Fraction(value)], order)

    @classmethod
    def x(cls, order: int) -> "RationalSeries":
        return cls([0, 1], order)

    @classmethod
    def geometric(cls, order: int) -> "RationalSeries":
        """1/(1-x) = 1 + x + x^2 + ..."""
        return cls([1] * (order + 1), order)

    # -- ring operations ---------------------------------------------------

    def _coerce(self, other: "RationalSeries | Fraction | int") -> "RationalSeries":
        if isinstance(other, RationalSeries):
            if other.order != self.order:
                raise ParameterError("series orders differ")
            return other
        return RationalSeries.constant(other, self.order)

    def __add__(self, other: "RationalSeries | Fraction | int") -> "RationalSeries":
        o = self._coerce(other)
        return RationalSeries(
            [a + b for a, b in zip(self.coeffs, o.coeffs)], self.order
        )

    def __sub__(self, other: "RationalSeries | Fraction | int") -> "RationalSeries":
        o = self._coerce(other)
        return RationalSeries(
            [a - b for a, b in zip(self.coeffs, o.coeffs)], self.order
        )

    def __rsub__(self, other: Fraction | int) -> "RationalSeries":
        return self._coerce(other) - self

    def __radd__(self, other: Fraction | int) -> "RationalSeries":
        return self + other

    def __mul__(self, other: "RationalSeries | Fraction | int") -> "RationalSeries":
        if not isinstance(other, RationalSeries):
            scalar = Fraction(other)
            return RationalSeries([c * scalar for c in self.coeffs], self.order)
        o = self._coerce(other)
        out = [Fraction(0)] * (self.order + 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for jj in range(self.order + 1 - i):
                b = o.coeffs[jj]
                if b:
                    out[i + jj] += a * b
        return RationalSeries(out, self.order)

    def __rmul__(self, other: Fraction | int) -> "RationalSeries":
        return self * other

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RationalSeries):
            return NotImplemented
        return self.order == other.order and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash((self.coeffs, self.order))

    def __repr__(self) -> str:
        return f"RationalSeries({list(self.coeffs)!r}, order={self.order})"

    def __getitem__(self, power: int) -> Fraction:
        return self.coeffs[power]

    # -- composition helpers -----------------------------------------------

    def pow_int(self, exponent: int) -> "RationalSeries":
        if exponent < 0:
            raise ParameterError("negative powers are not supported")
        result = RationalSeries.constant(1, self.order)
        base = self
        e = exponent
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def log_one_minus(self) -> "RationalSeries":
        """log(1 - u) = -sum_{k>=1} u^k / k, requiring u(0) = 0."""
        if self.coeffs[0] != 0:
            raise DomainError("log(1-u) needs a series with zero constant term")
        out = RationalSeries.constant(0, self.order)
        power = RationalSeries.constant(1, self.order)
        for k in range(1, self.order + 1):
            power = power * self
            out = out - power * Fraction(1, k)
        return out
