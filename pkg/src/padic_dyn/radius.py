"""Exact radii ``p^(-e)`` with rational exponent ``e``.

Radii are never stored as floats: ``|a|_p^(1/3)`` is irrational as a real
number but is the exact exponent ``v(a)/3``.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

from .errors import DomainError


def _frac(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"exponent must be rational, got {type(value).__name__}")


@functools.total_ordering
@dataclass(frozen=True)
class RadiusExp:
    """The radius ``prime ** (-exponent)``.

    ``is_zero`` and ``is_infinite`` cover the two endpoints.  A zero that was
    only established at working precision carries ``precision_limited=True``
    and keeps in ``exponent`` the bound ``p^(-exponent)`` it is known to be
    below.
    """

    prime: int
    exponent: Fraction = Fraction(0)
    is_zero: bool = False
    is_infinite: bool = False
    precision_limited: bool = False

    def __post_init__(self):
        object.__setattr__(self, "exponent", _frac(self.exponent))
        if self.is_zero and self.is_infinite:
            raise DomainError("a radius cannot be both zero and infinite")
        if self.precision_limited and not self.is_zero:
            raise DomainError("only zero radii can be precision limited")
        if self.is_infinite or (self.is_zero and not self.precision_limited):
            object.__setattr__(self, "exponent", Fraction(0))

    @classmethod
    def of(cls, prime: int, exponent) -> RadiusExp:
        return cls(prime, _frac(exponent))

    @classmethod
    def zero(cls, prime: int) -> RadiusExp:
        return cls(prime, Fraction(0), is_zero=True)

    @classmethod
    def zero_below(cls, prime: int, bound_exponent) -> RadiusExp:
        """Zero at working precision: known only to be at most ``p^-bound``."""
        return cls(prime, _frac(bound_exponent), is_zero=True, precision_limited=True)

    @classmethod
    def infinite(cls, prime: int) -> RadiusExp:
        return cls(prime, Fraction(0), is_infinite=True)

    @classmethod
    def abs_int(cls, prime: int, n: int) -> RadiusExp:
        """``|n|_p`` for an integer ``n``."""
        if n == 0:
            return cls.zero(prime)
        v = 0
        n = abs(n)
        while n % prime == 0:
            n //= prime
            v += 1
        return cls(prime, Fraction(v))

    @property
    def is_finite_positive(self) -> bool:
        return not (self.is_zero or self.is_infinite)

    def _key(self):
        if self.is_zero:
            return (0, Fraction(0))
        if self.is_infinite:
            return (2, Fraction(0))
        return (1, -self.exponent)

    def _check(self, other: RadiusExp) -> None:
        if not isinstance(other, RadiusExp):
            raise TypeError(f"cannot compare RadiusExp with {type(other).__name__}")
        if other.prime != self.prime:
            raise DomainError(f"radii over different primes {self.prime} and {other.prime}")

    def __lt__(self, other):
        if not isinstance(other, RadiusExp):
            return NotImplemented
        self._check(other)
        return self._key() < other._key()

    def same_size(self, other: RadiusExp) -> bool:
        """Order-equality: ignores the precision bookkeeping of zeros."""
        self._check(other)
        return self._key() == other._key()

    def __mul__(self, other: RadiusExp) -> RadiusExp:
        self._check(other)
        if (self.is_zero and other.is_infinite) or (self.is_infinite and other.is_zero):
            raise DomainError("0 * infinity is undefined")
        if self.is_zero or other.is_zero:
            return RadiusExp.zero(self.prime)
        if self.is_infinite or other.is_infinite:
            return RadiusExp.infinite(self.prime)
        return RadiusExp(self.prime, self.exponent + other.exponent)

    def __truediv__(self, other: RadiusExp) -> RadiusExp:
        self._check(other)
        return self * other.reciprocal()

    def reciprocal(self) -> RadiusExp:
        if self.is_zero:
            return RadiusExp.infinite(self.prime)
        if self.is_infinite:
            return RadiusExp.zero(self.prime)
        return RadiusExp(self.prime, -self.exponent)

    def __pow__(self, k) -> RadiusExp:
        k = _frac(k)
        if not self.is_finite_positive:
            if k == 0:
                return RadiusExp.of(self.prime, 0)
            if k < 0:
                return self.reciprocal() ** (-k)
            return RadiusExp(self.prime, Fraction(0), is_zero=self.is_zero,
                             is_infinite=self.is_infinite)
        return RadiusExp(self.prime, self.exponent * k)

    def as_fraction(self) -> Fraction:
        """The real value, available only for integer exponents."""
        if self.is_infinite:
            raise DomainError("infinite radius has no rational value")
        if self.is_zero:
            return Fraction(0)
        if self.exponent.denominator != 1:
            raise DomainError(f"p^(-{self.exponent}) is irrational")
        return Fraction(self.prime) ** (-int(self.exponent))

    def to_json(self) -> dict:
        out = {"p": self.prime, "num": self.exponent.numerator, "den": self.exponent.denominator}
        if self.is_zero:
            out["zero"] = True
            if self.precision_limited:
                out["precision_limited"] = True
            else:
                out["num"], out["den"] = None, None
        if self.is_infinite:
            out["infinite"] = True
            out["num"], out["den"] = None, None
        return out

    @classmethod
    def from_json(cls, data: dict) -> RadiusExp:
        p = int(data["p"])
        if data.get("infinite"):
            return cls.infinite(p)
        if data.get("zero"):
            if data.get("precision_limited"):
                return cls.zero_below(p, Fraction(data["num"], data["den"]))
            return cls.zero(p)
        return cls(p, Fraction(data["num"], data["den"]))

    def __str__(self):
        if self.is_infinite:
            return "inf"
        if self.is_zero:
            return f"0 (<= {self.prime}^-{self.exponent})" if self.precision_limited else "0"
        return f"{self.prime}^({-self.exponent})"
