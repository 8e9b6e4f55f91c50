"""Finite-precision arithmetic in Q_p.

A nonzero element is stored as ``p**valuation * unit`` where ``unit`` is known
modulo ``p**digits``.  Multiplication, inversion and powers never lose digits
in this form; only addition can cancel leading digits, and when it does the
result records how many digits survived.

Three states are kept apart:

* exact zero (``is_zero``), e.g. ``from_rational(0, 1, ctx)``;
* zero at working precision (``digits == 0``), the result of a cancellation
  that consumed every known digit.  ``valuation`` then holds the absolute
  precision: the true value lies in ``p**valuation * Z_p``;
* an ordinary nonzero element with ``1 <= digits <= precision``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

from sympy import isprime

from .errors import ContextMismatchError, DomainError
from .radius import RadiusExp

DEFAULT_PRECISION = 64


def valuation_int(n: int, p: int) -> int:
    """Exponent of ``p`` in the nonzero integer ``n``."""
    if n == 0:
        raise DomainError("valuation of 0 is infinite")
    v = 0
    n = abs(n)
    while n % p == 0:
        n //= p
        v += 1
    return v


@dataclass(frozen=True)
class PAdicContext:
    prime: int
    precision: int = DEFAULT_PRECISION

    def __post_init__(self):
        if not isinstance(self.prime, int) or self.prime < 2 or not isprime(self.prime):
            raise DomainError(f"{self.prime!r} is not a prime")
        if not isinstance(self.precision, int) or self.precision < 1:
            raise DomainError(f"precision must be a positive integer, got {self.precision!r}")

    @cached_property
    def modulus(self) -> int:
        return self.prime ** self.precision

    def with_precision(self, precision: int) -> PAdicContext:
        return PAdicContext(self.prime, precision)

    def __call__(self, numerator: int | Fraction, denominator: int | Fraction = 1) -> PAdicNumber:
        return from_rational(numerator, denominator, self)


@dataclass(frozen=True)
class PAdicNumber:
    context: PAdicContext
    valuation: int = 0
    unit: int = 0
    digits: int = 0
    is_zero: bool = False

    # -- construction -------------------------------------------------------

    @classmethod
    def zero(cls, ctx: PAdicContext) -> PAdicNumber:
        return cls(ctx, 0, 0, ctx.precision, True)

    @classmethod
    def zero_at_precision(cls, ctx: PAdicContext, absolute_precision: int) -> PAdicNumber:
        return cls(ctx, absolute_precision, 0, 0, False)

    @classmethod
    def from_parts(cls, ctx: PAdicContext, valuation: int, unit: int,
                   digits: int | None = None) -> PAdicNumber:
        """Build ``p**valuation * unit`` with ``unit`` known mod ``p**digits``."""
        p = ctx.prime
        digits = ctx.precision if digits is None else digits
        if not 1 <= digits <= ctx.precision:
            raise DomainError(f"digits must lie in [1, {ctx.precision}], got {digits}")
        if unit % p == 0:
            raise DomainError(f"unit {unit} is divisible by {p}")
        return cls(ctx, valuation, unit % p ** digits, digits, False)

    @classmethod
    def one(cls, ctx: PAdicContext) -> PAdicNumber:
        return cls(ctx, 0, 1, ctx.precision, False)

    # -- state --------------------------------------------------------------

    @property
    def prime(self) -> int:
        return self.context.prime

    @property
    def is_zero_at_precision(self) -> bool:
        return not self.is_zero and self.digits == 0

    @property
    def vanishes(self) -> bool:
        """True for exact zero and for zero at working precision."""
        return self.is_zero or self.digits == 0

    @property
    def absolute_precision(self) -> int | None:
        """Largest ``k`` with the value known modulo ``p**k`` (None for exact zero)."""
        if self.is_zero:
            return None
        return self.valuation + self.digits

    @property
    def known_digits(self) -> int:
        return self.digits

    def residue(self) -> int:
        """Reduction mod p of an integral element."""
        if self.vanishes or self.valuation > 0:
            return 0
        if self.valuation < 0:
            raise DomainError("element is not integral")
        return self.unit % self.prime

    def sort_key(self) -> tuple:
        return (self.is_zero, self.valuation, self.unit, self.digits)

    def to_fraction(self) -> Fraction:
        """The rational ``p**v * unit`` using the stored unit representative."""
        if self.is_zero or self.digits == 0:
            return Fraction(0)
        return Fraction(self.prime) ** self.valuation * self.unit

    # -- arithmetic ---------------------------------------------------------

    def _same(self, other: PAdicNumber) -> None:
        if self.context != other.context:
            raise ContextMismatchError(f"{self.context} vs {other.context}")

    def _coerce(self, other) -> PAdicNumber:
        if isinstance(other, PAdicNumber):
            self._same(other)
            return other
        if isinstance(other, int):
            return from_rational(other, 1, self.context)
        if isinstance(other, Fraction):
            return from_rational(other.numerator, other.denominator, self.context)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return add(self, other)

    __radd__ = __add__

    def __neg__(self) -> PAdicNumber:
        return negate(self)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return add(self, negate(other))

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return add(other, negate(self))

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return mul(self, inv(other))

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return mul(other, inv(self))

    def __pow__(self, k: int) -> PAdicNumber:
        return power(self, k)

    def norm(self) -> RadiusExp:
        return norm(self)

    # -- serialization ------------------------------------------------------

    def to_json(self) -> dict:
        p = self.prime
        if self.is_zero:
            return {"p": p, "v": None, "unit": "0", "digits": self.context.precision}
        return {"p": p, "v": self.valuation, "unit": str(self.unit), "digits": self.digits}

    @classmethod
    def from_json(cls, data: dict, precision: int | None = None) -> PAdicNumber:
        digits = int(data["digits"])
        ctx = PAdicContext(int(data["p"]), precision or max(digits, 1))
        if data["v"] is None:
            return cls.zero(ctx)
        if digits == 0:
            return cls.zero_at_precision(ctx, int(data["v"]))
        return cls.from_parts(ctx, int(data["v"]), int(data["unit"]), digits)

    def __str__(self):
        if self.is_zero:
            return "0"
        if self.digits == 0:
            return f"O({self.prime}^{self.valuation})"
        return f"{self.prime}^{self.valuation} * {self.unit} + O({self.prime}^{self.valuation + self.digits})"


def from_rational(numerator: int | Fraction, denominator: int | Fraction,
                  ctx: PAdicContext) -> PAdicNumber:
    if not all(isinstance(t, (int, Fraction)) for t in (numerator, denominator)):
        raise DomainError("only exact integers and fractions are accepted")
    if denominator == 0:
        raise DomainError("zero denominator")
    value = Fraction(numerator, denominator)
    if value == 0:
        return PAdicNumber.zero(ctx)
    p = ctx.prime
    vn = valuation_int(value.numerator, p)
    vd = valuation_int(value.denominator, p)
    n = value.numerator // p ** vn
    d = value.denominator // p ** vd
    mod = ctx.modulus
    return PAdicNumber(ctx, vn - vd, n * pow(d, -1, mod) % mod, ctx.precision, False)


def from_int(n: int, ctx: PAdicContext) -> PAdicNumber:
    return from_rational(n, 1, ctx)


def negate(x: PAdicNumber) -> PAdicNumber:
    if x.vanishes:
        return x
    return PAdicNumber(x.context, x.valuation, (-x.unit) % x.prime ** x.digits, x.digits, False)


def add(x: PAdicNumber, y: PAdicNumber) -> PAdicNumber:
    """Exact sum; cancellation lowers ``digits`` of the result."""
    x._same(y)
    if x.is_zero:
        return y
    if y.is_zero:
        return x
    ctx = x.context
    p = ctx.prime
    prec = min(x.absolute_precision, y.absolute_precision)
    terms = [t for t in (x, y) if t.digits > 0]
    vmin = min((t.valuation for t in terms), default=prec)
    if vmin >= prec:
        return PAdicNumber.zero_at_precision(ctx, prec)
    mod = p ** (prec - vmin)
    s = sum(t.unit * p ** (t.valuation - vmin) for t in terms) % mod
    if s == 0:
        return PAdicNumber.zero_at_precision(ctx, prec)
    k = valuation_int(s, p)
    v = vmin + k
    digits = prec - v
    return PAdicNumber(ctx, v, (s // p ** k) % p ** digits, digits, False)


def subtract(x: PAdicNumber, y: PAdicNumber) -> PAdicNumber:
    return add(x, negate(y))


def mul(x: PAdicNumber, y: PAdicNumber) -> PAdicNumber:
    x._same(y)
    ctx = x.context
    if x.is_zero or y.is_zero:
        return PAdicNumber.zero(ctx)
    if x.digits == 0 or y.digits == 0:
        # O(p^A) times p^v*(unit) lies in p^(A+v) Z_p
        bound = x.valuation + y.valuation
        return PAdicNumber.zero_at_precision(ctx, bound)
    digits = min(x.digits, y.digits)
    return PAdicNumber(ctx, x.valuation + y.valuation,
                       x.unit * y.unit % x.prime ** digits, digits, False)


def inv(x: PAdicNumber) -> PAdicNumber:
    if x.is_zero:
        raise DomainError("inverse of zero")
    if x.digits == 0:
        raise DomainError("inverse of an element that is zero at working precision")
    mod = x.prime ** x.digits
    return PAdicNumber(x.context, -x.valuation, pow(x.unit, -1, mod), x.digits, False)


def unit_group_order(p: int, digits: int) -> int:
    """Order of ``(Z/p^digits)^*``; exponents of units reduce modulo it."""
    return p ** (digits - 1) * (p - 1)


def power(x: PAdicNumber, k: int) -> PAdicNumber:
    """``x**k`` for any integer ``k``.

    The valuation is scaled by the full ``k``; the unit exponent is reduced
    modulo the unit-group order, so ``k`` may be astronomically large.
    """
    ctx = x.context
    if k == 0:
        return PAdicNumber.one(ctx)
    if x.is_zero:
        if k < 0:
            raise DomainError("negative power of zero")
        return x
    if x.digits == 0:
        if k < 0:
            raise DomainError("negative power of an element that is zero at working precision")
        return PAdicNumber.zero_at_precision(ctx, x.valuation * k)
    p = ctx.prime
    order = unit_group_order(p, x.digits)
    e = k if abs(k) < order else k % order
    unit = pow(x.unit, e, p ** x.digits)
    return PAdicNumber(ctx, x.valuation * k, unit, x.digits, False)


def norm(x: PAdicNumber) -> RadiusExp:
    p = x.prime
    if x.is_zero:
        return RadiusExp.zero(p)
    if x.digits == 0:
        return RadiusExp.zero_below(p, x.valuation)
    return RadiusExp.of(p, x.valuation)


def distance(x: PAdicNumber, y: PAdicNumber) -> RadiusExp:
    """``|x - y|_p``; a precision-limited zero when the digits cancel completely."""
    return norm(subtract(x, y))


def agree(x: PAdicNumber, y: PAdicNumber) -> bool:
    """Equal at working precision."""
    return subtract(x, y).vanishes
