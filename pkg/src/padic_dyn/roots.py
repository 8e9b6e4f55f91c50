"""Roots in Q_p by Hensel lifting.

Seeds are found by scanning every residue mod p, then refined by Newton
iteration with doubling precision.  Only simple roots mod p are lifted; a
seed where the derivative vanishes mod p raises ``NotLiftableError``.  That
is the situation for cube roots of units at p = 3, which live in a ramified
extension and are handled at the norm level only.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Sequence

from .errors import DomainError, NotLiftableError
from .padic_core import PAdicContext, PAdicNumber, valuation_int


class IntPoly:
    """Polynomial with integer coefficients.

    Built from a dense coefficient list (lowest degree first); stored as
    ``{exponent: coefficient}`` so that ``x^k - 1`` with a huge ``k`` costs one
    modular exponentiation per evaluation.
    """

    def __init__(self, coeffs: Sequence[int] | dict[int, int], label: str | None = None):
        if isinstance(coeffs, dict):
            terms = {int(e): int(c) for e, c in coeffs.items() if c}
        else:
            terms = {i: int(c) for i, c in enumerate(coeffs) if c}
        if any(e < 0 for e in terms):
            raise DomainError("negative exponents are not polynomial")
        self.terms = terms
        self.label = label or " + ".join(f"{c}x^{e}" for e, c in sorted(terms.items())) or "0"

    @classmethod
    def cube_minus(cls, c: int) -> IntPoly:
        return cls({3: 1, 0: -c}, f"x^3 - {c}")

    @classmethod
    def power_minus_one(cls, k: int) -> IntPoly:
        if k < 1:
            raise DomainError(f"k must be >= 1, got {k}")
        return cls({k: 1, 0: -1}, f"x^{k} - 1")

    @property
    def degree(self) -> int:
        return max(self.terms, default=0)

    def __call__(self, x: int, mod: int | None = None) -> int:
        if mod is None:
            return sum(c * x ** e for e, c in self.terms.items())
        return sum(c * pow(x, e, mod) for e, c in self.terms.items()) % mod

    def derivative(self) -> IntPoly:
        return IntPoly({e - 1: e * c for e, c in self.terms.items() if e > 0})

    def __repr__(self):
        return f"IntPoly({self.label})"


@dataclass(frozen=True)
class RootSet:
    equation: str
    roots: tuple[PAdicNumber, ...]

    @property
    def count(self) -> int:
        return len(self.roots)

    @property
    def g(self) -> int:
        return len(self.roots)

    def to_json(self) -> dict:
        return {"equation": self.equation, "g": self.g, "roots": [r.to_json() for r in self.roots]}


def hensel_lift(poly: IntPoly, seed: int, ctx: PAdicContext, digits: int | None = None) -> PAdicNumber:
    """Lift a simple root of ``poly`` mod p to a root mod ``p**digits``."""
    p = ctx.prime
    digits = ctx.precision if digits is None else digits
    if poly(seed, p) % p:
        raise DomainError(f"{seed} is not a root of {poly.label} mod {p}")
    dpoly = poly.derivative()
    if dpoly(seed, p) % p == 0:
        raise NotLiftableError(
            f"seed {seed} is not a simple root of {poly.label} mod {p}: derivative vanishes")
    x = seed % p
    k = 1
    while k < digits:
        k = min(2 * k, digits)
        mod = p ** k
        x = (x - poly(x, mod) * pow(dpoly(x, mod), -1, mod)) % mod
    if x == 0:
        # only possible for the root 0 itself
        return PAdicNumber.zero_at_precision(ctx, digits)
    v = valuation_int(x, p)
    return PAdicNumber.from_parts(ctx, v, x // p ** v, digits - v)


def _scan(poly: IntPoly, p: int, start: int = 0) -> list[int]:
    return [r for r in range(start, p) if poly(r, p) == 0]


def cube_roots(a: PAdicNumber) -> RootSet:
    """All ``x`` in Q_p with ``x**3 = a``, ordered by residue of the unit part."""
    if a.is_zero:
        raise DomainError("cube roots of 0 are not considered: a must be nonzero")
    if a.digits == 0:
        raise DomainError("a is zero at working precision")
    ctx, p = a.context, a.prime
    tag = f"x^3 = a (v(a)={a.valuation})"
    if a.valuation % 3:
        return RootSet(tag, ())
    poly = IntPoly.cube_minus(a.unit)
    seeds = _scan(poly, p, start=1)
    roots = tuple(
        PAdicNumber.from_parts(ctx, a.valuation // 3, r.unit, r.digits)
        for r in (hensel_lift(poly, s, ctx, a.digits) for s in seeds)
    )
    return RootSet(tag, roots)


def root_count(k: int, p: int) -> int:
    """Number of k-th roots of unity in Q_p."""
    if p == 2:
        return 2 if k % 2 == 0 else 1
    return gcd(k, p - 1)


def roots_of_unity(k: int, ctx: PAdicContext) -> RootSet:
    """The k-th roots of unity lying in Q_p.

    These are the ``g = gcd(k, p-1)``-th roots of unity (for odd p), so the
    lift is done on ``x^g - 1`` whose roots mod p are always simple.
    """
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    p = ctx.prime
    tag = f"x^{k} = 1"
    if p == 2:
        roots = [PAdicNumber.one(ctx)]
        if k % 2 == 0:
            roots.append(PAdicNumber.from_parts(ctx, 0, -1))
        return RootSet(tag, tuple(roots))
    g = gcd(k, p - 1)
    poly = IntPoly.power_minus_one(g)
    return RootSet(tag, tuple(hensel_lift(poly, s, ctx) for s in _scan(poly, p, start=1)))


def teichmuller(residue: int, ctx: PAdicContext) -> PAdicNumber:
    """The (p-1)-th root of unity congruent to ``residue`` mod p."""
    p = ctx.prime
    if residue % p == 0:
        raise DomainError("the zero residue has no Teichmuller unit")
    if p == 2:
        return PAdicNumber.one(ctx)
    return hensel_lift(IntPoly.power_minus_one(p - 1), residue % p, ctx)
