"""Valuation-only dynamics of ``f(x) = a / x**q`` on spheres around 0.

Everything here depends on ``|a|_p`` alone, so the results hold for points of
C_p and not just Q_p.  A sphere ``S_r(0)`` is mapped onto ``S_{|a|/r^q}(0)``,
which in exponent form is ``e -> v(a) - q*e``; iterating gives the closed form

    e_n = (1 - (-q)^n) * v(a)/(q+1) + (-q)^n * e_0

The invariant radius is ``alpha = |a|_p^(1/(q+1))`` with exponent ``v(a)/(q+1)``.
"""
from __future__ import annotations

import csv
import io
import enum
from dataclasses import dataclass
from fractions import Fraction

from .errors import DomainError
from .padic_core import PAdicNumber
from .radius import RadiusExp

__all__ = [
    "MapParams", "OuterRegion", "TrajectoryClass", "RadiusTrajectory",
    "MappedRegion", "OffSphereWitness", "RadiusExp",
    "radius_iterate", "classify_start", "ball_mapping_check",
    "no_offsphere_periodics", "trajectory_csv",
]


@dataclass(frozen=True)
class MapParams:
    """Parameters of ``f(x) = a / x**q``.

    ``a_exact`` is optional: norm-level questions only need ``v(a)``.
    """

    prime: int
    a_valuation: int
    a_exact: PAdicNumber | None = None
    q: int = 2

    def __post_init__(self):
        if not isinstance(self.q, int) or self.q < 1:
            raise DomainError(f"exponent q must be an integer >= 1, got {self.q!r}")
        if self.a_exact is not None:
            if self.a_exact.vanishes:
                raise DomainError("coefficient a must be nonzero")
            if self.a_exact.prime != self.prime:
                raise DomainError("a_exact lives over a different prime")
            if self.a_exact.valuation != self.a_valuation:
                raise DomainError(
                    f"a_valuation {self.a_valuation} disagrees with v(a) = {self.a_exact.valuation}")

    @classmethod
    def from_a(cls, a: PAdicNumber, q: int = 2) -> MapParams:
        if a.vanishes:
            raise DomainError("coefficient a must be nonzero")
        return cls(a.prime, a.valuation, a, q)

    @property
    def context(self):
        if self.a_exact is None:
            raise DomainError("operation needs the exact coefficient a, only v(a) is known")
        return self.a_exact.context

    @property
    def alpha_exponent(self) -> Fraction:
        return Fraction(self.a_valuation, self.q + 1)

    def alpha(self) -> RadiusExp:
        return RadiusExp.of(self.prime, self.alpha_exponent)

    def require_q(self, q: int) -> None:
        if self.q != q:
            raise DomainError(f"operation is defined for q = {q} only (got q = {self.q})")


class OuterRegion(enum.Enum):
    """Location of a sphere ``S_r(0)`` relative to ``S_alpha(0)``, with limit behaviour."""

    INSIDE = ("0", "inf")
    ON_SPHERE = ("alpha", "alpha")
    OUTSIDE = ("inf", "0")

    @property
    def even_limit(self) -> str:
        return self.value[0]

    @property
    def odd_limit(self) -> str:
        return self.value[1]


class TrajectoryClass(enum.Enum):
    COLLAPSE_EVEN_ESCAPE_ODD = "collapse_even_escape_odd"
    ESCAPE_EVEN_COLLAPSE_ODD = "escape_even_collapse_odd"
    INVARIANT_SPHERE = "invariant_sphere"
    PERIOD_TWO = "period_two"


@dataclass(frozen=True)
class RadiusTrajectory:
    initial: RadiusExp
    terms: tuple[RadiusExp, ...]
    classification: TrajectoryClass
    q: int

    def exponents(self) -> list[Fraction]:
        return [self.initial.exponent] + [t.exponent for t in self.terms]

    def to_json(self) -> dict:
        return {
            "q": self.q,
            "initial": self.initial.to_json(),
            "terms": [t.to_json() for t in self.terms],
            "classification": self.classification.value,
        }


def _check_radius(params: MapParams, r: RadiusExp) -> None:
    if r.prime != params.prime:
        raise DomainError(f"radius over p={r.prime} used with map over p={params.prime}")
    if r.is_zero:
        raise DomainError("f is undefined at 0: radius must be positive")
    if r.is_infinite:
        raise DomainError("radius must be finite")


def _exponent_after(params: MapParams, e0: Fraction, n: int) -> Fraction:
    s = (-params.q) ** n
    return (1 - s) * params.alpha_exponent + s * e0


def classify_start(params: MapParams, r: RadiusExp) -> OuterRegion:
    """Which side of ``S_alpha(0)`` the sphere ``S_r(0)`` lies on."""
    _check_radius(params, r)
    a = params.alpha_exponent
    if r.exponent == a:
        return OuterRegion.ON_SPHERE
    # larger exponent means smaller radius
    return OuterRegion.INSIDE if r.exponent > a else OuterRegion.OUTSIDE


def trajectory_class(params: MapParams, r: RadiusExp) -> TrajectoryClass:
    region = classify_start(params, r)
    if region is OuterRegion.ON_SPHERE:
        return TrajectoryClass.INVARIANT_SPHERE
    if params.q == 1:
        return TrajectoryClass.PERIOD_TWO
    if region is OuterRegion.INSIDE:
        return TrajectoryClass.COLLAPSE_EVEN_ESCAPE_ODD
    return TrajectoryClass.ESCAPE_EVEN_COLLAPSE_ODD


def radius_iterate(params: MapParams, r: RadiusExp, n_max: int) -> RadiusTrajectory:
    """Exact radii ``r_1 .. r_{n_max}`` of the spheres visited from ``S_r(0)``."""
    _check_radius(params, r)
    if n_max < 1:
        raise DomainError(f"n_max must be >= 1, got {n_max}")
    terms = tuple(
        RadiusExp.of(params.prime, _exponent_after(params, r.exponent, n))
        for n in range(1, n_max + 1)
    )
    return RadiusTrajectory(r, terms, trajectory_class(params, r), params.q)


@dataclass(frozen=True)
class MappedRegion:
    image: RadiusExp
    region: OuterRegion

    def to_json(self) -> dict:
        return {"image": self.image.to_json(), "region": self.region.name}


def ball_mapping_check(params: MapParams, r: RadiusExp) -> MappedRegion:
    """Where ``f`` sends ``S_r(0)``: the image radius ``|a|_p / r^q`` and its side of alpha."""
    _check_radius(params, r)
    image = RadiusExp.of(params.prime, params.a_valuation - params.q * r.exponent)
    return MappedRegion(image, classify_start(params, image))


@dataclass(frozen=True)
class OffSphereWitness:
    holds: bool
    m: int
    e0: Fraction
    em: Fraction

    def to_json(self) -> dict:
        return {"holds": self.holds, "m": self.m, "e0": str(self.e0), "em": str(self.em)}


def no_offsphere_periodics(params: MapParams, r: RadiusExp, m: int) -> OffSphereWitness:
    """Witness that ``|f^m(x)| != |x|`` for every ``x`` with ``|x| = r != alpha``."""
    _check_radius(params, r)
    if m < 1:
        raise DomainError(f"period must be >= 1, got {m}")
    if r.exponent == params.alpha_exponent:
        raise DomainError("radius alpha is excluded: the sphere S_alpha(0) is invariant")
    em = _exponent_after(params, r.exponent, m)
    return OffSphereWitness(em != r.exponent, m, r.exponent, em)


def trajectory_csv(traj: RadiusTrajectory) -> str:
    """CSV with columns ``n,num,den``; row 0 is the starting radius."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["n", "num", "den"])
    for n, e in enumerate(traj.exponents()):
        writer.writerow([n, e.numerator, e.denominator])
    return buf.getvalue()
