"""Exact dynamics of ``f(x) = a / x**2`` on points of Q_p.

``step`` and ``closed_form_iterate`` accept any ``q >= 1``; the fixed-point,
periodic-point and bound analyses are specific to ``q = 2``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from itertools import combinations

from .errors import DomainError, NotLiftableError, OutOfRegimeError, PeriodRejectedError
from .norm_geometry import MapParams
from .padic_core import (PAdicContext, PAdicNumber, agree, distance, from_int,
                         valuation_int)
from .radius import RadiusExp
from .roots import RootSet, cube_roots, roots_of_unity


class Character(enum.Enum):
    ATTRACTING = "attracting"
    INDIFFERENT = "indifferent"
    REPELLING = "repelling"

    @classmethod
    def of(cls, multiplier_norm: RadiusExp) -> Character:
        one = RadiusExp.of(multiplier_norm.prime, 0)
        if multiplier_norm < one:
            return cls.ATTRACTING
        if multiplier_norm > one:
            return cls.REPELLING
        return cls.INDIFFERENT


# -- iteration --------------------------------------------------------------

def _coefficient(params: MapParams) -> PAdicNumber:
    if params.a_exact is None:
        raise DomainError("exact iteration needs a in Q_p, not just v(a)")
    return params.a_exact


def step(params: MapParams, x: PAdicNumber) -> PAdicNumber:
    """One application of ``f``: ``a * x**(-q)``."""
    if x.vanishes:
        raise DomainError("f is undefined at 0")
    return _coefficient(params) * x ** (-params.q)


def orbit(params: MapParams, x: PAdicNumber, n: int) -> list[PAdicNumber]:
    """``[x, f(x), ..., f^n(x)]`` by repeated stepping."""
    out = [x]
    for _ in range(n):
        out.append(step(params, out[-1]))
    return out


def closed_form_exponents(q: int, n: int) -> tuple[int, int]:
    """Exponents ``(e_a, e_x)`` with ``f^n(x) = a**e_a * x**e_x``."""
    s = (-q) ** n
    num = 1 - s
    # (-q) = 1 mod (q+1), so the division is exact for every n
    if num % (q + 1):
        raise AssertionError(f"1 - (-{q})^{n} is not divisible by {q + 1}")
    return num // (q + 1), s


def closed_form_iterate(params: MapParams, x: PAdicNumber, n: int) -> PAdicNumber:
    """``f^n(x)`` in two modular exponentiations instead of ``n`` steps."""
    if n < 0:
        raise DomainError("negative iteration count")
    if x.vanishes:
        raise DomainError("f is undefined at 0")
    if n == 0:
        return x
    ea, ex = closed_form_exponents(params.q, n)
    return _coefficient(params) ** ea * x ** ex


# -- fixed points -----------------------------------------------------------

def fixed_point_distance_norm(params: MapParams) -> RadiusExp:
    """Common distance between the three fixed points, from ``v(a)`` alone.

    For p = 3 the identity ``(x_i - x_j)^2 = -3 x_i x_j`` adds half a unit of
    valuation, which is why the exponent may be a half-integer.
    """
    params.require_q(2)
    alpha = params.alpha()
    if params.prime == 3:
        return alpha * RadiusExp.of(3, "1/2")
    return alpha


@dataclass(frozen=True)
class FixedPointReport:
    prime: int
    fixed_points: RootSet
    multiplier: PAdicNumber
    multiplier_norm: RadiusExp
    character: Character
    alpha: RadiusExp
    pairwise_distance: RadiusExp
    distance_source: str
    note: str = ""

    def to_json(self) -> dict:
        return {
            "p": self.prime,
            "fixed_points": self.fixed_points.to_json(),
            "multiplier": self.multiplier.to_json(),
            "multiplier_norm": self.multiplier_norm.to_json(),
            "character": self.character.name,
            "alpha": self.alpha.to_json(),
            "pairwise_distance": self.pairwise_distance.to_json(),
            "distance_source": self.distance_source,
            "note": self.note,
        }


def fixed_point_analysis(params: MapParams) -> FixedPointReport:
    params.require_q(2)
    p = params.prime
    ctx = params.a_exact.context if params.a_exact is not None else PAdicContext(p)
    lam = from_int(-2, ctx)
    lam_norm = RadiusExp.abs_int(p, 2)
    symbolic = fixed_point_distance_norm(params)
    empty = RootSet("x^3 = a", ())
    note = ""
    if params.a_exact is None:
        roots, note = empty, "only v(a) given: fixed points reported at norm level"
    else:
        try:
            roots = cube_roots(params.a_exact)
        except NotLiftableError as exc:
            roots, note = empty, f"cube roots not constructible in Q_{p}: {exc}"
        else:
            if not roots.roots:
                note = f"a has no cube root in Q_{p}"
    source = "norm"
    dist = symbolic
    if len(roots.roots) >= 2:
        dists = {distance(x, y) for x, y in combinations(roots.roots, 2)}
        if len(dists) != 1:
            raise AssertionError(f"fixed points are not equidistant: {dists}")
        dist = dists.pop()
        if dist != symbolic:
            raise AssertionError(f"exact distance {dist} disagrees with norm-level {symbolic}")
        source = "exact"
    return FixedPointReport(p, roots, lam, lam_norm, Character.of(lam_norm),
                            params.alpha(), dist, source, note)


def multiplier_finite_difference(params: MapParams, x_fixed: PAdicNumber, j: int) -> RadiusExp:
    """``|f(x + h) - x| / |h|`` with ``h = p**j``."""
    h = PAdicNumber.from_parts(x_fixed.context, j, 1)
    return distance(step(params, x_fixed + h), x_fixed) / h.norm()


# -- periodic points --------------------------------------------------------

@dataclass(frozen=True)
class PeriodicSearchResult:
    prime: int
    m: int
    unity_order: int
    thetas: tuple[PAdicNumber, ...] = ()
    candidates: tuple[PAdicNumber, ...] = ()
    fixed_candidates: tuple[PAdicNumber, ...] = ()
    mm_members: tuple[PAdicNumber, ...] = ()
    cycles: tuple[tuple[PAdicNumber, ...], ...] = ()
    multiplier_norm: RadiusExp = None
    character: Character = None
    note: str = ""
    issues: tuple[str, ...] = field(default=())

    @property
    def parity(self) -> str:
        return "even" if self.m % 2 == 0 else "odd"

    def to_json(self) -> dict:
        return {
            "p": self.prime,
            "m": self.m,
            "parity": self.parity,
            "unity_order": self.unity_order,
            "candidates": [x.to_json() for x in self.candidates],
            "fixed_candidates": len(self.fixed_candidates),
            "mm_members": [x.to_json() for x in self.mm_members],
            "cycles": [[x.to_json() for x in c] for c in self.cycles],
            "multiplier_norm": self.multiplier_norm.to_json(),
            "character": self.character.name,
            "note": self.note,
            "issues": list(self.issues),
        }


M2_REASON = ("period m=2 has no solutions other than the fixed points: "
             "f^2(x) = x^4/a, so f^2(x) = x forces x^3 = a")


def _prime_period(params: MapParams, x: PAdicNumber, m: int) -> int | None:
    y = x
    for d in range(1, m + 1):
        y = step(params, y)
        if agree(y, x):
            return d
    return None


def find_periodic(params: MapParams, m: int) -> PeriodicSearchResult:
    """Points of period ``m >= 3`` built as ``a^(1/3)`` times roots of unity."""
    params.require_q(2)
    if m < 1:
        raise DomainError(f"period must be >= 1, got {m}")
    if m == 1:
        raise DomainError("period 1 points are the fixed points: use fixed_point_analysis")
    if m == 2:
        raise PeriodRejectedError(M2_REASON)
    p = params.prime
    order = 2 ** m - 1 if m % 2 == 0 else 2 ** m + 1
    mult_norm, character = cycle_multiplier_norm(m, p)
    base = PeriodicSearchResult(p, m, order, multiplier_norm=mult_norm, character=character)

    fps = fixed_point_analysis(params)
    if not fps.fixed_points.roots:
        return replace(base, note=f"no exact cube root of a in Q_{p}; {fps.note}".strip("; "))
    ctx = params.context
    c = fps.fixed_points.roots[0]
    thetas = roots_of_unity(order, ctx).roots
    candidates = tuple(c * t if m % 2 == 0 else c / t for t in thetas)

    # Cube roots of unity missing from Q_p reduce to residues outside F_p, so
    # only the ones present in Q_p can collide with a theta mod p.
    cube_residues = {w.residue() for w in roots_of_unity(3, ctx).roots}
    fixed, members = [], []
    for t, x in zip(thetas, candidates):
        (fixed if t.residue() in cube_residues else members).append(x)

    issues = []
    for x in members:
        if not agree(closed_form_iterate(params, x, m), x):
            issues.append(f"f^{m}(x) != x for {x.to_json()}")
        for xk in fps.fixed_points.roots:
            if distance(x, xk) != fps.alpha:
                issues.append(f"member {x.to_json()} is not at distance alpha from {xk.to_json()}")

    index = {x.sort_key(): x for x in members}
    seen, cycles = set(), []
    for x in sorted(members, key=PAdicNumber.sort_key):
        if x.sort_key() in seen:
            continue
        d = _prime_period(params, x, m)
        if d is None or m % d:
            issues.append(f"prime period {d} of {x.to_json()} does not divide {m}")
            continue
        cyc = orbit(params, x, d - 1)
        for y in cyc:
            if y.sort_key() not in index:
                issues.append(f"orbit point {y.to_json()} left the candidate set")
            seen.add(y.sort_key())
        start = min(range(len(cyc)), key=lambda i: cyc[i].sort_key())
        cycles.append(tuple(cyc[start:] + cyc[:start]))
    cycles.sort(key=lambda cy: cy[0].sort_key())

    return replace(base, thetas=thetas, candidates=candidates, fixed_candidates=tuple(fixed),
                    mm_members=tuple(members), cycles=tuple(cycles), issues=tuple(issues))


def cycle_multiplier_norm(m: int, prime: int) -> tuple[RadiusExp, Character]:
    """``|(f^m)'(x)|_p = |2|_p^m`` at any point of an m-cycle on ``S_alpha(0)``."""
    if m < 0:
        raise DomainError(f"m must be >= 0, got {m}")
    norm = RadiusExp.abs_int(prime, 2) ** m
    return norm, Character.of(norm)


def cycle_multiplier(params: MapParams, x: PAdicNumber, m: int) -> PAdicNumber:
    """``(f^m)'(x) = (-2)^m * f^m(x) / x``, evaluated exactly."""
    params.require_q(2)
    return from_int((-2) ** m, x.context) * closed_form_iterate(params, x, m) / x


# -- basin / Siegel radius bound --------------------------------------------

@dataclass(frozen=True)
class BoundReport:
    prime: int
    m: int
    r_over_alpha: RadiusExp
    kind: str
    value: RadiusExp
    threshold: RadiusExp
    satisfied: bool
    n_cutoff: int
    argmax: int | None

    def to_json(self) -> dict:
        return {
            "p": self.prime,
            "m": self.m,
            "r_over_alpha": self.r_over_alpha.to_json(),
            "kind": self.kind,
            "value": self.value.to_json(),
            "threshold": self.threshold.to_json(),
            "satisfied": self.satisfied,
            "n_cutoff": self.n_cutoff,
            "argmax": self.argmax,
        }


def attraction_bound(m: int, r_over_alpha: RadiusExp, prime: int | None = None) -> BoundReport:
    """Evaluate the Taylor-coefficient bound for ``phi = f^m`` at an m-periodic point.

    Term ``n`` is ``|c_n|_p * (r/alpha)^(n-1)`` with
    ``c_n = prod_{s<n}((-2)^m - s) / n!``.  For p = 2 the point is attracting
    and the bound is ``Q`` (max over n >= 1, needs Q < 1); otherwise it is
    ``S`` (max over n >= 2, needs S < |phi'|_p).  Every ``c_n`` is an integer,
    so terms are dominated by ``(r/alpha)^(n-1)`` and the scan stops once that
    drops below the running maximum.
    """
    p = r_over_alpha.prime if prime is None else prime
    if r_over_alpha.prime != p:
        raise DomainError("radius ratio over a different prime")
    if m < 0:
        raise DomainError(f"m must be >= 0, got {m}")
    if not r_over_alpha.is_finite_positive or r_over_alpha.exponent <= 0:
        raise OutOfRegimeError(f"r/alpha must satisfy 0 < r/alpha < 1, got {r_over_alpha}")
    rho = r_over_alpha.exponent
    base = (-2) ** m
    kind, start = ("Q", 1) if p == 2 else ("S", 2)
    threshold = RadiusExp.of(p, 0) if kind == "Q" else RadiusExp.abs_int(p, base)

    v_prod = v_fact = 0
    vanished = False
    best, argmax = None, None
    n = 0
    while True:
        n += 1
        factor = base - (n - 1)
        if factor == 0:
            vanished = True
        elif not vanished:
            v_prod += valuation_int(factor, p)
        v_fact += valuation_int(n, p)
        if vanished:
            break
        if v_prod < v_fact:
            raise AssertionError(f"coefficient c_{n} is not p-integral")
        if n >= start:
            e = v_prod - v_fact + (n - 1) * rho
            if best is None or e < best:
                best, argmax = e, n
        if best is not None and n * rho > best:
            break
    value = RadiusExp.zero(p) if best is None else RadiusExp.of(p, best)
    return BoundReport(p, m, r_over_alpha, kind, value, threshold, value < threshold, n, argmax)
