"""Seeded, reproducible checks of the dynamics on the invariant sphere.

Every check samples points ``x_i + p^e * u`` (or ``p^e * u`` on the sphere)
with ``u`` a uniformly random unit mod ``p^N``, iterates ``f`` exactly and
compares distances against the predicted ones.  Each sample draws from its
own generator keyed by ``(seed, suite, index)``, so a report is a pure
function of its inputs.

A distance that cancels to zero at working precision without deciding the
comparison is counted as *undecided*; a report passes only when both the
failure list and the undecided count are empty.
"""
from __future__ import annotations

import enum
import json
import random
from dataclasses import dataclass, field

from .dynamics import (FixedPointReport, closed_form_iterate, fixed_point_analysis,
                       step)
from .errors import DomainError, SamplingUnsupportedError
from .norm_geometry import MapParams, OuterRegion, classify_start
from .padic_core import PAdicContext, PAdicNumber, distance
from .radius import RadiusExp

PRNG = "python-random-mt19937/v1"


def sample_rng(seed: int, suite: str, index: int) -> random.Random:
    # str seeds are hashed with sha512, independent of PYTHONHASHSEED
    return random.Random(f"{PRNG}:{seed}:{suite}:{index}")


def random_unit(rng: random.Random, ctx: PAdicContext) -> int:
    while True:
        u = rng.randrange(1, ctx.modulus)
        if u % ctx.prime:
            return u


# -- labels -----------------------------------------------------------------

class Inner(enum.Enum):
    NEAR_FIXED = "near_fixed"
    EQUIDISTANT = "equidistant"
    UNDECIDED = "undecided"
    CONFLICT = "conflict"


@dataclass(frozen=True)
class RegionLabel:
    outer: OuterRegion | None
    inner: Inner | None = None
    index: int | None = None
    rho: RadiusExp | None = None

    @property
    def undecided(self) -> bool:
        return self.outer is None or self.inner is Inner.UNDECIDED

    def to_json(self) -> dict:
        return {
            "outer": self.outer.name if self.outer else "UNDECIDED",
            "inner": self.inner.name if self.inner else None,
            "index": self.index,
            "rho": self.rho.to_json() if self.rho else None,
        }


def _require_exact_fixed_points(params: MapParams, fps: FixedPointReport) -> None:
    if params.prime == 3:
        raise DomainError("the fixed points for p = 3 are not in Q_3; use the norm layer")
    if not fps.fixed_points.roots:
        raise DomainError(f"no exact fixed points in Q_{params.prime}: {fps.note}")


def label_point(params: MapParams, x: PAdicNumber, fps: FixedPointReport | None = None) -> RegionLabel:
    """Locate ``x`` relative to ``S_alpha(0)`` and, on the sphere, to the fixed points.

    Fixed points outside Q_p (p = 2 mod 3) reduce to residues outside F_p,
    so every point of Q_p on the sphere is at distance alpha from them; only
    the fixed points in Q_p need to be compared.  Indices are 1-based.
    """
    fps = fps or fixed_point_analysis(params)
    _require_exact_fixed_points(params, fps)
    if x.is_zero:
        raise DomainError("0 is not in the domain of f")
    if x.is_zero_at_precision:
        return RegionLabel(None)
    outer = classify_start(params, x.norm())
    if outer is not OuterRegion.ON_SPHERE:
        return RegionLabel(outer)
    alpha = fps.alpha
    near = []
    for i, xk in enumerate(fps.fixed_points.roots, start=1):
        d = distance(x, xk)
        if d.is_zero:
            if d.exponent <= alpha.exponent:
                return RegionLabel(outer, Inner.UNDECIDED)
            near.append((i, d))
        elif d < alpha:
            near.append((i, d))
    if len(near) > 1:
        return RegionLabel(outer, Inner.CONFLICT)
    if near:
        i, d = near[0]
        return RegionLabel(outer, Inner.NEAR_FIXED, i, d)
    return RegionLabel(outer, Inner.EQUIDISTANT)


# -- reports ----------------------------------------------------------------

@dataclass
class VerificationReport:
    theorem: str
    params: dict
    seed: int
    samples: int
    n_steps: int
    failures: list = field(default_factory=list)
    undecided: int = 0
    observations: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures and self.undecided == 0

    def merge(self, other: VerificationReport) -> None:
        self.samples += other.samples
        self.failures.extend(other.failures)
        self.undecided += other.undecided
        self.observations.extend(other.observations)

    def to_json(self) -> dict:
        return {
            "theorem": self.theorem,
            "params": self.params,
            "seed": self.seed,
            "samples": self.samples,
            "n_steps": self.n_steps,
            "prng": PRNG,
            "failures": self.failures,
            "undecided": self.undecided,
            "observations": self.observations,
            "pass": self.passed,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def _params_json(params: MapParams) -> dict:
    return {"p": params.prime, "q": params.q, "a": params.a_exact.to_json() if params.a_exact else None,
            "a_valuation": params.a_valuation}


def _integral_exponent(rho: RadiusExp) -> int:
    if rho.exponent.denominator != 1:
        raise SamplingUnsupportedError(f"radius {rho} is not an integral power of p")
    return int(rho.exponent)


def _alpha_exponent(params: MapParams) -> int:
    e = params.alpha_exponent
    if e.denominator != 1:
        raise SamplingUnsupportedError("alpha is not an integral power of p")
    return int(e)


# -- spheres around a fixed point -------------------------------------------

def check_sphere_invariance(params: MapParams, i: int, rho: RadiusExp, samples: int,
                            n_steps: int, seed: int,
                            fps: FixedPointReport | None = None) -> VerificationReport:
    """Distance to ``x_i`` along orbits started on ``S_alpha(0) ∩ S_rho(x_i)``.

    Predicted distance after ``n`` steps: ``rho`` for odd p, ``2^-n * rho``
    for p = 2.  The comparison is exact.
    """
    fps = fps or fixed_point_analysis(params)
    _require_exact_fixed_points(params, fps)
    p = params.prime
    report = VerificationReport("sphere-invariance", {**_params_json(params), "i": i,
                                                      "rho": rho.to_json()},
                                seed, 0, n_steps)
    xi = fps.fixed_points.roots[i - 1]
    if rho.is_zero:
        report.samples = 1
        y = xi
        for n in range(1, n_steps + 1):
            y = step(params, y)
            if not distance(y, xi).is_zero:
                report.failures.append({"sample": 0, "step": n, "x": xi.to_json()})
                break
        return report
    if not rho < fps.alpha:
        raise DomainError(f"rho = {rho} must be smaller than alpha = {fps.alpha}")
    e = _integral_exponent(rho)
    ctx = xi.context
    for k in range(samples):
        rng = sample_rng(seed, f"sphere:{p}:{i}:{e}", k)
        x0 = xi + PAdicNumber.from_parts(ctx, e, random_unit(rng, ctx))
        report.samples += 1
        y = x0
        for n in range(1, n_steps + 1):
            y = step(params, y)
            expected = e + n if p == 2 else e
            d = distance(y, xi)
            if d.is_zero:
                if d.exponent <= expected:
                    report.undecided += 1
                else:
                    report.failures.append(_failure(k, x0, n, d, expected, p))
                break
            if d.exponent != expected:
                report.failures.append(_failure(k, x0, n, d, expected, p))
                break
    return report


def _failure(k, x0, n, d, expected, p) -> dict:
    return {"sample": k, "x": x0.to_json(), "step": n, "distance": d.to_json(),
            "expected": RadiusExp.of(p, expected).to_json()}


def check_siegel(params: MapParams, samples: int, n_steps: int, seed: int,
                 depths: int = 3) -> VerificationReport:
    """Every sphere ``S_rho(x_j)``, ``rho < alpha``, inside ``S_alpha(0)`` is invariant (odd p)."""
    fps = fixed_point_analysis(params)
    _require_exact_fixed_points(params, fps)
    if params.prime == 2:
        raise DomainError("fixed points are attracting for p = 2; use check_basin_p2")
    ae = _alpha_exponent(params)
    report = VerificationReport("siegel-disk", _params_json(params), seed, 0, n_steps)
    for i in range(1, len(fps.fixed_points.roots) + 1):
        for e in range(ae + 1, ae + 1 + depths):
            rho = RadiusExp.of(params.prime, e)
            report.merge(check_sphere_invariance(params, i, rho, samples, n_steps, seed, fps))
    return report


# -- p = 2 basins -----------------------------------------------------------

def check_basin_p2(params: MapParams, samples: int, n_steps: int, seed: int) -> VerificationReport:
    """Orbits from ``S_alpha(0)`` at p = 2.

    Points near a fixed point must converge: the distance at least halves
    every step and drops below ``alpha * 2^-(N/2)`` within ``n_steps``.
    Equidistant points, if any are drawn, must stay equidistant.
    """
    if params.prime != 2:
        raise DomainError("check_basin_p2 needs p = 2")
    fps = fixed_point_analysis(params)
    _require_exact_fixed_points(params, fps)
    ctx = params.context
    ae = _alpha_exponent(params)
    target = ae + ctx.precision // 2
    # at least one digit per step from ae + 1: N/2 steps always suffice
    if n_steps < ctx.precision // 2:
        raise DomainError(f"basin check needs n_steps >= N/2 = {ctx.precision // 2}, got {n_steps}")
    report = VerificationReport("basin-p2", _params_json(params), seed, 0, n_steps)
    faster, equidistant = 0, 0
    for k in range(samples):
        rng = sample_rng(seed, "basin-p2", k)
        x0 = PAdicNumber.from_parts(ctx, ae, random_unit(rng, ctx))
        report.samples += 1
        label = label_point(params, x0, fps)
        if label.undecided or label.inner is Inner.CONFLICT:
            report.undecided += label.undecided
            if label.inner is Inner.CONFLICT:
                report.failures.append({"sample": k, "x": x0.to_json(), "label": label.to_json()})
            continue
        if label.inner is Inner.EQUIDISTANT:
            equidistant += 1
            sub = track_equidistant(params, x0, n_steps, fps)
            report.failures.extend(sub.failures)
            report.undecided += sub.undecided
            continue
        xi = fps.fixed_points.roots[label.index - 1]
        prev = label.rho.exponent
        y = x0
        for n in range(1, n_steps + 1):
            y = step(params, y)
            d = distance(y, xi)
            if d.is_zero or d.exponent >= target:
                break
            if d.exponent < prev + 1:
                report.failures.append(_failure(k, x0, n, d, prev + 1, 2))
                break
            if d.exponent > prev + 1:
                faster += 1
            prev = d.exponent
        else:
            report.failures.append({"sample": k, "x": x0.to_json(),
                                    "reason": f"distance still above 2^-{target} after {n_steps} steps"})
    report.observations.append({"steps_contracting_faster_than_half": faster,
                                "equidistant_samples": equidistant})
    return report


# -- partition and distances to the fixed points ----------------------------

def check_partition(params: MapParams, samples: int, seed: int) -> VerificationReport:
    """Each sampled point of ``S_alpha(0)`` gets exactly one inner label."""
    fps = fixed_point_analysis(params)
    _require_exact_fixed_points(params, fps)
    ctx = params.context
    ae = _alpha_exponent(params)
    report = VerificationReport("partition", _params_json(params), seed, 0, 0)
    counts = {"equidistant": 0, **{f"near_{i}": 0 for i in range(1, len(fps.fixed_points.roots) + 1)}}
    for k in range(samples):
        rng = sample_rng(seed, "partition", k)
        x = PAdicNumber.from_parts(ctx, ae, random_unit(rng, ctx))
        report.samples += 1
        label = label_point(params, x, fps)
        if label.undecided:
            report.undecided += 1
        elif label.inner is Inner.CONFLICT or label.outer is not OuterRegion.ON_SPHERE:
            report.failures.append({"sample": k, "x": x.to_json(), "label": label.to_json()})
        elif label.inner is Inner.EQUIDISTANT:
            counts["equidistant"] += 1
        else:
            counts[f"near_{label.index}"] += 1
    report.observations.append(counts)
    return report


def check_near_fixed_distance(params: MapParams, samples: int, seed: int) -> VerificationReport:
    """A point within ``rho < alpha`` of ``x_i`` is at distance exactly alpha from every other ``x_j``."""
    fps = fixed_point_analysis(params)
    _require_exact_fixed_points(params, fps)
    ctx = params.context
    ae = _alpha_exponent(params)
    roots = fps.fixed_points.roots
    report = VerificationReport("near-fixed-distance", _params_json(params), seed, 0, 0)
    for i, xi in enumerate(roots, start=1):
        for k in range(samples):
            rng = sample_rng(seed, f"near:{i}", k)
            e = ae + 1 + rng.randrange(4)
            x = xi + PAdicNumber.from_parts(ctx, e, random_unit(rng, ctx))
            report.samples += 1
            for j, xj in enumerate(roots, start=1):
                if j != i and distance(x, xj) != fps.alpha:
                    report.failures.append({"i": i, "j": j, "sample": k, "x": x.to_json(),
                                            "distance": distance(x, xj).to_json()})
    return report


# -- points equidistant from all fixed points --------------------------------

def track_equidistant(params: MapParams, x: PAdicNumber, n_steps: int,
                      fps: FixedPointReport | None = None) -> VerificationReport:
    """Follow an equidistant point until it falls near a fixed point, or ``n_steps`` run out.

    For odd p the exit sphere ``S_mu(x_i)`` must then be invariant, and the
    exit distance is recomputed independently from the closed form.  For
    p = 2 the equidistant set is invariant, so any exit is a failure.
    """
    fps = fps or fixed_point_analysis(params)
    label = label_point(params, x, fps)
    if label.inner is not Inner.EQUIDISTANT:
        raise DomainError(f"starting point is not equidistant: {label.to_json()}")
    p = params.prime
    report = VerificationReport("equidistant-exit", _params_json(params), 0, 1, n_steps)
    y = x
    for n in range(1, n_steps + 1):
        y = step(params, y)
        lab = label_point(params, y, fps)
        if lab.undecided:
            report.undecided += 1
            return report
        if lab.inner is Inner.CONFLICT or lab.outer is not OuterRegion.ON_SPHERE:
            report.failures.append({"x": x.to_json(), "step": n, "label": lab.to_json()})
            return report
        if lab.inner is Inner.EQUIDISTANT:
            continue
        mu = lab.rho
        xi = fps.fixed_points.roots[lab.index - 1]
        report.observations.append({"x": x.to_json(), "exit_step": n, "fixed_point": lab.index,
                                    "mu": mu.to_json()})
        if p == 2:
            report.failures.append({"x": x.to_json(), "step": n,
                                    "reason": "left the equidistant set at p = 2"})
            return report
        if distance(closed_form_iterate(params, x, n), xi) != mu:
            report.failures.append({"x": x.to_json(), "step": n,
                                    "reason": "closed form disagrees with stepped exit distance"})
        for m in range(n + 1, n_steps + 1):
            y = step(params, y)
            d = distance(y, xi)
            if d != mu:
                if d.is_zero and d.exponent <= mu.exponent:
                    report.undecided += 1
                else:
                    report.failures.append({"x": x.to_json(), "step": m, "distance": d.to_json(),
                                            "expected": mu.to_json()})
                break
        return report
    report.observations.append({"x": x.to_json(), "still_equidistant_after": n_steps})
    return report


def check_equidistant(params: MapParams, samples: int, n_steps: int, seed: int,
                      max_draws: int | None = None) -> VerificationReport:
    """Run ``track_equidistant`` on sampled equidistant points."""
    fps = fixed_point_analysis(params)
    _require_exact_fixed_points(params, fps)
    ctx = params.context
    ae = _alpha_exponent(params)
    report = VerificationReport("equidistant-exit", _params_json(params), seed, 0, n_steps)
    max_draws = 50 * samples if max_draws is None else max_draws
    exits = stays = 0
    for k in range(max_draws):
        if report.samples >= samples:
            break
        rng = sample_rng(seed, "equidistant", k)
        x = PAdicNumber.from_parts(ctx, ae, random_unit(rng, ctx))
        if label_point(params, x, fps).inner is not Inner.EQUIDISTANT:
            continue
        sub = track_equidistant(params, x, n_steps, fps)
        report.samples += 1
        report.failures.extend(sub.failures)
        report.undecided += sub.undecided
        for obs in sub.observations:
            if "exit_step" in obs:
                exits += 1
            else:
                stays += 1
    report.observations.append({"exited": exits, "stayed": stays,
                                "note": "bounded horizon only" if stays else ""})
    if report.samples == 0:
        report.observations.append({"note": f"no equidistant point of Q_{params.prime} drawn"})
    return report


# -- batteries --------------------------------------------------------------

def suites_for(params: MapParams, samples: int, n_steps: int, seed: int) -> list[VerificationReport]:
    """Every check applicable to ``params``."""
    out = []
    if params.prime == 2:
        ae = _alpha_exponent(params)
        # rho = alpha/2 is excluded: there the distance contracts faster than 2^-n
        for e in (ae + 2, ae + 3):
            out.append(check_sphere_invariance(params, 1, RadiusExp.of(2, e), samples, n_steps, seed))
        out.append(check_basin_p2(params, samples, n_steps, seed))
    else:
        out.append(check_siegel(params, samples, n_steps, seed))
    out.append(check_partition(params, 10 * samples, seed))
    out.append(check_near_fixed_distance(params, samples, seed))
    out.append(check_equidistant(params, samples, n_steps, seed))
    return out


DEFAULT_BATTERY = ((2, 1, 1), (7, 1, 1), (7, 7 ** 3, 1), (13, 1, 1), (31, 1, 1))


def run_battery(seed: int, samples: int = 20, n_steps: int = 50,
                precision: int = 64) -> list[VerificationReport]:
    reports = []
    for p, num, den in DEFAULT_BATTERY:
        ctx = PAdicContext(p, precision)
        reports.extend(suites_for(MapParams.from_a(ctx(num, den)), samples, n_steps, seed))
    return reports
