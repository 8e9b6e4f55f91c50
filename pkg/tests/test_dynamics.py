import random
from fractions import Fraction
from math import comb, factorial, prod

import pytest

from padic_dyn.dynamics import (Character, attraction_bound, closed_form_exponents,
                                closed_form_iterate, cycle_multiplier, cycle_multiplier_norm,
                                find_periodic, fixed_point_analysis,
                                multiplier_finite_difference, orbit, step)
from padic_dyn.errors import DomainError, OutOfRegimeError, PeriodRejectedError
from padic_dyn.norm_geometry import MapParams, radius_iterate
from padic_dyn.padic_core import PAdicContext, agree, distance, valuation_int
from padic_dyn.radius import RadiusExp


def params_for(p, num=1, den=1, q=2, precision=64):
    ctx = PAdicContext(p, precision)
    return MapParams.from_a(ctx(num, den), q), ctx


def test_step_examples():
    params, ctx = params_for(3, 3)
    assert step(params, ctx(1)) == ctx(3)
    params, ctx = params_for(7)
    for xk in fixed_point_analysis(params).fixed_points.roots:
        assert step(params, xk) == xk
    x = ctx(18)
    # modular oracle: 18^-2 mod 7^64
    assert step(params, x).unit == pow(18, -2, 7 ** 64)
    assert all(y.norm() == RadiusExp.of(7, 0) for y in orbit(params, x, 3))
    with pytest.raises(DomainError):
        step(params, ctx(0))


def test_closed_form_examples():
    params, ctx = params_for(3, 3)
    assert closed_form_iterate(params, ctx(1), 1) == step(params, ctx(1))
    assert closed_form_iterate(params, ctx(1), 2) == ctx(1, 3)
    assert step(params, step(params, ctx(1))) == ctx(3, 9)


def test_closed_form_norms_follow_radius_recurrence():
    params, ctx = params_for(5, 5)
    x = ctx(25 * 3)
    traj = radius_iterate(params, x.norm(), 20)
    for n in range(1, 21):
        assert closed_form_iterate(params, x, n).norm() == traj.terms[n - 1]


def test_exponent_integrality():
    for q in (1, 2, 3, 5):
        for n in range(1, 1001):
            ea, ex = closed_form_exponents(q, n)
            assert ea * (q + 1) == 1 - ex


def test_q_one_two_periodic():
    params, ctx = params_for(7, 5, q=1)
    x = ctx(123, 49)
    assert step(params, step(params, x)) == x


def test_closed_form_equals_stepping_random():
    rng = random.Random(7)
    for _ in range(60):
        p = rng.choice([2, 5, 7, 13, 31])
        q = rng.choice([1, 2, 3])
        ctx = PAdicContext(p, 24)
        a = ctx(rng.randrange(1, 10 ** 6) * rng.choice([1, -1]), rng.randrange(1, 10 ** 4))
        x = ctx(rng.randrange(1, 10 ** 6), rng.randrange(1, 10 ** 4))
        params = MapParams.from_a(a, q)
        n = rng.randrange(1, 20)
        assert closed_form_iterate(params, x, n) == orbit(params, x, n)[-1]


def test_fixed_points_p2():
    params, _ = params_for(2)
    rep = fixed_point_analysis(params)
    assert rep.character is Character.ATTRACTING
    assert rep.multiplier_norm.as_fraction() == Fraction(1, 2)
    assert rep.fixed_points.count == 1
    assert rep.distance_source == "norm"


def test_fixed_points_p7():
    params, _ = params_for(7)
    rep = fixed_point_analysis(params)
    assert sorted(x.unit % 49 for x in rep.fixed_points.roots) == [1, 18, 30]
    assert rep.pairwise_distance == rep.alpha == RadiusExp.of(7, 0)
    assert rep.distance_source == "exact"
    assert rep.character is Character.INDIFFERENT
    assert rep.multiplier == PAdicContext(7)(-2)


@pytest.mark.parametrize("num", [1, 27, 3, 9 * 2])
def test_fixed_points_p3_norm_layer(num):
    params, _ = params_for(3, num)
    rep = fixed_point_analysis(params)
    assert rep.fixed_points.count == 0
    assert rep.pairwise_distance.exponent == Fraction(params.a_valuation, 3) + Fraction(1, 2)


def test_valuation_only_fixed_points():
    rep = fixed_point_analysis(MapParams(13, 4))
    assert rep.pairwise_distance == RadiusExp.of(13, Fraction(4, 3))
    with pytest.raises(DomainError):
        step(MapParams(13, 4), PAdicContext(13)(2))


@pytest.mark.parametrize("p", [2, 5, 7, 13, 31])
def test_multiplier_finite_difference(p):
    params, _ = params_for(p)
    for xk in fixed_point_analysis(params).fixed_points.roots:
        assert multiplier_finite_difference(params, xk, 32) == RadiusExp.abs_int(p, 2)


def test_find_periodic_p31_m4():
    params, ctx = params_for(31)
    res = find_periodic(params, 4)
    assert len(res.candidates) == 15
    assert len(res.fixed_candidates) == 3
    assert len(res.mm_members) == 12
    assert res.issues == ()
    assert sorted(len(c) for c in res.cycles) == [4, 4, 4]
    flat = [x for c in res.cycles for x in c]
    assert sorted(x.sort_key() for x in flat) == sorted(x.sort_key() for x in res.mm_members)
    for c in res.cycles:
        assert c[0].sort_key() == min(x.sort_key() for x in c)
        for x, y in zip(c, c[1:] + c[:1]):
            assert step(params, x) == y
    assert res.multiplier_norm == RadiusExp.of(31, 0)


def test_find_periodic_odd_m():
    # p = 7, m = 3: t^9 = 1 in Q_7 has gcd(9, 6) = 3 roots, all cube roots of unity
    params, _ = params_for(7)
    res = find_periodic(params, 3)
    assert len(res.candidates) == 3 and res.mm_members == ()
    # p = 31, m = 5: t^33 = 1 has gcd(33, 30) = 3 roots
    res = find_periodic(params_for(31)[0], 5)
    assert len(res.candidates) == 3 and res.mm_members == ()
    # p = 19, m = 3: gcd(9, 18) = 9 roots, 6 of them non-cube -> two 3-cycles
    res = find_periodic(params_for(19)[0], 3)
    assert len(res.candidates) == 9 and len(res.mm_members) == 6
    assert sorted(len(c) for c in res.cycles) == [3, 3]
    assert res.issues == ()


@pytest.mark.parametrize("p,m", [(5, 4), (2, 3)])
def test_find_periodic_none(p, m):
    res = find_periodic(params_for(p)[0], m)
    assert res.mm_members == () and res.cycles == ()


def test_find_periodic_rejects_m2_and_small():
    params, _ = params_for(31)
    with pytest.raises(PeriodRejectedError, match="m=2"):
        find_periodic(params, 2)
    with pytest.raises(DomainError):
        find_periodic(params, 0)
    with pytest.raises(DomainError):
        find_periodic(params, 1)


def test_find_periodic_without_cube_root():
    res = find_periodic(params_for(7, 2)[0], 4)
    assert res.candidates == () and "cube root" in res.note


def test_cycle_multiplier_norm():
    assert cycle_multiplier_norm(3, 2) == (RadiusExp.of(2, 3), Character.ATTRACTING)
    for p in (3, 5, 31):
        assert cycle_multiplier_norm(7, p) == (RadiusExp.of(p, 0), Character.INDIFFERENT)
    assert cycle_multiplier_norm(0, 2)[0] == RadiusExp.of(2, 0)


def test_cycle_multiplier_exact_matches_norm():
    params, _ = params_for(31)
    res = find_periodic(params, 4)
    for x in res.mm_members:
        lam = cycle_multiplier(params, x, 4)
        assert agree(lam, PAdicContext(31)(16))
        assert lam.norm() == res.multiplier_norm


# -- bound evaluator, checked against direct rational arithmetic ------------

def frac_valuation(x: Fraction, p: int):
    if x == 0:
        return None
    return valuation_int(x.numerator, p) - valuation_int(x.denominator, p)


def oracle_bound(m, rho, p, n_max=400):
    base = (-2) ** m
    start = 1 if p == 2 else 2
    best = None
    for n in range(start, n_max):
        c = Fraction(prod(base - s for s in range(n)), factorial(n))
        v = frac_valuation(c, p)
        if v is None:
            continue
        e = v + (n - 1) * rho
        best = e if best is None else min(best, e)
    return best


@pytest.mark.parametrize("p", [2, 3, 5, 7])
@pytest.mark.parametrize("m", [0, 1, 2, 3, 4, 5])
@pytest.mark.parametrize("rho", [Fraction(1), Fraction(1, 2), Fraction(3)])
def test_bound_matches_oracle(p, m, rho):
    rep = attraction_bound(m, RadiusExp.of(p, rho), p)
    expected = oracle_bound(m, rho, p)
    if expected is None:
        assert rep.value.is_zero
    else:
        assert rep.value == RadiusExp.of(p, expected)


def test_bound_examples():
    rep = attraction_bound(1, RadiusExp.of(2, 1))
    assert rep.kind == "Q" and rep.value.as_fraction() == Fraction(1, 2)
    assert rep.satisfied and rep.n_cutoff >= 1
    rep = attraction_bound(2, RadiusExp.of(7, 1))
    assert rep.kind == "S" and rep.satisfied
    assert rep.value <= RadiusExp.of(7, 1) and rep.threshold == RadiusExp.of(7, 0)
    for p in (2, 5, 7):
        assert attraction_bound(3, RadiusExp.of(p, 1)).satisfied
    with pytest.raises(OutOfRegimeError):
        attraction_bound(2, RadiusExp.of(7, 0))


def test_first_coefficient_is_leading_power():
    for p in (2, 3, 5):
        for m in range(6):
            c1 = Fraction(prod((-2) ** m - s for s in range(1)), factorial(1))
            assert c1 == (-2) ** m


def test_coefficient_closed_forms():
    for m in range(1, 6):
        for n in range(1, 40):
            c = Fraction(prod((-2) ** m - s for s in range(n)), factorial(n))
            if m % 2 == 0:
                assert c == comb(2 ** m, n)
            else:
                assert c == (-1) ** n * comb(2 ** m + n - 1, n)
