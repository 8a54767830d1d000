import random
from itertools import product

import pytest

from wittlift import qfsplit
from wittlift.canlift import canonical_lift_chart, weierstrass_form
from wittlift.errors import PrimeTooSmallError, SingularCurveError, SplittingError
from wittlift.exactring import ModPoly, Modulus, parse_poly
from wittlift.fsplit import build_splitting, frobenius_trace
from wittlift.hassewitt import hasse_scalar, smooth_curves
from wittlift.qfsplit import (
    QuasiSplitting,
    WittBar,
    WittVector,
    affine_line_splitting,
    from_chart_splitting,
    qf_height_elliptic,
    quasi_canonical_lift,
    random_poly,
    random_witt,
    rho,
)


def ghost_int(comps, p):
    """Last ghost component sum_i p^i a_i^(p^(m-1-i)) mod p^m of integer lifts."""
    m = len(comps)
    return sum(p**i * pow(a, p ** (m - 1 - i)) for i, a in enumerate(comps)) % p**m


def const_vector(comps, p):
    m1 = Modulus(p)
    return WittVector([ModPoly.constant(m1, (), c) for c in comps])


def ints(v):
    return tuple(c.constant_term() for c in v.comps)


# ---------------------------------------------------------------------------
# W_m over F_p against Z/p^m


@pytest.mark.parametrize("p, m", [(3, 2), (3, 3), (5, 2)])
def test_length_m_matches_integers(p, m):
    vecs = [const_vector(c, p) for c in product(range(p), repeat=m)]
    val = {ints(v): ghost_int(ints(v), p) for v in vecs}
    assert sorted(val.values()) == list(range(p**m))
    rng = random.Random(p * m)
    for _ in range(200):
        x, y = rng.choice(vecs), rng.choice(vecs)
        assert ghost_int(ints(x + y), p) == (val[ints(x)] + val[ints(y)]) % p**m
        assert ghost_int(ints(x * y), p) == (val[ints(x)] * val[ints(y)]) % p**m
        assert ghost_int(ints(x - y), p) == (val[ints(x)] - val[ints(y)]) % p**m


@pytest.mark.parametrize("n", [0, 1, 7, 26])
def test_from_int(n):
    v = WittVector.from_int(n, 3, 3)
    assert ghost_int(ints(v), 3) == n % 27


def test_structure_maps():
    p = 3
    rng = random.Random(2)
    x = random_witt(2, p, ("x",), rng)
    y = random_witt(2, p, ("x",), rng)
    # x V(y) = V(F(x) y) and FV = VF = p in characteristic p
    assert x.extend(3) * y.verschiebung() == (x.frobenius() * y).verschiebung()
    assert x.extend(3) * p == x.frobenius().verschiebung()
    assert x.extend(3) * p == x.verschiebung().frobenius()
    assert (x + y).restrict(1).comps[0] == x.comps[0] + y.comps[0]


# ---------------------------------------------------------------------------
# W_m mod p and rho


@pytest.mark.parametrize("m", [2, 3])
def test_rho_additive_and_triangle(m):
    rng = random.Random(m)
    for _ in range(15):
        x = random_poly(3, ("x", "y"), rng, 4, 3)
        y = random_poly(3, ("x", "y"), rng, 4, 3)
        assert rho(x + y, m) == rho(x, m) + rho(y, m)
        assert rho(x, m).vec.comps[0] == x**3


def test_rho_zero():
    assert rho(ModPoly.zero(Modulus(5), ("x",)), 2).is_zero()


@pytest.mark.parametrize("m", [2, 3])
def test_bar_ring_degeneracies(m):
    rng = random.Random(10 + m)
    for _ in range(10):
        u = random_witt(m - 1, 3, ("x",), rng, 4, 3)
        v = random_witt(m - 1, 3, ("x",), rng, 4, 3)
        assert WittBar(u.verschiebung() * v.verschiebung()).is_zero()
        assert WittBar(u.extend(m) * 3).is_zero()


def test_bar_is_not_trivially_zero():
    x = WittVector.teichmuller(ModPoly.var(Modulus(3), ("x",), "x"), 2)
    assert not WittBar(x).is_zero()
    assert not WittBar(x.frobenius()).is_zero()


# ---------------------------------------------------------------------------
# quasi-splittings


@pytest.mark.parametrize("level", [1, 2])
def test_affine_line_splittings_validate(level):
    s = affine_line_splitting(3, level)
    assert s.validate(random.Random(level), 8)


def test_broken_level_two_map_is_caught():
    x = ModPoly.var(Modulus(3), ("x",), "x")

    def no_carry(v):
        a0, a1 = v.comps
        return frobenius_trace(x**2 * a0) + frobenius_trace(frobenius_trace(x**4 * a1))

    # without the carry correction the map is not additive on W_2
    bad = QuasiSplitting(2, no_carry, None, ("x",), 3)
    with pytest.raises(SplittingError):
        bad.validate(random.Random(0), 10)


def test_non_unit_map_rejected():
    s = affine_line_splitting(3, 1)
    zero = QuasiSplitting(1, lambda v: s.sigma_fn(v).scale(2), None, ("x",), 3)
    with pytest.raises(SplittingError):
        quasi_canonical_lift(zero)


@pytest.mark.parametrize("level", [1, 2])
def test_kernel_ideal_and_times_p(level):
    L = quasi_canonical_lift(affine_line_splitting(3, level))
    rng = random.Random(100 + level)
    for _ in range(20):
        x = random_witt(level + 1, 3, ("x",), rng, 18, 3)
        u = L.kernel_element(random_witt(level, 3, ("x",), rng, 18, 3))
        assert not L.sigma(u)
        assert L.in_ideal(x * u.verschiebung())
        assert L.times_p_check(x)


@pytest.mark.parametrize("var", ["x", "y", "z"])
def test_level_one_matches_canonical_lift(var):
    split = build_splitting(parse_poly("x^3 + y^3 + z^3", Modulus(7)))
    chart = canonical_lift_chart(split, var)
    L = quasi_canonical_lift(from_chart_splitting(split.chart(var)))
    assert L.lifted_relation(chart.chart.relation) == chart.lifted_relation


def test_level_one_matches_on_weierstrass_chart():
    split = build_splitting(weierstrass_form(1, 3, 7))
    chart = canonical_lift_chart(split, "z")
    L = quasi_canonical_lift(from_chart_splitting(split.chart("z")))
    assert L.lifted_relation(chart.chart.relation) == chart.lifted_relation


@pytest.mark.parametrize("a, b, p", [(0, 1, 5), (1, 0, 7)])
def test_level_two_lift_of_supersingular_curve(a, b, p):
    sigma = qfsplit.level_two_certificate(a, b, p)
    L = quasi_canonical_lift(sigma)
    f = sigma.ring.relation
    ft = L.lifted_relation(f)
    assert ft.reduce(Modulus(p)) == f
    a0, s = L.evaluate(ft)
    assert not a0 and not s
    rng = random.Random(p)
    for _ in range(3):
        x = random_witt(3, p, f.vars, rng, 3, 2, sigma.ring)
        assert L.times_p_check(x)


# ---------------------------------------------------------------------------
# heights


def test_height_examples():
    assert qf_height_elliptic(1, 0, 5).height == 1
    assert qf_height_elliptic(0, 1, 7).height == 1
    h = qf_height_elliptic(0, 1, 5)
    assert h.height == 2
    assert h.certificate["verified"] and h.certificate["level"] == 2


@pytest.mark.parametrize("p", [5, 7])
def test_heights_follow_hasse_scalar(p):
    for a, b in smooth_curves(p):
        h = qf_height_elliptic(a, b, p, trials=3)
        assert h.height == (1 if hasse_scalar(a, b, p) else 2)


def test_height_errors():
    with pytest.raises(PrimeTooSmallError):
        qf_height_elliptic(1, 0, 3)
    with pytest.raises(SingularCurveError):
        qf_height_elliptic(0, 0, 5)


def test_height_json():
    assert qf_height_elliptic(1, 0, 5).to_json() == {"height": 1}
    out = qf_height_elliptic(0, 1, 5).to_json()
    assert set(out) == {"height", "certificate"}
