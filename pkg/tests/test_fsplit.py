import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import fermat_cubic_scalar, frobenius_trace as ap_oracle, hasse_scalar as hasse_oracle, is_smooth
from wittlift.canlift import weierstrass_form
from wittlift.errors import DegreeError, NotFSplitError
from wittlift.exactring import ModPoly, Modulus, normal_form, parse_poly
from wittlift.fsplit import build_splitting, fedder_fsplit_test, frobenius_trace
from wittlift.hassewitt import hasse_scalar, smooth_curves

XYZ = ("x", "y", "z")


@pytest.mark.parametrize("p", [3, 5, 7, 11])
def test_trace_of_corner_monomial(p):
    g = ModPoly.monomial(Modulus(p), XYZ, (p - 1,) * 3)
    assert frobenius_trace(g) == ModPoly.constant(Modulus(p), XYZ, 1)


@pytest.mark.parametrize("p", [3, 5, 7])
def test_trace_shifts_exponents(p):
    m = Modulus(p)
    g = ModPoly.monomial(m, XYZ, (2 * p - 1, p - 1, p - 1))
    assert frobenius_trace(g) == ModPoly.gens(m, XYZ)[0]
    assert frobenius_trace(ModPoly.monomial(m, XYZ, (p - 2, p - 1, p - 1))).is_zero()


@pytest.mark.parametrize("p", [5, 7, 11, 13])
def test_fermat_cubic_against_multinomial(p):
    res = fedder_fsplit_test(parse_poly("x^3 + y^3 + z^3", Modulus(p)))
    assert res.hasse_scalar == fermat_cubic_scalar(p)
    assert res.split == (res.hasse_scalar != 0)


def test_fermat_cubic_frozen_values():
    assert fedder_fsplit_test(parse_poly("x^3 + y^3 + z^3", Modulus(7))).hasse_scalar == 6
    assert fedder_fsplit_test(parse_poly("x^3 + y^3 + z^3", Modulus(5))).hasse_scalar == 0


def test_weierstrass_cubic_mod5_splits():
    assert fedder_fsplit_test(parse_poly("z*y^2 - x^3 - x*z^2", Modulus(5))).split


@pytest.mark.parametrize("p", [5, 7])
def test_fedder_agrees_with_hasse_and_point_count(p):
    for a, b in smooth_curves(p):
        split = fedder_fsplit_test(weierstrass_form(a, b, p)).split
        assert split == (hasse_scalar(a, b, p) != 0)
        assert hasse_scalar(a, b, p) == hasse_oracle(a, b, p)
        assert split == (ap_oracle(a, b, p) % p != 0)


def test_non_calabi_yau_rejected():
    with pytest.raises(DegreeError):
        fedder_fsplit_test(parse_poly("x^2 + y^2 + z^2", Modulus(5)))


def test_supersingular_has_no_splitting():
    with pytest.raises(NotFSplitError):
        build_splitting(parse_poly("x^3 + y^3 + z^3", Modulus(5)))


FERMAT7 = build_splitting(parse_poly("x^3 + y^3 + z^3", Modulus(7)))
M7 = Modulus(7)


def test_sigma_of_one_and_theta():
    one = ModPoly.constant(M7, XYZ, 1)
    assert FERMAT7.sigma(one) == one
    assert FERMAT7.sigma(FERMAT7.theta) == one


def small_forms(p, vars=XYZ, deg=4):
    exps = st.tuples(*[st.integers(0, deg) for _ in vars])
    return st.dictionaries(exps, st.integers(0, p - 1), max_size=4).map(
        lambda d: ModPoly(Modulus(p), vars, d)
    )


@given(small_forms(7))
def test_sigma_splits_frobenius(h):
    hp = ModPoly(M7, XYZ, {tuple(7 * k for k in e): c for e, c in h.terms.items()})
    assert FERMAT7.sigma(hp) == h


def test_f_linearity_many_pairs():
    rng = random.Random(7)
    for _ in range(1000):
        h = ModPoly(M7, XYZ, {tuple(rng.randint(0, 2) for _ in XYZ): rng.randint(1, 6) for _ in range(2)})
        g = ModPoly(M7, XYZ, {tuple(rng.randint(0, 8) for _ in XYZ): rng.randint(1, 6) for _ in range(3)})
        hp = ModPoly(M7, XYZ, {tuple(7 * k for k in e): c for e, c in h.terms.items()})
        assert FERMAT7.sigma(hp * g) == h * FERMAT7.sigma(g)


@given(small_forms(7), small_forms(7))
def test_additivity(g, h):
    assert FERMAT7.sigma(g + h) == FERMAT7.sigma(g) + FERMAT7.sigma(h)


@pytest.mark.parametrize("var", ["x", "y", "z"])
def test_chart_restrictions(var):
    cs = FERMAT7.chart(var)
    rest = tuple(v for v in XYZ if v != var)
    assert cs.relation.vars == rest
    one = ModPoly.constant(M7, rest, 1)
    assert cs.sigma(one) == one
    rng = random.Random(ord(var))
    for _ in range(20):
        a = ModPoly(M7, rest, {tuple(rng.randint(0, 3) for _ in rest): rng.randint(1, 6)})
        if cs.ring is not None:
            a = normal_form(a, cs.ring)
        assert cs.sigma(cs.section(a)) == a
