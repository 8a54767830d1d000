from itertools import product

import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import ghost, witt_add_formula, witt_from_int, witt_mul_formula
from wittlift.exactring import ChartRing, ModPoly, Modulus, normal_form, parse_poly
from wittlift.witt2 import (
    Witt2,
    embed_zp2,
    evaluate_teichmuller,
    ghost_value,
    restrict,
    teichmuller,
    verschiebung,
    witt_add,
    witt_frobenius,
    witt_mul,
    witt_neg,
    witt_sub,
    witt_sum,
)

XY = ("x", "y")


def const(c, p, vars=()):
    return ModPoly.constant(Modulus(p), vars, c)


def pair(a0, a1, p):
    return Witt2(const(a0, p), const(a1, p))


def as_ints(w):
    return w.a0.constant_term(), w.a1.constant_term()


# ---------------------------------------------------------------------------
# constants: exhaustive against Z/p^2


@pytest.mark.parametrize("p", [3, 5, 7])
def test_exhaustive_against_textbook_formulas(p):
    for x, y in product(product(range(p), repeat=2), repeat=2):
        X, Y = pair(*x, p), pair(*y, p)
        assert as_ints(witt_add(X, Y)) == witt_add_formula(x, y, p)
        assert as_ints(witt_mul(X, Y)) == witt_mul_formula(x, y, p)


@pytest.mark.parametrize("p", [3, 5, 7, 13])
def test_ghost_map_is_ring_isomorphism(p):
    q = p * p
    elems = {n: embed_zp2(n, p) for n in range(q)}
    assert sorted(ghost_value(w) for w in elems.values()) == list(range(q))
    for n in range(q):
        assert as_ints(elems[n]) == witt_from_int(n, p)
        assert ghost(*as_ints(elems[n]), p) == n
    for m, n in product(range(q), repeat=2):
        assert ghost_value(elems[m] + elems[n]) == (m + n) % q
        assert ghost_value(elems[m] * elems[n]) == (m * n) % q
        assert ghost_value(elems[m] - elems[n]) == (m - n) % q


def test_teichmuller_sum_example():
    s = teichmuller(const(2, 5)) + teichmuller(const(3, 5))
    assert as_ints(s) == (0, 0)


def test_cancellation_example():
    assert as_ints(pair(1, 0, 5) + pair(4, 0, 5)) == (0, 0)


@pytest.mark.parametrize("n, expected", [(7, (2, 0)), (6, (1, 1)), (0, (0, 0))])
def test_embed_zp2(n, expected):
    assert as_ints(embed_zp2(n, 5)) == expected


# ---------------------------------------------------------------------------
# polynomial coefficients


def test_no_carry_against_zero_first_component():
    m = Modulus(5)
    x, y = ModPoly.gens(m, XY)
    z = ModPoly.zero(m, XY)
    assert Witt2(x, z) + Witt2(z, y) == Witt2(x, y)


def test_verschiebung_products_vanish():
    m = Modulus(5)
    x, y = ModPoly.gens(m, XY)
    assert (verschiebung(x) * verschiebung(y)).a0.is_zero()
    assert (verschiebung(x) * verschiebung(y)).a1.is_zero()


def test_teichmuller_multiplicative():
    m = Modulus(7)
    u, v = ModPoly.gens(m, XY)
    assert teichmuller(u) * teichmuller(v) == teichmuller(u * v)


def test_mixed_product():
    m = Modulus(5)
    x, _ = ModPoly.gens(m, XY)
    one = ModPoly.constant(m, XY, 1)
    z = ModPoly.zero(m, XY)
    assert Witt2(x, one) * Witt2(z, one) == Witt2(z, x**5)


def test_structure_map_examples():
    m = Modulus(3)
    x, y = ModPoly.gens(m, XY)
    one = ModPoly.constant(m, XY, 1)
    assert teichmuller(one) == Witt2(one, ModPoly.zero(m, XY))
    assert restrict(teichmuller(x * y + 1)) == x * y + 1
    assert witt_frobenius(Witt2(x, y)) == Witt2(x**3, y**3)


# ---------------------------------------------------------------------------
# property tests over a curve chart, with the injective ghost image as oracle

P = 5
M = Modulus(P)
CHART = ChartRing(parse_poly("y^2 - x^3 - x", M), "y")


def chart_elements():
    exps = st.tuples(st.integers(0, 4), st.integers(0, 1))
    return st.dictionaries(exps, st.integers(0, P - 1), max_size=4).map(
        lambda d: normal_form(ModPoly(M, XY, d), CHART)
    )


def polys():
    exps = st.tuples(st.integers(0, 3), st.integers(0, 3))
    return st.dictionaries(exps, st.integers(0, P - 1), max_size=4).map(lambda d: ModPoly(M, XY, d))


def witts(elem):
    return st.tuples(elem, elem)


def image(w):
    """(a0, a1) -> a0~^p + p a1~ in Z/p^2[x, y]; injective on reduced rings."""
    m2 = Modulus(P, 2)
    a0, a1 = w.a0.lift().reduce(m2), w.a1.lift().reduce(m2)
    return a0**P + a1.scale(P)


@given(witts(polys()), witts(polys()))
def test_polynomial_ops_match_ghost_image(x, y):
    X, Y = Witt2(*x), Witt2(*y)
    assert image(X + Y) == image(X) + image(Y)
    assert image(X * Y) == image(X) * image(Y)
    assert image(X - Y) == image(X) - image(Y)


@given(witts(chart_elements()), witts(chart_elements()), witts(chart_elements()))
def test_ring_axioms_on_chart(x, y, z):
    X, Y, Z = (Witt2(a, b, CHART) for a, b in (x, y, z))
    assert X + Y == Y + X
    assert X * Y == Y * X
    assert (X + Y) + Z == X + (Y + Z)
    assert (X * Y) * Z == X * (Y * Z)
    assert X * (Y + Z) == X * Y + X * Z
    assert X + witt_neg(X) == X.zero_like()
    assert witt_sub(X, Y) + Y == X
    assert X * X.one_like() == X
    assert witt_sum([X, Y, Z]) == X + Y + Z


@given(witts(chart_elements()), chart_elements())
def test_multiplication_into_verschiebung(x, y):
    X = Witt2(*x, CHART)
    lhs = X * verschiebung(y, CHART)
    rhs = verschiebung(CHART.mul(witt_frobenius(X).a0, y), CHART)
    assert lhs == rhs


@given(witts(chart_elements()), witts(chart_elements()))
def test_restriction_is_homomorphism(x, y):
    X, Y = Witt2(*x, CHART), Witt2(*y, CHART)
    assert restrict(X + Y) == X.a0 + Y.a0
    assert restrict(X * Y) == CHART.mul(X.a0, Y.a0)


@given(chart_elements(), chart_elements())
def test_teichmuller_and_verschiebung_laws(u, v):
    T = lambda a: teichmuller(a, CHART)
    V = lambda a: verschiebung(a, CHART)
    assert T(u) * T(v) == T(CHART.mul(u, v))
    assert restrict(T(u)) == u
    assert V(u) + V(v) == V(u + v)
    assert (V(u) * V(v)) == T(CHART.zero())


@given(witts(chart_elements()), witts(chart_elements()))
def test_frobenius_is_homomorphism(x, y):
    X, Y = Witt2(*x, CHART), Witt2(*y, CHART)
    F = witt_frobenius
    assert F(X + Y) == F(X) + F(Y)
    assert F(X * Y) == F(X) * F(Y)


def test_chart_mismatch_rejected():
    other = ChartRing(parse_poly("y^2 - x^3 - 1", M), "y")
    x, y = ModPoly.gens(M, XY)
    with pytest.raises(ValueError):
        Witt2(x, y, CHART) + Witt2(x, y, other)


def test_evaluate_teichmuller_second_component_is_carry():
    # u + v at [u], [v] over F_5: second component is -(u^4 v + 2u^3v^2 + 2u^2v^3 + uv^4)
    m2 = Modulus(5, 2)
    F = parse_poly("u + v", m2)
    w = evaluate_teichmuller(F)
    expected = parse_poly("0 - (u^4*v + 2*u^3*v^2 + 2*u^2*v^3 + u*v^4)", Modulus(5))
    assert w.a0 == parse_poly("u + v", Modulus(5))
    assert w.a1 == expected
