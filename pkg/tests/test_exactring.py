import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from oracles import expand_mod
from wittlift.exactring import (
    ChartRing,
    DivisionError,
    ModPoly,
    Modulus,
    PolyParseError,
    TruncSeries,
    coeff_extract,
    frobenius_power,
    lift_div_p,
    normal_form,
    parse_poly,
)

PRIMES = [3, 5, 7, 13]
XY = ("x", "y")


def poly_strategy(p, e=1, vars=XY, max_terms=5, max_deg=4):
    q = p**e
    exps = st.tuples(*[st.integers(0, max_deg) for _ in vars])
    return st.dictionaries(exps, st.integers(0, q - 1), max_size=max_terms).map(
        lambda d: ModPoly(Modulus(p, e), vars, d)
    )


def to_sympy(g):
    syms = sympy.symbols(" ".join(g.vars))
    syms = syms if isinstance(syms, tuple) else (syms,)
    expr = sum(c * sympy.prod([s**k for s, k in zip(syms, e)]) for e, c in g.terms.items())
    return sympy.sympify(expr), syms


# ---------------------------------------------------------------------------
# parsing


def test_parse_weierstrass_mod5():
    g = parse_poly("y^2 - x^3 - x", Modulus(5))
    assert dict(g.terms) == {(0, 2): 1, (3, 0): 4, (1, 0): 4}


def test_parse_binomial_mod3():
    g = parse_poly("(x+y)^2", Modulus(3))
    assert dict(g.terms) == {(2, 0): 1, (1, 1): 2, (0, 2): 1}


def test_parse_error_offset():
    with pytest.raises(PolyParseError) as info:
        parse_poly("x^", Modulus(7))
    assert info.value.offset == 2
    assert info.value.kind == "syntax"


@pytest.mark.parametrize("src", ["x +* y", "(x+1", "x^-1", "2x", "x)", "X+1", ""])
def test_parse_rejects(src):
    with pytest.raises(PolyParseError):
        parse_poly(src, Modulus(5))


def test_parse_exact_division_with_constants():
    g = parse_poly("((1+t)^p-1-t^p)/p", Modulus(5, 2), constants={"p": 5}, allow_division=True)
    assert dict(g.terms) == {(4,): 1, (3,): 2, (2,): 2, (1,): 1}


def test_parse_division_off_by_default():
    with pytest.raises(PolyParseError):
        parse_poly("(5*x)/5", Modulus(5))


def test_explicit_variable_order():
    g = parse_poly("x + 2*y", Modulus(5), ("y", "x"))
    assert g.vars == ("y", "x")
    assert g.coefficient((1, 0)) == 2


@pytest.mark.parametrize("p", PRIMES)
@given(data=st.data())
def test_serialize_parse_roundtrip(p, data):
    g = data.draw(poly_strategy(p))
    assert parse_poly(str(g), Modulus(p), XY) == g
    assert ModPoly.from_json(g.to_json()) == g


def test_serialization_is_graded_lex():
    g = parse_poly("x + y^2 + 1 + x*y + x^2", Modulus(5))
    assert str(g) == "x^2 + x*y + y^2 + x + 1"


# ---------------------------------------------------------------------------
# exact division by p


def test_lift_div_p_linear():
    x, = ModPoly.gens(None, ("x",))
    assert str(lift_div_p(5 * x + 10, 5)) == "x + 2"


def test_lift_div_p_binomial():
    x, = ModPoly.gens(None, ("x",))
    got = lift_div_p((x + 1) ** 5 - x**5 - 1, 5)
    expected = {(k,): c % 5 for (k,), c in
                {(4,): 1, (3,): 2, (2,): 2, (1,): 1}.items()}
    assert dict(got.terms) == expected


def test_lift_div_p_reports_monomial():
    x, = ModPoly.gens(None, ("x",))
    with pytest.raises(DivisionError) as info:
        lift_div_p(3 * x, 5)
    assert info.value.monomial == (1,)


def test_lift_div_p_from_z_mod_p2():
    g = parse_poly("10*x + 15", Modulus(5, 2))
    assert dict(lift_div_p(g).terms) == {(1,): 2, (0,): 3}


@pytest.mark.parametrize("p", PRIMES)
@given(data=st.data())
def test_lift_div_p_left_inverse(p, data):
    g = data.draw(poly_strategy(p))
    assert lift_div_p(g.lift().scale(p), p) == g


# ---------------------------------------------------------------------------
# chart rings

CURVE = ChartRing(parse_poly("y^2 - x^3 - x", Modulus(5)), "y")


@pytest.mark.parametrize(
    "src, expected",
    [("y^2", "x^3 + x"), ("y^3", "x^3*y + x*y"), ("x", "x")],
)
def test_normal_form_examples(src, expected):
    assert str(normal_form(parse_poly(src, Modulus(5), XY), CURVE)) == expected


def test_chart_ring_requires_monic_relation():
    with pytest.raises(ValueError):
        ChartRing(parse_poly("2*y^2 - x", Modulus(5)), "y")


@given(poly_strategy(5), poly_strategy(5))
def test_normal_form_multiplicative(a, b):
    lhs = normal_form(a * b, CURVE)
    rhs = normal_form(normal_form(a, CURVE) * normal_form(b, CURVE), CURVE)
    assert lhs == rhs
    assert lhs.degree("y") < 2


@given(poly_strategy(5))
def test_normal_form_differs_by_multiple_of_relation(a):
    # y-degree < 2 after reduction and a - nf(a) is divisible by the relation
    r = normal_form(a, CURVE)
    expr, (x, y) = to_sympy(a - r)
    rem = sympy.rem(sympy.Poly(expr, y, x), sympy.Poly(y**2 - x**3 - x, y, x))
    assert all(int(c) % 5 == 0 for c in rem.coeffs())


# ---------------------------------------------------------------------------
# Frobenius and coefficient extraction


def test_frobenius_power_freshman():
    assert str(frobenius_power(parse_poly("x+y", Modulus(3)))) == "x^3 + y^3"


def test_frobenius_power_mod_9():
    g = frobenius_power(parse_poly("x+1", Modulus(3, 2)))
    assert dict(g.terms) == {(3,): 1, (2,): 3, (1,): 3, (0,): 1}


def test_frobenius_power_zero():
    assert frobenius_power(ModPoly.zero(Modulus(5), XY)).is_zero()


@pytest.mark.parametrize("p", [3, 5, 7])
@given(data=st.data())
def test_frobenius_is_ring_homomorphism(p, data):
    a = data.draw(poly_strategy(p, max_deg=3))
    b = data.draw(poly_strategy(p, max_deg=3))
    assert frobenius_power(a + b) == frobenius_power(a) + frobenius_power(b)
    assert frobenius_power(a * b) == frobenius_power(a) * frobenius_power(b)


@pytest.mark.parametrize("p, e", [(3, 2), (5, 2), (7, 1)])
@given(data=st.data())
def test_frobenius_matches_honest_power(p, e, data):
    a = data.draw(poly_strategy(p, e, max_deg=2, max_terms=3))
    assert frobenius_power(a) == a**p


def test_coeff_extract_examples():
    m = Modulus(5)
    assert coeff_extract(parse_poly("(x^3+x)^2", m), (4,)) == 2
    assert coeff_extract(parse_poly("(x^3+1)^2", m), (4,)) == 0
    assert coeff_extract(parse_poly("7", Modulus(5, 2)), ()) == 7


# ---------------------------------------------------------------------------
# ring axioms against sympy expansion


@pytest.mark.parametrize("p", PRIMES)
@given(data=st.data())
def test_ring_axioms(p, data):
    a, b, c = (data.draw(poly_strategy(p)) for _ in range(3))
    assert a + b == b + a
    assert a * b == b * a
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == ModPoly.zero(a.modulus, XY)


@pytest.mark.parametrize("p, e", [(3, 1), (5, 2), (13, 1)])
@given(data=st.data())
def test_product_matches_sympy(p, e, data):
    a = data.draw(poly_strategy(p, e))
    b = data.draw(poly_strategy(p, e))
    ea, syms = to_sympy(a)
    eb, _ = to_sympy(b)
    assert dict((a * b).terms) == expand_mod(ea * eb, syms, p**e)


def test_substitute_and_evaluate():
    g = parse_poly("x^2 + 3*y", Modulus(5, 2))
    assert g.evaluate({"x": 4, "y": 2}) == 22
    h = g.substitute({"x": parse_poly("y+1", Modulus(5, 2), XY)})
    assert h == parse_poly("y^2 + 5*y + 1", Modulus(5, 2), XY)


def test_modulus_mismatch_rejected():
    with pytest.raises(ValueError):
        parse_poly("x", Modulus(5)) + parse_poly("x", Modulus(7))


# ---------------------------------------------------------------------------
# truncated series


def test_series_inverse():
    m = Modulus(5, 2)
    u = TruncSeries.from_poly(parse_poly("1 + t", m), 10)
    inv = u.inverse()
    assert (u * inv) == TruncSeries.one(m, ("t",), 10)
    assert inv.coefficient((3,)) == 25 - 1


def test_series_truncation():
    m = Modulus(7)
    u = TruncSeries.from_poly(parse_poly("(1+s+t)^9", m), 4)
    assert all(sum(e) <= 4 for e in u.terms)
    assert u.truncate(2) == TruncSeries.from_poly(parse_poly("(1+s+t)^9", m), 2)
