import pytest
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from detsing.errors import PolySyntaxError, UnknownVariable, ZeroForm
from detsing.poly import (DEGREVLEX, NEG_DEGREVLEX, LinearForm, MonomialOrder,
                          Polynomial, VarContext, generic_linear_form,
                          generic_linear_forms, parse_poly,
                          quasihomogeneous_weights, solve_linear_form)

CTX = VarContext("xyz")


def P(src, ctx=CTX, params=None):
    return parse_poly(src, ctx, params)


def polys(ctx=CTX, max_terms=5, max_exp=3):
    exps = st.tuples(*[st.integers(0, max_exp)] * ctx.n)
    coeffs = st.fractions(min_value=-5, max_value=5, max_denominator=4)
    return st.dictionaries(exps, coeffs, max_size=max_terms).map(
        lambda d: Polynomial(ctx, {e: mpq(c.numerator, c.denominator) for e, c in d.items()}))


# ---------------------------------------------------------------- parsing

def test_parse_basic():
    p = P("x^2 - 3*x*y + 1/2")
    assert p.terms == {(2, 0, 0): 1, (1, 1, 0): -3, (0, 0, 0): mpq(1, 2)}


def test_parse_implicit_grouping_and_powers():
    assert P("(x+y)^2") == P("x^2 + 2*x*y + y^2")
    assert P("-x^2") == P("0 - x*x")
    assert P("2^3*x") == P("8*x")


def test_parse_params_in_exponents():
    assert P("x^(k+1) + k*y", params={"k": 2}) == P("x^3 + 2*y")


def test_parse_error_has_position():
    with pytest.raises(PolySyntaxError) as info:
        P("x + * y")
    assert info.value.position == 4


def test_unknown_variable():
    with pytest.raises(UnknownVariable):
        P("x + q")


def test_params_may_not_shadow_variables():
    with pytest.raises(ValueError):
        P("x", params={"x": 1})


def test_printing_round_trips():
    p = P("3*x^2*y - z/5 + 7")
    assert P(str(p)) == p


# ---------------------------------------------------------------- arithmetic

@settings(max_examples=60, deadline=None)
@given(polys(), polys(), polys())
def test_ring_axioms(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == Polynomial.zero(CTX)
    assert a * Polynomial.constant(CTX, 1) == a


@settings(max_examples=60, deadline=None)
@given(polys(), polys(), st.integers(0, 2))
def test_leibniz_rule(a, b, i):
    assert (a * b).derivative(i) == a.derivative(i) * b + a * b.derivative(i)


@settings(max_examples=40, deadline=None)
@given(polys(), polys(), st.tuples(*[st.integers(-3, 3)] * 3))
def test_evaluation_is_a_ring_map(a, b, pt):
    assert (a * b)(pt) == a(pt) * b(pt)
    assert (a + b)(pt) == a(pt) + b(pt)


def test_power_and_division():
    p = P("x + y")
    assert p ** 3 == p * p * p
    assert P("4*x") / 2 == P("2*x")


def test_substitute_and_linear_change():
    small = CTX.drop(0)
    g = parse_poly("y - z", small)
    assert P("x^2 + z").substitute(0, g) == parse_poly("y^2 - 2*y*z + z^2 + z", small)
    images = [P("y"), P("x"), P("z + x")]
    assert P("x*z").linear_change(images) == P("y*z + x*y")


def test_degree_parts():
    p = P("x^3 + x*y + 2*z + 5")
    assert p.degree() == 3
    assert p.low_degree() == 0
    assert p.linear_part() == [0, 0, 2]
    assert p.homogeneous_part(2) == P("x*y")


# ---------------------------------------------------------------- orders

def test_orders():
    x2, xy, x = (2, 0, 0), (1, 1, 0), (1, 0, 0)
    assert DEGREVLEX.compare(x2, x) == 1
    assert NEG_DEGREVLEX.compare(x2, x) == -1
    assert DEGREVLEX.compare(x2, xy) == 1
    assert NEG_DEGREVLEX.compare((0, 0, 0), x) == 1
    elim = MonomialOrder("ds", elim=1)
    assert elim.compare((1, 0, 0), (0, 5, 5)) == 1
    assert not elim.is_local and not elim.is_global
    assert P("x + x^2").lead(NEG_DEGREVLEX)[0] == (1, 0, 0)


# ---------------------------------------------------------------- genericity

def test_generic_forms_are_seeded():
    assert generic_linear_form(CTX, 3) == generic_linear_form(CTX, 3)
    assert generic_linear_form(CTX, 3) != generic_linear_form(CTX, 4)
    forms = generic_linear_forms(CTX, 5, 3)
    assert forms[0] == generic_linear_form(CTX, 5) and len(set(forms)) == 3


def test_solve_linear_form():
    i, g, small = solve_linear_form(CTX, [1, 3, -1])
    assert i == 1 and small.names == ("x", "z")
    assert g == parse_poly("-1/3*x + 1/3*z", small)
    with pytest.raises(ZeroForm):
        solve_linear_form(CTX, [0, 0, 0])
    with pytest.raises(ValueError):
        LinearForm((0, 0))


def test_quasihomogeneous_weights():
    w, _ = quasihomogeneous_weights(P("x^2 + y^3 + z^5"))
    assert w == (mpq(1, 2), mpq(1, 3), mpq(1, 5))
    assert quasihomogeneous_weights(P("x^2 + x^3")) is None
