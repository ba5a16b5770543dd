import itertools

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from detsing import groebner
from detsing.errors import ResourceLimit
from detsing.groebner import (Ideal, PolyMatrix, colength,
                              colength_at_origin, contains, eliminate_first,
                              ideal_quotient, intersection, krull_dimension,
                              minors, saturate_by, saturation, staircase,
                              standard_basis)
from detsing.poly import DEGREVLEX, MonomialOrder, Polynomial, VarContext, parse_poly

from oracles import sympy_colength, sympy_local_colength, to_sympy

CTX = VarContext("xyz")


def I(*srcs, ctx=CTX):
    return Ideal(ctx, [parse_poly(s, ctx) for s in srcs])


# ---------------------------------------------------------------- staircase

def enumerate_complement(lms, n, box):
    return sum(1 for e in itertools.product(range(box), repeat=n)
               if not any(all(a <= b for a, b in zip(m, e)) for m in lms))


@st.composite
def monomial_ideals(draw):
    n = draw(st.integers(1, 4))
    pures = [tuple(draw(st.integers(1, 6)) if j == i else 0 for j in range(n)) for i in range(n)]
    extra = draw(st.lists(st.tuples(*[st.integers(0, 6)] * n).filter(lambda e: 0 < sum(e) <= 6),
                          max_size=5))
    return n, pures + extra


@settings(max_examples=80, deadline=None)
@given(monomial_ideals())
def test_staircase_matches_enumeration(data):
    n, lms = data
    box = max(max(m) for m in lms) + 1
    assert len(staircase(lms, n)) == enumerate_complement(lms, n, box)


@settings(max_examples=40, deadline=None)
@given(monomial_ideals())
def test_colength_of_monomial_ideal(data):
    n, lms = data
    ctx = VarContext([f"x{i}" for i in range(n)])
    ideal = Ideal(ctx, [Polynomial(ctx, {m: 1}) for m in lms])
    box = max(max(m) for m in lms) + 1
    expected = enumerate_complement(lms, n, box)
    assert colength(ideal) == expected
    assert colength(ideal, DEGREVLEX) == expected


def test_staircase_infinite_and_unit():
    assert staircase([(1, 1)], 2) is None
    assert staircase([(0, 0)], 2) == []


# ---------------------------------------------------------------- global bases

@pytest.mark.parametrize("gens", [
    ("x^2 + y*z - 1", "x*y - z", "z^2 - x"),
    ("x^3 - y", "y^2 - x*z", "x + y + z"),
    ("x*y - 1", "y*z - x", "x^2 - z^3"),
])
def test_reduced_basis_matches_sympy(gens):
    ideal = I(*gens)
    sb = standard_basis(ideal, DEGREVLEX)
    sy, syms = to_sympy(ideal)
    G = sympy.groebner(sy, *syms, order="grevlex")
    expected = sorted(sympy.Poly(g, *syms).monoms(order="grevlex")[0] for g in G.exprs)
    assert sorted(sb.staircase_generators) == expected
    assert sb.colength() == sympy_colength(sy, syms)


def test_membership_and_dimension():
    ideal = I("x^2 - y", "x*z")
    assert contains(ideal, I("x^3*z - x*y*z"))
    assert not contains(ideal, I("x"))
    assert krull_dimension(ideal) == 1
    assert krull_dimension(I("x", "y", "z")) == 0


def test_elimination():
    big, small = VarContext("txy"), VarContext("xy")
    raw = [dict(parse_poly(s, big).terms) for s in ("x - t^2", "y - t^3")]
    el = eliminate_first(small, raw, 1)
    assert contains(el, Ideal(el.ctx, [parse_poly("x^3 - y^2", el.ctx)]))


def test_quotients_and_saturation():
    q = ideal_quotient(I("x^2", "x*y"), I("x"))
    assert contains(q, I("x", "y")) and contains(I("x", "y"), q)
    # (x^2, xy) : x^infinity is the unit ideal: the embedded point and the
    # line x = 0 both disappear
    sat = saturation(I("x^2", "x*y"), I("x"))
    assert standard_basis(sat).is_unit
    sat_y = saturate_by(I("x^2", "x*y"), parse_poly("y", CTX))
    assert contains(sat_y, I("x")) and contains(I("x"), sat_y)


def test_intersection():
    both = intersection(I("x"), I("y"))
    assert contains(both, I("x*y")) and contains(I("x*y"), both)


def test_minors():
    ctx = VarContext("abcd")
    M = PolyMatrix([[parse_poly(s, ctx) for s in row] for row in (("a", "b"), ("c", "d"))], ctx)
    assert list(minors(M, 2).generators) == [parse_poly("a*d - b*c", ctx)]
    assert len(minors(M, 1)) == 4


# ---------------------------------------------------------------- local bases

@pytest.mark.parametrize("names, gens, expected", [
    ("xy", ("x^2 + y^3", "x*y"), 5),
    ("xy", ("x + x^2", "y^2"), 2),
    ("xy", ("x*(1 + y)", "y^3 - x^2"), 3),
    ("xyz", ("x^3 + y^2 + z^2", "y*z", "x*z + y^3"), None),
])
def test_local_colength(names, gens, expected):
    ideal = I(*gens, ctx=VarContext(names))
    value = colength(ideal)
    if expected is not None:
        assert value == expected
    assert value == sympy_local_colength(ideal)
    assert colength_at_origin(ideal) == value


def test_local_order_ignores_far_components():
    # x(x - 1) = 0, y = 0 has two points; only the origin counts locally
    ideal = I("x^2 - x", "y", "z")
    assert colength(ideal) == 1
    assert colength(ideal, DEGREVLEX) == 2


def test_local_saturation():
    ctx = VarContext("xys")
    ideal = Ideal(ctx, [parse_poly("s*x", ctx), parse_poly("x^2 - y*s", ctx)])
    sat = saturate_by(ideal, parse_poly("s", ctx), local=True)
    assert contains(sat, Ideal(ctx, [parse_poly("x", ctx), parse_poly("y", ctx)]))


@settings(max_examples=25, deadline=None)
@given(st.lists(st.tuples(st.integers(1, 3), st.integers(-2, 2), st.integers(0, 2), st.integers(0, 2)),
                min_size=2, max_size=2))
def test_mora_agrees_with_global_route(data):
    ctx = VarContext("xy")
    gens = []
    for i, (a, c, b1, b2) in enumerate(data):
        g = Polynomial.variable(ctx, i) ** a + Polynomial(ctx, {(b1 + 1, b2): c}) \
            + Polynomial(ctx, {(b2, b1 + 1): 1})
        gens.append(g)
    ideal = Ideal(ctx, gens)
    assert colength(ideal) == colength_at_origin(ideal)


def test_lazard_order_is_global():
    order = MonomialOrder("lazard")
    assert order.is_global
    # total degree first, whatever the local order says
    assert order.compare((0, 2, 0), (0, 1, 0)) == 1
    assert order.compare((1, 1, 0), (0, 1, 0)) == 1


# ---------------------------------------------------------------- limits

def test_resource_limits():
    big = I("x^7 + y^5*z + z^9", "x*y*z + y^8", "x^3*z^2 - y^7")
    with pytest.raises(ResourceLimit):
        with groebner.resource_limits(max_basis=2):
            standard_basis(big, DEGREVLEX)
    with pytest.raises(ResourceLimit):
        with groebner.resource_limits(max_work=1):
            colength(big)


def test_work_budget_is_deterministic():
    big = I("x^5 + y^4 + z^3 + x*y*z", "x*y + z^2", "y*z^3 - x^4")
    start = groebner.work_done()
    value = colength(big)
    used = groebner.work_done() - start
    start = groebner.work_done()
    assert colength(big) == value
    assert groebner.work_done() - start == used


def test_nested_limits_never_extend():
    with groebner.resource_limits(max_work=10):
        with groebner.resource_limits(max_work=10_000):
            with pytest.raises(ResourceLimit):
                for _ in range(100):
                    groebner._tick()
