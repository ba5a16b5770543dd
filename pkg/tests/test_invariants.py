from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from detsing.eids import EidsDescriptor, slice_by
from detsing.errors import NonIsolated, NotAGerm, NotICIS, NotSmoothable
from detsing.groebner import Ideal
from detsing.invariants import (IcisPresentation, InvariantReport, NuTrace,
                                Provenance, jacobian_ideal, milnor_determinantal,
                                milnor_hypersurface, milnor_icis,
                                milnor_orlik_oracle, milnor_via_weights,
                                multiplicity_m0, nu_vanishing,
                                polar_multiplicity_md, tjurina_hypersurface)
from detsing.poly import LinearForm, VarContext, parse_poly

from oracles import milnor_orlik, sympy_local_colength

XY = VarContext("xy")
XYZ = VarContext("xyz")

ADE = [(f"x^{k + 1} + y^2", k) for k in range(1, 9)] + \
      [(f"x^2*y + y^{k - 1}", k) for k in range(4, 9)] + \
      [("x^3 + y^4", 6), ("x^3 + x*y^3", 7), ("x^3 + y^5", 8)]


def D(names, rows, t=2):
    return EidsDescriptor.from_strings(list(names), rows, t)


def ex_cone():
    return D("xyzw", [["x", "y", "z"], ["y", "z", "w"]])


def ex_surface():
    return D("xyzw", [["z", "y+w", "x"], ["w", "x", "y"]])


# ---------------------------------------------------------------- hypersurfaces

@pytest.mark.parametrize("src, mu", ADE)
def test_ade_milnor_numbers(src, mu):
    g = parse_poly(src, XY)
    assert milnor_hypersurface(g) == mu
    assert milnor_via_weights(g) == mu
    assert tjurina_hypersurface(g) == mu


@pytest.mark.parametrize("src", ["x^2*y^2 + x^5 + y^5", "x^4 + y^5 + x^2*y^3", "x^3 + y^3 + z^4 + x*y*z^2"])
def test_milnor_and_tjurina_against_oracle(src):
    ctx = XYZ if "z" in src else XY
    g = parse_poly(src, ctx)
    assert milnor_hypersurface(g) == sympy_local_colength(jacobian_ideal(g))
    full = Ideal(ctx, [g] + list(jacobian_ideal(g).generators))
    assert tjurina_hypersurface(g) == sympy_local_colength(full)
    assert tjurina_hypersurface(g) <= milnor_hypersurface(g)


def test_non_quasihomogeneous_tjurina_drops():
    g = parse_poly("x^4 + y^5 + x^2*y^3", XY)
    assert milnor_hypersurface(g) == 12
    assert tjurina_hypersurface(g) == 11


def test_hypersurface_errors():
    with pytest.raises(NonIsolated):
        milnor_hypersurface(parse_poly("x^2", XY))
    with pytest.raises(NotAGerm):
        milnor_hypersurface(parse_poly("x^2 + 1", XY))


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(2, 7), min_size=1, max_size=3))
def test_milnor_orlik_matches_brieskorn_pham(exps):
    ctx = VarContext([f"x{i}" for i in range(len(exps))])
    g = parse_poly(" + ".join(f"x{i}^{a}" for i, a in enumerate(exps)), ctx)
    weights = [Fraction(1, a) for a in exps]
    expected = 1
    for a in exps:
        expected *= a - 1
    assert milnor_orlik_oracle(weights) == expected == milnor_orlik(weights)
    assert milnor_hypersurface(g) == expected


# ---------------------------------------------------------------- ICIS

def test_icis_milnor_numbers():
    # plane cusp embedded in C^3
    X = IcisPresentation(XYZ, [parse_poly("x^3 - y^2", XYZ), parse_poly("z", XYZ)], 2)
    assert milnor_icis(X) == 2
    # hypersurface case agrees with the Jacobian colength
    g = parse_poly("x^3 + y^4", XY)
    assert milnor_icis(IcisPresentation(XY, [g], 1)) == 6
    # a zero-dimensional complete intersection: colength minus one
    Z = IcisPresentation(XY, [parse_poly("x^2", XY), parse_poly("y^3", XY)], 2)
    assert milnor_icis(Z) == 5


def test_icis_rejects_wrong_codimension():
    with pytest.raises(NotICIS):
        IcisPresentation(XY, [parse_poly("x", XY)], 2)
    with pytest.raises(NotICIS):
        milnor_icis(IcisPresentation(XYZ, [parse_poly("x*y", XYZ), parse_poly("x*z", XYZ)], 2))


# ---------------------------------------------------------------- determinantal

def test_multiplicity():
    assert multiplicity_m0(Ideal(XY, [parse_poly("x^2 + y^3", XY)]), 1) == 2
    assert multiplicity_m0(ex_cone().ideal, 2) == 3


def test_surface_with_given_polar_form():
    X = ex_surface()
    p = LinearForm((0, 0, 0, 1))
    assert polar_multiplicity_md(X, p) == 3
    curve = slice_by(X, p)
    assert milnor_determinantal(curve) == 2
    # the difference is the Milnor number of the surface
    assert milnor_determinantal(X) == 3 - 2 == 1


def test_cone_invariants():
    X = ex_cone()
    trace = NuTrace()
    assert nu_vanishing(X, 0, trace) == 1
    assert trace.md[0] == 3
    assert polar_multiplicity_md(X) == 3


def test_smooth_germ_has_trivial_invariants():
    X = D("xyz", [["1", "0", "0"], ["0", "x", "y"]])
    assert nu_vanishing(X) == 0
    assert polar_multiplicity_md(X) == 0


def test_requires_smoothable_range():
    X = D("xyzwvu", [["x", "y", "v"], ["z", "w", "u"]])
    with pytest.raises(NotSmoothable):
        nu_vanishing(X)


SURFACES = [
    [["x", "y", "z"], ["y", "z", "w"]],
    [["z", "y+w", "x"], ["w", "x", "y"]],
    [["x", "y", "z"], ["w", "x", "y^2+z^2"]],
    [["x", "y", "z"], ["w", "x", "y^2+w^3"]],
]


@settings(max_examples=4, deadline=None)
@given(st.sampled_from(SURFACES))
def test_seed_stability(rows):
    X = D("xyzw", rows)
    for a, b in ((0, 1),):
        assert multiplicity_m0(X.ideal, 2, a) == multiplicity_m0(X.ideal, 2, b)
        assert polar_multiplicity_md(X, None, a) == polar_multiplicity_md(X, None, b)
        assert nu_vanishing(X, a) == nu_vanishing(X, b)
        assert milnor_determinantal(X, a) == milnor_determinantal(X, b)


# ---------------------------------------------------------------- reports

def test_reports_carry_provenance():
    rep = InvariantReport("mu", 3, Provenance.computed(0, "test"))
    assert rep.as_dict() == {"name": "mu", "value": 3,
                             "provenance": {"kind": "computed", "seed": 0, "method": "test"}}
    assert InvariantReport("chi_tilde", -1, Provenance.corpus("table1:E_6+"), "slice").as_dict()["label"] == "slice"
    with pytest.raises(ValueError):
        InvariantReport("mu", 1.5, Provenance.supplied())
    with pytest.raises(ValueError):
        Provenance("guessed")


@pytest.mark.parametrize("rows", SURFACES[:3])
def test_polar_shift_does_not_change_md(rows, monkeypatch):
    from detsing import invariants
    X = D("xyzw", rows)
    shifted = polar_multiplicity_md(X, None, 2)
    monkeypatch.setattr(invariants, "_absorbing_shift", lambda X, C: [0] * X.N)
    assert polar_multiplicity_md(X, None, 2) == shifted
