import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from detsing import groebner
from detsing.eids import EidsDescriptor
from detsing.errors import MissingInput, OutOfRange, RegimeMismatch
from detsing.invariants import InvariantReport, Provenance
from detsing.obstruction import (EuResult, Regime, StratumDatum,
                                 applicable_regimes, chi_bar_generic_link,
                                 chi_tilde_corank1, complex_link_chi,
                                 eu_corank1_fastpath, eu_dispatch,
                                 eu_n_equals_6, eu_n_ge_7, eu_smoothable,
                                 eu_three_strata, lefschetz_combine,
                                 three_strata_data)

from oracles import generic_link_reduced_chi

EX66_VARS = ["x1", "x2", "x3", "x4", "x5", "y1", "y2", "y3"]


def D(names, rows, t=2):
    return EidsDescriptor.from_strings(list(names), rows, t)


def smooth_germ(m, n, t, N):
    """diag(1, ..., 1, G) with t - 1 ones and a block G of distinct variables."""
    names = [f"x{i}" for i in range(N)]
    block = iter(names)
    rows = []
    for r in range(m):
        row = []
        for c in range(n):
            if r < t - 1 or c < t - 1:
                row.append("1" if r == c else "0")
            else:
                row.append(next(block))
        rows.append(row)
    return D(names, rows, t)


# ---------------------------------------------------------------- links

def test_generic_link_exhaustive():
    for m, n, t in itertools.product(range(1, 7), repeat=3):
        if t <= m <= n:
            assert chi_bar_generic_link(m, n, t) == generic_link_reduced_chi(m, n, t)
    assert chi_bar_generic_link(2, 3, 2) == 1


def test_generic_link_range():
    for bad in ((3, 2, 2), (2, 3, 0), (2, 3, 3)):
        with pytest.raises(OutOfRange):
            chi_bar_generic_link(*bad)


def test_complex_link_of_stratum():
    X = D("xyzwvu", [["x", "y", "v"], ["z", "w", "u"]])
    assert complex_link_chi(X, 1) == 2
    with pytest.raises(OutOfRange):
        complex_link_chi(X, 2)


# ---------------------------------------------------------------- closed forms

def test_corollary_sign_cancellation():
    for N in range(7, 13):
        for mu in range(11):
            assert eu_n_ge_7(N, mu, (-1) ** (N - 2) * mu) == 2


def test_closed_forms():
    assert eu_smoothable(2, 1, 3) == -1
    assert eu_n_equals_6(-1) == 0
    assert chi_tilde_corank1(7, 2) == 2 and chi_tilde_corank1(8, 2) == -2
    with pytest.raises(RegimeMismatch):
        eu_n_ge_7(6, 0, 0)
    with pytest.raises(RegimeMismatch):
        chi_tilde_corank1(5, 1)


@settings(max_examples=200, deadline=None)
@given(st.one_of(st.none(), st.integers(0, 6)), st.integers(0, 20), st.integers(-3, 3), st.integers(-20, 20))
def test_slice_formula_matches_closed_form(dim, mu, chi_link, chi):
    strata = three_strata_data(dim, mu, chi_link, chi)
    assert lefschetz_combine(strata) == eu_three_strata(dim, mu, chi_link, chi)


def test_lefschetz_rejects_origin_term():
    with pytest.raises(ValueError):
        lefschetz_combine([StratumDatum(0, 1, 1)])
    with pytest.raises(ValueError):
        StratumDatum(2, 1, 0, regular=True)


# ---------------------------------------------------------------- smooth points

@st.composite
def smooth_cases(draw):
    t = draw(st.integers(2, 3))
    m = draw(st.integers(t, 3))
    n = draw(st.integers(m, 4))
    c = (m - t + 1) * (n - t + 1)
    N = draw(st.integers(c + 1, max(c + 1, (m - t + 3) * (n - t + 3))))
    return m, n, t, N


@settings(max_examples=25, deadline=None)
@given(smooth_cases())
def test_smooth_point_normalization(case):
    X = smooth_germ(*case)
    regimes = applicable_regimes(X)
    assert regimes
    for regime in regimes:
        assert eu_dispatch(X, regime=regime).value == 1


@pytest.mark.parametrize("N", [4, 6, 7, 8])
def test_smooth_point_every_232_regime(N):
    X = smooth_germ(2, 3, 2, N)
    for regime in Regime:
        try:
            res = eu_dispatch(X, regime=regime)
        except RegimeMismatch:
            continue
        assert res.value == 1
        assert all(r.provenance.kind == "computed" for r in res.inputs)


# ---------------------------------------------------------------- worked germs

def test_smoothable_surface():
    res = eu_dispatch(D("xyzw", [["x", "y", "z"], ["y", "z", "w"]]))
    assert res.value == -1 and res.regime is Regime.SMOOTHABLE
    assert {(r.name, r.value) for r in res.inputs} == {("nu", 1), ("md", 3)}


def test_corank_one_routes_agree():
    X = D(EX66_VARS, [["x1", "x2", "x3"], ["x4", "x5", "x1+y1^2-y2^2+y3^2"]])
    values = {r: eu_dispatch(X, regime=r).value for r in applicable_regimes(X)}
    assert set(values) == {Regime.CORANK1, Regime.N_GE_7, Regime.THREE_STRATA}
    assert set(values.values()) == {2}
    assert eu_corank1_fastpath(X) == 2


RESIDUALS = ["y1^2 + y2^2", "y1^2 + y2^3", "y1^3 + y2^3", "y1^2*y2 + y2^3"]


@settings(max_examples=4, deadline=None)
@given(st.sampled_from(RESIDUALS))
def test_regime_coherence_in_c7(g):
    X = D(["x1", "x2", "x3", "x4", "x5", "y1", "y2"], [["x1", "x2", "x3"], ["x4", "x5", f"x1+{g}"]])
    fast = eu_dispatch(X)
    assert fast.regime is Regime.CORANK1
    assert eu_dispatch(X, regime=Regime.N_GE_7).value == fast.value
    assert eu_dispatch(X, regime=Regime.THREE_STRATA).value == fast.value


def test_supplied_values_are_used_and_recorded():
    X = D("xyzwvu", [["x", "y", "z"], ["w", "v", "u^2+y^4"]])
    chi = InvariantReport("chi_tilde", -1, Provenance.corpus("table1:E_6+"), "slice")
    res = eu_dispatch(X, supplied=[chi], prefer_supplied=True)
    assert res.value == 0 and res.inputs == (chi,)


def test_missing_input_names_the_invariant():
    X = D("xyzwvu", [["x", "y", "z"], ["w", "v", "u^2+y^4"]])
    with pytest.raises(MissingInput) as info:
        with groebner.resource_limits(max_work=50):
            eu_dispatch(X)
    assert info.value.name == "chi_tilde_slice"


def test_result_validation():
    chi = InvariantReport("chi_tilde", 1, Provenance.supplied(), "slice")
    with pytest.raises(RegimeMismatch):
        EuResult(2, Regime.N_EQUALS_6, [chi], 0, (2, 3, 2), 7)
    with pytest.raises(ValueError):
        EuResult(2, Regime.N_EQUALS_6, [1], 0, (2, 3, 2), 6)
    assert EuResult(2, "NEquals6", [chi], 0, (2, 3, 2), 6).as_dict()["regime"] == "NEquals6"


def test_no_regime():
    # (2,2,2) in C^10: neither smoothable nor within the three-strata bound
    X = D(["a", "b", "c", "d", "e", "f", "g", "h", "i", "j"], [["a", "b"], ["c", "d"]])
    assert applicable_regimes(X) == []
    with pytest.raises(RegimeMismatch):
        eu_dispatch(X, check=False)
