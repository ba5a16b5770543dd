"""Local Euler obstruction at the origin of a determinantal germ.

The value is assembled from Euler characteristics of generic slices: the
complex links of the rank strata of the generic determinantal variety, the
vanishing Euler characteristic and polar multiplicity of a smoothing, and
Milnor numbers of the sliced singular set.  Each computation regime has its
own route; :func:`eu_dispatch` picks the first one that applies.

Inputs that cannot be computed within the active resource limits may be
supplied by the caller as :class:`InvariantReport` objects; they are then
recorded with their provenance in the result.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from math import comb
from typing import Sequence

from .eids import (EidsDescriptor, check_determinantal, corank_at_origin,
                   corank_one_form, icis_test, is_smooth_at_origin,
                   local_dimension, singular_set, slice_by)
from .errors import (DimensionMismatch, MissingInput, NotAGerm, NotICIS,
                     OutOfRange, RegimeMismatch, ResourceLimit)
from .invariants import (IcisPresentation, InvariantReport, NuTrace,
                         Provenance, milnor_hypersurface, milnor_icis,
                         nu_vanishing)
from .poly import generic_linear_form


class Regime(str, Enum):
    SMOOTHABLE = "Smoothable"
    N_EQUALS_6 = "NEquals6"
    N_GE_7 = "NGe7Type232"
    CORANK1 = "Corank1FastPath"
    THREE_STRATA = "GeneralThreeStrata"

    def __str__(self):
        return self.value


# ------------------------------------------------------------ links

def chi_bar_generic_link(m: int, n: int, t: int) -> int:
    """Reduced Euler characteristic of the complex link of the rank < t
    matrices at the origin of M_{m,n}; needs 1 <= t <= m <= n."""
    if not 1 <= t <= m <= n:
        raise OutOfRange(f"need 1 <= t <= m <= n, got (m, n, t) = ({m}, {n}, {t})")
    return (-1) ** t * comb(m - 1, t - 1)


def complex_link_chi(X: EidsDescriptor, i: int) -> int:
    """Euler characteristic of the complex link of the stratum of points of
    rank i - 1 in X.  Its normal section is the generic determinantal
    variety of type (m - i + 1, n - i + 1, t - i + 1)."""
    if not 1 <= i <= X.t - 1:
        raise OutOfRange(f"stratum index {i} outside 1..{X.t - 1}")
    a, b = X.m - i + 1, X.n - i + 1
    return 1 + chi_bar_generic_link(min(a, b), max(a, b), X.t - i + 1)


@dataclass(frozen=True)
class StratumDatum:
    """One term of the slice formula: chi of the stratum inside a generic
    nearby hyperplane slice of a small ball, and the obstruction along it."""
    index: int
    chi_slice: int
    eu_on_stratum: int
    regular: bool = False
    chi_provenance: Provenance | None = None
    eu_provenance: Provenance | None = None

    def __post_init__(self):
        if self.regular and self.eu_on_stratum != 1:
            raise ValueError("the obstruction is 1 along the regular part")


def lefschetz_combine(strata: Sequence[StratumDatum]) -> int:
    total = 0
    for s in strata:
        if s.index == 0 and s.chi_slice != 0:
            raise ValueError("the origin stratum misses every nearby slice")
        total += s.chi_slice * s.eu_on_stratum
    return total


# ------------------------------------------------------------ closed forms

def eu_smoothable(d: int, nu: int, md: int) -> int:
    return 1 + (-1) ** d * nu + (-1) ** (d + 1) * md


def eu_n_equals_6(chi_tilde_slice: int) -> int:
    return chi_tilde_slice + 1


def eu_n_ge_7(N: int, mu_sigma_slice: int, chi_tilde_slice: int) -> int:
    if N < 7:
        raise RegimeMismatch(f"N = {N} is below 7")
    if mu_sigma_slice < 0:
        raise ValueError("Milnor numbers are non-negative")
    return (-1) ** (N - 7) * mu_sigma_slice + chi_tilde_slice + 2


def chi_tilde_corank1(N: int, mu_g: int) -> int:
    """chi-tilde of a generic corank-1 germ in C^N with residual function g."""
    if N < 6:
        raise RegimeMismatch(f"N = {N} is below 6")
    return (-1) ** (N - 1) * mu_g


def sigma_slice_chi(sigma_slice_dim: int | None, mu_sigma_slice: int) -> int:
    """chi of the singular set in a nearby generic slice; 0 when the singular
    set is at most the origin (the slice then misses it)."""
    if sigma_slice_dim is None or sigma_slice_dim < 0:
        return 0
    return 1 + (-1) ** sigma_slice_dim * mu_sigma_slice


def eu_three_strata(sigma_slice_dim: int | None, mu_sigma_slice: int,
                    chi_link: int, chi_tilde_slice: int) -> int:
    """Closed form for at most three strata with an ICIS singular set;
    ``sigma_slice_dim`` is None when the singular set is at most the origin."""
    return sigma_slice_chi(sigma_slice_dim, mu_sigma_slice) * (chi_link - 1) + chi_tilde_slice + 1


def three_strata_data(sigma_slice_dim: int | None, mu_sigma_slice: int,
                      chi_link: int, chi_tilde_slice: int) -> list:
    """The same data as a list of strata for :func:`lefschetz_combine`."""
    chi_sigma = sigma_slice_chi(sigma_slice_dim, mu_sigma_slice)
    chi_x = chi_tilde_slice + 1
    return [StratumDatum(0, 0, 0),
            StratumDatum(1, chi_sigma, chi_link),
            StratumDatum(2, chi_x - chi_sigma, 1, regular=True)]


# ------------------------------------------------------------ results

def _regime_applies(regime: Regime, type_: tuple, N: int) -> bool:
    m, n, t = type_
    if regime is Regime.SMOOTHABLE:
        return N < (m - t + 2) * (n - t + 2) and N - (m - t + 1) * (n - t + 1) >= 1
    if regime is Regime.N_EQUALS_6:
        return type_ == (2, 3, 2) and N == 6
    if regime in (Regime.N_GE_7, Regime.CORANK1):
        return type_ == (2, 3, 2) and N >= 7
    return t >= 2 and N <= (m - t + 3) * (n - t + 3)


@dataclass(frozen=True)
class EuResult:
    value: int
    regime: Regime
    inputs: tuple
    seed: int
    type: tuple
    N: int

    def __post_init__(self):
        object.__setattr__(self, "regime", Regime(self.regime))
        object.__setattr__(self, "inputs", tuple(self.inputs))
        if not isinstance(self.value, int) or isinstance(self.value, bool):
            raise ValueError("the obstruction is an integer")
        for rep in self.inputs:
            if not isinstance(rep, InvariantReport):
                raise ValueError("every input must carry its provenance")
        if not _regime_applies(self.regime, self.type, self.N):
            raise RegimeMismatch(f"{self.regime} does not apply to type {self.type} in C^{self.N}")

    def as_dict(self):
        return {"eu": self.value, "regime": str(self.regime), "seed": self.seed,
                "inputs": [r.as_dict() for r in self.inputs]}


def _result(X, value, regime, inputs, seed):
    return EuResult(int(value), regime, inputs, seed, X.type, X.N)


# ------------------------------------------------------------ supplied values

def _key(name: str, label: str | None) -> str:
    return f"{name}_{label}" if label else name


def _lookup(supplied, name, label):
    for rep in supplied or ():
        if rep.name == name and rep.label == label:
            return rep
    return None


def _obtain(name, label, compute, supplied, hint, prefer_supplied=False):
    """Compute an input, falling back on a supplied report."""
    rep = _lookup(supplied, name, label)
    if rep is not None and prefer_supplied:
        return rep
    if compute is None:
        if rep is None:
            raise MissingInput(_key(name, label), hint)
        return rep
    try:
        return compute()
    except ResourceLimit as exc:
        if rep is None:
            raise MissingInput(_key(name, label), f"{hint} ({exc})") from exc
        return rep


def _computed(name, value, seed, method, label=None):
    return InvariantReport(name, int(value), Provenance.computed(seed, method), label)


_CHI_HINT = "supply it in the document's 'supplied' field; the corpus rows carry it"


# ------------------------------------------------------------ building blocks

def _smooth_inputs(seed, names):
    return [_computed(name, 0, seed, "smooth point", label) for name, label in names]


def chi_tilde_of_slice(X: EidsDescriptor, seed: int = 0) -> InvariantReport:
    """chi-tilde of X cap {l = 0} for a generic l.

    A smoothable slice gives (-1)^dim times its vanishing Euler
    characteristic; a corank-1 (2,3,2) slice in C^6 or more gives the
    residual formula.  Anything else raises :class:`MissingInput`.
    """
    l = generic_linear_form(X.ctx, seed)
    Y = slice_by(X, l)
    if Y.is_smoothable_range and Y.dim_expected >= 0:
        nu = nu_vanishing(Y, seed)
        return _computed("chi_tilde", (-1) ** Y.dim_expected * nu, seed,
                         "slice smoothing: (-1)^dim nu", "slice")
    if Y.type == (2, 3, 2) and Y.N >= 6 and Y.rank_at_origin == 0 and corank_at_origin(Y) == 1:
        form = corank_one_form(Y)
        if form.residual is not None:
            mu = milnor_hypersurface(form.residual)
            return _computed("chi_tilde", chi_tilde_corank1(Y.N, mu), seed,
                             "corank-1 residual: (-1)^(N-1) mu(g)", "slice")
    raise MissingInput("chi_tilde_slice", _CHI_HINT)


def sigma_slice_milnor(X: EidsDescriptor, seed: int = 0):
    """(dimension of the sliced singular set or None, its Milnor number).

    The singular set must be an ICIS; it is cut by the seeded generic
    hyperplane and its Milnor number computed by the ICIS recursion.
    """
    sigma = singular_set(X)
    d = local_dimension(sigma)
    if d is None or d == 0:
        return None, 0
    l = generic_linear_form(X.ctx, seed)
    Y = slice_by(X, l)
    ok, gens = icis_test(singular_set(Y))
    if not ok:
        raise NotICIS("the sliced singular set is not an ICIS")
    if len(gens) != X.codim_of(X.t - 1):
        raise NotICIS(f"{len(gens)} generators for codimension {X.codim_of(X.t - 1)}")
    mu = milnor_icis(IcisPresentation(Y.ctx, gens, len(gens)), seed)
    return d - 1, mu


def corank1_residual_milnor(X: EidsDescriptor, seed: int = 0) -> int:
    """mu of the residual function of the generic hyperplane slice of a
    corank-1 (2,3,2) germ, i.e. the residual g restricted to a generic
    hyperplane of its own variables."""
    Y = slice_by(X, generic_linear_form(X.ctx, seed))
    form = corank_one_form(Y)
    if form.residual is None:
        raise RegimeMismatch("the corank-1 normal form needs five linear entries")
    return milnor_hypersurface(form.residual)


# ------------------------------------------------------------ routes

def _require_germ(X):
    if not X.contains_origin():
        raise NotAGerm("the origin is not a point of X")


def eu_route_smoothable(X: EidsDescriptor, seed: int = 0, supplied=None) -> EuResult:
    if not _regime_applies(Regime.SMOOTHABLE, X.type, X.N):
        raise RegimeMismatch(f"type {X.type} in C^{X.N} is not a smoothable germ of positive dimension")
    _require_germ(X)
    d = X.dim_expected
    if is_smooth_at_origin(X):
        inputs = _smooth_inputs(seed, [("nu", None), ("md", None)])
        return _result(X, eu_smoothable(d, 0, 0), Regime.SMOOTHABLE, inputs, seed)
    trace = NuTrace()

    def nu():
        return _computed("nu", nu_vanishing(X, seed, trace), seed, "slicing recursion")

    nu_rep = _obtain("nu", None, nu, supplied, _CHI_HINT)
    if nu_rep.provenance.kind == "computed":
        md_rep = _computed("md", trace.md[0], trace.seed, "polar curve colength")
    else:
        md_rep = _obtain("md", None, None, supplied, "m_d is computed together with nu")
    value = eu_smoothable(d, nu_rep.value, md_rep.value)
    return _result(X, value, Regime.SMOOTHABLE, [nu_rep, md_rep], seed)


def eu_route_n6(X: EidsDescriptor, seed: int = 0, supplied=None, prefer_supplied=False) -> EuResult:
    if not _regime_applies(Regime.N_EQUALS_6, X.type, X.N):
        raise RegimeMismatch(f"type {X.type} in C^{X.N} is not (2,3,2) in C^6")
    _require_germ(X)
    if is_smooth_at_origin(X):
        inputs = _smooth_inputs(seed, [("chi_tilde", "slice")])
        return _result(X, eu_n_equals_6(0), Regime.N_EQUALS_6, inputs, seed)
    chi = _obtain("chi_tilde", "slice", lambda: chi_tilde_of_slice(X, seed), supplied,
                  _CHI_HINT, prefer_supplied)
    return _result(X, eu_n_equals_6(chi.value), Regime.N_EQUALS_6, [chi], seed)


def eu_route_n_ge_7(X: EidsDescriptor, seed: int = 0, supplied=None, prefer_supplied=False) -> EuResult:
    if not _regime_applies(Regime.N_GE_7, X.type, X.N):
        raise RegimeMismatch(f"type {X.type} in C^{X.N} is not (2,3,2) with N >= 7")
    _require_germ(X)
    if is_smooth_at_origin(X):
        inputs = _smooth_inputs(seed, [("mu", "sigma_slice"), ("chi_tilde", "slice")])
        return _result(X, eu_three_strata(None, 0, 2, 0), Regime.N_GE_7, inputs, seed)

    def mu():
        dim, value = sigma_slice_milnor(X, seed)
        if dim is None:
            raise DimensionMismatch("the singular set of a non-smooth (2,3,2) germ with N >= 7 is not a point")
        return _computed("mu", value, seed, "ICIS recursion on the sliced singular set", "sigma_slice")

    mu_rep = _obtain("mu", "sigma_slice", mu, supplied, "Milnor number of the sliced singular set",
                     prefer_supplied)
    chi = _obtain("chi_tilde", "slice", lambda: chi_tilde_of_slice(X, seed), supplied,
                  _CHI_HINT, prefer_supplied)
    value = eu_n_ge_7(X.N, mu_rep.value, chi.value)
    return _result(X, value, Regime.N_GE_7, [mu_rep, chi], seed)


def _corank1_applies(X: EidsDescriptor) -> bool:
    return (_regime_applies(Regime.CORANK1, X.type, X.N) and X.rank_at_origin == 0
            and corank_at_origin(X) == 1)


def eu_corank1_fastpath(X: EidsDescriptor, seed: int = 0) -> int:
    return eu_route_corank1(X, seed).value


def eu_route_corank1(X: EidsDescriptor, seed: int = 0) -> EuResult:
    """Corank 1: the sliced singular set and the residual of the slice have
    the same Milnor number, and the two terms cancel."""
    if not _regime_applies(Regime.CORANK1, X.type, X.N):
        raise RegimeMismatch(f"type {X.type} in C^{X.N} is not (2,3,2) with N >= 7")
    _require_germ(X)
    if is_smooth_at_origin(X):
        inputs = _smooth_inputs(seed, [("mu", "sigma_slice"), ("chi_tilde", "slice")])
        return _result(X, eu_three_strata(None, 0, 2, 0), Regime.CORANK1, inputs, seed)
    if not _corank1_applies(X):
        raise RegimeMismatch("the fast path needs F(0) = 0 and corank 1")
    mu_g = corank1_residual_milnor(X, seed)
    chi = chi_tilde_corank1(X.N - 1, mu_g)
    value = eu_n_ge_7(X.N, mu_g, chi)
    if value != 2:
        raise AssertionError(f"corank-1 terms failed to cancel: {value}")
    inputs = [_computed("mu", mu_g, seed, "residual of the sliced normal form", "g_tilde"),
              _computed("mu", mu_g, seed, "equal to mu(g~) in corank 1", "sigma_slice"),
              _computed("chi_tilde", chi, seed, "(-1)^(N-2) mu(g~)", "slice")]
    return _result(X, value, Regime.CORANK1, inputs, seed)


def eu_route_three_strata(X: EidsDescriptor, seed: int = 0, supplied=None,
                          prefer_supplied=False) -> EuResult:
    if not _regime_applies(Regime.THREE_STRATA, X.type, X.N):
        raise RegimeMismatch(f"type {X.type} in C^{X.N} may have more than three strata")
    _require_germ(X)
    if is_smooth_at_origin(X):
        inputs = _smooth_inputs(seed, [("mu", "sigma_slice"), ("chi_tilde", "slice")])
        return _result(X, eu_three_strata(None, 0, 1, 0), Regime.THREE_STRATA, inputs, seed)
    dim, mu = sigma_slice_milnor(X, seed)
    mu_rep = _computed("mu", mu, seed, "ICIS recursion on the sliced singular set"
                       if dim is not None else "singular set is the origin", "sigma_slice")
    chi_link = complex_link_chi(X, X.t - 1)
    link_rep = InvariantReport("chi_link", chi_link, Provenance.computed(seed, "generic link binomial"), "V1")
    chi = _obtain("chi_tilde", "slice", lambda: chi_tilde_of_slice(X, seed), supplied,
                  _CHI_HINT, prefer_supplied)
    value = eu_three_strata(dim, mu, chi_link, chi.value)
    return _result(X, value, Regime.THREE_STRATA, [mu_rep, link_rep, chi], seed)


ROUTES = {
    Regime.CORANK1: lambda X, seed, supplied, prefer: eu_route_corank1(X, seed),
    Regime.SMOOTHABLE: lambda X, seed, supplied, prefer: eu_route_smoothable(X, seed, supplied),
    Regime.N_EQUALS_6: eu_route_n6,
    Regime.N_GE_7: eu_route_n_ge_7,
    Regime.THREE_STRATA: eu_route_three_strata,
}


def applicable_regimes(X: EidsDescriptor) -> list:
    """Regimes whose preconditions hold, in dispatch order."""
    out = []
    if _corank1_applies(X):
        out.append(Regime.CORANK1)
    for regime in (Regime.SMOOTHABLE, Regime.N_EQUALS_6, Regime.N_GE_7, Regime.THREE_STRATA):
        if _regime_applies(regime, X.type, X.N):
            out.append(regime)
    return out


def eu_dispatch(X: EidsDescriptor, seed: int = 0, supplied: Sequence[InvariantReport] | None = None,
                *, regime: Regime | str | None = None, prefer_supplied: bool = False,
                check: bool = True) -> EuResult:
    """Euler obstruction at the origin by the first applicable regime.

    ``regime`` forces a particular route.  Supplied reports are used when a
    computation exceeds the resource limits, or right away with
    ``prefer_supplied``.
    """
    if check:
        report = check_determinantal(X, sigma=False)
        if not report.contains_origin:
            raise NotAGerm("the origin is not a point of X")
        if not report.is_determinantal:
            raise DimensionMismatch(
                f"codimension {report.codim_actual} differs from the expected {report.codim_expected}")
    if regime is not None:
        return ROUTES[Regime(regime)](X, seed, supplied, prefer_supplied)
    candidates = applicable_regimes(X)
    if not candidates:
        raise RegimeMismatch(f"no formula covers type {X.type} in C^{X.N}")
    for r in candidates:
        try:
            return ROUTES[r](X, seed, supplied, prefer_supplied)
        except RegimeMismatch:
            if r is Regime.CORANK1:
                continue
            raise
    raise RegimeMismatch(f"no formula covers type {X.type} in C^{X.N}")
