"""Numerical invariants: Milnor and Tjurina numbers, multiplicities, polar
multiplicities and the vanishing Euler characteristic.

Every local quantity is a colength in the local ring at the origin.  Generic
choices (linear forms, smoothing matrices) come from seeded draws; a choice
that turns out not to be generic shows up as an infinite colength and the
computation is repeated with the next seed, at most ``MAX_RETRIES`` times.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import prod
from typing import Sequence

from gmpy2 import mpq

from .eids import (EidsDescriptor, essential_smoothing, is_smooth_at_origin,
                   slice_by)
from .errors import (DimensionMismatch, GenericityExhausted, NonIntegerResult,
                     NonIsolated, NotAGerm, NotICIS, NotSmoothable)
from .groebner import (INFINITE, Ideal, PolyMatrix, colength, colength_at_origin,
                       krull_dimension, minors, minors_list, jacobian, saturate_by)
from .linalg import rank, rref
from .poly import (NEG_DEGREVLEX, LinearForm, Polynomial, VarContext,
                   generic_linear_form, generic_linear_forms,
                   quasihomogeneous_weights, solve_linear_form)

MAX_RETRIES = 8

INVARIANT_NAMES = ("mu", "tau", "m0", "md", "nu", "chi_tilde", "eu")


# ------------------------------------------------------------ provenance

@dataclass(frozen=True)
class Provenance:
    kind: str  # "computed" | "supplied" | "corpus"
    seed: int | None = None
    method: str | None = None
    row: str | None = None

    def __post_init__(self):
        if self.kind not in ("computed", "supplied", "corpus"):
            raise ValueError(f"unknown provenance {self.kind!r}")

    @classmethod
    def computed(cls, seed, method):
        return cls("computed", seed=seed, method=method)

    @classmethod
    def supplied(cls):
        return cls("supplied")

    @classmethod
    def corpus(cls, row):
        return cls("corpus", row=row)

    def as_dict(self):
        out = {"kind": self.kind}
        for key in ("seed", "method", "row"):
            v = getattr(self, key)
            if v is not None:
                out[key] = v
        return out

    def __str__(self):
        if self.kind == "computed":
            return f"computed(seed={self.seed}, {self.method})"
        if self.kind == "corpus":
            return f"corpus({self.row})"
        return "supplied"


@dataclass(frozen=True)
class InvariantReport:
    name: str
    value: int
    provenance: Provenance
    label: str | None = None  # what the value refers to, e.g. "slice"

    def __post_init__(self):
        if isinstance(self.value, float) or self.value is None:
            raise ValueError("invariant values must be finite integers")

    def as_dict(self):
        out = {"name": self.name, "value": int(self.value), "provenance": self.provenance.as_dict()}
        if self.label:
            out["label"] = self.label
        return out


# ------------------------------------------------------------ hypersurfaces

def _require_germ(g: Polynomial):
    if g.constant_term():
        raise NotAGerm("the function does not vanish at the origin")


def jacobian_ideal(g: Polynomial) -> Ideal:
    return Ideal(g.ctx, [g.derivative(i) for i in range(g.ctx.n)])


def milnor_hypersurface(g: Polynomial) -> int:
    """Colength of the Jacobian ideal in the local ring at 0."""
    _require_germ(g)
    c = colength(jacobian_ideal(g))
    if c == INFINITE:
        raise NonIsolated("the singularity is not isolated")
    return c


def tjurina_hypersurface(g: Polynomial) -> int:
    _require_germ(g)
    c = colength(Ideal(g.ctx, [g] + list(jacobian_ideal(g).generators)))
    if c == INFINITE:
        raise NonIsolated("the singularity is not isolated")
    return c


def milnor_orlik_oracle(weights: Sequence) -> int:
    """prod(1/w_i - 1) for weights of a degree-one quasi-homogeneous germ."""
    value = prod((1 / mpq(w) - 1 for w in weights), start=mpq(1))
    if value.denominator != 1 or value < 0:
        raise NonIntegerResult(f"product {value} is not a non-negative integer")
    return int(value)


def milnor_via_weights(g: Polynomial) -> int | None:
    qh = quasihomogeneous_weights(g)
    if qh is None:
        return None
    return milnor_orlik_oracle(qh[0])


# ------------------------------------------------------------ ICIS

@dataclass(frozen=True)
class IcisPresentation:
    ctx: VarContext
    equations: tuple
    codim: int

    def __post_init__(self):
        object.__setattr__(self, "equations", tuple(self.equations))
        if len(self.equations) != self.codim:
            raise NotICIS(f"{len(self.equations)} equations for codimension {self.codim}")
        if any(e.ctx != self.ctx for e in self.equations):
            raise ValueError("equations live in different contexts")


def _slice_equations(ctx, eqs, l: LinearForm):
    i, g, small = solve_linear_form(ctx, l.coefficients)
    return small, [e.substitute(i, g) for e in eqs]


def _check_icis(ctx, eqs):
    k = len(eqs)
    if k > ctx.n:
        raise NotICIS("more equations than variables")
    if any(e.constant_term() for e in eqs):
        raise NotAGerm("an equation does not vanish at the origin")
    if k == 0:
        return
    d = krull_dimension(Ideal(ctx, eqs), NEG_DEGREVLEX)
    if d != ctx.n - k:
        raise NotICIS(f"local dimension {d}, expected {ctx.n - k}")
    if d > 0:
        sing = list(eqs) + list(minors(jacobian(eqs, ctx), k).generators)
        if colength(Ideal(ctx, sing)) == INFINITE:
            raise NotICIS("the singularity is not isolated")


def milnor_icis(X: IcisPresentation, seed: int = 0) -> int:
    """Milnor number of an ICIS by slicing with generic hyperplanes.

    mu(X) + mu(X cap H) is the colength of the equations together with the
    maximal minors of the Jacobian of (equations, linear form of H); the
    recursion ends at a zero-dimensional complete intersection, whose Milnor
    number is its colength minus one.
    """
    eqs = [e for e in X.equations]
    _check_icis(X.ctx, eqs)
    return _milnor_icis(X.ctx, eqs, seed)


def _milnor_icis(ctx, eqs, seed):
    k = len(eqs)
    if k == 0:
        return 0
    if ctx.n == k:
        c = colength(Ideal(ctx, eqs))
        if c == INFINITE:
            raise NotICIS("zero-dimensional slice has infinite colength")
        return c - 1
    for attempt in range(MAX_RETRIES + 1):
        s = seed + attempt
        l = generic_linear_form(ctx, s)
        lp = l.as_poly(ctx)
        aug = minors(jacobian(list(eqs) + [lp], ctx), k + 1)
        total = colength(Ideal(ctx, list(eqs) + list(aug.generators)))
        if total == INFINITE:
            continue
        small, sliced = _slice_equations(ctx, eqs, l)
        try:
            lower = _milnor_icis(small, sliced, s)
        except (NotICIS, GenericityExhausted):
            continue
        return total - lower
    raise GenericityExhausted(f"no generic hyperplane among seeds {seed}..{seed + MAX_RETRIES}")


# ------------------------------------------------------------ multiplicities

def multiplicity_m0(I: Ideal, d: int, seed: int = 0) -> int:
    """Colength of I plus d generic linear forms (the multiplicity for
    Cohen-Macaulay germs such as determinantal ones)."""
    ctx = I.ctx
    if d < 0 or d > ctx.n:
        raise DimensionMismatch(f"dimension {d} impossible in {ctx.n} variables")
    for attempt in range(MAX_RETRIES + 1):
        s = seed + attempt
        forms = [f.as_poly(ctx) for f in generic_linear_forms(ctx, s, d)] if d else []
        c = colength(Ideal(ctx, list(I.generators) + forms))
        if c == INFINITE:
            continue
        if c == 0:
            raise NotAGerm("the origin is not on the variety")
        if d and colength(Ideal(ctx, list(I.generators) + forms[:-1])) != INFINITE:
            raise DimensionMismatch(f"the germ has dimension below {d}")
        return c
    raise DimensionMismatch(f"colength stays infinite with {d} generic forms")


def _absorbing_shift(X: EidsDescriptor, C) -> list:
    """A vector v with L(v) = C at as many linear entries L of F as possible.

    The translation x -> x - s*v is an automorphism of the germ of (x, s)
    space over the s-line, and it moves the deformation out of those entries;
    the polar ideal stays the same up to this automorphism but gets far
    sparser.
    """
    rows, rhs = [], []
    for r in range(X.m):
        for c in range(X.n):
            e = X.F[r, c]
            if not e or any(sum(m) != 1 for m in e.terms):
                continue
            lin = e.linear_part()
            if rank(rows + [lin]) > len(rows):
                rows.append(lin)
                rhs.append(C[r][c])
    v = [mpq(0)] * X.N
    if not rows:
        return v
    red, pivots = rref([row + [b] for row, b in zip(rows, rhs)])
    for row, j in zip(red, pivots):
        v[j] = row[-1]
    return v


def polar_ideal(X: EidsDescriptor, p: LinearForm, seed: int, local: bool = False):
    """Relative polar curve of the seeded smoothing F + s*C with respect to p.

    Returns (ideal in variables (x, s) saturated by s, C, s), written in the
    coordinates x - s*v of ``_absorbing_shift``.  Saturation commutes with
    localization, so the global saturation is also right at the origin;
    ``local=True`` saturates in the local ring instead.
    """
    _, C, sname = essential_smoothing(X, seed)
    big = X.ctx.extend(sname)
    n = X.N
    s = Polynomial.variable(big, sname)
    v = _absorbing_shift(X, C)
    images = [Polynomial.variable(big, name) - s * v[i] for i, name in enumerate(X.ctx.names)]
    Ft = PolyMatrix([[X.F[r, c].linear_change(images) + s * C[r][c] for c in range(X.n)]
                     for r in range(X.m)], big)
    mins = [g for g in minors_list(Ft, X.t) if g]
    rows = [[g.derivative(i) for i in range(n)] for g in mins]
    rows.append([Polynomial.constant(big, c) for c in p.coefficients])
    c = X.codim_expected
    crit = minors(PolyMatrix(rows, big), c + 1).generators if c + 1 <= min(len(rows), n) else ()
    J = Ideal(big, mins + list(crit))
    return saturate_by(J, s, local=local), C, s


def polar_multiplicity_md(X: EidsDescriptor, p: LinearForm | None = None, seed: int = 0) -> int:
    """Number of critical points of p on the smoothing fibre that tend to 0.

    The polar curve is saturated by the family parameter s, so s is a
    non-zero-divisor on it and the colength of (polar curve, s) at the origin
    counts the critical points on a nearby fibre with multiplicity.
    """
    _require_smoothable(X)
    if p is None:
        p = generic_linear_form(X.ctx, seed)
    if len(p.coefficients) != X.N:
        raise ValueError("linear form size does not match the descriptor")
    if X.dim_expected == 0:
        return 0
    if is_smooth_at_origin(X):
        return 0
    for attempt in range(MAX_RETRIES + 1):
        s = seed + attempt
        P, _, svar = polar_ideal(X, p, s)
        val = colength_at_origin(Ideal(P.ctx, list(P.generators) + [svar]))
        if val != INFINITE:
            return val
    raise GenericityExhausted("no smoothing gave a finite polar colength")


def _require_smoothable(X: EidsDescriptor):
    if not X.contains_origin():
        raise NotAGerm("the origin is not a point of X")
    if not X.is_smoothable_range:
        raise NotSmoothable(f"N={X.N} is not below {X.ids_bound}")


@dataclass
class NuTrace:
    """The terms of the slicing recursion, top dimension first."""
    md: list = field(default_factory=list)
    m0: int | None = None
    seed: int | None = None


def nu_vanishing(X: EidsDescriptor, seed: int = 0, trace: NuTrace | None = None) -> int:
    """Vanishing Euler characteristic by nu(X) = m_d(X, p) - nu(X cap {p=0})."""
    _require_smoothable(X)
    d = X.dim_expected
    if d == 0:
        m0 = multiplicity_m0(X.ideal, 0, seed)
        if trace is not None:
            trace.m0 = m0
        return m0 - 1
    if is_smooth_at_origin(X):
        return 0
    last = None
    for attempt in range(MAX_RETRIES + 1):
        s = seed + attempt
        p = generic_linear_form(X.ctx, s)
        sub = NuTrace() if trace is not None else None
        try:
            md = polar_multiplicity_md(X, p, s)
            lower = nu_vanishing(slice_by(X, p), s, sub)
        except (GenericityExhausted, DimensionMismatch, NotAGerm) as exc:
            last = exc
            continue
        if trace is not None:
            trace.md = [md] + sub.md
            trace.m0 = sub.m0
            trace.seed = s
        return md - lower
    raise GenericityExhausted(f"slicing recursion failed for all seeds: {last}")


def milnor_determinantal(X: EidsDescriptor, seed: int = 0) -> int:
    """Milnor number (first or second Betti number of the smoothing) of a
    smoothable curve or surface; it coincides with nu in those dimensions."""
    if X.dim_expected not in (1, 2):
        raise DimensionMismatch("the Milnor number is defined here for curves and surfaces")
    return nu_vanishing(X, seed)
