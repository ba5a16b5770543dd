"""Determinantal descriptors: type checks, strata, corank, slicing, smoothings.

A descriptor is a polynomial matrix ``F`` on C^N with a rank bound ``t``;
the variety is X = {x : rank F(x) < t}, cut out by the t-minors of F.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping, Sequence

from gmpy2 import mpq

from .errors import (DetsingError, IdealIsUnit, NotAGerm, OutOfRange,
                     PolySyntaxError, ResourceLimit)
from .groebner import (INFINITE, Ideal, PolyMatrix, colength, contains,
                       jacobian, krull_dimension, minors,
                       saturate_by)
from .linalg import rank, rref
from .poly import (NEG_DEGREVLEX, LinearForm, Polynomial, VarContext,
                   draw_generic, parse_poly, seeded_rng, solve_linear_form)


@dataclass(frozen=True, eq=False)
class EidsDescriptor:
    ctx: VarContext
    F: PolyMatrix
    t: int

    def __post_init__(self):
        if self.F.ctx != self.ctx:
            raise ValueError("matrix lives in a different context")
        if self.F.rows == 0 or self.F.cols == 0:
            raise ValueError("empty matrix")
        if not 1 <= self.t <= min(self.F.rows, self.F.cols):
            raise OutOfRange(f"rank bound t={self.t} outside 1..{min(self.F.rows, self.F.cols)}")

    @classmethod
    def from_strings(cls, names: Sequence[str], rows: Sequence[Sequence[str]], t: int,
                     params: Mapping[str, int] | None = None) -> "EidsDescriptor":
        ctx = VarContext(names)
        entries = []
        for r, row in enumerate(rows):
            parsed = []
            for c, src in enumerate(row):
                try:
                    parsed.append(parse_poly(src, ctx, params))
                except PolySyntaxError as exc:
                    err = type(exc)(f"matrix entry ({r + 1},{c + 1}) {src!r}: {exc}", None, src)
                    err.position = exc.position
                    raise err from exc
            entries.append(parsed)
        return cls(ctx, PolyMatrix(entries, ctx), int(t))

    @classmethod
    def from_document(cls, doc: Mapping) -> "EidsDescriptor":
        for key in ("vars", "matrix", "t"):
            if key not in doc:
                raise ValueError(f"input document lacks field {key!r}")
        return cls.from_strings(doc["vars"], doc["matrix"], doc["t"], doc.get("params"))

    def __repr__(self):
        return f"EidsDescriptor(vars={self.ctx.names}, F={self.F!r}, t={self.t})"

    @property
    def m(self) -> int:
        return self.F.rows

    @property
    def n(self) -> int:
        return self.F.cols

    @property
    def N(self) -> int:
        return self.ctx.n

    @property
    def type(self) -> tuple:
        return (self.m, self.n, self.t)

    def codim_of(self, i: int) -> int:
        """Expected codimension of the locus rank F < i."""
        return (self.m - i + 1) * (self.n - i + 1)

    @property
    def codim_expected(self) -> int:
        return self.codim_of(self.t)

    @property
    def dim_expected(self) -> int:
        return self.N - self.codim_expected

    @property
    def ids_bound(self) -> int:
        return (self.m - self.t + 2) * (self.n - self.t + 2)

    @property
    def is_ids_range(self) -> bool:
        return self.N <= self.ids_bound

    @property
    def is_smoothable_range(self) -> bool:
        return self.N < self.ids_bound

    @property
    def three_strata_range(self) -> bool:
        return self.N <= (self.m - self.t + 3) * (self.n - self.t + 3)

    @cached_property
    def ideal(self) -> Ideal:
        return minors(self.F, self.t)

    def minors_ideal(self, i: int) -> Ideal:
        """Ideal of rank F < i; the unit ideal for i = 0."""
        if i == 0:
            return Ideal(self.ctx, [Polynomial.constant(self.ctx, 1)])
        return minors(self.F, i)

    @cached_property
    def rank_at_origin(self) -> int:
        return rank([[e for e in row] for row in self.F.evaluate([0] * self.N)])

    def contains_origin(self) -> bool:
        return self.rank_at_origin < self.t

    def with_matrix(self, F: PolyMatrix) -> "EidsDescriptor":
        return EidsDescriptor(F.ctx, F, self.t)


@dataclass
class Stratum:
    index: int
    ideal: Ideal
    expected_codim: int
    dimension: int | None  # local dimension at 0; None when the germ is empty
    empty: bool


@dataclass
class StratificationReport:
    strata: list

    def dimensions(self):
        return [s.dimension for s in self.strata]


@dataclass
class TypeCheckReport:
    type: tuple
    N: int
    contains_origin: bool
    is_determinantal: bool
    codim_expected: int
    codim_actual: int | None
    is_ids: bool
    is_smoothable: bool
    corank: int
    three_strata_ok: bool
    sigma_is_icis: bool | None = None
    essentially_isolated: bool | None = None
    notes: list = field(default_factory=list)

    @property
    def dimension(self):
        return None if self.codim_actual is None else self.N - self.codim_actual


def local_dimension(I: Ideal) -> int | None:
    """Dimension of the germ of V(I) at 0; None if the germ is empty."""
    try:
        return krull_dimension(I, NEG_DEGREVLEX)
    except IdealIsUnit:
        return None


def check_determinantal(X: EidsDescriptor, *, sigma: bool = True,
                        isolation: bool = False) -> TypeCheckReport:
    """Codimension test for the germ at the origin plus the range predicates.

    ``sigma`` also runs the singular-set ICIS test when t >= 2; ``isolation``
    runs the (expensive) transversality test of :func:`essential_isolation`.
    """
    report = TypeCheckReport(
        type=X.type, N=X.N, contains_origin=X.contains_origin(),
        is_determinantal=False, codim_expected=X.codim_expected, codim_actual=None,
        is_ids=X.is_ids_range, is_smoothable=X.is_smoothable_range,
        corank=corank_at_origin(X), three_strata_ok=X.three_strata_range)
    if not report.contains_origin:
        report.notes.append(f"rank F(0) = {X.rank_at_origin} >= t: the origin is not on X")
        report.is_ids = report.is_smoothable = False
        return report
    d = local_dimension(X.ideal)
    report.codim_actual = X.N - d
    report.is_determinantal = report.codim_actual == X.codim_expected
    if not report.is_determinantal:
        report.is_ids = report.is_smoothable = False
        return report
    if sigma and X.t >= 2:
        try:
            report.sigma_is_icis = verify_sigma_icis(X)
        except ResourceLimit as exc:
            report.notes.append(f"singular-set test skipped: {exc}")
    if isolation:
        try:
            report.essentially_isolated = essential_isolation(X)
        except ResourceLimit as exc:
            report.notes.append(f"isolation test skipped: {exc}")
    return report


def corank_at_origin(X: EidsDescriptor) -> int:
    """m*n minus the rank of the linear parts of the entries."""
    lin = [e.linear_part() for e in X.F.flat()]
    return X.m * X.n - rank(lin)


def singular_set(X: EidsDescriptor) -> Ideal:
    """Ideal of rank F < t-1; the unit ideal when t = 1."""
    return X.minors_ideal(X.t - 1)


def is_smooth_at_origin(X: EidsDescriptor) -> bool:
    """X is smooth at 0 iff the minors have a Jacobian of rank codim there."""
    if not X.contains_origin():
        raise NotAGerm("the origin is not a point of X")
    gens = [g for g in X.ideal.generators]
    if not gens:
        return True
    J = jacobian(gens, X.ctx).evaluate([0] * X.N)
    return rank(J) == X.codim_expected


def minimal_generators(I: Ideal) -> list:
    """Irredundant generators of the ideal in the local ring at 0.

    In a local ring an irredundant generating set is minimal, so the length
    of the result is the minimal number of generators.
    """
    gens = []
    seen = set()
    for g in I.generators:
        key = frozenset(g.terms.items())
        if key not in seen:
            seen.add(key)
            gens.append(g)
    i = len(gens) - 1
    while i >= 0 and len(gens) > 1:
        rest = gens[:i] + gens[i + 1:]
        if contains(Ideal(I.ctx, rest), Ideal(I.ctx, [gens[i]]), NEG_DEGREVLEX):
            gens = rest
        i -= 1
    return gens


def icis_test(I: Ideal):
    """(is_icis, minimal generators) for the germ of V(I) at 0."""
    gens = minimal_generators(I)
    if not gens:
        return True, gens
    if any(g.constant_term() for g in gens):
        return False, gens
    k = len(gens)
    ctx = I.ctx
    d = local_dimension(I)
    if d is None or d != ctx.n - k:
        return False, gens
    if d == 0:
        return True, gens
    sing = Ideal(ctx, list(gens) + list(minors(jacobian(gens, ctx), k).generators))
    return colength(sing) != INFINITE, gens


def verify_sigma_icis(X: EidsDescriptor) -> bool:
    if X.t < 2:
        raise OutOfRange("the singular set needs t >= 2")
    ok, _ = icis_test(singular_set(X))
    return ok


def essential_isolation(X: EidsDescriptor) -> bool:
    """Transversality of F to every rank stratum away from the origin.

    For each i <= t the points of {rank F < i} minus {rank F < i-1} where the
    i-minors have Jacobian rank below the expected codimension must form at
    most the origin.  The removal of {rank F < i-1} is done by saturating
    with each (i-1)-minor in turn.
    """
    for i in range(1, X.t + 1):
        I = X.minors_ideal(i)
        c = X.codim_of(i)
        gens = list(I.generators)
        if c > min(len(gens), X.N):
            # the stratum must then be empty near 0 apart from the origin
            if local_dimension(I) not in (None, 0):
                return False
            continue
        bad = Ideal(X.ctx, gens + list(minors(jacobian(gens, X.ctx), c).generators))
        deltas = list(X.minors_ideal(i - 1).generators) if i > 1 else []
        if not deltas:
            if colength(bad) == INFINITE:
                return False
            continue
        for delta in deltas:
            if delta.constant_term():
                continue
            if colength(saturate_by(bad, delta)) == INFINITE:
                return False
    return True


def stratification(X: EidsDescriptor) -> StratificationReport:
    strata = []
    for i in range(X.t, 0, -1):
        I = X.minors_ideal(i)
        d = local_dimension(I)
        strata.append(Stratum(i, I, X.codim_of(i), d, d is None))
    return StratificationReport(strata)


def slice_by(X: EidsDescriptor, l: LinearForm) -> EidsDescriptor:
    """X intersected with {l = 0}, as a descriptor in one fewer variable."""
    if len(l.coefficients) != X.N:
        raise ValueError("linear form size does not match the descriptor")
    if X.N == 1:
        raise OutOfRange("cannot slice a germ in one variable")
    i, g, small = solve_linear_form(X.ctx, l.coefficients)
    F = PolyMatrix([[e.substitute(i, g) for e in row] for row in X.F.entries], small)
    return EidsDescriptor(small, F, X.t)


def smoothing_matrix(X: EidsDescriptor, seed: int) -> list:
    """Seeded constant m x n matrix C from the prime pool."""
    rng = seeded_rng(seed, f"smoothing:{X.m}x{X.n}")
    vals = draw_generic(rng, X.m * X.n)
    return [vals[r * X.n:(r + 1) * X.n] for r in range(X.m)]


def essential_smoothing(X: EidsDescriptor, seed: int = 0, C=None):
    """F + s*C in variables (x, s); returns (matrix, C, name of s)."""
    sname = X.ctx.fresh_name("s")
    big = X.ctx.extend(sname)
    if C is None:
        C = smoothing_matrix(X, seed)
    s = Polynomial.variable(big, sname)
    rows = []
    for r in range(X.m):
        rows.append([X.F[r, c].embed(big) + s * C[r][c] for c in range(X.n)])
    return PolyMatrix(rows, big), C, sname


# ------------------------------------------------------------ corank one

@dataclass
class CorankOneForm:
    """A corank-1 (2,3,2) germ written as five coordinates plus a residue.

    ``residual`` is the combination of entries with no linear part, restricted
    to the common zero set of five entries with independent linear parts.
    It is only available when those five entries are linear.
    """
    pivots: tuple
    relation: tuple
    residual: Polynomial | None
    solved: dict


def corank_one_form(X: EidsDescriptor) -> CorankOneForm:
    if corank_at_origin(X) != 1:
        raise DetsingError("the matrix does not have corank 1")
    entries = X.F.flat()
    lin = [e.linear_part() for e in entries]
    # kernel of the transpose: the unique relation among the linear parts
    relation = _left_kernel_vector(lin)
    # five entries with independent linear parts
    basis = []
    for k in range(len(entries)):
        if rank([lin[j] for j in basis + [k]]) == len(basis) + 1:
            basis.append(k)
    h = Polynomial.zero(X.ctx)
    for c, e in zip(relation, entries):
        if c:
            h = h + e * c
    if not all(entries[k].degree() <= 1 and not entries[k].constant_term() for k in basis):
        return CorankOneForm(tuple(basis), tuple(relation), None, {})
    # solve the linear entries for five variables and substitute into h
    solved = {}
    ctx = X.ctx
    polys = [entries[k] for k in basis]
    current = h
    names = list(ctx.names)
    for _ in range(len(basis)):
        # pick a polynomial and a variable with non-zero coefficient
        p = next(q for q in polys if q)
        coeffs = p.linear_part()
        i, g, small = solve_linear_form(current.ctx, coeffs)
        solved[names[i]] = g
        current = current.substitute(i, g)
        polys = [q.substitute(i, g) for q in polys if q is not p]
        names.pop(i)
    return CorankOneForm(tuple(basis), tuple(relation), current, solved)


def _left_kernel_vector(rows):
    """A non-zero vector c with sum c_k rows[k] = 0 (rows are dependent)."""
    k = len(rows)
    n = len(rows[0])
    # solve M^T c = 0 via rref of the transpose
    cols = [[rows[r][j] for r in range(k)] for j in range(n)]
    reduced, pivots = rref(cols)
    free = [j for j in range(k) if j not in pivots][0]
    c = [mpq(0)] * k
    c[free] = mpq(1)
    for row, p in zip(reduced, pivots):
        c[p] = -row[free]
    return c
