"""Ideals, polynomial matrices and standard-basis engines.

Two engines share one sparse representation (``dict`` exponent -> ``mpq``):

* Buchberger with the sugar strategy and Gebauer-Moeller pair criteria for
  global orders (including block elimination orders);
* Mora's tangent-cone normal form for the local order, with highest-corner
  truncation once the leading ideal contains a power of the maximal ideal.

Mora's normal form always terminates but can take an absurd number of steps
on some positive-dimensional inputs.  When that happens the local basis is
recomputed with Lazard's method (a global basis of the homogenized ideal,
then dehomogenized), which is slower on typical inputs but never stalls.

All limits are checked eagerly and reported as :class:`ResourceLimit`.
"""

from __future__ import annotations

import contextlib
import heapq
import itertools
import time
from collections import Counter
from dataclasses import dataclass, replace
from math import prod
from typing import Iterable, Sequence

from gmpy2 import mpq

from .errors import IdealIsUnit, OutOfRange, ResourceLimit
from .poly import DEGREVLEX, NEG_DEGREVLEX, MonomialOrder, Polynomial, VarContext

INFINITE = float("inf")


@dataclass(frozen=True)
class Limits:
    max_degree: int = 60
    max_basis: int = 5000
    max_seconds: float | None = None
    max_work: int | None = None


_limits = Limits()
_deadline = None
# work units are counted at fixed points of the algorithms, so a work budget
# (unlike a wall-clock budget) gives reproducible cut-offs
_work = 0
_work_limit = None


def get_limits() -> Limits:
    return _limits


def work_done() -> int:
    return _work


@contextlib.contextmanager
def resource_limits(**changes):
    """Temporarily override limits.

    ``max_seconds`` starts a wall-clock budget and ``max_work`` a budget of
    work units; nested budgets never extend an enclosing one.
    """
    global _limits, _deadline, _work_limit
    old, old_deadline, old_work_limit = _limits, _deadline, _work_limit
    _limits = replace(_limits, **{k: v for k, v in changes.items() if v is not None})
    if changes.get("max_seconds") is not None:
        new_deadline = time.monotonic() + changes["max_seconds"]
        _deadline = new_deadline if old_deadline is None else min(old_deadline, new_deadline)
    if changes.get("max_work") is not None:
        new_limit = _work + changes["max_work"]
        _work_limit = new_limit if old_work_limit is None else min(old_work_limit, new_limit)
    try:
        yield _limits
    finally:
        _limits, _deadline, _work_limit = old, old_deadline, old_work_limit


def _tick(units=1):
    global _work
    _work += units
    if _work_limit is not None and _work > _work_limit:
        raise ResourceLimit("work budget exceeded")
    if _deadline is not None and time.monotonic() > _deadline:
        raise ResourceLimit("time budget exceeded")


# one work unit is this many term operations, weighted by coefficient size
OPS_PER_UNIT = 1 << 12
_ops = 0


def _charge(terms, c):
    """Account for ``terms`` multiply-adds by the coefficient ``c``."""
    global _ops
    size = c.numerator.bit_length() + c.denominator.bit_length()
    _ops += terms * (1 + (size >> 6))
    if _ops >= OPS_PER_UNIT:
        units, _ops = divmod(_ops, OPS_PER_UNIT)
        _tick(units)


# ----------------------------------------------------------------- monomials

def _divides(a, b):
    for x, y in zip(a, b):
        if x > y:
            return False
    return True


def _lcm(a, b):
    return tuple(x if x > y else y for x, y in zip(a, b))


def _disjoint(a, b):
    for x, y in zip(a, b):
        if x and y:
            return False
    return True


def _quo(b, a):
    return tuple(y - x for x, y in zip(a, b))


def _mul(a, b):
    return tuple(x + y for x, y in zip(a, b))


def _monic(p, key):
    lm = max(p, key=key)
    c = p[lm]
    if c != 1:
        inv = 1 / c
        p = {e: v * inv for e, v in p.items()}
    return lm, p


def _spoly(lf, f, lg, g):
    """S-polynomial of monic f, g with leading monomials lf, lg."""
    l = _lcm(lf, lg)
    mf, mg = _quo(l, lf), _quo(l, lg)
    out = {}
    for e, c in f.items():
        out[_mul(e, mf)] = c
    for e, c in g.items():
        ne = _mul(e, mg)
        v = out.get(ne)
        if v is None:
            out[ne] = -c
        else:
            v = v - c
            if v:
                out[ne] = v
            else:
                del out[ne]
    return out


def staircase(lms: Sequence[tuple], n: int, cap: int | None = 1_000_000):
    """Monomials outside the monomial ideal generated by ``lms``.

    Returns None when the complement is infinite (a variable has no pure
    power).  Raises ResourceLimit if more than ``cap`` monomials are visited.
    """
    bounds = [None] * n
    for m in lms:
        support = [i for i, a in enumerate(m) if a]
        if len(support) == 1:
            i = support[0]
            if bounds[i] is None or m[i] < bounds[i]:
                bounds[i] = m[i]
        elif not support:
            return []
    if any(b is None for b in bounds):
        return None
    out = []
    cur = [0] * n
    visited = 0

    def rec(i):
        nonlocal visited
        if i == n:
            visited += 1
            if cap is not None and visited > cap:
                raise ResourceLimit("staircase enumeration too large")
            t = tuple(cur)
            if not any(_divides(m, t) for m in lms):
                out.append(t)
            return
        for a in range(bounds[i]):
            cur[i] = a
            # prune: if the partial monomial (rest zero) is already in the ideal, larger a are too
            t = tuple(cur[: i + 1]) + (0,) * (n - i - 1)
            if any(_divides(m, t) for m in lms):
                break
            rec(i + 1)
        cur[i] = 0

    rec(0)
    return out


def independent_dimension(lms: Sequence[tuple], n: int) -> int:
    """Dimension of K[x]/(lms): largest variable set avoided by every support."""
    supports = [frozenset(i for i, a in enumerate(m) if a) for m in lms]
    if any(not s for s in supports):
        return -1
    best = 0
    for size in range(n, 0, -1):
        for subset in itertools.combinations(range(n), size):
            s = set(subset)
            if all(not sup <= s for sup in supports):
                return size
    return best


# ----------------------------------------------------------------- reduction

def _reduce_global(p, reducers, nkey, full=True):
    """Normal form of ``p`` w.r.t. monic ``reducers`` [(lm, poly)] (global order)."""
    p = dict(p)
    heap = [(nkey(m), m) for m in p]
    heapq.heapify(heap)
    rem = {}
    while heap:
        _, m = heapq.heappop(heap)
        c = p.get(m)
        if c is None:
            continue
        for lm, g in reducers:
            if _divides(lm, m):
                break
        else:
            del p[m]
            rem[m] = c
            if not full:
                rem.update(p)
                return rem
            continue
        del p[m]
        q = _quo(m, lm)
        for e, a in g.items():
            if e == lm:
                continue
            ne = _mul(e, q)
            v = p.get(ne)
            if v is None:
                p[ne] = -c * a
                heapq.heappush(heap, (nkey(ne), ne))
            else:
                v = v - c * a
                if v:
                    p[ne] = v
                else:
                    del p[ne]
        _charge(len(g), c)
    return rem


def _negkey(order):
    key = order.key
    memo = {}

    def nkey(m):
        k = memo.get(m)
        if k is None:
            k = tuple(-x for x in key(m))
            memo[m] = k
        return k

    return nkey


def _update_pairs(h, lms, active, pairs, sugar, key):
    """Gebauer-Moeller update; returns (new active list, new pair list)."""
    lh = lms[h]
    cands = list(active)
    kept = []
    while cands:
        g = cands.pop()
        lg = _lcm(lh, lms[g])
        if _disjoint(lh, lms[g]):
            kept.append(g)
            continue
        if any(_divides(_lcm(lh, lms[o]), lg) for o in cands) or any(
            _divides(_lcm(lh, lms[o]), lg) for o in kept
        ):
            continue
        kept.append(g)
    new_pairs = []
    for entry in pairs:
        i, j = entry[-2], entry[-1]
        if i < 0:
            new_pairs.append(entry)
            continue
        l = _lcm(lms[i], lms[j])
        if _divides(lh, l) and _lcm(lms[i], lh) != l and _lcm(lms[j], lh) != l:
            continue
        new_pairs.append(entry)
    for g in kept:
        if _disjoint(lh, lms[g]):
            continue
        l = _lcm(lh, lms[g])
        s = max(sugar[h] + sum(l) - sum(lh), sugar[g] + sum(l) - sum(lms[g]))
        new_pairs.append((s, key(l), g, h))
    heapq.heapify(new_pairs)
    new_active = [g for g in active if not _divides(lh, lms[g])] + [h]
    return new_active, new_pairs


def _check_limits(p, count):
    lim = _limits
    if count > lim.max_basis:
        raise ResourceLimit(f"basis size exceeds {lim.max_basis}")
    d = max(sum(e) for e in p)
    if d > lim.max_degree:
        raise ResourceLimit(f"polynomial degree {d} exceeds {lim.max_degree}")


def buchberger(polys: Iterable[dict], order: MonomialOrder):
    """Reduced Groebner basis [(lm, poly)] for a global order."""
    if not order.is_global:
        raise ValueError("buchberger needs a global order")
    key = order.key
    nkey = _negkey(order)
    store, lms, sugar = [], [], []
    active, pairs = [], []

    def add(p):
        nonlocal active, pairs
        lm, p = _monic(p, key)
        store.append(p)
        lms.append(lm)
        sugar.append(max(sum(e) for e in p))
        _check_limits(p, len(store))
        active, pairs = _update_pairs(len(store) - 1, lms, active, pairs, sugar, key)

    # inputs wait in the pair queue with their degree as sugar, so they are
    # reduced only once the basis is complete up to that degree
    inputs = [p for p in polys if p]
    for idx, f in enumerate(inputs):
        lm = max(f, key=key)
        heapq.heappush(pairs, (max(sum(e) for e in f), key(lm), -1, idx))
    while pairs:
        _tick()
        _, _, i, j = heapq.heappop(pairs)
        s = inputs[j] if i < 0 else _spoly(lms[i], store[i], lms[j], store[j])
        r = _reduce_global(s, [(lms[k], store[k]) for k in active], nkey)
        if r:
            if all(not any(e) for e in r):
                e0 = next(iter(r))
                return [(e0, {e0: mpq(1)})]
            add(r)
    basis = [(lms[i], store[i]) for i in active]
    out = []
    for idx, (lm, g) in enumerate(basis):
        others = [b for k, b in enumerate(basis) if k != idx]
        tail = {e: c for e, c in g.items() if e != lm}
        r = _reduce_global(tail, others, nkey) if tail else {}
        r[lm] = mpq(1)
        out.append((lm, r))
    out.sort(key=lambda t: key(t[0]), reverse=True)
    return out


# ----------------------------------------------------------------- local engine

def _ecart(p, lm):
    return max(sum(e) for e in p) - sum(lm)


class _MoraStall(Exception):
    pass


# term operations Mora may spend before a highest corner is known
MORA_WORK_BUDGET = 300_000


class _LocalEngine:
    """Mora standard basis for non-global orders.

    With the pure local order the highest corner is tracked and used for
    truncation; mixed orders (a global elimination block followed by the
    local order) run plain Mora.
    """

    def __init__(self, n, order):
        self.n = n
        self.order = order
        self.key = order.key
        self.nkey = _negkey(order)
        self.noether = None  # truncation degree: m^noether lies in the ideal
        self.wild_work = 0  # term operations spent without a highest corner

    def truncate(self, p):
        d = self.noether
        if d is None:
            return p
        return {e: c for e, c in p.items() if sum(e) < d}

    def lead(self, p):
        return max(p, key=self.key)

    def nf(self, h, reducers):
        """Weak normal form (Mora).  ``reducers``: list of (lm, poly, ecart).

        The leading term is tracked with a lazy heap and the top degree with
        per-degree counts, so a reduction step costs the size of the reducer
        rather than the size of ``h``.
        """
        h = self.truncate(h)
        if not h:
            return h
        nkey = self.nkey
        T = list(reducers)
        heap = [(nkey(e), e) for e in h]
        heapq.heapify(heap)
        degs = Counter(sum(e) for e in h)
        d = self.noether
        while h:
            while heap[0][1] not in h:
                heapq.heappop(heap)
            lm = heap[0][1]
            best = None
            for cand in T:
                if _divides(cand[0], lm) and (best is None or cand[2] < best[2]):
                    best = cand
                    if cand[2] == 0:
                        break
            if best is None:
                return h
            glm, g, gec = best
            if d is None:
                hec = max(k for k, v in degs.items() if v) - sum(lm)
                if gec > hec:
                    T.append((lm, dict(h), hec))
            c = h[lm] / g[glm]
            q = _quo(lm, glm)
            for e, a in g.items():
                ne = _mul(e, q)
                if d is not None and sum(ne) >= d:
                    continue
                v = h.get(ne)
                if v is None:
                    h[ne] = -c * a
                    heapq.heappush(heap, (nkey(ne), ne))
                    degs[sum(ne)] += 1
                else:
                    v = v - c * a
                    if v:
                        h[ne] = v
                    else:
                        del h[ne]
                        degs[sum(ne)] -= 1
            if lm in h:
                del h[lm]
                degs[sum(lm)] -= 1
            _charge(len(g), c)
            if d is None:
                size = c.numerator.bit_length() + c.denominator.bit_length()
                self.wild_work += (len(g) + len(T)) * (1 + size // 128)
                if self.wild_work > MORA_WORK_BUDGET and self.order.is_local:
                    raise _MoraStall()
        return h

    def find_noether(self, lms):
        if not self.order.is_local:
            return None
        bounds = {}
        for m in lms:
            support = [i for i, a in enumerate(m) if a]
            if len(support) == 1:
                i = support[0]
                bounds[i] = min(bounds.get(i, m[i]), m[i])
        if len(bounds) < self.n:
            return None
        # m^(maxdeg+1) lies in the ideal; keep one more degree so that every
        # minimal generator of the leading ideal survives truncation
        if prod(bounds.values()) <= 200_000:
            st = staircase(lms, self.n, cap=None)
            return max((sum(m) for m in st), default=-1) + 2
        return sum(b - 1 for b in bounds.values()) + 2

    def run(self, polys):
        key = self.key
        store, lms, ecarts, sugar = [], [], [], []
        active, pairs = [], []

        def reducers():
            return [(lms[i], store[i], ecarts[i]) for i in range(len(store)) if store[i]]

        def add(p):
            nonlocal active, pairs
            lm, p = _monic(p, key)
            store.append(p)
            lms.append(lm)
            ecarts.append(_ecart(p, lm))
            sugar.append(max(sum(e) for e in p))
            _check_limits(p, len(store))
            active, pairs = _update_pairs(len(store) - 1, lms, active, pairs, sugar, _degkey)
            if not any(lm):
                return True
            d = self.find_noether([lms[i] for i in active])
            if d is not None and (self.noether is None or d < self.noether):
                self.noether = d
                for i in range(len(store)):
                    store[i] = self.truncate(store[i])
                    if store[i]:
                        ecarts[i] = _ecart(store[i], lms[i])
                pairs = [pr for pr in pairs if pr[2] < 0 or sum(_lcm(lms[pr[2]], lms[pr[3]])) < d]
                heapq.heapify(pairs)
            return False

        inputs = [p for p in polys if p]
        for idx, f in enumerate(inputs):
            heapq.heappush(pairs, (max(sum(e) for e in f), _degkey(self.lead(f)), -1, idx))
        while pairs:
            _tick()
            _, _, i, j = heapq.heappop(pairs)
            if i < 0:
                s = self.truncate(dict(inputs[j]))
            else:
                if self.noether is not None and sum(_lcm(lms[i], lms[j])) >= self.noether:
                    continue
                s = self.truncate(_spoly(lms[i], store[i], lms[j], store[j]))
            r = self.nf(s, reducers())
            if r and add(r):
                return self._unit()
        out = []
        for i in active:
            if store[i]:
                out.append((lms[i], store[i]))
        out.sort(key=lambda t: key(t[0]), reverse=True)
        return out

    def _unit(self):
        e0 = (0,) * self.n
        return [(e0, {e0: mpq(1)})]


def _degkey(m):
    return (sum(m),) + tuple(-x for x in reversed(m))


def _lazard(polys, n, order=NEG_DEGREVLEX):
    """Standard basis for a local or mixed ds order by Lazard's method:
    a Groebner basis of the homogenized ideal, dehomogenized."""
    hom = []
    for p in polys:
        if not p:
            continue
        d = max(sum(e) for e in p)
        hom.append({(d - sum(e),) + e: c for e, c in p.items()})
    basis = buchberger(hom, MonomialOrder("lazard", order.elim))
    key = order.key
    out = []
    for _, g in basis:
        q = {}
        for e, c in g.items():
            x = e[1:]
            v = q.get(x, 0) + c
            if v:
                q[x] = v
            else:
                q.pop(x, None)
        if q:
            out.append(_monic(q, key))
    out.sort(key=lambda t: key(t[0]), reverse=True)
    return _minimalize(out)


# ----------------------------------------------------------------- public types

class Ideal:
    """Finitely generated ideal; zero generators are dropped."""

    __slots__ = ("ctx", "generators")

    def __init__(self, ctx: VarContext, generators: Iterable[Polynomial]):
        gens = []
        for g in generators:
            if g.ctx != ctx:
                raise ValueError("generator lives in a different context")
            if g:
                gens.append(g)
        self.ctx = ctx
        self.generators = tuple(gens)

    def __repr__(self):
        return f"Ideal({[str(g) for g in self.generators]}, ctx={self.ctx.names})"

    def __iter__(self):
        return iter(self.generators)

    def __len__(self):
        return len(self.generators)

    def __add__(self, other):
        return ideal_sum(self, other)

    def is_zero(self):
        return not self.generators


@dataclass
class StandardBasis:
    order: MonomialOrder
    ctx: VarContext
    basis: list
    staircase_generators: list
    noether_degree: int | None = None

    @property
    def is_unit(self) -> bool:
        return any(not any(m) for m in self.staircase_generators)

    def standard_monomials(self):
        return staircase(self.staircase_generators, self.ctx.n)

    def colength(self):
        if self.is_unit:
            return 0
        st = self.standard_monomials()
        return INFINITE if st is None else len(st)

    def dimension(self) -> int:
        return independent_dimension(self.staircase_generators, self.ctx.n)

    def reduce(self, f: Polynomial) -> Polynomial:
        """Normal form of ``f`` (weak normal form for the local order)."""
        if self.order.is_global:
            r = _reduce_global(f.terms, [(lm, g.terms) for lm, g in zip(self.staircase_generators, self.basis)],
                               _negkey(self.order))
        else:
            eng = _LocalEngine(self.ctx.n, self.order)
            eng.noether = self.noether_degree
            red = [(lm, g.terms, _ecart(g.terms, lm)) for lm, g in zip(self.staircase_generators, self.basis)]
            r = eng.nf(dict(f.terms), red)
        return Polynomial(self.ctx, r)

    def contains(self, f: Polynomial) -> bool:
        return not self.reduce(f)


def standard_basis(I: Ideal, order: MonomialOrder = DEGREVLEX) -> StandardBasis:
    n = I.ctx.n
    raw = [dict(g.terms) for g in I.generators]
    if not raw:
        return StandardBasis(order, I.ctx, [], [])
    if order.is_global:
        pairs = buchberger(raw, order)
        noether = None
    else:
        eng = _LocalEngine(n, order)
        try:
            pairs = _minimalize(eng.run(raw))
            noether = eng.noether
        except _MoraStall:
            pairs = _lazard(raw, n)
            noether = None
    return StandardBasis(order, I.ctx, [Polynomial(I.ctx, p) for _, p in pairs],
                         [lm for lm, _ in pairs], noether)


def _minimalize(pairs):
    out = []
    for i, (lm, p) in enumerate(pairs):
        dominated = False
        for j, (lm2, _) in enumerate(pairs):
            if j != i and _divides(lm2, lm) and (lm2 != lm or j < i):
                dominated = True
                break
        if not dominated:
            out.append((lm, p))
    return out


def colength(I: Ideal, order: MonomialOrder = NEG_DEGREVLEX):
    """dim_Q of the quotient (local ring at 0 for the local order); INFINITE if not finite."""
    return standard_basis(I, order).colength()


def colength_at_origin(I: Ideal):
    """Local colength at 0, from global bases when V(I) is finite.

    colength(I + m^k) grows with k; once two consecutive values agree,
    m^k lies in I + m^(k+1), so m^k lies in I locally (Nakayama) and the
    value is the local colength.  When V(I) has positive dimension the
    local engine is used instead.
    """
    sb = standard_basis(I, DEGREVLEX)
    if sb.is_unit:
        return 0
    if sb.dimension() > 0:
        return colength(I)
    gens = tuple(sb.basis)
    prev = None
    for k in range(1, sb.colength() + 2):
        _tick()
        power = [Polynomial(I.ctx, {e: mpq(1)}) for e in _monomials_of_degree(I.ctx.n, k)]
        c = colength(Ideal(I.ctx, gens + tuple(power)), DEGREVLEX)
        if c == prev:
            return c
        prev = c
    return prev


def _monomials_of_degree(n: int, k: int):
    if n == 1:
        yield (k,)
        return
    for a in range(k, -1, -1):
        for rest in _monomials_of_degree(n - 1, k - a):
            yield (a,) + rest


def krull_dimension(I: Ideal, order: MonomialOrder = DEGREVLEX) -> int:
    """Krull dimension via maximal independent sets of the leading ideal.

    With the local order this is the dimension of the germ at the origin.
    """
    sb = standard_basis(I, order)
    if sb.is_unit:
        raise IdealIsUnit("the ideal is the unit ideal")
    return sb.dimension()


def ideal_sum(I: Ideal, J: Ideal) -> Ideal:
    if I.ctx != J.ctx:
        raise ValueError("ideals live in different contexts")
    return Ideal(I.ctx, I.generators + J.generators)


def _same_ideal(I: Ideal, J: Ideal) -> bool:
    a = standard_basis(I)
    b = standard_basis(J)
    return [g.terms for g in a.basis] == [g.terms for g in b.basis]


def contains(I: Ideal, J: Ideal, order: MonomialOrder = DEGREVLEX) -> bool:
    sb = standard_basis(I, order)
    return all(sb.contains(g) for g in J.generators)


def _lift(ctx_big: VarContext, p: Polynomial, shift: int) -> dict:
    return {(0,) * shift + e: c for e, c in p.terms.items()}


def eliminate_first(ctx: VarContext, raw: list, k: int) -> Ideal:
    """Groebner-eliminate the first ``k`` variables of the raw polys (in a ctx of n+k vars)."""
    order = MonomialOrder("dp", elim=k)
    basis = buchberger(raw, order)
    out = []
    for lm, p in basis:
        if not any(lm[:k]):
            out.append(Polynomial(ctx, {e[k:]: c for e, c in p.items()}))
    return Ideal(ctx, out)


def intersection(I: Ideal, J: Ideal) -> Ideal:
    """I cap J via t*I + (1-t)*J with t eliminated."""
    ctx = I.ctx
    raw = []
    for g in I.generators:
        raw.append({(1,) + e: c for e, c in g.terms.items()})
    for g in J.generators:
        p = {}
        for e, c in g.terms.items():
            p[(0,) + e] = c
            p[(1,) + e] = -c
        raw.append(p)
    return eliminate_first(ctx, raw, 1)


def exact_divide(f: Polynomial, g: Polynomial) -> Polynomial:
    """q with f = q*g; raises ValueError if g does not divide f."""
    key = DEGREVLEX.key
    lg = max(g.terms, key=key)
    cg = g.terms[lg]
    rem = dict(f.terms)
    q = {}
    while rem:
        lf = max(rem, key=key)
        if not _divides(lg, lf):
            raise ValueError("polynomial is not divisible")
        c = rem[lf] / cg
        m = _quo(lf, lg)
        q[m] = c
        for e, a in g.terms.items():
            ne = _mul(e, m)
            v = rem.get(ne, 0) - c * a
            if v:
                rem[ne] = v
            else:
                rem.pop(ne, None)
    return Polynomial(f.ctx, q)


def quotient_by(I: Ideal, g: Polynomial) -> Ideal:
    """I : g."""
    if not g:
        return Ideal(I.ctx, [Polynomial.constant(I.ctx, 1)])
    inter = intersection(I, Ideal(I.ctx, [g]))
    return Ideal(I.ctx, [exact_divide(h, g) for h in inter.generators])


def ideal_quotient(I: Ideal, J: Ideal) -> Ideal:
    """I : J as the intersection of the quotients by each generator of J."""
    result = None
    for g in J.generators:
        q = quotient_by(I, g)
        result = q if result is None else intersection(result, q)
    if result is None:
        return Ideal(I.ctx, [Polynomial.constant(I.ctx, 1)])
    return result


def saturate_by(I: Ideal, f: Polynomial, local: bool = False) -> Ideal:
    """I : f^infinity via I + (1 - T f) with T eliminated.

    With ``local=True`` the result is only valid in the local ring at the
    origin; the elimination then uses a global block for T followed by the
    local order, which ignores every component away from the origin.
    """
    raw = [{(0,) + e: c for e, c in g.terms.items()} for g in I.generators]
    p = {(0,) * (I.ctx.n + 1): mpq(1)}
    for e, c in f.terms.items():
        p[(1,) + e] = -c
    raw.append(p)
    if not local:
        return eliminate_first(I.ctx, raw, 1)
    eng = _LocalEngine(I.ctx.n + 1, MonomialOrder("ds", elim=1))
    basis = eng.run(raw)
    return Ideal(I.ctx, [Polynomial(I.ctx, {e[1:]: c for e, c in g.items()})
                         for lm, g in basis if not lm[0]])


def saturation(I: Ideal, J: Ideal) -> Ideal:
    """I : J^infinity by iterated quotients until the ideal stabilises."""
    if len(J.generators) == 1:
        return saturate_by(I, J.generators[0])
    current = I
    while True:
        nxt = ideal_quotient(current, J)
        if contains(current, nxt):
            return current
        current = nxt


# ----------------------------------------------------------------- matrices

class PolyMatrix:
    __slots__ = ("ctx", "rows", "cols", "entries")

    def __init__(self, entries: Sequence[Sequence[Polynomial]], ctx: VarContext | None = None):
        rows = [list(r) for r in entries]
        if not rows or not rows[0]:
            if ctx is None:
                raise ValueError("empty matrix needs an explicit context")
        else:
            if any(len(r) != len(rows[0]) for r in rows):
                raise ValueError("matrix is not rectangular")
            ctx = ctx or rows[0][0].ctx
            if any(e.ctx != ctx for r in rows for e in r):
                raise ValueError("entries live in different contexts")
        self.ctx = ctx
        self.entries = tuple(tuple(r) for r in rows)
        self.rows = len(rows)
        self.cols = len(rows[0]) if rows else 0

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def __eq__(self, other):
        return isinstance(other, PolyMatrix) and self.entries == other.entries and self.ctx == other.ctx

    def __repr__(self):
        body = "; ".join(", ".join(str(e) for e in r) for r in self.entries)
        return f"PolyMatrix([{body}])"

    def transpose(self) -> "PolyMatrix":
        return PolyMatrix([[self.entries[i][j] for i in range(self.rows)] for j in range(self.cols)], self.ctx)

    def map(self, fn) -> "PolyMatrix":
        return PolyMatrix([[fn(e) for e in r] for r in self.entries])

    def flat(self):
        return [e for r in self.entries for e in r]

    def evaluate(self, point):
        return [[e.evaluate(point) for e in r] for r in self.entries]

    def submatrix_det(self, rows: Sequence[int], cols: Sequence[int]) -> Polynomial:
        """Determinant by Laplace expansion memoised on column subsets."""
        ctx = self.ctx
        E = self.entries
        memo = {}

        def det(depth, colset):
            if depth == len(rows):
                return Polynomial.constant(ctx, 1)
            k = (depth, colset)
            if k in memo:
                return memo[k]
            total = Polynomial.zero(ctx)
            sign = 1
            r = rows[depth]
            for c in cols:
                if colset & (1 << c):
                    continue
                entry = E[r][c]
                if entry:
                    sub = det(depth + 1, colset | (1 << c))
                    if sub:
                        term = entry * sub
                        total = total + term if sign > 0 else total - term
                sign = -sign
            memo[k] = total
            return total

        return det(0, 0)

    def det(self) -> Polynomial:
        if self.rows != self.cols:
            raise ValueError("determinant of a non-square matrix")
        return self.submatrix_det(range(self.rows), range(self.cols))


def minors(M: PolyMatrix, size: int) -> Ideal:
    """All size x size minors, index sets in lexicographic order."""
    if not 1 <= size <= min(M.rows, M.cols):
        raise OutOfRange(f"minor size {size} out of range for a {M.rows}x{M.cols} matrix")
    gens = []
    for rs in itertools.combinations(range(M.rows), size):
        for cs in itertools.combinations(range(M.cols), size):
            gens.append(M.submatrix_det(rs, cs))
    return Ideal(M.ctx, gens)


def minors_list(M: PolyMatrix, size: int) -> list:
    """Like :func:`minors` but keeps zero minors (positions matter)."""
    out = []
    for rs in itertools.combinations(range(M.rows), size):
        for cs in itertools.combinations(range(M.cols), size):
            out.append(M.submatrix_det(rs, cs))
    return out


def jacobian(gens: Sequence[Polynomial], ctx: VarContext | None = None) -> PolyMatrix:
    gens = list(gens)
    if ctx is None:
        if not gens:
            raise ValueError("empty generator list needs a context")
        ctx = gens[0].ctx
    return PolyMatrix([[g.derivative(i) for i in range(ctx.n)] for g in gens], ctx)
