"""Exact sparse multivariate polynomials over the rationals.

A polynomial is a map from exponent tuples to non-zero ``gmpy2.mpq``
coefficients, tied to a :class:`VarContext`.  Values are immutable by
convention; every operation returns a new object.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Mapping, Sequence

from gmpy2 import mpq

from .errors import PolySyntaxError, UnknownVariable, ZeroForm
from .linalg import rref

_NAME_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")

PRIME_POOL = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47,
              53, 59, 61, 67, 71, 73, 79, 83, 89, 97)


@dataclass(frozen=True)
class VarContext:
    names: tuple

    def __init__(self, names: Iterable[str]):
        names = tuple(names)
        if not names:
            raise ValueError("a variable context needs at least one variable")
        for name in names:
            if not isinstance(name, str) or not _NAME_RE.match(name):
                raise ValueError(f"invalid variable name {name!r}")
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate variable names in {names}")
        object.__setattr__(self, "names", names)

    @property
    def n(self) -> int:
        return len(self.names)

    def __len__(self):
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise UnknownVariable(f"unknown variable {name!r}") from None

    def drop(self, i: int) -> "VarContext":
        return VarContext(self.names[:i] + self.names[i + 1:])

    def extend(self, *names: str) -> "VarContext":
        return VarContext(self.names + tuple(names))

    def prepend(self, *names: str) -> "VarContext":
        return VarContext(tuple(names) + self.names)

    def fresh_name(self, base: str) -> str:
        name, k = base, 0
        while name in self.names:
            k += 1
            name = f"{base}{k}"
        return name


class MonomialOrder:
    """Monomial order given by a sort key; larger key means larger monomial.

    ``kind`` is ``"dp"`` (global degree reverse lexicographic) or ``"ds"``
    (local negative degree reverse lexicographic, 1 > x_i).  With
    ``elim > 0`` the first ``elim`` variables form a separate global dp block
    compared first, which makes the order an elimination order for them.

    ``"lazard"`` is the global order on (t, x) used to compute local standard
    bases from homogenized ideals: total degree, then the ``"ds"`` order
    (with the same ``elim`` block) on x.  The homogenizing variable t sits in
    the first slot.
    """

    __slots__ = ("kind", "elim", "_memo")

    def __init__(self, kind: str = "dp", elim: int = 0):
        if kind not in ("dp", "ds", "lazard"):
            raise ValueError(f"unknown order kind {kind!r}")
        self.kind = kind
        self.elim = elim
        self._memo = {}

    def __eq__(self, other):
        return (isinstance(other, MonomialOrder)
                and (self.kind, self.elim) == (other.kind, other.elim))

    def __hash__(self):
        return hash((self.kind, self.elim))

    def __repr__(self):
        if self.elim:
            return f"MonomialOrder({self.kind!r}, elim={self.elim})"
        return f"MonomialOrder({self.kind!r})"

    @property
    def is_global(self) -> bool:
        return self.kind in ("dp", "lazard")

    @property
    def is_local(self) -> bool:
        return self.kind == "ds" and self.elim == 0

    def key(self, exp: tuple) -> tuple:
        k = self._memo.get(exp)
        if k is None:
            k = self._compute(exp)
            self._memo[exp] = k
        return k

    def _compute(self, exp):
        if self.kind == "lazard":
            return (sum(exp),) + MonomialOrder("ds", self.elim)._compute(exp[1:])
        k = self.elim
        if k:
            head = exp[:k]
            tail = exp[k:]
            first = (sum(head),) + tuple(-e for e in reversed(head))
        else:
            tail = exp
            first = ()
        d = sum(tail)
        rest = tuple(-e for e in reversed(tail))
        if self.kind == "dp":
            return first + (d,) + rest
        return first + (-d,) + rest

    def compare(self, a: tuple, b: tuple) -> int:
        ka, kb = self.key(a), self.key(b)
        return (ka > kb) - (ka < kb)


DEGREVLEX = MonomialOrder("dp")
NEG_DEGREVLEX = MonomialOrder("ds")


def _coerce(c):
    return c if type(c) is type(mpq()) else mpq(c)


class Polynomial:
    __slots__ = ("ctx", "terms")

    def __init__(self, ctx: VarContext, terms: Mapping[tuple, object] | None = None):
        self.ctx = ctx
        clean = {}
        if terms:
            n = ctx.n
            for exp, c in terms.items():
                c = _coerce(c)
                if c:
                    exp = tuple(exp)
                    if len(exp) != n:
                        raise ValueError(f"exponent {exp} does not match {n} variables")
                    clean[exp] = c
        self.terms = clean

    @classmethod
    def _raw(cls, ctx, terms):
        # terms must already be clean: tuple keys, non-zero mpq values
        p = cls.__new__(cls)
        p.ctx = ctx
        p.terms = terms
        return p

    # construction helpers
    @classmethod
    def zero(cls, ctx):
        return cls._raw(ctx, {})

    @classmethod
    def constant(cls, ctx, c):
        c = _coerce(c)
        return cls._raw(ctx, {(0,) * ctx.n: c} if c else {})

    @classmethod
    def variable(cls, ctx, var):
        i = ctx.index(var) if isinstance(var, str) else var
        if not 0 <= i < ctx.n:
            raise IndexError(f"variable index {i} out of range")
        exp = [0] * ctx.n
        exp[i] = 1
        return cls._raw(ctx, {tuple(exp): mpq(1)})

    @classmethod
    def from_linear(cls, ctx, coefficients: Sequence):
        terms = {}
        for i, c in enumerate(coefficients):
            c = _coerce(c)
            if c:
                exp = [0] * ctx.n
                exp[i] = 1
                terms[tuple(exp)] = c
        return cls._raw(ctx, terms)

    # predicates and accessors
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_term(self):
        return self.terms.get((0,) * self.ctx.n, mpq(0))

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self.terms), default=-1)

    def low_degree(self) -> int:
        """Order of vanishing at the origin; -1 for zero."""
        return min((sum(e) for e in self.terms), default=-1)

    def variables(self) -> set:
        return {i for e in self.terms for i, a in enumerate(e) if a}

    def involves(self, i: int) -> bool:
        return any(e[i] for e in self.terms)

    def linear_part(self) -> list:
        out = [mpq(0)] * self.ctx.n
        for e, c in self.terms.items():
            if sum(e) == 1:
                out[e.index(1)] = c
        return out

    def homogeneous_part(self, d: int) -> "Polynomial":
        return Polynomial._raw(self.ctx, {e: c for e, c in self.terms.items() if sum(e) == d})

    def sorted_terms(self, order: MonomialOrder = DEGREVLEX):
        key = order.key
        return sorted(self.terms.items(), key=lambda t: key(t[0]), reverse=True)

    def lead(self, order: MonomialOrder = DEGREVLEX):
        """(exponent, coefficient) of the leading term."""
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        key = order.key
        e = max(self.terms, key=key)
        return e, self.terms[e]

    def _check(self, other):
        if isinstance(other, Polynomial):
            if other.ctx != self.ctx:
                raise ValueError("polynomials live in different contexts")
            return other
        return Polynomial.constant(self.ctx, other)

    # arithmetic
    def __add__(self, other):
        other = self._check(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = out.get(e)
            if v is None:
                out[e] = c
            else:
                v = v + c
                if v:
                    out[e] = v
                else:
                    del out[e]
        return Polynomial._raw(self.ctx, out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._raw(self.ctx, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return self._check(other) - self

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            c = _coerce(other)
            if not c:
                return Polynomial.zero(self.ctx)
            return Polynomial._raw(self.ctx, {e: v * c for e, v in self.terms.items()})
        other = self._check(other)
        out = {}
        get = out.get
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = get(e, 0) + c1 * c2
        return Polynomial._raw(self.ctx, {e: c for e, c in out.items() if c})

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Polynomial):
            if not other.is_constant() or not other:
                raise ZeroDivisionError("division only by non-zero constants")
            other = other.constant_term()
        c = _coerce(other)
        if not c:
            raise ZeroDivisionError("division by zero")
        return self * (1 / c)

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a non-negative integer")
        result = Polynomial.constant(self.ctx, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.ctx == other.ctx and self.terms == other.terms
        if isinstance(other, (int, type(mpq()))):
            return self == Polynomial.constant(self.ctx, other)
        return NotImplemented

    def __hash__(self):
        return hash((self.ctx, frozenset(self.terms.items())))

    # calculus and substitution
    def derivative(self, i: int) -> "Polynomial":
        if not 0 <= i < self.ctx.n:
            raise IndexError(f"variable index {i} out of range for {self.ctx.n} variables")
        out = {}
        for e, c in self.terms.items():
            a = e[i]
            if a:
                ne = e[:i] + (a - 1,) + e[i + 1:]
                out[ne] = c * a
        return Polynomial._raw(self.ctx, out)

    def evaluate(self, point: Sequence):
        if len(point) != self.ctx.n:
            raise ValueError("point dimension mismatch")
        pt = [_coerce(v) for v in point]
        total = mpq(0)
        for e, c in self.terms.items():
            term = c
            for v, a in zip(pt, e):
                if a:
                    term *= v ** a
            total += term
        return total

    __call__ = evaluate

    def substitute(self, i: int, g: "Polynomial") -> "Polynomial":
        """Replace variable ``i`` by ``g``, which lives in the context without ``i``."""
        if not 0 <= i < self.ctx.n:
            raise IndexError(f"variable index {i} out of range")
        sub_ctx = self.ctx.drop(i)
        if g.ctx != sub_ctx:
            if g.ctx == self.ctx:
                if g.involves(i):
                    raise ValueError("substituted polynomial involves the eliminated variable")
                g = g.drop_variable(i)
            else:
                raise ValueError("substituted polynomial lives in the wrong context")
        powers = {0: Polynomial.constant(sub_ctx, 1)}
        result = {}
        for e, c in self.terms.items():
            a = e[i]
            if a not in powers:
                powers[a] = g ** a
            rest = e[:i] + e[i + 1:]
            for ge, gc in powers[a].terms.items():
                ne = tuple(x + y for x, y in zip(rest, ge))
                result[ne] = result.get(ne, 0) + c * gc
        return Polynomial._raw(sub_ctx, {e: c for e, c in result.items() if c})

    def drop_variable(self, i: int) -> "Polynomial":
        """Reinterpret in the context without variable ``i`` (which must not occur)."""
        if self.involves(i):
            raise ValueError("polynomial involves the dropped variable")
        return Polynomial._raw(self.ctx.drop(i), {e[:i] + e[i + 1:]: c for e, c in self.terms.items()})

    def embed(self, ctx: VarContext) -> "Polynomial":
        """Re-express in a larger context containing all current variable names."""
        idx = [ctx.index(name) for name in self.ctx.names]
        out = {}
        for e, c in self.terms.items():
            ne = [0] * ctx.n
            for j, a in zip(idx, e):
                ne[j] = a
            out[tuple(ne)] = c
        return Polynomial._raw(ctx, out)

    def linear_change(self, images: Sequence["Polynomial"]) -> "Polynomial":
        """Compose with x_i -> images[i] (all in a common target context)."""
        target = images[0].ctx
        result = Polynomial.zero(target)
        cache = {}
        for e, c in self.terms.items():
            term = Polynomial.constant(target, c)
            for i, a in enumerate(e):
                if a:
                    if (i, a) not in cache:
                        cache[(i, a)] = images[i] ** a
                    term = term * cache[(i, a)]
            result = result + term
        return result

    # printing
    def _monomial_str(self, e):
        parts = []
        for name, a in zip(self.ctx.names, e):
            if a == 1:
                parts.append(name)
            elif a:
                parts.append(f"{name}^{a}")
        return "*".join(parts)

    def to_str(self, order: MonomialOrder = DEGREVLEX) -> str:
        if not self.terms:
            return "0"
        out = []
        for e, c in self.sorted_terms(order):
            mono = self._monomial_str(e)
            neg = c < 0
            a = -c if neg else c
            if not mono:
                body = str(a)
            elif a == 1:
                body = mono
            else:
                body = f"{a}*{mono}"
            if not out:
                out.append(("-" if neg else "") + body)
            else:
                out.append((" - " if neg else " + ") + body)
        return "".join(out)

    def __str__(self):
        return self.to_str()

    def __repr__(self):
        return f"Polynomial({self.to_str()!r}, ctx={self.ctx.names})"


def poly_sum(polys: Iterable[Polynomial], ctx: VarContext) -> Polynomial:
    return reduce(lambda a, b: a + b, polys, Polynomial.zero(ctx))


# ---------------------------------------------------------------- parsing

_TOKEN_RE = re.compile(r"\s*(?:(\d+)|([A-Za-z][A-Za-z0-9_]*)|(.))")


def _tokenize(src):
    tokens = []
    pos = 0
    n = len(src)
    while pos < n:
        m = _TOKEN_RE.match(src, pos)
        if m.end() == pos:
            break
        if m.group(1) is not None:
            tokens.append(("num", m.group(1), m.start(1)))
        elif m.group(2) is not None:
            tokens.append(("name", m.group(2), m.start(2)))
        elif m.group(3) is not None:
            ch = m.group(3)
            if ch not in "+-*/^()":
                raise PolySyntaxError(f"unexpected character {ch!r}", m.start(3), src)
            tokens.append(("op", ch, m.start(3)))
        pos = m.end()
    tokens.append(("end", "", len(src)))
    return tokens


class _Parser:
    def __init__(self, src, ctx, params=None):
        self.src = src
        self.ctx = ctx
        self.params = dict(params or {})
        self.tokens = _tokenize(src)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        return PolySyntaxError(msg, tok[2], self.src)

    def parse(self):
        if self.peek()[0] == "end":
            raise self.error("empty expression")
        value = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            if tok[0] in ("num", "name") or tok[1] == "(":
                raise self.error("implicit multiplication is not allowed")
            raise self.error(f"unexpected token {tok[1]!r}")
        return value

    def expr(self):
        value = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self):
        value = self.factor()
        while self.peek()[0] == "op" and self.peek()[1] in ("*", "/"):
            op = self.take()
            rhs = self.factor()
            if op[1] == "*":
                value = value * rhs
            else:
                if not rhs.is_constant() or not rhs:
                    raise self.error("division only by non-zero constants", op)
                value = value / rhs.constant_term()
        return value

    def factor(self):
        tok = self.peek()
        if tok[0] == "op" and tok[1] in ("+", "-"):
            self.take()
            value = self.factor()
            return -value if tok[1] == "-" else value
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            tok = self.peek()
            if tok[0] == "num":
                self.take()
                k = int(tok[1])
            elif tok[0] == "name" and tok[1] in self.params:
                self.take()
                k = self.params[tok[1]]
            elif tok[0] == "op" and tok[1] == "(":
                value = self.atom()
                if not value.is_constant() or value.constant_term().denominator != 1:
                    raise self.error("exponent must evaluate to an integer constant", tok)
                k = int(value.constant_term())
            else:
                raise self.error("exponent must be an integer literal, a parameter or a parenthesised constant", tok)
            if k < 0:
                raise self.error("negative exponent", tok)
            base = base ** k
            if self.peek()[0] == "op" and self.peek()[1] == "^":
                raise self.error("chained exponents need parentheses")
        return base

    def atom(self):
        tok = self.take()
        kind, text, pos = tok
        if kind == "num":
            return Polynomial.constant(self.ctx, int(text))
        if kind == "name":
            if text in self.params:
                return Polynomial.constant(self.ctx, self.params[text])
            if text not in self.ctx.names:
                raise UnknownVariable(f"unknown variable {text!r}", pos, self.src)
            return Polynomial.variable(self.ctx, text)
        if kind == "op" and text == "(":
            value = self.expr()
            close = self.take()
            if close[1] != ")" or close[0] != "op":
                raise self.error("expected ')'", close)
            return value
        if kind == "end":
            raise self.error("unexpected end of input", tok)
        raise self.error(f"unexpected token {text!r}", tok)


def parse_poly(src: str, ctx: VarContext, params: Mapping[str, int] | None = None) -> Polynomial:
    """Parse ``src`` (literals, variables of ``ctx``, ``+ - * / ^ ( )``).

    ``params`` maps template parameter names (such as ``k``) to integers;
    they may appear as constants and in exponents, e.g. ``x^(k+1)``.
    """
    if params:
        clash = set(params) & set(ctx.names)
        if clash:
            raise ValueError(f"parameters shadow variables: {sorted(clash)}")
    return _Parser(src, ctx, params).parse()


# ---------------------------------------------------------------- genericity

@dataclass(frozen=True)
class LinearForm:
    coefficients: tuple
    seed: int | None = None

    def __post_init__(self):
        if not any(self.coefficients):
            raise ValueError("linear form with all coefficients zero")

    def as_poly(self, ctx: VarContext) -> Polynomial:
        if len(self.coefficients) != ctx.n:
            raise ValueError("linear form size does not match context")
        return Polynomial.from_linear(ctx, self.coefficients)


def seeded_rng(seed: int, tag: str) -> random.Random:
    return random.Random(f"{tag}:{seed}")


def draw_generic(rng: random.Random, count: int) -> list:
    """Non-zero coefficients from the signed prime pool."""
    return [mpq(rng.choice(PRIME_POOL) * rng.choice((1, -1))) for _ in range(count)]


def generic_linear_form(ctx: VarContext, seed: int) -> LinearForm:
    rng = seeded_rng(seed, f"linear-form:{ctx.n}")
    return LinearForm(tuple(draw_generic(rng, ctx.n)), seed)


# ---------------------------------------------------------------- weights

def quasihomogeneous_weights(f: Polynomial):
    """Positive weights ``w`` with every term of weighted degree 1, or None.

    Free directions of the weight system (variables whose weights are not
    pinned by the terms) are set to 1/2 before the positivity check.
    """
    if not f:
        raise ValueError("zero polynomial")
    n = f.ctx.n
    rows = [list(map(mpq, e)) + [mpq(1)] for e in f.terms]
    reduced, pivots = rref(rows)
    for row in reduced:
        if not any(row[:n]) and row[n]:
            return None
    if n in pivots:
        return None
    w = [None] * n
    free = [j for j in range(n) if j not in pivots]
    for j in free:
        w[j] = mpq(1, 2)
    for row, p in zip(reduced, pivots):
        w[p] = row[n] - sum(row[j] * w[j] for j in free)
    if any(x <= 0 for x in w):
        return None
    return tuple(w), mpq(1)


def generic_linear_forms(ctx: VarContext, seed: int, count: int) -> list:
    """``count`` independent draws; the first one equals ``generic_linear_form``."""
    out = [generic_linear_form(ctx, seed)]
    rng = seeded_rng(seed, f"linear-forms:{ctx.n}")
    for _ in range(count - 1):
        out.append(LinearForm(tuple(draw_generic(rng, ctx.n)), seed))
    return out[:count]


def solve_linear_form(ctx: VarContext, coefficients: Sequence):
    """Solve ``sum a_j x_j = 0`` for the variable with the largest |a_j|.

    Ties go to the smallest index.  Returns ``(i, g, smaller_ctx)`` where ``g``
    expresses x_i in the remaining variables.
    """
    coefficients = [mpq(c) for c in coefficients]
    if not any(coefficients):
        raise ZeroForm("cannot slice by the zero linear form")
    i = max(range(len(coefficients)), key=lambda j: (abs(coefficients[j]), -j))
    small = ctx.drop(i)
    a = coefficients[i]
    rest = coefficients[:i] + coefficients[i + 1:]
    g = Polynomial.from_linear(small, [-c / a for c in rest])
    return i, g, small
