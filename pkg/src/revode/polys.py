"""Sparse multivariate polynomials in named indeterminates.

Used for invariants in the matrix indeterminates ``X[i,j]`` (row i is the
derivative order i-1, column j the solution) and for relations among named
solutions such as X, Y, Z.  Coefficients are scalars or, for relations with
function coefficients, RatFunc values.
"""

from __future__ import annotations

import itertools
from functools import reduce

from gmpy2 import mpq

from .scalars import format_scalar, scalar


def matrix_vars(n: int) -> tuple:
    return tuple(f"X[{i},{j}]" for i in range(1, n + 1) for j in range(1, n + 1))


def _coerce(c):
    if hasattr(c, "num") and hasattr(c, "den"):
        return c.num.c[0] if c.is_constant() and c.num.c else (mpq(0) if not c else c)
    return scalar(c)


class MPoly:
    __slots__ = ("vars", "terms")

    def __init__(self, variables, terms=None):
        self.vars = tuple(variables)
        t = {}
        for e, c in (terms or {}).items():
            e = tuple(e)
            if len(e) != len(self.vars):
                raise ValueError("exponent length does not match variables")
            c = _coerce(c)
            if c:
                t[e] = c
        self.terms = t

    @classmethod
    def var(cls, variables, name):
        variables = tuple(variables)
        e = [0] * len(variables)
        e[variables.index(name)] = 1
        return cls(variables, {tuple(e): 1})

    @classmethod
    def const(cls, variables, c):
        return cls(variables, {(0,) * len(tuple(variables)): c})

    @classmethod
    def gens(cls, variables):
        return [cls.var(variables, v) for v in variables]

    # ------------------------------------------------------------------
    def _co(self, o):
        if isinstance(o, MPoly):
            if o.vars != self.vars:
                raise ValueError("polynomials over different variables")
            return o
        return MPoly.const(self.vars, o)

    def __add__(self, o):
        o = self._co(o)
        t = dict(self.terms)
        for e, c in o.terms.items():
            t[e] = t[e] + c if e in t else c
        return MPoly(self.vars, t)

    __radd__ = __add__

    def __neg__(self):
        return MPoly(self.vars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, o):
        return self + (-self._co(o))

    def __rsub__(self, o):
        return self._co(o) - self

    def __mul__(self, o):
        if not isinstance(o, MPoly):
            o = _coerce(o)
            return MPoly(self.vars, {e: c * o for e, c in self.terms.items()})
        o = self._co(o)
        t = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in o.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                t[e] = t[e] + c1 * c2 if e in t else c1 * c2
        return MPoly(self.vars, t)

    __rmul__ = __mul__

    def __truediv__(self, c):
        return self * (1 / _coerce(c))

    def __pow__(self, k: int):
        out = MPoly.const(self.vars, 1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, o):
        if not isinstance(o, MPoly):
            try:
                o = self._co(o)
            except (TypeError, ValueError):
                return NotImplemented
        return self.vars == o.vars and self.terms == o.terms

    def __hash__(self):
        return hash((self.vars, frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    # ------------------------------------------------------------------
    @property
    def degree(self):
        return max((sum(e) for e in self.terms), default=0)

    def is_homogeneous(self):
        return len({sum(e) for e in self.terms}) <= 1

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda ec: (-sum(ec[0]), tuple(-x for x in ec[0])))

    def coefficient(self, exps):
        return self.terms.get(tuple(exps), mpq(0))

    def monic(self):
        """Scale so that the leading term (in canonical order) has coefficient 1."""
        if not self.terms:
            return self
        return self * (1 / self.sorted_terms()[0][1])

    def evaluate(self, values, one=None):
        """Substitute values (dict by name or sequence); ring operations only."""
        if isinstance(values, dict):
            values = [values[v] for v in self.vars]
        powers = [dict() for _ in self.vars]
        acc = None
        for e, c in self.sorted_terms():
            term = None
            for k, ek in enumerate(e):
                if not ek:
                    continue
                if ek not in powers[k]:
                    p = values[k]
                    for _ in range(ek - 1):
                        p = p * values[k]
                    powers[k][ek] = p
                term = powers[k][ek] if term is None else term * powers[k][ek]
            if term is None:
                term = c if one is None else one * c
            else:
                term = term * c
            acc = term if acc is None else acc + term
        if acc is None:
            return mpq(0) if one is None else one * 0
        return acc

    def linear_substitute(self, images):
        """Replace each variable by the given MPoly (same variable set)."""
        one = MPoly.const(self.vars, 1)
        return self.evaluate(list(images), one=one)

    def rename(self, variables):
        return MPoly(variables, self.terms)

    def to_str(self):
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            mon = "*".join(v if k == 1 else f"{v}^{k}" for v, k in zip(self.vars, e) if k)
            cs = format_scalar(c) if not hasattr(c, "to_str") else c.to_str()
            if not mon:
                parts.append(cs if " " not in cs else f"({cs})")
            elif cs == "1":
                parts.append(mon)
            elif cs == "-1":
                parts.append("-" + mon)
            elif " " in cs or "/" in cs and hasattr(c, "to_str"):
                parts.append(f"({cs})*{mon}")
            else:
                parts.append(f"{cs}*{mon}")
        s = parts[0]
        for p in parts[1:]:
            s += " - " + p[1:] if p.startswith("-") else " + " + p
        return s

    def __str__(self):
        return self.to_str()

    def __repr__(self):
        return f"MPoly({self.to_str()})"


HomogPoly = MPoly


def monomial_exponents(nvars: int, d: int):
    """All exponent vectors of total degree d, in canonical (descending lex) order."""
    out = []
    for combo in itertools.combinations_with_replacement(range(nvars), d):
        e = [0] * nvars
        for k in combo:
            e[k] += 1
        out.append(tuple(e))
    return sorted(set(out), reverse=True)


def monomials(variables, d: int):
    variables = tuple(variables)
    return [MPoly(variables, {e: 1}) for e in monomial_exponents(len(variables), d)]


def from_vector(variables, exps, vec):
    return MPoly(variables, {e: c for e, c in zip(exps, vec)})


def quadratic_form_rank(P: MPoly) -> int:
    """Rank of the symmetric matrix of a quadratic form."""
    from .linalg import rank

    if not P.is_homogeneous() or P.degree != 2:
        raise ValueError("not a quadratic form")
    n = len(P.vars)
    m = [[mpq(0)] * n for _ in range(n)]
    for e, c in P.terms.items():
        idx = [k for k, ek in enumerate(e) for _ in range(ek)]
        i, j = idx
        if i == j:
            m[i][i] = m[i][i] + c
        else:
            m[i][j] = m[i][j] + c / 2
            m[j][i] = m[j][i] + c / 2
    return rank(m)


def common_vars(polys):
    return reduce(lambda a, b: a if a == b else None, (p.vars for p in polys))
