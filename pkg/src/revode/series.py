"""Truncated Puiseux series and what is built on them.

A series is ``t^e * sum_k c_k t^(k/m) + O(t^prec)`` in the local coordinate t
at a point p (t = z - p, or t = 1/z at infinity).  ``prec is None`` marks an
exact (finite) series such as the expansion of a polynomial.

Solution bases (ordinary and Frobenius), closed-form expansions,
rational reconstruction, invariant evaluation and relation spaces live here.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from functools import reduce

from gmpy2 import mpq

from . import linalg
from .diffop import DiffOp, IrregularSingularity, _fuchs_data, is_ordinary, local_operator
from .funcfield import Poly, RatFunc, format_point, is_infinite, point, ratfunc
from .polys import MPoly, from_vector, monomial_exponents
from .scalars import Cyclotomic, format_scalar, inv, nth_root, scalar

try:
    DEFAULT_ORDER = int(os.environ.get("REVODE_ORDER", "60"))
except ValueError:  # the command line reports the bad value
    DEFAULT_ORDER = 60
DEFAULT_MARGIN = 10
CERT_SURPLUS = 10


class BasePointMismatch(ValueError):
    pass


class NonUnitLeading(ValueError):
    pass


class SingularBasePoint(ValueError):
    pass


class ResonanceObstruction(ArithmeticError):
    pass


class InsufficientOrder(ValueError):
    pass


class LogarithmRequired(ArithmeticError):
    pass


class SingularLeadingTerm(ZeroDivisionError):
    pass


class ArityMismatch(ValueError):
    pass


def _lcm(*xs):
    return reduce(lambda a, b: a * b // math.gcd(a, b), xs, 1)


def _pmin(*ps):
    ps = [p for p in ps if p is not None]
    return min(ps) if ps else None


def _grid_index(x, m):
    """x * m as an int, or None if x is not on the 1/m grid."""
    y = mpq(x) * m
    return int(y) if y.denominator == 1 else None


class PuiseuxSeries:
    __slots__ = ("point", "e", "m", "c", "prec")

    def __init__(self, pt, e, m, coeffs, prec):
        self.point = point(pt)
        self.m = int(m)
        self.e = mpq(e)
        c = [scalar(x) for x in coeffs]
        if prec is not None:
            prec = mpq(prec)
            n = _grid_index(prec - self.e, self.m)
            if n is None:
                raise ValueError("precision is not on the exponent grid")
            c = c[: max(n, 0)]
            c += [mpq(0)] * (max(n, 0) - len(c))
        else:
            while c and not c[-1]:
                c.pop()
        # strip leading zeros
        k = 0
        while k < len(c) and not c[k]:
            k += 1
        if k:
            c = c[k:]
            self.e = self.e + mpq(k, self.m)
        if not c:
            self.e = prec if prec is not None else mpq(0)
        self.c = tuple(c)
        self.prec = prec

    # construction ------------------------------------------------------
    @classmethod
    def zero(cls, pt, prec):
        return cls(pt, prec if prec is not None else 0, 1, [], prec)

    @classmethod
    def const(cls, pt, a, prec=None):
        return cls(pt, 0, 1, [a], prec)

    @classmethod
    def t(cls, pt):
        return cls(pt, 1, 1, [1], None)

    # queries -----------------------------------------------------------
    def is_zero(self):
        return not self.c

    def __bool__(self):
        return bool(self.c)

    @property
    def valuation(self):
        return self.e

    @property
    def lc(self):
        return self.c[0] if self.c else mpq(0)

    @property
    def order(self):
        """Number of retained coefficients."""
        return len(self.c)

    def is_exact(self):
        return self.prec is None

    def exponents(self):
        return [self.e + mpq(k, self.m) for k in range(len(self.c))]

    def coeff_at(self, x):
        x = mpq(x)
        if self.prec is not None and x >= self.prec:
            raise InsufficientOrder(f"coefficient of t^{x} beyond precision {self.prec}")
        k = _grid_index(x - self.e, self.m)
        if k is None or k < 0 or k >= len(self.c):
            return mpq(0)
        return self.c[k]

    def has_integer_exponents(self):
        return all(x.denominator == 1 for x, c in zip(self.exponents(), self.c) if c)

    def _check(self, o):
        if self.point != o.point:
            raise BasePointMismatch(f"{format_point(self.point)} vs {format_point(o.point)}")

    def _grid(self, e0, m, n):
        """Coefficients on the grid e0 + k/m, k < n."""
        if m % self.m:
            raise ValueError("grid refinement must be a multiple")
        out = [mpq(0)] * n
        step = m // self.m
        off = _grid_index(self.e - e0, m)
        if off is None:
            raise ValueError("series not on the requested grid")
        for k, a in enumerate(self.c):
            j = off + k * step
            if 0 <= j < n:
                out[j] = a
        return out

    def _span(self, e0, m):
        """Grid length from e0 needed to hold all retained data."""
        if self.prec is not None:
            return _grid_index(self.prec - e0, m)
        if not self.c:
            return 0
        return _grid_index(self.e - e0, m) + (len(self.c) - 1) * (m // self.m) + 1

    # arithmetic --------------------------------------------------------
    def _co(self, o):
        if isinstance(o, PuiseuxSeries):
            self._check(o)
            return o
        if isinstance(o, (RatFunc, Poly)):
            n = self.order + max(0, int(math.ceil(float(self.e))) + 4)
            return ratfunc_series(ratfunc(o), self.point, max(n, 1))
        return PuiseuxSeries.const(self.point, o)

    def __add__(self, o):
        o = self._co(o)
        if not o.c and o.prec is None:
            return self
        if not self.c and self.prec is None:
            return o
        d = self.e - o.e
        m = _lcm(self.m, o.m, int(d.denominator))
        e0 = min(self.e, o.e)
        prec = _pmin(self.prec, o.prec)
        if prec is not None:
            n = _grid_index(prec - e0, m)
            if n is None:
                m = _lcm(m, int((prec - e0).denominator))
                n = _grid_index(prec - e0, m)
        else:
            n = max(self._span(e0, m), o._span(e0, m))
        if n <= 0:
            return PuiseuxSeries.zero(self.point, prec)
        a = self._grid(e0, m, n)
        b = o._grid(e0, m, n)
        return PuiseuxSeries(self.point, e0, m, [x + y for x, y in zip(a, b)], prec)

    __radd__ = __add__

    def __neg__(self):
        return PuiseuxSeries(self.point, self.e, self.m, [-x for x in self.c], self.prec)

    def __sub__(self, o):
        return self + (-self._co(o))

    def __rsub__(self, o):
        return self._co(o) - self

    def scale(self, a):
        a = scalar(a)
        if not a:
            return PuiseuxSeries.zero(self.point, self.prec)
        return PuiseuxSeries(self.point, self.e, self.m, [x * a for x in self.c], self.prec)

    def __mul__(self, o):
        if not isinstance(o, (PuiseuxSeries, RatFunc, Poly)):
            return self.scale(o)
        o = self._co(o)
        e = self.e + o.e
        m = _lcm(self.m, o.m)
        p1 = None if self.prec is None else self.prec + o.e
        p2 = None if o.prec is None else o.prec + self.e
        if not self.c and self.prec is not None:
            p1 = self.prec + (o.e if o.c else (o.prec if o.prec is not None else 0))
        if not o.c and o.prec is not None:
            p2 = o.prec + (self.e if self.c else (self.prec if self.prec is not None else 0))
        prec = _pmin(p1, p2)
        if not self.c or not o.c:
            return PuiseuxSeries.zero(self.point, prec)
        if prec is not None:
            n = _grid_index(prec - e, m)
        else:
            n = (len(self.c) - 1) * (m // self.m) + (len(o.c) - 1) * (m // o.m) + 1
        if n <= 0:
            return PuiseuxSeries.zero(self.point, prec)
        a = self._grid(self.e, m, min(n, self._span(self.e, m)))
        b = o._grid(o.e, m, min(n, o._span(o.e, m)))
        out = [mpq(0)] * n
        for i, x in enumerate(a):
            if not x:
                continue
            for j in range(min(len(b), n - i)):
                y = b[j]
                if y:
                    out[i + j] += x * y
        return PuiseuxSeries(self.point, e, m, out, prec)

    __rmul__ = __mul__

    def __pow__(self, k):
        if isinstance(k, int) and k >= 0:
            out = PuiseuxSeries.const(self.point, 1)
            base = self
            while k:
                if k & 1:
                    out = out * base
                k >>= 1
                if k:
                    base = base * base
            return out
        return self.pow_rational(mpq(k))

    def __truediv__(self, o):
        if isinstance(o, (PuiseuxSeries, RatFunc, Poly)):
            return self * self._co(o).pow_rational(-1)
        return self.scale(inv(scalar(o)))

    def __rtruediv__(self, o):
        return self._co(o) * self.pow_rational(-1)

    def truncate(self, prec):
        prec = mpq(prec)
        if self.prec is not None and prec > self.prec:
            raise InsufficientOrder("cannot raise precision")
        if prec <= self.e or not self.c:
            return PuiseuxSeries.zero(self.point, prec)
        m = _lcm(self.m, int((prec - self.e).denominator))
        n = _grid_index(prec - self.e, m)
        return PuiseuxSeries(self.point, self.e, m, self._grid(self.e, m, n), prec)

    def derivative(self):
        """d/dt of the series."""
        out = [(self.e + mpq(k, self.m)) * a for k, a in enumerate(self.c)]
        prec = None if self.prec is None else self.prec - 1
        if not self.c:
            return PuiseuxSeries.zero(self.point, prec)
        return PuiseuxSeries(self.point, self.e - 1, self.m, out, prec)

    def d_dz(self):
        """Derivative with respect to the global coordinate z."""
        d = self.derivative()
        if is_infinite(self.point):
            # t = 1/z, d/dz = -t^2 d/dt
            return d * PuiseuxSeries(self.point, 2, 1, [-1], None)
        return d

    def integrate(self):
        """Antiderivative in t with zero constant term."""
        out = []
        for k, a in enumerate(self.c):
            x = self.e + mpq(k, self.m)
            if x == -1:
                if a:
                    raise LogarithmRequired("t^-1 term in integrand")
                out.append(mpq(0))
                continue
            out.append(a / (x + 1))
        prec = None if self.prec is None else self.prec + 1
        if not self.c:
            return PuiseuxSeries.zero(self.point, prec)
        return PuiseuxSeries(self.point, self.e + 1, self.m, out, prec)

    def integrate_dz(self):
        if is_infinite(self.point):
            # dz = -dt / t^2
            return (self * PuiseuxSeries(self.point, -2, 1, [-1], None)).integrate()
        return self.integrate()

    def pow_rational(self, q, lead=None, branch=0):
        """s^q with the leading factor c0^q given or taken as a principal root."""
        q = mpq(q)
        if not self.c:
            raise NonUnitLeading("power of the zero series")
        c0 = self.c[0]
        if lead is None:
            if q.denominator == 1:
                lead = c0 ** int(q) if int(q) >= 0 else inv(c0) ** (-int(q))
            else:
                r = nth_root(c0, int(q.denominator), branch)
                a = int(q.numerator)
                lead = r ** a if a >= 0 else inv(r) ** (-a)
        ic0 = inv(c0)
        u = [x * ic0 for x in self.c]  # unit part, u[0] = 1
        n = len(u) if self.prec is not None else None
        if n is None:
            if q.denominator == 1 and q >= 0:
                return (PuiseuxSeries(self.point, 0, self.m, u, None) ** int(q)).scale(lead) * PuiseuxSeries(
                    self.point, self.e * q, 1, [1], None
                )
            raise InsufficientOrder("power of an exact series needs a target precision")
        g = _miller_power(u, q, n)
        return PuiseuxSeries(self.point, self.e * q, self.m, [x * lead for x in g], self.e * q + mpq(n, self.m))

    def with_precision(self, n):
        """Exact series truncated to n coefficients past its valuation."""
        if self.prec is not None:
            return self
        return PuiseuxSeries(self.point, self.e, self.m, self.c, self.e + mpq(n, self.m))

    def exp(self):
        """exp of a series with positive valuation."""
        if self.c and self.e <= 0:
            raise ValueError("exp needs positive valuation")
        if self.prec is None:
            raise InsufficientOrder("exp of an exact series needs a target precision")
        m = _lcm(self.m, int(self.e.denominator)) if self.c else self.m
        m = _lcm(m, int(self.prec.denominator))
        n = _grid_index(self.prec, m)
        f = self._grid(mpq(0), m, n) if self.c else [mpq(0)] * n
        g = [mpq(0)] * n
        if n:
            g[0] = mpq(1)
        for k in range(1, n):
            acc = mpq(0)
            for j in range(1, k + 1):
                if f[j]:
                    acc += j * f[j] * g[k - j]
            g[k] = acc / k
        return PuiseuxSeries(self.point, 0, m, g, self.prec)

    def scale_exponent(self, a):
        """Substitute t -> t^a (a positive rational)."""
        a = mpq(a)
        if a <= 0:
            raise ValueError("exponent scale must be positive")
        p, q = int(a.numerator), int(a.denominator)
        m = self.m * q
        out = []
        for k, x in enumerate(self.c):
            out.append(x)
            if k < len(self.c) - 1:
                out.extend([mpq(0)] * (p - 1))
        prec = None if self.prec is None else self.prec * a
        if prec is not None:
            n = _grid_index(prec - self.e * a, m)
            out = out[:n] + [mpq(0)] * max(0, n - len(out))
        return PuiseuxSeries(self.point, self.e * a, m, out, prec)

    def compose_with_map(self, phi: "PuiseuxSeries", lead_power=None):
        """s(phi(t)) for a local map phi = l*t + ... fixing the base point."""
        self._check(phi)
        if not phi.c or phi.e != 1:
            raise ValueError("local map must have valuation exactly 1")
        if not self.c:
            return PuiseuxSeries.zero(self.point, self.prec)
        psi = phi.pow_rational(mpq(1, self.m)) if self.m > 1 else phi
        acc = None
        pw = PuiseuxSeries.const(self.point, 1)
        for k, a in enumerate(self.c):
            if k:
                pw = pw * psi
            if a:
                term = pw.scale(a)
                acc = term if acc is None else acc + term
        if self.prec is not None:
            acc = acc + PuiseuxSeries.zero(self.point, self.prec - self.e)
        lead = phi.pow_rational(self.e, lead=lead_power)
        return lead * acc

    # equality / printing ----------------------------------------------
    def __eq__(self, o):
        if not isinstance(o, PuiseuxSeries):
            return NotImplemented
        if self.point != o.point or self.prec != o.prec:
            return False
        return (self - o).is_zero()

    def __hash__(self):
        return hash((self.point, self.prec))

    def to_str(self, var="t"):
        def frac(x):
            x = mpq(x)
            return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"

        terms = []
        for k, a in enumerate(self.c):
            if not a:
                continue
            cs = format_scalar(a)
            if isinstance(a, Cyclotomic) and " " in cs:
                cs = f"({cs})"
            if k == 0:
                terms.append(cs)
            else:
                terms.append(f"{cs}*{var}^({frac(mpq(k, self.m))})")
        body = " + ".join(terms) if terms else "0"
        o = "" if self.prec is None else f" + O({var}^({frac(self.prec)}))"
        return f"{var}^({frac(self.e)}) * ({body}){o}"

    def __repr__(self):
        return f"PuiseuxSeries[{format_point(self.point)}]({self.to_str()})"


def _miller_power(u, q, n):
    """Coefficients of u^q for a unit series u (u[0] = 1) to n terms."""
    g = [mpq(0)] * n
    if n == 0:
        return g
    g[0] = mpq(1)
    for k in range(1, n):
        acc = mpq(0)
        for j in range(1, min(k, len(u) - 1) + 1):
            if u[j]:
                acc += ((q + 1) * j - k) * u[j] * g[k - j]
        g[k] = acc / k
    return g


# ---------------------------------------------------------------------------
# expansions of rational functions


def local_ratfunc(f: RatFunc, p) -> RatFunc:
    """f written in the local coordinate t at p."""
    p = point(p)
    if is_infinite(p):
        return f.at_infinity_chart()
    return f.taylor_shift(p) if p else f


def _poly_series(poly: Poly, pt):
    if not poly:
        return PuiseuxSeries(pt, 0, 1, [], None)
    return PuiseuxSeries(pt, 0, 1, poly.c, None)


def ratfunc_series(f, p, n=DEFAULT_ORDER) -> PuiseuxSeries:
    """Laurent expansion of f at p with n coefficients from the valuation."""
    f = ratfunc(f)
    p = point(p)
    g = local_ratfunc(f, p)
    if g.den.deg == 0:
        return _poly_series(g.num * inv(g.den.lc), p)
    num, den = g.num, g.den
    v_den = den.valuation()
    d = list(den.c[v_den:])
    v_num = num.valuation() if num else 0
    a = list(num.c[v_num:]) if num else []
    # power series a / d to n terms
    id0 = inv(d[0])
    out = []
    for k in range(n):
        acc = a[k] if k < len(a) else mpq(0)
        for j in range(1, min(k, len(d) - 1) + 1):
            if d[j]:
                acc -= d[j] * out[k - j]
        out.append(acc * id0)
    e = v_num - v_den
    return PuiseuxSeries(p, e, 1, out, e + n)


def series_to_local_poly(s: PuiseuxSeries):
    """(Poly in t, shift) for an exact series with integer exponents."""
    if not s.has_integer_exponents():
        raise ValueError("non-integer exponents")
    coeffs = {}
    for x, a in zip(s.exponents(), s.c):
        if a:
            coeffs[int(x)] = a
    return coeffs


# ---------------------------------------------------------------------------
# solving operators


def _cleared_local(L: DiffOp, p):
    """Polynomial coefficients P_i(t) of the local operator, denominators cleared."""
    M = local_operator(L, p)
    return [c.num for c in M.canonical().coeffs]


def _theta_data(L: DiffOp, p):
    P = _cleared_local(L, p)
    Q = {}
    x = Poly.x()
    ff = [Poly.const(1)]
    for i in range(1, len(P)):
        ff.append(ff[-1] * (x - (i - 1)))
    for i, Pi in enumerate(P):
        for j, a in enumerate(Pi.c):
            if a:
                d = j - i
                Q[d] = Q.get(d, Poly()) + ff[i] * a
    Q = {d: q for d, q in Q.items() if q}
    dmin = min(Q)
    return Q, dmin


def frobenius(L: DiffOp, p, e, K=DEFAULT_ORDER, free=None) -> PuiseuxSeries:
    """Series solution t^e (1 + ...) with K coefficients.

    ``free`` optionally fixes coefficients c_k at resonant indices (default 0).
    """
    p = point(p)
    regular, _, _ = _fuchs_data(L, p)
    if not regular:
        raise IrregularSingularity(f"irregular singularity at {format_point(p)}")
    e = mpq(e)
    Q, dmin = _theta_data(L, p)
    if Q[dmin](e):
        raise ValueError(f"{e} is not an indicial root at {format_point(p)}")
    shifts = sorted((d - dmin, q) for d, q in Q.items() if d > dmin)
    q0 = Q[dmin]
    c = [mpq(1)]
    free = free or {}
    for k in range(1, K):
        rhs = mpq(0)
        for s, q in shifts:
            if s > k:
                break
            ck = c[k - s]
            if ck:
                rhs -= ck * q(e + k - s)
        den = q0(e + k)
        if den:
            c.append(rhs / den)
        elif rhs:
            raise ResonanceObstruction(f"logarithmic term forced at exponent {e + k}")
        else:
            c.append(scalar(free.get(k, 0)))
    return PuiseuxSeries(p, e, 1, c, e + K)


def residual(L: DiffOp, y: PuiseuxSeries) -> PuiseuxSeries:
    """sum P_i(t) y^(i) for the cleared local operator (zero iff L(y) vanishes)."""
    P = _cleared_local(L, y.point)
    acc = None
    d = y
    for i, Pi in enumerate(P):
        if i:
            d = d.derivative()
        if Pi:
            term = _poly_series(Pi, y.point) * d
            acc = term if acc is None else acc + term
    return acc


def apply_series(L: DiffOp, y: PuiseuxSeries, n=None) -> PuiseuxSeries:
    """L(y) with y a series in t at its base point, derivatives in the global z."""
    pt = y.point
    n = n or (y.order + 8)
    acc = None
    d = y
    for i, a in enumerate(L.coeffs):
        if i:
            d = d.d_dz()
        if a:
            term = ratfunc_series(a, pt, n) * d
            acc = term if acc is None else acc + term
    return acc


@dataclass
class SolutionMatrix:
    """entries[i][j]: (i)-th z-derivative of solution j (rows are derivatives)."""

    entries: list
    point: object
    labels: list = field(default_factory=list)

    @property
    def n(self):
        return len(self.entries)

    @classmethod
    def from_solutions(cls, sols, labels=None, rows=None):
        n = rows or len(sols)
        cols = []
        for s in sols:
            col = [s]
            for _ in range(n - 1):
                col.append(col[-1].d_dz())
            cols.append(col)
        entries = [[cols[j][i] for j in range(len(sols))] for i in range(n)]
        return cls(entries, sols[0].point, list(labels or []))

    def solutions(self):
        return list(self.entries[0])

    def values(self):
        n = len(self.entries)
        return {f"X[{i + 1},{j + 1}]": self.entries[i][j] for i in range(n) for j in range(len(self.entries[0]))}

    def named(self):
        if not self.labels:
            raise ValueError("solution matrix has no labels")
        return {lab: s for lab, s in zip(self.labels, self.entries[0])}


def ordinary_basis(L: DiffOp, p, K=DEFAULT_ORDER) -> SolutionMatrix:
    p = point(p)
    if not is_ordinary(L, p):
        raise SingularBasePoint(f"{format_point(p)} is a singular point")
    sols = [frobenius(L, p, j, K) for j in range(L.order)]
    return SolutionMatrix.from_solutions(sols)


def frobenius_basis(L: DiffOp, p, exponents, K=DEFAULT_ORDER, labels=None) -> SolutionMatrix:
    sols = [frobenius(L, p, e, K) for e in exponents]
    return SolutionMatrix.from_solutions(sols, labels=labels)


# ---------------------------------------------------------------------------
# closed forms


@dataclass
class ClosedForm:
    """prod base_i^q_i * exp(sum_j sign_j * integral(integrand_j)).

    An integrand is (RatFunc coefficient, [(base, q), ...]).  Powers of the
    same base share one chosen root of the leading coefficient, so e.g.
    (z^4-1)^(1/4) and (z^4-1)^(-1/2) stay on consistent branches.
    """

    powers: list = field(default_factory=list)
    integrands: list = field(default_factory=list)


def _base_root_table(recipe: ClosedForm, p, n, branch):
    bases = {}
    for b, q in recipe.powers:
        bases.setdefault(ratfunc(b), []).append(mpq(q))
    for _, factors in recipe.integrands:
        for b, q in factors:
            bases.setdefault(ratfunc(b), []).append(mpq(q))
    table = {}
    for b, qs in bases.items():
        M = _lcm(*(int(q.denominator) for q in qs))
        s = ratfunc_series(b, p, n).with_precision(n)
        br = branch.get(b, 0) if isinstance(branch, dict) else branch
        rho = nth_root(s.lc, M, br % M if M > 1 else 0)
        table[b] = (s, M, rho)
    return table


def _power(table, b, q):
    s, M, rho = table[ratfunc(b)]
    k = int(q * M)
    lead = rho ** k if k >= 0 else inv(rho) ** (-k)
    return s.pow_rational(q, lead=lead)


def closed_form_series(recipe: ClosedForm, p, K=DEFAULT_ORDER, branch=0) -> PuiseuxSeries:
    p = point(p)
    n = K + 4
    table = _base_root_table(recipe, p, n, branch)
    acc = PuiseuxSeries.const(p, 1)
    for b, q in recipe.powers:
        acc = acc * _power(table, b, mpq(q))
    expo = None
    for coeff, factors in recipe.integrands:
        term = ratfunc_series(ratfunc(coeff), p, n).with_precision(n)
        for b, q in factors:
            term = term * _power(table, b, mpq(q))
        integral = term.integrate_dz()
        if integral.c and integral.e <= 0:
            raise LogarithmRequired("antiderivative has a pole or constant part")
        expo = integral if expo is None else expo + integral
    if expo is not None:
        acc = acc * expo.exp()
    lead = acc.e
    return acc.truncate(lead + mpq(K, acc.m)) if acc.prec is None or acc.prec > lead + mpq(K, acc.m) else acc


# ---------------------------------------------------------------------------
# matrices of series


def series_matmul(a, b):
    n, k, m = len(a), len(b), len(b[0])
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            acc = None
            for t in range(k):
                term = a[i][t] * b[t][j]
                acc = term if acc is None else acc + term
            row.append(acc)
        out.append(row)
    return out


def _det(mat):
    n = len(mat)
    if n == 1:
        return mat[0][0]
    acc = None
    for j in range(n):
        minor = [row[:j] + row[j + 1 :] for row in mat[1:]]
        term = mat[0][j] * _det(minor)
        if j % 2:
            term = -term
        acc = term if acc is None else acc + term
    return acc


def invert_matrix_series(S) -> list:
    """Inverse of a square matrix of series (adjugate over determinant)."""
    mat = S.entries if isinstance(S, SolutionMatrix) else S
    n = len(mat)
    d = _det(mat)
    if d.is_zero():
        raise SingularLeadingTerm("determinant vanishes to available order")
    dinv = d.pow_rational(-1)
    out = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [row[:i] + row[i + 1 :] for k, row in enumerate(mat) if k != j]
            c = _det(minor) if n > 1 else PuiseuxSeries.const(mat[0][0].point, 1)
            if (i + j) % 2:
                c = -c
            out[i][j] = c * dinv
    return out


def is_identity_matrix(M) -> bool:
    for i, row in enumerate(M):
        for j, s in enumerate(row):
            target = s - 1 if i == j else s
            if not target.is_zero():
                return False
    return True


def matrix_series(A, pt, n) -> list:
    return [[ratfunc_series(x, pt, n) for x in row] for row in A]


# ---------------------------------------------------------------------------
# reconstruction and invariants


def rational_reconstruct(s: PuiseuxSeries, deg_num=None, deg_den=None, margin=DEFAULT_MARGIN, var_point=None):
    """A rational function of z whose expansion matches every retained coefficient, or None."""
    if not s.has_integer_exponents() or s.e.denominator != 1:
        return None
    pt = s.point
    if s.prec is None:
        coeffs = series_to_local_poly(s)
        lo = min(coeffs, default=0)
        num = Poly([coeffs.get(k + lo, 0) for k in range(max(coeffs, default=0) - lo + 1)])
        f = RatFunc(num) * RatFunc(Poly.monomial(-lo, 1)).inverse() if lo < 0 else RatFunc(num * Poly.monomial(lo, 1))
        return _from_local(f, pt)
    if not s.c:
        return RatFunc(0)
    v = int(s.e)
    if s.m != 1:
        m_ok = all(not a for k, a in enumerate(s.c) if k % s.m)
        if not m_ok:
            return None
        a = [x for k, x in enumerate(s.c) if k % s.m == 0]
    else:
        a = list(s.c)
    N = len(a)
    if deg_num is None or deg_den is None:
        d = (N - margin - 1) // 2
        if d < 0:
            raise InsufficientOrder(f"{N} coefficients are too few for margin {margin}")
        deg_num = d if deg_num is None else deg_num
        deg_den = d if deg_den is None else deg_den
    if N < deg_num + deg_den + 1 + margin:
        raise InsufficientOrder(f"need {deg_num + deg_den + 1 + margin} coefficients, have {N}")
    dn, dd = deg_num, deg_den
    # Q * a - P = 0 mod t^(dn+dd+1): rows k = dn+1 .. dn+dd, unknowns Q_0..Q_dd
    rows = []
    for k in range(dn + 1, dn + dd + 1):
        rows.append([a[k - j] if k - j >= 0 else mpq(0) for j in range(dd + 1)])
    basis = linalg.nullspace(rows, dd + 1) if rows else [[mpq(1)]]
    if not basis:
        return None
    qv = basis[0]
    Q = Poly(qv)
    Pc = []
    for k in range(dn + 1):
        Pc.append(sum((qv[j] * a[k - j] for j in range(min(k, dd) + 1)), mpq(0)))
    P = Poly(Pc)
    if not Q:
        return None
    f = RatFunc(P, Q)
    if f.den.coeff(0) == 0:
        return None
    # verify against every retained coefficient
    chk = ratfunc_series(f, 0, N)
    got = list(chk.c) + [mpq(0)] * N
    off = int(chk.e) if chk.c else 0
    for k in range(N):
        want = a[k]
        have = got[k - off] if 0 <= k - off < len(chk.c) else mpq(0)
        if want != have:
            return None
    loc = f * RatFunc(Poly.monomial(v, 1)) if v >= 0 else f / RatFunc(Poly.monomial(-v, 1))
    return _from_local(loc, pt)


def _from_local(f: RatFunc, pt) -> RatFunc:
    if is_infinite(pt):
        return f.at_infinity_chart()
    if pt:
        return f.taylor_shift(-pt)
    return f


def eval_poly(P: MPoly, values: dict, pt, n) -> PuiseuxSeries:
    """Substitute series for the variables; RatFunc coefficients are expanded at pt."""
    missing = [v for v in P.vars if v not in values]
    if missing:
        raise ArityMismatch(f"no value for {missing}")
    vals = [values[v] for v in P.vars]
    if not any(isinstance(c, RatFunc) for c in P.terms.values()):
        return P.evaluate(vals, one=PuiseuxSeries.const(pt, 1))
    acc = None
    for e, c in P.sorted_terms():
        term = PuiseuxSeries.const(pt, 1)
        for k, ek in enumerate(e):
            for _ in range(ek):
                term = term * vals[k]
        cs = ratfunc_series(c, pt, n) if isinstance(c, RatFunc) else c
        term = term * cs
        acc = term if acc is None else acc + term
    return acc if acc is not None else PuiseuxSeries.zero(pt, None)


def eval_invariant(P: MPoly, S: SolutionMatrix) -> PuiseuxSeries:
    vals = S.values()
    for v in P.vars:
        if v not in vals:
            if S.labels and v in S.labels:
                vals = {**vals, **S.named()}
            else:
                raise ArityMismatch(f"variable {v} not available for a {S.n}x{S.n} matrix")
    n = max(s.order for row in S.entries for s in row) + 8
    return eval_poly(P, vals, S.point, n)


@dataclass
class DualFirstIntegral:
    poly: MPoly
    value: RatFunc
    degree: int


def dual_first_integral(P: MPoly, S: SolutionMatrix, bounds=None, margin=DEFAULT_MARGIN):
    s = eval_invariant(P, S)
    dn, dd = bounds if bounds else (None, None)
    f = rational_reconstruct(s, dn, dd, margin)
    if f is None:
        return None
    return DualFirstIntegral(P, f, P.degree)


def check_relation(Q: MPoly, S: SolutionMatrix) -> bool:
    s = eval_invariant(Q, S)
    return s.is_zero() and s.prec is not None


@dataclass
class RelationSpace:
    basis: list
    monomial_count: int
    conditions: int
    certified_to: object
    variables: tuple

    @property
    def surplus(self):
        return self.conditions - self.monomial_count

    @property
    def dimension(self):
        return len(self.basis)


def relation_space(sols, d: int, K=None, names=None, surplus=CERT_SURPLUS, info=False):
    """Degree-d homogeneous relations among the given solutions (named series)."""
    if isinstance(sols, SolutionMatrix):
        if sols.labels:
            named = sols.named()
        else:
            named = {f"Y{j + 1}": s for j, s in enumerate(sols.solutions())}
    elif isinstance(sols, dict):
        named = dict(sols)
    else:
        names = names or [f"Y{j + 1}" for j in range(len(sols))]
        named = dict(zip(names, sols))
    variables = tuple(named)
    series = [named[v] for v in variables]
    if K is not None:
        series = [s.truncate(s.e + K) if s.prec is None or s.prec > s.e + K else s for s in series]
    exps = monomial_exponents(len(variables), d)
    evals = []
    one = PuiseuxSeries.const(series[0].point, 1)
    for e in exps:
        term = one
        for k, ek in enumerate(e):
            for _ in range(ek):
                term = term * series[k]
        evals.append(term)
    nonzero = [s for s in evals if s.c]
    prec = _pmin(*(s.prec for s in evals))
    if prec is None:
        raise InsufficientOrder("exact inputs: nothing to certify")
    e0 = min((s.e for s in nonzero), default=prec)
    m = _lcm(*(s.m for s in evals), *(int((s.e - e0).denominator) for s in nonzero), int((prec - e0).denominator))
    n = _grid_index(prec - e0, m)
    grids = [s._grid(e0, m, n) if s.c else [mpq(0)] * n for s in evals]
    rows = [[grids[c][r] for c in range(len(exps))] for r in range(n)]
    if n < len(exps) + surplus:
        raise InsufficientOrder(f"{n} conditions for {len(exps)} monomials; need a surplus of {surplus}")
    conditions = n
    rows = [r for r in rows if any(r)]
    basis = linalg.nullspace(rows, len(exps)) if rows else []
    # present the basis in reduced echelon form over the monomials
    if basis:
        red, _ = linalg.rref(basis)
        basis = [r for r in red if any(r)]
    polys = [from_vector(variables, exps, v) for v in basis]
    if info:
        return RelationSpace(polys, len(exps), conditions, prec, variables)
    return polys
