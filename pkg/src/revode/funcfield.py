"""Univariate polynomials and rational functions over the session cyclotomic field.

Also: points of the projective line, Moebius maps, rational maps, restricted
root finding, and the quadratic extension k(w), w^2 = p(z), with its
derivation.
"""

from __future__ import annotations

import math
from functools import reduce

from gmpy2 import mpq, mpz

from .scalars import (
    MPQ,
    Cyclotomic,
    DivisionByZero,
    NoRootInField,
    OrderNotSupported,
    as_monomial,
    format_scalar,
    get_field,
    inv,
    nth_root,
    scalar,
)


class DegenerateTriple(ValueError):
    pass


class ModulusMismatch(ValueError):
    pass


# ---------------------------------------------------------------------------
# points of the projective line


class _Infinity:
    __slots__ = ()

    def __repr__(self):
        return "oo"

    __str__ = __repr__

    def __eq__(self, other):
        return isinstance(other, _Infinity)

    def __hash__(self):
        return hash("projective-infinity")

    def __reduce__(self):
        return (_infinity, ())


def _infinity():
    return oo


oo = _Infinity()


def is_infinite(p) -> bool:
    return isinstance(p, _Infinity)


def point(p):
    """Coerce to a point of the projective line (scalar or ``oo``)."""
    if isinstance(p, _Infinity):
        return p
    if isinstance(p, str) and p.strip() in ("oo", "infinity", "inf"):
        return oo
    return scalar(p)


def format_point(p) -> str:
    return "oo" if is_infinite(p) else format_scalar(p)


def point_key(p):
    """Deterministic sort key for points."""
    if is_infinite(p):
        return (2,)
    if isinstance(p, Cyclotomic):
        return (1, tuple((k, float(v), str(v)) for k, v in p.c))
    return (0, float(p), str(p))


# ---------------------------------------------------------------------------


def _trim(c):
    c = list(c)
    while c and not c[-1]:
        c.pop()
    return tuple(c)


class Poly:
    """Dense univariate polynomial, ascending coefficients."""

    __slots__ = ("c",)

    def __init__(self, coeffs=()):
        self.c = _trim(scalar(x) for x in coeffs)

    @classmethod
    def _raw(cls, c):
        p = object.__new__(cls)
        p.c = c
        return p

    @classmethod
    def x(cls):
        return cls._raw((mpq(0), mpq(1)))

    @classmethod
    def const(cls, a):
        return cls((a,))

    @classmethod
    def monomial(cls, k, a=1):
        return cls([0] * k + [a])

    # basic data -------------------------------------------------------------
    @property
    def deg(self) -> int:
        return len(self.c) - 1

    def __len__(self):
        return len(self.c)

    @property
    def lc(self):
        return self.c[-1] if self.c else mpq(0)

    def coeff(self, k):
        return self.c[k] if 0 <= k < len(self.c) else mpq(0)

    def is_zero(self):
        return not self.c

    def __bool__(self):
        return bool(self.c)

    def is_constant(self):
        return len(self.c) <= 1

    def is_rational(self):
        return all(isinstance(a, MPQ) for a in self.c)

    def valuation(self) -> int:
        for k, a in enumerate(self.c):
            if a:
                return k
        raise ValueError("valuation of zero polynomial")

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.c == other.c
        if isinstance(other, RatFunc):
            return other == self
        try:
            return self.c == Poly.const(other).c
        except TypeError:
            return NotImplemented

    def __hash__(self):
        return hash(self.c)

    # arithmetic -----------------------------------------------------------------
    @staticmethod
    def _co(o):
        if isinstance(o, Poly):
            return o
        return Poly.const(o)

    def __add__(self, o):
        if isinstance(o, RatFunc):
            return NotImplemented
        o = self._co(o)
        a, b = self.c, o.c
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, x in enumerate(b):
            out[i] = out[i] + x
        return Poly._raw(_trim(out))

    __radd__ = __add__

    def __neg__(self):
        return Poly._raw(tuple(-x for x in self.c))

    def __sub__(self, o):
        if isinstance(o, RatFunc):
            return NotImplemented
        return self + (-self._co(o))

    def __rsub__(self, o):
        return self._co(o) - self

    def __mul__(self, o):
        if isinstance(o, RatFunc):
            return NotImplemented
        if not isinstance(o, Poly):
            o = scalar(o)
            if not o:
                return Poly._raw(())
            return Poly._raw(tuple(x * o for x in self.c))
        a, b = self.c, o.c
        if not a or not b:
            return Poly._raw(())
        if len(a) == 1:
            return o * a[0]
        if len(b) == 1:
            return self * b[0]
        out = [mpq(0)] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        out[i + j] += x * y
        return Poly._raw(_trim(out))

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative power of a polynomial")
        result = Poly.const(1)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def __divmod__(self, o):
        o = self._co(o)
        if not o.c:
            raise DivisionByZero("polynomial division by zero")
        a = list(self.c)
        b = o.c
        if len(a) < len(b):
            return Poly._raw(()), self
        li = inv(b[-1])
        q = [mpq(0)] * (len(a) - len(b) + 1)
        nb = len(b)
        for k in range(len(a) - nb, -1, -1):
            c = a[k + nb - 1]
            if c:
                c = c * li
                q[k] = c
                for j in range(nb - 1):
                    if b[j]:
                        a[k + j] -= c * b[j]
            a[k + nb - 1] = mpq(0)
        return Poly._raw(_trim(q)), Poly._raw(_trim(a[: nb - 1]))

    def __floordiv__(self, o):
        return divmod(self, o)[0]

    def __mod__(self, o):
        return divmod(self, o)[1]

    def exact_div(self, o):
        q, r = divmod(self, o)
        if r:
            raise ArithmeticError("inexact polynomial division")
        return q

    def __truediv__(self, o):
        return RatFunc(self) / o

    def __rtruediv__(self, o):
        return RatFunc(o) / self

    def monic(self):
        if not self.c:
            return self
        lc = self.c[-1]
        if lc == 1:
            return self
        return self * inv(lc)

    def derivative(self):
        return Poly._raw(_trim(k * a for k, a in enumerate(self.c) if k))

    def __call__(self, x):
        """Horner evaluation at a scalar, Poly or RatFunc."""
        if isinstance(x, (Poly, RatFunc)):
            acc = Poly._raw(()) if isinstance(x, Poly) else RatFunc(0)
            for a in reversed(self.c):
                acc = acc * x + a
            return acc
        x = scalar(x)
        acc = mpq(0)
        for a in reversed(self.c):
            acc = acc * x + a
        return acc

    def compose(self, g: "Poly"):
        return self(g)

    def taylor_shift(self, a):
        """p(z + a)."""
        a = scalar(a)
        if not a:
            return self
        c = list(self.c)
        n = len(c)
        for i in range(n):
            for k in range(n - 2, i - 1, -1):
                c[k] = c[k] + a * c[k + 1]
        return Poly._raw(_trim(c))

    def scale_var(self, a):
        """p(a z)."""
        a = scalar(a)
        out, pw = [], mpq(1)
        for x in self.c:
            out.append(x * pw)
            pw = pw * a
        return Poly._raw(_trim(out))

    def reverse(self, n=None):
        """z^n p(1/z), n defaults to the degree."""
        if n is None:
            n = self.deg
        c = list(self.c) + [mpq(0)] * max(0, n + 1 - len(self.c))
        return Poly(c[: n + 1][::-1])

    def to_str(self, var="z") -> str:
        return _format_poly(self.c, var)

    def __str__(self):
        return self.to_str()

    def __repr__(self):
        return f"Poly({self.to_str()})"


def _format_coeff_term(a, mon):
    s = format_scalar(a)
    if not mon:
        return s if not isinstance(a, Cyclotomic) else f"({s})"
    if isinstance(a, Cyclotomic):
        return f"({s})*{mon}"
    if a == 1:
        return mon
    if a == -1:
        return "-" + mon
    return f"{s}*{mon}"


def _format_poly(c, var):
    if not c:
        return "0"
    parts = []
    for k in range(len(c) - 1, -1, -1):
        a = c[k]
        if not a:
            continue
        mon = "" if k == 0 else (var if k == 1 else f"{var}^{k}")
        parts.append(_format_coeff_term(a, mon))
    s = parts[0]
    for p in parts[1:]:
        s += " - " + p[1:] if p.startswith("-") else " + " + p
    return s


def _needs_parens(p: Poly) -> bool:
    terms = [a for a in p.c if a]
    return len(terms) > 1 or any(isinstance(a, Cyclotomic) for a in terms)


def poly_gcd(a: Poly, b: Poly) -> Poly:
    """Monic gcd (zero if both are zero)."""
    if not a:
        return b.monic()
    if not b:
        return a.monic()
    if a.deg < b.deg:
        a, b = b, a
    a, b = a.monic(), b.monic()
    while b:
        if b.deg == 0:
            return Poly.const(1)
        _, r = divmod(a, b)
        a, b = b, r.monic()
    return a


def poly_lcm(a: Poly, b: Poly) -> Poly:
    g = poly_gcd(a, b)
    return (a.exact_div(g) * b).monic()


def squarefree_decomposition(p: Poly):
    """Yun's algorithm: list of (factor, multiplicity) with monic squarefree factors."""
    p = p.monic()
    out = []
    if p.deg < 1:
        return out
    dp = p.derivative()
    a = poly_gcd(p, dp)
    b = p.exact_div(a)
    c = dp.exact_div(a)
    d = c - b.derivative()
    i = 1
    while b.deg > 0:
        a = poly_gcd(b, d)
        b = b.exact_div(a)
        c = d.exact_div(a)
        d = c - b.derivative()
        if a.deg > 0:
            out.append((a.monic(), i))
        i += 1
    return out


# ---------------------------------------------------------------------------
# restricted root finding


def _divisors(n: int, cap: int = 10**6):
    """Positive divisors of |n| by trial division, or None past the cap."""
    n = abs(int(n))
    if n == 0:
        return None
    small, large = [], []
    d = 1
    while d * d <= n:
        if d > cap:
            return None
        if n % d == 0:
            small.append(d)
            if d * d != n:
                large.append(n // d)
        d += 1
    return small + large[::-1]


def _rational_roots(p: Poly):
    """Rational roots of a squarefree polynomial with rational coefficients."""
    if not p.is_rational() or p.deg < 1:
        return []
    roots = []
    if not p.c[0]:
        roots.append(mpq(0))
        p = Poly(p.c[p.valuation():])
    if p.deg < 1:
        return roots
    den = reduce(lambda x, y: x * y // math.gcd(x, y), (int(mpq(a).denominator) for a in p.c), 1)
    ints = [int(a * den) for a in p.c]
    g = reduce(math.gcd, ints)
    ints = [v // g for v in ints]
    dp = _divisors(ints[0])
    dq = _divisors(ints[-1])
    if dp is None or dq is None:
        return roots
    cands = set()
    for a in dp:
        for b in dq:
            if math.gcd(a, b) == 1:
                cands.add(mpq(a, b))
                cands.add(mpq(-a, b))
    for r in sorted(cands):
        if not p(r):
            roots.append(r)
    return roots


def _linear_roots_of(p: Poly):
    """Roots of squarefree p found by the restricted strategy, plus residual."""
    roots = []
    rest = p.monic()
    for r in _rational_roots(rest):
        roots.append(r)
        rest = rest.exact_div(Poly([-r, 1]))
    if rest.deg >= 1:
        f = get_field()
        for k in range(f.N):
            if rest.deg < 1:
                break
            z = f.zeta_power(k)
            if z in roots:
                continue
            if not rest(z):
                roots.append(z)
                rest = rest.exact_div(Poly([-z, 1]))
    if rest.deg >= 1:
        more, rest = _binomial_or_quadratic_roots(rest)
        roots.extend(more)
    return roots, rest.monic()


def _binomial_or_quadratic_roots(p: Poly):
    m = p.deg
    if m == 1:
        return [-p.c[0] / p.c[1]], Poly.const(1)
    if all(not a for a in p.c[1:-1]):
        c = -p.c[0] / p.c[-1]
        try:
            r = nth_root(c, m)
            f = get_field()
            zs = [f.root_of_unity(m) ** j for j in range(m)] if f.N % m == 0 else None
        except (NoRootInField, OrderNotSupported):
            zs = None
        if zs is not None:
            return [r * z for z in zs], Poly.const(1)
    if m == 2:
        a, b, c = p.c[2], p.c[1], p.c[0]
        disc = b * b - 4 * a * c
        try:
            s = nth_root(disc, 2)
        except NoRootInField:
            return [], p
        return [(-b + s) / (2 * a), (-b - s) / (2 * a)], Poly.const(1)
    return [], p


def find_roots(p: Poly):
    """Roots of p with multiplicities, plus unresolved factor blocks.

    Returns ``(roots, blocks)`` where roots is a list of (root, multiplicity)
    and blocks a list of (monic factor, multiplicity) whose roots were not
    expressible in the session field by the restricted strategy.
    """
    roots, blocks = [], []
    for f, mult in squarefree_decomposition(p):
        rs, rest = _linear_roots_of(f)
        roots.extend((r, mult) for r in rs)
        if rest.deg >= 1:
            blocks.append((rest, mult))
    roots.sort(key=lambda rm: point_key(rm[0]))
    return roots, blocks


# ---------------------------------------------------------------------------


class RatFunc:
    """Reduced rational function num/den with den monic."""

    __slots__ = ("num", "den")

    def __init__(self, num=0, den=1, _reduced=False):
        if isinstance(num, RatFunc):
            if den == 1 or (isinstance(den, Poly) and den == Poly.const(1)):
                self.num, self.den = num.num, num.den
                return
            q = num / den
            self.num, self.den = q.num, q.den
            return
        num = num if isinstance(num, Poly) else Poly.const(num)
        den = den if isinstance(den, Poly) else Poly.const(den)
        if not den:
            raise DivisionByZero("rational function with zero denominator")
        if not _reduced:
            if not num:
                den = Poly.const(1)
            elif den.deg > 0:
                g = poly_gcd(num, den)
                if g.deg > 0:
                    num = num.exact_div(g)
                    den = den.exact_div(g)
            lc = den.lc
            if lc != 1:
                li = inv(lc)
                num, den = num * li, den * li
        self.num, self.den = num, den

    @classmethod
    def x(cls):
        return cls(Poly.x())

    @staticmethod
    def _co(o):
        if isinstance(o, RatFunc):
            return o
        if isinstance(o, Poly):
            return RatFunc(o, _reduced=True)
        return RatFunc(Poly.const(o), _reduced=True)

    def is_zero(self):
        return not self.num

    def __bool__(self):
        return bool(self.num)

    def is_poly(self):
        return self.den.deg == 0

    def is_constant(self):
        return self.den.deg == 0 and self.num.deg <= 0

    def constant_value(self):
        if not self.is_constant():
            raise ValueError("not a constant")
        return self.num.coeff(0)

    def is_rational(self):
        return self.num.is_rational() and self.den.is_rational()

    @property
    def degree(self) -> int:
        return max(self.num.deg, self.den.deg)

    def __eq__(self, o):
        if isinstance(o, RatFunc):
            return self.num == o.num and self.den == o.den
        try:
            o = self._co(o)
        except TypeError:
            return NotImplemented
        return self.num == o.num and self.den == o.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __add__(self, o):
        try:
            o = self._co(o)
        except TypeError:
            return NotImplemented
        if not o.num:
            return self
        if not self.num:
            return o
        if self.den == o.den:
            return RatFunc(self.num + o.num, self.den)
        if self.den.deg == 0:
            return RatFunc(self.num * o.den + o.num, o.den, _reduced=True) if o.den.deg > 0 else RatFunc(self.num + o.num)
        if o.den.deg == 0:
            return RatFunc(self.num + o.num * self.den, self.den, _reduced=True)
        g = poly_gcd(self.den, o.den)
        if g.deg == 0:
            return RatFunc(self.num * o.den + o.num * self.den, self.den * o.den, _reduced=True)
        b1 = self.den.exact_div(g)
        d1 = o.den.exact_div(g)
        n = self.num * d1 + o.num * b1
        return RatFunc(n, b1 * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(-self.num, self.den, _reduced=True)

    def __sub__(self, o):
        try:
            o = self._co(o)
        except TypeError:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, o):
        return self._co(o) - self

    def __mul__(self, o):
        if isinstance(o, QuadExt):
            return NotImplemented
        try:
            o = self._co(o)
        except TypeError:
            return NotImplemented
        if not self.num or not o.num:
            return RatFunc(0)
        if o.is_constant():
            return RatFunc(self.num * o.num.c[0], self.den, _reduced=True)
        if self.is_constant():
            return RatFunc(o.num * self.num.c[0], o.den, _reduced=True)
        g1 = poly_gcd(self.num, o.den)
        g2 = poly_gcd(o.num, self.den)
        n1 = self.num.exact_div(g1) if g1.deg > 0 else self.num
        d2 = o.den.exact_div(g1) if g1.deg > 0 else o.den
        n2 = o.num.exact_div(g2) if g2.deg > 0 else o.num
        d1 = self.den.exact_div(g2) if g2.deg > 0 else self.den
        den = d1 * d2
        num = n1 * n2
        lc = den.lc
        if lc != 1:
            li = inv(lc)
            num, den = num * li, den * li
        return RatFunc(num, den, _reduced=True)

    __rmul__ = __mul__

    def inverse(self):
        if not self.num:
            raise DivisionByZero("inverse of zero rational function")
        return RatFunc(self.den, self.num, _reduced=False)

    def __truediv__(self, o):
        try:
            o = self._co(o)
        except TypeError:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, o):
        return self._co(o) * self.inverse()

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        return RatFunc(self.num ** e, self.den ** e, _reduced=True)

    def derivative(self):
        n, d = self.num, self.den
        if d.deg == 0:
            return RatFunc(n.derivative() * inv(d.lc), _reduced=True)
        # (n'd - nd')/d^2 ; cancel the common factor gcd(d, d') first
        dd = d.derivative()
        g = poly_gcd(d, dd)
        d_g = d.exact_div(g)
        num = n.derivative() * d_g - n * dd.exact_div(g)
        return RatFunc(num, d_g * d)

    def __call__(self, x):
        return self.eval(x)

    def eval(self, p):
        """Value at a point of the projective line (may be ``oo``)."""
        if is_infinite(p):
            if self.num.deg > self.den.deg:
                return oo
            if self.num.deg < self.den.deg:
                return mpq(0)
            return self.num.lc / self.den.lc
        p = scalar(p)
        dv = self.den(p)
        if not dv:
            return oo
        return self.num(p) / dv

    def compose(self, g: "RatFunc"):
        """self(g(z))."""
        g = self._co(g)
        if g.is_constant():
            raise ValueError("composition with a constant")
        P, Q = g.num, g.den
        a, b = max(self.num.deg, 0), max(self.den.deg, 0)
        m = max(a, b)
        # homogenize both at degree m: sum c_k P^k Q^(m-k)
        powP = [Poly.const(1)]
        powQ = [Poly.const(1)]
        for _ in range(m):
            powP.append(powP[-1] * P)
            powQ.append(powQ[-1] * Q)

        def hom(c):
            acc = Poly._raw(())
            for k, ck in enumerate(c.c):
                if ck:
                    acc = acc + powP[k] * powQ[m - k] * ck
            return acc

        return RatFunc(hom(self.num), hom(self.den))

    def taylor_shift(self, a):
        """f(z + a)."""
        return RatFunc(self.num.taylor_shift(a), self.den.taylor_shift(a))

    def at_infinity_chart(self):
        """f(1/t) as a rational function of t."""
        m = max(self.num.deg, self.den.deg, 0)
        return RatFunc(self.num.reverse(m), self.den.reverse(m))

    def order_at(self, p) -> int:
        """Valuation at p (positive = zero, negative = pole); +inf for zero."""
        if not self.num:
            return math.inf
        if is_infinite(p):
            return self.den.deg - self.num.deg
        p = scalar(p)
        n = self.num.taylor_shift(p)
        d = self.den.taylor_shift(p)
        return n.valuation() - d.valuation()

    def leading_at(self, p):
        """Leading coefficient of the local expansion at p (in t = z - p or 1/z)."""
        if is_infinite(p):
            return self.num.lc / self.den.lc
        p = scalar(p)
        n = self.num.taylor_shift(p)
        d = self.den.taylor_shift(p)
        return n.c[n.valuation()] / d.c[d.valuation()]

    def to_str(self, var="z") -> str:
        ns = self.num.to_str(var)
        if self.den.deg == 0:
            return ns
        ds = self.den.to_str(var)
        if _needs_parens(self.num):
            ns = f"({ns})"
        if _needs_parens(self.den) or self.den.lc != 1:
            ds = f"({ds})"
        return f"{ns}/{ds}"

    def __str__(self):
        return self.to_str()

    def __repr__(self):
        return f"RatFunc({self.to_str()})"


Z = RatFunc.x


def ratfunc(x) -> RatFunc:
    if isinstance(x, RatFunc):
        return x
    if isinstance(x, Poly):
        return RatFunc(x)
    if isinstance(x, str):
        from .parser import parse_expression

        return parse_expression(x, "ratfunc")
    return RatFunc(scalar(x))


def poly_lcm_list(polys):
    return reduce(poly_lcm, polys, Poly.const(1))


# ---------------------------------------------------------------------------


class MoebiusMap:
    """z -> (a z + b)/(c z + d), scale-canonical (first nonzero entry is 1)."""

    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a, b, c, d):
        a, b, c, d = (scalar(v) for v in (a, b, c, d))
        if not (a * d - b * c):
            raise ValueError("degenerate Moebius map")
        first = next(v for v in (a, b, c, d) if v)
        if first != 1:
            s = inv(first)
            a, b, c, d = a * s, b * s, c * s, d * s
        self.a, self.b, self.c, self.d = a, b, c, d

    @classmethod
    def identity(cls):
        return cls(1, 0, 0, 1)

    @classmethod
    def from_ratfunc(cls, f: RatFunc):
        f = ratfunc(f)
        if f.num.deg > 1 or f.den.deg > 1 or f.is_constant():
            raise ValueError("not a degree-one map")
        return cls(f.num.coeff(1), f.num.coeff(0), f.den.coeff(1), f.den.coeff(0))

    def entries(self):
        return (self.a, self.b, self.c, self.d)

    def __eq__(self, o):
        return isinstance(o, MoebiusMap) and self.entries() == o.entries()

    def __hash__(self):
        return hash(self.entries())

    def is_identity(self):
        return self == MoebiusMap.identity()

    def compose(self, other: "MoebiusMap") -> "MoebiusMap":
        """self o other."""
        a, b, c, d = self.entries()
        e, f, g, h = other.entries()
        return MoebiusMap(a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)

    __matmul__ = compose

    def invert(self) -> "MoebiusMap":
        a, b, c, d = self.entries()
        return MoebiusMap(d, -b, -c, a)

    def __call__(self, p):
        return self.apply_to(p)

    def apply_to(self, p):
        a, b, c, d = self.entries()
        if is_infinite(p):
            return oo if not c else a / c
        p = scalar(p)
        den = c * p + d
        if not den:
            return oo
        return (a * p + b) / den

    def as_ratfunc(self) -> RatFunc:
        return RatFunc(Poly([self.b, self.a]), Poly([self.d, self.c]))

    def to_str(self, var="z"):
        return self.as_ratfunc().to_str(var)

    def __str__(self):
        return self.to_str()

    def __repr__(self):
        return f"MoebiusMap({self.to_str()})"


def _to_zero_one_inf(p1, p2, p3) -> MoebiusMap:
    """Map sending p1 -> 0, p2 -> 1, p3 -> oo."""
    if is_infinite(p1):
        return MoebiusMap(0, p2 - p3, 1, -p3)
    if is_infinite(p2):
        return MoebiusMap(1, -p1, 1, -p3)
    if is_infinite(p3):
        return MoebiusMap(1, -p1, 0, p2 - p1)
    return MoebiusMap(p2 - p3, -p1 * (p2 - p3), p2 - p1, -p3 * (p2 - p1))


def moebius_from_triples(src, dst) -> MoebiusMap:
    """The unique Moebius map sending src[i] to dst[i]."""
    src = [point(p) for p in src]
    dst = [point(p) for p in dst]
    for tri in (src, dst):
        if len(tri) != 3 or len(set(tri)) != 3:
            raise DegenerateTriple(f"need three distinct points, got {[format_point(p) for p in tri]}")
    m = _to_zero_one_inf(*dst).invert().compose(_to_zero_one_inf(*src))
    for s, d in zip(src, dst):
        assert m(s) == d
    return m


class RationalMap:
    """A non-constant rational function viewed as a covering of the line."""

    __slots__ = ("value",)

    def __init__(self, value):
        value = ratfunc(value)
        if value.is_constant():
            raise ValueError("constant map")
        self.value = value

    @property
    def degree(self):
        return self.value.degree

    def __call__(self, p):
        return self.value.eval(p)

    def compose(self, other: "RationalMap") -> "RationalMap":
        """self o other."""
        return RationalMap(self.value.compose(other.value))

    def __eq__(self, o):
        return isinstance(o, RationalMap) and self.value == o.value

    def __hash__(self):
        return hash(self.value)

    def to_str(self, var="z"):
        return self.value.to_str(var)

    def __repr__(self):
        return f"RationalMap({self.to_str()})"


# ---------------------------------------------------------------------------


class QuadExt:
    """a + b*w in k(w), w^2 = modulus(z); a, b rational functions of z."""

    __slots__ = ("a", "b", "modulus")

    def __init__(self, a, b, modulus: Poly):
        self.a = ratfunc(a)
        self.b = ratfunc(b)
        self.modulus = modulus

    @classmethod
    def w(cls, modulus: Poly):
        return cls(0, 1, modulus)

    def _co(self, o):
        if isinstance(o, QuadExt):
            if o.modulus != self.modulus:
                raise ModulusMismatch("different quadratic moduli")
            return o
        if isinstance(o, (RatFunc, Poly)) or not hasattr(o, "modulus"):
            try:
                return QuadExt(ratfunc(o), 0, self.modulus)
            except TypeError:
                return NotImplemented
        return NotImplemented

    def __eq__(self, o):
        o = self._co(o)
        if o is NotImplemented:
            return o
        return self.modulus == o.modulus and self.a == o.a and self.b == o.b

    def __hash__(self):
        return hash((self.a, self.b, self.modulus))

    def is_zero(self):
        return not self.a and not self.b

    def __bool__(self):
        return not self.is_zero()

    def __add__(self, o):
        o = self._co(o)
        if o is NotImplemented:
            return o
        return QuadExt(self.a + o.a, self.b + o.b, self.modulus)

    __radd__ = __add__

    def __neg__(self):
        return QuadExt(-self.a, -self.b, self.modulus)

    def __sub__(self, o):
        o = self._co(o)
        return o if o is NotImplemented else self + (-o)

    def __rsub__(self, o):
        o = self._co(o)
        return o if o is NotImplemented else o - self

    def __mul__(self, o):
        o = self._co(o)
        if o is NotImplemented:
            return o
        p = RatFunc(self.modulus)
        return QuadExt(self.a * o.a + self.b * o.b * p, self.a * o.b + self.b * o.a, self.modulus)

    __rmul__ = __mul__

    def norm(self) -> RatFunc:
        return self.a * self.a - self.b * self.b * RatFunc(self.modulus)

    def conjugate(self):
        return QuadExt(self.a, -self.b, self.modulus)

    def inverse(self):
        n = self.norm()
        if not n:
            raise DivisionByZero("inverse of zero in quadratic extension")
        return QuadExt(self.a / n, -self.b / n, self.modulus)

    def __truediv__(self, o):
        o = self._co(o)
        return o if o is NotImplemented else self * o.inverse()

    def __rtruediv__(self, o):
        o = self._co(o)
        return o if o is NotImplemented else o * self.inverse()

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result = QuadExt(1, 0, self.modulus)
        for _ in range(e):
            result = result * self
        return result

    def derivative(self):
        """d/dz with w' = p'/(2w) = p' w / (2 p)."""
        p = RatFunc(self.modulus)
        dp = RatFunc(self.modulus.derivative())
        return QuadExt(self.a.derivative(), self.b.derivative() + self.b * dp / (2 * p), self.modulus)

    def w_parity(self):
        """0 if purely rational, 1 if a rational multiple of w, None if mixed/zero."""
        if self.is_zero():
            return None
        if not self.b:
            return 0
        if not self.a:
            return 1
        return None

    def substitute(self, z_image, w_factor):
        """Apply z -> z_image, w -> w_factor * w (checked against the modulus)."""
        z_image = ratfunc(z_image)
        w_factor = ratfunc(w_factor)
        p = RatFunc(self.modulus)
        if p.compose(z_image) != w_factor * w_factor * p:
            raise ValueError("substitution does not preserve w^2 = p(z)")
        return QuadExt(self.a.compose(z_image), self.b.compose(z_image) * w_factor, self.modulus)

    def to_str(self, var="z"):
        parts = []
        if self.a:
            parts.append(self.a.to_str(var))
        if self.b:
            bs = self.b.to_str(var)
            if bs == "1":
                parts.append("w")
            elif self.b.is_poly() and not _needs_parens(self.b.num):
                parts.append(f"{bs}*w")
            else:
                parts.append(f"({bs})*w")
        return " + ".join(parts) if parts else "0"

    def __repr__(self):
        return f"QuadExt({self.to_str()}; w^2 = {self.modulus.to_str()})"


def quadext_derivation(q: QuadExt, direction: QuadExt) -> QuadExt:
    """direction * d/dz applied to q."""
    if isinstance(direction, QuadExt) and isinstance(q, QuadExt) and direction.modulus != q.modulus:
        raise ModulusMismatch("different quadratic moduli")
    if not isinstance(q, QuadExt):
        q = QuadExt(ratfunc(q), 0, direction.modulus)
    return direction * q.derivative()


def pushforward_direction(direction: QuadExt, z_image, w_factor) -> QuadExt:
    """Direction of the derivation s* o v o (s*)^-1, where s* is the substitution.

    A derivation of k(w) is direction * d/dz and is fixed by its value on z.
    The substitution must be an involution-free automorphism whose inverse on z
    is obtained by solving; only maps with z_image = c*z are supported here.
    """
    z_image = ratfunc(z_image)
    if z_image.num.deg != 1 or z_image.den.deg != 0 or z_image.num.coeff(0):
        raise NotImplementedError("only z -> c*z substitutions are supported")
    c = z_image.num.coeff(1)
    # (s*)^-1 (z) = z / c ; v(z/c) = direction / c ; then apply s*
    vz = direction * RatFunc(inv(c))
    return vz.substitute(z_image, w_factor)


def is_root_of_unity_multiple(x):
    return as_monomial(x) is not None


__all__ = [
    "Poly",
    "RatFunc",
    "MoebiusMap",
    "RationalMap",
    "QuadExt",
    "oo",
    "point",
    "format_point",
    "is_infinite",
    "find_roots",
    "poly_gcd",
    "poly_lcm",
    "moebius_from_triples",
    "quadext_derivation",
    "pushforward_direction",
    "DegenerateTriple",
    "ModulusMismatch",
    "mpz",
]
