"""Exact scalars: rationals and elements of a cyclotomic field Q(zeta_N).

Rationals are ``gmpy2.mpq`` values.  A non-rational element of Q(zeta_N) is a
:class:`Cyclotomic`; any arithmetic result that turns out rational is demoted
back to ``mpq``, so "is this rational" is simply ``isinstance(x, mpq)``.

One conductor is active per session (default 120).  Elements remember the
field they were built in and refuse to mix with elements of another one.
"""

from __future__ import annotations

import contextlib
import math
from fractions import Fraction
from functools import lru_cache

from gmpy2 import iroot, mpq, mpz

DEFAULT_CONDUCTOR = 120


class DivisionByZero(ZeroDivisionError):
    pass


class ConductorMismatch(ValueError):
    pass


class OrderNotSupported(ValueError):
    pass


class NoRootInField(ValueError):
    pass


# ---------------------------------------------------------------------------
# integer polynomial helpers (ascending coefficient lists)


def _ipoly_divexact(a, b):
    a = list(a)
    q = [0] * (len(a) - len(b) + 1)
    lb = b[-1]
    for k in range(len(q) - 1, -1, -1):
        c = a[k + len(b) - 1] // lb
        q[k] = c
        if c:
            for j, bj in enumerate(b):
                a[k + j] -= c * bj
    assert not any(a), "inexact division"
    return q


@lru_cache(maxsize=None)
def cyclotomic_polynomial(n: int) -> tuple:
    """Integer coefficients (ascending) of the n-th cyclotomic polynomial."""
    if n < 1:
        raise ValueError("n must be positive")
    num = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            num = _ipoly_divexact(num, cyclotomic_polynomial(d))
    return tuple(num)


def totient(n: int) -> int:
    return len(cyclotomic_polynomial(n)) - 1


# ---------------------------------------------------------------------------


class CyclotomicField:
    """The field Q(zeta_N) in the power basis 1, zeta, ..., zeta^(phi-1)."""

    def __init__(self, conductor: int):
        if conductor < 1:
            raise ValueError("conductor must be positive")
        self.N = conductor
        self.phi_poly = cyclotomic_polynomial(conductor)
        self.deg = len(self.phi_poly) - 1
        # zeta^k reduced, for 0 <= k < max(N, 2*deg - 1)
        top = max(conductor, 2 * self.deg - 1)
        table = []
        cur = {0: 1}
        for _ in range(top):
            table.append(cur)
            cur = self._times_zeta(cur)
        self._pow = table

    def _times_zeta(self, d):
        out = {}
        for k, c in d.items():
            out[k + 1] = out.get(k + 1, 0) + c
        top = out.pop(self.deg, 0)
        if top:
            # zeta^deg = -(phi_0 + phi_1 zeta + ... )
            for j, pj in enumerate(self.phi_poly[:-1]):
                if pj:
                    out[j] = out.get(j, 0) - top * pj
        return {k: c for k, c in out.items() if c}

    def __repr__(self):
        return f"CyclotomicField({self.N})"

    def zeta_power(self, k: int):
        """zeta_N^k as a scalar."""
        k %= self.N
        return self.element({j: mpq(c) for j, c in self._pow[k].items()})

    def element(self, coords: dict):
        """Build a scalar from reduced coordinates {basis index: rational}."""
        c = tuple(sorted((k, mpq(v)) for k, v in coords.items() if v))
        if not c:
            return mpq(0)
        if len(c) == 1 and c[0][0] == 0:
            return c[0][1]
        return Cyclotomic(self, c)

    def reduce(self, coeffs: dict):
        """Reduce {exponent: rational} with arbitrary exponents >= 0."""
        out = {}
        deg = self.deg
        for k, v in coeffs.items():
            if not v:
                continue
            k %= self.N
            if k < deg:
                out[k] = out.get(k, 0) + v
            else:
                for j, pj in self._pow[k].items():
                    out[j] = out.get(j, 0) + v * pj
        return self.element(out)

    def root_of_unity(self, order: int):
        """A primitive root of unity of the given order (zeta_N^(N/order))."""
        if order < 1 or self.N % order:
            raise OrderNotSupported(f"order {order} does not divide conductor {self.N}")
        return self.zeta_power(self.N // order)


_FIELD = CyclotomicField(DEFAULT_CONDUCTOR)


def get_field() -> CyclotomicField:
    return _FIELD


def set_conductor(n: int) -> CyclotomicField:
    global _FIELD
    if _FIELD.N != n:
        _FIELD = _field_for(n)
    return _FIELD


@lru_cache(maxsize=None)
def _field_for(n):
    return CyclotomicField(n)


@contextlib.contextmanager
def conductor(n: int):
    """Temporarily switch the session conductor."""
    old = _FIELD
    set_conductor(n)
    try:
        yield _FIELD
    finally:
        set_conductor(old.N)


def root_of_unity(order: int):
    return _FIELD.root_of_unity(order)


def zeta(n: int, k: int = 1):
    """zeta_n^k embedded in the session field (n must divide the conductor)."""
    f = _FIELD
    if f.N % n:
        raise OrderNotSupported(f"zeta({n}) needs a conductor divisible by {n}; session conductor is {f.N}")
    return f.zeta_power((f.N // n) * k)


# ---------------------------------------------------------------------------


class Cyclotomic:
    """A non-rational element of Q(zeta_N); coordinates in the power basis."""

    __slots__ = ("field", "c")

    def __init__(self, field: CyclotomicField, c: tuple):
        self.field = field
        self.c = c

    # coercion -------------------------------------------------------------
    def _other(self, o):
        if isinstance(o, Cyclotomic):
            if o.field is not self.field:
                if o.field.N != self.field.N:
                    raise ConductorMismatch(f"conductors {self.field.N} and {o.field.N}")
            return o
        if isinstance(o, (int, type(mpz(0)))):
            return mpq(o)
        if isinstance(o, type(mpq(0))):
            return o
        if isinstance(o, Fraction):
            return mpq(o)
        return None

    def coords(self) -> list:
        out = [mpq(0)] * self.field.deg
        for k, v in self.c:
            out[k] = v
        return out

    def __add__(self, o):
        o = self._other(o)
        if o is None:
            return NotImplemented
        d = dict(self.c)
        if isinstance(o, Cyclotomic):
            for k, v in o.c:
                d[k] = d.get(k, 0) + v
        else:
            d[0] = d.get(0, 0) + o
        return self.field.element(d)

    __radd__ = __add__

    def __neg__(self):
        return Cyclotomic(self.field, tuple((k, -v) for k, v in self.c))

    def __pos__(self):
        return self

    def __sub__(self, o):
        o = self._other(o)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, o):
        o = self._other(o)
        if o is None:
            return NotImplemented
        return (-self) + o

    def __mul__(self, o):
        o = self._other(o)
        if o is None:
            return NotImplemented
        if not isinstance(o, Cyclotomic):
            if not o:
                return mpq(0)
            return Cyclotomic(self.field, tuple((k, v * o) for k, v in self.c))
        acc = {}
        for i, a in self.c:
            for j, b in o.c:
                acc[i + j] = acc.get(i + j, 0) + a * b
        return self.field.reduce(acc)

    __rmul__ = __mul__

    def inverse(self):
        if len(self.c) == 1:
            k, v = self.c[0]
            return self.field.zeta_power(-k) * (1 / v)
        return _poly_inverse(self)

    def __truediv__(self, o):
        o = self._other(o)
        if o is None:
            return NotImplemented
        if isinstance(o, Cyclotomic):
            return self * o.inverse()
        if not o:
            raise DivisionByZero("division by zero")
        return self * (1 / o)

    def __rtruediv__(self, o):
        o = self._other(o)
        if o is None:
            return NotImplemented
        return self.inverse() * o

    def __pow__(self, e):
        if not isinstance(e, int):
            raise TypeError("only integer powers")
        if e < 0:
            return self.inverse() ** (-e)
        result = mpq(1)
        base = self
        while e:
            if e & 1:
                result = base * result
            e >>= 1
            if e:
                base = base * base
        return result

    def __eq__(self, o):
        if isinstance(o, Cyclotomic):
            return self.field.N == o.field.N and self.c == o.c
        return False

    def __ne__(self, o):
        return not self == o

    def __hash__(self):
        return hash((self.field.N, self.c))

    def __bool__(self):
        return True

    def __repr__(self):
        return f"Cyclotomic({format_scalar(self)})"

    def __str__(self):
        return format_scalar(self)


def _poly_inverse(a: Cyclotomic):
    # extended Euclid in Q[x] against the cyclotomic polynomial
    f = a.field
    r0 = [mpq(c) for c in f.phi_poly]
    r1 = a.coords()
    while r1 and not r1[-1]:
        r1.pop()
    s0, s1 = [mpq(0)], [mpq(1)]
    while len(r1) > 1:
        q, r = _qpoly_divmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, _qpoly_sub(s0, _qpoly_mul(q, s1))
    # r1 is a nonzero constant
    c = r1[0]
    return f.element({k: v / c for k, v in enumerate(s1)})


def _qpoly_trim(p):
    while p and not p[-1]:
        p.pop()
    return p


def _qpoly_divmod(a, b):
    a = list(a)
    q = [mpq(0)] * max(len(a) - len(b) + 1, 1)
    lb = b[-1]
    for k in range(len(a) - len(b), -1, -1):
        c = a[k + len(b) - 1] / lb
        q[k] = c
        if c:
            for j, bj in enumerate(b):
                a[k + j] -= c * bj
    return _qpoly_trim(q), _qpoly_trim(a[: len(b) - 1])


def _qpoly_mul(a, b):
    if not a or not b:
        return []
    out = [mpq(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _qpoly_trim(out)


def _qpoly_sub(a, b):
    n = max(len(a), len(b))
    out = [(a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0) for i in range(n)]
    return _qpoly_trim([mpq(x) for x in out])


# ---------------------------------------------------------------------------
# scalar helpers used across the package

MPQ = type(mpq(0))
MPZ = type(mpz(0))


def scalar(x):
    """Coerce int / Fraction / mpq / Cyclotomic / constant string to a scalar."""
    if isinstance(x, (MPQ, Cyclotomic)):
        return x
    if isinstance(x, (int, MPZ, Fraction)):
        return mpq(x)
    if isinstance(x, str):
        return parse_constant(x)
    raise TypeError(f"not a scalar: {x!r}")


def is_rational(x) -> bool:
    return not isinstance(x, Cyclotomic)


def inv(x):
    if isinstance(x, Cyclotomic):
        return x.inverse()
    if not x:
        raise DivisionByZero("division by zero")
    return 1 / mpq(x)


def as_monomial(x):
    """Return (q, k) with x == q * zeta_N^k and q rational, or None."""
    if not isinstance(x, Cyclotomic):
        return (mpq(x), 0)
    f = x.field
    for k in range(f.N):
        y = x * f.zeta_power(-k)
        if not isinstance(y, Cyclotomic):
            return (y, k)
    return None


def _rational_root(q, n):
    """Nonnegative rational n-th root of q >= 0, or None."""
    num, den = mpz(q.numerator), mpz(q.denominator)
    rn, en = iroot(num, n)
    rd, ed = iroot(den, n)
    if en and ed:
        return mpq(rn, rd)
    return None


def nth_root(x, n: int, branch: int = 0):
    """An n-th root of x in the session field.

    ``branch`` selects among the n roots by multiplying the principal root by
    zeta_n^branch; it needs zeta_n in the field unless ``branch == 0``.
    """
    if n < 1:
        raise ValueError("n must be positive")
    x = scalar(x)
    if n == 1:
        r = x
    elif not x:
        return mpq(0)
    else:
        mono = as_monomial(x)
        if mono is None:
            raise NoRootInField(f"{format_scalar(x)} is not a rational multiple of a root of unity")
        q, k = mono
        f = x.field if isinstance(x, Cyclotomic) else _FIELD
        N = f.N
        if q < 0:
            q = -q
            k = (k + N // 2) if N % 2 == 0 else None
            if k is None:
                if n % 2 == 1:
                    k = 0
                    q_sign = -1
                else:
                    raise NoRootInField(f"no {n}-th root of a negative number with odd conductor")
            else:
                q_sign = 1
        else:
            q_sign = 1
        rq = _rational_root(q, n)
        if rq is None:
            raise NoRootInField(f"{format_scalar(q)} has no rational {n}-th root")
        # solve j*n == k (mod N)
        g = math.gcd(n, N)
        if k % g:
            raise NoRootInField(f"zeta({N})^{k} has no {n}-th root in the field")
        j = (k // g) * pow(n // g, -1, N // g) % (N // g) if N // g > 1 else 0
        r = q_sign * rq * f.zeta_power(j)
    if branch % n:
        f = _FIELD
        if f.N % n:
            raise OrderNotSupported(f"branch selection needs zeta({n}) in the field")
        r = r * f.zeta_power((f.N // n) * branch)
    return r


# ---------------------------------------------------------------------------
# text form: integers, p/q, zeta(N)^k, sums of rational multiples


def _zeta_label(N, k):
    g = math.gcd(N, k)
    n, e = N // g, k // g
    return f"zeta({n})" if e == 1 else f"zeta({n})^{e}"


def format_scalar(x) -> str:
    if isinstance(x, Cyclotomic):
        mono = as_monomial(x)
        if mono is not None:
            q, k = mono
            lab = _zeta_label(x.field.N, k)
            if q == 1:
                return lab
            if q == -1:
                return "-" + lab
            return f"{format_scalar(q)}*{lab}"
        parts = []
        for k, v in x.c:
            if k == 0:
                parts.append(str(v))
                continue
            lab = _zeta_label(x.field.N, k)
            if v == 1:
                parts.append(lab)
            elif v == -1:
                parts.append("-" + lab)
            else:
                parts.append(f"{v}*{lab}")
        s = parts[0]
        for p in parts[1:]:
            s += " - " + p[1:] if p.startswith("-") else " + " + p
        return s
    x = mpq(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def parse_constant(text: str):
    """Parse a constant such as ``3/4 - 2*zeta(8)^3`` into a scalar."""
    from .parser import parse_expression

    return parse_expression(text, "constant")
