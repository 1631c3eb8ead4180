"""Linear differential operators sum a_i D^i over k = Q(zeta_N)(z).

Coefficients are RatFunc.  An operator may instead carry QuadExt coefficients
together with a derivation ``direction * d/dz`` (the elliptic rewrite).
Composition uses D . f = f' + f . D.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import reduce

from gmpy2 import mpq

from .funcfield import (
    MoebiusMap,
    Poly,
    QuadExt,
    RationalMap,
    RatFunc,
    _rational_roots,
    find_roots,
    format_point,
    is_infinite,
    oo,
    point,
    point_key,
    poly_gcd,
    poly_lcm,
    ratfunc,
    squarefree_decomposition,
)
from .scalars import inv


class DomainMismatch(TypeError):
    pass


class ConstantMap(ValueError):
    pass


class IrregularSingularity(ValueError):
    pass


class IrrationalExponent(ValueError):
    pass


class NotRationalizable(ValueError):
    pass


def _binom(n, k):
    return math.comb(n, k)


class DiffOp:
    """sum_i coeffs[i] * D^i, highest coefficient nonzero."""

    __slots__ = ("coeffs", "var", "direction")

    def __init__(self, coeffs, var="z", direction=None):
        if direction is None:
            cs = [ratfunc(c) for c in coeffs]
        else:
            cs = [c if isinstance(c, QuadExt) else QuadExt(ratfunc(c), 0, direction.modulus) for c in coeffs]
        while cs and not cs[-1]:
            cs.pop()
        if not cs:
            raise ValueError("zero operator")
        self.coeffs = tuple(cs)
        self.var = var
        self.direction = direction

    # ------------------------------------------------------------------
    @classmethod
    def D(cls, var="z"):
        return cls([0, 1], var)

    @property
    def order(self):
        return len(self.coeffs) - 1

    @property
    def lc(self):
        return self.coeffs[-1]

    def coeff(self, i):
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return self._zero()

    def _zero(self):
        if self.direction is None:
            return RatFunc(0)
        return QuadExt(0, 0, self.direction.modulus)

    def is_rational(self):
        return self.direction is None

    def _deriv(self, c):
        if self.direction is None:
            return c.derivative()
        return self.direction * c.derivative()

    def _like(self, coeffs):
        return DiffOp(coeffs, self.var, self.direction)

    def _check(self, other):
        if (self.direction is None) != (other.direction is None):
            raise DomainMismatch("rational and quadratic-extension operators do not mix")
        if self.direction is not None and self.direction != other.direction:
            raise DomainMismatch("different derivations")

    def __eq__(self, o):
        return (
            isinstance(o, DiffOp)
            and self.coeffs == o.coeffs
            and (self.direction is None) == (o.direction is None)
            and (self.direction is None or self.direction == o.direction)
        )

    def __hash__(self):
        return hash(self.coeffs)

    # ring operations ----------------------------------------------------
    def __add__(self, o):
        if not isinstance(o, DiffOp):
            if not o:
                return self
            o = self._like([o])
        self._check(o)
        n = max(len(self.coeffs), len(o.coeffs))
        cs = [self.coeff(i) + o.coeff(i) for i in range(n)]
        return self._like(cs)

    __radd__ = __add__

    def __neg__(self):
        return self._like([-c for c in self.coeffs])

    def __sub__(self, o):
        if not isinstance(o, DiffOp):
            if not o:
                return self
            o = self._like([o])
        return self + (-o)

    def __rsub__(self, o):
        return -self if not o else self._like([o]) - self

    def left_mul(self, f):
        """f * L."""
        return self._like([f * c for c in self.coeffs])

    def __rmul__(self, f):
        return self.left_mul(f)

    def __mul__(self, o):
        if isinstance(o, DiffOp):
            return compose(self, o)
        return compose(self, self._like([o]))

    __matmul__ = __mul__

    def __pow__(self, e: int):
        if not isinstance(e, int) or e < 0:
            raise ValueError("operator powers need a non-negative integer exponent")
        result = self._like([1])
        for _ in range(e):
            result = compose(result, self)
        return result

    def __call__(self, f):
        return apply(self, f)

    # normal forms -------------------------------------------------------
    def monic(self):
        li = self.lc.inverse() if hasattr(self.lc, "inverse") else 1 / self.lc
        return self._like([c * li for c in self.coeffs])

    def canonical(self):
        """Polynomial coefficients, coprime, leading coefficient of a_n equal to 1."""
        if self.direction is not None:
            raise DomainMismatch("canonical form is defined for rational coefficients")
        den = reduce(poly_lcm, (c.den for c in self.coeffs), Poly.const(1))
        nums = [c.num * den.exact_div(c.den) for c in self.coeffs]
        g = reduce(poly_gcd, nums, Poly())
        nums = [p.exact_div(g) for p in nums]
        s = inv(nums[-1].lc)
        return DiffOp([RatFunc(p * s, _reduced=True) for p in nums], self.var)

    def same_as(self, other) -> bool:
        """Equal up to a left factor in k."""
        return self.canonical() == other.canonical()

    def with_var(self, var):
        return DiffOp(self.coeffs, var, self.direction)

    def to_str(self, var=None):
        var = var or self.var
        parts = []
        for i in range(self.order, -1, -1):
            c = self.coeffs[i]
            if not c:
                continue
            cs = c.to_str(var)
            mon = "" if i == 0 else ("D" if i == 1 else f"D^{i}")
            if not mon:
                parts.append(f"({cs})" if " " in cs else cs)
            elif cs in ("1", "-1"):
                parts.append(mon if cs == "1" else "-" + mon)
            elif " " in cs:
                parts.append(f"({cs})*{mon}")
            else:
                parts.append(f"{cs}*{mon}")
        out = parts[0]
        for p in parts[1:]:
            out += " - " + p[1:] if p.startswith("-") else " + " + p
        return out

    def __str__(self):
        return self.to_str()

    def __repr__(self):
        return f"DiffOp({self.to_str()})"


# ---------------------------------------------------------------------------


def apply(L: DiffOp, f):
    if L.direction is None:
        if isinstance(f, QuadExt):
            raise DomainMismatch("rational operator applied to a quadratic-extension element")
        f = ratfunc(f)
    else:
        if not isinstance(f, QuadExt):
            f = QuadExt(ratfunc(f), 0, L.direction.modulus)
    acc = L.coeffs[0] * f
    d = f
    for a in L.coeffs[1:]:
        d = L._deriv(d)
        if a:
            acc = acc + a * d
    return acc


def _d_left(L: DiffOp, cs):
    """Coefficients of D o (sum cs[j] D^j)."""
    out = [L._zero() for _ in range(len(cs) + 1)]
    for j, c in enumerate(cs):
        if c:
            out[j] = out[j] + L._deriv(c)
            out[j + 1] = out[j + 1] + c
    return out


def compose(L1: DiffOp, L2: DiffOp) -> DiffOp:
    """L1 o L2."""
    L1._check(L2)
    result = [L1._zero() for _ in range(L1.order + L2.order + 1)]
    cur = list(L2.coeffs)  # D^i o L2
    for i, a in enumerate(L1.coeffs):
        if i:
            cur = _d_left(L1, cur)
        if a:
            for j, c in enumerate(cur):
                if c:
                    result[j] = result[j] + a * c
    return DiffOp(result, L1.var, L1.direction)


def _as_ratfunc_map(r):
    if isinstance(r, MoebiusMap):
        return r.as_ratfunc()
    if isinstance(r, RationalMap):
        return r.value
    return ratfunc(r)


def pullback(L: DiffOp, r, canonical=True, var=None) -> DiffOp:
    """Substitute z = r(x): D_z -> (1/r') D_x and a_i(z) -> a_i(r(x))."""
    if not L.is_rational():
        raise DomainMismatch("pullback is defined for rational coefficients")
    r = _as_ratfunc_map(r)
    if r.is_constant():
        raise ConstantMap("pullback along a constant map")
    dr = r.derivative()
    if not dr:
        raise ConstantMap("map with zero derivative")
    idr = dr.inverse()
    X = DiffOp([0, 1], L.var)
    result = [RatFunc(0)] * (L.order + 1)
    cur = [RatFunc(1)]  # D_z^i expressed in D_x
    for i, a in enumerate(L.coeffs):
        if i:
            cur = [idr * c for c in _d_left(X, cur)]
        if a:
            ar = a.compose(r)
            for j, c in enumerate(cur):
                if c:
                    result[j] = result[j] + ar * c
    out = DiffOp(result, var or L.var)
    return out.canonical() if canonical else out


def gauge(L: DiffOp, g) -> DiffOp:
    """sum a_i (D - g)^i: solutions get multiplied by u with u'/u = g."""
    g = ratfunc(g) if L.direction is None else g
    if not g:
        return L
    step = L._like([-g, 1])
    result = [L._zero() for _ in range(L.order + 1)]
    cur = L._like([1])
    for i, a in enumerate(L.coeffs):
        if i:
            cur = compose(step, cur)
        if a:
            for j, c in enumerate(cur.coeffs):
                if c:
                    result[j] = result[j] + a * c
    return L._like(result)


def proportional(L1: DiffOp, L2: DiffOp):
    """f with L1 = f * L2 coefficientwise, or None."""
    L1._check(L2)
    if L1.order != L2.order:
        return None
    f = L1.lc / L2.lc
    for a, b in zip(L1.coeffs, L2.coeffs):
        if a != f * b:
            return None
    return f


def gauge_detect(L1: DiffOp, L2: DiffOp):
    """g with gauge(L1, g) = L2 up to a left factor, or None."""
    if L1.order != L2.order:
        return None
    n = L1.order
    A, B = L1.monic(), L2.monic()
    g = (A.coeff(n - 1) - B.coeff(n - 1)) / n
    if gauge(A, g) == B:
        return g
    return None


# ---------------------------------------------------------------------------
# local analysis


@dataclass
class SingularPoint:
    location: object  # scalar, oo, or a factor-block Poly
    regular: bool
    exponents: list = field(default_factory=list)
    block: bool = False

    def label(self):
        if self.block:
            return f"roots of {self.location}"
        return format_point(self.location)


def local_operator(L: DiffOp, p) -> DiffOp:
    """L in the local coordinate t at p (t = z - p, or t = 1/z at infinity)."""
    p = point(p)
    if is_infinite(p):
        return pullback(L, RatFunc.x().inverse(), canonical=False)
    if not p:
        return L
    return DiffOp([c.taylor_shift(p) for c in L.coeffs], L.var)


def _fuchs_data(L: DiffOp, p):
    """Monic coefficients at t = 0 of the local operator, and regularity."""
    M = local_operator(L, p).monic()
    n = M.order
    regular = True
    lead = []
    for i in range(n):
        b = M.coeffs[i]
        if not b:
            lead.append(mpq(0))
            continue
        o = b.order_at(0)
        if o < -(n - i):
            regular = False
        lead.append(b.leading_at(0) if o == -(n - i) else mpq(0))
    return regular, lead, n


def is_ordinary(L: DiffOp, p) -> bool:
    M = local_operator(L, p).monic()
    return all(not b or b.order_at(0) >= 0 for b in M.coeffs)


def indicial_polynomial(L: DiffOp, p) -> Poly:
    regular, lead, n = _fuchs_data(L, p)
    if not regular:
        raise IrregularSingularity(f"irregular singularity at {format_point(point(p))}")
    e = Poly.x()
    total = Poly()
    fall = Poly.const(1)
    for i in range(n + 1):
        c = lead[i] if i < n else mpq(1)
        if c:
            total = total + fall * c
        fall = fall * (e - i)
    return total


def exponents_at(L: DiffOp, p) -> list:
    """Indicial roots at p with multiplicity, sorted."""
    ind = indicial_polynomial(L, p)
    out = []
    for f, mult in squarefree_decomposition(ind):
        rs = _rational_roots(f)
        if len(rs) != f.deg:
            raise IrrationalExponent(f"indicial factor {f} has non-rational roots")
        for r in rs:
            out.extend([r] * mult)
    return sorted(out)


def singular_points(L: DiffOp, with_exponents=True) -> list:
    if not L.is_rational():
        raise DomainMismatch("singular points need rational coefficients")
    M = L.monic()
    den = reduce(poly_lcm, (c.den for c in M.coeffs), Poly.const(1))
    roots, blocks = find_roots(den)
    out = []
    for p, _ in roots:
        out.append(_singular_record(L, p, with_exponents))
    for b, _ in blocks:
        out.append(SingularPoint(b, _block_regular(M, b), [], block=True))
    if not is_ordinary(L, oo):
        out.append(_singular_record(L, oo, with_exponents))
    return out


def _singular_record(L, p, with_exponents):
    regular, _, _ = _fuchs_data(L, p)
    exps = []
    if regular and with_exponents:
        try:
            exps = exponents_at(L, p)
        except IrrationalExponent:
            exps = []
    return SingularPoint(p, regular, exps)


def _block_regular(M: DiffOp, b: Poly) -> bool:
    """Fuchs condition along an irreducible block: b^(n-i) * a_i has no b in its denominator."""
    n = M.order
    for i in range(n):
        c = M.coeffs[i]
        d = c.den
        k = 0
        while d.deg >= b.deg and not (d % b):
            d = d.exact_div(b)
            k += 1
        if k > n - i:
            return False
    return True


def sort_points(points):
    return sorted(points, key=point_key)


# ---------------------------------------------------------------------------
# systems


@dataclass
class LinearSystem:
    """Y' = A Y (solution side) or X' = X(-A) stored as the matrix -A (integral side)."""

    A: list
    convention: str = "solution"

    def __post_init__(self):
        self.A = [[ratfunc(x) for x in row] for row in self.A]
        n = len(self.A)
        if any(len(row) != n for row in self.A):
            raise ValueError("system matrix must be square")
        if self.convention not in ("solution", "integral"):
            raise ValueError("convention is 'solution' or 'integral'")

    @property
    def n(self):
        return len(self.A)

    def __eq__(self, o):
        return isinstance(o, LinearSystem) and self.convention == o.convention and self.A == o.A


def companion(L: DiffOp) -> LinearSystem:
    M = L.monic()
    n = M.order
    A = [[RatFunc(0)] * n for _ in range(n)]
    for i in range(n - 1):
        A[i][i + 1] = RatFunc(1)
    for j in range(n):
        A[n - 1][j] = -M.coeffs[j]
    return LinearSystem(A, "solution")


def adjoint(S: LinearSystem) -> LinearSystem:
    flip = "integral" if S.convention == "solution" else "solution"
    return LinearSystem([[-x for x in row] for row in S.A], flip)


def companion_and_adjoint(obj, op: str) -> LinearSystem:
    if op == "companion":
        return companion(obj)
    if op == "adjoint":
        return adjoint(companion(obj) if isinstance(obj, DiffOp) else obj)
    raise ValueError(f"unknown op {op!r}")


# ---------------------------------------------------------------------------


def quadext_rewrite(L: DiffOp):
    """Rewrite an operator in v = q d/dz over k(w) as a rational operator in d/dz.

    Returns ``(M, factor)`` with L = factor * M, factor a power of w (w^0 or w^1),
    M with rational coefficients in D = d/dz.
    """
    if L.direction is None:
        raise DomainMismatch("operator is not over a quadratic extension")
    q = L.direction
    mod = q.modulus
    # v^i as an operator in d/dz with QuadExt coefficients
    Dz = DiffOp([0, 1], L.var, direction=QuadExt(1, 0, mod))
    result = [QuadExt(0, 0, mod)] * (L.order + 1)
    cur = [QuadExt(1, 0, mod)]
    for i, a in enumerate(L.coeffs):
        if i:
            cur = [q * c for c in _d_left(Dz, cur)]
        if a:
            for j, c in enumerate(cur):
                if c:
                    result[j] = result[j] + a * c
    parities = {c.w_parity() for c in result if c}
    if len(parities) != 1 or None in parities:
        raise NotRationalizable("coefficients do not share a common w-parity")
    parity = parities.pop()
    if parity == 0:
        coeffs = [c.a for c in result]
        factor = QuadExt(1, 0, mod)
    else:
        coeffs = [c.b for c in result]
        factor = QuadExt(0, 1, mod)
    return DiffOp(coeffs, L.var), factor
