"""Symmetries of operators, their lifts to solutions, descent and k_nabla."""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field

from gmpy2 import mpq

from . import groups, linalg
from .diffop import (
    DiffOp,
    LinearSystem,
    exponents_at,
    SingularPoint,
    gauge,
    gauge_detect,
    is_ordinary,
    proportional,
    pullback,
    singular_points,
)
from .funcfield import (
    MoebiusMap,
    Poly,
    RatFunc,
    RationalMap,
    find_roots,
    format_point,
    is_infinite,
    moebius_from_triples,
    oo,
    point,
    point_key,
    poly_lcm,
)
from .polys import MPoly
from .scalars import get_field, inv, nth_root, scalar
from .series import (
    DEFAULT_ORDER,
    PuiseuxSeries,
    SolutionMatrix,
    frobenius_basis,
    invert_matrix_series,
    ordinary_basis,
    rational_reconstruct,
    ratfunc_series,
    series_matmul,
)


class TooFewPoints(UserWarning):
    pass


class ClosureViolation(AssertionError):
    pass


class ResonantFixedPoint(ValueError):
    pass


class ReconstructionFailed(ArithmeticError):
    pass


class MissingLift(ValueError):
    pass


class DegreeMismatch(ValueError):
    pass


@dataclass
class SymmetryRecord:
    map: MoebiusMap
    factor: RatFunc
    lift: tuple = None  # (C, F)
    lift_status: str = "unavailable"
    notes: list = field(default_factory=list)


@dataclass
class DescentCertificate:
    upstairs: DiffOp
    map: RationalMap
    gauge: RatFunc
    downstairs: DiffOp
    verdict: bool
    residual: DiffOp = None


@dataclass
class KNablaPresentation:
    integrals: list
    ratio_generators: list
    basic_witness: object
    classification: str
    witness_value: RatFunc = None
    unit_integral: object = None
    notes: list = field(default_factory=list)


# ---------------------------------------------------------------------------
# Moebius candidates


def _data(p: SingularPoint):
    return (p.regular, tuple(p.exponents))


def _transport_block(m: MoebiusMap, b: Poly):
    """Monic polynomial whose roots are m(roots of b), or None if a root goes to oo."""
    f = RatFunc(b).compose(m.invert().as_ratfunc())
    num = f.num
    if num.deg != b.deg:
        return None
    return num.monic()


def _preserves(m, resolved, blocks):
    table = {p.location: _data(p) for p in resolved}
    for p in resolved:
        q = m(p.location)
        if q not in table or table[q] != _data(p):
            return False
    block_table = {b.location: b.regular for b in blocks}
    for b in blocks:
        img = _transport_block(m, b.location)
        if img is None or img not in block_table or block_table[img] != b.regular:
            return False
    return True


def _canonical_order(maps):
    def key(m):
        return tuple(point_key(x) for x in m.entries())

    return sorted(set(maps), key=key)


def _involutions_fixing(points):
    """Finite group generated by coordinate involutions fixing <= 2 points."""
    if len(points) == 2:
        p, q = points
        if is_infinite(p):
            p, q = q, p
        mu = MoebiusMap(1, -p, 0, 1) if is_infinite(q) else MoebiusMap(1, -p, 1, -q)
    elif len(points) == 1:
        p = points[0]
        mu = MoebiusMap.identity() if is_infinite(p) else MoebiusMap(0, 1, 1, -p)
    else:
        mu = MoebiusMap.identity()
    base = [MoebiusMap.identity(), MoebiusMap(-1, 0, 0, 1), MoebiusMap(0, 1, 1, 0), MoebiusMap(0, -1, 1, 0)]
    if len(points) == 1:
        base = base[:2]
    mi = mu.invert()
    return [mi @ g @ mu for g in base]


def moebius_candidates(sing, filter_data=True):
    """Moebius maps permuting the singular set with matching local data."""
    resolved = [p for p in sing if not p.block]
    blocks = [p for p in sing if p.block]
    if len(resolved) < 3:
        warnings.warn(
            f"only {len(resolved)} resolved singular points: returning the involutions fixing them",
            TooFewPoints,
            stacklevel=2,
        )
        return _canonical_order(_involutions_fixing([p.location for p in resolved]))
    resolved = sorted(resolved, key=lambda p: point_key(p.location))
    src = resolved[:3]
    out = []
    for tgt in itertools.permutations(resolved, 3):
        if filter_data and any(_data(a) != _data(b) for a, b in zip(src, tgt)):
            continue
        m = moebius_from_triples([p.location for p in src], [p.location for p in tgt])
        if _preserves(m, resolved, blocks) if filter_data else True:
            out.append(m)
    return _canonical_order(out)


# ---------------------------------------------------------------------------
# verification


def verify_symmetry(L, m) -> SymmetryRecord | None:
    if isinstance(L, LinearSystem):
        return verify_system_symmetry(L, m)
    pb = pullback(L, m, canonical=False)
    f = proportional(pb, L)
    if f is None:
        return None
    return SymmetryRecord(m, f)


def _is_dihedral(maps):
    n = len(maps)
    if n < 2 or n % 2:
        return n == 2
    k = n // 2
    ident = MoebiusMap.identity()

    def order(g):
        p, c = g, 1
        while p != ident:
            p = p @ g
            c += 1
        return c

    rots = [g for g in maps if order(g) == k]
    for r in rots:
        cyc = set()
        p = ident
        for _ in range(k):
            cyc.add(p)
            p = p @ r
        for s in maps:
            if s not in cyc and order(s) == 2 and s @ r @ s == r.invert():
                return True
    return False


def group_closed(maps) -> bool:
    s = set(maps)
    return MoebiusMap.identity() in s and all(a @ b in s for a in s for b in s) and all(a.invert() in s for a in s)


def symmetry_group(L, sing=None) -> list:
    """All verified Moebius symmetries of L (or of a first-order system)."""
    if sing is None:
        sing = system_singular_points(L) if isinstance(L, LinearSystem) else singular_points(L)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TooFewPoints)
        cands = moebius_candidates(sing)
    recs = [r for r in (verify_symmetry(L, m) for m in cands) if r is not None]
    maps = [r.map for r in recs]
    if recs and not group_closed(maps):
        raise ClosureViolation("accepted symmetries are not closed under composition")
    return recs


def is_dihedral_group(maps) -> bool:
    return group_closed(maps) and _is_dihedral(list(maps))


def cayley_table(maps):
    idx = {m: i for i, m in enumerate(maps)}
    return [[idx[a @ b] for b in maps] for a in maps]


# ---------------------------------------------------------------------------
# first-order systems Y' = A Y


def system_singular_points(S: LinearSystem):
    """Poles of A (simple pole = Fuchsian) and infinity."""
    den = Poly.const(1)
    for row in S.A:
        for x in row:
            den = poly_lcm(den, x.den)
    rts, _ = find_roots(den)
    out = []
    for p, _ in rts:
        order = max((-(x.order_at(p)) for row in S.A for x in row if x), default=0)
        out.append(SingularPoint(p, order <= 1, []))
    Ainf = _system_at_infinity(S)
    order = max((-(x.order_at(0)) for row in Ainf for x in row if x), default=0)
    if order > 0:
        out.append(SingularPoint(oo, order <= 1, []))
    return out


def _system_at_infinity(S):
    # t = 1/z: dY/dt = -(1/t^2) A(1/t) Y
    t2 = RatFunc(Poly.monomial(2, 1))
    return [[-(x.at_infinity_chart()) / t2 for x in row] for row in S.A]


def system_pullback(S: LinearSystem, m) -> LinearSystem:
    r = m.as_ratfunc() if isinstance(m, MoebiusMap) else RatFunc(m)
    dr = r.derivative()
    return LinearSystem([[dr * x.compose(r) for x in row] for row in S.A], S.convention)


def verify_system_symmetry(S: LinearSystem, m, F=None) -> SymmetryRecord | None:
    """sigma^* A = F A F^-1 + F' F^-1 with a rational gauge F (default identity)."""
    P = system_pullback(S, m)
    n = S.n
    if F is None:
        ok = P.A == S.A
    else:
        F = [[RatFunc(x) if not isinstance(x, RatFunc) else x for x in row] for row in F]
        lhs = [[sum((P.A[i][k] * F[k][j] for k in range(n)), RatFunc(0)) for j in range(n)] for i in range(n)]
        rhs = [[sum((F[i][k] * S.A[k][j] for k in range(n)), RatFunc(0)) + F[i][j].derivative() for j in range(n)] for i in range(n)]
        ok = lhs == rhs
    if not ok:
        return None
    return SymmetryRecord(m, RatFunc(1))


# ---------------------------------------------------------------------------
# lifts


def local_map_series(m, q, n) -> PuiseuxSeries:
    """sigma in the local coordinate at its fixed point q."""
    q = point(q)
    r = m.as_ratfunc() if isinstance(m, MoebiusMap) else RatFunc(m)
    if m(q) != q:
        raise ValueError(f"{format_point(q)} is not fixed by the map")
    t = RatFunc.x()
    if is_infinite(q):
        phi = r.compose(t.inverse()).inverse()
    else:
        phi = r.compose(t + q) - q
    s = ratfunc_series(phi, 0, n)
    return PuiseuxSeries(q, s.e, s.m, s.c, s.prec)


def compose_matrix(S: SolutionMatrix, m, q) -> list:
    """Entries y_j^(i)(sigma(z)) as series at q."""
    n = max(len(s.c) for row in S.entries for s in row) + 4
    phi = local_map_series(m, q, n)
    return [[s.compose_with_map(phi) for s in row] for row in S.entries]


def _series_solve_row(basis, targets):
    """Constant matrix M with targets[j] = sum_l basis[l] * M[l][j]."""
    precs = [s.prec for s in list(basis) + list(targets) if s.prec is not None]
    cap = min(precs) if precs else None
    exps = sorted({x for s in basis for x in s.exponents() if cap is None or x < cap})
    n = len(basis)
    rows = [[s.coeff_at(x) for s in basis] for x in exps]
    M = [[None] * n for _ in range(n)]
    for j, tgt in enumerate(targets):
        sol = linalg.solve(rows, [tgt.coeff_at(x) for x in exps])
        if sol is None:
            return None
        for l in range(n):
            M[l][j] = sol[l]
    return M


def _const_mul(S, M):
    out = []
    for row in S:
        new = []
        for j in range(len(M[0])):
            acc = None
            for l, s in enumerate(row):
                if M[l][j]:
                    term = s.scale(M[l][j])
                    acc = term if acc is None else acc + term
            new.append(acc if acc is not None else PuiseuxSeries.zero(row[0].point, row[0].prec))
        out.append(new)
    return out


def _all_zero(mat):
    return all((s.is_zero() for row in mat for s in row))


def compute_lift(L: DiffOp, rec: SymmetryRecord, q, K=DEFAULT_ORDER, exponents=None) -> SymmetryRecord:
    """Constant C and rational F with F * S = (S o sigma) * C on series at q."""
    q = point(q)
    if rec.map(q) != q:
        raise ValueError(f"{format_point(q)} is not fixed by {rec.map.to_str()}")
    if is_ordinary(L, q):
        S = ordinary_basis(L, q, K)
    else:
        exps = exponents or exponents_at(L, q)
        fr = [e - int(e // 1) for e in exps]
        if len(set(fr)) != len(fr):
            raise ResonantFixedPoint(f"exponents at {format_point(q)} are resonant")
        S = frobenius_basis(L, q, exps, K)
    Ssig = compose_matrix(S, rec.map, q)
    Cp = _series_solve_row(S.entries[0], Ssig[0])
    if Cp is None:
        raise ReconstructionFailed("composed solutions are not a constant combination of the basis")
    C = linalg.inverse(Cp)
    rhs = _const_mul(Ssig, C)  # (S o sigma) C
    Sinv = invert_matrix_series(S)
    Fser = series_matmul(rhs, Sinv)
    F = []
    for row in Fser:
        frow = []
        for s in row:
            f = rational_reconstruct(s)
            if f is None:
                rec.lift, rec.lift_status = (C, None), "unavailable"
                rec.notes.append("F is not rational to the attempted bounds")
                return rec
            frow.append(f)
        F.append(frow)
    rec.lift = (C, F)
    rec.lift_status = "computed"
    rec.notes.append(f"lift identity certified at {format_point(q)} to order {lift_identity_order(S, Ssig, C, F)}")
    return rec


def lift_identity_order(S: SolutionMatrix, Ssig, C, F):
    """Relative order to which F * S - (S o sigma) * C vanishes (raises if it does not)."""
    n = len(S.entries)
    pt = S.point
    Fs = [[ratfunc_series(f, pt, max(len(s.c) for s in S.entries[0]) + 4) for f in row] for row in F]
    lhs = series_matmul(Fs, S.entries)
    rhs = _const_mul(Ssig, C)
    orders = []
    for i in range(n):
        for j in range(n):
            d = lhs[i][j] - rhs[i][j]
            if not d.is_zero():
                raise ClosureViolation("lift identity fails")
            orders.append(d.prec - S.entries[i][j].e if d.prec is not None else None)
    finite = [o for o in orders if o is not None]
    return min(finite) if finite else None


def verify_lift(S: SolutionMatrix, m, q, C, F=None) -> bool:
    """User-supplied lift: (S o sigma) * C == F * S on series (F defaults to I)."""
    Ssig = compose_matrix(S, m, q)
    n = len(S.entries)
    C = [[scalar(x) for x in row] for row in C]
    if F is None:
        F = [[RatFunc(1) if i == j else RatFunc(0) for j in range(n)] for i in range(n)]
    pt = S.point
    N = max(len(s.c) for row in S.entries for s in row) + 4
    Fs = [[ratfunc_series(f, pt, N) for f in row] for row in F]
    lhs = series_matmul(Fs, S.entries)
    rhs = _const_mul(Ssig, C)
    return all((lhs[i][j] - rhs[i][j]).is_zero() for i in range(n) for j in range(n))


def lift_normalizes(rec: SymmetryRecord, G, relations=(), layout=None) -> bool:
    """C normalizes G (finite group or D_inf-type lam data) and fixes the relation ideal."""
    if rec.lift is None:
        raise MissingLift("symmetry has no lift")
    C = groups._freeze(rec.lift[0])
    Ci = groups.mat_inv(C)
    if isinstance(G, groups.FiniteMatrixGroup):
        for g in G.generators:
            if G.key(groups.mat_mul(groups.mat_mul(C, g), Ci)) not in G._set:
                return False
    else:
        for g in G:
            g = g if isinstance(g, groups.GroupElement) else groups.GroupElement.finite(g)
            if g.has_lambda:
                h = groups.conjugate_lam(C, g)
                if h is None or not groups.torus_normalizer_member(h):
                    return False
            elif not groups.torus_normalizer_member(groups.mat_mul(groups.mat_mul(C, g.matrix), Ci)):
                return False
    if relations:
        return groups.fixes_ideal(C, list(relations), layout=layout)
    return True


# ---------------------------------------------------------------------------
# descent


def verify_descent(upstairs: DiffOp, r, downstairs: DiffOp) -> DescentCertificate:
    rm = r if isinstance(r, (RationalMap, MoebiusMap)) else RationalMap(r)
    pb = pullback(downstairs.with_var(upstairs.var), rm)
    g = gauge_detect(pb, upstairs)
    if g is not None:
        return DescentCertificate(upstairs, rm, g, downstairs, True)
    # report the difference for the best gauge candidate
    n = upstairs.order
    A, B = pb.monic(), upstairs.monic()
    cand = (A.coeff(n - 1) - B.coeff(n - 1)) / n if A.order == B.order else RatFunc(0)
    res = None
    try:
        res = gauge(A, cand).monic() - B
    except Exception:  # noqa: BLE001 - residual is informational
        res = None
    return DescentCertificate(upstairs, rm, cand, downstairs, False, res)


# ---------------------------------------------------------------------------
# k_nabla


def _split_ratio(text):
    depth = 0
    for k in range(len(text) - 1, -1, -1):
        ch = text[k]
        if ch == ")":
            depth += 1
        elif ch == "(":
            depth -= 1
        elif ch == "/" and depth == 0:
            left = text[:k].strip()
            if left.endswith(")") or left.replace("_", "").isalnum():
                return left, text[k + 1 :].strip()
    return text, "1"


def _weighted_degree(P: MPoly, weights):
    ws = {sum(w * k for w, k in zip(weights, e)) for e in P.terms}
    if len(ws) > 1:
        raise DegreeMismatch(f"{P} is not homogeneous in the integral degrees")
    return ws.pop() if ws else 0


def knabla_presentation(integrals: dict, witness=None, unit_candidate=None) -> KNablaPresentation:
    """integrals: name -> DualFirstIntegral (poly, value, degree)."""
    from .parser import parse_expression

    if not integrals:
        raise ValueError("no integrals")
    names = list(integrals)
    gens = []
    pairs = [(i, j) for i in range(len(names)) for j in range(i + 1, len(names))] or [(0, 0)]
    for i, j in pairs:
        a, b = integrals[names[i]], integrals[names[j]]
        ni, nj = a.degree, b.degree
        l = ni * nj // _gcd(ni, nj)
        mi, mj = l // ni, l // nj
        assert mi * ni == mj * nj
        gens.append((a.value**mi / b.value**mj, (names[i], names[j], mi, mj)))
    notes = []
    value = None
    cls = "undetermined"
    wit = None
    if witness is not None:
        if isinstance(witness, str):
            num_s, den_s = _split_ratio(witness)
            num = parse_expression(num_s, "polynomial", variables=names)
            den = parse_expression(den_s, "polynomial", variables=names)
        else:
            num, den = witness
        weights = [integrals[n].degree for n in names]
        if _weighted_degree(num, weights) != _weighted_degree(den, weights):
            raise DegreeMismatch("witness numerator and denominator have different degrees")
        vals = [integrals[n].value for n in names]
        value = num.evaluate(vals, one=RatFunc(1)) / den.evaluate(vals, one=RatFunc(1))
        wit = (num, den)
        if value == RatFunc.x():
            cls = "basic"
    unit = None
    for n in names if unit_candidate is None else [unit_candidate]:
        v = integrals[n].value
        if v and v.is_constant():
            c = v.num.c[0] * inv(v.den.c[0])
            unit = (n, inv(c))
            break
    if unit is not None:
        notes.append(f"unit integral test passes: {format_scalar_safe(unit[1])}*{unit[0]} has value 1")
        if cls != "basic":
            cls = "standard-candidate"
            notes.append("k/k_nabla Galois with abelian Galois group")
    return KNablaPresentation(integrals, gens, wit, cls, value, unit, notes)


def format_scalar_safe(x):
    from .scalars import format_scalar

    s = format_scalar(x)
    return f"({s})" if any(ch in s for ch in " /") else s


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


# ---------------------------------------------------------------------------
# diagonal rescaling of named solutions


def _unit_candidates(order=12):
    f = get_field()
    out = []
    for k in range(order):
        if f.N % order == 0:
            out.append(f.root_of_unity(order) ** k)
    return out


def find_rescaling(relation: MPoly, target: MPoly, order=12):
    """Diagonal d (first entry 1, entries roots of unity) with relation(d*v) = kappa * target."""
    variables = relation.vars
    target = target.rename(variables) if target.vars != variables else target
    if set(relation.terms) != set(target.terms):
        return None
    cands = _unit_candidates(order)
    one = mpq(1)
    for rest in itertools.product(cands, repeat=len(variables) - 1):
        d = (one,) + rest
        scaled = MPoly(variables, {e: c * _mono(d, e) for e, c in relation.terms.items()})
        e0, c0 = next(iter(target.terms.items()))
        kappa = scaled.terms[e0] * inv(c0)
        if scaled == target * kappa:
            return d, kappa
    return None


def _mono(d, e):
    acc = mpq(1)
    for x, k in zip(d, e):
        for _ in range(k):
            acc = acc * x
    return acc


def overall_scale(computed: RatFunc, target: RatFunc, degree: int):
    """u with u^degree * computed == target, when the ratio is a constant."""
    ratio = target / computed
    if not ratio.is_constant():
        return None
    c = ratio.num.c[0] * inv(ratio.den.c[0])
    try:
        u = nth_root(c, degree)
    except Exception:  # noqa: BLE001 - root not in the session field
        return None
    return u
