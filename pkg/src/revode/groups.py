"""Finite matrix groups over the cyclotomic field and their invariants.

Groups act on the right: x_j -> sum_l x_l g[l][j] for a vector of variables,
and X[i,j] -> sum_l X[i,l] g[l][j] for a matrix of indeterminates.  Elements
with entries c*lam^e (a formal torus parameter) never enter closure; they
are only used in invariance checks, identically in lam.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from gmpy2 import mpq

from . import linalg
from .polys import MPoly, monomial_exponents, monomials
from .scalars import format_scalar, inv, scalar

LAM = "lam"
DEFAULT_BOUND = 10_000
DEGREE_CAP = 12


class BoundExceeded(RuntimeError):
    pass


class NotASubgroup(ValueError):
    pass


class DegreeOverflow(ValueError):
    pass


class InconsistentData(ValueError):
    pass


def _freeze(m):
    return tuple(tuple(scalar(x) for x in row) for row in m)


def mat_mul(a, b):
    n, k, m = len(a), len(b), len(b[0])
    return tuple(tuple(sum((a[i][t] * b[t][j] for t in range(k)), mpq(0)) for j in range(m)) for i in range(n))


def mat_inv(a):
    return _freeze(linalg.inverse([list(r) for r in a]))


def mat_id(n):
    return tuple(tuple(mpq(1) if i == j else mpq(0) for j in range(n)) for i in range(n))


def projective_key(m):
    """Scale so that the first nonzero entry is 1."""
    first = next(x for row in m for x in row if x)
    s = inv(first)
    return tuple(tuple(x * s for x in row) for row in m)


def is_scalar_matrix(m):
    n = len(m)
    return all((m[i][j] == 0) if i != j else m[i][i] == m[0][0] for i in range(n) for j in range(n))


def mat_str(m):
    return "[" + "; ".join(", ".join(format_scalar(x) for x in row) for row in m) + "]"


# ---------------------------------------------------------------------------
# torus (lam) elements


@dataclass(frozen=True)
class LamEntry:
    """c * lam^e (c = 0 for the zero entry)."""

    c: object
    e: int = 0

    def poly(self, variables):
        if not self.c:
            return MPoly(variables)
        exps = [0] * len(variables)
        exps[variables.index(LAM)] = self.e
        return MPoly(variables, {tuple(exps): self.c})


@dataclass
class GroupElement:
    matrix: tuple
    has_lambda: bool = False

    @classmethod
    def finite(cls, m):
        return cls(_freeze(m), False)

    @classmethod
    def torus(cls, entries):
        """entries: rows of LamEntry."""
        return cls(tuple(tuple(entries[i]) for i in range(len(entries))), True)

    @property
    def n(self):
        return len(self.matrix)

    def entry_poly(self, i, j, variables):
        x = self.matrix[i][j]
        if self.has_lambda:
            return x.poly(variables)
        return MPoly.const(variables, x)


# ---------------------------------------------------------------------------


class FiniteMatrixGroup:
    def __init__(self, generators, elements, projective=False):
        self.generators = [_freeze(g) for g in generators]
        self.elements = list(elements)
        self._set = set(self.elements)
        self.projective = projective
        self.n = len(self.generators[0]) if self.generators else len(self.elements[0])

    @property
    def order(self):
        return len(self.elements)

    def __len__(self):
        return len(self.elements)

    def key(self, m):
        return projective_key(m) if self.projective else _freeze(m)

    def __contains__(self, m):
        return self.key(m) in self._set

    def contains_all(self, other):
        return all(self.key(g) in self._set for g in other.elements)


def closure(gens, bound=DEFAULT_BOUND, projective=False) -> FiniteMatrixGroup:
    gens = [g.matrix if isinstance(g, GroupElement) else _freeze(g) for g in gens]
    if not gens:
        raise ValueError("no generators")
    n = len(gens[0])
    key = projective_key if projective else (lambda m: m)
    ident = key(mat_id(n))
    elements = [ident]
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for a in frontier:
            for g in gens:
                b = key(mat_mul(a, g))
                if b not in seen:
                    seen.add(b)
                    elements.append(b)
                    nxt.append(b)
                    if len(elements) > bound:
                        raise BoundExceeded(f"group has more than {bound} elements")
        frontier = nxt
    return FiniteMatrixGroup(gens, elements, projective)


def center(G: FiniteMatrixGroup) -> FiniteMatrixGroup:
    els = [a for a in G.elements if all(G.key(mat_mul(a, g)) == G.key(mat_mul(g, a)) for g in G.generators)]
    return FiniteMatrixGroup(els[:1] or [mat_id(G.n)], els, G.projective)


def projectivize(G: FiniteMatrixGroup) -> FiniteMatrixGroup:
    seen, els = set(), []
    for a in G.elements:
        k = projective_key(a)
        if k not in seen:
            seen.add(k)
            els.append(k)
    return FiniteMatrixGroup([projective_key(g) for g in G.generators], els, True)


def _conj(h, g, hinv):
    return mat_mul(mat_mul(h, g), hinv)


def is_subgroup(G, H) -> bool:
    return G.order <= H.order and all(H.key(g) in H._set for g in G.elements)


def is_normal_in(G: FiniteMatrixGroup, H: FiniteMatrixGroup) -> bool:
    if not is_subgroup(G, H):
        raise NotASubgroup("G is not contained in H")
    for h in H.generators:
        hinv = mat_inv(h)
        for g in G.generators:
            if G.key(_conj(h, g, hinv)) not in G._set:
                return False
    return True


def normalizer_in(G: FiniteMatrixGroup, H: FiniteMatrixGroup) -> FiniteMatrixGroup:
    if not is_subgroup(G, H):
        raise NotASubgroup("G is not contained in H")
    els = []
    for h in H.elements:
        hinv = mat_inv(h)
        if all(G.key(_conj(h, g, hinv)) in G._set for g in G.generators):
            els.append(h)
    return FiniteMatrixGroup(els[:1], els, H.projective)


def quotient_order(H: FiniteMatrixGroup, G: FiniteMatrixGroup) -> int:
    if not is_subgroup(G, H):
        raise NotASubgroup("G is not contained in H")
    if H.order % G.order:
        raise InconsistentData("Lagrange violated")
    return H.order // G.order


def coset_order(h, G: FiniteMatrixGroup) -> int:
    k, p = 1, h
    while G.key(p) not in G._set:
        p = mat_mul(p, h)
        k += 1
        if k > 10_000:
            raise BoundExceeded("coset order too large")
    return k


def is_cyclic_quotient(H: FiniteMatrixGroup, G: FiniteMatrixGroup) -> bool:
    if not is_normal_in(G, H):
        return False
    idx = quotient_order(H, G)
    return any(coset_order(h, G) == idx for h in H.elements)


def structure(G, op, H=None):
    ops = {
        "center": lambda: center(G),
        "is_normal_in": lambda: is_normal_in(G, H),
        "normalizer_in": lambda: normalizer_in(G, H),
        "projectivize": lambda: projectivize(G),
        "quotient_order": lambda: quotient_order(H, G),
        "is_cyclic_quotient": lambda: is_cyclic_quotient(H, G),
    }
    return ops[op]()


def is_abelian(G: FiniteMatrixGroup) -> bool:
    return all(G.key(mat_mul(a, b)) == G.key(mat_mul(b, a)) for a in G.generators for b in G.generators)


def element_order(G: FiniteMatrixGroup, a) -> int:
    ident = G.key(mat_id(G.n))
    k, b = 1, G.key(a)
    while b != ident:
        b = G.key(mat_mul(b, a))
        k += 1
    return k


def is_dihedral(G: FiniteMatrixGroup) -> bool:
    """Dihedral of order 2n (n >= 2): a rotation r of order n and a reflection s outside <r>."""
    if G.order % 2 or G.order < 4:
        return False
    n = G.order // 2
    for r in G.elements:
        if element_order(G, r) != n:
            continue
        rot = {G.key(mat_id(G.n))}
        b = r
        while G.key(b) not in rot:
            rot.add(G.key(b))
            b = mat_mul(b, r)
        rinv = G.key(mat_inv(r))
        for s in G.elements:
            if G.key(s) in rot or element_order(G, s) != 2:
                continue
            if G.key(mat_mul(mat_mul(s, r), s)) == rinv:
                return True
    return False


# ---------------------------------------------------------------------------
# action on polynomials


def act(g, P: MPoly, layout="vector") -> MPoly:
    """P(x g) (vector layout) or P(X g) (matrix layout, X[i,j] names).

    For torus elements the result lives in P.vars + (lam,).
    """
    g = g if isinstance(g, GroupElement) else GroupElement.finite(g)
    variables = P.vars + ((LAM,) if g.has_lambda and LAM not in P.vars else ())
    Pe = P.rename(variables) if variables == P.vars else MPoly(variables, {e + (0,): c for e, c in P.terms.items()})
    gens = MPoly.gens(variables)
    images = list(gens)
    n = g.n
    if layout == "vector":
        for j in range(n):
            acc = MPoly(variables)
            for l in range(n):
                acc = acc + gens[l] * g.entry_poly(l, j, variables)
            images[j] = acc
    else:
        names = list(variables)
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                acc = MPoly(variables)
                for l in range(1, n + 1):
                    acc = acc + gens[names.index(f"X[{i},{l}]")] * g.entry_poly(l - 1, j - 1, variables)
                images[names.index(f"X[{i},{j}]")] = acc
    return Pe.linear_substitute(images)


def reynolds(G: FiniteMatrixGroup, P: MPoly, layout="vector") -> MPoly:
    acc = MPoly(P.vars)
    for g in G.elements:
        acc = acc + act(g, P, layout)
    return acc / G.order


def reynolds_invariants(G: FiniteMatrixGroup, d: int, variables=None, layout="vector"):
    variables = tuple(variables or [f"x{k + 1}" for k in range(G.n)])
    mons = monomials(variables, d)
    exps = monomial_exponents(len(variables), d)
    vecs = []
    for m in mons:
        r = reynolds(G, m, layout)
        vecs.append([r.coefficient(e) for e in exps])
    red, piv = linalg.rref(vecs)
    basis = [MPoly(variables, dict(zip(exps, row))) for row in red if any(row)]
    for P in basis:
        for g in G.generators:
            if act(g, P, layout) != P:
                raise AssertionError("Reynolds output not invariant")
    return basis


# ---------------------------------------------------------------------------
# ideals fixed by group elements


@dataclass
class InvariantLayout:
    """Symbols standing for polynomials in base variables (e.g. X_{4,1} = (X11 X12)^2)."""

    symbols: tuple
    definitions: dict  # symbol -> MPoly over base variables
    layout: str = "matrix"

    def weight(self, s):
        return self.definitions[s].degree

    def symbol_monomials(self, w):
        """Exponent vectors over symbols of total weight w (single symbols first)."""
        ws = [self.weight(s) for s in self.symbols]
        out = []

        def rec(k, rem, cur):
            if k == len(ws):
                if rem == 0:
                    out.append(tuple(cur))
                return
            for a in range(rem // ws[k], -1, -1):
                rec(k + 1, rem - a * ws[k], cur + [a])

        rec(0, w, [])
        out.sort(key=lambda e: (sum(e), [-x for x in e]))
        return out

    def expand(self, e):
        base = next(iter(self.definitions.values())).vars
        acc = MPoly.const(base, 1)
        for s, k in zip(self.symbols, e):
            for _ in range(k):
                acc = acc * self.definitions[s]
        return acc

    def induced(self, g):
        """Images of the symbols under g, as polynomials in symbols (+ lam).

        None when g does not preserve the span of invariants of some weight.
        """
        g = g if isinstance(g, GroupElement) else GroupElement.finite(g)
        out_vars = self.symbols + ((LAM,) if g.has_lambda else ())
        images = []
        for s in self.symbols:
            P = act(g, self.definitions[s], self.layout)
            w = self.weight(s)
            cands = self.symbol_monomials(w)
            cols = [self.expand(e) for e in cands]
            parts = _split_lam(P)
            img = MPoly(out_vars)
            for lam_e, Q in parts.items():
                vec = _express(Q, cols)
                if vec is None:
                    return None
                for c, e in zip(vec, cands):
                    if c:
                        ee = e + ((lam_e,) if g.has_lambda else ())
                        img = img + MPoly(out_vars, {ee: c})
            images.append(img)
        return images


def _split_lam(P: MPoly):
    if LAM not in P.vars:
        return {0: P}
    k = P.vars.index(LAM)
    base = P.vars[:k] + P.vars[k + 1 :]
    out = {}
    for e, c in P.terms.items():
        le = e[k]
        ee = e[:k] + e[k + 1 :]
        out.setdefault(le, {})[ee] = c
    return {le: MPoly(base, t) for le, t in out.items()}


def _express(Q: MPoly, cols):
    """Coefficients v with Q = sum v_k cols[k], or None."""
    keys = sorted({e for c in cols for e in c.terms} | set(Q.terms))
    A = [[c.coefficient(k) for c in cols] for k in keys]
    b = [Q.coefficient(k) for k in keys]
    return linalg.solve(A, b)


def _in_span(P: MPoly, spanning):
    if not P:
        return True
    return _express(P, spanning) is not None


def ideal_part(gens, weight_of, degree, monomials_of_weight):
    """Spanning set of the degree part of the ideal generated by gens."""
    span = []
    for G in gens:
        w = weight_of(G)
        if w > degree:
            continue
        for e in monomials_of_weight(degree - w):
            span.append(G * MPoly(G.vars, {e: 1}))
    return span


def fixes_ideal(g, gens, layout=None, cap=DEGREE_CAP, vector_layout="vector") -> bool:
    """Does g map the ideal generated by gens into itself (identically in lam)?

    ``layout`` is an InvariantLayout when gens are written in invariant
    symbols; otherwise gens are polynomials in the base variables acted on
    with ``vector_layout``.
    """
    g = g if isinstance(g, GroupElement) else GroupElement.finite(g)
    gens = [P for P in gens if P]
    if not gens:
        return True
    if layout is not None:
        images = layout.induced(g)
        if images is None:
            return False
        sym_vars = images[0].vars if images else layout.symbols

        def weight_of(P):
            return max(sum(layout.weight(s) * k for s, k in zip(layout.symbols, e)) for e in P.terms)

        def mons(w):
            return layout.symbol_monomials(w)

        transformed = []
        for P in gens:
            if weight_of(P) > cap:
                raise DegreeOverflow(f"degree {weight_of(P)} exceeds cap {cap}")
            T = P.rename(layout.symbols)
            if sym_vars != layout.symbols:
                T = MPoly(sym_vars, {e + (0,): c for e, c in T.terms.items()})
            transformed.append((weight_of(P), T.linear_substitute(images + ([MPoly.var(sym_vars, LAM)] if LAM in sym_vars else []))))
        for w, T in transformed:
            span = ideal_part(gens, weight_of, w, mons)
            for _, part in _split_lam(T).items():
                if not _in_span(part, span):
                    return False
        return True
    # base-variable ideal
    base = gens[0].vars
    for P in gens:
        if P.degree > cap:
            raise DegreeOverflow(f"degree {P.degree} exceeds cap {cap}")
        T = act(g, P, vector_layout)
        d = P.degree
        span = ideal_part(gens, lambda Q: Q.degree, d, lambda w: monomial_exponents(len(base), w))
        for _, part in _split_lam(T).items():
            if not _in_span(part.rename(base) if part.vars != base else part, span):
                return False
    return True


# ---------------------------------------------------------------------------
# D_infinity style data: diagonal or anti-diagonal with unit entries


def torus_normalizer_member(m) -> bool:
    """Is m (finite or lam) of the form diag(u, 1/u) or antidiag(u, -1/u)?"""
    g = m if isinstance(m, GroupElement) else GroupElement.finite(m)
    if g.n != 2:
        return False
    a, b = g.matrix[0]
    c, d = g.matrix[1]

    def val(x):
        return (x.c, x.e) if g.has_lambda else (x, 0)

    (ac, ae), (bc, be), (cc, ce), (dc, de) = val(a), val(b), val(c), val(d)
    if not bc and not cc and ac and dc:
        return ac * dc == 1 and ae + de == 0
    if not ac and not dc and bc and cc:
        return bc * cc == -1 and be + ce == 0
    return False


def conjugate_lam(C, g: GroupElement) -> GroupElement:
    """C g C^-1 for a finite C and a torus element g (2x2 monomial entries)."""
    Ci = mat_inv(C)
    variables = (LAM,)
    n = g.n
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            acc = MPoly(variables)
            for k in range(n):
                for l in range(n):
                    coef = C[i][k] * Ci[l][j]
                    if coef:
                        acc = acc + g.entry_poly(k, l, variables) * coef
            if not acc:
                row.append(LamEntry(mpq(0)))
            elif len(acc.terms) == 1:
                (e,), c = next(iter(acc.terms.items()))
                row.append(LamEntry(c, e))
            else:
                return None
        out.append(row)
    return GroupElement.torus(out)


# ---------------------------------------------------------------------------
# exact sequences


@dataclass
class ExactSequenceReport:
    orders: dict
    verdicts: dict
    mode: str
    exact: bool
    notes: list = field(default_factory=list)


def exact_sequence_report(Z, G, F, Sym, mode="projective", inner=None, quotient_cyclic=None) -> ExactSequenceReport:
    """Check 1 -> Z(G) -> G -> F -> Sym -> 1 (projective) or 1 -> G -> F -> Sym -> 1 (linear).

    Arguments are orders or FiniteMatrixGroup objects.  With groups, the
    inner image (projectivized G) must be normal in F; ``inner`` may be
    supplied explicitly.
    """

    def order(x):
        return x.order if isinstance(x, FiniteMatrixGroup) else int(x)

    oz, og, of, os_ = order(Z), order(G), order(F), order(Sym)
    for o in (oz, og, of, os_):
        if o <= 0:
            raise InconsistentData("orders must be positive")
    verdicts = {}
    notes = []
    if mode == "projective":
        if og % oz:
            raise InconsistentData("|Z(G)| does not divide |G|")
        inner_order = og // oz
        verdicts["kernel_matches_image"] = of % os_ == 0 and of // os_ == inner_order
    elif mode == "linear":
        verdicts["kernel_matches_image"] = of % os_ == 0 and of // os_ == og
        verdicts["center_injects"] = og % oz == 0
        inner_order = og
    else:
        raise ValueError("mode is 'projective' or 'linear'")
    group_mode = all(isinstance(x, FiniteMatrixGroup) for x in (G, F))
    if group_mode:
        inner_group = inner or (projectivize(G) if mode == "projective" else G)
        verdicts["inner_normal"] = is_normal_in(inner_group, F)
        if isinstance(Z, FiniteMatrixGroup):
            verdicts["center_is_center"] = Z.order == center(G).order
        if quotient_cyclic is not None:
            verdicts["quotient_cyclic"] = is_cyclic_quotient(F, inner_group) == quotient_cyclic
    else:
        notes.append("arithmetic mode: only order multiplicativity is checked")
        if quotient_cyclic is not None:
            notes.append("quotient structure not checked without group data")
    exact = all(verdicts.values())
    return ExactSequenceReport(
        {"center": oz, "group": og, "image": of, "symmetry": os_}, verdicts, "groups" if group_mode else "arithmetic", exact, notes
    )


# ---------------------------------------------------------------------------
# curated data files

DATA_DIR = Path(__file__).parent / "data" / "groups"


def _parse_entry(text):
    text = str(text).strip().replace(" ", "")
    if "lambda" in text or "lam" in text:
        t = text.replace("lambda", "lam")
        coef, _, rest = t.partition("lam")
        coef = coef.rstrip("*") or "1"
        if coef == "-":
            coef = "-1"
        e = 1
        if rest.startswith("^"):
            e = int(rest[1:].strip("()"))
        if coef.endswith("/"):
            # 1/lam^k
            coef = coef[:-1] or "1"
            e = -e
        return LamEntry(scalar(coef), e)
    return scalar(text)


def load_group_data(name_or_path):
    """Load a curated group file; returns dict with parsed matrices."""
    p = Path(name_or_path)
    if not p.suffix:
        p = DATA_DIR / f"{name_or_path}.json"
    raw = json.loads(p.read_text())
    if not raw.get("provenance"):
        raise InconsistentData(f"{p.name}: provenance note is mandatory")
    out = dict(raw)
    gens = []
    for m in raw["generators"]:
        rows = [[_parse_entry(x) for x in row] for row in m]
        if any(isinstance(x, LamEntry) for row in rows for x in row):
            rows = [[x if isinstance(x, LamEntry) else LamEntry(x, 0) for x in row] for row in rows]
            gens.append(GroupElement.torus(rows))
        else:
            gens.append(GroupElement.finite(rows))
    out["generators"] = gens
    return out


def group_from_data(name_or_path, bound=DEFAULT_BOUND, projective=None):
    data = load_group_data(name_or_path)
    finite = [g for g in data["generators"] if not g.has_lambda]
    proj = data.get("projective", False) if projective is None else projective
    return closure(finite, bound, projective=proj), data
