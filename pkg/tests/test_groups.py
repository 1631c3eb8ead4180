import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import examples, rationals
from revode.groups import (
    GroupElement,
    InvariantLayout,
    LamEntry,
    act,
    center,
    closure,
    fixes_ideal,
    group_from_data,
    is_abelian,
    is_cyclic_quotient,
    is_dihedral,
    is_normal_in,
    mat_mul,
    projectivize,
    quotient_order,
    reynolds,
    reynolds_invariants,
)
from revode.polys import MPoly, matrix_vars, monomials

NAMES = ["A5", "F36", "G27", "G54", "Gal16"]


@pytest.fixture(scope="module")
def curated():
    return {n: group_from_data(n)[0] for n in NAMES}


def test_closure_is_idempotent(curated):
    for G in curated.values():
        H = closure(G.elements, projective=G.projective)
        assert set(H.elements) == set(G.elements)


def test_curated_orders(curated):
    assert curated["A5"].order == 60
    assert curated["G27"].order == 27
    assert curated["G54"].order == 54
    assert curated["Gal16"].order == 8
    assert projectivize(curated["G27"]).order == 9
    assert projectivize(curated["G54"]).order == 18
    assert curated["F36"].order == 36


def test_lagrange(curated):
    for G in curated.values():
        assert G.order % center(G).order == 0
        for g in G.generators:
            assert G.order % closure([g], projective=G.projective).order == 0
    inner = projectivize(curated["G27"])
    assert curated["F36"].order % inner.order == 0
    assert quotient_order(curated["F36"], inner) == 4


def test_normal_subgroups(curated):
    F = curated["F36"]
    for name in ("G27", "G54"):
        inner = projectivize(curated[name])
        assert is_normal_in(inner, F)
    assert is_cyclic_quotient(F, projectivize(curated["G54"]))


def test_small_group_examples():
    G = closure([[[1, 0], [0, -1]]])
    assert G.order == 2
    assert center(G).order == 2 and is_abelian(G)


def test_trivial_group_invariants_are_all_monomials():
    T = closure([[[1, 0], [0, 1]]])
    basis = reynolds_invariants(T, 3)
    assert len(basis) == 4
    assert all(len(P.terms) == 1 for P in basis)


def test_dihedral_detection(curated):
    D4 = closure([[[0, 1], [1, 0]], [[1, 0], [0, -1]]])
    assert D4.order == 8 and is_dihedral(D4)
    assert not is_dihedral(curated["Gal16"])
    assert is_abelian(curated["Gal16"])


@st.composite
def cubic_forms(draw):
    vs = ("x1", "x2", "x3")
    mons = monomials(vs, 3)
    acc = MPoly(vs)
    for m in mons:
        c = draw(st.one_of(st.just(0), rationals))
        acc = acc + m * c
    return acc


@examples(50)
@given(cubic_forms())
def test_reynolds_outputs_invariant_and_idempotent(P):
    G = group_from_data("G27")[0]
    R = reynolds(G, P)
    for g in G.generators:
        assert act(g, R) == R
    assert reynolds(G, R) == R


def test_reynolds_invariants_of_g27_in_degree_three():
    G = group_from_data("G27")[0]
    basis = reynolds_invariants(G, 3)
    assert basis
    for P in basis:
        for g in G.generators:
            assert act(g, P) == P


small_matrices = st.lists(st.lists(st.integers(-2, 2), min_size=2, max_size=2), min_size=2, max_size=2).filter(
    lambda m: m[0][0] * m[1][1] - m[0][1] * m[1][0] != 0
)
KNOWN = [[[2, 0], [0, 3]], [[0, 1], [1, 0]], [[-1, 0], [0, 1]]]


@examples(100)
@given(small_matrices, st.sampled_from(KNOWN))
def test_fixes_ideal_is_constant_on_cosets(h, k):
    x1, x2 = MPoly.gens(("x1", "x2"))
    gens = [x1 * x2]
    assert fixes_ideal(k, gens)
    assert fixes_ideal(h, gens) == fixes_ideal(mat_mul(k, h), gens) == fixes_ideal(mat_mul(h, k), gens)


def _torus():
    return GroupElement.torus([[LamEntry(1, 1), LamEntry(0)], [LamEntry(0), LamEntry(1, -1)]])


def test_fixes_ideal_with_torus_and_layout():
    X = matrix_vars(2)
    X11, X12, X21, X22 = MPoly.gens(X)
    layout = InvariantLayout(("X41", "W"), {"X41": (X11 * X12) ** 2, "W": X11 * X22 - X21 * X12})
    sym = MPoly.gens(("X41", "W"))
    assert fixes_ideal(_torus(), [sym[0]], layout)
    assert fixes_ideal([[0, 1], [-1, 0]], [sym[0]], layout)
    assert not fixes_ideal([[1, 1], [0, 1]], [sym[0]], layout)
    det = InvariantLayout(("W",), {"W": X11 * X22 - X21 * X12})
    assert fixes_ideal([[1, 1], [0, 1]], [MPoly.var(("W",), "W") + 2], det)
    assert not fixes_ideal([[1, 0], [0, 2]], [MPoly.var(("W",), "W") + 2], det)


def test_torus_acts_identically_in_lambda():
    x1, x2 = MPoly.gens(("x1", "x2"))
    img = act(_torus(), x1 * x2)
    assert set(img.vars) >= {"x1", "x2"}
    assert len(img.terms) == 1 and list(img.terms.values())[0] == 1
