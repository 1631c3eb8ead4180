import pytest
from gmpy2 import mpq
from hypothesis import given
from hypothesis import strategies as st

from conftest import examples, nonconstant_maps, operators, polys, rationals, ratfuncs
from revode.diffop import (
    ConstantMap,
    DiffOp,
    adjoint,
    apply,
    companion,
    compose,
    exponents_at,
    gauge,
    pullback,
    proportional,
    quadext_rewrite,
    singular_points,
)
from revode.funcfield import Poly, QuadExt, RatFunc, oo
from revode.parser import parse_expression
from revode.scalars import root_of_unity

z = RatFunc.x()
D = DiffOp.D()
D2 = DiffOp([0, 0, 1])
D3 = DiffOp([0, 0, 0, 1])


def small_maps():
    return st.one_of(polys(3).filter(lambda p: p.deg >= 1).map(RatFunc), nonconstant_maps(1))


@examples(50)
@given(operators(max_order=3, max_deg=1), small_maps(), small_maps())
def test_pullback_is_functorial(L, r, s):
    lhs = pullback(L, r.compose(s))
    rhs = pullback(pullback(L, r), s)
    assert lhs.same_as(rhs)


@examples(50)
@given(operators(max_order=3, max_deg=1), ratfuncs(1), ratfuncs(1))
def test_gauge_composes(L, g, h):
    assert gauge(gauge(L, g), h) == gauge(L, g + h)
    assert gauge(gauge(L, g), -g) == L


@examples(100)
@given(operators(max_order=2, max_deg=1), operators(max_order=2, max_deg=1), ratfuncs(2))
def test_apply_respects_composition(L1, L2, f):
    assert apply(compose(L1, L2), f) == apply(L1, apply(L2, f))


@examples(50)
@given(nonconstant_maps(2))
def test_pullback_preserves_polynomial_solutions(r):
    L = D3
    M = pullback(L, r)
    for sol in (RatFunc(1), r, r * r):
        assert apply(M, sol) == 0


@examples(50)
@given(st.lists(polys(2), min_size=1, max_size=3), rationals)
def test_ordinary_point_exponents(cs, p):
    L = DiffOp([RatFunc(c) for c in cs] + [RatFunc(1)])
    assert exponents_at(L, p) == list(range(L.order))


@examples(100)
@given(operators(max_order=2, max_deg=1), ratfuncs(1).filter(bool))
def test_proportional_is_reflexive_and_symmetric(L, f):
    assert proportional(L, L) == 1
    M = L.left_mul(f)
    assert proportional(M, L) == f
    assert proportional(L, M) == 1 / f


def test_apply_and_compose_examples():
    assert apply(D2, z**3) == 6 * z
    assert apply(DiffOp([-1, z]), z) == 0
    assert compose(D, DiffOp([z])) == DiffOp([1, z])
    M = DiffOp([-1 / z, 1])
    assert M * M == DiffOp([2 / z**2, -2 / z, 1])


def test_pullback_example():
    M = pullback(D2, z**2)
    assert M.same_as(DiffOp([0, -1, z]))
    with pytest.raises(ConstantMap):
        pullback(D2, RatFunc(2))


def test_proportional_examples():
    assert proportional(DiffOp([0, 0, z]), D2) == z
    assert proportional(DiffOp([z, 0, 1]), DiffOp([z**2, 0, 1])) is None


def test_singular_points_examples():
    L = parse_expression("y'' - (z^4 - 3*z^2 - 1)/(1 + z^4) * y", "operator")
    sps = singular_points(L)
    locs = [sp.location for sp in sps]
    assert oo in locs
    finite = [sp for sp in sps if sp.location is not oo]
    roots = set()
    for sp in finite:
        if sp.block:
            assert sp.location == Poly([1, 0, 0, 0, 1])
            roots.update(range(4))
        else:
            assert sp.location**4 == -1
            roots.add(sp.location)
    assert len(roots) == 4
    assert [sp.location for sp in singular_points(D2)] == [oo]


def test_singular_points_at_eighth_roots_are_regular():
    L = parse_expression("y'' - (z^4 - 3*z^2 - 1)/(1 + z^4) * y", "operator")
    e = root_of_unity(8)
    assert exponents_at(L, e) == [0, 1]


def test_companion_and_adjoint():
    S = companion(D2)
    assert S.A == [[RatFunc(0), RatFunc(1)], [RatFunc(0), RatFunc(0)]]
    assert adjoint(adjoint(S)) == S
    assert adjoint(S).convention == "integral"


def test_quadratic_rewrite():
    p = Poly([0, -1, 0, 1])
    w = QuadExt.w(p)
    v = 2 * w
    M, factor = quadext_rewrite(DiffOp([0, 1], direction=v))
    assert M == DiffOp([0, 2]) and factor == w
    M, factor = quadext_rewrite(DiffOp([0, 0, 1], direction=v))
    assert M == DiffOp([0, 2 * (3 * z**2 - 1), 4 * (z**3 - z)])
    assert factor == QuadExt(1, 0, p)


def test_exponents_at_regular_singular_point():
    L = DiffOp([mpq(-2), 0, z**2])
    assert sorted(exponents_at(L, 0)) == [-1, 2]
