import pytest
from gmpy2 import mpq
from hypothesis import assume, given
from hypothesis import strategies as st

from conftest import examples, nonzero_rationals, polys, rationals, ratfuncs
from revode.funcfield import (
    DegenerateTriple,
    MoebiusMap,
    Poly,
    QuadExt,
    RatFunc,
    RationalMap,
    moebius_from_triples,
    oo,
    quadext_derivation,
)

z = RatFunc.x()


@examples(500)
@given(ratfuncs(), ratfuncs())
def test_leibniz(f, g):
    assert (f * g).derivative() == f.derivative() * g + f * g.derivative()
    assert (f + g).derivative() == f.derivative() + g.derivative()


@st.composite
def moebius_maps(draw):
    a, b, c, d = (draw(rationals) for _ in range(4))
    assume(a * d - b * c != 0)
    return MoebiusMap(a, b, c, d)


points = st.one_of(rationals, st.just(oo))


@examples(100)
@given(st.lists(points, min_size=3, max_size=3, unique=True), st.lists(points, min_size=3, max_size=3, unique=True))
def test_triples_are_sent_to_triples(src, dst):
    m = moebius_from_triples(src, dst)
    assert [m.apply_to(p) for p in src] == dst


@examples(100)
@given(moebius_maps())
def test_compose_with_inverse_is_identity(m):
    assert m.compose(m.invert()).is_identity()
    assert m.invert().compose(m).is_identity()


@examples(100)
@given(moebius_maps(), moebius_maps(), rationals)
def test_compose_matches_ratfunc_composition(m, n, p):
    assert (m @ n).as_ratfunc() == m.as_ratfunc().compose(n.as_ratfunc())
    assert (m @ n).apply_to(p) == m.apply_to(n.apply_to(p))


@examples(100)
@given(polys(3).filter(lambda p: p.deg >= 1), ratfuncs(), ratfuncs())
def test_quadext_derivative_of_square(p, a, b):
    w = QuadExt.w(p)
    assert (w * w).derivative() == QuadExt(RatFunc(p).derivative(), 0, p)
    q = QuadExt(a, b, p)
    assert (q * q).derivative() == 2 * q * q.derivative()


def test_ratfunc_examples():
    assert (z**2 - 1) / (z - 1) == z + 1
    assert (z**4 - 1).derivative() == 4 * z**3
    assert (1 / z).compose(z**2) == 1 / z**2
    assert (1 / z).compose(1 / z) == z
    assert ((z + 1) / (z - 1)).eval(oo) == 1
    assert (1 / z).eval(0) == oo


def test_moebius_from_triples_examples():
    assert moebius_from_triples([0, 1, oo], [oo, 1, 0]).as_ratfunc() == 1 / z
    assert moebius_from_triples([0, 1, oo], [1, 0, oo]).as_ratfunc() == 1 - z
    with pytest.raises(DegenerateTriple):
        moebius_from_triples([0, 0, 1], [0, 1, oo])


def test_moebius_is_scale_canonical():
    assert MoebiusMap(2, 0, 0, 2) == MoebiusMap.identity()
    assert MoebiusMap(0, 3, 3, 0) == MoebiusMap(0, 1, 1, 0)
    with pytest.raises(ValueError):
        MoebiusMap(1, 1, 1, 1)


def test_rational_map_rejects_constants():
    with pytest.raises(ValueError):
        RationalMap(RatFunc(3))
    assert RationalMap(z**2).compose(RationalMap(z + 1)).value == (z + 1) ** 2


def test_quadratic_derivation_examples():
    p = Poly([0, -1, 0, 1])
    w = QuadExt.w(p)
    v = 2 * w
    assert quadext_derivation(w, v) == QuadExt(3 * z**2 - 1, 0, p)
    assert quadext_derivation(QuadExt(z, 0, p), v) == v
    assert w * w == QuadExt(RatFunc(p), 0, p)
    assert (w.inverse() * w) == QuadExt(1, 0, p)


@examples(200)
@given(ratfuncs(), nonzero_rationals)
def test_taylor_shift(f, a):
    assert f.taylor_shift(a) == f.compose(z + a)


def test_order_at():
    f = (z - 1) ** 2 / z**3
    assert f.order_at(1) == 2
    assert f.order_at(0) == -3
    assert f.order_at(oo) == 1
    assert f.order_at(mpq(5)) == 0
