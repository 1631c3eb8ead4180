import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import cyclotomics, examples, operators, rationals, ratfuncs
from revode.diffop import DiffOp
from revode.funcfield import MoebiusMap, Poly, QuadExt, RatFunc, RationalMap
from revode.parser import ParseError, parse_expression, print_value
from revode.polys import MPoly, monomials

z = RatFunc.x()
VARS = ("X", "Y", "Z")


@st.composite
def mpolys(draw):
    acc = MPoly(VARS)
    for m in monomials(VARS, draw(st.integers(1, 3))):
        if draw(st.booleans()):
            acc = acc + m * draw(cyclotomics(2))
    return acc


@st.composite
def moebius(draw):
    a, b, c, d = (draw(rationals) for _ in range(4))
    if a * d - b * c == 0:
        a, d = a + 1, d + 2
        if a * d - b * c == 0:
            return MoebiusMap(1, 0, 0, 1)
    return MoebiusMap(a, b, c, d)


values = st.one_of(
    cyclotomics().map(lambda v: ("constant", v)),
    ratfuncs(3).map(lambda v: ("ratfunc", v)),
    ratfuncs(2, coeffs=cyclotomics(1)).map(lambda v: ("ratfunc", v)),
    operators(3, 2).map(lambda v: ("operator", v)),
    moebius().map(lambda v: ("map", v)),
    mpolys().map(lambda v: ("polynomial", v)),
)


@examples(500)
@given(values)
def test_round_trip(kv):
    kind, v = kv
    text = print_value(v)
    back = parse_expression(text, kind, variables=VARS if kind == "polynomial" else None)
    if kind == "map" and isinstance(back, RationalMap):
        back = MoebiusMap.from_ratfunc(back.value)
    assert back == v, text


def test_operator_notations():
    assert parse_expression("D", "operator") == DiffOp([0, 1])
    assert parse_expression("y'' - z*y = 0", "operator") == DiffOp([-z, 0, 1])
    assert parse_expression("y^(3) + y'", "operator") == DiffOp([0, 1, 0, 1])
    assert parse_expression("D^2 + x*D", "operator", var="x") == DiffOp([0, RatFunc.x(), 1], "x")


def test_maps():
    assert parse_expression("z -> -z", "map") == MoebiusMap(-1, 0, 0, 1)
    assert parse_expression("x -> 1 - x", "map") == MoebiusMap(-1, 1, 0, 1)
    r = parse_expression("z^2", "map")
    assert isinstance(r, RationalMap) and r.value == z**2


def test_quadratic_extension_values():
    p = Poly([0, -1, 0, 1])
    v = parse_expression("(3*z^2 - 1)/w + z*w", "ratfunc", modulus="z^3 - z")
    w = QuadExt.w(p)
    assert v == (3 * z**2 - 1) / w + z * w
    assert v.a == 0


@pytest.mark.parametrize("text", ["y'' + + y", "y'' + (", "z ^", "y'' = 1", "1/0", "", "q*y"])
def test_parse_errors(text):
    with pytest.raises(ParseError):
        parse_expression(text, "operator")


def test_parse_error_position():
    with pytest.raises(ParseError) as e:
        parse_expression("y'' + + y", "operator")
    assert e.value.pos == 6
