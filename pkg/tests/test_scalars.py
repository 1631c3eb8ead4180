import pytest
from gmpy2 import mpq
from hypothesis import given
from hypothesis import strategies as st

from conftest import cyclotomics, examples, nonzero_rationals
from revode.scalars import (
    ConductorMismatch,
    DivisionByZero,
    OrderNotSupported,
    conductor,
    cyclotomic_polynomial,
    format_scalar,
    inv,
    nth_root,
    parse_constant,
    root_of_unity,
    zeta,
)


@examples(1000)
@given(cyclotomics(), cyclotomics(), cyclotomics())
def test_field_axioms(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert (a + b) + c == a + (b + c)
    assert a * (b + c) == a * b + a * c


@examples(200)
@given(cyclotomics().filter(bool))
def test_inverse(a):
    assert a * inv(a) == 1


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6, 8, 10, 12, 15, 20, 24, 30, 40, 60, 120])
def test_root_of_unity_is_root_of_cyclotomic_polynomial(n):
    w = root_of_unity(n)
    acc = 0
    for k, c in enumerate(cyclotomic_polynomial(n)):
        acc = acc + c * w**k
    assert acc == 0
    assert w**n == 1
    assert all(w**k != 1 for k in range(1, n))


def test_small_identities():
    i = zeta(4)
    assert i**2 == -1
    assert 1 + zeta(3) + zeta(3) ** 2 == 0
    assert inv(1 + i) == (1 - i) / 2
    assert root_of_unity(1) == 1
    assert root_of_unity(2) == -1
    assert root_of_unity(8) ** 4 == -1


def test_division_by_zero():
    with pytest.raises(DivisionByZero):
        inv(zeta(4) - zeta(4))
    with pytest.raises(DivisionByZero):
        inv(mpq(0))


def test_unsupported_order():
    with pytest.raises(OrderNotSupported):
        root_of_unity(7)


def test_mixing_conductors_is_rejected():
    with conductor(12):
        a = zeta(12)
    with conductor(120):
        b = zeta(120)
        with pytest.raises(ConductorMismatch):
            a + b


def test_nth_root():
    assert nth_root(mpq(4, 9), 2) == mpq(2, 3)
    r = nth_root(-1, 2)
    assert r**2 == -1
    r = nth_root(zeta(3), 2)
    assert r**2 == zeta(3)


@examples(200)
@given(cyclotomics())
def test_format_parse_round_trip(a):
    assert parse_constant(format_scalar(a)) == a


@examples(200)
@given(nonzero_rationals, st.integers(-5, 5))
def test_integer_powers(a, k):
    assert a**k * a**-k == 1
