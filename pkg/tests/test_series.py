import pytest
from gmpy2 import mpq
from hypothesis import given
from hypothesis import strategies as st

from conftest import examples, polys
from revode.diffop import DiffOp, companion
from revode.funcfield import RatFunc
from revode.parser import parse_expression
from revode.polys import MPoly, matrix_vars
from revode.series import (
    ClosedForm,
    InsufficientOrder,
    PuiseuxSeries,
    SolutionMatrix,
    check_relation,
    closed_form_series,
    dual_first_integral,
    eval_invariant,
    frobenius,
    invert_matrix_series,
    is_identity_matrix,
    matrix_series,
    ordinary_basis,
    rational_reconstruct,
    ratfunc_series,
    relation_space,
    residual,
    series_matmul,
)

z = RatFunc.x()
X = matrix_vars(2)
X11, X12, X21, X22 = MPoly.gens(X)
QUARTIC = "y'' - (z^4 - 3*z^2 - 1)/(z^4 - 1)^2 * y"


def quartic_basis(branch=0, K=40):
    q = z**4 - 1
    y1 = ClosedForm([(q, mpq(1, 4))], [(RatFunc(1), [(q, mpq(-1, 2))])])
    y2 = ClosedForm([(q, mpq(1, 4))], [(RatFunc(-1), [(q, mpq(-1, 2))])])
    return SolutionMatrix.from_solutions([closed_form_series(r, 0, K, branch) for r in (y1, y2)])


def t_series(coeffs, prec=None):
    return PuiseuxSeries(0, 0, 1, coeffs, prec)


def test_ordinary_basis_of_second_derivative():
    S = ordinary_basis(DiffOp([0, 0, 1]), 0, 5)
    y1, y2 = S.solutions()
    assert (y1 - 1).is_zero()
    assert (y2 - PuiseuxSeries.t(0)).is_zero()
    w = S.entries[0][0] * S.entries[1][1] - S.entries[0][1] * S.entries[1][0]
    assert (w - 1).is_zero()


def test_ordinary_basis_residual():
    L = parse_expression(QUARTIC, "operator")
    for y in ordinary_basis(L, 0, 40).solutions():
        r = residual(L, y)
        assert r.is_zero() and r.prec is not None


@pytest.mark.parametrize("text,e", [("z*y''", 0), ("z^2*y'' - 2*y", 2), ("z^2*y'' - 2*y", -1)])
def test_frobenius_simple(text, e):
    L = parse_expression(text, "operator")
    y = frobenius(L, 0, e, 5)
    assert y.lc == 1 and y.e == e
    assert residual(L, y).is_zero()


def test_frobenius_constant_solution():
    y = frobenius(DiffOp([0, 0, z]), 0, 0, 5)
    assert (y - 1).is_zero() and y.prec == 5


def test_frobenius_fractional_exponents_from_scenarios():
    from revode.scenario import load_scenario

    for name, e in (("7.3", mpq(-1, 6)), ("7.1", mpq(3, 2))):
        data = load_scenario(name)
        texts = [v if isinstance(v, str) else v["text"] for v in data["operators"].values()]
        for text in texts:
            try:
                L = parse_expression(text, "operator", var=data.get("var", "z"))
            except Exception:
                continue
            from revode.diffop import exponents_at

            if e in exponents_at(L, 0):
                y = frobenius(L, 0, e, 30)
                assert y.lc == 1 and y.e == e
                assert residual(L, y).is_zero()
                break
        else:
            pytest.fail(f"no operator with exponent {e} at 0 in scenario {name}")


def test_series_arithmetic():
    one_plus = t_series([1, 1])
    one_minus = t_series([1, -1])
    assert (one_plus * one_minus - t_series([1, 0, -1])).is_zero()
    s = ratfunc_series(1 - z**4, 0, 12).with_precision(12).pow_rational(mpq(1, 2))
    assert s.coeff_at(0) == 1 and s.coeff_at(4) == mpq(-1, 2) and s.coeff_at(8) == mpq(-1, 8)
    t32 = PuiseuxSeries(0, mpq(3, 2), 1, [1], None)
    d = t32.d_dz()
    assert d.e == mpq(1, 2) and d.lc == mpq(3, 2)


def test_closed_form_examples():
    s = closed_form_series(ClosedForm([(1 - z, mpq(1, 2))]), 0, 10)
    assert s.coeff_at(1) == mpq(-1, 2) and s.coeff_at(2) == mpq(-1, 8)
    e = closed_form_series(ClosedForm([], [(RatFunc(1), [])]), 0, 10)
    f = 1
    for k in range(10):
        assert e.coeff_at(k) == mpq(1, f)
        f *= k + 1


@pytest.mark.parametrize("branch", [0, 1])
def test_closed_forms_solve_the_quartic_operator(branch):
    L = parse_expression(QUARTIC, "operator")
    for y in quartic_basis(branch).solutions():
        assert residual(L, y).is_zero()


@pytest.mark.parametrize("branch", [0, 1])
def test_wronskian_is_minus_two_on_both_branches(branch):
    S = quartic_basis(branch)
    w = eval_invariant(X11 * X22 - X21 * X12, S)
    assert (w + 2).is_zero() and w.prec is not None


def test_quartic_invariant_values():
    S = quartic_basis(0, 60)
    p = X11 * X12
    assert rational_reconstruct(eval_invariant(p * p, S)) == z**4 - 1
    assert rational_reconstruct(eval_invariant(p * (X11 * X22 + X21 * X12), S)) == 2 * z**3
    d = dual_first_integral(-(X11 * X22 - X21 * X12) * mpq(1, 2), S)
    assert d.value == 1 and d.degree == 2
    d = dual_first_integral((X21 * X22) ** 2, S)
    assert d.value == (z**6 - z**4 + 1) ** 2 / (z**4 - 1) ** 3


@examples(200)
@given(polys(3), polys(3).filter(lambda q: q.coeff(0) != 0))
def test_rational_reconstruction_is_sound(p, q):
    f = RatFunc(p, q)
    s = ratfunc_series(f, 0, 30)
    g = rational_reconstruct(s)
    assert g is not None
    assert (ratfunc_series(g, 0, 30) - s).is_zero()
    assert g == f


def test_reconstruction_examples():
    s = t_series([1] * 30, 30)
    assert rational_reconstruct(s) == 1 / (1 - z)
    e = closed_form_series(ClosedForm([], [(RatFunc(1), [])]), 0, 40)
    assert rational_reconstruct(e) is None


def test_invert_matrix_round_trip():
    S = quartic_basis(0, 30)
    inv = invert_matrix_series(S)
    assert is_identity_matrix(series_matmul(S.entries, inv))
    L = parse_expression(QUARTIC, "operator")
    A = matrix_series(companion(L).A, 0, 34)
    dinv = [[s.d_dz() for s in row] for row in inv]
    prod = series_matmul(inv, A)
    for i in range(2):
        for j in range(2):
            assert (dinv[i][j] + prod[i][j]).is_zero()


def test_inverse_of_unipotent_series():
    t = PuiseuxSeries(0, 1, 1, [1], None).truncate(10)
    one = PuiseuxSeries.const(0, 1, 10)
    zero = PuiseuxSeries.zero(0, 10)
    inv = invert_matrix_series([[one, t], [zero, one]])
    assert (inv[0][1] + t).is_zero()
    assert (inv[0][0] - 1).is_zero() and (inv[1][1] - 1).is_zero()


def test_relation_space_examples():
    S = ordinary_basis(DiffOp([0, 0, 1]), 0, 30)
    assert relation_space(S.solutions(), 1) == []
    sols = quartic_basis(0, 60).solutions()
    rs = relation_space(sols, 2, info=True)
    assert rs.dimension == 0 and rs.surplus >= 10
    with pytest.raises(InsufficientOrder):
        relation_space([s.truncate(s.e + 5) for s in sols], 4)


@examples(30)
@given(st.lists(st.integers(-3, 3), min_size=2, max_size=2).filter(any))
def test_relation_space_outputs_vanish(cs):
    S = ordinary_basis(DiffOp([0, 0, 1]), 0, 40)
    y1, y2 = S.solutions()
    y3 = y1 * cs[0] + y2 * cs[1]
    basis = relation_space([y1, y2, y3], 2)
    assert basis
    for P in basis:
        s = eval_invariant(P, SolutionMatrix.from_solutions([y1, y2, y3], labels=list(P.vars), rows=1))
        assert s.is_zero()


def test_check_relation_on_diagonal_system():
    e = closed_form_series(ClosedForm([], [(2 * z, [])]), 0, 40)
    ze = closed_form_series(ClosedForm([(z, 1)], [(2 * z, [])]), 0, 40)
    zero = PuiseuxSeries.zero(0, e.prec)
    S = SolutionMatrix([[e, zero], [zero, ze]], e.point)
    zc = MPoly.const(X, z)
    assert check_relation(zc * X11 - X22, S)
    assert check_relation(X21, S)
    assert check_relation(X12, S)
    assert not check_relation(X11, S)
