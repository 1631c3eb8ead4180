import pytest
from gmpy2 import mpq
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from revode.diffop import DiffOp
from revode.funcfield import Poly, RatFunc
from revode.scalars import zeta

settings.register_profile(
    "revode",
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large, HealthCheck.filter_too_much],
)
settings.load_profile("revode")


def examples(n):
    return settings(max_examples=n)


rationals = st.builds(lambda p, q: mpq(p, q), st.integers(-12, 12), st.integers(1, 7))
nonzero_rationals = rationals.filter(bool)


@st.composite
def cyclotomics(draw, max_terms=3):
    """Sparse elements of Q(zeta_120)."""
    ks = draw(st.lists(st.integers(0, 119), min_size=0, max_size=max_terms, unique=True))
    acc = draw(rationals)
    for k in ks:
        acc = acc + draw(rationals) * zeta(120, k)
    return acc


@st.composite
def polys(draw, max_deg=3, coeffs=rationals):
    cs = draw(st.lists(coeffs, min_size=1, max_size=max_deg + 1))
    return Poly(cs)


@st.composite
def ratfuncs(draw, max_deg=2, coeffs=rationals):
    num = draw(polys(max_deg, coeffs))
    den = draw(polys(max_deg, coeffs).filter(bool))
    return RatFunc(num, den)


@st.composite
def operators(draw, max_order=3, max_deg=2):
    n = draw(st.integers(1, max_order))
    cs = [draw(ratfuncs(max_deg)) for _ in range(n)]
    return DiffOp(cs + [RatFunc(1)])


@st.composite
def nonconstant_maps(draw, max_deg=3):
    f = draw(ratfuncs(max_deg))
    if f.is_constant():
        f = f + RatFunc.x()
    return f


@pytest.fixture(scope="session")
def z():
    return RatFunc.x()
