from fractions import Fraction as F

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from curvemagic import InsufficientPrecision, NotDistinguished, NotReduced, newton_puiseux
from curvemagic.bouquet import bouquet_from_char_exponents
from curvemagic.bouquet import CharExponents
from curvemagic.jsonio import ypoly_from_string
from curvemagic.puiseux import AtLeast, PuiseuxSeries, YPoly, product_of_linear
from curvemagic.scalars import canon, zeta

from oracles import product_matches

X32 = PuiseuxSeries({F(3, 2): 1})


def test_series_examples():
    assert X32 - (-X32) == PuiseuxSeries({F(3, 2): 2})
    assert PuiseuxSeries({1: 1, 2: 1}) * PuiseuxSeries({-1: 1}) == PuiseuxSeries({0: 1, 1: 1})
    assert X32.derivative() == PuiseuxSeries({F(1, 2): F(3, 2)})


def test_valuation_examples():
    assert PuiseuxSeries({F(3, 2): 1, 2: 1}).valuation() == F(3, 2)
    v = PuiseuxSeries.zero(5).valuation()
    assert isinstance(v, AtLeast) and v.bound == 5 and str(v) == ">= 5"
    assert (X32 - (-X32)).valuation() == F(3, 2)


def test_truncation_propagates():
    a = PuiseuxSeries({1: 1}, trunc=3)
    b = PuiseuxSeries({F(1, 2): 1})
    assert (a * b).trunc == F(7, 2)
    assert (a + b).trunc == 3
    with pytest.raises(InsufficientPrecision):
        a.coeff(3)
    inv = PuiseuxSeries({1: 1, 2: 1}).inverse(4)
    assert (inv * PuiseuxSeries({1: 1, 2: 1})).truncate(4) == PuiseuxSeries({0: 1}, 4)


series = st.dictionaries(st.fractions(min_value=0, max_value=4, max_denominator=3),
                         st.fractions(min_value=-5, max_value=5, max_denominator=4),
                         max_size=4).map(PuiseuxSeries)


@given(series, series, series)
@settings(max_examples=60, deadline=None)
def test_ring_axioms(a, b, c):
    assert (a + b) * c == a * c + b * c
    assert (a * b) * c == a * (b * c)
    assert a * b == b * a
    assert (a * b).derivative() == a.derivative() * b + a * b.derivative()


def test_newton_puiseux_cusp():
    f = ypoly_from_string("y^2 - x^3")
    roots = newton_puiseux(f, 4)
    assert sorted(roots, key=lambda s: s.sort_key()) == sorted(
        [X32, -X32], key=lambda s: s.sort_key())
    assert product_of_linear(roots) == f


def test_newton_puiseux_split():
    roots = newton_puiseux(ypoly_from_string("y*(y - x)"), 4)
    assert {str(r) for r in roots} == {str(PuiseuxSeries.zero()), str(PuiseuxSeries({1: 1}))}


def test_newton_puiseux_conjugate_branches():
    # f = prod_i (y - phi(zeta_6^i t)), phi(t) = t^8 + t^9, t = x^(1/6)
    expected = []
    for i in range(6):
        z = zeta(6, i)
        expected.append(PuiseuxSeries({F(8, 6): canon(z**8), F(9, 6): canon(z**9)}))
    f = product_of_linear(expected)
    assert f.is_exact()
    roots = newton_puiseux(f, 3)
    assert len(roots) == 6
    for e in expected:
        assert sum(1 for r in roots if (r - e).truncate(3).is_zero()) == 1


def test_errors():
    with pytest.raises(NotDistinguished):
        newton_puiseux(ypoly_from_string("y^2 - 1"), 2)
    with pytest.raises(NotReduced):
        newton_puiseux(ypoly_from_string("(y - x)^2"), 2)


@pytest.mark.parametrize("text", ["y^2 - x^3 - x^4", "y^3 - x^4 + x^5*y", "(y - x)*(y^2 - 2*x^3)"])
def test_truncation_soundness(text):
    f = ypoly_from_string(text)
    low = newton_puiseux(f, 3)
    high = newton_puiseux(f, 5)
    for a in low:
        assert any(b.truncate(a.trunc) == a for b in high)
    x, y = sympy.symbols("x y")
    assert product_matches(sympy.sympify(text.replace("^", "**")), high, 5)


def test_ramification_divides_factor_degrees():
    for beta, deg in (((2, 3), 2), ((4, 6, 7), 4), ((3, 5), 3)):
        b = bouquet_from_char_exponents(CharExponents(beta), 3)
        assert all(deg % a.d == 0 for a in b.branches)


def test_ypoly_divmod():
    f = ypoly_from_string("y^2 - x^3")
    g = ypoly_from_string("y^3 + x*y + 1")
    q, r = g.divmod(f)
    assert q * f + r == g and r.degree < 2
