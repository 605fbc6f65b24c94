from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from kahlerval.exactnum import (
    INF, InputError, OneForm, ParamScalar, TPoly, XYPoly, form_scale, parse_form, parse_poly,
    rat, rat_str, tpoly_order, value_json,
)

fractions = st.builds(Fraction, st.integers(-99, 99), st.integers(1, 12))
nonzero = st.builds(Fraction, st.integers(1, 99) | st.integers(-99, -1), st.integers(1, 12))


def small_tpoly():
    return st.dictionaries(st.integers(0, 12), nonzero, max_size=5).map(
        lambda d: TPoly({e: rat(c) for e, c in d.items()}))


def small_xy():
    return st.dictionaries(st.tuples(st.integers(0, 3), st.integers(0, 3)),
                           st.integers(1, 5) | st.integers(-5, -1), max_size=4).map(
        lambda d: XYPoly({k: rat(v) for k, v in d.items()}))


@given(fractions)
def test_rat_roundtrip_through_string(q):
    r = rat(q)
    assert rat(rat_str(r)) == r
    assert r.denominator > 0 and Fraction(int(r.numerator), int(r.denominator)) == q


def test_rat_rejects_garbage():
    for bad in ["1/0", "x", "1.5", True, None]:
        with pytest.raises(InputError):
            rat(bad)


def test_rat_str_drops_unit_denominator():
    assert rat_str(rat("6/3")) == "2"
    assert rat_str(rat("-4/6")) == "-2/3"


def test_infinity_sits_above_integers():
    assert INF > 10 ** 9 and not INF < 3 and INF >= INF
    assert sorted([5, INF, 2], key=lambda v: (v is INF, v if v is not INF else 0))[-1] is INF
    assert value_json(INF) == "infinity" and value_json(7) == 7


@pytest.mark.parametrize("p, want", [
    (TPoly({96: rat(5), 97: rat(5)}), 96),
    (TPoly({}), INF),
    (TPoly({39: rat(30), 40: rat(35)}), 39),
])
def test_tpoly_order_examples(p, want):
    assert tpoly_order(p) == want


@given(small_tpoly(), small_tpoly())
def test_order_is_additive(p, q):
    if p.is_zero() or q.is_zero():
        assert tpoly_order(p * q) is INF
    else:
        assert tpoly_order(p * q) == tpoly_order(p) + tpoly_order(q)


@given(small_tpoly(), small_tpoly(), small_tpoly())
def test_tpoly_ring_axioms(p, q, r):
    assert p * (q + r) == p * q + p * r
    assert (p * q) * r == p * (q * r)
    assert p + q == q + p


@given(st.lists(fractions, max_size=4), st.lists(fractions, max_size=4), fractions)
def test_param_scalar_evaluation_is_a_homomorphism(c1, c2, a):
    p, q = ParamScalar(c1), ParamScalar(c2)
    a = rat(a)
    assert (p * q).evaluate(a) == p.evaluate(a) * q.evaluate(a)
    assert (p + q).evaluate(a) == p.evaluate(a) + q.evaluate(a)


def test_param_scalar_linear_root():
    lead = ParamScalar([rat(3), rat(-6)])
    assert lead.degree == 1
    assert lead.root_if_linear() == rat("1/2")
    assert ParamScalar([rat(2)]).root_if_linear() is None


@given(small_xy(), small_xy(), small_xy())
def test_xypoly_distributes(p, q, r):
    assert p * (q + r) == p * q + p * r


def test_form_scale_examples():
    assert form_scale(OneForm.dy(), rat("2/3"), 1) == parse_form("2/3 x dy")
    w = parse_form("y dx - 2/3 x dy")
    assert form_scale(w, 1, 0) == w
    assert form_scale(parse_form("y dx"), rat("-3/2"), 2) == parse_form("-3/2 x^2 y dx")


@given(small_xy(), small_xy())
def test_form_string_roundtrip(a, b):
    w = OneForm(a, b)
    if w.is_zero():
        return
    assert parse_form(str(w)) == w


def test_parser_accepts_star_syntax():
    assert parse_form("5*x*dy - 6*y*dx") == parse_form("5 x dy - 6 y dx")
    assert parse_poly("y**5 - x^6") == parse_poly("y^5 - x^6")


@pytest.mark.parametrize("text", ["", "x", "dx dy", "y dx +", "(x dx"])
def test_parser_errors(text):
    with pytest.raises(InputError):
        parse_form(text)


def test_exterior_derivative():
    assert OneForm.d(parse_poly("y^2 - x^3")) == parse_form("2 y dy - 3 x^2 dx")
