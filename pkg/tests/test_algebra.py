from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from noethkit import Arena, BoundExpr, GaussianRational, Poly, bound_cmp, poly_arith, poly_eval, poly_parse, poly_print
from noethkit.algebra import DigitCapExceeded, bmax, coprime_base
from noethkit.errors import ArenaMismatchError, ParseError, UnknownVariableError

from strategies import polys

A = Arena.chain(2, 2)
A1 = Arena.chain(1, 1)


def P(text, arena=A):
    return poly_parse(text, arena)


class TestParse:
    def test_simple(self):
        p = P("x1^2 - 1")
        assert dict(p.items()) == {(2, 0, 0, 0): 1, (0, 0, 0, 0): -1}

    def test_mixed_degree(self):
        p = P("f1*f1 + 2*x1*f2")
        assert p.degree == 2
        assert p.coeff((1, 0, 0, 1)) == 2

    def test_binomial(self):
        assert P("(x1+1)^3") == P("x1^3 + 3*x1^2 + 3*x1 + 1")

    def test_rationals_and_whitespace(self):
        assert P(" 1/2 * x1 ^ 2 ") == Poly.monomial(A, (2, 0, 0, 0), Fraction(1, 2))

    def test_unary_minus(self):
        assert P("-(x1 - x2)") == P("x2 - x1")

    def test_error_position(self):
        with pytest.raises(ParseError) as err:
            P("x1 + * 2")
        assert err.value.position == 5

    def test_unknown_variable(self):
        with pytest.raises(UnknownVariableError):
            P("x3 + 1")

    @pytest.mark.parametrize("text", ["x1^", "(x1", "x1)", "2x1", "x1^-1", ""])
    def test_malformed(self, text):
        with pytest.raises(ParseError):
            P(text)

    @settings(max_examples=100, deadline=None)
    @given(polys(A))
    def test_round_trip(self, p):
        assert P(poly_print(p)) == p


class TestArithmetic:
    def test_examples(self):
        assert poly_arith(P("x1+1"), P("x1-1"), "mul") == P("x1^2-1")
        assert poly_arith(P("f1^2+f2^2"), P("f1^2+f2^2"), "sub").is_zero()
        assert poly_arith(P("x1+f1"), 2, "pow") == P("x1^2 + 2*x1*f1 + f1^2")
        assert poly_arith(P("x1"), P("x2"), "add") == P("x1+x2")

    def test_arena_mismatch(self):
        with pytest.raises(ArenaMismatchError):
            P("x1") + P("x1", A1)

    def test_degree_of_product(self):
        a, b = P("x1^2 + f1"), P("x2*f2^3 - 1")
        assert (a * b).degree == a.degree + b.degree

    def test_canonical_order(self):
        assert str(P("1 + x1 + x1^2*x2")) == "x1^2*x2 + x1 + 1"

    @settings(max_examples=200, deadline=None)
    @given(polys(A), polys(A), polys(A))
    def test_ring_axioms(self, a, b, c):
        assert (a + b) + c == a + (b + c)
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c
        assert a + b == b + a
        assert a * b == b * a
        assert a - a == Poly.zero(A)

    @settings(max_examples=50, deadline=None)
    @given(polys(A, max_deg=2), st.integers(0, 3))
    def test_power_matches_products(self, a, k):
        prod = Poly.constant(A, 1)
        for _ in range(k):
            prod = prod * a
        assert a ** k == prod


class TestEval:
    def test_examples(self):
        assert poly_eval(P("x1^2-1"), (2, 0, 0, 0)) == 3
        assert poly_eval(P("f1", A1), (0, 1)) == 1
        assert poly_eval(P("x1*f1+f1^2", A1), (1, 2)) == 6

    def test_gaussian(self):
        i = GaussianRational(0, 1)
        assert P("x1^2 + 1").eval((i, 0, 0, 0)) == 0

    @settings(max_examples=50, deadline=None)
    @given(polys(A), polys(A), st.lists(st.integers(-3, 3), min_size=4, max_size=4))
    def test_eval_is_homomorphism(self, a, b, pt):
        assert (a * b).eval(pt) == a.eval(pt) * b.eval(pt)
        assert (a + b).eval(pt) == a.eval(pt) + b.eval(pt)


class TestBoundExpr:
    def test_examples(self):
        assert bound_cmp(BoundExpr(1, [(2, 1792)]), BoundExpr(1, [(2, 1412)])) == "greater"
        assert bound_cmp(BoundExpr(1, [(4, 32), (2, 64)]), BoundExpr(1, [(2, 128)])) == "equal"
        assert bound_cmp(BoundExpr(1, [(3, 5)]), BoundExpr(1, [(2, 8)])) == "less"

    def test_equal_power_products(self):
        assert BoundExpr(1, [(4, 32), (2, 64)]) == BoundExpr(1, [(2, 128)])
        assert str(BoundExpr(1, [(8, 3)])) == "2^9"

    def test_close_call_needs_precision(self):
        # 3^(12*10^6) vs 2^(19019550*...) style near-ties: decided by interval widening
        a = BoundExpr(1, [(2, 10**8)])
        b = BoundExpr(1, [(3, 63092975)])
        c = BoundExpr(1, [(3, 63092976)])
        assert bound_cmp(b, a) == "less"
        assert bound_cmp(c, a) == "greater"

    def test_log10_enclosure(self):
        from mpmath import mp, mpf, log10
        lo, hi = BoundExpr(1, [(2, 268435456)]).log10()
        with mp.workdps(40):
            ref = 268435456 * log10(mpf(2))
            assert lo <= ref <= hi
        assert hi - lo < 1e-6

    def test_expand_cap(self):
        with pytest.raises(DigitCapExceeded):
            BoundExpr(1, [(2, 268435456)]).expand()
        assert BoundExpr(Fraction(1, 2), [(2, 10)]).expand() == 512

    def test_parse_round_trip(self):
        b = BoundExpr(3, [(2, 1792), (5, 7)])
        assert BoundExpr.parse(str(b)) == b

    def test_bmax(self):
        assert bmax(BoundExpr(1, [(3, 5)]), 256) == 256

    def test_coprime_base(self):
        base = coprime_base([12, 18, 35])
        from math import gcd
        assert all(gcd(a, b) == 1 for i, a in enumerate(base) for b in base[i + 1:])

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.tuples(st.integers(2, 40), st.integers(0, 60)), max_size=3),
           st.lists(st.tuples(st.integers(2, 40), st.integers(0, 60)), max_size=3),
           st.fractions(min_value=Fraction(1, 9), max_value=Fraction(10), max_denominator=9),
           st.fractions(min_value=Fraction(1, 9), max_value=Fraction(10), max_denominator=9))
    def test_cmp_agrees_with_expansion(self, fa, fb, ca, cb):
        a, b = BoundExpr(ca, fa), BoundExpr(cb, fb)
        va, vb = a.expand(), b.expand()
        expected = "less" if va < vb else "greater" if va > vb else "equal"
        assert bound_cmp(a, b) == expected

    @settings(max_examples=50, deadline=None)
    @given(st.integers(2, 30), st.integers(1, 50), st.integers(1, 4))
    def test_perfect_powers_cancel(self, base, e, k):
        assert BoundExpr(1, [(base ** k, e)]) == BoundExpr(1, [(base, e * k)])
