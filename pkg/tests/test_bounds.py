from fractions import Fraction
from itertools import product

import pytest

from noethkit import BoundExpr, bound_cmp
from noethkit.bounds import (BoundParams, compare_exact_to_rough, deg_after_mo, gk_mult_bound,
                             il_degree, il_degree_is_integral, induction_degree, induction_ladder,
                             loja_exponent_bound, main_bound, mult0_bound, q_constant, rough_mult0,
                             verify_main_proof_chain)

GRID = [BoundParams(m, n, delta, d) for m, n, delta, d in product((1, 2), (1, 2), (1, 2, 3), (1, 2, 3))]


def test_deg_after_mo():
    assert deg_after_mo(1, 2, 3, 2) == 19
    assert deg_after_mo(2, 1, 2, 1) == 8
    for n, delta, d in product(range(1, 4), range(1, 4), range(5)):
        assert deg_after_mo(n, delta, d, 0) == d


def test_il_degree():
    assert il_degree(1, 1, 2) == 20741
    for m, n in product((1, 2, 3), repeat=2):
        assert il_degree(m, n, 1) == n + 1
    # the bracket exponent is 2m+2, which is 2 at m = 0
    assert il_degree(0, 1, 2) == 55
    assert il_degree_is_integral(1, 1, 2)


def test_rough_and_exact_isolated_bound():
    assert rough_mult0((1, 1, 2, 2)) == BoundExpr(1, [(2, 128)])
    assert rough_mult0((0, 1, 1, 1)).to_int() == 256
    gk = gk_mult_bound((1, 1, 2, 2))
    assert gk.exact and gk.q == 2
    assert gk.value == BoundExpr(1, [(41482, 4)])
    assert mult0_bound((1, 1, 2, 2), "exact").to_int() == 41482 ** 4


def test_exact_value_by_hand():
    # Q/2 * (2*12^4 + 10)^4 with Q = 2; the second candidate is smaller
    first = Fraction(2, 2) * (2 * 12**4 + 10) ** 4
    second = Fraction(2, 2) * (2 * (2 + 1) * (2 + 2 * 1)) ** 4
    assert max(first, second) == 41482 ** 4


@pytest.mark.parametrize("m", range(0, 5))
def test_q_collapses_for_one_axis(m):
    assert q_constant(1, m) == Fraction(m + 1)


def test_q_enclosure_for_two_axes():
    from mpmath import exp, log, mp
    lo, hi = q_constant(2, 1)
    with mp.workdps(40):
        ln2 = log(2)
        ln_q = 1 + ln2 + (ln2 + 1) * (1 + log(3) - ln2 / 2) + 2 * (ln2 - 2)
        assert lo <= exp(ln_q) <= hi
    assert hi - lo < 1e-20
    gk = gk_mult_bound((1, 2, 2, 2))
    assert not gk.exact and bound_cmp(gk.lower, gk.value) in ("less", "equal")


def test_exact_below_rough():
    assert compare_exact_to_rough((1, 1, 2, 2)) == "less"


def test_main_bound():
    assert main_bound((1, 1, 2, 2)) == BoundExpr(1, [(2, 268435456)])
    assert main_bound((1, 1, 1, 1)) == BoundExpr(1, [(2, 134217728)])
    lo, hi = main_bound((1, 1, 2, 2)).log10()
    assert 8.08e7 < lo < hi < 8.081e7


def test_loja():
    assert loja_exponent_bound((1, 1, 2, 2)) == BoundExpr(1, [(12, 134217728)])
    assert loja_exponent_bound((1, 1, 1, 1)) == BoundExpr(1, [(4, 134217728)])
    assert loja_exponent_bound((0, 1, 1, 1)).to_int() == 65536


def test_induction_degree_values():
    rep = induction_degree((1, 1, 2, 2))
    k = 2 ** 128
    assert rep.k == k and rep.B == k
    assert rep.d_M_k == 2 * k * k + 3 * k + 2
    assert rep.d_NI == 2 * k * k + 3 * k + 2
    assert rep.A == rep.d_NI ** 2
    assert rep.d_H == (k + 1) * rep.d_M_k
    assert rep.d_E == rep.d_NI ** 4 + rep.d_H
    assert rep.d_prime == (rep.A * rep.d_E + k) * (k + 1) + 2
    small = induction_degree((0, 1, 1, 1))
    assert small.k == 256 and small.d_M_k == 65793


@pytest.mark.parametrize("p", GRID, ids=str)
def test_proof_chain(p):
    verdicts = verify_main_proof_chain(p)
    assert len(verdicts) == 10
    assert all(ok for _, ok in verdicts), [name for name, ok in verdicts if not ok]
    assert verdicts[-1][0].startswith("d' <= max{d,delta}")


def test_rough_k_reading_is_reported_not_hidden():
    failing = {name for name, ok in verify_main_proof_chain((1, 1, 2, 2), k_choice="rough") if not ok}
    assert "k+1 <= C" in failing


@pytest.mark.parametrize("p", GRID, ids=str)
def test_ladder(p):
    res = induction_ladder(p, p.n)
    assert res.final_le_main and res.degree_le_target
    assert len(res.degrees) == p.n + 1


def test_ladder_base_case():
    res = induction_ladder((1, 1, 2, 2), 0)
    assert res.final == rough_mult0((1, 1, 2, 2))


def _nondecreasing(fn, args):
    """``fn`` does not decrease when any one argument is increased by one."""
    for a in args:
        base = fn(*a)
        for i in range(len(a)):
            b = list(a)
            b[i] += 1
            if bound_cmp(BoundExpr.coerce(fn(*b)), BoundExpr.coerce(base)) == "less":
                return False
    return True


def test_monotonicity():
    grid = list(product(range(1, 4), range(1, 4), range(1, 5), range(1, 5)))
    assert _nondecreasing(lambda n, delta, d, k: deg_after_mo(n, delta, d, k), grid)
    assert _nondecreasing(lambda m, n, delta: il_degree(m, n, delta),
                          product(range(1, 4), range(1, 4), range(1, 5)))
    assert _nondecreasing(lambda m, n, delta, d: rough_mult0((m, n, delta, d)), grid)
    assert _nondecreasing(lambda m, n, delta, d: main_bound((m, n, delta, d)), grid)


def test_params_validation():
    with pytest.raises(ValueError):
        il_degree(1, 1, 0)
    with pytest.raises(ValueError):
        induction_ladder((1, 1, 1, 1), 2)
