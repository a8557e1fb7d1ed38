"""Acceptance criteria 1-10, each timed and reported on its own line."""

import random
import time
from contextlib import contextmanager
from fractions import Fraction
from itertools import product

from noethkit import BoundExpr, Chain, bound_cmp, mult_isolated, mult_univariate, poly_parse
from noethkit.algebra import Arena, Poly
from noethkit.bounds import (BoundParams, deg_after_mo, gk_mult_bound, il_degree, induction_ladder,
                             loja_exponent_bound, main_bound, rough_mult0, verify_main_proof_chain)
from noethkit.chain import mixed_jet_coefficients
from noethkit.deflicity import (DeflicityProblem, count_near, deflicity_family_symbolic,
                                deflicity_numeric, deflicity_numeric_set, deflicity_symbolic,
                                polynomialize)
from noethkit.ni_perturb import (NiSystem, build_E, build_Eprime, build_H, perturb, random_Q,
                                 sard_sample, verify_preservation)

from conftest import CORPUS

GRID = [BoundParams(m, n, delta, d) for m, n, delta, d in product((1, 2), (1, 2), (1, 2, 3), (1, 2, 3))]


@contextmanager
def criterion(number, limit, capsys):
    start = time.perf_counter()
    ok = False
    try:
        yield
        elapsed = time.perf_counter() - start
        assert elapsed < limit, f"took {elapsed:.2f}s (limit {limit}s)"
        ok = True
    finally:
        elapsed = time.perf_counter() - start
        with capsys.disabled():
            print(f"\ncriterion {number}: {'PASS' if ok else 'FAIL'} ({elapsed:.2f}s)")


def test_criterion_1_formula_values(capsys):
    with criterion(1, 1, capsys):
        assert deg_after_mo(1, 2, 3, 2) == 19
        assert il_degree(1, 1, 2) == 20741
        for m, n in product((1, 2, 3), repeat=2):
            assert il_degree(m, n, 1) == n + 1
        assert rough_mult0((1, 1, 2, 2)) == BoundExpr(1, [(2, 128)])
        gk = gk_mult_bound((1, 1, 2, 2))
        assert gk.exact and gk.q == 2
        assert gk.value.expand() == 41482 ** 4
        mb = main_bound((1, 1, 2, 2))
        assert mb == BoundExpr(1, [(2, 268435456)])
        assert str(mb) == "2^268435456"


def test_criterion_2_proof_chain(capsys):
    with criterion(2, 60, capsys):
        for p in GRID:
            verdicts = verify_main_proof_chain(p)
            assert all(ok for _, ok in verdicts), (p, [name for name, ok in verdicts if not ok])
            assert any(name.startswith("d' <= max{d,delta}") for name, _ in verdicts)


def test_criterion_3_induction_ladder(capsys):
    with criterion(3, 60, capsys):
        for p in GRID:
            res = induction_ladder(p, p.n)
            assert bound_cmp(res.final, main_bound(p)) in ("less", "equal"), p


def test_criterion_4_multiplicity(capsys):
    plane = Chain.trivial(2)
    exp_chain = Chain.from_strings(1, 1, [["f1"]])
    with criterion(4, 10, capsys):
        for a, b in product(range(1, 5), repeat=2):
            sys_ = [plane.parse(f"x1^{a}"), plane.parse(f"x2^{b}")]
            assert mult_isolated(plane, (0, 0), sys_).value == a * b
        assert mult_isolated(plane, (0, 0), [plane.parse("x1^2 - x2^3"), plane.parse("x2^2")]).value == 4
        psi = exp_chain.parse("f1 - 1 - x1 - 1/2*x1^2")
        assert mult_univariate(exp_chain, (0, 1), psi).value == 3


def _stable(res):
    """The two smallest eps samples agree at every radius."""
    eps_values = sorted({e for e, _ in res.counts})[:2]
    assert len(eps_values) == 2
    return {c for (e, _), c in res.counts.items() if e in eps_values} == {res.value}


def test_criterion_5_deflicity_suite(capsys):
    fam1, fam2 = Arena.chain(1, 0, eps=True), Arena.chain(2, 0, eps=True)
    families = [(["x1^2 - eps"], fam1, (0,), 2),
                (["x1^2 - eps", "x2^2 - eps"], fam2, (0, 0), 4),
                (["eps*x1", "x2"], fam2, (0, 0), 1)]
    plane = Chain.trivial(2)
    sets = [("x2*(x2 - x1^2)", "x1", 2), ("x2^2", "x2", 0)]
    with criterion(5, 30, capsys):
        for texts, arena, point, expected in families:
            family = [poly_parse(t, arena) for t in texts]
            assert deflicity_family_symbolic(family, point) == expected, texts
            res = count_near(family, point)
            assert res.value == deflicity_numeric(family, point) == expected, texts
            assert _stable(res)
        for P, R, expected in sets:
            prob = DeflicityProblem(plane, (0, 0), (plane.parse(P),), plane.parse(R))
            assert deflicity_symbolic(prob) == expected
            assert deflicity_numeric_set(prob) == expected
            family, point = polynomialize(prob, 0)
            assert _stable(count_near(family, point))


def test_criterion_6_conservation(capsys):
    arena = Arena.chain(2, 0, eps=True)
    plane = Chain.trivial(2)
    families = [("x1^2 - eps", "x2^2 - eps"), ("x1*x2 - eps", "x1 - x2"), ("x1^2 + x2^2 - eps", "x1 - x2^2"),
                ("x1^3 - eps", "x2 - x1"), ("x1^2 - eps", "x2^3 - eps*x1"), ("x1^2 - x2^3 + eps", "x2^2 - eps")]
    with criterion(6, 30, capsys):
        for texts in families:
            family = [poly_parse(t, arena) for t in texts]
            limit = [plane.parse(t.replace("eps", "0")) for t in texts]
            expected = mult_isolated(plane, (0, 0), limit).value
            assert expected is not None
            assert deflicity_numeric(family, (0, 0)) == expected, texts


def _random_poly(arena, rng, max_deg=3, max_terms=5):
    terms = {}
    for _ in range(rng.randint(1, max_terms)):
        total = rng.randint(0, max_deg)
        e = [0] * arena.size
        for _ in range(total):
            e[rng.randrange(arena.size)] += 1
        terms[tuple(e)] = Fraction(rng.randint(-9, 9), rng.randint(1, 5))
    return Poly(arena, terms)


def test_criterion_7_derivations(capsys):
    rng = random.Random(2024)
    with criterion(7, 10, capsys):
        for name, (chain, _) in sorted(CORPUS.items()):
            for _ in range(100):
                p, q = _random_poly(chain.arena, rng), _random_poly(chain.arena, rng)
                for i in range(1, chain.n + 1):
                    assert chain.derive(p * q, i) == chain.derive(p, i) * q + p * chain.derive(q, i)
                    dp = chain.derive(p, i)
                    assert dp.is_zero() or dp.degree <= p.degree + chain.delta - 1, (name, p)
        trig = CORPUS["trig"][0]
        assert trig.derive(trig.parse("f1^2 + f2^2"), 1).is_zero()


def test_criterion_8_integrability(capsys):
    twisted = Chain.from_strings(2, 1, [["f1"], ["x1"]])
    with criterion(8, 10, capsys):
        assert twisted.il_generators(1) == [twisted.parse("1 - x1")]
        for name, (chain, points) in sorted(CORPUS.items()):
            p = chain.parse(" + ".join(chain.arena.names) + " + " + "*".join(chain.arena.names))
            assert len(points) == 5
            for q in points:
                assert chain.il_test(q)
                for alpha, values in mixed_jet_coefficients(chain, q, p, 3).items():
                    assert len(set(values.values())) == 1, (name, q, alpha)


PRESERVATION_CASES = [("x2*(x2 - x1^2)", "x1"), ("x2^2 - x1^3", "x1"), ("x2 - x1^2", "x2")]


def test_criterion_9_perturbation(capsys):
    plane = Chain.trivial(2)
    with criterion(9, 60, capsys):
        for seed, (P, R) in enumerate(PRESERVATION_CASES):
            sys_ = NiSystem(plane, (plane.parse(P),), plane.parse(R))
            H = build_H(sys_, sys_.P[0], (0, 1), point=(0, 0))
            E = build_E([(H, plane.parse("x1"))])
            Eprime = build_Eprime(E, plane.parse("x1"), A=2, B=3)
            Q = random_Q(plane.arena, 1, plane.n + plane.m, seed)
            Pp = perturb(sys_.P, Q, Eprime, sys_.k_hat, d_E=E.degree, A=2, B=3, nm=plane.n + plane.m)
            rep = verify_preservation(sys_, Pp, (0, 0), Eprime, seed)
            assert rep.growth_ok, (P, rep.to_json())
            assert rep.perturbed >= rep.original, (P, rep.to_json())
        for P, R in PRESERVATION_CASES:
            sys_ = NiSystem(plane, (plane.parse(P),), plane.parse(R))
            rep = sard_sample(sys_, plane.parse("x1"), (0, 0), trials=20, seed=0)
            assert rep.trials == 20 and rep.failure_fraction == 0, (P, rep.to_json())


def test_criterion_10_lojasiewicz(capsys):
    plane = Chain.trivial(2)
    f, g = plane.parse("x1^2"), plane.parse("x1")
    with criterion(10, 10, capsys):
        assert loja_exponent_bound((1, 1, 2, 2)) == BoundExpr(1, [(12, 134217728)])
        xs = [Fraction(i, 82) for i in range(1, 41)]
        ys = [Fraction(j, 52) for j in range(1, 26)]
        grid = list(product(xs, ys))
        assert len(grid) == 1000 and all(0 < v < Fraction(1, 2) for pt in grid for v in pt)
        for pt in grid:
            assert abs(f.eval(pt)) > abs(g.eval(pt)) ** 3
