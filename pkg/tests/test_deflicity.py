from fractions import Fraction

import pytest

from noethkit import Arena, Chain, bound_cmp, mult_isolated, poly_parse
from noethkit.bounds import main_bound
from noethkit.deflicity import (DeflicityProblem, branch_decompose, classify_branches, count_near,
                                deflicity_family_symbolic, deflicity_numeric, deflicity_numeric_set,
                                deflicity_report, deflicity_symbolic, ord_along_branch,
                                ord_slope_estimate)
from noethkit.errors import InconclusiveError, PreconditionError

FAM2 = Arena.chain(2, 0, eps=True)
FAM1 = Arena.chain(1, 0, eps=True)


def fam(*texts, arena=FAM2):
    return [poly_parse(t, arena) for t in texts]


def problem(plane, P, R, point=(0, 0)):
    return DeflicityProblem(plane, point, (plane.parse(P),), plane.parse(R))


class TestBranches:
    def test_node(self, plane):
        branches = branch_decompose(problem(plane, "x2*(x2 - x1^2)", "x1"))
        assert len(branches) == 2
        assert sorted(b.describe() for b in branches) == ["y = 0", "y = 1*x^2"]

    def test_cusp_is_one_ramified_branch(self, plane):
        (br,) = branch_decompose(problem(plane, "x2^2 - x1^3", "x1"))
        assert br.ramification == 2 and br.multiplicity == 1
        assert br.puiseux_exponents == [Fraction(3, 2)]

    def test_double_component(self, plane):
        (br,) = branch_decompose(problem(plane, "x2^2", "x1"))
        assert br.multiplicity == 2

    def test_vertical(self, plane):
        branches = branch_decompose(problem(plane, "x1*(x2 - x1)", "x2"))
        assert sorted(b.vertical for b in branches) == [False, True]

    def test_one_axis_has_no_branches(self, exp_chain):
        prob = DeflicityProblem(exp_chain, (0, 1), (), exp_chain.parse("f1"))
        assert branch_decompose(prob) == []

    def test_precondition(self, plane):
        with pytest.raises(PreconditionError):
            problem(plane, "x2 - 1", "x1")


class TestOrd:
    def test_parabola(self, plane):
        prob = problem(plane, "x2 - x1^2", "x2")
        (br,) = branch_decompose(prob)
        assert ord_along_branch(br, plane.parse("x2")) == 2

    def test_unit(self, plane):
        (br,) = branch_decompose(problem(plane, "x2 - x1^2", "x2"))
        assert ord_along_branch(br, plane.parse("1")) == 0

    def test_vanishing_is_inconclusive(self, plane):
        (br,) = branch_decompose(problem(plane, "x2^2 - x1^3", "x1"))
        with pytest.raises(InconclusiveError):
            ord_along_branch(br, plane.parse("x2^2 - x1^3"))

    def test_uniformizing_parameter(self, plane):
        (br,) = branch_decompose(problem(plane, "x2^2 - x1^3", "x1"))
        # x = s^2, y = s^3
        assert ord_along_branch(br, plane.parse("x1")) == 2
        assert ord_along_branch(br, plane.parse("x2")) == 3

    @pytest.mark.parametrize("P,R,g", [
        ("x2 - x1^2", "x2", "x2"), ("x2^2 - x1^3", "x1", "x1*x2"), ("x2 - x1^3 - x1^4", "x2", "x2 + x1^5"),
    ])
    def test_slope_estimate(self, plane, P, R, g):
        for br in branch_decompose(problem(plane, P, R)):
            g_poly = plane.parse(g)
            exact = ord_along_branch(br, g_poly)
            slope = ord_slope_estimate(br, g_poly)
            assert abs(slope - float(exact)) < 0.05


class TestClassify:
    def test_constant_R_all_bad(self, plane):
        prob = problem(plane, "x2*(x2 - x1^2)", "3")
        out = classify_branches(branch_decompose(prob), prob.R, prob)
        assert [b.classification for b in out] == ["bad", "bad"]
        assert deflicity_symbolic(prob) == 0

    def test_mixed(self, plane):
        prob = problem(plane, "x2*(x2 - x1^2)", "x2")
        out = classify_branches(branch_decompose(prob), prob.R, prob)
        assert sorted(b.classification for b in out) == ["bad", "good"]

    def test_bad_contributes_nothing(self, plane):
        good_only = deflicity_symbolic(problem(plane, "x2 - x1^2", "x2"))
        with_bad = deflicity_symbolic(problem(plane, "x2*(x2 - x1^2)", "x2"))
        assert good_only == with_bad == 2


class TestSymbolic:
    @pytest.mark.parametrize("P,R,expected", [
        ("x2*(x2 - x1^2)", "x1", 2), ("x2^2", "x2", 0), ("x2*(x2 - x1^2)", "x2", 2),
        ("x2^2 - x1^3", "x1", 2), ("x2^2 - x1^3", "x2", 3), ("x2", "x1^3", 3),
    ])
    def test_plane(self, plane, P, R, expected):
        assert deflicity_symbolic(problem(plane, P, R)) == expected

    def test_one_axis(self, exp_chain):
        prob = DeflicityProblem(exp_chain, (0, 1), (), exp_chain.parse("f1"))
        assert deflicity_symbolic(prob) == 1
        prob = DeflicityProblem(exp_chain, (0, 1), (), exp_chain.parse("f1 - x1"))
        assert deflicity_symbolic(prob) == 2

    def test_transcendental_leaf(self):
        chain = Chain.from_strings(2, 1, [["f1"], ["0"]])
        # on the leaf f1 = e^x1, P = e^x1 - 1 - x2 is the graph x2 ~ x1
        prob = DeflicityProblem(chain, (0, 0, 1), (chain.parse("f1 - 1 - x2"),), chain.parse("x2"))
        report = deflicity_report(prob)
        assert report.value == 1
        assert all(b.classification == "good" for b in report.branches)


FAMILIES = [
    (("x1^2 - eps", "x2^2 - eps"), 4),
    (("eps*x1 + x1", "x2"), 1),
    (("x1*x2 - eps", "x1 - x2"), 2),
    (("x1^2 + x2^2 - eps", "x1 - x2^2"), 2),
    (("x1^3 - eps", "x2 - x1"), 3),
    (("x1^2 - eps", "x2^3 - eps*x1"), 6),
]


class TestFamilies:
    @pytest.mark.parametrize("system,expected", FAMILIES)
    def test_symbolic_matches_numeric(self, system, expected):
        family = fam(*system)
        assert deflicity_family_symbolic(family, (0, 0)) == expected
        assert deflicity_numeric(family, (0, 0)) == expected

    @pytest.mark.parametrize("system,expected", FAMILIES)
    def test_conservation(self, system, expected):
        """Roots that leave p as eps -> 0 are counted by the multiplicity of the limit system."""
        plane = Chain.trivial(2)
        limit = [plane.parse(t.replace("eps", "0")) for t in system]
        assert mult_isolated(plane, (0, 0), limit).value == expected

    def test_univariate(self):
        assert deflicity_numeric(fam("x1^2 - eps", arena=FAM1), (0,)) == 2
        assert deflicity_numeric(fam("x1^3 - eps*x1", arena=FAM1), (0,)) == 3

    def test_counts_agree_across_radii(self):
        res = count_near(fam("x1^2 - eps", "x2^2 - eps"), (0, 0))
        assert res.value == 4


class TestNumericSets:
    @pytest.mark.parametrize("P,R,expected", [
        ("x2*(x2 - x1^2)", "x1", 2), ("x2^2", "x2", 0), ("x2*(x2 - x1^2)", "x2", 2), ("x2^2 - x1^3", "x1", 2),
    ])
    def test_plane_sets(self, plane, P, R, expected):
        prob = problem(plane, P, R)
        assert deflicity_numeric_set(prob) == deflicity_symbolic(prob) == expected

    def test_transcendental(self):
        chain = Chain.from_strings(2, 1, [["f1"], ["0"]])
        prob = DeflicityProblem(chain, (0, 0, 1), (chain.parse("f1 - 1 - x2"),), chain.parse("x2"))
        assert deflicity_numeric_set(prob) == 1


@pytest.mark.parametrize("P,R", [("x2*(x2 - x1^2)", "x1"), ("x2^2 - x1^3", "x2"), ("x2", "x1^3")])
def test_below_main_bound(plane, P, R):
    value = deflicity_symbolic(problem(plane, P, R))
    d = max(plane.parse(P).degree, plane.parse(R).degree)
    assert bound_cmp(value, main_bound((0, 2, 1, d))) == "less"
