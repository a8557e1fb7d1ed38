from .numeric import (cluster_roots, count_near, deflicity_numeric, deflicity_numeric_set,
                      polynomialize, solve_square)
from .puiseux import Branch, newton_puiseux
from .symbolic import (DeflicityProblem, DeflicityResult, branch_decompose, classify_branches,
                       deflicity_family_symbolic, deflicity_report, deflicity_symbolic,
                       eliminate_linear, ord_along_branch, ord_slope_estimate)

__all__ = [
    "Branch", "DeflicityProblem", "DeflicityResult", "branch_decompose", "classify_branches",
    "cluster_roots", "count_near", "deflicity_family_symbolic", "deflicity_numeric",
    "deflicity_numeric_set", "deflicity_report", "deflicity_symbolic", "eliminate_linear",
    "newton_puiseux", "ord_along_branch", "ord_slope_estimate", "polynomialize", "solve_square",
]
