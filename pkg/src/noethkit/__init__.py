"""noethkit: multiplicities, deflicities and effective bounds for Noetherian functions."""

from .algebra import (Arena, BoundExpr, GaussianRational, Poly, bound_cmp, poly_arith, poly_eval,
                      poly_parse, poly_print)
from .bounds import (BoundParams, deg_after_mo, il_degree, induction_degree, induction_ladder,
                     loja_exponent_bound, main_bound, mult0_bound, verify_main_proof_chain)
from .chain import (Chain, Jet, LeafPoint, derive, il_generators, il_test, iterated_derive, jet)
from .deflicity import (DeflicityProblem, branch_decompose, classify_branches,
                        deflicity_family_symbolic, deflicity_numeric, deflicity_symbolic,
                        ord_along_branch)
from .errors import NoethkitError
from .local_mult import (Direction, MultResult, mo_restrict, mo_vanish_order, mult_isolated,
                         mult_univariate)
from .ni_perturb import (NiSystem, PerturbReport, build_E, build_Eprime, build_H, ni_generators,
                         ni_member_numeric, perturb, sard_sample, verify_preservation)

__version__ = "0.1.0"

__all__ = [
    "Arena", "BoundExpr", "BoundParams", "Chain", "DeflicityProblem", "Direction",
    "GaussianRational", "Jet", "LeafPoint", "MultResult", "NiSystem", "NoethkitError",
    "PerturbReport", "Poly", "bound_cmp", "branch_decompose", "build_E", "build_Eprime",
    "build_H", "classify_branches", "deflicity_family_symbolic", "deflicity_numeric",
    "deflicity_symbolic", "deg_after_mo", "derive", "il_degree", "il_generators", "il_test",
    "induction_degree", "induction_ladder", "iterated_derive", "jet", "loja_exponent_bound",
    "main_bound", "mo_restrict", "mo_vanish_order", "mult0_bound", "mult_isolated",
    "mult_univariate", "ni_generators", "ni_member_numeric", "ord_along_branch", "perturb",
    "poly_arith", "poly_eval", "poly_parse", "poly_print", "sard_sample",
    "verify_main_proof_chain", "verify_preservation",
]
