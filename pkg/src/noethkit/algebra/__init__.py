from .boundexpr import DIGIT_CAP, BoundExpr, DigitCapExceeded, add_upper, bmax, coprime_base
from .parse import poly_parse, poly_print
from .poly import EPS, Arena, Poly, poly_sum
from .scalar import GaussianRational, to_scalar


def poly_arith(a: Poly, b, op: str) -> Poly:
    """Dispatch ``add``/``sub``/``mul``/``pow`` on two polynomials (``b`` an int for ``pow``)."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "pow":
        if isinstance(b, Poly):
            if not b.is_constant():
                raise ValueError("pow exponent must be a nonnegative integer")
            b = b.constant_term()
            if b.denominator != 1:
                raise ValueError("pow exponent must be a nonnegative integer")
            b = int(b)
        return a**b
    raise ValueError(f"unknown operation {op!r}")


def poly_eval(p: Poly, point):
    return p.eval(point)


def bound_cmp(a, b) -> str:
    c = BoundExpr.coerce(a).cmp(b)
    return {-1: "less", 0: "equal", 1: "greater"}[c]


__all__ = [
    "Arena", "BoundExpr", "DIGIT_CAP", "DigitCapExceeded", "EPS", "GaussianRational", "Poly",
    "add_upper", "bmax", "bound_cmp", "coprime_base", "poly_arith", "poly_eval", "poly_parse",
    "poly_print", "poly_sum", "to_scalar",
]
