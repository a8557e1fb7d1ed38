"""Closed-form degree and multiplicity bounds, evaluated exactly.

All quantities are exact integers while they fit under the digit cap and
:class:`~noethkit.algebra.BoundExpr` power-products beyond it.  The only
transcendental input is the constant ``Q`` of the isolated-multiplicity
bound, which is enclosed with directed-rounding interval arithmetic and
rounded up.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import ceil, comb

from mpmath import iv, mp

from .algebra import DIGIT_CAP, BoundExpr, add_upper, bmax
from .algebra.boundexpr import iv_precision
from .errors import PrecisionInsufficientError

Number = int | BoundExpr


@dataclass(frozen=True)
class BoundParams:
    m: int
    n: int
    delta: int
    d: int

    def __post_init__(self):
        if self.n < 1 or self.m < 0:
            raise ValueError(f"need n >= 1 and m >= 0, got m={self.m}, n={self.n}")
        if self.delta < 1 or self.d < 1:
            raise ValueError("delta and d must be at least 1")

    @property
    def s(self) -> int:
        return self.m + self.n

    @property
    def top(self) -> int:
        return max(self.d, self.delta)

    def with_degree(self, d: int) -> "BoundParams":
        return BoundParams(self.m, self.n, self.delta, d)


def _params(p) -> BoundParams:
    if isinstance(p, BoundParams):
        return p
    if isinstance(p, dict):
        return BoundParams(p["m"], p["n"], p.get("delta", p.get("δ")), p["d"])
    return BoundParams(*p)


# -- elementary formulas ----------------------------------------------------

def deg_after_mo(n: int, delta: int, d: int, k: int) -> int:
    """Degree after applying an order-``k`` operator: ``C(n+k,k)(d+k*delta) - k``."""
    if min(n, delta, k) < 0 or d < 0:
        raise ValueError("arguments must be nonnegative")
    return comb(n + k, k) * (d + k * delta) - k


def il_degree_exact(m: int, n: int, delta: int) -> Fraction:
    bracket = 2 * delta * (n + m + 2) - 2 * m - 2
    return Fraction((m + 1) * (delta - 1) * bracket ** (2 * m + 2), 2) + delta * (n + 2) - 1


def il_degree(m: int, n: int, delta: int) -> int:
    """Degree of defining equations of the integrability locus (rounded up if needed)."""
    if delta < 1:
        raise ValueError("delta must be at least 1")
    return ceil(il_degree_exact(m, n, delta))


def il_degree_is_integral(m: int, n: int, delta: int) -> bool:
    return il_degree_exact(m, n, delta).denominator == 1


def rough_mult0(p) -> BoundExpr:
    """``(delta+d)^(8(m+n)^2) * (m+n)^(8(m+n)^3)``."""
    p = _params(p)
    s = p.s
    return BoundExpr(1, [(p.delta + p.d, 8 * s * s), (s, 8 * s**3)])


# -- the isolated-multiplicity bound with its transcendental constant ----------

def _log_q(n: int, m: int):
    """Interval for ``ln Q`` at the current interval precision."""
    ln_n = iv.log(iv.mpf(n))
    return (1 + ln_n + (ln_n + 1) * (1 + iv.log(iv.mpf(n + m)) - ln_n / 2)
            + n * (ln_n - 2))


def q_constant(n: int, m: int, precision: int = 128):
    """Enclosure of ``Q``; an exact ``Fraction`` when ``n == 1`` (it equals ``m+1``)."""
    if n == 1:
        return Fraction(m + 1)
    with iv_precision(precision):
        q = iv.exp(_log_q(n, m))
        lo, hi = q._mpi_
    with mp.workprec(precision):
        return mp.make_mpf(lo), mp.make_mpf(hi)


@dataclass(frozen=True)
class GkMultBound:
    """Certified upper bound on the isolated multiplicity, with its ingredients."""

    value: BoundExpr
    exact: bool
    q: object  # Fraction, or an (lo, hi) enclosure
    q_rounded: int
    first: BoundExpr
    second: BoundExpr
    precision: int
    lower: BoundExpr  # certified lower bound on the same maximum


def _gk_first_base(p: BoundParams) -> int:
    bracket = 2 * p.delta * (p.n + p.m + 2) - 2 * p.m - 2
    return (p.m + 1) * (p.delta - 1) * bracket ** (2 * p.m + 2) + 2 * p.delta * (p.n + 2) - 2


def gk_mult_bound(params, precision: int = 128) -> GkMultBound:
    """Maximum of the two isolated-multiplicity numbers, rounded up when ``Q`` is irrational."""
    p = _params(params)
    s = p.s
    base1 = _gk_first_base(p)
    q = q_constant(p.n, p.m, precision)
    if isinstance(q, Fraction):
        base2 = 2 * (q + p.n) ** p.n * (p.d + q * (p.delta - 1))
        first = BoundExpr(q / 2, [(base1, 2 * s)])
        second = BoundExpr(q / 2, [(base2.numerator, 2 * s), (base2.denominator, -2 * s)])
        best = bmax(first, second)
        return GkMultBound(best, True, q, ceil(q), first, second, precision, best)
    with iv_precision(precision):
        qi = iv.exp(_log_q(p.n, p.m))
        v1 = qi / 2 * iv.mpf(base1) ** (2 * s)
        v2 = qi / 2 * (2 * (qi + p.n) ** p.n * (p.d + qi * (p.delta - 1))) ** (2 * s)
        (lo1, hi1), (lo2, hi2) = v1._mpi_, v2._mpi_
        q_hi = qi._mpi_[1]
    with mp.workprec(precision):
        up1 = int(mp.ceil(mp.make_mpf(hi1)))
        up2 = int(mp.ceil(mp.make_mpf(hi2)))
        low = max(int(mp.floor(mp.make_mpf(lo1))), int(mp.floor(mp.make_mpf(lo2))))
        q_up = int(mp.ceil(mp.make_mpf(q_hi)))
    first, second = BoundExpr.coerce(up1), BoundExpr.coerce(up2)
    return GkMultBound(bmax(first, second), False, q, q_up, first, second, precision,
                       BoundExpr.coerce(low))


def mult0_bound(params, mode: str = "rough", precision: int = 128) -> BoundExpr:
    if mode == "rough":
        return rough_mult0(params)
    if mode == "exact":
        return gk_mult_bound(params, precision).value
    raise ValueError(f"unknown mode {mode!r}")


def compare_exact_to_rough(params, precision: int = 128, max_precision: int = 4096) -> str:
    """Order of the exact isolated-multiplicity bound relative to the rough one."""
    p = _params(params)
    rough = rough_mult0(p)
    prec = precision
    names = {-1: "less", 0: "equal", 1: "greater"}
    while prec <= max_precision:
        gk = gk_mult_bound(p, prec)
        if gk.exact:
            return names[gk.value.cmp(rough)]
        if gk.value < rough:
            return "less"
        if gk.lower > rough:
            return "greater"
        prec *= 2
    raise PrecisionInsufficientError(
        f"interval for the exact bound does not separate from the rough bound at {max_precision} bits")


# -- main bound and its derivation -----------------------------------------------

def main_bound(params) -> BoundExpr:
    """``(max{d,delta}(m+n))^(16(m+n)^(20n+3))``."""
    p = _params(params)
    return BoundExpr.power(p.top * p.s, 16 * p.s ** (20 * p.n + 3))


def induction_target(params) -> BoundExpr:
    """Right-hand side ``max{d,delta}^(32(m+n)^4) (m+n)^(40(m+n)^5)``."""
    p = _params(params)
    return BoundExpr(1, [(p.top, 32 * p.s**4), (p.s, 40 * p.s**5)])


def ladder_target(params) -> BoundExpr:
    """Bound on the degree after the induction: ``max^((m+n)^(8n)) (m+n)^((m+n)^(20n))``."""
    p = _params(params)
    return BoundExpr(1, [(p.top, p.s ** (8 * p.n)), (p.s, p.s ** (20 * p.n))])


def loja_exponent_bound(params) -> BoundExpr:
    """Main bound at degree ``2(d+delta-1)``: ``(2(d+delta-1)(m+n))^(16(m+n)^(20n+3))``."""
    p = _params(params)
    return BoundExpr.power(2 * (p.d + p.delta - 1) * p.s, 16 * p.s ** (20 * p.n + 3))


@dataclass
class InductionReport:
    params: BoundParams
    k: Number
    B: Number
    d_IL: int
    d_M_k: Number
    d_M_B: Number
    d_NI: Number
    A: Number
    d_H: Number
    d_E: Number
    d_prime: Number
    exact: bool = True
    k_choice: str = "rough"
    verdicts: list = field(default_factory=list)

    def fields(self) -> dict:
        return {"k": self.k, "B": self.B, "d_IL": self.d_IL, "d_M_k": self.d_M_k,
                "d_M_B": self.d_M_B, "d_NI": self.d_NI, "A": self.A, "d_H": self.d_H,
                "d_E": self.d_E, "d_prime": self.d_prime}


def _digits(x: Number) -> float:
    if isinstance(x, int):
        return len(str(abs(x))) if x.bit_length() < 4000 else x.bit_length() * 0.30103
    return x.log10_estimate()


def _fits(*estimates: float, cap: int = DIGIT_CAP) -> bool:
    return all(e < cap for e in estimates)


def _choose_k(p: BoundParams, k_choice: str, precision: int) -> int | BoundExpr:
    if k_choice == "rough":
        return rough_mult0(p)
    if k_choice == "exact":
        return gk_mult_bound(p, precision).value
    raise ValueError(f"unknown k choice {k_choice!r}")


def _as_int(x) -> int | None:
    if isinstance(x, int):
        return x
    return x.try_int()


def induction_degree(params, k=None, k_choice: str = "rough", precision: int = 128,
                     cap: int = DIGIT_CAP) -> InductionReport:
    """Degree ``d'`` of the perturbed system in one induction step, with every intermediate."""
    p = _params(params)
    n, m, delta, d, s = p.n, p.m, p.delta, p.d, p.s
    if k is None:
        k = _choose_k(p, k_choice, precision)
    else:
        k_choice = "given"
    d_il = il_degree(m, n, delta)
    k_int = _as_int(BoundExpr.coerce(k)) if not isinstance(k, int) else k
    # d' has about (n+1)(4s+2) times as many digits as k
    k_digits = _digits(BoundExpr.coerce(k))
    if k_int is not None and _fits(k_digits * (n + 2) * (4 * s + 3), cap=cap):
        d_m_k = deg_after_mo(n, delta, d, k_int)
        d_m_b = d_m_k
        d_ni = max(d_il, d_m_k)
        a = max(d_ni, d_m_b) ** s
        d_h = (k_int + 1) * d_m_k
        d_e = d_ni ** (2 * s) + d_h
        d_prime = (a * d_e + k_int) * (k_int + 1) + n + m
        rep = InductionReport(p, k_int, k_int, d_il, d_m_k, d_m_b, d_ni, a, d_h, d_e, d_prime,
                              True, k_choice)
    else:
        rep = _induction_upper(p, BoundExpr.coerce(k), cap)
        rep.k_choice = k_choice
    target = induction_target(p)
    rep.verdicts = [("d' <= max{d,delta}^(32(m+n)^4) (m+n)^(40(m+n)^5)", _le(rep.d_prime, target))]
    return rep


def _induction_upper(p: BoundParams, k: BoundExpr, cap: int) -> InductionReport:
    """Power-product upper bounds for one induction step when ``k`` is too large to expand.

    Uses ``C(n+k,k) <= (k+1)^n <= (2k)^n``, ``d + k*delta <= 2k*delta`` (as ``k >= d``),
    ``k+1 <= 2k`` and ``a + b <= 2 max(a, b)``.
    """
    n, m, delta, d, s = p.n, p.m, p.delta, p.d, p.s
    if k < d:
        raise ValueError("upper-bound mode expects k >= d")
    d_il = il_degree(m, n, delta)
    two_k = k * 2
    d_m = two_k**n * (k * (2 * delta))
    d_ni = bmax(d_il, d_m)
    a = bmax(d_ni, d_m) ** s
    d_h = two_k * d_m
    d_e = add_upper(d_ni ** (2 * s), d_h, cap)
    inner = add_upper(a * d_e, k, cap)
    d_prime = add_upper(inner * two_k, n + m, cap)
    return InductionReport(p, k, k, d_il, d_m, d_m, d_ni, a, d_h, d_e, d_prime, False)


def _le(a, b) -> bool:
    if isinstance(a, int) and isinstance(b, int):
        return a <= b
    return BoundExpr.coerce(a).cmp(b) <= 0


def _lt(a, b) -> bool:
    if isinstance(a, int) and isinstance(b, int):
        return a < b
    return BoundExpr.coerce(a).cmp(b) < 0


def verify_main_proof_chain(params, k_choice: str = "exact", precision: int = 128) -> list[tuple[str, bool]]:
    """Check every inequality in the derivation of the main bound by exact comparison.

    ``k_choice="exact"`` takes ``k = B`` to be the certified isolated-multiplicity
    bound (the quantity the proof bounds by ``C``); ``"rough"`` plugs in ``C``
    itself, under which ``k + 1 <= C`` cannot hold.
    """
    p = _params(params)
    n, delta, d, s = p.n, p.delta, p.d, p.s
    c = rough_mult0(p)
    rep = induction_degree(p, k_choice=k_choice, precision=precision)
    k, b = rep.k, rep.B
    k1 = k + 1 if isinstance(k, int) else add_upper(k, 1)
    return [
        ("B <= C", _le(b, c)),
        ("k+1 <= C", _le(k1, c)),
        ("d_M(n,delta,d,B) < C^(n+1)(d+delta)", _lt(rep.d_M_B, c ** (n + 1) * (d + delta))),
        ("d_IL < delta^(2(m+n)) (m+n)^(6(m+n))",
         _lt(rep.d_IL, BoundExpr(1, [(delta, 2 * s), (s, 6 * s)]))),
        ("d_NI < C^(m+n)", _lt(rep.d_NI, c**s)),
        ("A < C^((m+n)^2)", _lt(rep.A, c ** (s * s))),
        ("d_H < C^(m+n)", _lt(rep.d_H, c**s)),
        ("d_E < C^(2(m+n)^2)", _lt(rep.d_E, c ** (2 * s * s))),
        ("d' < C^(4(m+n)^2)", _lt(rep.d_prime, c ** (4 * s * s))),
        ("d' <= max{d,delta}^(32(m+n)^4) (m+n)^(40(m+n)^5)", _le(rep.d_prime, induction_target(p))),
    ]


@dataclass
class LadderResult:
    params: BoundParams
    e: int
    degrees: list
    final: BoundExpr
    main: BoundExpr
    final_le_main: bool
    degree_le_target: bool


def induction_ladder(params, e: int, cap: int = DIGIT_CAP) -> LadderResult:
    """Apply the induction step ``e`` times, then the rough isolated bound."""
    p = _params(params)
    if not 0 <= e <= p.n:
        raise ValueError(f"need 0 <= e <= n, got e={e}")
    degree: Number = p.d
    degrees: list[Number] = [degree]
    for step in range(e):
        if isinstance(degree, int):
            rep = induction_degree(p.with_degree(degree), cap=cap)
        else:
            rep = _induction_upper(p, _rough_upper(p, degree), cap)
        degree = rep.d_prime
        degrees.append(degree)
    if isinstance(degree, int):
        final = rough_mult0(p.with_degree(degree))
    else:
        final = _rough_upper(p, degree)
    main = main_bound(p)
    return LadderResult(p, e, degrees, final, main, _le(final, main), _le(degree, ladder_target(p)))


def _rough_upper(p: BoundParams, degree: BoundExpr) -> BoundExpr:
    """``(delta + D)^(8s^2) s^(8s^3) <= (2D)^(8s^2) s^(8s^3)`` for ``D >= delta``."""
    s = p.s
    return (degree * 2) ** (8 * s * s) * BoundExpr.power(s, 8 * s**3)


# -- grids ------------------------------------------------------------------------

def grid(max_mn: int = 2, max_d: int = 3, min_m: int = 1):
    for m, n, delta, d in product(range(min_m, max_mn + 1), range(1, max_mn + 1),
                                  range(1, max_d + 1), range(1, max_d + 1)):
        yield BoundParams(m, n, delta, d)


def _grid_row(p: BoundParams) -> dict:
    chain = verify_main_proof_chain(p)
    ladder = induction_ladder(p, p.n)
    return {"params": p, "verdicts": chain, "ladder_final_le_main": ladder.final_le_main,
            "ladder_degree_le_target": ladder.degree_le_target}


def verify_grid(max_mn: int = 2, max_d: int = 3, jobs: int = 1) -> list[dict]:
    points = list(grid(max_mn, max_d))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_grid_row, points))
    return [_grid_row(p) for p in points]
