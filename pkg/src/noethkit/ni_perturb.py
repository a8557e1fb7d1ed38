"""Non-isolated intersection locus and the perturbation machinery.

A point ``q`` is a non-isolated intersection of ``P`` with respect to ``R``
when the common zeros of ``P`` and ``R - R(q)`` on the leaf through ``q``
are not isolated at ``q``.  At a working order ``k_hat`` this is tested by
a dual-space dimension: ``D_k > k`` exactly when the local multiplicity is
larger than ``k`` or infinite.

The perturbation ``P'_j = P_j + Q_j * E'^(k+1)`` with ``E' = E^A * ell^B``
is built here together with checks that keep every constructed degree
inside the ledger predicted by the bounds module.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .algebra import Arena, Poly
from .algebra.scalar import is_exact
from .bounds import deg_after_mo, il_degree
from .chain import Chain, LeafSeries, _multi_indices
from .deflicity.puiseux import INF
from .deflicity.symbolic import DeflicityProblem, deflicity_report, ord_along_branch
from .errors import (DegreeLedgerError, DimensionError, InconclusiveError, NotGenericError,
                     PreconditionError)
from .local_mult import Direction, dual_space_dimension, mo_vanish_order

DEFAULT_K = 4
DEFAULT_A = 2
DEFAULT_B = 2
COEFF_BOX = 5
DIRECTIONS = ((0, 1), (1, 0), (1, 1))
_NUMERIC_ZERO = 1e-9


@dataclass
class NiSystem:
    chain: Chain
    P: tuple
    R: Poly
    k_hat: int = DEFAULT_K

    def __post_init__(self):
        if self.k_hat < 1:
            raise ValueError("working order must be at least 1")
        self.P = tuple(self.chain._lift(p) for p in self.P)
        self.R = self.chain._lift(self.R)
        if len(self.P) != self.chain.n - 1:
            raise DimensionError(f"need {self.chain.n - 1} equations, got {len(self.P)}")

    @property
    def degrees(self) -> dict:
        return {"P": [p.degree for p in self.P], "R": self.R.degree}

    @property
    def d(self) -> int:
        return max([self.R.degree] + [p.degree for p in self.P])

    def with_P(self, P: Sequence[Poly]) -> "NiSystem":
        return NiSystem(self.chain, tuple(P), self.R, self.k_hat)


def _ledger(poly: Poly, budget: int, what: str) -> Poly:
    if not poly.is_zero() and poly.degree > budget:
        raise DegreeLedgerError(f"{what}: degree {poly.degree} exceeds budget {budget}")
    return poly


def _delta(chain: Chain) -> int:
    return max(chain.delta, 1)


# -- the locus -----------------------------------------------------------------

def tangent_derivation(sys: NiSystem):
    """``W = V_2(P_1) V_1 - V_1(P_1) V_2``, tangent to the curve ``{P_1 = 0}`` (n = 2)."""
    a = sys.chain.derive(sys.P[0], 2)
    b = sys.chain.derive(sys.P[0], 1)

    def W(h: Poly) -> Poly:
        return a * sys.chain.derive(h, 1) - b * sys.chain.derive(h, 2)

    return W


def ni_generators(sys: NiSystem) -> list[Poly]:
    """Polynomials vanishing on the non-isolated locus at working order ``k_hat``.

    ``n = 1``: ``V^j R`` for ``j = 1..k``.  ``n = 2``: ``P_1`` and ``W^j R``
    with ``W`` the tangent derivation of ``{P_1 = 0}``; at smooth points of a
    component on which ``R`` is constant all of these vanish, so the set is
    sound (it may also cut out singular points of ``{P_1 = 0}``).
    Integrability generators of the chain are prepended.
    """
    chain, k = sys.chain, sys.k_hat
    if chain.n > 2:
        raise DimensionError("ni_generators supports n <= 2")
    delta = _delta(chain)
    budget = deg_after_mo(chain.n, delta, sys.d, k)
    il = chain.il_generators(chain.default_depth())
    if il:
        il_budget = il_degree(chain.m, chain.n, delta)
        for g in il:
            _ledger(g, max(il_budget, budget), "integrability generator")
    out = list(il)
    if chain.n == 1:
        cur = sys.R
        for _ in range(k):
            cur = chain.derive(cur, 1)
            out.append(_ledger(cur, budget, "derivative generator"))
        return out
    W = tangent_derivation(sys)
    out.append(sys.P[0])
    cur = sys.R
    for _ in range(k):
        cur = W(cur)
        out.append(_ledger(cur, budget, "derivative generator"))
    return out


def _coords(q) -> tuple:
    return q.coords if hasattr(q, "coords") else tuple(q)


def ni_member_numeric(sys: NiSystem, q, check_integrable: bool = True) -> bool:
    """Whether ``q`` is a non-isolated intersection at working order ``k_hat``.

    Computes ``D_k = dim C[x]/(I + m^(k+1))`` for ``I`` generated by the jets of
    ``P`` and ``R - R(q)``; ``D_k > k`` holds exactly when the multiplicity at
    ``q`` exceeds ``k`` (or is infinite).
    """
    coords = _coords(q)
    chain, k = sys.chain, sys.k_hat
    if check_integrable and chain.m and chain.n > 1 and not chain.il_test(coords):
        raise PreconditionError(f"point {coords} is not integrable")
    exact = all(is_exact(c) for c in coords)
    system = list(sys.P) + [sys.R - sys.R.eval(coords)]
    jets = []
    zero = (0,) * chain.n
    for p in system:
        jet = LeafSeries(chain, coords, p).coefficients(k)
        if not exact and zero in jet and abs(complex(jet[zero])) < _NUMERIC_ZERO:
            jet.pop(zero)
        jets.append(jet)
    return dual_space_dimension(jets, chain.n, k, exact) > k


# -- constructions -----------------------------------------------------------------

def build_H(sys: NiSystem, phi: Poly, t: Direction | Sequence, lam: int | None = None,
            point: Sequence | None = None) -> Poly:
    """``H = (D_t^lam Phi)^(lam+1)``; ``lam`` defaults to the vanishing order at ``point``."""
    chain = sys.chain
    t = t if isinstance(t, Direction) else Direction(t)
    phi = chain._lift(phi)
    if lam is None:
        if point is None:
            raise ValueError("either lam or point is required")
        res = mo_vanish_order(chain, point, phi, t, sys.k_hat)
        if res.value is None:
            raise NotGenericError(f"direction not generic: no finite vanishing order up to {sys.k_hat}")
        lam = res.value
    M = phi
    for _ in range(lam):
        M = chain.directional(M, t.vector)
    H = M ** (lam + 1)
    return _ledger(H, (lam + 1) * deg_after_mo(chain.n, chain.delta, phi.degree, lam), "H")


def build_E(components: Sequence[tuple], arena: Arena | None = None) -> Poly:
    """``E = sum_i H_i * prod_(j != i) Q_j``.

    Each component is ``(H_i, Q_i)`` or ``(H_i, Q_i, sample_points_i)``; sample
    points are used to check that ``Q_i`` vanishes on component ``i`` and not
    on the others.
    """
    if not components:
        raise ValueError("need at least one component")
    comps = [tuple(c) + ((),) * (3 - len(c)) for c in components]
    arena = arena or comps[0][0].arena
    Hs = [h.embed(arena) if h.arena != arena else h for h, _, _ in comps]
    Qs = [q.embed(arena) if q.arena != arena else q for _, q, _ in comps]
    for i, (_, _, pts) in enumerate(comps):
        for pt in pts:
            if Qs[i].eval(pt) != 0:
                raise PreconditionError(f"Q_{i + 1} does not vanish on its component at {pt}")
            for j, Qj in enumerate(Qs):
                if j != i and Qj.eval(pt) == 0:
                    raise PreconditionError(f"Q_{j + 1} vanishes on component {i + 1} at {pt}")
    summands = []
    for i, H in enumerate(Hs):
        term = H
        for j, Qj in enumerate(Qs):
            if j != i:
                term = term * Qj
        summands.append(term)
    for i, (_, _, pts) in enumerate(comps):
        for pt in pts:
            for j, s in enumerate(summands):
                if j != i and s.eval(pt) != 0:  # pragma: no cover - implied by separation
                    raise PreconditionError(f"summand {j + 1} survives on component {i + 1}")
    E = Poly.zero(arena)
    for s in summands:
        E = E + s
    qsum = sum(q.degree for q in Qs if not q.is_zero())
    budget = max(h.degree for h in Hs) + qsum
    return _ledger(E, budget, "E")


def build_Eprime(E: Poly, ell: Poly, A: int = DEFAULT_A, B: int = DEFAULT_B) -> Poly:
    """``E' = E^A * ell^B``."""
    if ell.degree != 1:
        raise ValueError("ell must have degree one")
    out = E ** A * ell ** B
    return _ledger(out, A * E.degree + B, "E'")


def random_Q(arena: Arena, count: int, degree: int, seed: int, box: int = COEFF_BOX) -> tuple[Poly, ...]:
    """Seeded polynomials with integer coefficients in ``[-box, box]`` and all monomials up to ``degree``."""
    rng = np.random.default_rng(seed)
    mons = [a for total in range(degree + 1) for a in _multi_indices(arena.size, total)]
    out = []
    for _ in range(count):
        coeffs = rng.integers(-box, box + 1, size=len(mons))
        out.append(Poly(arena, {a: Fraction(int(c)) for a, c in zip(mons, coeffs) if c}))
    return tuple(out)


def perturb(P: Sequence[Poly], Q: Sequence[Poly], Eprime: Poly, k_hat: int = DEFAULT_K,
            d_E: int | None = None, A: int = DEFAULT_A, B: int = DEFAULT_B,
            nm: int | None = None) -> tuple[Poly, ...]:
    """``P'_j = P_j + Q_j * E'^(k+1)``, with the degree of each ``P'_j`` checked."""
    if len(P) != len(Q):
        raise DimensionError("P and Q must have the same length")
    factor = Eprime ** (k_hat + 1)
    out = []
    for Pj, Qj in zip(P, Q):
        Pp = Pj + Qj * factor
        budget = Pj.degree
        if not Qj.is_zero() and not Eprime.is_zero():
            budget = max(budget, Qj.degree + (k_hat + 1) * Eprime.degree)
        _ledger(Pp, budget, "P'")
        if d_E is not None and nm is not None:
            _ledger(Pp, max(Pj.degree, (A * d_E + B) * (k_hat + 1) + nm), "P' (d' analogue)")
        out.append(Pp)
    return tuple(out)


def exact_divide(a: Poly, b: Poly) -> Poly | None:
    """``a / b`` when ``b`` divides ``a`` exactly, else None."""
    if b.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    arena = a.arena
    lead_e, lead_c = b.terms[0]
    quotient = Poly.zero(arena)
    rem = a
    while not rem.is_zero():
        e, c = rem.terms[0]
        diff = tuple(x - y for x, y in zip(e, lead_e))
        if min(diff) < 0:
            return None
        mono = Poly.monomial(arena, diff, c / lead_c)
        quotient = quotient + mono
        rem = rem - mono * b
    return quotient


# -- verification ------------------------------------------------------------------

@dataclass
class BranchCheck:
    branch: str
    ord_E: object
    ord_M: object
    ord_rho: object
    passed: bool


@dataclass
class PerturbReport:
    original: int
    perturbed: int
    checks: list = field(default_factory=list)
    ni_deltas: list = field(default_factory=list)
    seed: int | None = None
    k_hat: int = DEFAULT_K

    @property
    def growth_ok(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def nondecreasing(self) -> bool:
        return self.perturbed >= self.original

    @property
    def passed(self) -> bool:
        """The asserted property: growth on every good branch implies no drop in deflicity."""
        return self.growth_ok and self.nondecreasing

    def to_json(self) -> dict:
        return {
            "original": self.original, "perturbed": self.perturbed,
            "growth_ok": self.growth_ok, "passed": self.passed, "seed": self.seed,
            "k_hat": self.k_hat,
            "branches": [{"branch": c.branch, "ord_E": _jnum(c.ord_E), "ord_M": _jnum(c.ord_M),
                          "ord_rho": _jnum(c.ord_rho), "passed": c.passed} for c in self.checks],
            "ni_deltas": [{"point": [str(v) for v in pt], "before": b, "after": a}
                          for pt, b, a in self.ni_deltas],
        }


def _jnum(v):
    if v is None:
        return None
    if v == INF:
        return "inf"
    return str(v)


def multiplicity_operator(sys: NiSystem, point: Sequence) -> tuple[Poly, Direction, int]:
    """``M = D_t^lam P_1`` for the first sample direction with finite vanishing order."""
    for t in DIRECTIONS:
        d = Direction(t[: sys.chain.n])
        res = mo_vanish_order(sys.chain, point, sys.P[0], d, sys.k_hat)
        if res.value is not None:
            M = sys.P[0]
            for _ in range(res.value):
                M = sys.chain.directional(M, d.vector)
            return M, d, res.value
    raise NotGenericError("no sampled direction has finite vanishing order")


def _ord(branch, poly: Poly, prob: DeflicityProblem) -> object:
    local, known = prob.local(poly, prob.order)
    try:
        return ord_along_branch(branch, local, known)
    except InconclusiveError:
        return INF


def _sample_offsets(point: Sequence, n: int) -> list[tuple]:
    steps = (Fraction(1, 20), Fraction(-1, 20), Fraction(1, 10))
    out = []
    for a in steps:
        for b in steps[:n - 1] if n > 1 else [None]:
            off = (a,) if b is None else (a, b)
            out.append(tuple(point[i] + off[i] for i in range(n)) + tuple(point[n:]))
    return out


def verify_preservation(sys: NiSystem, Pprime: Sequence[Poly], point: Sequence, Eprime: Poly,
                        seed: int | None = None) -> PerturbReport:
    """Compare deflicities before and after, with the growth condition on each good branch.

    The growth condition is ``ord E' > max(ord M, ord (R - R(p)))`` along every
    good branch of the original set, with ``M`` the multiplicity operator of ``P_1``.
    """
    chain = sys.chain
    if chain.n != 2:
        raise DimensionError("verify_preservation uses branch decomposition and needs n = 2")
    point = tuple(point)
    before = DeflicityProblem(chain, point, sys.P, sys.R)
    after = DeflicityProblem(chain, point, tuple(chain._lift(p) for p in Pprime), sys.R)
    rep0 = deflicity_report(before)
    rep1 = deflicity_report(after)
    M, _, _ = multiplicity_operator(sys, point)
    checks = []
    for br in rep0.branches:
        if br.classification != "good":
            continue
        oE = _ord(br, chain._lift(Eprime), before)
        oM = _ord(br, M, before)
        oR = br.ord
        checks.append(BranchCheck(br.describe(), oE, oM, oR, oE > max(oM, oR)))
    psys = sys.with_P(after.P)
    deltas = []
    for q in _sample_offsets(point, chain.n):
        b, a = ni_member_numeric(sys, q, False), ni_member_numeric(psys, q, False)
        if a != b:
            deltas.append((q, b, a))
    return PerturbReport(rep0.value, rep1.value, checks, deltas, seed, sys.k_hat)


# -- genericity sampling ----------------------------------------------------------------

@dataclass
class SardReport:
    trials: int
    failures: int
    points_checked: int
    seed: int
    adversarial: bool = False
    failing: list = field(default_factory=list)

    @property
    def failure_fraction(self) -> float:
        return self.failures / self.trials if self.trials else 0.0

    def to_json(self) -> dict:
        return {"trials": self.trials, "failures": self.failures,
                "failure_fraction": self.failure_fraction, "points_checked": self.points_checked,
                "seed": self.seed, "adversarial": self.adversarial,
                "failing": [[str(v) for v in q] for q in self.failing[:10]]}


def _points_on(P1: Poly, point: Sequence, radius: float) -> list[tuple]:
    """Real points of ``{P1 = 0}`` near ``point`` (n = 2, no chain variables)."""
    px, py = float(point[0]), float(point[1])
    offsets = (0.03, -0.03, 0.06, -0.06, 0.09)
    if P1.is_zero():
        return [(point[0] + Fraction(a).limit_denominator(100), point[1] + Fraction(b).limit_denominator(100))
                for a in offsets[:3] for b in offsets[:3]]
    solve_axis = 1 if P1.degree_in(1) > 0 else 0
    out = []
    for off in offsets:
        fixed = (px + off) if solve_axis == 1 else (py + off)
        coeffs: dict[int, complex] = {}
        for e, c in P1.items():
            k = e[solve_axis]
            coeffs[k] = coeffs.get(k, 0) + float(c) * fixed ** e[1 - solve_axis]
        deg = max(coeffs)
        poly = [coeffs.get(deg - i, 0.0) for i in range(deg + 1)]
        while len(poly) > 1 and abs(poly[0]) < 1e-14:
            poly = poly[1:]
        if len(poly) <= 1:
            continue
        for r in np.roots(poly):
            if abs(r.imag) > 1e-9:
                continue
            q = (fixed, float(r.real)) if solve_axis == 1 else (float(r.real), fixed)
            if abs(q[0] - px) < radius and abs(q[1] - py) < radius and (q[0], q[1]) != (px, py):
                out.append(q)
    return out


def adversarial_Q(sys: NiSystem, E: Poly) -> tuple[Poly, ...]:
    """``Q_l = -P_l / E^(k+1)``, the excluded choice for which the perturbation cancels ``P``."""
    factor = E ** (sys.k_hat + 1)
    out = []
    for p in sys.P:
        q = exact_divide(p, factor)
        if q is None:
            raise PreconditionError("P is not divisible by the perturbation factor")
        out.append(-q)
    return tuple(out)


def sard_sample(sys: NiSystem, E: Poly, point: Sequence, trials: int = 20, seed: int = 0,
                adversarial: bool = False, radius: float = 0.25) -> SardReport:
    """Check that random perturbations add no non-isolated points near ``point``.

    For each trial a seeded ``Q`` of degree ``n + m`` gives ``P' = P + Q E^(k+1)``;
    points of ``{P'_1 = 0}`` near ``point`` outside the original locus are
    tested with ``ni_member_numeric``.  ``adversarial`` replaces the random
    choice by ``Q = -P/E^(k+1)``.
    """
    chain = sys.chain
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if chain.n != 2 or chain.m != 0:
        raise DimensionError("sard_sample samples curves in the plane (n = 2, m = 0)")
    E = chain._lift(E)
    failures, checked, failing = 0, 0, []
    for trial in range(trials):
        if adversarial:
            Q = adversarial_Q(sys, E)
        else:
            Q = random_Q(chain.arena, len(sys.P), chain.n + chain.m, seed + trial)
        Pp = perturb(sys.P, Q, E, sys.k_hat)
        psys = sys.with_P(Pp)
        bad = False
        for q in _points_on(Pp[0], point, radius):
            if ni_member_numeric(sys, q, False):
                continue
            checked += 1
            if ni_member_numeric(psys, q, False):
                bad = True
                failing.append(q)
        failures += bad
    return SardReport(trials, failures, checked, seed, adversarial, failing)
