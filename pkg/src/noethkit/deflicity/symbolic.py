"""Deflicity by branch decomposition (n <= 2).

The deflicity of ``X = {P = 0}`` with respect to ``R`` at ``p`` is the sum,
over the one-dimensional components of ``X`` on which ``R`` is not
constant, of ``multiplicity * ord(R - R(p))``; orders are taken in the
uniformizing parameter of each branch.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import mpmath
import numpy as np

from ..algebra import Arena, Poly
from ..chain import Chain, LeafSeries
from ..errors import DimensionError, InconclusiveError, PreconditionError
from ..local_mult import mult_univariate
from .puiseux import (INF, Branch, compose_on_branch, evaluate_branch, is_zero,
                      newton_puiseux, series_order)

DEFAULT_ORDER = 8
MAX_ORDER = 64


@dataclass
class DeflicityProblem:
    """``X = {P_1 = ... = P_(n-1) = 0}`` on the leaf through ``point``, and the function ``R``."""

    chain: Chain
    point: tuple
    P: tuple
    R: Poly
    order: int = DEFAULT_ORDER

    def __post_init__(self):
        self.point = tuple(self.point)
        self.P = tuple(self.chain._lift(p) for p in self.P)
        self.R = self.chain._lift(self.R)
        if len(self.P) != self.chain.n - 1:
            raise DimensionError(f"need {self.chain.n - 1} equations, got {len(self.P)}")
        if len(self.point) != self.chain.arena.size:
            raise DimensionError("point does not match the chain's arena")
        for i, p in enumerate(self.P, start=1):
            if not is_zero(p.eval(self.point)):
                raise PreconditionError(f"P_{i} does not vanish at the base point")

    @property
    def rho(self) -> Poly:
        """``R - R(p)``."""
        return self.R - self.R.eval(self.point)

    def local(self, p: Poly, order: int) -> tuple[dict, float]:
        """Taylor data of ``p`` on the leaf, in local axis coordinates, and its known order."""
        if self.chain.m == 0:
            shifted = p.shift(self.point)
            return dict(shifted.items()), INF
        return LeafSeries(self.chain, self.point, p).coefficients(order), order


@dataclass
class DeflicityResult:
    value: int
    branches: list = field(default_factory=list)
    order: int = 0
    method: str = "branches"


def _signature(branches: Sequence[Branch]) -> list:
    return sorted(b.signature() for b in branches)


def _decompose_at(prob: DeflicityProblem, order: int) -> list[Branch]:
    F, known = prob.local(prob.P[0], order)
    return newton_puiseux(F, known, order).branches


def branch_decompose(prob: DeflicityProblem, max_order: int = MAX_ORDER) -> list[Branch]:
    """Branches of ``{P_1 = 0}`` on the leaf; empty for ``n = 1``.

    Exact (polynomial) input is decomposed once; otherwise the decomposition
    at orders ``N`` and ``2N`` must agree.
    """
    n = prob.chain.n
    if n == 1:
        return []
    if n > 2:
        raise DimensionError("symbolic branch decomposition needs n <= 2")
    order = prob.order
    prev = None
    while order <= max_order:
        branches = _decompose_at(prob, order)
        if prob.chain.m == 0:
            return branches
        sig = _signature(branches)
        if prev is not None and sig == prev:
            return branches
        prev = sig
        order *= 2
    raise InconclusiveError(f"branch decomposition not stabilized at order {max_order}", max_order)


def ord_along_branch(branch: Branch, g, g_order=INF, limit: int = 256) -> Fraction:
    """Order of ``g`` along ``branch`` in the uniformizing parameter.

    ``g`` is a local series ``{(i, j): c}`` (or a two-variable Poly in local
    coordinates) known through total degree ``g_order``.
    """
    if isinstance(g, Poly):
        g = dict(g.items())
    series, bound = compose_on_branch(g, g_order, branch, limit)
    k = series_order(series, bound)
    if k is None:
        raise InconclusiveError(f"function vanishes along the branch through order {bound}",
                                None if bound == INF else int(bound))
    return Fraction(k)


def ord_slope_estimate(branch: Branch, g: Poly | dict,
                       samples: Sequence[float] = (1e-2, 1e-3, 1e-4, 1e-5)) -> float:
    """Least-squares slope of ``log|g(gamma(s))|`` against ``log s`` (a numeric cross-check)."""
    if isinstance(g, Poly):
        g = dict(g.items())
    xs, ys = [], []
    with mpmath.workdps(40):
        for s in samples:
            x, y = evaluate_branch(branch, mpmath.mpf(s))
            val = sum(mpmath.mpc(complex(c)) * mpmath.mpc(x) ** i * mpmath.mpc(y) ** j
                      for (i, j), c in g.items())
            xs.append(math.log(s))
            ys.append(float(mpmath.log(abs(val))))
    return float(np.polyfit(xs, ys, 1)[0])


def classify_branches(branches: Sequence[Branch], R: Poly, prob: DeflicityProblem,
                      order: int | None = None) -> list[Branch]:
    """Mark each branch good (finite order of ``R - R(p)``), bad, or undetermined."""
    order = prob.order if order is None else order
    rho, known = prob.local(R - R.eval(prob.point), order)
    out = []
    for br in branches:
        br = Branch(**{**br.__dict__})
        if br.dimension > 1:
            br.classification, br.ord = "bad", None
        else:
            try:
                br.ord = ord_along_branch(br, rho, known)
                br.classification = "good"
            except InconclusiveError as exc:
                br.ord = None
                exact = known == INF and br.precision == INF
                br.classification = "bad" if exact else "undetermined"
                if not exact and exc.order is None:
                    br.classification = "bad"
        out.append(br)
    return out


def deflicity_symbolic(prob: DeflicityProblem, max_order: int = MAX_ORDER) -> int:
    return deflicity_report(prob, max_order).value


def deflicity_report(prob: DeflicityProblem, max_order: int = MAX_ORDER) -> DeflicityResult:
    """Sum of ``multiplicity * ord(R - R(p))`` over good branches, stabilized under order doubling."""
    n = prob.chain.n
    if n == 1:
        res = mult_univariate(prob.chain, prob.point, prob.rho, max_order)
        if res.value is None:
            raise InconclusiveError("R - R(p) vanishes on the leaf through the working order", max_order)
        return DeflicityResult(res.value, [], res.order, "univariate")
    if n > 2:
        raise DimensionError("symbolic deflicity needs n <= 2; use deflicity_numeric")
    order = prob.order
    prev = None
    while order <= max_order:
        branches = classify_branches(_decompose_at(prob, order), prob.R, prob, order)
        sig = _signature(branches)
        settled = all(b.classification != "undetermined" for b in branches)
        exact = prob.chain.m == 0 and all(b.precision == INF or b.classification == "good"
                                          for b in branches)
        if settled and (exact or sig == prev):
            value = sum(b.multiplicity * int(b.ord) for b in branches if b.classification == "good")
            return DeflicityResult(value, branches, order)
        if prev is not None and sig == prev and not settled:
            # vanishing persisted through a doubling: treat the branch as bad
            for b in branches:
                if b.classification == "undetermined":
                    b.classification = "bad"
            value = sum(b.multiplicity * int(b.ord) for b in branches if b.classification == "good")
            return DeflicityResult(value, branches, order)
        prev = sig
        order *= 2
    raise InconclusiveError(f"deflicity not stabilized at order {max_order}", max_order)


# -- families -------------------------------------------------------------------

def family_arena(n: int) -> Arena:
    return Arena.chain(n, 0, eps=True)


def eliminate_linear(polys: Sequence[Poly], keep: str = "eps") -> tuple[list[Poly], list[str]]:
    """Solve away variables that some equation determines linearly.

    An equation ``c*x_k + h`` with ``c`` a nonzero constant and ``h`` free of
    ``x_k`` is a graph over the other variables, so substituting
    ``x_k = -h/c`` preserves the local structure of the zero set.
    Returns the remaining equations and variables.
    """
    polys = list(polys)
    arena = polys[0].arena
    names = list(arena.names)
    changed = True
    while changed:
        changed = False
        for idx, p in enumerate(polys):
            for var in names:
                if var == keep:
                    continue
                k = arena.index(var)
                if p.degree_in(k) != 1:
                    continue
                c = p.diff(k)
                if not c.is_constant():
                    continue
                h = p - Poly.var(arena, k) * c.constant_term()
                if h.degree_in(k) > 0:
                    continue
                image = -h / c.constant_term()
                images = [image if i == k else Poly.var(arena, i) for i in range(arena.size)]
                polys = [q.compose(images) for j, q in enumerate(polys) if j != idx]
                names.remove(var)
                changed = True
                break
            if changed:
                break
    return polys, names


def deflicity_family_symbolic(family: Sequence[Poly], point: Sequence, order: int = DEFAULT_ORDER) -> int:
    """Deflicity of a polynomial family ``F(x, eps) = 0`` at ``(point, 0)``.

    The family is the set ``{F = 0}`` in ``(x, eps)``-space with ``R = eps``.
    After linear elimination it must be a plane curve, or a space curve in
    triangular form (one equation free of one of the two x-variables).
    """
    arena = family[0].arena
    base = {name: v for name, v in zip([n for n in arena.names if n != "eps"], point)}
    polys, names = eliminate_linear(family)
    if len(names) == 3 and len(polys) == 2:
        return _deflicity_triangular(polys, names, base)
    if len(names) != 2 or len(polys) != 1:
        raise DimensionError("family does not reduce to a plane or triangular space curve; "
                             "use deflicity_numeric")
    plane = Chain(2, 0, [[], []], axis_names=tuple(names))
    images = [Poly.var(plane.arena, names.index(nm)) if nm in names else Poly.zero(plane.arena)
              for nm in arena.names]
    P1 = polys[0].compose(images)
    pt = tuple(base.get(nm, 0) for nm in names)
    R = Poly.var(plane.arena, names.index("eps"))
    return deflicity_symbolic(DeflicityProblem(plane, pt, (P1,), R, order))


def _local_terms(p: Poly, names: Sequence[str], base: dict, order: Sequence[str]) -> dict:
    """Terms of ``p`` shifted to the base point, exponents listed in ``order``."""
    arena = p.arena
    shift = [base.get(nm, 0) if nm in base else 0 for nm in arena.names]
    q = p.shift(shift)
    idx = [arena.index(nm) for nm in order]
    out: dict = {}
    for e, c in q.items():
        if any(e[k] for k in range(arena.size) if k not in idx):
            continue
        key = tuple(e[k] for k in idx)
        out[key] = out.get(key, 0) + c
    return {k: v for k, v in out.items() if v != 0}


def _deflicity_triangular(polys: list[Poly], names: list[str], base: dict,
                          max_target: int = 64) -> int:
    """Nested Newton-Puiseux for a space curve ``{F1(a, eps) = 0, F2(a, b, eps) = 0}``.

    Branches of ``F1`` in the ``(a, eps)`` plane are substituted into ``F2``;
    each branch of the resulting germ in ``(s, b)`` is a branch of the space
    curve, with multiplicity the product of the two multiplicities.
    """
    arena = polys[0].arena
    xs = [nm for nm in names if nm != "eps"]
    setup = None
    for i, F in enumerate(polys):
        used = {nm for nm in F.variables()}
        for a, b in (xs, xs[::-1]):
            if b not in used:
                setup = (F, polys[1 - i], a, b)
                break
        if setup:
            break
    if setup is None:
        raise DimensionError("space curve is not triangular; use deflicity_numeric")
    F1, F2, a, b = setup
    for nm in names:
        if nm not in arena.names:  # pragma: no cover - names come from the arena
            raise DimensionError(nm)
    plane = _local_terms(F1, names, base, (a, "eps"))
    two = {}
    for e, c in _local_terms(F2, names, base, (a, "eps", b)).items():
        two.setdefault(e[2], {})[(e[0], e[1])] = c
    target = 8
    while target <= max_target:
        try:
            return _triangular_at(plane, two, target)
        except InconclusiveError:
            target *= 2
    raise InconclusiveError(f"nested branch expansion not settled at target {max_target}", max_target)


def _triangular_at(plane: dict, two: dict, target: int) -> int:
    total = 0
    for beta in newton_puiseux(plane, INF, target).branches:
        if beta.dimension > 1:
            raise DimensionError("first equation vanishes identically near the point")
        eps_s = {1: Fraction(1)} if beta.vertical else dict(beta.y_series)
        eps_bound = INF if beta.vertical else beta.precision
        ord_s = series_order(eps_s, eps_bound)
        G: dict = {}
        known = INF
        for k, coeff in two.items():
            series, bound = compose_on_branch(coeff, INF, beta, 4 * target)
            known = min(known, bound)
            for e, v in series.items():
                G[(e, k)] = G.get((e, k), 0) + v
        G = {key: v for key, v in G.items() if not is_zero(v)}
        g_order = known - 1 if known != INF else INF
        for gamma in newton_puiseux(G, g_order, target).branches:
            if gamma.dimension > 1:
                raise DimensionError("second equation vanishes along a branch of the first")
            if gamma.vertical or ord_s is None:
                continue  # eps is constant along this branch
            if not gamma.resolved:
                raise InconclusiveError("unresolved branch", target)
            total += beta.multiplicity * gamma.multiplicity * ord_s * gamma.ramification
    return total
