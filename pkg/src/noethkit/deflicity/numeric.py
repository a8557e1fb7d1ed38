"""Deflicity by counting the roots that converge to the base point.

For a polynomial family ``F(x, eps)`` the roots of ``F(., eps_j) = 0``
inside a small ball around ``p`` are counted for a few small samples
``eps_j`` and ball radii; the count is accepted only when every sample and
radius gives the same number.  Square systems are solved with numpy's
companion-matrix roots (one variable) or a total-degree homotopy with the
gamma trick (several variables).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..algebra import Arena, Poly
from ..chain import LeafSeries
from ..errors import DimensionError, SolverError, UnstableCountError
from .symbolic import DeflicityProblem

DEFAULT_EPS = (1e-3, 1e-4)
DEFAULT_RADII = (0.1, 0.05)
DIVERGED = 1e7


class CompiledPoly:
    """Vectorized evaluator of a polynomial with numeric coefficients."""

    def __init__(self, exps: np.ndarray, coeffs: np.ndarray):
        self.exps = exps.astype(int)
        self.coeffs = coeffs.astype(complex)
        nvar = self.exps.shape[1] if self.exps.size else 0
        self.nvar = nvar
        self.degree = int(self.exps.sum(axis=1).max()) if len(self.coeffs) else 0
        self._grad = None

    @classmethod
    def from_terms(cls, terms: dict, nvar: int) -> "CompiledPoly":
        items = [(e, complex(c)) for e, c in terms.items() if complex(c) != 0]
        if not items:
            return cls(np.zeros((0, nvar)), np.zeros(0))
        return cls(np.array([e for e, _ in items]), np.array([c for _, c in items]))

    def __call__(self, x: np.ndarray) -> complex:
        if not len(self.coeffs):
            return 0j
        return complex(np.prod(x[None, :] ** self.exps, axis=1) @ self.coeffs)

    def gradient(self, x: np.ndarray) -> np.ndarray:
        if self._grad is None:
            parts = []
            for k in range(self.nvar):
                mask = self.exps[:, k] > 0
                e = self.exps[mask].copy()
                c = self.coeffs[mask] * e[:, k]
                e[:, k] -= 1
                parts.append(CompiledPoly(e, c) if mask.any() else None)
            self._grad = parts
        return np.array([g(x) if g is not None else 0j for g in self._grad])


def _specialize(family: Sequence[Poly], eps_value: complex) -> list[CompiledPoly]:
    """Substitute a numeric ``eps`` and compile over the remaining variables."""
    arena = family[0].arena
    k = arena.index("eps")
    out = []
    for p in family:
        terms: dict = {}
        for e, c in p.items():
            key = e[:k] + e[k + 1:]
            terms[key] = terms.get(key, 0) + complex(c) * eps_value ** e[k]
        out.append(CompiledPoly.from_terms(terms, arena.size - 1))
    return out


# -- solvers -------------------------------------------------------------------

def _univariate_roots(p: CompiledPoly) -> list[np.ndarray]:
    deg = p.degree
    coeffs = np.zeros(deg + 1, dtype=complex)
    for e, c in zip(p.exps[:, 0], p.coeffs):
        coeffs[deg - e] += c
    while len(coeffs) > 1 and coeffs[0] == 0:
        coeffs = coeffs[1:]
    if len(coeffs) <= 1:
        return []
    return [np.array([r]) for r in np.roots(coeffs)]


@dataclass
class _Tracker:
    target: list
    start_degrees: list
    gamma: complex
    max_step: float = 0.02
    min_step: float = 1e-9

    def H(self, x, t):
        g = np.array([x[i] ** d - 1 for i, d in enumerate(self.start_degrees)])
        f = np.array([p(x) for p in self.target])
        return (1 - t) * self.gamma * g + t * f

    def Hx(self, x, t):
        n = len(x)
        jg = np.diag([d * x[i] ** (d - 1) for i, d in enumerate(self.start_degrees)])
        jf = np.array([p.gradient(x) for p in self.target]).reshape(n, n)
        return (1 - t) * self.gamma * jg + t * jf

    def Ht(self, x, t):
        g = np.array([x[i] ** d - 1 for i, d in enumerate(self.start_degrees)])
        f = np.array([p(x) for p in self.target])
        return f - self.gamma * g

    def velocity(self, x, t):
        return np.linalg.solve(self.Hx(x, t), -self.Ht(x, t))

    def correct(self, x, t, iters=6, tol=1e-11):
        for _ in range(iters):
            dx = np.linalg.solve(self.Hx(x, t), -self.H(x, t))
            x = x + dx
            if np.linalg.norm(dx) <= tol * (1 + np.linalg.norm(x)):
                return x, True
        return x, False

    def track(self, x0):
        x, t, h = np.array(x0, dtype=complex), 0.0, self.max_step / 4
        while t < 1.0:
            h = min(h, 1.0 - t)
            try:
                k1 = self.velocity(x, t)
                k2 = self.velocity(x + h / 2 * k1, t + h / 2)
                k3 = self.velocity(x + h / 2 * k2, t + h / 2)
                k4 = self.velocity(x + h * k3, t + h)
                pred = x + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
                new, ok = self.correct(pred, t + h)
                ok = ok and np.linalg.norm(new - pred) < 0.1 * (1 + np.linalg.norm(x))
            except np.linalg.LinAlgError:
                ok = False
            if ok:
                x, t = new, t + h
                h = min(h * 1.5, self.max_step)
                if np.linalg.norm(x) > DIVERGED:
                    return None
            else:
                h /= 2
                if h < self.min_step:
                    return None if np.linalg.norm(x) > 1e3 else _polish(self.target, x)
        return _polish(self.target, x)


def _polish(target, x, iters=20):
    for _ in range(iters):
        f = np.array([p(x) for p in target])
        j = np.array([p.gradient(x) for p in target]).reshape(len(x), len(x))
        try:
            dx = np.linalg.lstsq(j, -f, rcond=None)[0]
        except np.linalg.LinAlgError:  # pragma: no cover
            break
        x = x + dx
        if np.linalg.norm(dx) < 1e-14 * (1 + np.linalg.norm(x)):
            break
    return x


def solve_square(system: Sequence[CompiledPoly], seed: int = 0) -> list[np.ndarray]:
    """All finite isolated roots of a square polynomial system (numerically)."""
    n = len(system)
    if n == 0 or any(p.nvar != n for p in system):
        raise DimensionError("system must be square")
    if n == 1:
        return _univariate_roots(system[0])
    degrees = [max(p.degree, 1) for p in system]
    rng = np.random.default_rng(seed)
    angle = rng.uniform(0, 2 * np.pi)
    tracker = _Tracker(list(system), degrees, complex(np.cos(angle), np.sin(angle)))
    starts = np.array(np.meshgrid(*[np.exp(2j * np.pi * np.arange(d) / d) for d in degrees],
                                  indexing="ij")).reshape(n, -1).T
    roots = []
    for x0 in starts:
        end = tracker.track(x0)
        if end is not None:
            resid = max(abs(p(end)) for p in system)
            if resid < 1e-6 * (1 + np.linalg.norm(end)) ** max(degrees):
                roots.append(end)
    return roots


@dataclass
class Cluster:
    center: np.ndarray
    size: int


def cluster_roots(roots: Sequence[np.ndarray], ball: float = 1e-8) -> list[Cluster]:
    """Group roots lying within ``10 * ball`` of each other (single linkage)."""
    clusters: list[list[np.ndarray]] = []
    for r in roots:
        for cl in clusters:
            if min(np.linalg.norm(r - c) for c in cl) <= 10 * ball * (1 + np.linalg.norm(r)):
                cl.append(r)
                break
        else:
            clusters.append([r])
    return [Cluster(np.mean(cl, axis=0), len(cl)) for cl in clusters]


@dataclass
class NumericCount:
    value: int
    counts: dict = field(default_factory=dict)  # (eps, radius) -> count
    clusters: dict = field(default_factory=dict)


def count_near(family: Sequence[Poly], point: Sequence, eps_samples=DEFAULT_EPS,
               radii=DEFAULT_RADII, seed: int = 0, max_samples: int = 6) -> NumericCount:
    """Stabilized root count near ``point``.

    When the given samples disagree, the geometric sequence of ``eps`` values
    is continued (up to ``max_samples`` values) and the two smallest samples
    must agree at every radius.
    """
    p = np.array([complex(v) for v in point])
    samples = list(eps_samples)
    ratio = samples[-1] / samples[-2] if len(samples) > 1 else 0.1
    counts, clusters = {}, {}

    def run(eps):
        system = _specialize(family, eps)
        cl = cluster_roots(solve_square(system, seed))
        clusters[eps] = [(c.center.tolist(), c.size) for c in cl]
        for r in radii:
            counts[(eps, r)] = sum(c.size for c in cl if np.linalg.norm(c.center - p) < r)

    for eps in samples:
        run(eps)
    while True:
        tail = samples[-2:] if len(samples) > 1 else samples
        values = {counts[(e, r)] for e in tail for r in radii}
        if len(values) == 1:
            return NumericCount(values.pop(), counts, clusters)
        if len(samples) >= max_samples:
            raise UnstableCountError(f"root counts disagree across samples: {counts}")
        samples.append(samples[-1] * ratio)
        run(samples[-1])


def deflicity_numeric(family: Sequence[Poly], point: Sequence, eps_samples=DEFAULT_EPS,
                      radii=DEFAULT_RADII, seed: int = 0) -> int:
    """Number of roots of ``family(., eps)`` converging to ``point`` as ``eps -> 0``.

    ``family`` lives in an arena ``x1..xn, eps``; ``point`` gives the x-coordinates.
    """
    if "eps" not in family[0].arena:
        raise DimensionError("family polynomials must contain the parameter eps")
    if len(family) != family[0].arena.size - 1:
        raise DimensionError("family must be square in the x-variables")
    return count_near(family, point, eps_samples, radii, seed).value


# -- Noetherian sets, through jets ------------------------------------------------

def polynomialize(prob: DeflicityProblem, order: int) -> tuple[list[Poly], tuple]:
    """The family ``(P, R - R(p) - eps)`` in local coordinates, P and R replaced by jets."""
    n = prob.chain.n
    arena = Arena(tuple(f"x{i}" for i in range(1, n + 1)) + ("eps",))

    def local(p: Poly) -> Poly:
        if prob.chain.m == 0:
            terms = dict(p.shift(prob.point).items())
        else:
            terms = LeafSeries(prob.chain, prob.point, p).coefficients(order)
        return Poly(arena, {e + (0,): c for e, c in terms.items()})

    eps = Poly.var(arena, "eps")
    family = [local(p) for p in prob.P] + [local(prob.rho) - eps]
    return family, (0,) * n


def deflicity_numeric_set(prob: DeflicityProblem, eps_samples=DEFAULT_EPS, radii=DEFAULT_RADII,
                          seed: int = 0, max_order: int = 24) -> int:
    """Deflicity of a Noetherian set via the family ``R - R(p) = eps``.

    Polynomial inputs are used as they are; otherwise jets of increasing order
    are tried until two consecutive orders give the same count.
    """
    if prob.chain.m == 0:
        fam, pt = polynomialize(prob, 0)
        return deflicity_numeric(fam, pt, eps_samples, radii, seed)
    order, prev = max(prob.order, 4), None
    while order <= max_order:
        fam, pt = polynomialize(prob, order)
        try:
            value = deflicity_numeric(fam, pt, eps_samples, radii, seed)
        except (UnstableCountError, SolverError):
            value = None
        if value is not None and value == prev:
            return value
        prev = value
        order += 4
    raise UnstableCountError(f"jet polynomialization did not stabilize by order {max_order}")
