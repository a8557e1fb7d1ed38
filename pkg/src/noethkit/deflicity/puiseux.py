"""Newton–Puiseux expansion of plane curve germs given by (truncated) series.

A germ ``F(x, y) = 0`` at the origin is split into branches
``x = s^r, y = sum c_k s^k`` (plus the vertical branch ``x = 0``), each with
the multiplicity of the corresponding factor of ``F``.

Truncation is tracked explicitly: a series is *known* on the region
``wx*i + wy*j < P`` of exponents ``(i, j)``.  Every substitution updates the
region, and the expansion only draws conclusions from known terms.  Exact
polynomial input uses ``P = inf``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

import gmpy2
import mpmath
import sympy

from ..algebra.scalar import GaussianRational
from ..errors import InconclusiveError

INF = math.inf
NUMERIC_DPS = 50
_TOL = mpmath.mpf(10) ** -30

Series2 = dict  # (i, j) -> coefficient


def is_zero(v) -> bool:
    if isinstance(v, (mpmath.mpf, mpmath.mpc, complex, float)):
        return abs(v) < _TOL
    return v == 0


def is_exact_value(v) -> bool:
    return isinstance(v, (int, Fraction, GaussianRational))


@dataclass
class Branch:
    """One irreducible curve germ, parametrized in local coordinates.

    ``x_series`` and ``y_series`` map exponents of the uniformizing parameter
    ``s`` to coefficients; the parametrization is known for exponents below
    ``precision`` (``inf`` when it is exact).
    """

    x_series: dict
    y_series: dict
    ramification: int
    multiplicity: int
    precision: float = INF
    resolved: bool = True
    dimension: int = 1
    classification: str = "undetermined"
    ord: Fraction | None = None

    @property
    def vertical(self) -> bool:
        return not self.x_series

    @property
    def exact(self) -> bool:
        return all(is_exact_value(c) for c in self.y_series.values())

    @property
    def puiseux_exponents(self) -> list[Fraction]:
        """Exponents of ``y`` as a series in ``x`` (``y = sum c x^lambda``)."""
        if self.vertical:
            return []
        return [Fraction(e, self.ramification) for e in sorted(self.y_series)]

    def signature(self) -> tuple:
        return (self.vertical, self.ramification, self.multiplicity, self.dimension,
                self.classification, self.ord)

    def describe(self) -> str:
        if self.dimension > 1:
            return "two-dimensional component"
        if self.vertical:
            return "x = 0"
        terms = " + ".join(f"{_cstr(c)}*x^{Fraction(e, self.ramification)}"
                           for e, c in sorted(self.y_series.items())) or "0"
        return f"y = {terms}"


def _cstr(c) -> str:
    if isinstance(c, (mpmath.mpf, mpmath.mpc)):
        return mpmath.nstr(c, 12)
    return str(c)


# -- roots of edge polynomials -------------------------------------------------

def _rational_qth_root(u: Fraction, q: int):
    if q == 1:
        return u
    sign = 1
    if u < 0:
        if q % 2 == 0:
            if q == 2:
                r = _rational_qth_root(-u, 2)
                return GaussianRational(0, r) if r is not None else None
            return None
        sign, u = -1, -u
    num, ok1 = gmpy2.iroot(u.numerator, q)
    den, ok2 = gmpy2.iroot(u.denominator, q)
    if ok1 and ok2:
        return sign * Fraction(int(num), int(den))
    return None


def _to_mp(v):
    if isinstance(v, GaussianRational):
        return mpmath.mpc(mpmath.mpf(v.re.numerator) / v.re.denominator,
                          mpmath.mpf(v.im.numerator) / v.im.denominator)
    if isinstance(v, Fraction):
        return mpmath.mpf(v.numerator) / v.denominator
    if isinstance(v, int):
        return mpmath.mpf(v)
    return v


def _numeric_roots(coeffs_low_to_high: list) -> list[tuple[object, int]]:
    """Roots with multiplicities of a polynomial with numeric coefficients."""
    with mpmath.workdps(NUMERIC_DPS):
        cs = [_to_mp(c) for c in reversed(coeffs_low_to_high)]
        while cs and is_zero(cs[0]):
            cs.pop(0)
        if len(cs) <= 1:
            return []
        roots = mpmath.polyroots(cs, maxsteps=400, extraprec=400)
    clusters: list[list] = []
    for r in roots:
        for cl in clusters:
            if abs(cl[0] - r) < mpmath.mpf(10) ** -8:
                cl.append(r)
                break
        else:
            clusters.append([r])
    return [(sum(cl) / len(cl), len(cl)) for cl in clusters]


def edge_roots(coeffs_low_to_high: list) -> list[tuple[object, int]]:
    """Nonzero roots (with multiplicity) of ``sum coeffs[k] u^k``.

    Rational coefficients are factored over Q: linear factors give exact
    roots, quadratics with Gaussian-rational roots stay exact, anything else
    is solved numerically.
    """
    if all(isinstance(c, (int, Fraction)) for c in coeffs_low_to_high):
        u = sympy.Symbol("u")
        poly = sum(sympy.Rational(c.numerator, c.denominator) * u**k
                   for k, c in enumerate(map(Fraction, coeffs_low_to_high)))
        _, factors = sympy.factor_list(poly, u)
        out = []
        for fac, mult in factors:
            coeffs = [Fraction(int(c.p), int(c.q)) for c in sympy.Poly(fac, u).all_coeffs()]
            deg = len(coeffs) - 1
            if deg == 0:
                continue
            if deg == 1:
                root = -coeffs[1] / coeffs[0]
                if root != 0:
                    out.append((root, mult))
                continue
            if deg == 2:
                a, b, c = coeffs
                disc = b * b - 4 * a * c
                if disc < 0:
                    s = _rational_qth_root(-disc, 2)
                    if s is not None:
                        for sign in (1, -1):
                            out.append((GaussianRational(-b / (2 * a), sign * s / (2 * a)), mult))
                        continue
            for root, m2 in _numeric_roots(list(reversed(coeffs))):
                out.append((root, mult * m2))
        return out
    roots = _numeric_roots(list(coeffs_low_to_high))
    return [(r, m) for r, m in roots if not is_zero(r)]


def _qth_root(u, q: int):
    if isinstance(u, Fraction):
        r = _rational_qth_root(u, q)
        if r is not None:
            return r
    if isinstance(u, GaussianRational) and q == 1:
        return u
    with mpmath.workdps(NUMERIC_DPS):
        return mpmath.root(_to_mp(u), q)


# -- expansion -------------------------------------------------------------

@dataclass
class _State:
    rx: int = 1                      # x_orig = s^rx
    yterms: dict = field(default_factory=dict)
    ry: int = 0                      # y_orig = yterms + s^ry * y_cur


def _known(F: Series2, wx, wy, P) -> Series2:
    return {e: c for e, c in F.items() if wx * e[0] + wy * e[1] < P and not is_zero(c)}


def _lower_hull(points: dict, w: int, a0: int):
    """Edges ``(start, end, p, q)`` of the Newton polygon from ``(0, w)`` to ``(a0, 0)``."""
    edges = []
    cur = (0, w)
    while cur[1] > 0:
        best = None
        for (i, j) in points:
            if j >= cur[1]:
                continue
            slope = Fraction(i - cur[0], cur[1] - j)
            if best is None or slope < best[0] or (slope == best[0] and j < best[1][1]):
                best = (slope, (i, j))
        slope, nxt = best
        edges.append((cur, nxt, slope.numerator, slope.denominator))
        cur = nxt
    return edges


def _substitute(F: Series2, q: int, p: int, c, L: int, P_new) -> Series2:
    """``s^-L F(s^q, s^p (c + y1))`` restricted to s-exponents below ``P_new``."""
    numeric = not is_exact_value(c)
    out: dict = {}
    for (i, j), a in F.items():
        if numeric:
            a = _to_mp(a)
        base = i * q + j * p - L
        if base >= P_new:
            continue
        for k in range(j + 1):
            coef = a * comb(j, k) * (c ** (j - k) if j - k else 1)
            key = (base, k)
            out[key] = out.get(key, 0) + coef
    return {e: v for e, v in out.items() if not is_zero(v)}


def _new_precision(P, wx, wy, p, q, L):
    if P == INF:
        return INF
    factors = [Fraction(q, 1) / wx if wx else INF, Fraction(p, 1) / wy if wy else INF]
    return min(factors) * P - L


def _emit(state: _State, y_cur_zero: bool, multiplicity: int, P_cur, resolved=True) -> Branch:
    if y_cur_zero:
        # y_cur vanishes on the known region only
        prec = INF if P_cur == INF else state.ry + P_cur
    else:
        prec = state.ry + min(1, P_cur)
    return Branch({state.rx: Fraction(1)}, dict(state.yterms), state.rx, multiplicity,
                  prec, resolved)


def _expand(F: Series2, wx, wy, P, state: _State, target: int, out: list, depth=0):
    if depth > 4 * target + 50:  # pragma: no cover - guarded by precision/target
        raise InconclusiveError("Puiseux recursion did not terminate", target)
    known = _known(F, wx, wy, P)
    if not known:
        raise InconclusiveError("series vanishes on its known region", target)
    b = min(j for _, j in known)
    if b > 0:
        out.append(_emit(state, True, b, P))
        known = {(i, j - b): c for (i, j), c in known.items()}
        F = {(i, j - b): c for (i, j), c in F.items() if j >= b}
        if wy:
            P = P - wy * b
    w_candidates = [j for (i, j) in known if i == 0]
    if not w_candidates:
        raise InconclusiveError("Weierstrass degree undetermined at this order", target)
    w = min(w_candidates)
    if w == 0:
        return
    if state.ry >= target or P <= 0:
        out.append(_emit(state, False, w, P, resolved=(w == 1)))
        return
    a0 = min(i for (i, j) in known if j == 0)
    hull_pts = {e: c for e, c in known.items() if e[1] <= w}
    for start, end, p, q in _lower_hull(hull_pts, w, a0):
        L = start[0] * q + start[1] * p
        j_end = end[1]
        coeffs = [0] * ((start[1] - j_end) // q + 1)
        for (i, j), a in hull_pts.items():
            if i * q + j * p == L:
                coeffs[(j - j_end) // q] += a
        for u, mu in edge_roots(coeffs):
            c = _qth_root(u, q)
            P_new = _new_precision(P, wx, wy, p, q, L)
            G = _substitute(F, q, p, c, L, P_new)
            new_state = _State(state.rx * q,
                               {**{e * q: v for e, v in state.yterms.items()}, state.ry * q + p: c},
                               state.ry * q + p)
            _expand(G, 1, 0, P_new, new_state, target, out, depth + 1)


@dataclass
class Decomposition:
    branches: list
    weierstrass: int
    order: int
    exact: bool


def newton_puiseux(F: Series2, order: int | float, target: int) -> Decomposition:
    """Branches of ``F = 0`` at the origin.

    ``F`` is known for total degree ``<= order`` (``inf`` for exact input);
    parametrizations are developed at least to ``s``-exponent ``target``.
    """
    with mpmath.workdps(NUMERIC_DPS):
        return _newton_puiseux(F, order, target)


def _newton_puiseux(F: Series2, order, target: int) -> Decomposition:
    P = order + 1 if order != INF else INF
    known = _known(F, 1, 1, P)
    if not known:
        return Decomposition([Branch({}, {}, 1, 1, dimension=2, resolved=False)], 0, order, order == INF)
    if (0, 0) in known:
        return Decomposition([], 0, order, order == INF)
    branches: list[Branch] = []
    a = min(i for i, _ in known)
    if a > 0:
        branches.append(Branch({}, {1: Fraction(1)}, 1, a, INF if P == INF else P - a))
        F = {(i - a, j): c for (i, j), c in F.items() if i >= a}
        P = P - a
        known = _known(F, 1, 1, P)
    w = min(j for (i, j) in known if i == 0)
    rest: list[Branch] = []
    _expand(F, 1, 1, P, _State(), target, rest)
    total = sum(br.multiplicity * br.ramification for br in rest)
    if total != w:
        raise InconclusiveError(f"branch count {total} does not match Weierstrass degree {w}", order)
    return Decomposition(branches + rest, w, order, order == INF)


# -- univariate series helpers --------------------------------------------------

def _series_mul(a: dict, b: dict, T) -> dict:
    out: dict = {}
    for e1, c1 in a.items():
        for e2, c2 in b.items():
            e = e1 + e2
            if e < T:
                out[e] = out.get(e, 0) + c1 * c2
    return {e: c for e, c in out.items() if not is_zero(c)}


def _series_pow(a: dict, k: int, T) -> dict:
    out = {0: Fraction(1)}
    for _ in range(k):
        out = _series_mul(out, a, T)
    return out


def compose_on_branch(g: Series2, g_order, branch: Branch, limit: int) -> tuple[dict, float]:
    """``g(x(s), y(s))`` as an ``s``-series, with the exponent bound below which it is exact.

    ``g`` maps ``(i, j)`` to coefficients and is known for ``i + j <= g_order``.
    """
    with mpmath.workdps(NUMERIC_DPS):
        return _compose_on_branch(g, g_order, branch, limit)


def _compose_on_branch(g, g_order, branch, limit):
    if branch.vertical:
        xs, ys = {}, {1: Fraction(1)}
        T = g_order + 1 if g_order != INF else INF
    else:
        xs, ys = branch.x_series, branch.y_series
        r = branch.ramification
        T = min(branch.precision, r * (g_order + 1) if g_order != INF else INF)
    if T == INF:
        deg = max((i + j for i, j in g), default=0)
        ymax = max(ys, default=1)
        T = max(1, deg * max(branch.ramification, ymax)) + 1
        exact_all = True
    else:
        exact_all = False
    T_eval = min(T, limit) if not exact_all else T
    out: dict = {}
    xp = {0: {0: Fraction(1)}}
    yp = {0: {0: Fraction(1)}}
    for (i, j), c in g.items():
        if i not in xp:
            xp[i] = _series_pow(xs, i, T_eval) if xs else ({} if i else {0: Fraction(1)})
        if j not in yp:
            yp[j] = _series_pow(ys, j, T_eval)
        term = _series_mul(xp[i], yp[j], T_eval)
        for e, v in term.items():
            out[e] = out.get(e, 0) + c * v
    out = {e: v for e, v in out.items() if not is_zero(v)}
    return out, (INF if exact_all else T_eval)


def series_order(series: dict, bound) -> int | None:
    """Lowest exponent with a nonzero coefficient below ``bound``; ``None`` if none."""
    hits = [e for e, v in series.items() if e < bound and not is_zero(v)]
    return min(hits) if hits else None


def evaluate_branch(branch: Branch, s: complex) -> tuple[complex, complex]:
    """Numeric point of the (truncated) parametrization at parameter ``s``."""
    x = sum(complex(_to_mp(c)) * s**e for e, c in branch.x_series.items())
    y = sum(complex(_to_mp(c)) * s**e for e, c in branch.y_series.items())
    return x, y
