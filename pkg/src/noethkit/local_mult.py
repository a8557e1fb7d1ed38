"""Local multiplicity of isolated zeros of Noetherian functions.

``mult_isolated`` works with the Macaulay dual space of the jet ideal: for
``I`` generated by the jets of ``psi_1..psi_n`` at the base point,

    D_t = dim C[x] / (I + m^(t+1))

is nondecreasing in ``t``.  Once ``D_t == D_(t+1)`` we have
``m^(t+1) ⊆ I + m^(t+2)``, so by Nakayama ``m^(t+1)`` lies in the local
ideal and ``D_t`` is the multiplicity.  The ranks are computed over the
rationals by sparse elimination (numeric points fall back to an SVD rank).

The one-dimensional restriction operators ``D_t^j = (sum_i t_i V_i)^j``
realize multiplicity operators along a line.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .algebra import Poly
from .algebra.scalar import is_exact
from .chain import Chain, LeafPoint, LeafSeries, _multi_indices
from .errors import DimensionError, PreconditionError

DEFAULT_CAP = 64


@dataclass(frozen=True)
class MultResult:
    """A multiplicity, or ``value=None`` when undecided through ``order``."""

    value: int | None
    order: int

    @property
    def is_marker(self) -> bool:
        return self.value is None

    def __str__(self):
        return str(self.value) if self.value is not None else f">= {self.order} (undecided)"


@dataclass(frozen=True)
class Direction:
    """A line through the base point, spanned by ``vector``."""

    vector: tuple

    def __init__(self, vector: Sequence):
        vec = tuple(Fraction(v) if isinstance(v, int) else v for v in vector)
        if not vec or all(v == 0 for v in vec):
            raise ValueError("direction vector must be nonzero")
        object.__setattr__(self, "vector", vec)

    def __len__(self):
        return len(self.vector)

    def ell(self, chain: Chain, point: Sequence) -> Poly:
        """Degree-one ``ell`` with ``ell(point) = 0`` and ``ker ell`` spanned by the direction (n = 2)."""
        x = [Poly.var(chain.arena, name) - point[i] for i, name in enumerate(chain.axis_names)]
        if chain.n == 1:
            return x[0]
        if chain.n != 2:
            raise DimensionError("a kernel line of a linear form needs n = 2")
        t1, t2 = self.vector
        return x[0] * t2 - x[1] * t1


def _coords(q) -> tuple:
    return q.coords if isinstance(q, LeafPoint) else tuple(q)


def _nonzero(v) -> bool:
    return not (v == 0)


# -- n = 1 --------------------------------------------------------------------

def mult_univariate(chain: Chain, q, psi: Poly, order: int = DEFAULT_CAP) -> MultResult:
    """Order of the first nonvanishing Taylor coefficient of ``psi`` on the leaf."""
    if chain.n != 1:
        raise DimensionError("mult_univariate needs a chain with n = 1")
    series = LeafSeries(chain, _coords(q), psi)
    for j in range(order + 1):
        if _nonzero(series.coefficient((j,))):
            return MultResult(j, j)
    return MultResult(None, order)


# -- general n: Macaulay dual space ----------------------------------------------

class _Echelon:
    """Incremental row echelon form over an exact field; rows are sparse dicts."""

    def __init__(self):
        self.pivots: dict[object, dict] = {}

    def add(self, row: dict) -> bool:
        row = dict(row)
        while row:
            col = min(row)
            piv = self.pivots.get(col)
            if piv is None:
                c = row[col]
                self.pivots[col] = {k: v / c for k, v in row.items()}
                return True
            c = row[col]
            for k, v in piv.items():
                nv = row.get(k, 0) - c * v
                if nv == 0:
                    row.pop(k, None)
                else:
                    row[k] = nv
        return False

    @property
    def rank(self) -> int:
        return len(self.pivots)


def _monomials(n: int, t: int) -> list[tuple[int, ...]]:
    return [a for total in range(t + 1) for a in _multi_indices(n, total)]


def _shifted_rows(jets: list[dict], n: int, t: int):
    """Rows ``x^beta * jet_i`` truncated at degree ``t``, keyed by (degree, -exponent)."""
    for jet in jets:
        low = min((sum(a) for a in jet), default=t + 1)
        for beta in _monomials(n, t - low):
            row = {}
            for a, c in jet.items():
                e = tuple(x + y for x, y in zip(a, beta))
                if sum(e) <= t:
                    row[(sum(e), tuple(-v for v in e))] = c
            if row:
                yield row


def dual_space_dimension(jets: list[dict], n: int, t: int, exact: bool = True) -> int:
    """``dim C[x]/(I + m^(t+1))`` for the ideal generated by the given jets."""
    ncols = len(_monomials(n, t))
    if exact:
        ech = _Echelon()
        for row in _shifted_rows(jets, n, t):
            ech.add(row)
            if ech.rank == ncols:
                break
        return ncols - ech.rank
    cols = {(sum(a), tuple(-v for v in a)): i for i, a in enumerate(_monomials(n, t))}
    rows = list(_shifted_rows(jets, n, t))
    if not rows:
        return ncols
    mat = np.zeros((len(rows), ncols), dtype=complex)
    for r, row in enumerate(rows):
        for key, c in row.items():
            mat[r, cols[key]] = complex(c)
    sv = np.linalg.svd(mat, compute_uv=False)
    tol = max(mat.shape) * np.finfo(float).eps * (sv[0] if sv.size else 1.0) * 1e3
    return ncols - int(np.sum(sv > tol))


def _check_system(chain: Chain, coords, system) -> list[Poly]:
    system = [chain._lift(p) for p in system]
    if len(system) != chain.n:
        raise DimensionError(f"need {chain.n} equations, got {len(system)}")
    for i, p in enumerate(system, start=1):
        if _nonzero(p.eval(coords)):
            raise PreconditionError(f"psi_{i} does not vanish at the base point")
    return system


def mult_isolated(chain: Chain, q, system: Sequence[Poly], order: int = DEFAULT_CAP) -> MultResult:
    """Multiplicity of the isolated common zero ``q`` of ``system`` on its leaf.

    Truncation orders 2, 4, 8, ... are tried; at each ``t`` the dimensions
    ``D_t`` and ``D_(t+1)`` are compared and equality settles the value.
    """
    coords = _coords(q)
    system = _check_system(chain, coords, system)
    exact = all(is_exact(c) for c in coords)
    series = [LeafSeries(chain, coords, p) for p in system]
    t = 2
    while True:
        t = min(t, order)
        hi = min(t + 1, order + 1)
        jets = [s.coefficients(hi) for s in series]
        d_t = dual_space_dimension([_trunc(j, t) for j in jets], chain.n, t, exact)
        d_next = dual_space_dimension(jets, chain.n, hi, exact)
        if d_t == d_next:
            return MultResult(d_t, t)
        if t >= order:
            return MultResult(None, order)
        t *= 2


def dual_dimensions(chain: Chain, q, system: Sequence[Poly], orders: Sequence[int]) -> list[int]:
    """``D_t`` for each requested ``t`` (used by the non-isolated locus test)."""
    coords = _coords(q)
    system = [chain._lift(p) for p in system]
    exact = all(is_exact(c) for c in coords)
    series = [LeafSeries(chain, coords, p) for p in system]
    out = []
    for t in orders:
        out.append(dual_space_dimension([s.coefficients(t) for s in series], chain.n, t, exact))
    return out


def _trunc(jet: dict, t: int) -> dict:
    return {a: c for a, c in jet.items() if sum(a) <= t}


# -- one-dimensional restrictions -----------------------------------------------

def _check_line(chain: Chain, t: Direction):
    if len(t) != chain.n:
        raise DimensionError(f"direction has {len(t)} entries, chain has n = {chain.n}")
    if chain.n > 2:
        raise DimensionError("restrictions to a one-dimensional T need n <= 2")


def mo_restrict(chain: Chain, phi: Poly, t: Direction, k: int) -> list[Poly]:
    """``[D_t Phi, D_t^2 Phi, ..., D_t^k Phi]`` with ``D_t = sum_i t_i V_i``."""
    _check_line(chain, t)
    out = []
    cur = chain._lift(phi)
    for _ in range(k):
        cur = chain.directional(cur, t.vector)
        out.append(cur)
    return out


def mo_vanish_order(chain: Chain, q, phi: Poly, t: Direction, kmax: int) -> MultResult:
    """Smallest ``j`` with ``D_t^j Phi (q) != 0``, i.e. the multiplicity of ``Phi`` on the line."""
    _check_line(chain, t)
    coords = _coords(q)
    phi = chain._lift(phi)
    if _nonzero(phi.eval(coords)):
        raise PreconditionError("Phi does not vanish at the base point")
    cur = phi
    for j in range(1, kmax + 1):
        cur = chain.directional(cur, t.vector)
        if _nonzero(cur.eval(coords)):
            return MultResult(j, j)
    return MultResult(None, kmax)


def restrict_to_line(chain: Chain, q, t: Direction):
    """The chain induced on the line ``x = x(q) + s*t`` and the matching substitution.

    Returns ``(line_chain, to_line, base)`` where ``to_line`` maps a polynomial of
    ``chain`` to one of ``line_chain`` and ``base`` is the point ``s = 0``.
    """
    coords = _coords(q)
    line = Chain(1, chain.m, [[None] * chain.m], axis_names=("x1",))
    s = Poly.var(line.arena, 0)
    images = [s * t.vector[i] + coords[i] for i in range(chain.n)]
    images += [Poly.var(line.arena, 1 + j) for j in range(chain.m)]

    def to_line(p: Poly) -> Poly:
        return chain._lift(p).compose(images)

    g = [[to_line(sum((chain.g[i][j] * t.vector[i] for i in range(chain.n)), Poly.zero(chain.arena)))
          for j in range(chain.m)]]
    line = Chain(1, chain.m, g)
    base = (Fraction(0),) + tuple(coords[chain.n:])
    return line, to_line, base
