"""Noetherian chains and their derivation operators.

A chain on ``n`` axes and ``m`` functions is given by an ``n x m`` matrix of
polynomials ``g``.  It defines the commuting-on-leaves vector fields

    V_i = d/dx_i + sum_j g_ij * d/df_j,

and a Noetherian function is a polynomial in ``x, f`` restricted to a leaf
(an integral manifold of ``V_1..V_n``).  Leaves through a point exist only
on the integrability locus, which is probed through the coefficients of
iterated Lie brackets.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import factorial
from typing import Sequence

from .algebra import Arena, Poly, poly_parse
from .algebra.poly import EPS
from .errors import AxisError, DimensionError, PreconditionError


class NotIntegrableWarning(UserWarning):
    pass


class Chain:
    """A Noetherian chain ``(n, m, g)``.

    Parameters
    ----------
    n, m : int
        Number of axes ``x`` and of chain functions ``f``.
    g : n x m nested sequence of Poly or str
        Coefficient matrix; strings are parsed in the chain's arena.
    axis_names : sequence of str, optional
        Names of the axis variables; defaults to ``x1..xn``.  Used when a
        family parameter is appended as an extra axis.
    """

    def __init__(self, n: int, m: int, g=None, axis_names: Sequence[str] | None = None):
        if n < 1 or m < 0:
            raise DimensionError(f"need n >= 1 and m >= 0, got n={n}, m={m}")
        if axis_names is None:
            axis_names = tuple(f"x{i}" for i in range(1, n + 1))
        axis_names = tuple(axis_names)
        if len(axis_names) != n:
            raise DimensionError("one name per axis is required")
        self.n, self.m = n, m
        self.axis_names = axis_names
        self.f_names = tuple(f"f{j}" for j in range(1, m + 1))
        self.arena = Arena(axis_names + self.f_names)
        rows = [[None] * m for _ in range(n)] if g is None else g
        if len(rows) != n or any(len(r) != m for r in rows):
            raise DimensionError(f"g must be a {n} x {m} matrix")
        self.g = tuple(tuple(self._coerce(e) for e in row) for row in rows)
        self.delta = max((e.degree for row in self.g for e in row), default=0)
        self.delta = max(self.delta, 0)
        self._il_cache: dict[int, list[Poly]] = {}

    def _coerce(self, entry) -> Poly:
        if entry is None:
            return Poly.zero(self.arena)
        if isinstance(entry, str):
            return poly_parse(entry, self.arena)
        if isinstance(entry, Poly):
            return entry.embed(self.arena)
        return Poly.constant(self.arena, entry)

    # -- convenience constructors --------------------------------------
    @classmethod
    def trivial(cls, n: int) -> "Chain":
        return cls(n, 0, [[] for _ in range(n)])

    @classmethod
    def from_strings(cls, n: int, m: int, g: Sequence[Sequence[str]]) -> "Chain":
        return cls(n, m, g)

    def with_parameter(self, name: str = EPS) -> "Chain":
        """Append a parameter as an extra axis along which every f is constant."""
        names = self.axis_names + (name,)
        arena = Arena(names + self.f_names)
        rows = [[e.embed(arena) for e in row] for row in self.g]
        rows.append([None] * self.m)
        return Chain(self.n + 1, self.m, rows, names)

    def parse(self, text: str) -> Poly:
        return poly_parse(text, self.arena)

    def point(self, coords) -> "LeafPoint":
        return LeafPoint(self, tuple(coords))

    def __repr__(self):
        g = [[str(e) for e in row] for row in self.g]
        return f"Chain(n={self.n}, m={self.m}, g={g})"

    # -- derivations -----------------------------------------------------
    def _axis(self, i: int) -> int:
        if not 1 <= i <= self.n:
            raise AxisError(f"axis {i} out of range 1..{self.n}")
        return self.arena.index(self.axis_names[i - 1])

    def _lift(self, p: Poly) -> Poly:
        if p.arena != self.arena:
            return p.embed(self.arena)
        return p

    def derive(self, p: Poly, i: int) -> Poly:
        """``V_i(p)`` for the 1-based axis ``i``."""
        ax = self._axis(i)
        p = self._lift(p)
        out = p.diff(ax)
        for j, gij in enumerate(self.g[i - 1]):
            if gij.is_zero():
                continue
            dpf = p.diff(self.n + j)
            if not dpf.is_zero():
                out = out + gij * dpf
        return out

    def iterated_derive(self, p: Poly, word: Sequence[int]) -> Poly:
        """Apply ``V_{word[0]}`` first, then ``V_{word[1]}``, and so on."""
        if len(word) == 0:
            raise ValueError("derivation word must be nonempty")
        for i in word:
            p = self.derive(p, i)
        return p

    def directional(self, p: Poly, t: Sequence) -> Poly:
        """``sum_i t_i V_i(p)``."""
        if len(t) != self.n:
            raise DimensionError("direction must have one entry per axis")
        out = Poly.zero(self.arena)
        for i, ti in enumerate(t, start=1):
            if ti != 0:
                out = out + self.derive(p, i) * ti
        return out

    # -- integrability ---------------------------------------------------
    def _vertical_apply(self, coeffs: Sequence[Poly], p: Poly) -> Poly:
        out = Poly.zero(self.arena)
        for j, c in enumerate(coeffs):
            if not c.is_zero():
                out = out + c * p.diff(self.n + j)
        return out

    def bracket_fields(self, depth: int) -> list[tuple[tuple[int, ...], tuple[Poly, ...]]]:
        """Vertical fields ``[V_i,V_j]`` and right-nested ``[V_l, W]`` up to ``depth``.

        Each entry is ``(label, coefficients on d/df_1..d/df_m)``.
        """
        if depth < 1:
            raise ValueError("bracket depth must be at least 1")
        level = []
        for i in range(1, self.n + 1):
            for j in range(i + 1, self.n + 1):
                coeffs = tuple(self.derive(self.g[j - 1][k], i) - self.derive(self.g[i - 1][k], j)
                               for k in range(self.m))
                level.append(((i, j), coeffs))
        fields = list(level)
        for _ in range(depth - 1):
            nxt = []
            for label, w in level:
                if all(c.is_zero() for c in w):
                    continue
                for l in range(1, self.n + 1):
                    coeffs = tuple(self.derive(w[k], l) - self._vertical_apply(w, self.g[l - 1][k])
                                   for k in range(self.m))
                    nxt.append(((l,) + label, coeffs))
            fields.extend(nxt)
            level = nxt
        return fields

    def il_generators(self, depth: int = 1) -> list[Poly]:
        """Polynomials vanishing on the integrability locus (bracket coefficients)."""
        if self.n == 1 or self.m == 0:
            return []
        if depth not in self._il_cache:
            seen: set[Poly] = set()
            gens = []
            for _, coeffs in self.bracket_fields(depth):
                for c in coeffs:
                    if c.is_zero() or c in seen or -c in seen:
                        continue
                    seen.add(c)
                    gens.append(c)
            self._il_cache[depth] = gens
        return list(self._il_cache[depth])

    def default_depth(self) -> int:
        return 2 * (self.m + 1)

    def il_test(self, q: "LeafPoint | Sequence", depth: int | None = None) -> bool:
        """Necessary conditions for integrability at ``q`` up to bracket ``depth``."""
        coords = q.coords if isinstance(q, LeafPoint) else tuple(q)
        depth = self.default_depth() if depth is None else depth
        return all(_is_zero(gen.eval(coords)) for gen in self.il_generators(depth))

    # -- jets --------------------------------------------------------------
    def jet(self, q: "LeafPoint | Sequence", p: Poly, order: int, depth: int | None = None) -> "Jet":
        """Truncated Taylor expansion of ``p`` restricted to the leaf through ``q``."""
        base = q if isinstance(q, LeafPoint) else LeafPoint(self, tuple(q))
        depth = self.default_depth() if depth is None else depth
        integrable = self.il_test(base, depth)
        if not integrable:
            warnings.warn(f"point {base.coords} fails the integrability test at depth {depth}; "
                          "jet coefficients follow the canonical derivation order",
                          NotIntegrableWarning, stacklevel=2)
        coeffs = LeafSeries(self, base, p).coefficients(order)
        return Jet(base, order, coeffs, integrable, depth)


def canonical_word(alpha: Sequence[int]) -> tuple[int, ...]:
    """Ascending derivation word for the multi-index ``alpha`` (1-based axes)."""
    return tuple(i for i, a in enumerate(alpha, start=1) for _ in range(a))


def _alpha_factorial(alpha) -> int:
    out = 1
    for a in alpha:
        out *= factorial(a)
    return out


def _multi_indices(n: int, total: int):
    """All multi-indices of length ``n`` and the given total, in lexicographic order."""
    if n == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _multi_indices(n - 1, total - first):
            yield (first,) + rest


def _is_zero(v) -> bool:
    try:
        return v == 0
    except TypeError:  # pragma: no cover
        return abs(v) == 0


class _DerivativeTable:
    """Memoized ``iterated_derive(p, canonical_word(alpha))``."""

    def __init__(self, chain: Chain, p: Poly):
        self.chain = chain
        self.table = {(0,) * chain.n: p}

    def get(self, alpha: tuple[int, ...]) -> Poly:
        hit = self.table.get(alpha)
        if hit is not None:
            return hit
        last = max(i for i, a in enumerate(alpha) if a)
        prev = alpha[:last] + (alpha[last] - 1,) + alpha[last + 1:]
        out = self.chain.derive(self.get(prev), last + 1)
        self.table[alpha] = out
        return out


class LeafSeries:
    """Taylor coefficients of ``p`` on the leaf through ``base``, computed on demand.

    Coefficients are ``iterated_derive(p, canonical_word(alpha))(base) / alpha!``;
    raising the order reuses every derivative already computed.
    """

    def __init__(self, chain: Chain, base: "LeafPoint | Sequence", p: Poly):
        self.chain = chain
        self.coords = base.coords if isinstance(base, LeafPoint) else tuple(base)
        self._table = _DerivativeTable(chain, chain._lift(p))
        self._values: dict[tuple[int, ...], object] = {}

    def coefficient(self, alpha: tuple[int, ...]):
        alpha = tuple(alpha)
        if alpha not in self._values:
            v = self._table.get(alpha).eval(self.coords)
            self._values[alpha] = v / _alpha_factorial(alpha)
        return self._values[alpha]

    def coefficients(self, order: int, start: int = 0) -> dict:
        """Nonzero coefficients of total degree ``start..order``."""
        out = {}
        for total in range(start, order + 1):
            for alpha in _multi_indices(self.chain.n, total):
                v = self.coefficient(alpha)
                if not _is_zero(v):
                    out[alpha] = v
        return out


@dataclass(frozen=True)
class LeafPoint:
    chain: Chain
    coords: tuple

    def __post_init__(self):
        if len(self.coords) != self.chain.arena.size:
            raise DimensionError(f"point needs {self.chain.arena.size} coordinates, got {len(self.coords)}")

    @property
    def x(self) -> tuple:
        return self.coords[: self.chain.n]

    @property
    def f(self) -> tuple:
        return self.coords[self.chain.n:]


@dataclass
class Jet:
    """Truncated power series in local axis coordinates centred at ``base``."""

    base: LeafPoint
    order: int
    coeffs: dict = field(default_factory=dict)
    integrable: bool = True
    depth: int = 0

    def coefficient(self, alpha) -> object:
        return self.coeffs.get(tuple(alpha), Fraction(0))

    def is_zero(self) -> bool:
        return not self.coeffs

    def lowest_order(self) -> int | None:
        """Total degree of the first nonvanishing term, or ``None`` if all vanish."""
        if not self.coeffs:
            return None
        return min(sum(a) for a in self.coeffs)

    def to_poly(self, arena: Arena | None = None) -> Poly:
        """The jet as a polynomial in local coordinates (exact coefficients only)."""
        arena = arena or Arena(self.base.chain.axis_names)
        return Poly(arena, dict(self.coeffs))

    def __str__(self):
        return str(self.to_poly())


def mixed_jet_coefficients(chain: Chain, q, p: Poly, max_len: int = 3):
    """Evaluate ``iterated_derive`` at ``q`` for every word up to ``max_len``, grouped by multi-index.

    Returns ``{alpha: {word: value}}``; on an integrable point every group is constant.
    """
    coords = q.coords if isinstance(q, LeafPoint) else tuple(q)
    groups: dict[tuple, dict] = {}
    for length in range(1, max_len + 1):
        for word in product(range(1, chain.n + 1), repeat=length):
            alpha = [0] * chain.n
            for i in word:
                alpha[i - 1] += 1
            val = chain.iterated_derive(p, word).eval(coords)
            groups.setdefault(tuple(alpha), {})[word] = val
    return groups


def require_integrable(chain: Chain, q, depth: int | None = None) -> None:
    if not chain.il_test(q, depth):
        d = chain.default_depth() if depth is None else depth
        raise PreconditionError(f"point is not on the integrability locus (depth {d})")


# functional spellings of the Chain methods
def derive(chain: Chain, p: Poly, i: int) -> Poly:
    return chain.derive(p, i)


def iterated_derive(chain: Chain, p: Poly, word: Sequence[int]) -> Poly:
    return chain.iterated_derive(p, word)


def il_generators(chain: Chain, depth: int = 1) -> list[Poly]:
    return chain.il_generators(depth)


def il_test(chain: Chain, q, depth: int | None = None) -> bool:
    return chain.il_test(q, depth)


def jet(chain: Chain, q, p: Poly, order: int, depth: int | None = None) -> Jet:
    return chain.jet(q, p, order, depth)
