"""Sparse multivariate polynomials over exact scalars.

A :class:`Poly` lives in an :class:`Arena`, the ordered tuple of variable
names it is written in (``x1..xn, f1..fm`` for a chain, with ``eps``
appended for one-parameter families).  Terms are stored as a mapping from
exponent tuples to nonzero coefficients; the canonical order used for
printing and iteration is graded lexicographic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Number
from typing import Iterable, Mapping, Sequence

from ..errors import ArenaMismatchError, DimensionError
from .scalar import GaussianRational, scalar_to_str

EPS = "eps"


@dataclass(frozen=True)
class Arena:
    names: tuple[str, ...]

    def __post_init__(self):
        if len(set(self.names)) != len(self.names):
            raise ValueError(f"duplicate variable names in arena {self.names}")

    @classmethod
    def chain(cls, n: int, m: int = 0, eps: bool = False) -> "Arena":
        names = [f"x{i}" for i in range(1, n + 1)] + [f"f{j}" for j in range(1, m + 1)]
        if eps:
            names.append(EPS)
        return cls(tuple(names))

    @property
    def size(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        return self.names.index(name)

    def __contains__(self, name) -> bool:
        return name in self.names

    def __len__(self) -> int:
        return len(self.names)


def _grlex_key(exp):
    return (sum(exp), exp)


def _coerce_coeff(c):
    if isinstance(c, bool):
        raise TypeError("booleans are not coefficients")
    if isinstance(c, int):
        return Fraction(c)
    return c


class Poly:
    """Immutable sparse polynomial.

    Parameters
    ----------
    arena : Arena
        Variables the polynomial is written in.
    terms : mapping
        ``{exponent tuple: coefficient}``; zero coefficients are dropped.
    """

    __slots__ = ("arena", "_terms", "_hash")

    def __init__(self, arena: Arena, terms: Mapping | None = None):
        clean = {}
        if terms:
            k = arena.size
            for exp, c in terms.items():
                exp = tuple(int(e) for e in exp)
                if len(exp) != k:
                    raise DimensionError(f"exponent {exp} does not match arena of size {k}")
                if any(e < 0 for e in exp):
                    raise ValueError(f"negative exponent {exp}")
                c = _coerce_coeff(c)
                if c != 0:
                    clean[exp] = c
        self.arena = arena
        self._terms = clean
        self._hash = None

    # -- constructors -------------------------------------------------
    @classmethod
    def zero(cls, arena: Arena) -> "Poly":
        return cls(arena)

    @classmethod
    def constant(cls, arena: Arena, c) -> "Poly":
        return cls(arena, {(0,) * arena.size: c})

    @classmethod
    def var(cls, arena: Arena, name) -> "Poly":
        i = name if isinstance(name, int) else arena.index(name)
        exp = [0] * arena.size
        exp[i] = 1
        return cls(arena, {tuple(exp): 1})

    @classmethod
    def monomial(cls, arena: Arena, exp: Sequence[int], c=1) -> "Poly":
        return cls(arena, {tuple(exp): c})

    # -- inspection ---------------------------------------------------
    @property
    def terms(self) -> list[tuple[tuple[int, ...], object]]:
        """Terms in canonical (graded lexicographic, descending) order."""
        return sorted(self._terms.items(), key=lambda t: _grlex_key(t[0]), reverse=True)

    def items(self):
        return self._terms.items()

    def coeff(self, exp) -> object:
        return self._terms.get(tuple(exp), Fraction(0))

    def __len__(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(sum(e) == 0 for e in self._terms)

    @property
    def degree(self) -> int:
        """Total degree; ``-1`` for the zero polynomial."""
        if not self._terms:
            return -1
        return max(sum(e) for e in self._terms)

    def degree_in(self, index: int) -> int:
        if not self._terms:
            return -1
        return max(e[index] for e in self._terms)

    def constant_term(self):
        return self._terms.get((0,) * self.arena.size, Fraction(0))

    def variables(self) -> set[str]:
        used = set()
        for exp in self._terms:
            for i, e in enumerate(exp):
                if e:
                    used.add(self.arena.names[i])
        return used

    # -- arithmetic ---------------------------------------------------
    def _lift(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.arena != self.arena:
                raise ArenaMismatchError(f"arena {other.arena.names} != {self.arena.names}")
            return other
        if isinstance(other, (Number, GaussianRational)) and not isinstance(other, bool):
            return Poly.constant(self.arena, other)
        return NotImplemented

    def __add__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        out = dict(self._terms)
        for e, c in o._terms.items():
            s = out.get(e, 0) + c
            if s == 0:
                out.pop(e, None)
            else:
                out[e] = s
        return Poly(self.arena, out)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.arena, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        if len(o._terms) == 1 and o.is_constant():
            c = o.constant_term()
            return Poly(self.arena, {e: c * v for e, v in self._terms.items()})
        out = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in o._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return Poly(self.arena, out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Poly):
            if not other.is_constant() or other.is_zero():
                raise ZeroDivisionError("division only by nonzero constants")
            other = other.constant_term()
        if isinstance(other, int):
            other = Fraction(other)
        if other == 0:
            raise ZeroDivisionError("division by zero")
        return Poly(self.arena, {e: c / other for e, c in self._terms.items()})

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a nonnegative integer")
        result = Poly.constant(self.arena, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.arena == other.arena and self._terms == other._terms
        if isinstance(other, (Number, GaussianRational)) and not isinstance(other, bool):
            if other == 0:
                return self.is_zero()
            return self.is_constant() and len(self._terms) == 1 and self.constant_term() == other
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.arena, frozenset(self._terms.items())))
        return self._hash

    # -- calculus and evaluation --------------------------------------
    def diff(self, index: int) -> "Poly":
        out = {}
        for e, c in self._terms.items():
            k = e[index]
            if k:
                ne = e[:index] + (k - 1,) + e[index + 1:]
                out[ne] = c * k
        return Poly(self.arena, out)

    def eval(self, point: Sequence):
        """Evaluate at ``point``; exact for exact inputs, numeric otherwise."""
        if len(point) != self.arena.size:
            raise DimensionError(f"point has {len(point)} coordinates, arena has {self.arena.size}")
        total = 0
        powers: dict[tuple[int, int], object] = {}
        for e, c in self._terms.items():
            term = c
            for i, k in enumerate(e):
                if k:
                    key = (i, k)
                    if key not in powers:
                        powers[key] = point[i] ** k
                    term = term * powers[key]
            total = total + term
        if isinstance(total, int):
            total = Fraction(total)
        return total

    def __call__(self, *point):
        if len(point) == 1 and isinstance(point[0], (list, tuple)):
            point = point[0]
        return self.eval(point)

    def compose(self, images: Sequence["Poly"]) -> "Poly":
        """Substitute ``images[i]`` for the i-th arena variable."""
        if len(images) != self.arena.size:
            raise DimensionError("one image per variable is required")
        target = images[0].arena if images else self.arena
        result = Poly.zero(target)
        cache: dict[tuple[int, int], Poly] = {}
        for e, c in self._terms.items():
            term = Poly.constant(target, c)
            for i, k in enumerate(e):
                if k:
                    key = (i, k)
                    if key not in cache:
                        cache[key] = images[i] ** k
                    term = term * cache[key]
            result = result + term
        return result

    def shift(self, point: Sequence) -> "Poly":
        """Rewrite in local coordinates centered at ``point`` (``x -> x + point``)."""
        images = [Poly.var(self.arena, i) + point[i] for i in range(self.arena.size)]
        return self.compose(images)

    def embed(self, arena: Arena) -> "Poly":
        """Re-express in a larger arena, matching variables by name."""
        if arena == self.arena:
            return self
        pos = []
        for name in self.arena.names:
            if name not in arena:
                if all(e[self.arena.index(name)] == 0 for e in self._terms):
                    pos.append(None)
                    continue
                raise ArenaMismatchError(f"variable {name} missing from target arena")
            pos.append(arena.index(name))
        out = {}
        for e, c in self._terms.items():
            ne = [0] * arena.size
            for i, k in enumerate(e):
                if k:
                    ne[pos[i]] = k
            out[tuple(ne)] = c
        return Poly(arena, out)

    def truncate(self, max_degree: int) -> "Poly":
        return Poly(self.arena, {e: c for e, c in self._terms.items() if sum(e) <= max_degree})

    def map_coeffs(self, fn) -> "Poly":
        return Poly(self.arena, {e: fn(c) for e, c in self._terms.items()})

    def order(self) -> int:
        """Lowest total degree of a term (``-1`` for zero)."""
        if not self._terms:
            return -1
        return min(sum(e) for e in self._terms)

    # -- printing -----------------------------------------------------
    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for e, c in self.terms:
            mono = "*".join(
                (name if k == 1 else f"{name}^{k}")
                for name, k in zip(self.arena.names, e) if k
            )
            if isinstance(c, GaussianRational):
                cs, neg = f"({c})", False
            else:
                neg = c < 0
                cs = scalar_to_str(-c if neg else c)
            if mono:
                body = mono if cs == "1" else f"{cs}*{mono}"
            else:
                body = cs
            parts.append(("-" if neg else "+", body))
        first_sign, first = parts[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def __repr__(self):
        return f"Poly({str(self)!r}, arena={self.arena.names})"


def poly_sum(polys: Iterable[Poly], arena: Arena) -> Poly:
    total = Poly.zero(arena)
    for p in polys:
        total = total + p
    return total
