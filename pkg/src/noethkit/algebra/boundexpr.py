"""Exact power-products ``c * prod(base_i ** exp_i)`` for bounds too large to expand.

Values are never expanded eagerly.  Ordering is decided exactly:

* the ratio of two expressions is rewritten over a coprime base of all the
  integers involved (pairwise coprime integers > 1 are multiplicatively
  independent), so the ratio equals one exactly when every exponent
  cancels;
* otherwise the sign of its logarithm is nonzero and is found with
  directed-rounding interval arithmetic, doubling the working precision
  until the enclosure excludes zero.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from contextlib import contextmanager
from decimal import ROUND_CEILING, ROUND_FLOOR, Context, Decimal
from functools import lru_cache, total_ordering
from math import gcd

import gmpy2
from mpmath import iv, mp

DIGIT_CAP = 10**6


class DigitCapExceeded(OverflowError):
    pass


@contextmanager
def iv_precision(bits: int):
    """Temporarily set the interval context's working precision."""
    saved = iv.prec
    iv.prec = bits
    try:
        yield
    finally:
        iv.prec = saved


def _small_primes(limit):
    sieve = bytearray([1]) * (limit + 1)
    sieve[:2] = b"\x00\x00"
    for i in range(2, int(limit**0.5) + 1):
        if sieve[i]:
            sieve[i * i::i] = bytearray(len(sieve[i * i::i]))
    return [i for i, v in enumerate(sieve) if v]


@lru_cache(maxsize=4096)
def _reduce_power(b: int) -> tuple[int, int]:
    """Return ``(r, k)`` with ``b == r**k`` and ``r`` not a perfect power."""
    k = 1
    while b > 3 and gmpy2.is_power(b):
        for p in _small_primes(b.bit_length()):
            root, exact = gmpy2.iroot(b, p)
            if exact:
                b = int(root)
                k *= p
                break
        else:  # pragma: no cover - is_power guarantees a hit
            break
    return b, k


def coprime_base(numbers) -> list[int]:
    """Pairwise coprime integers > 1 generating every input multiplicatively."""
    work = sorted({int(x) for x in numbers if x > 1})
    changed = True
    while changed:
        changed = False
        for i in range(len(work)):
            for j in range(i + 1, len(work)):
                a, b = work[i], work[j]
                g = gcd(a, b)
                if g > 1:
                    rest = [w for t, w in enumerate(work) if t not in (i, j)]
                    new = {x for x in (a // g, b // g, g) if x > 1}
                    work = sorted(set(rest) | new)
                    changed = True
                    break
            if changed:
                break
    return work


def _valuation(x: int, p: int) -> tuple[int, int]:
    k = 0
    while x % p == 0:
        x //= p
        k += 1
    return k, x


@total_ordering
class BoundExpr:
    """Immutable rational power-product.

    Parameters
    ----------
    coeff : rational
        Leading coefficient (sign lives here).
    factors : iterable of (int, int)
        ``(base, exponent)`` pairs with ``base >= 1``; exponents may be any
        integers, including astronomically large ones.
    """

    __slots__ = ("coeff", "factors")

    def __init__(self, coeff=1, factors=()):
        coeff = Fraction(coeff)
        merged: dict[int, int] = {}
        for base, exp in factors:
            base, exp = int(base), int(exp)
            if base < 1:
                raise ValueError("power-product bases must be positive integers")
            if base == 1 or exp == 0:
                continue
            root, k = _reduce_power(base)
            merged[root] = merged.get(root, 0) + exp * k
        if coeff == 0:
            merged = {}
        object.__setattr__(self, "coeff", coeff)
        object.__setattr__(self, "factors",
                           tuple(sorted((b, e) for b, e in merged.items() if e != 0)))

    def __setattr__(self, name, value):
        raise AttributeError("BoundExpr is immutable")

    @classmethod
    def coerce(cls, value) -> "BoundExpr":
        if isinstance(value, BoundExpr):
            return value
        if isinstance(value, bool):
            raise TypeError("booleans are not bounds")
        if isinstance(value, int):
            if abs(value) < 2:
                return cls(value)
            return cls(1 if value > 0 else -1, [(abs(value), 1)])
        if isinstance(value, Fraction):
            if value == 0:
                return cls(0)
            sign = 1 if value > 0 else -1
            return cls(sign, [(abs(value.numerator), 1), (value.denominator, -1)])
        raise TypeError(f"cannot build a BoundExpr from {type(value).__name__}")

    @classmethod
    def power(cls, base: int, exp: int, coeff=1) -> "BoundExpr":
        return cls(coeff, [(base, exp)])

    # -- algebra --------------------------------------------------------
    def __mul__(self, other):
        try:
            o = BoundExpr.coerce(other)
        except TypeError:
            return NotImplemented
        return BoundExpr(self.coeff * o.coeff, self.factors + o.factors)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = BoundExpr.coerce(other)
        if o.coeff == 0:
            raise ZeroDivisionError("division by a zero bound")
        return BoundExpr(self.coeff / o.coeff, self.factors + tuple((b, -e) for b, e in o.factors))

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("only nonnegative integer powers are supported")
        if k == 0:
            return BoundExpr(1)
        sign = -1 if (self.coeff < 0 and k % 2) else 1
        c = abs(self.coeff)
        facs = [(b, e * k) for b, e in self.factors]
        if c != 0:
            facs += [(c.numerator, k), (c.denominator, -k)]
        return BoundExpr(sign if c != 0 else 0, facs)

    # -- magnitude ------------------------------------------------------
    def sign(self) -> int:
        return (self.coeff > 0) - (self.coeff < 0)

    def log10_estimate(self) -> float:
        """Fast floating estimate of ``log10 |value|`` (not certified)."""
        if self.coeff == 0:
            return -math.inf
        c = abs(self.coeff)
        total = math.log10(c.numerator) - math.log10(c.denominator)
        for b, e in self.factors:
            total += float(e) * math.log10(b)
        return total

    def log10(self, precision: int = 128):
        """Certified enclosure ``(lo, hi)`` of ``log10 |value|`` as mpmath numbers."""
        if self.coeff == 0:
            raise ValueError("log10 of zero")
        span = max([abs(e).bit_length() for _, e in self.factors] + [1])
        prec = max(precision, span + 64)
        with iv_precision(prec):
            c = abs(self.coeff)
            total = iv.log(iv.mpf(c.numerator)) - iv.log(iv.mpf(c.denominator))
            for b, e in self.factors:
                total += iv.mpf(e) * iv.log(iv.mpf(b))
            total = total / iv.log(iv.mpf(10))
            lo, hi = total._mpi_
        with mp.workprec(prec):
            return mp.make_mpf(lo), mp.make_mpf(hi)

    def is_integer_valued(self) -> bool:
        return all(e >= 0 for _, e in self.factors) and self.coeff.denominator == 1

    def expand(self, cap: int = DIGIT_CAP) -> Fraction:
        """Exact value, provided it has at most ``cap`` decimal digits."""
        if self.coeff == 0:
            return Fraction(0)
        est = self.log10_estimate()
        # the denominator side is bounded separately
        neg_est = sum(float(-e) * math.log10(b) for b, e in self.factors if e < 0)
        if est > cap or neg_est > cap:
            raise DigitCapExceeded(f"value has about {est:.4g} digits (cap {cap})")
        num, den = self.coeff.numerator, self.coeff.denominator
        for b, e in self.factors:
            if e > 0:
                num *= b**e
            else:
                den *= b ** (-e)
        return Fraction(num, den)

    def to_int(self, cap: int = DIGIT_CAP) -> int:
        v = self.expand(cap)
        if v.denominator != 1:
            raise ValueError("bound is not an integer")
        return v.numerator

    def try_int(self, cap: int = DIGIT_CAP):
        try:
            return self.to_int(cap)
        except (DigitCapExceeded, ValueError):
            return None

    # -- comparison -----------------------------------------------------
    def cmp(self, other) -> int:
        """Return -1, 0 or 1; exact."""
        o = BoundExpr.coerce(other)
        sa, sb = self.sign(), o.sign()
        if sa != sb or sa == 0:
            return (sa > sb) - (sa < sb)
        ratio = _log_ratio_exponents(self, o)
        if not ratio:
            return 0
        s = _sign_of_log(ratio)
        return s if sa > 0 else -s

    def __eq__(self, other):
        try:
            return self.cmp(other) == 0
        except TypeError:
            return NotImplemented

    def __lt__(self, other):
        try:
            return self.cmp(other) < 0
        except TypeError:
            return NotImplemented

    __hash__ = None

    # -- text -----------------------------------------------------------
    def __str__(self):
        parts = []
        c = self.coeff
        if c != 1 or not self.factors:
            parts.append(str(c))
        for b, e in self.factors:
            parts.append(str(b) if e == 1 else f"{b}^{e}")
        return " * ".join(parts)

    def __repr__(self):
        return f"BoundExpr({str(self)!r})"

    _TERM = re.compile(r"^\s*(-?\d+(?:/\d+)?)(?:\s*\^\s*(-?\d+))?\s*$")

    @classmethod
    def parse(cls, text: str) -> "BoundExpr":
        """Inverse of ``str``: ``"3/2 * 2^1792 * 7"``."""
        coeff = Fraction(1)
        factors = []
        for chunk in text.split("*"):
            m = cls._TERM.match(chunk)
            if not m:
                raise ValueError(f"malformed power-product {text!r}")
            base, exp = m.group(1), m.group(2)
            if exp is None:
                if "/" in base or base.startswith("-") or base in ("0", "1"):
                    coeff *= Fraction(base)
                else:
                    factors.append((int(base), 1))
            else:
                factors.append((int(base), int(exp)))
        return cls(coeff, factors)

    def to_json(self, expand: bool = False, cap: int = DIGIT_CAP, digits: int = 15) -> dict:
        out = {"power_product": str(self)}
        if self.coeff != 0:
            lo, hi = self.log10()
            out["log10"] = [_outward(lo, digits, ROUND_FLOOR), _outward(hi, digits, ROUND_CEILING)]
        if expand:
            try:
                v = self.expand(cap)
                out["value"] = str(v.numerator) if v.denominator == 1 else str(v)
            except DigitCapExceeded:
                out["value"] = None
        return out


def _outward(x, digits: int, rounding: str) -> str:
    """``x`` to ``digits`` significant digits, rounded in the given direction."""
    sign, man, exp, _ = x._mpf_
    man, exp = (-1) ** sign * int(man), int(exp)
    ctx = Context(prec=digits, rounding=rounding)
    if exp >= 0:
        return str(ctx.plus(Decimal(man << exp)))
    # man / 2^k = man * 5^k / 10^k, exact in decimal
    return str(ctx.plus(Decimal(man * 5 ** -exp).scaleb(exp)))


def _log_ratio_exponents(a: BoundExpr, b: BoundExpr) -> list[tuple[int, int]]:
    """Exponent vector of ``|a| / |b|`` over a coprime base (empty when equal)."""
    c = abs(a.coeff) / abs(b.coeff)
    raw = list(a.factors) + [(base, -e) for base, e in b.factors]
    raw += [(c.numerator, 1), (c.denominator, -1)]
    raw = [(base, e) for base, e in raw if base > 1 and e != 0]
    if not raw:
        return []
    basis = coprime_base(base for base, _ in raw)
    expo = dict.fromkeys(basis, 0)
    for base, e in raw:
        rest = base
        for p in basis:
            if rest % p == 0:
                k, rest = _valuation(rest, p)
                expo[p] += k * e
        assert rest == 1
    return [(p, e) for p, e in expo.items() if e != 0]


def _sign_of_log(terms, start_prec: int = 96, max_prec: int = 1 << 20) -> int:
    span = max(abs(e).bit_length() for _, e in terms)
    prec = max(start_prec, span + 64)
    while prec <= max_prec:
        with iv_precision(prec):
            total = iv.mpf(0)
            for p, e in terms:
                total += iv.mpf(e) * iv.log(iv.mpf(p))
            if total.a > 0:
                return 1
            if total.b < 0:
                return -1
        prec *= 2
    raise ArithmeticError("could not separate a nonzero logarithm from zero")  # pragma: no cover


def bmax(*items) -> BoundExpr:
    vals = [BoundExpr.coerce(v) for v in items]
    best = vals[0]
    for v in vals[1:]:
        if v > best:
            best = v
    return best


def add_upper(a, b, cap: int = DIGIT_CAP) -> BoundExpr:
    """Upper bound for ``a + b`` (nonnegative inputs): exact below the digit cap, else ``2*max``."""
    a, b = BoundExpr.coerce(a), BoundExpr.coerce(b)
    ia, ib = a.try_int(cap), b.try_int(cap)
    if ia is not None and ib is not None:
        return BoundExpr.coerce(ia + ib)
    return bmax(a, b) * 2
