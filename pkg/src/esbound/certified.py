"""Certified real enclosures with rational endpoints.

Transcendental functions are evaluated in fixed point (integers scaled by
``2**F``) with directed rounding and explicit series tail bounds, so every
returned interval provably contains the true value.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Union

from . import config
from .arith import sieve_primes
from .errors import BudgetExceeded, PreconditionError

Number = Union[int, Fraction]

GUARD_BITS = 24


def _ceil_div(a: int, b: int) -> int:
    return -((-a) // b)


@dataclass(frozen=True)
class CertifiedReal:
    lower: Fraction
    upper: Fraction

    def __post_init__(self):
        lo, hi = Fraction(self.lower), Fraction(self.upper)
        if lo > hi:
            raise ValueError(f"empty enclosure [{lo}, {hi}]")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @classmethod
    def exact(cls, value: Number) -> "CertifiedReal":
        return cls(Fraction(value), Fraction(value))

    @property
    def width(self) -> Fraction:
        return self.upper - self.lower

    @property
    def midpoint(self) -> Fraction:
        return (self.lower + self.upper) / 2

    def contains(self, value: Number) -> bool:
        return self.lower <= value <= self.upper

    def overlaps(self, other: "CertifiedReal") -> bool:
        return self.lower <= other.upper and other.lower <= self.upper

    def __float__(self) -> float:
        return float(self.midpoint)

    def __repr__(self) -> str:
        return f"CertifiedReal([{float(self.lower)!r}, {float(self.upper)!r}])"

    # interval arithmetic -------------------------------------------------

    def __add__(self, other):
        other = _lift(other)
        return CertifiedReal(self.lower + other.lower, self.upper + other.upper)

    __radd__ = __add__

    def __neg__(self):
        return CertifiedReal(-self.upper, -self.lower)

    def __sub__(self, other):
        other = _lift(other)
        return CertifiedReal(self.lower - other.upper, self.upper - other.lower)

    def __rsub__(self, other):
        return _lift(other) - self

    def __mul__(self, other):
        other = _lift(other)
        products = (
            self.lower * other.lower,
            self.lower * other.upper,
            self.upper * other.lower,
            self.upper * other.upper,
        )
        return CertifiedReal(min(products), max(products))

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _lift(other)
        if other.lower <= 0 <= other.upper:
            raise ZeroDivisionError("divisor enclosure contains 0")
        return self * CertifiedReal(1 / other.upper, 1 / other.lower)

    def __rtruediv__(self, other):
        return _lift(other) / self

    def log(self, prec: Optional[int] = None) -> "CertifiedReal":
        if self.lower <= 0:
            raise PreconditionError("log of an enclosure reaching 0 or below")
        return CertifiedReal(log_rational(self.lower, prec).lower, log_rational(self.upper, prec).upper)

    def exp(self, prec: Optional[int] = None) -> "CertifiedReal":
        return CertifiedReal(exp_rational(self.lower, prec).lower, exp_rational(self.upper, prec).upper)

    def sqrt(self, prec: Optional[int] = None) -> "CertifiedReal":
        if self.lower < 0:
            raise PreconditionError("sqrt of an enclosure reaching below 0")
        return CertifiedReal(sqrt_rational(self.lower, prec).lower, sqrt_rational(self.upper, prec).upper)

    def round_out(self, prec: Optional[int] = None) -> "CertifiedReal":
        """Widen to dyadic endpoints with ``prec`` fractional bits (keeps Fractions small)."""
        f = _bits(prec)
        scale = 1 << f
        lo = (self.lower.numerator * scale) // self.lower.denominator
        hi = _ceil_div(self.upper.numerator * scale, self.upper.denominator)
        return CertifiedReal(Fraction(lo, scale), Fraction(hi, scale))


def _lift(value) -> CertifiedReal:
    if isinstance(value, CertifiedReal):
        return value
    if isinstance(value, (int, Fraction)):
        return CertifiedReal.exact(value)
    return NotImplemented


def certified_less(lhs: CertifiedReal, rhs: CertifiedReal) -> Optional[bool]:
    """True if ``lhs < rhs`` is certain, False if ``rhs < lhs`` is, else None."""
    if lhs.upper < rhs.lower:
        return True
    if rhs.upper < lhs.lower:
        return False
    return None


def _bits(prec: Optional[int]) -> int:
    return (config.precision_bits() if prec is None else prec) + GUARD_BITS


# fixed-point kernels; all return (lo, hi) integers scaled by 2**f ------------


def _atanh_fixed(p: int, q: int, f: int) -> tuple[int, int]:
    """Enclosure of ``atanh(p/q) * 2**f`` for ``0 <= p/q <= 1/2``."""
    if p == 0:
        return 0, 0
    p2, q2 = p * p, q * q
    lo_term = (p << f) // q
    hi_term = _ceil_div(p << f, q)
    lo_sum = hi_sum = 0
    j = 1
    while hi_term > 0:
        lo_sum += lo_term // j
        hi_sum += _ceil_div(hi_term, j)
        lo_term = lo_term * p2 // q2
        hi_term = _ceil_div(hi_term * p2, q2)
        j += 2
        if hi_term * 4 < j:
            break
    # tail: sum_{i>=0} z^(j+2i)/(j+2i) <= z^j / (j * (1 - z^2)) <= (4/3) z^j / j
    hi_sum += _ceil_div(4 * hi_term, 3 * j) + 1
    return lo_sum, hi_sum


@lru_cache(maxsize=32)
def _log2_fixed(f: int) -> tuple[int, int]:
    lo, hi = _atanh_fixed(1, 3, f)
    return 2 * lo, 2 * hi


def _log_ratio_fixed(a: int, b: int, f: int) -> tuple[int, int]:
    """Enclosure of ``log(a/b) * 2**f`` for positive integers ``a``, ``b``."""
    # choose e with a / (b 2^e) in [1/sqrt2, sqrt2), then log = e log2 + 2 atanh(z)
    e = a.bit_length() - b.bit_length()
    num, den = (a, b << e) if e >= 0 else (a << -e, b)
    if 2 * num * num >= 4 * den * den:
        e += 1
        den *= 2
    elif 2 * num * num < den * den:
        e -= 1
        num *= 2
    l2lo, l2hi = _log2_fixed(f)
    if num >= den:
        lo, hi = _atanh_fixed(num - den, num + den, f)
    else:
        nlo, nhi = _atanh_fixed(den - num, num + den, f)
        lo, hi = -nhi, -nlo
    if e >= 0:
        return e * l2lo + 2 * lo, e * l2hi + 2 * hi
    return e * l2hi + 2 * lo, e * l2lo + 2 * hi


def _exp_fixed_unit(r_lo: int, r_hi: int, f: int) -> tuple[int, int]:
    """Enclosure of ``exp(r) * 2**f`` for fixed-point ``0 <= r_lo <= r_hi < 2**f``."""
    one = 1 << f
    lo_sum = hi_sum = 0
    lo_term, hi_term = one, one
    j = 1
    while hi_term > 0:
        lo_sum += lo_term
        hi_sum += hi_term
        lo_term = (lo_term * r_lo >> f) // j
        hi_term = _ceil_div(_ceil_div(hi_term * r_hi, one), j)
        j += 1
        if j > 4 and hi_term == 1:
            break
    # remaining tail is bounded by twice the next term once r/j <= 1/2
    hi_sum += 2 * hi_term + 1
    return lo_sum, hi_sum


def log_rational(x: Number, prec: Optional[int] = None) -> CertifiedReal:
    x = Fraction(x)
    if x <= 0:
        raise PreconditionError(f"log of non-positive value {x}")
    if x == 1:
        return CertifiedReal.exact(0)
    f = _bits(prec)
    lo, hi = _log_ratio_fixed(x.numerator, x.denominator, f)
    return CertifiedReal(Fraction(lo, 1 << f), Fraction(hi, 1 << f))


def log2_enclosure(prec: Optional[int] = None) -> CertifiedReal:
    f = _bits(prec)
    lo, hi = _log2_fixed(f)
    return CertifiedReal(Fraction(lo, 1 << f), Fraction(hi, 1 << f))


def exp_rational(x: Number, prec: Optional[int] = None) -> CertifiedReal:
    """Enclosure of ``exp(x)``; the result has relative width about ``2**-prec``."""
    x = Fraction(x)
    if x == 0:
        return CertifiedReal.exact(1)
    f = _bits(prec)
    l2lo, l2hi = _log2_fixed(f)
    scale = 1 << f
    # x = n log2 + r with r in [0, log2)
    n = math.floor(x * scale / l2hi)
    while True:
        if n >= 0:
            r_lo = x - Fraction(n * l2hi, scale)
            r_hi = x - Fraction(n * l2lo, scale)
        else:
            r_lo = x - Fraction(n * l2lo, scale)
            r_hi = x - Fraction(n * l2hi, scale)
        if r_lo < 0:
            n -= 1
            continue
        break
    rl = (r_lo.numerator * scale) // r_lo.denominator
    rh = _ceil_div(r_hi.numerator * scale, r_hi.denominator)
    lo, hi = _exp_fixed_unit(rl, rh, f)
    return CertifiedReal(Fraction(lo, scale) * Fraction(2) ** n, Fraction(hi, scale) * Fraction(2) ** n)


def sqrt_rational(x: Number, prec: Optional[int] = None) -> CertifiedReal:
    x = Fraction(x)
    if x < 0:
        raise PreconditionError(f"sqrt of negative value {x}")
    f = _bits(prec)
    a, b = x.numerator, x.denominator
    r = math.isqrt((a * b) << (2 * f))
    den = b << f
    if r * r == (a * b) << (2 * f):
        return CertifiedReal.exact(Fraction(r, den))
    return CertifiedReal(Fraction(r, den), Fraction(r + 1, den))


def log_int_fixed(n: int, f: int) -> tuple[int, int]:
    return _log_ratio_fixed(n, 1, f)


# Chebyshev theta -------------------------------------------------------------


class ThetaTable:
    """Cumulative enclosures of ``theta(q) = sum_{p <= q} log p`` at every prime ``q <= limit``."""

    def __init__(self, limit: int, prec: Optional[int] = None):
        self.limit = limit
        self.bits = _bits(prec)
        self.primes = sieve_primes(limit)
        self.lower: list[int] = []
        self.upper: list[int] = []
        self.log_lower: list[int] = []
        self.log_upper: list[int] = []
        lo_acc = hi_acc = 0
        f = self.bits
        for q in self.primes:
            lo, hi = log_int_fixed(q, f)
            self.log_lower.append(lo)
            self.log_upper.append(hi)
            lo_acc += lo
            hi_acc += hi
            self.lower.append(lo_acc)
            self.upper.append(hi_acc)

    def _scale(self, lo: int, hi: int) -> CertifiedReal:
        s = 1 << self.bits
        return CertifiedReal(Fraction(lo, s), Fraction(hi, s))

    def theta(self, k: int) -> CertifiedReal:
        if k > self.limit:
            raise PreconditionError(f"k={k} beyond table limit {self.limit}")
        idx = bisect.bisect_right(self.primes, k)
        if idx == 0:
            return CertifiedReal.exact(0)
        return self._scale(self.lower[idx - 1], self.upper[idx - 1])

    def log_prime(self, q: int) -> CertifiedReal:
        idx = bisect.bisect_left(self.primes, q)
        if idx == len(self.primes) or self.primes[idx] != q:
            raise PreconditionError(f"{q} is not a prime <= {self.limit}")
        return self._scale(self.log_lower[idx], self.log_upper[idx])

    def max_ratio(self, bound: Fraction) -> tuple[bool, int, Fraction]:
        """Check ``theta(q) < bound * q`` at every prime; return (ok, argmax prime, max upper ratio).

        Since theta is constant between consecutive primes while ``bound * k``
        grows, checking at primes covers every integer ``k`` up to ``limit``.
        """
        s = 1 << self.bits
        num, den = bound.numerator, bound.denominator
        ok = True
        best_q, best_num, best_den = 0, 0, 1
        for q, hi in zip(self.primes, self.upper):
            if hi * den >= num * q * s:
                ok = False
            if hi * best_den > best_num * q:
                best_q, best_num, best_den = q, hi, q
        return ok, best_q, Fraction(best_num, best_den * s)


@lru_cache(maxsize=4)
def theta_table(limit: int, prec: Optional[int] = None) -> ThetaTable:
    return ThetaTable(limit, prec)


_REL_TOLERANCE = Fraction(1, 10**20)


def theta(k: int, prec: Optional[int] = None) -> CertifiedReal:
    """Certified enclosure of the Chebyshev function ``sum_{q <= k prime} log q``."""
    if k < 2:
        raise PreconditionError(f"theta needs k >= 2, got {k}")
    budget = config.sieve_limit()
    if k > budget:
        raise BudgetExceeded(f"theta({k}) exceeds sieve budget {budget}")
    prec = config.precision_bits() if prec is None else prec
    while True:
        table = theta_table(min(max(_table_limit(k), k), budget), prec)
        value = table.theta(k)
        if value.width <= _REL_TOLERANCE * value.lower:
            return value
        prec *= 2


def _table_limit(k: int) -> int:
    # round table sizes up so nearby k share one cached table
    if k <= 1024:
        return 1024
    return 1 << (k - 1).bit_length()


__all__ = [
    "CertifiedReal",
    "ThetaTable",
    "certified_less",
    "exp_rational",
    "log2_enclosure",
    "log_rational",
    "sqrt_rational",
    "theta",
    "theta_table",
]
