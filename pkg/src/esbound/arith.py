"""Exact integer arithmetic: primes, factorization, power-free parts, perfect powers.

Integers are Python ``int`` and rationals are ``fractions.Fraction``; both are
exact, so nothing here rounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional

import gmpy2
import numpy as np

from . import config
from .errors import BudgetExceeded, FactorizationError, PreconditionError

TRIAL_DIVISION_LIMIT = 1000
# Miller-Rabin with the first 13 prime bases is deterministic below this bound.
DETERMINISTIC_MR_BOUND = 3_317_044_064_679_887_385_961_981
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
_RHO_MAX_ITERATIONS = 100_000_000


def sieve_primes(limit: int, budget: Optional[int] = None) -> list[int]:
    """All primes ``<= limit`` in ascending order."""
    if limit < 0:
        raise PreconditionError(f"limit must be >= 0, got {limit}")
    budget = config.sieve_limit() if budget is None else budget
    if limit > budget:
        raise BudgetExceeded(f"sieve limit {limit} exceeds budget {budget}")
    return _sieve_array(limit).tolist()


def _sieve_array(limit: int) -> np.ndarray:
    if limit < 2:
        return np.array([], dtype=np.int64)
    # odd-only sieve: index i stands for 2*i + 1
    size = (limit - 1) // 2 + 1
    is_odd_prime = np.ones(size, dtype=bool)
    is_odd_prime[0] = False
    for i in range(1, (math.isqrt(limit) - 1) // 2 + 1):
        if is_odd_prime[i]:
            p = 2 * i + 1
            is_odd_prime[p * p // 2 :: p] = False
    odd = 2 * np.flatnonzero(is_odd_prime).astype(np.int64) + 1
    return np.concatenate((np.array([2], dtype=np.int64), odd))


@lru_cache(maxsize=8)
def _small_primes(limit: int) -> tuple[int, ...]:
    return tuple(_sieve_array(limit).tolist())


def primes_in_range(lo: int, hi: int) -> list[int]:
    """Primes ``q`` with ``lo < q <= hi``."""
    return [q for q in sieve_primes(hi) if q > lo]


def is_prime(n: int) -> bool:
    """Deterministic primality test for ``n < DETERMINISTIC_MR_BOUND``.

    Larger inputs get Miller-Rabin over the same bases; callers that need a
    certified answer must check the bound themselves (``factorize`` does).
    """
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class Factorization:
    sign: int
    factors: tuple[tuple[int, int], ...]

    @property
    def value(self) -> int:
        out = self.sign
        for p, e in self.factors:
            out *= p**e
        return out

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.factors)

    def exponent(self, p: int) -> int:
        for q, e in self.factors:
            if q == p:
                return e
        return 0


def _pollard_brent(n: int) -> int:
    """Return a nontrivial factor of the odd composite ``n``."""
    n = gmpy2.mpz(n)
    for c in range(1, 64):
        y, m, g, r, q = gmpy2.mpz(2), 128, 1, 1, gmpy2.mpz(1)
        x = ys = y
        iterations = 0
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = gmpy2.gcd(q, n)
                k += m
            r *= 2
            iterations += r
            if iterations > _RHO_MAX_ITERATIONS:
                break
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = gmpy2.gcd(abs(x - ys), n)
        if 1 < g < n:
            return int(g)
    raise FactorizationError(int(n))


def _split(n: int, out: dict[int, int]) -> None:
    # n > 1 and free of primes below TRIAL_DIVISION_LIMIT
    if n < TRIAL_DIVISION_LIMIT**2 or is_prime(n):
        if n >= DETERMINISTIC_MR_BOUND:
            # probable prime beyond the deterministic range: refuse to certify it
            raise FactorizationError(n, sorted(out.items()))
        out[n] = out.get(n, 0) + 1
        return
    root, exact = gmpy2.iroot(n, 2)
    if exact:
        _split(int(root), out)
        _split(int(root), out)
        return
    try:
        f = _pollard_brent(n)
    except FactorizationError:
        raise FactorizationError(n, sorted(out.items())) from None
    _split(f, out)
    _split(n // f, out)


@lru_cache(maxsize=4096)
def factorize(n: int) -> Factorization:
    """Exact prime factorization.

    Trial division by the primes below TRIAL_DIVISION_LIMIT, then Pollard-Brent
    on the cofactor; every prime reported is certified by deterministic
    Miller-Rabin (or by having no factor below the square root).
    """
    if n == 0:
        raise PreconditionError("cannot factor 0")
    sign = -1 if n < 0 else 1
    n = abs(n)
    out: dict[int, int] = {}
    for p in _small_primes(TRIAL_DIVISION_LIMIT):
        if p * p > n:
            break
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out[p] = e
    if n > 1:
        _split(n, out)
    return Factorization(sign, tuple(sorted(out.items())))


@dataclass(frozen=True)
class PowerFreePart:
    """``core * root**exponent`` where ``core`` is ``exponent``-th power free."""

    core: int
    root: int
    exponent: int

    @property
    def value(self) -> int:
        return self.core * self.root**self.exponent


def power_free_part(n: int, ell: int) -> PowerFreePart:
    """Canonical decomposition ``n = core * root**ell`` with ``root >= 1``.

    The sign stays on ``core``, so ``-32`` with ``ell = 5`` gives ``(-1, 2)``.
    """
    if n == 0:
        raise PreconditionError("power_free_part of 0 is undefined")
    if ell < 2:
        raise PreconditionError(f"exponent must be >= 2, got {ell}")
    fac = factorize(n)
    core, root = fac.sign, 1
    for p, e in fac.factors:
        q, r = divmod(e, ell)
        core *= p**r
        root *= p**q
    return PowerFreePart(core, root, ell)


def is_power_free(n: int, ell: int) -> bool:
    return n != 0 and all(e < ell for _, e in factorize(n).factors)


def valuation(n: int, p: int) -> int:
    """``ord_p(n)`` for ``n != 0``."""
    if n == 0:
        raise PreconditionError("valuation of 0 is infinite")
    e = 0
    while n % p == 0:
        n //= p
        e += 1
    return e


def is_perfect_ell_power(n: int, ell: int) -> Optional[int]:
    """Integer ``r`` with ``r**ell == n``, or ``None``.

    Negative ``n`` has a root only for odd ``ell``.
    """
    if ell < 2:
        raise PreconditionError(f"exponent must be >= 2, got {ell}")
    if n < 0:
        if ell % 2 == 0:
            return None
        r = is_perfect_ell_power(-n, ell)
        return None if r is None else -r
    root, exact = gmpy2.iroot(n, ell)
    return int(root) if exact else None


def rational_ell_root(x: Fraction, ell: int) -> Optional[Fraction]:
    """Rational ``y`` with ``y**ell == x``, checked on numerator and denominator separately."""
    num = is_perfect_ell_power(x.numerator, ell)
    if num is None:
        return None
    den = is_perfect_ell_power(x.denominator, ell)
    if den is None:
        return None
    return Fraction(num, den)


def rad2(n: int) -> int:
    """Product of the distinct odd primes dividing ``n``."""
    if n == 0:
        raise PreconditionError("rad2 of 0 is undefined")
    out = 1
    for p in factorize(n).primes:
        if p != 2:
            out *= p
    return out


def primorial(k: int, exclude: tuple[int, ...] = ()) -> int:
    """Product of the primes ``q <= k``, skipping any listed in ``exclude``."""
    out = 1
    for q in sieve_primes(k):
        if q not in exclude:
            out *= q
    return out
