"""From a progression n + i d^ell to a ternary equation a u^ell + b v^ell + c w^ell = 0.

``reduce_at_p`` follows the three branches of the construction: p | d, p
dividing a single term, and p dividing two terms i and i+p. ``normalize_triple``
then removes the common factor of the three terms and fixes the 2-adic shape
needed for the Frey curve.
"""

from __future__ import annotations

import enum
import itertools
import math
import random
from dataclasses import dataclass, field
from typing import Iterator, Optional

from .arith import factorize, is_prime, power_free_part, valuation
from .errors import PreconditionError


@dataclass(frozen=True)
class ApDecomposition:
    k: int
    ell: int
    n: int
    d: int
    terms: tuple[tuple[int, int], ...]  # (a_i, z_i)

    def values(self) -> list[int]:
        step = self.d**self.ell
        return [self.n + i * step for i in range(self.k)]


@dataclass(frozen=True)
class TernaryTriple:
    a: int
    b: int
    c: int
    u: int
    v: int
    w: int
    ell: int

    def __post_init__(self):
        if 0 in (self.a, self.b, self.c, self.u, self.v, self.w):
            raise PreconditionError(f"triple entries must be nonzero: {self.coefficients + self.variables}")
        if sum(self.terms) != 0:
            raise PreconditionError(f"a u^l + b v^l + c w^l = {sum(self.terms)} != 0")

    @property
    def coefficients(self) -> tuple[int, int, int]:
        return self.a, self.b, self.c

    @property
    def variables(self) -> tuple[int, int, int]:
        return self.u, self.v, self.w

    @property
    def terms(self) -> tuple[int, int, int]:
        ell = self.ell
        return self.a * self.u**ell, self.b * self.v**ell, self.c * self.w**ell

    def as_tuple(self) -> tuple[int, int, int, int, int, int]:
        return self.a, self.b, self.c, self.u, self.v, self.w


class CaseKind(enum.Enum):
    P_DIVIDES_MODULUS = "PDividesModulus"
    SINGLE_FACTOR = "SingleFactor"
    DOUBLE_FACTOR = "DoubleFactor"


@dataclass(frozen=True)
class ReductionCase:
    kind: CaseKind
    index: Optional[int] = None

    def __str__(self) -> str:
        if self.index is None:
            return self.kind.value
        return f"{self.kind.value}({self.index})"


@dataclass(frozen=True)
class Condition:
    holds: bool
    witness: tuple = ()


@dataclass(frozen=True)
class ConditionReport:
    cond_i: Condition
    cond_ii: Condition
    cond_iii: Condition
    cond_iv: Condition

    def items(self):
        return (("i", self.cond_i), ("ii", self.cond_ii), ("iii", self.cond_iii), ("iv", self.cond_iv))


def _check_progression(n: int, d: int, k: int, ell: int) -> None:
    if k < 2:
        raise PreconditionError(f"k must be >= 2, got {k}")
    if d < 1:
        raise PreconditionError(f"d must be >= 1, got {d}")
    if not is_prime(ell):
        raise PreconditionError(f"ell = {ell} is not prime")
    if math.gcd(n, d) != 1:
        raise PreconditionError(f"gcd(n,d) = gcd({n}, {d}) != 1")
    step = d**ell
    for i in range(k):
        if n + i * step == 0:
            raise PreconditionError(f"term {i} vanishes: n = -{i} d^ell")


def decompose_progression(n: int, d: int, k: int, ell: int) -> ApDecomposition:
    """Write every term as ``n + i d^ell = a_i z_i^ell`` with a_i ell-th power free."""
    _check_progression(n, d, k, ell)
    step = d**ell
    terms = []
    for i in range(k):
        part = power_free_part(n + i * step, ell)
        terms.append((part.core, part.root))
    return ApDecomposition(k, ell, n, d, tuple(terms))


def gcd_pair_bound_check(dec: ApDecomposition, i: int, j: int) -> bool:
    """Whether gcd(n + i d^ell, n + j d^ell) divides j - i."""
    if not 0 <= i < j <= dec.k - 1:
        raise PreconditionError(f"need 0 <= i < j <= k-1, got i={i}, j={j}")
    vals = dec.values()
    return (j - i) % math.gcd(vals[i], vals[j]) == 0


def check_identity(n: int, d: int, ell: int, i: int, p: int) -> int:
    """Evaluate the quadratic identity linking terms i, i+1, i+p-1, i+p; always 0."""
    s = d**ell
    return (n + (i + p) * s) * (n + i * s) - (n + (i + p - 1) * s) * (n + (i + 1) * s) + (p - 1) * s * s


def classify_case(n: int, d: int, k: int, ell: int, p: int) -> ReductionCase:
    """Branch selected by the p-divisibility pattern of d and the k terms."""
    if d % p == 0:
        return ReductionCase(CaseKind.P_DIVIDES_MODULUS)
    step = d**ell
    hits = [i for i in range(k) if (n + i * step) % p == 0]
    if len(hits) == 1:
        return ReductionCase(CaseKind.SINGLE_FACTOR, hits[0])
    if len(hits) == 2 and hits[1] - hits[0] == p:
        return ReductionCase(CaseKind.DOUBLE_FACTOR, hits[0])
    raise AssertionError(f"impossible p-divisibility pattern {hits} for p={p}, k={k}")


def reduce_at_p(n: int, d: int, k: int, ell: int, p: int) -> tuple[TernaryTriple, ReductionCase]:
    """Produce a ternary triple with p coprime to abc and p dividing exactly one of u, v, w.

    Only the p-adic part of the global hypothesis is required: the p-valuation
    of the product of the k terms must be a multiple of ell.
    """
    _check_progression(n, d, k, ell)
    if ell <= k:
        raise PreconditionError(f"ell = {ell} must exceed k = {k}")
    if not is_prime(p) or not (k < 2 * p <= 2 * k):
        raise PreconditionError(f"p = {p} must be a prime with k/2 < p <= k")
    values = [n + i * d**ell for i in range(k)]
    total = sum(valuation(t, p) for t in values)
    if total % ell:
        raise PreconditionError(f"ord_p of the product is {total}, not a multiple of ell = {ell}")
    dec = decompose_progression(n, d, k, ell)
    a = [t[0] for t in dec.terms]
    z = [t[1] for t in dec.terms]
    case = classify_case(n, d, k, ell, p)
    if case.kind is CaseKind.P_DIVIDES_MODULUS:
        # d^l + a_0 z_0^l - a_1 z_1^l = 0
        triple = TernaryTriple(1, a[0], -a[1], d, z[0], z[1], ell)
    elif case.kind is CaseKind.SINGLE_FACTOR:
        i = case.index
        if i < k - 1:
            triple = TernaryTriple(a[i], -a[i + 1], 1, z[i], z[i + 1], d, ell)
        else:
            triple = TernaryTriple(a[i], -a[i - 1], -1, z[i], z[i - 1], d, ell)
    else:
        i = case.index
        first = power_free_part(a[i + p] * a[i], ell)
        second = power_free_part(a[i + p - 1] * a[i + 1], ell)
        third = power_free_part(p - 1, ell)
        triple = TernaryTriple(
            first.core,
            -second.core,
            third.core,
            first.root * z[i + p] * z[i],
            second.root * z[i + p - 1] * z[i + 1],
            third.root * d * d,
            ell,
        )
    return triple, case


def _divide_out(coef: int, var: int, ell: int, q: int, e: int) -> tuple[int, int]:
    """Remove q^e from coef * var^ell, keeping coef ell-th power free."""
    ec, ev = valuation(coef, q), valuation(var, q)
    total = ec + ell * ev - e
    if total < 0:
        raise AssertionError(f"{q}^{e} does not divide the term")
    hi, lo = divmod(total, ell)
    return coef // q**ec * q**lo, var // q**ev * q**hi


def normalize_triple(t: TernaryTriple) -> TernaryTriple:
    """Make the three terms coprime, then permute and negate so term1 = 3 mod 4 and term2 is even.

    Assignments are tried in lexicographic permutation order, sign +1 before -1.
    """
    ell = t.ell
    pairs = [(t.a, t.u), (t.b, t.v), (t.c, t.w)]
    g = math.gcd(*t.terms)
    if g > 1:
        for q, e in factorize(g).factors:
            pairs = [_divide_out(c, v, ell, q, e) for c, v in pairs]
    terms = [c * v**ell for c, v in pairs]
    for x, y in itertools.combinations(terms, 2):
        if math.gcd(x, y) != 1:
            raise AssertionError(f"terms {terms} not pairwise coprime after removing gcd")
    for perm in itertools.permutations(range(3)):
        for sign in (1, -1):
            t1, t2 = sign * terms[perm[0]], sign * terms[perm[1]]
            if t1 % 4 == 3 and t2 % 2 == 0:
                (a, u), (b, v), (c, w) = (pairs[j] for j in perm)
                return TernaryTriple(sign * a, sign * b, sign * c, u, v, w, ell)
    raise AssertionError(f"no valid 2-adic assignment for terms {terms}")


def verify_conditions(t: TernaryTriple, k: int, p: int) -> ConditionReport:
    """Check the four properties of a triple independently, with witnesses on failure."""
    ell = t.ell
    facs = [factorize(c) for c in t.coefficients]
    high_powers = tuple(sorted({q for f in facs for q, e in f.factors if e >= ell}))
    big_primes = tuple(sorted({q for f in facs for q in f.primes if q > k}))
    p_coefs = tuple(c for c in t.coefficients if c % p == 0)
    p_vars = tuple(name for name, x in zip("uvw", t.variables) if x % p == 0)
    return ConditionReport(
        cond_i=Condition(not high_powers, high_powers),
        cond_ii=Condition(not big_primes, big_primes),
        cond_iii=Condition(not p_coefs, p_coefs),
        cond_iv=Condition(len(p_vars) == 1, p_vars),
    )


# synthetic instances ------------------------------------------------------------


@dataclass(frozen=True)
class SyntheticInstance:
    n: int
    d: int
    k: int
    ell: int
    p: int
    kind: CaseKind
    index: Optional[int] = field(default=None)


def _primes_between(lo: int, hi: int) -> list[int]:
    return [q for q in range(lo + 1, hi + 1) if is_prime(q)]


def synthetic_instance(rng: random.Random, kind: CaseKind, k_range=(3, 8)) -> SyntheticInstance:
    """An input (n, d, k, ell, p) satisfying reduce_at_p's preconditions and landing in ``kind``."""
    while True:
        k = rng.randint(*k_range)
        p = rng.choice(_primes_between(k // 2, k))
        ell = rng.choice(_primes_between(k, k + 12))
        if kind is CaseKind.P_DIVIDES_MODULUS:
            d = p * rng.randint(1, 3)
            n = rng.choice((-1, 1)) * rng.randint(1, 10**6)
            index = None
        else:
            d = rng.randint(1, 4)
            if d % p == 0:
                continue
            step = d**ell
            t = rng.randint(1, 200) * rng.choice((-1, 1))
            if t % p == 0:
                continue
            if kind is CaseKind.SINGLE_FACTOR:
                # only index i in [k-p, p-1] has no partner i +- p inside the window
                index = rng.randint(k - p, p - 1)
                n = t * p**ell - index * step
            else:
                if p == k:
                    continue
                index = rng.randint(0, k - 1 - p)
                # one term gets valuation ell-1, its partner exactly 1
                if rng.random() < 0.5:
                    n = t * p ** (ell - 1) - index * step
                else:
                    n = t * p ** (ell - 1) - (index + p) * step
        if math.gcd(n, d) != 1:
            continue
        if any(n + i * d**ell == 0 for i in range(k)):
            continue
        return SyntheticInstance(n, d, k, ell, p, kind, index)


def synthetic_instances(count: int, seed: int = 0) -> Iterator[SyntheticInstance]:
    """Deterministic corpus cycling through the three branches."""
    rng = random.Random(seed)
    kinds = list(CaseKind)
    for j in range(count):
        yield synthetic_instance(rng, kinds[j % 3])
