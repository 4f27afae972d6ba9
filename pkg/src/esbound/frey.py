"""Frey curves Y^2 = X(X - A)(X + B) built from ternary triples."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .arith import is_prime, primorial, rad2
from .certified import CertifiedReal, sqrt_rational
from .errors import BudgetExceeded, PreconditionError
from .reduction import TernaryTriple, verify_conditions

POINT_COUNT_BUDGET = 10**7
LEVEL_TWO_EXPONENT_MAX = 5


class ReductionType(enum.Enum):
    GOOD = "Good"
    MULTIPLICATIVE = "Multiplicative"
    ADDITIVE = "Additive"


@dataclass(frozen=True)
class FreyCurve:
    A: int
    B: int
    provenance: Optional[TernaryTriple] = None

    def __post_init__(self):
        if self.A == 0 or self.B == 0 or self.A + self.B == 0:
            raise PreconditionError(f"degenerate Frey curve A={self.A}, B={self.B}")

    def roots(self) -> tuple[int, int, int]:
        return 0, self.A, -self.B

    def a_invariants(self) -> tuple[int, int, int, int, int]:
        """(a1, a2, a3, a4, a6) of the expanded model X^3 + (B - A) X^2 - AB X."""
        return 0, self.B - self.A, 0, -self.A * self.B, 0


@dataclass(frozen=True)
class TraceResult:
    q: int
    a_q: int
    point_count: int


@dataclass(frozen=True)
class LevelBound:
    rad2_abc: int
    r_max: int
    level_max: int
    divisor_bound: int
    divides: bool


def frey_curve(t: TernaryTriple) -> FreyCurve:
    A, B, C = t.terms
    curve = FreyCurve(A, B, t)
    assert A + B == -C
    return curve


def discriminant(E: FreyCurve) -> int:
    A, B = E.A, E.B
    return 16 * (A * B * (A + B)) ** 2


def _check_odd_prime(q: int) -> None:
    if q == 2:
        raise PreconditionError("q = 2 is not handled; the level bound covers 2 via r <= 5")
    if not is_prime(q):
        raise PreconditionError(f"q = {q} is not prime")


def reduction_type(E: FreyCurve, q: int) -> ReductionType:
    """Classify reduction at an odd prime from root multiplicities of the cubic mod q."""
    _check_odd_prime(q)
    if discriminant(E) % q:
        return ReductionType.GOOD
    roots = {r % q for r in E.roots()}
    if len(roots) == 1:
        return ReductionType.ADDITIVE
    return ReductionType.MULTIPLICATIVE


def count_points(E: FreyCurve, q: int) -> TraceResult:
    """Projective point count over F_q by tabulating square roots; ``a_q = q + 1 - #E(F_q)``."""
    _check_odd_prime(q)
    if q > POINT_COUNT_BUDGET:
        raise BudgetExceeded(f"q = {q} exceeds point-count budget {POINT_COUNT_BUDGET}")
    if discriminant(E) % q == 0:
        raise PreconditionError(f"E has bad reduction at q = {q}")
    A, B = E.A % q, E.B % q
    xs = np.arange(q, dtype=np.int64)
    fx = xs * ((xs - A) % q) % q * ((xs + B) % q) % q
    sqrt_count = np.bincount(xs * xs % q, minlength=q)
    count = int(sqrt_count[fx].sum()) + 1
    a_q = q + 1 - count
    if a_q * a_q > 4 * q:
        raise AssertionError(f"Hasse bound violated: a_{q} = {a_q}")
    return TraceResult(q, a_q, count)


def level_bound(t: TernaryTriple, k: int, p: int) -> LevelBound:
    """N' <= 2^5 Rad_2(abc), compared against 2^4 times the primes up to k other than p."""
    if not is_prime(p) or not (k < 2 * p <= 2 * k):
        raise PreconditionError(f"p = {p} must be a prime with k/2 < p <= k")
    r = rad2(t.a * t.b * t.c)
    level_max = 2**LEVEL_TWO_EXPONENT_MAX * r
    divisor = 2**4 * primorial(k, exclude=(p,))
    return LevelBound(r, LEVEL_TWO_EXPONENT_MAX, level_max, divisor, (2 * divisor) % level_max == 0)


def conditions_imply_level_divisibility(t: TernaryTriple, k: int, p: int) -> bool:
    """When (ii) and (iii) hold the level bound must divide twice the divisor bound."""
    report = verify_conditions(t, k, p)
    if report.cond_ii.holds and report.cond_iii.holds:
        return level_bound(t, k, p).divides
    return True


def trace_obstruction_bound(p: int, degree: int, prec: Optional[int] = None) -> CertifiedReal:
    """Enclosure of ``(sqrt(p) + 1)^(2 degree)``, the largest possible norm of p + 1 +- c_p."""
    if degree < 0:
        raise PreconditionError("degree must be >= 0")
    if degree == 0:
        return CertifiedReal.exact(1)
    base = (sqrt_rational(p, prec) + 1).round_out(prec)
    lo, hi = base.lower ** (2 * degree), base.upper ** (2 * degree)
    return CertifiedReal(lo, hi)


def log_trace_obstruction_bound(p: int, degree, prec: Optional[int] = None) -> CertifiedReal:
    """Enclosure of ``2 * degree * log(sqrt(p) + 1)``; ``degree`` may be an enclosure."""
    base = (sqrt_rational(p, prec) + 1).round_out(prec)
    return 2 * degree * base.log(prec)


def trace_nonvanishing(p: int) -> bool:
    """p + 1 - 2 sqrt(p) > 0, i.e. (p + 1)^2 > 4p, so p + 1 +- c_p cannot vanish."""
    return (p + 1) ** 2 > 4 * p


def analyze(t: TernaryTriple, qs: list[int], k: Optional[int] = None, p: Optional[int] = None) -> dict:
    """Discriminant, reduction types and traces at the given odd primes, plus the level bound."""
    E = frey_curve(t)
    out = {"curve": E, "discriminant": discriminant(E), "local": []}
    for q in qs:
        rt = reduction_type(E, q)
        trace = count_points(E, q) if rt is ReductionType.GOOD else None
        out["local"].append((q, rt, trace))
    if k is not None and p is not None:
        out["level"] = level_bound(t, k, p)
    return out

