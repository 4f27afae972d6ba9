"""Certified exponent bound log(ell) < 3^k for prime ell > k.

For a prime p in (k/2, k] the level satisfies N' <= 2^4 * prod_{q <= k, q != p} q,
the newform field has degree at most (N' + 1)/12, and ell divides a norm of
size at most (sqrt(p) + 1)^(2 [K:Q]). Together

    log(ell) <= (N' + 1)/6 * log(sqrt(p) + 1),

which is compared against 3^k with interval enclosures.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Optional

from . import config
from .arith import is_prime, primorial, sieve_primes
from .certified import (
    CertifiedReal,
    certified_less,
    log2_enclosure,
    log_rational,
    sqrt_rational,
    theta,
)
from .errors import PrecisionExhausted, PreconditionError, VerificationFailed

THEOREM_K_MIN = 35
EXACT_LEVEL_MAX_K = 200
EXACT_THRESHOLD_MAX_K = 10**4


class Strategy(enum.Enum):
    LARGEST_PRIME = "LargestPrime"
    SCAN_ALL = "ScanAll"


class Verdict(enum.Enum):
    CERTIFIED = "Certified"
    FAILED = "Failed"
    INDETERMINATE = "Indeterminate"


@dataclass(frozen=True)
class PipelineConfig:
    k_min: int = THEOREM_K_MIN
    k_max: int = THEOREM_K_MIN
    p_strategy: Strategy = Strategy.LARGEST_PRIME
    precision: Optional[int] = None
    coefficient_primes: tuple[int, ...] = ()
    allow_small_k: bool = False
    # "auto": exact level for k <= EXACT_LEVEL_MAX_K, log space beyond
    route: str = "auto"
    # 2-exponent of the divisor bound; 5 gives the looser r <= 5 variant
    two_exponent: int = 4

    def bits(self) -> int:
        return config.precision_bits() if self.precision is None else self.precision


@dataclass(frozen=True)
class ExponentBoundReport:
    k: int
    p_chosen: int
    all_p_considered: tuple[int, ...]
    route: str
    comparison: str
    divisor_bound: Optional[int]
    log_divisor_bound: CertifiedReal
    degree_bound: Optional[CertifiedReal]
    log_ell_bound: Optional[CertifiedReal]
    log_log_ell_bound: CertifiedReal
    threshold: Optional[CertifiedReal]
    threshold_log: CertifiedReal
    verdict: Verdict
    precision_bits: int
    theorem_mode: bool
    coefficient_primes: tuple[int, ...] = ()
    coefficient_primes_absorbed: bool = True
    two_exponent: int = 4

    @property
    def log10_ratio(self) -> float:
        """Upper estimate of log10((log-ell bound) / 3^k) from the enclosure endpoints."""
        return (float(self.log_log_ell_bound.upper) - float(self.threshold_log.lower)) / math.log(10)


@dataclass(frozen=True)
class CitationRecord:
    k: int
    settled_by: str
    k_range: tuple[int, int]
    note: str


_SMALL_K = (
    ((2, 4), "Sander", "conjecture proved for 2 <= k <= 4"),
    ((5, 5), "Lakhal-Sander", "case k = 5"),
    ((6, 11), "Bennett-Bruin-Gyory-Hajdu", "conjecture established for 2 <= k <= 11"),
    ((12, 34), "Gyory-Hajdu-Pinter", "conjecture established for 2 <= k <= 34"),
)


def small_k_status(k: int) -> CitationRecord:
    """Which earlier result settles the curve for 2 <= k <= 34 (static data)."""
    for (lo, hi), who, note in _SMALL_K:
        if lo <= k <= hi:
            return CitationRecord(k, who, (lo, hi), note)
    raise PreconditionError(f"k = {k} is outside 2..34")


def select_p(k: int, strategy: Strategy = Strategy.LARGEST_PRIME) -> tuple[int, tuple[int, ...]]:
    """Primes in (k/2, k]; the default pick is the largest."""
    if k < 3:
        raise PreconditionError(f"need k >= 3, got {k}")
    candidates = tuple(q for q in sieve_primes(k) if 2 * q > k)
    if not candidates:
        raise AssertionError(f"no prime in ({k}/2, {k}]")
    return candidates[-1], candidates


def _check_coefficient_primes(k: int, coefficient_primes) -> None:
    for q in coefficient_primes:
        if not is_prime(q):
            raise PreconditionError(f"coefficient prime {q} is not prime")
        if 2 * q > k:
            raise PreconditionError(f"coefficient prime {q} exceeds k/2 = {Fraction(k, 2)}")


def log_divisor_bound(
    k: int, p: int, coefficient_primes=(), prec: Optional[int] = None, two_exponent: int = 4
) -> CertifiedReal:
    """Enclosure of log(2^4 * prod_{q <= k, q != p} q) = 4 log 2 + theta(k) - log p.

    Coefficient primes no larger than k/2 are already in the product, so they
    leave the bound unchanged; larger ones are rejected.
    """
    if not is_prime(p) or not (k < 2 * p <= 2 * k):
        raise PreconditionError(f"p = {p} must be a prime with k/2 < p <= k")
    _check_coefficient_primes(k, coefficient_primes)
    value = two_exponent * log2_enclosure(prec) + theta(k, prec) - log_rational(p, prec)
    return value.round_out(prec)


def _log_sqrt_p_plus_one(p: int, prec: int) -> CertifiedReal:
    return (sqrt_rational(p, prec) + 1).round_out(prec).log(prec).round_out(prec)


def _report_for_p(k: int, p: int, candidates, cfg: PipelineConfig, prec: int) -> ExponentBoundReport:
    route = cfg.route
    if route == "auto":
        route = "exact" if k <= EXACT_LEVEL_MAX_K else "log"
    log_base = _log_sqrt_p_plus_one(p, prec)
    log_div = log_divisor_bound(k, p, cfg.coefficient_primes, prec, cfg.two_exponent)
    divisor = None
    degree = log_ell = None
    if route == "exact":
        divisor = 2**cfg.two_exponent * primorial(k, exclude=(p,))
        level = CertifiedReal.exact(divisor)
        log_level_plus_one = log_rational(divisor + 1, prec)
    else:
        level = None
        if k <= EXACT_THRESHOLD_MAX_K:
            level = log_div.exp(prec).round_out(prec)
        # log(N' + 1) lies in [log N', log N' + 1/N'] and N' >= 1
        slack = Fraction(1) if level is None else 1 / level.lower
        log_level_plus_one = CertifiedReal(log_div.lower, log_div.upper + slack)
    if level is not None:
        degree = (level + 1) / 12
        log_ell = (level + 1) / 6 * log_base
    log_log_ell = (log_level_plus_one - log_rational(6, prec) + log_base.log(prec)).round_out(prec)
    threshold_log = (k * log_rational(3, prec)).round_out(prec)
    if k <= EXACT_THRESHOLD_MAX_K and log_ell is not None:
        threshold = CertifiedReal.exact(3**k)
        outcome = certified_less(log_ell, threshold)
        comparison = "exact"
    else:
        threshold = None
        outcome = certified_less(log_log_ell, threshold_log)
        comparison = "log"
    verdict = {True: Verdict.CERTIFIED, False: Verdict.FAILED, None: Verdict.INDETERMINATE}[outcome]
    return ExponentBoundReport(
        k=k,
        p_chosen=p,
        all_p_considered=tuple(candidates),
        route=route,
        comparison=comparison,
        divisor_bound=divisor,
        log_divisor_bound=log_div,
        degree_bound=degree,
        log_ell_bound=log_ell,
        log_log_ell_bound=log_log_ell,
        threshold=threshold,
        threshold_log=threshold_log,
        verdict=verdict,
        precision_bits=prec,
        theorem_mode=k >= THEOREM_K_MIN,
        coefficient_primes=tuple(cfg.coefficient_primes),
        coefficient_primes_absorbed=True,
        two_exponent=cfg.two_exponent,
    )


def exponent_bound(k: int, cfg: Optional[PipelineConfig] = None) -> ExponentBoundReport:
    """Certified bound on log(ell) for prime ell > k, compared with 3^k.

    Indeterminate comparisons are retried at doubled precision; the report
    comes back Indeterminate only once ``config.MAX_PRECISION_BITS`` is reached.
    """
    cfg = cfg or PipelineConfig(k_min=k, k_max=k)
    if k < THEOREM_K_MIN and not cfg.allow_small_k:
        raise PreconditionError(f"k = {k} < {THEOREM_K_MIN}: outside theorem mode (earlier work covers it)")
    if cfg.route not in ("auto", "exact", "log"):
        raise PreconditionError(f"unknown route {cfg.route!r}")
    _check_coefficient_primes(k, cfg.coefficient_primes)
    p_max, candidates = select_p(k)
    prec = cfg.bits()
    while True:
        if cfg.p_strategy is Strategy.LARGEST_PRIME:
            report = _report_for_p(k, p_max, candidates, cfg, prec)
        else:
            reports = [_report_for_p(k, p, candidates, cfg, prec) for p in candidates]
            report = min(reports, key=lambda r: (r.log_log_ell_bound.upper, r.p_chosen))
        if report.verdict is not Verdict.INDETERMINATE or prec >= config.MAX_PRECISION_BITS:
            return report
        prec *= 2


@dataclass
class RangeSummary:
    reports: list[ExponentBoundReport] = field(default_factory=list)
    max_log10_ratio: float = -math.inf
    argmax_k: Optional[int] = None

    @property
    def all_certified(self) -> bool:
        return all(r.verdict is Verdict.CERTIFIED for r in self.reports)


def _bound_chunk(args: tuple[list[int], PipelineConfig]) -> list[ExponentBoundReport]:
    ks, cfg = args
    return [exponent_bound(k, cfg) for k in ks]


def verify_theorem_range(cfg: PipelineConfig, threads: int = 1) -> RangeSummary:
    """Run the pipeline for every k in [k_min, k_max]; stop at the first non-Certified k."""
    if not THEOREM_K_MIN <= cfg.k_min <= cfg.k_max:
        raise PreconditionError(f"need {THEOREM_K_MIN} <= k_min <= k_max, got [{cfg.k_min}, {cfg.k_max}]")
    # warm the shared theta table once, at the largest k
    theta(cfg.k_max, cfg.bits())
    ks = list(range(cfg.k_min, cfg.k_max + 1))
    summary = RangeSummary()
    if threads <= 1:
        batches = ([exponent_bound(k, cfg)] for k in ks)
    else:
        chunk = max(1, len(ks) // (threads * 8))
        jobs = [(ks[i : i + chunk], cfg) for i in range(0, len(ks), chunk)]
        pool = ProcessPoolExecutor(max_workers=threads)
        batches = pool.map(_bound_chunk, jobs)
    try:
        for batch in batches:
            for report in batch:
                summary.reports.append(report)
                if report.verdict is Verdict.FAILED:
                    raise VerificationFailed(f"log(ell) < 3^k fails at k = {report.k}", report)
                if report.verdict is Verdict.INDETERMINATE:
                    raise PrecisionExhausted(f"indeterminate at k = {report.k} after max precision")
                ratio = report.log10_ratio
                if ratio > summary.max_log10_ratio:
                    summary.max_log10_ratio, summary.argmax_k = ratio, report.k
    finally:
        if threads > 1:
            pool.shutdown(cancel_futures=True)
    return summary


def with_precision(cfg: PipelineConfig, bits: int) -> PipelineConfig:
    return replace(cfg, precision=bits)
