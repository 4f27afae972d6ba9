from fractions import Fraction

import mpmath
import pytest
import sympy

from esbound.bound import (
    PipelineConfig,
    Strategy,
    Verdict,
    exponent_bound,
    log_divisor_bound,
    select_p,
    small_k_status,
    verify_theorem_range,
    with_precision,
)
from esbound.errors import PreconditionError


def mp(x):
    x = Fraction(x)
    return mpmath.mpf(x.numerator) / x.denominator


def oracle_log_ell(k, p, two_exponent=4):
    """(N' + 1)/6 * log(sqrt(p) + 1) with N' from sympy's primorial."""
    level = 2**two_exponent * sympy.primorial(sympy.primepi(k), nth=True) // p
    with mpmath.workprec(300):
        return level, (level + 1) / mpmath.mpf(6) * mpmath.log(mpmath.sqrt(p) + 1)


class TestSelectP:
    def test_examples(self):
        assert select_p(35) == (31, (19, 23, 29, 31))
        assert select_p(3) == (3, (2, 3))
        assert select_p(36)[0] == 31

    @pytest.mark.parametrize("k", [3, 10, 100, 1000, 10007])
    def test_candidates_are_exactly_primes_in_window(self, k):
        _, cands = select_p(k)
        assert list(cands) == [q for q in sympy.primerange(k // 2 + 1, k + 1) if 2 * q > k]

    def test_rejects_tiny_k(self):
        with pytest.raises(PreconditionError):
            select_p(2)


class TestLogDivisorBound:
    def test_matches_log_of_exact_product(self):
        for k, p in ((35, 31), (35, 19), (100, 97), (200, 199)):
            level = 16 * sympy.primorial(sympy.primepi(k), nth=True) // p
            r = log_divisor_bound(k, p)
            with mpmath.workprec(300):
                assert mp(r.lower) <= mpmath.log(level) <= mp(r.upper)

    def test_coefficient_primes(self):
        base = log_divisor_bound(100, 97)
        assert log_divisor_bound(100, 97, (2, 3, 5, 7)) == base
        with pytest.raises(PreconditionError):
            log_divisor_bound(100, 97, (53,))
        with pytest.raises(PreconditionError):
            log_divisor_bound(100, 97, (9,))

    def test_p_window(self):
        with pytest.raises(PreconditionError):
            log_divisor_bound(35, 17)


class TestSpotValues:
    def test_k35(self):
        r = exponent_bound(35)
        level, oracle = oracle_log_ell(35, 31)
        assert r.p_chosen == 31 and r.divisor_bound == 103515091680 == level
        assert r.route == "exact" and r.comparison == "exact"
        with mpmath.workprec(300):
            assert mp(r.log_ell_bound.lower) <= oracle <= mp(r.log_ell_bound.upper)
        assert abs(float(r.log_ell_bound.midpoint) / 3.25e10 - 1) < 0.01
        assert r.threshold.lower == 3**35 == 50031545098999707
        assert r.log_ell_bound.upper < 3**35
        assert r.verdict is Verdict.CERTIFIED

    def test_small_k_needs_flag(self):
        with pytest.raises(PreconditionError):
            exponent_bound(20)
        r = exponent_bound(20, PipelineConfig(k_min=20, k_max=20, allow_small_k=True))
        assert not r.theorem_mode

    def test_k_large_uses_log_comparison(self):
        r = exponent_bound(20000)
        assert r.route == "log" and r.comparison == "log"
        assert r.verdict is Verdict.CERTIFIED


def test_scan_all_never_worse():
    for k in range(35, 501, 7):
        largest = exponent_bound(k)
        cfg = PipelineConfig(k_min=k, k_max=k, p_strategy=Strategy.SCAN_ALL)
        scanned = exponent_bound(k, cfg)
        assert scanned.log_log_ell_bound.upper <= largest.log_log_ell_bound.upper
        assert scanned.p_chosen in largest.all_p_considered


def test_exact_and_log_routes_agree():
    for k in range(35, 201):
        exact = exponent_bound(k, PipelineConfig(k_min=k, k_max=k, route="exact"))
        logr = exponent_bound(k, PipelineConfig(k_min=k, k_max=k, route="log"))
        assert exact.log_log_ell_bound.overlaps(logr.log_log_ell_bound)
        assert exact.verdict is logr.verdict is Verdict.CERTIFIED


@pytest.mark.parametrize("bits", [64, 128, 512])
def test_precision_robust(bits):
    for k in (35, 150, 1200):
        cfg = with_precision(PipelineConfig(k_min=k, k_max=k), bits)
        r = exponent_bound(k, cfg)
        assert r.verdict is Verdict.CERTIFIED
        assert r.precision_bits >= bits


def test_two_exponent_five_also_certified():
    r = exponent_bound(35, PipelineConfig(two_exponent=5))
    assert r.divisor_bound == 2 * 103515091680
    assert r.verdict is Verdict.CERTIFIED


def test_verify_small_range():
    summary = verify_theorem_range(PipelineConfig(k_min=35, k_max=100))
    assert summary.all_certified and len(summary.reports) == 66
    assert summary.argmax_k is not None and summary.max_log10_ratio < 0
    with pytest.raises(PreconditionError):
        verify_theorem_range(PipelineConfig(k_min=34, k_max=40))


def test_verify_threads_agree():
    cfg = PipelineConfig(k_min=35, k_max=120)
    one = verify_theorem_range(cfg)
    two = verify_theorem_range(cfg, threads=2)
    assert [r.log_log_ell_bound for r in one.reports] == [r.log_log_ell_bound for r in two.reports]


def test_small_k_status():
    assert small_k_status(3).settled_by == "Sander"
    assert small_k_status(5).settled_by == "Lakhal-Sander"
    assert small_k_status(11).k_range == (6, 11)
    assert small_k_status(34).k_range == (12, 34)
    with pytest.raises(PreconditionError):
        small_k_status(35)
