import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from esbound.arith import (
    DETERMINISTIC_MR_BOUND,
    factorize,
    is_perfect_ell_power,
    is_prime,
    power_free_part,
    primorial,
    rad2,
    rational_ell_root,
    sieve_primes,
    valuation,
)
from esbound.errors import BudgetExceeded, FactorizationError, PreconditionError


def trial_division_primes(limit):
    return [n for n in range(2, limit + 1) if all(n % d for d in range(2, int(n**0.5) + 1))]


def trial_division_factor(n):
    n = abs(n)
    out, d = {}, 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def brute_power_free(n, ell):
    """Largest z with z^ell | n by direct search, then the quotient."""
    z = 1
    for cand in range(1, int(round(abs(n) ** (1 / ell))) + 2):
        if n % cand**ell == 0:
            z = cand
    return n // z**ell, z


class TestSieve:
    def test_examples(self):
        assert sieve_primes(10) == [2, 3, 5, 7]
        assert sieve_primes(1) == []
        assert sieve_primes(0) == []
        assert sieve_primes(35) == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31]

    @pytest.mark.parametrize("limit", [2, 3, 4, 97, 100, 1000, 2047])
    def test_matches_trial_division(self, limit):
        assert sieve_primes(limit) == trial_division_primes(limit)

    def test_prime_count_million(self):
        assert len(sieve_primes(10**6)) == 78498

    def test_budget(self):
        with pytest.raises(BudgetExceeded):
            sieve_primes(1000, budget=999)

    def test_budget_from_env(self, monkeypatch):
        monkeypatch.setenv("PPL_SIEVE_LIMIT", "50")
        with pytest.raises(BudgetExceeded):
            sieve_primes(51)
        assert sieve_primes(50)[-1] == 47

    def test_negative_rejected(self):
        with pytest.raises(PreconditionError):
            sieve_primes(-1)


class TestFactorize:
    def test_examples(self):
        f = factorize(224)
        assert (f.sign, f.factors) == (1, ((2, 5), (7, 1)))
        f = factorize(-1)
        assert (f.sign, f.factors) == (-1, ())
        f = factorize(6469693230)
        assert f.factors == tuple((p, 1) for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29))

    def test_matches_trial_division_oracle(self):
        for n in list(range(-300, 0)) + list(range(1, 3000)):
            f = factorize(n)
            assert dict(f.factors) == trial_division_factor(n)
            assert f.sign == (1 if n > 0 else -1)

    def test_zero_rejected(self):
        with pytest.raises(PreconditionError):
            factorize(0)

    def test_round_trip_random(self):
        rng = random.Random(7)
        for _ in range(10**5):
            n = rng.randint(1, 2**40) * rng.choice((1, -1))
            f = factorize(n)
            assert f.value == n
            primes = [p for p, _ in f.factors]
            assert primes == sorted(set(primes))
            assert all(e >= 1 for _, e in f.factors)

    def test_primes_are_prime_against_sympy(self):
        rng = random.Random(11)
        for _ in range(300):
            n = rng.randint(2, 2**80)
            f = factorize(n)
            assert dict(f.factors) == sympy.factorint(n)

    def test_large_prime_powers_and_semiprimes(self):
        p, q = 1_000_003, 998_244_353
        assert factorize(p**3 * q).factors == ((p, 3), (q, 1))
        big = (2**61 - 1) * (2**31 - 1)
        assert factorize(big).factors == ((2**31 - 1, 1), (2**61 - 1, 1))

    def test_uncertifiable_prime_reported(self):
        probable = sympy.nextprime(DETERMINISTIC_MR_BOUND * 10)
        with pytest.raises(FactorizationError) as info:
            factorize(6 * probable)
        assert info.value.residue == probable


def test_is_prime_agrees_with_sympy():
    rng = random.Random(3)
    samples = list(range(0, 5000)) + [rng.randint(1, 10**18) for _ in range(2000)]
    samples += [2**61 - 1, 3215031751, 341550071728321, 3825123056546413051]
    for n in samples:
        assert is_prime(n) == sympy.isprime(n), n


class TestPowerFreePart:
    def test_examples(self):
        pf = power_free_part(384, 5)
        assert (pf.core, pf.root) == (12, 2)
        pf = power_free_part(1, 7)
        assert (pf.core, pf.root) == (1, 1)
        pf = power_free_part(-32, 5)
        assert (pf.core, pf.root) == (-1, 2)

    @pytest.mark.parametrize("ell", [2, 3, 5, 7])
    def test_brute_force_oracle(self, ell):
        for n in list(range(-2000, 0)) + list(range(1, 4000)):
            pf = power_free_part(n, ell)
            assert (pf.core, pf.root) == brute_power_free(n, ell)

    @settings(max_examples=300, deadline=None)
    @given(st.integers(min_value=-(10**15), max_value=10**15).filter(bool), st.sampled_from([2, 3, 5, 7, 11, 13]))
    def test_invariants(self, n, ell):
        pf = power_free_part(n, ell)
        assert pf.core * pf.root**ell == n
        assert pf.root >= 1
        # no prime q has q^ell | core, checked by trial division on |core|
        assert all(e < ell for e in trial_division_factor(pf.core).values())

    def test_zero_rejected(self):
        with pytest.raises(PreconditionError):
            power_free_part(0, 3)


class TestPerfectPowers:
    def test_examples(self):
        assert is_perfect_ell_power(8, 3) == 2
        assert is_perfect_ell_power(-4, 2) is None
        assert is_perfect_ell_power(-27, 3) == -3
        assert is_perfect_ell_power(0, 5) == 0
        assert is_perfect_ell_power(10, 2) is None
        assert rational_ell_root(Fraction(9, 16), 2) == Fraction(3, 4)
        assert rational_ell_root(Fraction(9, 8), 2) is None

    @settings(max_examples=300, deadline=None)
    @given(st.integers(min_value=-(10**12), max_value=10**12), st.integers(min_value=2, max_value=9))
    def test_exact_powers_detected(self, r, ell):
        n = r**ell
        root = is_perfect_ell_power(n, ell)
        assert root is not None and root**ell == n

    @settings(max_examples=300, deadline=None)
    @given(st.integers(min_value=2, max_value=10**12), st.integers(min_value=2, max_value=9))
    def test_near_powers_rejected(self, r, ell):
        assert is_perfect_ell_power(r**ell + 1, ell) is None


def test_rad2_and_valuation():
    assert rad2(224) == 7
    assert rad2(-12) == 3
    assert rad2(1) == 1
    assert rad2(-1575) == 105
    assert valuation(224, 2) == 5
    assert valuation(-243, 3) == 5
    with pytest.raises(PreconditionError):
        rad2(0)


def test_primorial():
    assert primorial(35) == 200560490130
    assert primorial(35, exclude=(31,)) == 6469693230
    assert primorial(1) == 1
