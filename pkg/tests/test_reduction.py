import itertools
import math
import random

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from esbound.errors import PreconditionError
from esbound.reduction import (
    CaseKind,
    TernaryTriple,
    check_identity,
    classify_case,
    decompose_progression,
    gcd_pair_bound_check,
    normalize_triple,
    reduce_at_p,
    verify_conditions,
)


def oracle_branch(n, d, k, ell, p):
    """Independent reading of the divisibility pattern, straight from the terms."""
    if math.gcd(d, p) == p:
        return "PDividesModulus", None
    terms = [n + i * d**ell for i in range(k)]
    idx = [i for i, t in enumerate(terms) if math.gcd(t, p) == p]
    if len(idx) == 1:
        return "SingleFactor", idx[0]
    assert len(idx) == 2
    return "DoubleFactor", idx[0]


def brute_normalize(terms):
    """All 12 signed orderings; first valid one in lexicographic order, sign +1 first."""
    for perm in itertools.permutations(range(3)):
        for sign in (1, -1):
            cand = [sign * terms[j] for j in perm]
            if cand[0] % 4 == 3 and cand[1] % 2 == 0:
                return cand
    return None


class TestExamples:
    def test_single_factor(self):
        triple, case = reduce_at_p(243, 1, 3, 5, 3)
        assert str(case) == "SingleFactor(0)"
        assert triple.as_tuple() == (1, -244, 1, 3, 1, 1)
        report = verify_conditions(triple, 3, 3)
        assert report.cond_i.holds and report.cond_iii.holds and report.cond_iv.holds
        assert not report.cond_ii.holds and report.cond_ii.witness == (61,)

    def test_p_divides_modulus(self):
        triple, case = reduce_at_p(1, 2, 2, 3, 2)
        assert str(case) == "PDividesModulus"
        assert triple.as_tuple() == (1, 1, -9, 2, 1, 1)

    def test_double_factor(self):
        triple, case = reduce_at_p(14, 1, 3, 5, 2)
        assert str(case) == "DoubleFactor(0)"
        assert triple.as_tuple() == (7, -225, 1, 2, 1, 1)
        report = verify_conditions(triple, 3, 2)
        assert report.cond_ii.witness == (5, 7)

    def test_normalize_examples(self):
        t = normalize_triple(TernaryTriple(1, -244, 1, 3, 1, 1, 5))
        assert t.terms == (243, -244, 1)
        t = normalize_triple(TernaryTriple(7, -225, 1, 2, 1, 1, 5))
        assert t.terms == (-225, 224, 1)
        t = normalize_triple(TernaryTriple(15, 10, -25, 1, 1, 1, 3))
        assert t.terms == (3, 2, -5)

    def test_cond_iii_failure(self):
        report = verify_conditions(TernaryTriple(1, 1, -2, 1, 1, 1, 3), 2, 2)
        assert not report.cond_iii.holds and report.cond_iii.witness == (-2,)
        assert not report.cond_iv.holds

    def test_decompose(self):
        dec = decompose_progression(14, 1, 3, 3)
        assert dec.terms == ((14, 1), (15, 1), (2, 2))
        assert gcd_pair_bound_check(dec, 0, 2)


class TestPreconditions:
    @pytest.mark.parametrize(
        "args",
        [
            (2, 2, 3, 5, 2),  # gcd(n, d) != 1
            (-1, 1, 3, 5, 2),  # a term vanishes
            (5, 1, 3, 4, 2),  # ell not prime
            (5, 1, 3, 3, 2),  # ell <= k
            (5, 1, 5, 7, 2),  # p <= k/2
            (5, 1, 5, 7, 7),  # p > k
            (2, 1, 3, 5, 2),  # ord_2(2*3*4) = 3, not 0 mod 5
        ],
    )
    def test_rejected(self, args):
        with pytest.raises(PreconditionError):
            reduce_at_p(*args)

    def test_triple_must_sum_to_zero(self):
        with pytest.raises(PreconditionError):
            TernaryTriple(1, 1, 1, 1, 1, 1, 3)
        with pytest.raises(PreconditionError):
            TernaryTriple(1, -1, 0, 1, 1, 1, 3)


def test_identity_random_tuples():
    rng = random.Random(17)
    for _ in range(10**4):
        n = rng.randint(-(10**9), 10**9)
        d = rng.randint(1, 50)
        ell = rng.choice((3, 5, 7, 11, 13))
        p = rng.choice((2, 3, 5, 7, 11, 13))
        i = rng.randint(0, 20)
        assert check_identity(n, d, ell, i, p) == 0


def test_identity_symbolic():
    n, s, i, p = sympy.symbols("n s i p")
    expr = (n + (i + p) * s) * (n + i * s) - (n + (i + p - 1) * s) * (n + (i + 1) * s) + (p - 1) * s**2
    assert sympy.expand(expr) == 0


def test_corpus_branches_and_conditions(corpus):
    counts = {kind: 0 for kind in CaseKind}
    for inst, triple, case, normalized in corpus:
        kind, index = oracle_branch(inst.n, inst.d, inst.k, inst.ell, inst.p)
        assert case.kind.value == kind and case.index == index
        assert classify_case(inst.n, inst.d, inst.k, inst.ell, inst.p) == case
        counts[case.kind] += 1
        assert sum(triple.terms) == 0
        report = verify_conditions(triple, inst.k, inst.p)
        assert report.cond_i.holds and report.cond_iii.holds and report.cond_iv.holds
        # normalization only rescales the terms by the common gcd and permutes/negates them
        g = math.gcd(*triple.terms)
        assert sorted(abs(x) for x in normalized.terms) == sorted(abs(x) // g for x in triple.terms)
    assert all(c == 100 for c in counts.values())


def coprime_zero_sum(rng):
    while True:
        x = rng.randint(-(10**6), 10**6)
        y = rng.randint(-(10**6), 10**6)
        z = -x - y
        if 0 not in (x, y, z) and math.gcd(x, y) == 1:
            return x, y, z


def test_normalize_against_brute_force():
    rng = random.Random(29)
    done = 0
    while done < 10**4:
        x, y, z = coprime_zero_sum(rng)
        g = rng.choice((1, 1, 2, 3, 6, 10))
        # exponent 3 keeps variables at 1 while coefficients carry the terms
        try:
            t = TernaryTriple(g * x, g * y, g * z, 1, 1, 1, 3)
        except PreconditionError:
            continue
        expected = brute_normalize([x, y, z])
        if expected is None:
            with pytest.raises(AssertionError):
                normalize_triple(t)
        else:
            assert list(normalize_triple(t).terms) == expected
        done += 1


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 10**4), st.integers(1, 10**4), st.integers(1, 50), st.sampled_from([3, 5, 7]))
def test_normalize_preserves_equation(x, y, g, ell):
    if math.gcd(x, y) != 1:
        return
    t = TernaryTriple(g * x, g * y, -g * (x + y), 1, 1, 1, ell)
    out = normalize_triple(t)
    assert sum(out.terms) == 0
    assert math.gcd(*out.terms) == 1
    assert out.terms[0] % 4 == 3 and out.terms[1] % 2 == 0
