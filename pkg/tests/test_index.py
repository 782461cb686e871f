import itertools
import random

import numpy as np
import pytest

from subshift.errors import InvalidInput, SampleTooShort
from subshift.generators import periodic_word, substitution_fixed_point, THUE_MORSE
from subshift.index import FactorIndex, build_index
from subshift.words import Alphabet, Word, all_factors, factors

from conftest import AB, ABC, BIN, fib_string, tm_string


def naive_positions(v, w):
    return [i for i in range(len(w) - len(v) + 1) if w[i:i + len(v)] == v]


def brute_recurrence(w, n):
    """Smallest L with every length-L window containing every length-n factor."""
    fs = {w[i:i + n] for i in range(len(w) - n + 1)}
    for L in range(n, len(w) + 1):
        if all(all(f in w[s:s + L] for f in fs) for s in range(len(w) - L + 1)):
            return L


def test_build_examples():
    naive = {"abaab"[i:j] for i in range(5) for j in range(i + 1, 6)}
    assert len(naive) == 11
    assert build_index(AB.word("abaab")).distinct_factor_total() == len(all_factors(AB.word("abaab"))) == 11
    assert build_index(AB.word("a")).distinct_factor_total() == 1
    ix = build_index(AB.word("aaaa"))
    assert ix.distinct_factor_total() == 4
    with pytest.raises(InvalidInput):
        build_index(AB.word(""))


def test_count_and_positions_examples():
    ix = FactorIndex(AB.word("abaab"))
    assert ix.count(AB.word("ab")) == 2
    assert ix.count(AB.word("abaab")) == 1
    assert ix.count(AB.word("bb")) == 0
    assert FactorIndex(AB.word("abaababa")).occurrence_positions(AB.word("ab")).positions == (0, 3, 5)
    assert FactorIndex(AB.word("aaa")).occurrence_positions(AB.word("aa")).positions == (0, 1)
    ixc = FactorIndex(Word(Alphabet.of("abcd"), bytes([0, 1, 2])))
    assert ixc.occurrence_positions(ixc.alphabet.word("d")).positions == ()
    with pytest.raises(InvalidInput):
        ix.count(AB.word(""))


def test_enumerate_examples():
    assert [str(w) for w in FactorIndex(AB.word("abab")).enumerate_factors(2)] == ["ab", "ba"]
    assert [str(w) for w in FactorIndex(AB.word("aaaa")).enumerate_factors(3)] == ["aaa"]
    assert list(FactorIndex(AB.word("ab")).enumerate_factors(3)) == []


def test_max_power_examples():
    tm = FactorIndex(BIN.word(tm_string(64)))
    assert tm.count(BIN.word("0101")) >= 1 and tm.count(BIN.word("010101")) == 0
    assert tm.max_power(BIN.word("01")) == 2
    assert FactorIndex(AB.word("aaaa")).max_power(AB.word("a")) == 4
    assert FactorIndex(ABC.word("abcabc")).max_power(ABC.word("abc")) == 2
    with pytest.raises(InvalidInput):
        tm.max_power(BIN.word("0101"))


def test_recurrence_examples():
    w = "ab" * 8
    # every length-3 window of (ab)^8 already holds "ab" and "ba"
    assert brute_recurrence(w, 2) == 3
    assert FactorIndex(AB.word(w)).recurrence_estimate(2).R_est == 3
    assert FactorIndex(AB.word("a" * 40)).recurrence_estimate(1).R_est == 1
    fib = fib_string(10**4)
    assert brute_recurrence(fib[:300], 1) == 3
    assert FactorIndex(AB.word(fib)).recurrence_estimate(1).R_est == 3
    with pytest.raises(SampleTooShort):
        FactorIndex(AB.word(w)).recurrence_estimate(5)


def _check_against_naive(s, alphabet, rng, patterns=20):
    ix = FactorIndex(alphabet.word(s))
    for n in range(1, min(len(s), 12) + 1):
        expected = sorted({s[i:i + n] for i in range(len(s) - n + 1)})
        assert [str(w) for w in ix.enumerate_factors(n)] == expected
    for _ in range(patterns):
        m = rng.randint(1, 6)
        if rng.random() < 0.7 and len(s) >= m:
            i = rng.randrange(len(s) - m + 1)
            v = s[i:i + m]
        else:
            v = "".join(rng.choice(alphabet.symbols) for _ in range(m))
        pos = naive_positions(v, s)
        assert ix.count(alphabet.word(v)) == len(pos)
        assert list(ix.occurrence_positions(alphabet.word(v)).positions) == pos


def test_oracle_equivalence_random():
    rng = random.Random(1)
    for _ in range(200):
        A = rng.choice([AB, ABC])
        n = rng.randint(1, 500)
        s = "".join(rng.choice(A.symbols) for _ in range(n))
        _check_against_naive(s, A, rng, patterns=5)


def test_oracle_equivalence_exhaustive_small():
    rng = random.Random(2)
    for n in range(1, 13):
        for t in itertools.product("ab", repeat=n):
            s = "".join(t)
            ix = FactorIndex(AB.word(s))
            for m in (1, 2, 3):
                got = [str(w) for w in ix.enumerate_factors(m)]
                assert got == sorted({s[i:i + m] for i in range(len(s) - m + 1)})
            v = s[rng.randrange(n):][:rng.randint(1, 3)]
            assert list(ix.positions(AB.word(v))) == naive_positions(v, s)


def test_recurrence_matches_bruteforce_and_is_monotone():
    rng = random.Random(3)
    for _ in range(40):
        s = "".join(rng.choice("ab") for _ in range(rng.randint(8, 60)))
        ix = FactorIndex(AB.word(s))
        prev = 0
        for n in range(1, len(s) // 4 + 1):
            R = ix.recurrence_estimate(n).R_est
            assert R == brute_recurrence(s, n)
            assert R >= max(n, prev)
            prev = R


def test_periodic_complexity():
    for base, k in [("abc", 10), ("aab", 12), ("abaab", 8)]:
        ix = FactorIndex(ABC.word(base * k))
        for n in range(len(base), (k - 2) * len(base) + 1):
            assert ix.factor_count(n) == len(base)


def test_max_power_consistency(fib_1e4_index):
    ix = fib_1e4_index
    for n in range(1, 9):
        for v in ix.enumerate_factors(n):
            from subshift.words import is_primitive, power
            if not is_primitive(v):
                continue
            k = ix.max_power(v)
            assert ix.count(power(v, k)) >= 1
            assert ix.count(power(v, k + 1)) == 0


def test_groups_partition_all_windows(fib_1e4_index):
    g = fib_1e4_index.groups(7)
    assert g.counts.sum() == fib_1e4_index.sample_length - 7 + 1
    assert g.size == fib_1e4_index.factor_count(7) == 8


def test_concurrent_queries(fib_1e4_index):
    from concurrent.futures import ThreadPoolExecutor

    words = list(fib_1e4_index.enumerate_factors(6))
    with ThreadPoolExecutor(4) as pool:
        counts = list(pool.map(fib_1e4_index.count, words))
    assert counts == [fib_1e4_index.count(w) for w in words]
