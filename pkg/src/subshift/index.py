"""Suffix-array index over one long sample word.

The sample stands in for the (infinite) language of the subshift: every
``lim_{|w|->inf}`` quantity elsewhere in the package is read off growing
windows of this one sample.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .errors import InvalidInput, SampleTooShort
from .words import Word, _check_pattern, is_primitive

MAX_SAMPLE = 10_000_000


def suffix_array(data: np.ndarray) -> tuple[np.ndarray, list[np.ndarray]]:
    """Prefix doubling. Returns the suffix array and the rank array of every level.

    ``levels[j][i]`` ranks ``data[i:i+2**j]`` (truncated at the end of the
    sample); equal ranks mean equal, equally long substrings.
    """
    n = len(data)
    _, rank = np.unique(data, return_inverse=True)
    rank = rank.astype(np.int64)
    levels = [rank.astype(np.int32)]
    order = np.argsort(rank, kind="stable")
    k = 1
    while rank.max() < n - 1:
        second = np.zeros(n, dtype=np.int64)
        second[:n - k] = rank[k:] + 1
        key = rank * (n + 1) + second
        order = np.argsort(key, kind="stable")
        sorted_key = key[order]
        rank = np.empty(n, dtype=np.int64)
        rank[order] = np.concatenate(([0], np.cumsum(sorted_key[1:] != sorted_key[:-1])))
        levels.append(rank.astype(np.int32))
        k *= 2
    return order.astype(np.int64), levels


def lcp_from_levels(sa: np.ndarray, levels: list[np.ndarray]) -> np.ndarray:
    """``lcp[i]`` = longest common prefix of suffixes ``sa[i-1]`` and ``sa[i]``; ``lcp[0] = 0``."""
    n = len(sa)
    lcp = np.zeros(n, dtype=np.int64)
    if n < 2:
        return lcp
    a, b = sa[:-1], sa[1:]
    ell = np.zeros(n - 1, dtype=np.int64)
    # the top level has all ranks distinct, so every lcp is below 2**top
    for j in range(len(levels) - 2, -1, -1):
        ia, ib = a + ell, b + ell
        ok = (ia < n) & (ib < n)
        ra = levels[j][np.minimum(ia, n - 1)]
        rb = levels[j][np.minimum(ib, n - 1)]
        ell += np.where(ok & (ra == rb), 1 << j, 0)
    lcp[1:] = ell
    return lcp


@dataclass(frozen=True)
class OccurrenceList:
    pattern: Word
    positions: tuple[int, ...]

    @property
    def count(self) -> int:
        return len(self.positions)


@dataclass(frozen=True)
class RecurrenceProfile:
    n: int
    R_est: int
    valid: bool


@dataclass(frozen=True)
class FactorGroups:
    """All occurrences of all length-``n`` factors, grouped per factor.

    Factors appear in lexicographic order; ``positions[offsets[g]:offsets[g+1]]``
    are the sorted start positions of factor ``g``.
    """

    n: int
    positions: np.ndarray
    offsets: np.ndarray

    @property
    def size(self) -> int:
        return len(self.offsets) - 1

    @property
    def representatives(self) -> np.ndarray:
        return self.positions[self.offsets[:-1]]

    @property
    def counts(self) -> np.ndarray:
        return np.diff(self.offsets)

    def members(self, g: int) -> np.ndarray:
        return self.positions[self.offsets[g]:self.offsets[g + 1]]


class FactorIndex:
    def __init__(self, sample: Word):
        if len(sample) == 0:
            raise InvalidInput("cannot index an empty sample")
        if len(sample) > MAX_SAMPLE:
            raise InvalidInput(f"sample length {len(sample)} exceeds the cap of {MAX_SAMPLE} symbols")
        self.sample = sample
        self.sample_length = len(sample)
        self.data = sample.array
        self._bytes = sample.data
        sa, levels = suffix_array(self.data)
        self.sa = sa
        self.lcp = lcp_from_levels(sa, levels)
        self.sa.setflags(write=False)
        self.lcp.setflags(write=False)
        self._sa_view = memoryview(np.ascontiguousarray(sa, dtype=np.int64)).cast("B").cast("q")

    def __repr__(self) -> str:
        return f"FactorIndex(sample_length={self.sample_length})"

    @property
    def alphabet(self):
        return self.sample.alphabet

    def word(self, start: int, length: int) -> Word:
        return self.sample[start:start + length]

    def distinct_factor_total(self) -> int:
        n = self.sample_length
        return n * (n + 1) // 2 - int(self.lcp.sum())

    def sa_range(self, v: Word) -> tuple[int, int]:
        _check_pattern(v, self.sample)
        p, m, text, sa = v.data, len(v), self._bytes, self._sa_view
        lo, hi = 0, len(sa)
        while lo < hi:
            mid = (lo + hi) // 2
            s = sa[mid]
            if text[s:s + m] < p:
                lo = mid + 1
            else:
                hi = mid
        first = lo
        hi = len(sa)
        while lo < hi:
            mid = (lo + hi) // 2
            s = sa[mid]
            if text[s:s + m] <= p:
                lo = mid + 1
            else:
                hi = mid
        return first, lo

    def count(self, v: Word) -> int:
        lo, hi = self.sa_range(v)
        return hi - lo

    def positions(self, v: Word) -> np.ndarray:
        lo, hi = self.sa_range(v)
        return np.sort(self.sa[lo:hi])

    def occurrence_positions(self, v: Word) -> OccurrenceList:
        return OccurrenceList(v, tuple(self.positions(v).tolist()))

    def factor_starts(self, n: int) -> np.ndarray:
        """One start position per distinct length-``n`` factor, in lexicographic order."""
        if n < 1:
            raise InvalidInput(f"factor length must be >= 1, got {n}")
        mask = (self.lcp < n) & (self.sa + n <= self.sample_length)
        return self.sa[mask]

    def factor_count(self, n: int) -> int:
        return len(self.factor_starts(n))

    def enumerate_factors(self, n: int) -> Iterator[Word]:
        for s in self.factor_starts(n).tolist():
            yield self.word(s, n)

    def groups(self, n: int) -> FactorGroups:
        if n < 1:
            raise InvalidInput(f"factor length must be >= 1, got {n}")
        gid = np.cumsum(self.lcp < n)
        keep = self.sa + n <= self.sample_length
        gid, pos = gid[keep], self.sa[keep]
        order = np.lexsort((pos, gid))
        gid, pos = gid[order], pos[order]
        starts = np.flatnonzero(np.concatenate(([True], gid[1:] != gid[:-1]))) if len(gid) else np.zeros(0, dtype=np.int64)
        offsets = np.append(starts, len(pos)).astype(np.int64)
        return FactorGroups(n, pos, offsets)

    def max_power(self, v: Word) -> int:
        """Largest ``k`` with ``v**k`` a factor of the sample (``v`` primitive)."""
        if not is_primitive(v):
            raise InvalidInput(f"max_power needs a primitive word, got {v}")
        pos = self.positions(v)
        if len(pos) == 0:
            return 0
        step = np.diff(pos) == len(v)
        best = run = 0
        for s in step.tolist():
            run = run + 1 if s else 0
            best = max(best, run)
        return best + 1

    def recurrence_estimate(self, n: int) -> RecurrenceProfile:
        """Smallest ``L`` such that every length-``L`` window contains every length-``n`` factor.

        Exact: a window ``[s, s+L)`` misses factor ``v`` iff it falls inside
        a gap of the occurrence list of ``v``; the answer is the largest such
        gap plus ``n - 1``, with the sample edges treated as gaps too.
        ``valid`` is set when the bound is witnessed by at least two
        disjoint windows (``R_est <= N/2``).
        """
        N = self.sample_length
        if n < 1 or 4 * n > N:
            raise SampleTooShort(f"recurrence estimate needs 1 <= n <= |sample|/4, got n={n}, |sample|={N}")
        g = self.groups(n)
        first = g.positions[g.offsets[:-1]]
        last = g.positions[g.offsets[1:] - 1]
        R = max(int(first.max()) + n, N - int(last.min()))
        gaps = np.diff(g.positions)
        same = np.ones(len(gaps), dtype=bool)
        same[g.offsets[1:-1] - 1] = False
        if same.any():
            R = max(R, int(gaps[same].max()) + n - 1)
        return RecurrenceProfile(n, R, 2 * R <= N)


def build_index(w: Word) -> FactorIndex:
    return FactorIndex(w)
