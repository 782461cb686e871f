"""Return words, u-partitions, topological occurrence numbers and the
return-length statistics m(n), kappa and the highest power N."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InsufficientSample, InvalidInput, InvariantViolation
from .index import FactorIndex
from .words import Word, _check_pattern, count_occurrences, naive_positions


@dataclass(frozen=True)
class ReturnWordSet:
    base: Word
    words: frozenset[Word]
    # heuristic: a finite sample cannot certify that no return word is missing
    complete_within_sample: bool

    def sorted(self) -> list[Word]:
        return sorted(self.words, key=lambda z: (len(z), z.data))


@dataclass(frozen=True)
class UPartition:
    host: Word
    base: Word
    prefix: Word
    blocks: tuple[Word, ...]
    suffix: Word

    @property
    def l(self) -> int:
        return len(self.blocks)

    def check(self) -> None:
        """Raise :class:`InvariantViolation` unless every side condition holds."""
        u = self.base
        joined = self.prefix.data + b"".join(b.data for b in self.blocks) + self.suffix.data
        if joined != self.host.data:
            raise InvariantViolation("u-partition does not reassemble the host")
        if self.l != count_occurrences(u, self.host):
            raise InvariantViolation("number of blocks differs from the occurrence count of u")
        if self.l == 0:
            return
        if len(self.prefix) + len(self.blocks[0]) == 0:
            raise InvariantViolation("a u_1 is empty")
        if self.blocks[-1] != u:
            raise InvariantViolation("last block is not u")
        tail = self.suffix.data
        for block in reversed(self.blocks):
            tail = block.data + tail
            if not tail.startswith(u.data):
                raise InvariantViolation("u is not a prefix of u_j ... u_l b")


@dataclass(frozen=True)
class ReturnStats:
    n: int
    m: int
    kappa_est: float
    N_est: int
    skipped: int = 0  # length-n factors seen only once (non-strict mode)


def is_return_word(z: Word, u: Word) -> bool:
    if len(z) == 0:
        return False
    zu = z + u
    return zu.startswith(u) and count_occurrences(u, zu) == 2


def return_words(index: FactorIndex, u: Word) -> ReturnWordSet:
    pos = index.positions(u)
    if len(pos) < 2:
        raise InsufficientSample(f"return words of {u} need two occurrences, found {len(pos)}")
    text = index.sample.data
    found = {text[a:b] for a, b in zip(pos[:-1].tolist(), pos[1:].tolist())}
    words = frozenset(Word(u.alphabet, z) for z in found)
    complete = 4 * len(u) <= index.sample_length and index.recurrence_estimate(len(u)).valid
    return ReturnWordSet(u, words, complete)


def u_partition(host: Word, u: Word) -> UPartition:
    pos = naive_positions(u, host)
    eps = host[0:0]
    if not pos:
        return UPartition(host, u, host, (), eps)
    bounds = pos + [pos[-1] + len(u)]
    blocks = tuple(host[a:b] for a, b in zip(bounds[:-1], bounds[1:]))
    return UPartition(host, u, host[:pos[0]], blocks, host[bounds[-1]:])


def p_topological(z: Word, u: Word, w: Word) -> int:
    """Number of blocks ``u_j`` (``j = 1..l``) of the u-partition of ``w`` equal to ``z``."""
    _check_pattern(z, w)
    return sum(1 for b in u_partition(w, u).blocks if b == z)


def p_return_blocks(z: Word, u: Word, w: Word) -> int:
    """As :func:`p_topological` but over the return-word blocks ``u_1..u_{l-1}`` only."""
    _check_pattern(z, w)
    return sum(1 for b in u_partition(w, u).blocks[:-1] if b == z)


def verify_prop_frequenz(index: FactorIndex, z: Word, u: Word, w: Word) -> bool:
    """Check that return-word blocks equal to ``z`` are counted by occurrences of ``z u``.

    The closing block ``u_l = u`` is not a return word; when ``z == u`` the
    literal count over ``j = 1..l`` exceeds ``#_{zu}(w)`` by one, so the
    comparison runs over the return-word blocks.
    """
    if not is_return_word(z, u) or index.count(z + u) == 0:
        raise InvalidInput(f"{z} is not an observed return word of {u}")
    if len(w) == 0 or index.count(w) == 0:
        raise InvalidInput(f"{w!r} is not a factor of the sample")
    return p_return_blocks(z, u, w) == count_occurrences(z + u, w)


def min_return_lengths(index: FactorIndex, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Per length-``n`` factor (lexicographic order): minimal gap between
    consecutive occurrences, and the representative start. Factors seen
    once get gap 0."""
    g = index.groups(n)
    gaps = np.diff(g.positions)
    inner = np.ones(len(gaps), dtype=bool)
    inner[g.offsets[1:-1] - 1] = False
    big = index.sample_length + 1
    gaps = np.where(inner, gaps, big)
    starts = g.offsets[:-1]
    counts = g.counts
    out = np.full(g.size, big, dtype=np.int64)
    if len(gaps):
        # reduceat over the gap slice of every group with at least two members
        multi = counts >= 2
        out[multi] = np.minimum.reduceat(gaps, starts[multi])
    out[counts < 2] = 0
    return out, g.representatives


def longest_period_run(data: np.ndarray, p: int) -> int:
    """Length of the longest stretch ``i..i+r-1`` with ``data[j] == data[j+p]``."""
    if p >= len(data):
        return 0
    eq = data[p:] == data[:-p]
    breaks = np.flatnonzero(~eq)
    edges = np.concatenate(([-1], breaks, [len(eq)]))
    return int(np.diff(edges).max() - 1)


def period_runs(data: np.ndarray, pmax: int) -> list[int]:
    """``runs[p]`` for ``p = 0..pmax`` (``runs[0]`` unused)."""
    return [0] + [longest_period_run(data, p) for p in range(1, pmax + 1)]


def m_by_periods(data: np.ndarray, n: int) -> int | None:
    """Minimal return length of length-``n`` factors via repeated stretches:
    ``v`` at ``i`` and ``i+p`` iff ``data[j] == data[j+p]`` on ``[i, i+n)``."""
    for p in range(1, len(data)):
        if longest_period_run(data, p) >= n:
            return p
    return None


def kappa_and_power(data: np.ndarray, n: int) -> tuple[float, int]:
    """``kappa_est = max_{k<=n} k / m(k)`` and ``N_est`` = largest exponent of a
    power ``v**k`` in the sample with ``|v| <= n``.

    The maximum over all ``v`` equals the maximum over primitive ``v``: a
    power of ``u**j`` is a larger power of ``u``.
    """
    N = len(data)
    runs = {}
    N_est = 1
    for p in range(1, min(n, N - 1) + 1):
        runs[p] = longest_period_run(data, p)
        N_est = max(N_est, (runs[p] + p) // p)
    kappa = 0.0
    p = 1
    for k in range(1, n + 1):
        while p < N:
            if p not in runs:
                runs[p] = longest_period_run(data, p)
            if runs[p] >= k:
                break
            p += 1
        if p >= N:
            break
        kappa = max(kappa, k / p)
    return kappa, N_est


def m_of_n(index: FactorIndex, n: int, strict: bool = True) -> ReturnStats:
    mins, reps = min_return_lengths(index, n)
    if len(mins) == 0:
        raise InsufficientSample(f"sample has no factor of length {n}")
    once = np.flatnonzero(mins == 0)
    if strict and len(once):
        v = index.word(int(reps[once[0]]), n)
        raise InsufficientSample(f"factor {v} of length {n} occurs only once in the sample")
    seen = mins[mins > 0]
    if len(seen) == 0:
        raise InsufficientSample(f"no factor of length {n} occurs twice")
    kappa, N_est = kappa_and_power(index.data, n)
    return ReturnStats(n, int(seen.min()), kappa, N_est, int(len(once)))
