"""Finite words over a finite alphabet and the naive reference algorithms.

Symbols are interned as small integer ids (at most 256 of them) and a word
stores its ids as ``bytes``; textual labels only appear at I/O boundaries.
Everything here is a direct scan and doubles as the oracle the indexed
routines are tested against.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import InvalidInput, OracleLimit

MAX_SYMBOLS = 256
BRUTEFORCE_LIMIT = 24


@dataclass(frozen=True)
class Alphabet:
    symbols: tuple[str, ...]

    def __post_init__(self):
        symbols = tuple(self.symbols)
        object.__setattr__(self, "symbols", symbols)
        if not symbols:
            raise InvalidInput("alphabet must contain at least one symbol")
        if len(set(symbols)) != len(symbols):
            raise InvalidInput(f"alphabet symbols must be distinct: {symbols!r}")
        if len(symbols) > MAX_SYMBOLS:
            raise InvalidInput(f"alphabet larger than {MAX_SYMBOLS} symbols")
        object.__setattr__(self, "_ids", {s: i for i, s in enumerate(symbols)})
        # translate tables when every symbol is a single latin-1 character
        simple = all(len(s) == 1 and ord(s) < 256 for s in symbols)
        object.__setattr__(self, "_encode", {ord(s): i for i, s in enumerate(symbols)} if simple else None)
        object.__setattr__(self, "_decode", bytes(ord(s) for s in symbols).ljust(256, b"\0") if simple else None)
        object.__setattr__(self, "_symset", frozenset(symbols))

    @classmethod
    def of(cls, symbols: Iterable[str]) -> Alphabet:
        return cls(tuple(symbols))

    @classmethod
    def discover(cls, text: str) -> Alphabet:
        return cls(tuple(sorted(set(text))))

    @property
    def size(self) -> int:
        return len(self.symbols)

    def id_of(self, symbol: str) -> int:
        try:
            return self._ids[symbol]
        except KeyError:
            raise InvalidInput(f"symbol {symbol!r} not in alphabet {self.symbols!r}") from None

    def word(self, text: str | Iterable[str]) -> Word:
        """Parse a word; ``text`` is split per character unless it is a list of labels."""
        if self._encode is not None and isinstance(text, str) and self._symset.issuperset(text):
            return Word(self, text.translate(self._encode).encode("latin-1"))
        return Word(self, bytes(self.id_of(s) for s in text))

    def render(self, data: bytes) -> str:
        if self._decode is not None:
            return data.translate(self._decode).decode("latin-1")
        sep = "" if all(len(s) == 1 for s in self.symbols) else " "
        return sep.join(self.symbols[i] for i in data)


@dataclass(frozen=True)
class Word:
    alphabet: Alphabet
    data: bytes = b""

    def __post_init__(self):
        data = self.data
        if type(data) is not bytes:
            data = bytes(data)
            object.__setattr__(self, "data", data)
        if data and max(data) >= self.alphabet.size:
            raise InvalidInput("symbol id outside the alphabet")

    @classmethod
    def from_ids(cls, alphabet: Alphabet, ids) -> Word:
        arr = np.asarray(ids, dtype=np.uint8)
        return cls(alphabet, arr.tobytes())

    def __len__(self) -> int:
        return len(self.data)

    def __getitem__(self, item):
        if isinstance(item, slice):
            return Word(self.alphabet, self.data[item])
        return self.data[item]

    def __add__(self, other: Word) -> Word:
        _same_alphabet(self, other)
        return Word(self.alphabet, self.data + other.data)

    def __str__(self) -> str:
        return self.alphabet.render(self.data)

    def __repr__(self) -> str:
        text = str(self)
        if len(text) > 40:
            text = text[:37] + "..."
        return f"Word({text!r})"

    @property
    def array(self) -> np.ndarray:
        return np.frombuffer(self.data, dtype=np.uint8)

    def startswith(self, prefix: Word) -> bool:
        return self.data.startswith(prefix.data)


def empty(alphabet: Alphabet) -> Word:
    return Word(alphabet, b"")


def _same_alphabet(*words: Word) -> None:
    first = words[0].alphabet
    for w in words[1:]:
        if w.alphabet is not first and w.alphabet != first:
            raise InvalidInput(f"alphabet mismatch: {first.symbols!r} vs {w.alphabet.symbols!r}")


def _check_pattern(v: Word, w: Word) -> None:
    _same_alphabet(v, w)
    if len(v) == 0:
        raise InvalidInput("pattern must be nonempty (occurrences of the empty word are undefined)")


def occurrence_mask(pattern: np.ndarray, host: np.ndarray) -> np.ndarray:
    """Boolean array over start positions ``0..len(host)-len(pattern)``."""
    m, n = len(pattern), len(host)
    if m > n:
        return np.zeros(0, dtype=bool)
    span = n - m + 1
    mask = host[:span] == pattern[0]
    for k in range(1, m):
        if not mask.any():
            break
        mask &= host[k:k + span] == pattern[k]
    return mask


def naive_positions(v: Word, w: Word) -> list[int]:
    _check_pattern(v, w)
    return np.flatnonzero(occurrence_mask(v.array, w.array)).tolist()


def count_occurrences(v: Word, w: Word) -> int:
    """Number of (possibly overlapping) occurrences of ``v`` in ``w``."""
    _check_pattern(v, w)
    return int(occurrence_mask(v.array, w.array).sum())


def greedy_disjoint(positions: Iterable[int], m: int) -> int:
    count = 0
    free_from = -1
    for p in positions:
        if p >= free_from:
            count += 1
            free_from = p + m
    return count


def max_disjoint_copies(v: Word, w: Word) -> int:
    """Maximal number of pairwise non-overlapping occurrences of ``v`` in ``w``.

    Greedy by leftmost start; all intervals share the same length, so
    leftmost start is also earliest end and the greedy choice is optimal.
    """
    return greedy_disjoint(naive_positions(v, w), len(v))


def l_v(v: Word, w: Word) -> int:
    return max_disjoint_copies(v, w) * len(v)


def max_disjoint_copies_bruteforce(v: Word, w: Word) -> int:
    """Exhaustive include/exclude search over occurrence subsets (test oracle)."""
    if len(w) > BRUTEFORCE_LIMIT:
        raise OracleLimit(f"bruteforce oracle limited to |w| <= {BRUTEFORCE_LIMIT}, got {len(w)}")
    occ = naive_positions(v, w)
    m = len(v)
    best = 0

    def search(i: int, chosen: list[int]) -> None:
        nonlocal best
        if len(chosen) + (len(occ) - i) <= best:
            return
        if i == len(occ):
            best = len(chosen)
            return
        p = occ[i]
        if all(abs(p - q) >= m for q in chosen):
            chosen.append(p)
            search(i + 1, chosen)
            chosen.pop()
        search(i + 1, chosen)

    search(0, [])
    return best


def factors(w: Word, n: int) -> set[Word]:
    if n < 1:
        raise InvalidInput(f"factor length must be >= 1, got {n}")
    return {w[i:i + n] for i in range(len(w) - n + 1)}


def all_factors(w: Word) -> set[Word]:
    return {w[i:j] for i in range(len(w)) for j in range(i + 1, len(w) + 1)}


def is_primitive(w: Word) -> bool:
    n = len(w)
    if n == 0:
        raise InvalidInput("primitivity of the empty word is undefined")
    for d in range(1, n // 2 + 1):
        if n % d == 0 and w.data[:d] * (n // d) == w.data:
            return False
    return True


def power(w: Word, k: int) -> Word:
    if k < 0:
        raise InvalidInput(f"power exponent must be >= 0, got {k}")
    return Word(w.alphabet, w.data * k)
