"""Additive and subadditive word functions and their convergence estimators.

Vector values live in R^d with the max-norm. Every ``lim_{|w|->inf}`` is
reported as a series over declared scales, never as a single number.

Functions may carry a ``window_values(data, n)`` fast path returning the
value on every length-``n`` window of a sample; the set of window values
is exactly the set of values on distinct length-``n`` factors, so maxima
and spreads agree with factor enumeration (which is the fallback).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .errors import InvalidInput, InvalidSpec
from .index import FactorIndex
from .returns import return_words
from .words import Word, count_occurrences, greedy_disjoint, naive_positions, occurrence_mask

WindowFn = Callable[[np.ndarray, int], np.ndarray]


def _as_vector(x) -> np.ndarray:
    return np.atleast_1d(np.asarray(x, dtype=float))


def max_norm(x) -> float:
    return float(np.max(np.abs(_as_vector(x)))) if np.size(x) else 0.0


@dataclass(frozen=True)
class SeriesPoint:
    scale: int
    estimate: tuple[float, ...]
    oscillation: float


@dataclass(frozen=True)
class Verdict:
    name: str
    passed: bool
    value: float
    comparison: str
    threshold: float
    scale: int | None = None


@dataclass
class ErgodicReport:
    series: list[SeriesPoint] = field(default_factory=list)
    diagnostics: dict[str, float] = field(default_factory=dict)
    verdicts: list[Verdict] = field(default_factory=list)
    details: dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        scales = [p.scale for p in self.series]
        if any(b <= a for a, b in zip(scales, scales[1:])):
            raise InvalidInput("report scales must be strictly increasing")
        if any(p.oscillation < 0 for p in self.series):
            raise InvalidInput("oscillation must be nonnegative")

    def verdict(self, name: str) -> Verdict:
        for v in self.verdicts:
            if v.name == name:
                return v
        raise KeyError(name)


def judge(name: str, value: float, comparison: str, threshold: float, scale: int | None = None) -> Verdict:
    ops = {"<": value < threshold, "<=": value <= threshold, ">": value > threshold,
           ">=": value >= threshold}
    return Verdict(name, bool(ops[comparison]), float(value), comparison, float(threshold), scale)


# additive functions

@dataclass(frozen=True)
class AdditiveFunction:
    """Word function with ``|F(v)| <= D|v|`` and concatenation defect
    ``|F(v) - sum F(v_j)| <= sum c(|v_j|)|v_j|``."""

    name: str
    evaluator: Callable[[Word], np.ndarray]
    D: float
    c: Callable[[float], float]
    dim: int = 1
    window_values: WindowFn | None = None

    def __call__(self, w: Word) -> np.ndarray:
        return _as_vector(self.evaluator(w))


def _window_counts(pattern: np.ndarray, data: np.ndarray, n: int) -> np.ndarray:
    """Occurrences of ``pattern`` inside each length-``n`` window of ``data``."""
    m, N = len(pattern), len(data)
    out = np.zeros(N - n + 1, dtype=np.int64)
    if m > n:
        return out
    cs = np.concatenate(([0], np.cumsum(occurrence_mask(pattern, data))))
    i = np.arange(N - n + 1)
    return cs[i + n - m + 1] - cs[i]


def builtin_occurrence_additive(v: Word) -> AdditiveFunction:
    """``F(w) = #_v(w)``; a cut destroys at most ``|v|-1`` occurrences, charged to the part before it."""
    if len(v) == 0:
        raise InvalidInput("occurrence function needs a nonempty word")
    m = len(v)

    def c(r: float) -> float:
        return min(1.0, (m - 1) / max(r, 1))

    def windows(data: np.ndarray, n: int) -> np.ndarray:
        return _window_counts(v.array, data, n)[:, None].astype(float)

    return AdditiveFunction(f"occ[{v}]", lambda w: count_occurrences(v, w), 1.0, c, 1, windows)


def builtin_letter_vector(alphabet) -> AdditiveFunction:
    """Vector of letter counts; strictly additive (``c = 0``)."""
    k = alphabet.size

    def evaluate(w: Word) -> np.ndarray:
        return np.bincount(w.array, minlength=k).astype(float)

    def windows(data: np.ndarray, n: int) -> np.ndarray:
        onehot = np.zeros((len(data) + 1, k))
        onehot[np.arange(1, len(data) + 1), data] = 1
        cs = np.cumsum(onehot, axis=0)
        return cs[n:] - cs[:-n]

    return AdditiveFunction("letters", evaluate, 1.0, lambda r: 0.0, k, windows)


def window_value_table(F, index: FactorIndex | None, data: np.ndarray, n: int) -> np.ndarray:
    """Values of ``F`` on the distinct length-``n`` factors (or all windows on the fast path)."""
    if F.window_values is not None:
        vals = np.asarray(F.window_values(data, n), dtype=float)
        return vals.reshape(len(vals), -1)
    if index is None:
        raise InvalidInput(f"{F.name} has no window fast path; an index is required")
    return np.array([_as_vector(F(index.word(int(s), n))) for s in index.factor_starts(n)])


def spread(values: np.ndarray) -> float:
    """Max-norm diameter of a set of vectors (coordinatewise range)."""
    if len(values) == 0:
        return 0.0
    return float(np.max(values.max(axis=0) - values.min(axis=0)))


def _check_scales(scales: Sequence[int], limit: int) -> list[int]:
    scales = [int(s) for s in scales]
    if any(s < 1 for s in scales):
        raise InvalidInput("scales must be positive")
    if any(b <= a for a, b in zip(scales, scales[1:])):
        raise InvalidInput("scales must be strictly increasing")
    if scales and scales[-1] > limit:
        raise InvalidInput(f"scale {scales[-1]} exceeds the sample length {limit}")
    return scales


def prefix_average_series(F: AdditiveFunction, sample: Word, scales: Sequence[int],
                          index: FactorIndex | None = None) -> ErgodicReport:
    """``F(prefix_n)/n`` and the spread of ``F(v)/n`` over all length-``n`` factors."""
    scales = _check_scales(scales, len(sample))
    data = sample.array
    if F.window_values is None and index is None:
        index = FactorIndex(sample)
    points = []
    for n in scales:
        est = F(sample[:n]) / n
        osc = spread(window_value_table(F, index, data, n) / n)
        points.append(SeriesPoint(n, tuple(float(x) for x in est), osc))
    return ErgodicReport(series=points)


@dataclass(frozen=True)
class HierarchicalTerm:
    word: Word
    weight: float  # nu_j: frequency of word·x times |word|
    average: tuple[float, ...]  # F(word)/|word|


def hierarchical_terms(F: AdditiveFunction, index: FactorIndex, x: Word) -> list[HierarchicalTerm]:
    N = index.sample_length
    terms = []
    for y in return_words(index, x).sorted():
        nu = index.count(y + x) / N * len(y)
        terms.append(HierarchicalTerm(y, nu, tuple(float(t) for t in F(y) / len(y))))
    return terms


def hierarchical_estimate(F: AdditiveFunction, index: FactorIndex, x: Word) -> np.ndarray:
    """``sum_j nu_j F(y_j)/|y_j|`` over the return words ``y_j`` of ``x``."""
    terms = hierarchical_terms(F, index, x)
    return sum(t.weight * np.asarray(t.average) for t in terms)


def density_sum(index: FactorIndex, x: Word) -> float:
    """``sum_j nu_j``; the return-word blocks tile the sample up to its edges."""
    N = index.sample_length
    return sum(index.count(y + x) / N * len(y) for y in return_words(index, x).words)


def partitioning_sequence(index: FactorIndex, max_length: int | None = None) -> list[Word]:
    """Sample prefixes of lengths 1, 2, 4, ... that still occur at least twice."""
    out = []
    n = 1
    limit = max_length or index.sample_length
    while n <= limit:
        x = index.sample[:n]
        if index.count(x) < 2:
            break
        out.append(x)
        n *= 2
    return out


def hierarchical_series(F: AdditiveFunction, index: FactorIndex, xs: Sequence[Word]) -> ErgodicReport:
    """Estimates along a partitioning sequence; ``oscillation`` holds ``|sum nu_j - 1|``."""
    lengths = [len(x) for x in xs]
    if any(b <= a for a, b in zip(lengths, lengths[1:])):
        raise InvalidInput("a partitioning sequence needs strictly increasing lengths")
    points = []
    for x in xs:
        terms = hierarchical_terms(F, index, x)
        est = sum(t.weight * np.asarray(t.average) for t in terms)
        dsum = sum(t.weight for t in terms)
        points.append(SeriesPoint(len(x), tuple(float(e) for e in _as_vector(est)), abs(dsum - 1.0)))
    return ErgodicReport(series=points)


# cylinder functions and Birkhoff sums

class CylinderFunction:
    """Function of a sequence through its window ``omega[-k..k]``, stored as a table.

    At position ``t`` of a sample the window is ``sample[t-k : t+k+1]``.
    """

    def __init__(self, radius: int, table: Mapping[Word, Sequence[float] | float]):
        if radius < 0:
            raise InvalidSpec("radius must be >= 0")
        if not table:
            raise InvalidSpec("cylinder table is empty")
        width = 2 * radius + 1
        self.radius = radius
        words = list(table)
        self.alphabet = words[0].alphabet
        if any(len(w) != width for w in words):
            raise InvalidSpec(f"every table key must have length {width}")
        base = self.alphabet.size
        if base ** width >= 2 ** 62:
            raise InvalidSpec("window too wide to encode")
        rows = [_as_vector(table[w]) for w in words]
        self.dim = len(rows[0])
        if any(len(r) != self.dim for r in rows):
            raise InvalidSpec("table values must share one dimension")
        codes = np.array([self._code(w.array[None, :])[0] for w in words], dtype=np.int64)
        order = np.argsort(codes)
        self._codes = codes[order]
        self._values = np.array(rows)[order]
        self.sup_norm = float(np.abs(self._values).max())
        self._words = [words[i] for i in order]

    @classmethod
    def from_strings(cls, alphabet, radius: int, table: Mapping[str, float | Sequence[float]]) -> CylinderFunction:
        return cls(radius, {alphabet.word(k): v for k, v in table.items()})

    @classmethod
    def constant(cls, alphabet, value: float = 1.0) -> CylinderFunction:
        return cls(0, {alphabet.word(s): value for s in alphabet.symbols})

    @classmethod
    def indicator(cls, alphabet, radius: int, target: str) -> CylinderFunction:
        """Indicator of one window; all windows over the alphabet are tabulated."""
        import itertools

        width = 2 * radius + 1
        table = {}
        for combo in itertools.product(alphabet.symbols, repeat=width):
            w = alphabet.word(combo)
            table[w] = 1.0 if str(w) == target else 0.0
        return cls(radius, table)

    def _code(self, windows: np.ndarray) -> np.ndarray:
        base = self.alphabet.size
        code = np.zeros(len(windows), dtype=np.int64)
        for col in range(windows.shape[1]):
            code = code * base + windows[:, col]
        return code

    def values(self, data: np.ndarray) -> np.ndarray:
        """``f`` at positions ``k .. len(data)-k-1``; shape ``(len(data)-2k, dim)``."""
        width = 2 * self.radius + 1
        if len(data) < width:
            return np.zeros((0, self.dim))
        win = np.lib.stride_tricks.sliding_window_view(data.astype(np.int64), width)
        codes = self._code(win)
        idx = np.searchsorted(self._codes, codes)
        idx = np.minimum(idx, len(self._codes) - 1)
        bad = self._codes[idx] != codes
        if bad.any():
            at = int(np.flatnonzero(bad)[0])
            raise InvalidInput(f"window {self.alphabet.render(bytes(win[at].astype(np.uint8)))!r} at offset {at} missing from the cylinder table")
        return self._values[idx]

    def __call__(self, window: Word) -> np.ndarray:
        return self.values(window.array)[0]


def _position_prefix_sums(f: CylinderFunction, data: np.ndarray) -> np.ndarray:
    """``cs[t - k]`` = sum of ``f`` over positions ``k .. t-1``."""
    vals = f.values(data)
    return np.vstack([np.zeros((1, f.dim)), np.cumsum(vals, axis=0)])


def birkhoff_averages(f: CylinderFunction, sample: Word, n: int, starts: Sequence[int]) -> np.ndarray:
    """``(1/n) sum_{j<n} f(T^{s+j} sample)`` for every start ``s``; shape ``(len(starts), dim)``."""
    k, N = f.radius, len(sample)
    starts = np.asarray(starts, dtype=np.int64)
    if len(starts) and (starts.min() < k or starts.max() + n + k > N):
        raise InvalidInput(f"Birkhoff window at scale {n} leaves the sample (radius {k}, length {N})")
    cs = _position_prefix_sums(f, sample.array)
    return (cs[starts - k + n] - cs[starts - k]) / n


def random_starts(sample_length: int, max_scale: int, radius: int, count: int, seed: int = 0) -> list[int]:
    hi = sample_length - max_scale - radius
    if hi <= radius:
        raise InvalidInput(f"sample too short for {count} starts at scale {max_scale}")
    rng = np.random.default_rng(seed)
    return sorted(rng.integers(radius, hi + 1, size=count).tolist())


def birkhoff_series(f: CylinderFunction, sample: Word, scales: Sequence[int], starts: Sequence[int]) -> ErgodicReport:
    """Mean over starts as estimate, spread over starts as oscillation."""
    scales = _check_scales(scales, len(sample))
    points = []
    for n in scales:
        avg = birkhoff_averages(f, sample, n, starts)
        points.append(SeriesPoint(n, tuple(float(x) for x in avg.mean(axis=0)), spread(avg)))
    return ErgodicReport(series=points)


@dataclass(frozen=True)
class WindowDefect:
    defect: float
    bound: float
    pairs: int


def window_agreement_defect(f: CylinderFunction, sample: Word, w: Word,
                            index: FactorIndex | None = None) -> WindowDefect:
    """Largest difference between Birkhoff sums of ``f`` over two occurrences of ``w``.

    Only positions within ``k`` of either end of ``w`` see outside symbols,
    so the defect is at most ``4 k sup|f|``.
    """
    k, N = f.radius, len(sample)
    if len(w) <= 2 * k:
        raise InvalidInput(f"|w| = {len(w)} must exceed 2k = {2 * k}")
    pos = index.positions(w) if index is not None else np.asarray(naive_positions(w, sample))
    pos = pos[(pos >= k) & (pos + len(w) + k <= N)]
    if len(pos) < 2:
        raise InvalidInput(f"{w!r} needs two occurrences with full windows, found {len(pos)}")
    # direct per-occurrence sums: equal value runs give bit-identical totals
    vals = f.values(sample.array)
    offs = np.arange(len(w))
    chunk = max(1, 4_000_000 // (len(w) * f.dim))
    sums = np.vstack([vals[(pos[i:i + chunk] - k)[:, None] + offs].sum(axis=1)
                      for i in range(0, len(pos), chunk)])
    return WindowDefect(spread(sums), 4 * f.sup_norm * k, len(pos) * (len(pos) - 1) // 2)


# subadditive functions

@dataclass(frozen=True)
class SubadditiveFunction:
    name: str
    evaluator: Callable[[Word], float]
    window_values: WindowFn | None = None

    def __call__(self, w: Word) -> float:
        return float(self.evaluator(w))


def greedy_counts(P: np.ndarray, m: int, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    """Greedy (= maximal) number of disjoint length-``m`` occurrences with start in ``[lo, hi]``.

    ``P`` are the sorted occurrence starts. Chains of greedy picks are
    followed by binary lifting, one vectorized pass per power of two.
    """
    P = np.asarray(P, dtype=np.int64)
    lo = np.asarray(lo, dtype=np.int64)
    hi = np.asarray(hi, dtype=np.int64)
    c = len(P)
    if c == 0:
        return np.zeros(len(lo), dtype=np.int64)
    first = np.searchsorted(P, lo, "left")
    if c == 1 or np.diff(P).min() >= m:
        return np.maximum(np.searchsorted(P, hi, "right") - first, 0)
    big = np.iinfo(np.int64).max
    Pext = np.append(P, big)
    up = [np.append(np.searchsorted(P, P + m, "left"), c)]
    while (1 << len(up)) <= c:
        up.append(up[-1][up[-1]])
    cur = first
    valid = Pext[cur] <= hi
    cnt = valid.astype(np.int64)
    for j in range(len(up) - 1, -1, -1):
        cand = up[j][cur]
        ok = valid & (Pext[cand] <= hi)
        cur = np.where(ok, cand, cur)
        cnt += ok.astype(np.int64) << j
    return cnt


def _disjoint_windows(v: Word, data: np.ndarray, n: int) -> np.ndarray:
    m = len(v)
    starts = np.arange(len(data) - n + 1)
    if m > n:
        return np.zeros(len(starts), dtype=np.int64)
    P = np.flatnonzero(occurrence_mask(v.array, data))
    return greedy_counts(P, m, starts, starts + n - m)


def builtin_neg_disjoint(v: Word) -> SubadditiveFunction:
    """``F(w) = -l_v(w)``: minus the letters covered by a maximal disjoint family of copies of ``v``."""
    if len(v) == 0:
        raise InvalidInput("l_v needs a nonempty word")
    m = len(v)

    def evaluate(w: Word) -> float:
        return -greedy_disjoint(naive_positions(v, w), m) * m

    def windows(data: np.ndarray, n: int) -> np.ndarray:
        return -_disjoint_windows(v, data, n).astype(float) * m

    return SubadditiveFunction(f"-l[{v}]", evaluate, windows)


def builtin_length() -> SubadditiveFunction:
    def windows(data: np.ndarray, n: int) -> np.ndarray:
        return np.full(len(data) - n + 1, float(n))

    return SubadditiveFunction("length", lambda w: float(len(w)), windows)


def subadditive_Fn(F: SubadditiveFunction, index: FactorIndex, n: int) -> float:
    """``max F(v)/n`` over the distinct length-``n`` factors of the sample."""
    if n < 1 or n > index.sample_length:
        raise InvalidInput(f"no factors of length {n} in a sample of length {index.sample_length}")
    vals = window_value_table(F, index, index.data, n)
    return float(vals.max()) / n


def subadditive_limit_report(F: SubadditiveFunction, index: FactorIndex, scales: Sequence[int],
                             fn_scales: Sequence[int] | None = None, tolerance: float = 0.02) -> ErgodicReport:
    """Prefix series ``F(prefix_n)/n`` against ``inf_n F^(n)``.

    Each point's estimate is ``(F(prefix_n)/n, F^(n), running inf of F^(n))``
    with ``F^(n)`` present only at scales in ``fn_scales`` (NaN elsewhere).
    """
    scales = _check_scales(scales, index.sample_length)
    fn_scales = set(scales if fn_scales is None else _check_scales(fn_scales, index.sample_length))
    fn_values = {n: subadditive_Fn(F, index, n) for n in sorted(fn_scales)}
    running = np.inf
    points = []
    prefix_vals = []
    for n in sorted(set(scales) | fn_scales):
        pv = F(index.sample[:n]) / n if n in scales else float("nan")
        fv = fn_values.get(n, float("nan"))
        if n in fn_values:
            running = min(running, fv)
        if n in scales:
            prefix_vals.append(pv)
        points.append(SeriesPoint(n, (pv, fv, float(running)), abs(pv - running) if n in scales and np.isfinite(running) else 0.0))
    terminal = prefix_vals[-1]
    inf_fn = min(fn_values.values())
    report = ErgodicReport(series=points)
    report.diagnostics.update(terminal=terminal, inf_Fn=inf_fn, prefix_spread=float(max(prefix_vals) - min(prefix_vals)))
    report.verdicts.append(judge("SET-agreement", abs(terminal - inf_fn), "<=", tolerance, scales[-1]))
    return report


def set_failure_function(index: FactorIndex, vs: Sequence[Word]) -> SubadditiveFunction:
    """``F = -sum_j l_{v_j}``, built from words whose lengths at least double."""
    vs = list(vs)
    if not vs:
        raise InvalidSpec("set_failure_function needs at least one word")
    for v in vs:
        if v.alphabet != index.alphabet:
            raise InvalidSpec(f"{v} is over a different alphabet than the sample")
        if len(v) == 0:
            raise InvalidSpec("words must be nonempty")
    for a, b in zip(vs, vs[1:]):
        if len(b) < 2 * len(a):
            raise InvalidSpec(f"lengths must at least double: |{b}| = {len(b)} < 2*{len(a)}")
    if len(vs) == 1:
        return builtin_neg_disjoint(vs[0])
    parts = [builtin_neg_disjoint(v) for v in vs]

    def evaluate(w: Word) -> float:
        return sum(p(w) for p in parts)

    def windows(data: np.ndarray, n: int) -> np.ndarray:
        return sum(p.window_values(data, n) for p in parts)

    return SubadditiveFunction("-sum l[" + ",".join(str(v) for v in vs) + "]", evaluate, windows)


def nu_estimate(index: FactorIndex, v: Word, L: int, stride: int | None = None) -> float:
    """``min l_v(window)/L`` over length-``L`` windows spaced ``stride`` apart (default ``L//4``)."""
    N = index.sample_length
    if L < 4 * len(v) or L > N:
        raise InvalidInput(f"window L={L} must satisfy 4|v| <= L <= |sample| (|v|={len(v)}, |sample|={N})")
    starts = window_starts(N, L, stride)
    P = index.positions(v)
    counts = greedy_counts(P, len(v), starts, starts + L - len(v))
    return float(counts.min()) * len(v) / L


def window_starts(N: int, L: int, stride: int | None = None) -> np.ndarray:
    stride = max(1, L // 4) if stride is None else stride
    if stride < 1:
        raise InvalidInput("stride must be positive")
    return np.arange(0, N - L + 1, stride, dtype=np.int64)


def sliding_nu(P: np.ndarray, m: int, starts: np.ndarray, L: int) -> np.ndarray:
    return greedy_counts(P, m, starts, starts + L - m) * m / L


def sliding_density(P: np.ndarray, m: int, starts: np.ndarray, L: int) -> np.ndarray:
    lo = np.searchsorted(P, starts, "left")
    hi = np.searchsorted(P, starts + L - m, "right")
    return (hi - lo) * m / L


def low_weight_prefixes(index: FactorIndex, lengths: Sequence[int], L: int, budget: float = 0.5) -> list[Word]:
    """Sample prefixes for :func:`set_failure_function`.

    Lengths more than double from one pick to the next and a prefix is kept
    only while the estimated quasiweights of all picks sum to less than
    ``budget``. On samples with quasiweights bounded away from zero the
    list stays short.
    """
    chosen: list[Word] = []
    total = 0.0
    for n in sorted(lengths):
        if chosen and n <= 2 * len(chosen[-1]):
            continue
        if 4 * n > L or n > index.sample_length:
            break
        x = index.sample[:n]
        nu = nu_estimate(index, x, L)
        if total + nu < budget:
            chosen.append(x)
            total += nu
    return chosen
