"""Experiment pipelines: generator -> index -> estimators -> report envelope."""
from __future__ import annotations

import logging
import time
from contextlib import contextmanager
from pathlib import Path

import numpy as np

from . import ergodic as E
from .config import ExperimentConfig
from .diagnostics import Thresholds, diagnostics
from .errors import ConfigError, InvalidInput, InvariantViolation
from .generators import generate
from .index import FactorIndex
from .report import ReportEnvelope, emit_csv, emit_json, emit_timings
from .returns import m_of_n, return_words, u_partition, verify_prop_frequenz

log = logging.getLogger("subshift")


class _Stages:
    def __init__(self):
        self.timings: dict[str, float] = {}

    @contextmanager
    def stage(self, name: str):
        t0 = time.perf_counter()
        log.info("stage %s", name)
        yield
        self.timings[name] = time.perf_counter() - t0


def _powers(lo: int, hi: int) -> tuple[int, ...]:
    out, n = [], lo
    while n <= hi:
        out.append(n)
        n *= 2
    return tuple(out)


def _word(alphabet, text: str | None):
    if text is None:
        return alphabet.word(alphabet.symbols[0])
    try:
        return alphabet.word(text)
    except InvalidInput as exc:
        raise ConfigError(f"word: {exc}") from None


def additive_function(spec: str | None, alphabet, word: str | None) -> E.AdditiveFunction:
    spec = spec or "occ"
    head, _, arg = spec.partition(":")
    if head == "occ":
        return E.builtin_occurrence_additive(_word(alphabet, arg or word))
    if head == "letters":
        return E.builtin_letter_vector(alphabet)
    raise ConfigError(f"function: unknown additive function {spec!r}")


def subadditive_function(spec: str | None, alphabet, word: str | None) -> E.SubadditiveFunction:
    spec = spec or "neg-disjoint"
    head, _, arg = spec.partition(":")
    if head == "neg-disjoint":
        return E.builtin_neg_disjoint(_word(alphabet, arg or word))
    if head == "length":
        return E.builtin_length()
    raise ConfigError(f"function: unknown subadditive function {spec!r}")


def cylinder_function(spec: str | None, alphabet, word: str | None) -> E.CylinderFunction:
    spec = spec or "indicator"
    head, _, arg = spec.partition(":")
    if head == "indicator":
        target = arg or word or alphabet.symbols[0]
        if len(target) % 2 == 0:
            raise ConfigError(f"function: indicator window {target!r} must have odd length")
        _word(alphabet, target)
        return E.CylinderFunction.indicator(alphabet, len(target) // 2, target)
    if head == "constant":
        return E.CylinderFunction.constant(alphabet, float(arg) if arg else 1.0)
    raise ConfigError(f"function: unknown cylinder function {spec!r}")


def _estimate_columns(dim: int, alphabet=None) -> list[str]:
    if dim == 1:
        return ["estimate"]
    return [f"estimate[{i}]" for i in range(dim)]


def _series_rows(report: E.ErgodicReport) -> list[list]:
    return [[p.scale, *p.estimate, p.oscillation] for p in report.series]


def _verdict_dicts(report: E.ErgodicReport) -> list[dict]:
    return [v.__dict__.copy() for v in report.verdicts]


def execute(config: ExperimentConfig) -> ReportEnvelope:
    st = _Stages()
    with st.stage("generate"):
        gen = generate(config.generator)
    sample = gen.word
    N = len(sample)
    A = sample.alphabet
    th = config.thresholds
    with st.stage("index"):
        index = FactorIndex(sample)
    exp = config.experiment
    diag: dict = {}
    details: dict = {}
    with st.stage(exp):
        if exp == "frequencies":
            F = additive_function(config.function, A, config.word)
            scales = config.scales or _powers(16, N)
            rep = E.prefix_average_series(F, sample, scales, index)
            rep.verdicts.append(E.judge("oscillation-converged", rep.series[-1].oscillation, "<",
                                        th["oscillation"], rep.series[-1].scale))
            columns = ["scale", *_estimate_columns(F.dim), "oscillation"]
            rows = _series_rows(rep)
        elif exp == "additive":
            F = additive_function(config.function, A, config.word)
            xs = E.partitioning_sequence(index, config.maxlen)
            if not xs:
                raise InvalidInput("the first sample symbol occurs only once; no partitioning sequence")
            rep = E.hierarchical_series(F, index, xs)
            terminal = F(sample) / N
            last = np.asarray(rep.series[-1].estimate)
            diag.update(prefix_terminal=float(terminal[0]) if F.dim == 1 else None,
                        hierarchical_last=float(last[0]) if F.dim == 1 else None)
            rep.verdicts.append(E.judge("hierarchical-agreement", E.max_norm(last - terminal), "<=",
                                        th["hierarchical"], rep.series[-1].scale))
            rep.verdicts.append(E.judge("density-partition", rep.series[-1].oscillation, "<=",
                                        th["hierarchical"], rep.series[-1].scale))
            columns = ["scale", *_estimate_columns(F.dim), "density_defect"]
            rows = _series_rows(rep)
        elif exp == "birkhoff":
            f = cylinder_function(config.function, A, config.word)
            scales = config.scales or _powers(16, min(10_000, N // 4))
            starts = E.random_starts(N, scales[-1], f.radius, config.starts, config.seed)
            rep = E.birkhoff_series(f, sample, scales, starts)
            rep.verdicts.append(E.judge("oscillation-converged", rep.series[-1].oscillation, "<",
                                        th["oscillation"], rep.series[-1].scale))
            w = sample[:max(2 * f.radius + 1, min(config.maxlen, N))]
            try:
                d = E.window_agreement_defect(f, sample, w, index)
                diag.update(window_defect=d.defect, window_bound=d.bound, window_pairs=d.pairs)
                rep.verdicts.append(E.judge("window-agreement", d.defect - d.bound, "<=", 0.0, len(w)))
            except InvalidInput as exc:
                log.info("window agreement skipped: %s", exc)
            columns = ["scale", *_estimate_columns(f.dim), "oscillation"]
            rows = _series_rows(rep)
        elif exp == "subadditive":
            F = subadditive_function(config.function, A, config.word)
            scales = config.scales or _powers(64, N)
            fn_scales = config.fn_scales or _powers(1, min(4096, N))
            rep = E.subadditive_limit_report(F, index, scales, fn_scales, th["set"])
            columns = ["scale", "prefix", "Fn", "running_inf"]
            rows = [[p.scale, *p.estimate] for p in rep.series]
        elif exp == "diagnostics":
            rep = diagnostics(index, config.maxlen, config.window, Thresholds.from_mapping(th))
            if gen.periodic:
                rep.diagnostics["generator_periodic"] = 1.0
            columns = ["quantity", "value", "scale", "verdict"]
            rows = [[k, v, config.window if k in ("C_est", "E_est", "bridge_rhs") else config.maxlen, ""]
                    for k, v in rep.diagnostics.items()]
            rows += [[k, v, config.window, ""] for k, v in rep.details.items() if k.startswith("nu[")]
            rows += [[v.name, v.value, v.scale, f"{'pass' if v.passed else 'fail'} ({v.comparison} {format(v.threshold, '.9g')})"]
                     for v in rep.verdicts]
        elif exp == "returns":
            ns = config.scales or tuple(n for n in _powers(1, 64) if 4 * n <= N)
            rep = E.ErgodicReport()
            rows = []
            for n in ns:
                stats = m_of_n(index, n)
                prof = index.recurrence_estimate(n) if 4 * n <= N else None
                rows.append([n, stats.m, stats.kappa_est, stats.N_est, index.factor_count(n),
                             prof.R_est if prof else None])
            ms = [r[1] for r in rows]
            rep.verdicts.append(E.judge("m-strictly-increasing",
                                        float(all(b > a for a, b in zip(ms, ms[1:]))), ">", 0.5, ns[-1]))
            _check_return_invariants(index, _word(A, config.word))
            columns = ["n", "m", "kappa_est", "N_est", "complexity", "R_est"]
        elif exp == "set-failure":
            if config.words:
                vs = [_word(A, t) for t in config.words]
            else:
                if 4 * 256 > config.window:
                    raise ConfigError(f"window: L={config.window} too small for prefixes of length 256 (needs L >= 1024)")
                vs = E.low_weight_prefixes(index, _powers(256, N), config.window)
            details["words"] = ",".join(str(v) if len(v) <= 16 else f"prefix:{len(v)}" for v in vs)
            diag["words_selected"] = len(vs)
            scales = config.scales or _powers(256, min(1 << 16, N))
            rep = E.ErgodicReport()
            vals = [0.0]
            if vs:
                F = E.set_failure_function(index, vs)
                vals = []
                for n in scales:
                    vals.append(F(sample[:n]) / n)
                    rep.series.append(E.SeriesPoint(n, (vals[-1],), 0.0))
            sp = max(vals) - min(vals)
            diag["spread"] = sp
            rep.verdicts.append(E.judge("set-failure-spread", sp, ">=", th["spread"], scales[-1]))
            columns = ["scale", "estimate"]
            rows = [[p.scale, p.estimate[0]] for p in rep.series]
        else:  # pragma: no cover - guarded by ExperimentConfig
            raise ConfigError(f"experiment: unknown {exp!r}")
    diag = {**rep.diagnostics, **diag}
    details = {**{k: v for k, v in rep.details.items()}, **details}
    env = ReportEnvelope(
        experiment=exp,
        config=config.echo(),
        sample={"length": N, "description": gen.description, "periodic": gen.periodic,
                "alphabet": list(A.symbols)},
        columns=columns,
        rows=rows,
        verdicts=_verdict_dicts(rep),
        diagnostics=diag,
        details=details,
    )
    env.timings = st.timings
    return env


def _check_return_invariants(index: FactorIndex, u) -> None:
    """Spot-check the u-partition and return-word identities on the sample itself."""
    if index.count(u) < 2:
        return
    host = index.sample[:min(index.sample_length, 4096)]
    part = u_partition(host, u)
    try:
        part.check()
    except InvariantViolation:
        raise
    rws = return_words(index, u)
    for z in part.blocks[:-1]:
        if z not in rws.words:
            raise InvariantViolation(f"block {z} of the {u}-partition is not a return word")
    for z in rws.sorted()[:8]:
        if not verify_prop_frequenz(index, z, u, host):
            raise InvariantViolation(f"topological count of {z} differs from occurrences of {z}{u}")


def run(config: ExperimentConfig) -> ReportEnvelope:
    env = execute(config)
    out = Path(config.out_dir)
    t0 = time.perf_counter()
    if "csv" in config.formats:
        emit_csv(env, out / f"{config.experiment}.csv")
    if "json" in config.formats:
        emit_json(env, out / f"{config.experiment}.json")
    env.timings["emit"] = time.perf_counter() - t0
    emit_timings(env, out / f"{config.experiment}.timings.json")
    return env
