"""Finite-sample estimates of the constants behind (PQ), (PW), (HP) and
linear repetitivity, with the (HP)+(PW) => (PQ) inequality checked on them."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .ergodic import ErgodicReport, judge, sliding_density, sliding_nu, window_starts
from .errors import InsufficientSample, InvalidInput
from .index import FactorIndex
from .returns import kappa_and_power, longest_period_run


@dataclass(frozen=True)
class Thresholds:
    pq: float = 0.05
    pw: float = 0.05

    @classmethod
    def from_mapping(cls, values) -> Thresholds:
        known = {k: float(v) for k, v in values.items() if k in ("pq", "pw")}
        return cls(**known)


@dataclass
class _LengthStats:
    n: int
    nu: dict = field(default_factory=dict)
    density: dict = field(default_factory=dict)


def _length_stats(index: FactorIndex, n: int, starts: np.ndarray, L: int) -> _LengthStats:
    g = index.groups(n)
    out = _LengthStats(n)
    for gi, rep in enumerate(g.representatives.tolist()):
        P = g.members(gi)
        key = str(index.word(rep, n))
        out.nu[key] = float(sliding_nu(P, n, starts, L).min())
        out.density[key] = float(sliding_density(P, n, starts, L).min())
    return out


def periodic_period(data: np.ndarray, pmax: int) -> int | None:
    """Smallest ``p <= pmax`` that is a period of the whole sample."""
    N = len(data)
    for p in range(1, min(pmax, N - 1) + 1):
        if longest_period_run(data, p) == N - p:
            return p
    return None


def diagnostics(index: FactorIndex, maxlen: int, L: int, thresholds: Thresholds | None = None,
                stride: int | None = None, workers: int = 1) -> ErgodicReport:
    """Estimate ``C`` (quasiweights), ``E`` (weights), ``N``, ``kappa`` and the
    linear-repetitivity constant over all factors of length ``1..maxlen``."""
    thresholds = thresholds or Thresholds()
    N = index.sample_length
    if maxlen < 1 or 8 * maxlen > L:
        raise InvalidInput(f"maxlen={maxlen} must satisfy 1 <= maxlen <= L/8 (L={L})")
    if L > N:
        raise InsufficientSample(f"window L={L} exceeds the sample length {N}")
    if 4 * maxlen > N:
        raise InsufficientSample(f"lengths {list(range(N // 4 + 1, maxlen + 1))} exceed |sample|/4")
    starts = window_starts(N, L, stride)
    lengths = list(range(1, maxlen + 1))
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        per_length = list(pool.map(lambda n: _length_stats(index, n, starts, L), lengths))

    nu = {k: v for s in per_length for k, v in s.nu.items()}
    density = {k: v for s in per_length for k, v in s.density.items()}
    C_est = min(nu.values())
    E_est = min(density.values())
    kappa, N_est = kappa_and_power(index.data, maxlen)
    profiles = [index.recurrence_estimate(n) for n in lengths]
    linrep = max(p.R_est / p.n for p in profiles)
    period = periodic_period(index.data, maxlen)
    power_unbounded = any(longest_period_run(index.data, p) + p >= N // 2 for p in lengths if p < N)

    report = ErgodicReport()
    report.diagnostics.update(C_est=C_est, E_est=E_est, N_est=float(N_est), kappa_est=kappa,
                              linrep_D_est=linrep, bridge_rhs=E_est / (2 * (kappa + 1)))
    report.details.update({f"nu[{k}]": v for k, v in nu.items()})
    report.details.update({f"density[{k}]": v for k, v in density.items()})
    report.verdicts += [
        judge("PQ", C_est, ">", thresholds.pq, L),
        judge("PW", E_est, ">", thresholds.pw, L),
        judge("HP-bounded", float(power_unbounded), "<", 0.5, maxlen),
        judge("periodic", float(period is not None), ">", 0.5, maxlen),
        judge("recurrence-valid", float(all(p.valid for p in profiles)), ">", 0.5, maxlen),
        judge("PQ-bridge", C_est - E_est / (2 * (kappa + 1)), ">=", 0.0, L),
    ]
    if period is not None:
        report.diagnostics["period"] = float(period)
    return report
