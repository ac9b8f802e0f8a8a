"""Ground truth for the engine: tabulate joint draws of every ranking's total.

Both estimators treat each ranking's vote total as an independent draw from
its distribution and run the plain IRV count on the bucket labels. The
exhaustive oracle weighs every joint assignment exactly and splits
last-place ties evenly; the Monte Carlo oracle samples assignments and
breaks ties at random.
"""
from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .engine import ElectionModel, win_vector_memoized
from .errors import StateSpaceError, ValidationError
from .tabulator import tabulate_batch
from .tree import WinVector

DEFAULT_MAX_STATES = 10**8
EXHAUSTIVE_CHUNK = 1 << 17
MC_CHUNK = 1 << 16


@dataclass
class OracleReport:
    method: str
    win_probs: WinVector
    samples_or_states: int
    std_error: dict[int, float] | None = None
    engine_win: WinVector | None = None
    max_abs_gap_vs_engine: float | None = None
    total_weight: float | None = None
    seed: int | None = None
    extra: dict = field(default_factory=dict)

    def gap(self) -> dict[str, float]:
        if self.engine_win is None:
            return {}
        return {c.code: self.win_probs[c.index] - self.engine_win[c.index]
                for c in self.win_probs.candidates}

    def to_dict(self) -> dict:
        d = {
            "method": self.method,
            "win_probs": self.win_probs.by_code(),
            "samples_or_states": self.samples_or_states,
        }
        if self.std_error is not None:
            d["std_error"] = {self.win_probs.candidates[i].code: s for i, s in self.std_error.items()}
        if self.seed is not None:
            d["seed"] = self.seed
        if self.total_weight is not None:
            d["total_weight"] = self.total_weight
        if self.engine_win is not None:
            d["engine_win_probs"] = self.engine_win.by_code()
            d["gap_vs_engine"] = self.gap()
            d["max_abs_gap_vs_engine"] = self.max_abs_gap_vs_engine
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _compare(report: OracleReport, model: ElectionModel, engine: bool | WinVector) -> OracleReport:
    if engine is False:
        return report
    ew = engine if isinstance(engine, WinVector) else win_vector_memoized(model)[0]
    report.engine_win = ew
    report.max_abs_gap_vs_engine = float(np.max(np.abs(report.win_probs.as_array() - ew.as_array())))
    return report


def _columns(model: ElectionModel):
    rankings = [r for r in model.dists if r]
    supports = [model.dists[r].support() for r in rankings]
    probs = [model.dists[r].mass[s - model.dists[r].offset] for r, s in zip(rankings, supports)]
    return rankings, supports, probs


def exhaustive_win_probs(model: ElectionModel, max_states: int = DEFAULT_MAX_STATES,
                         engine: bool | WinVector = True) -> OracleReport:
    """Exact win probabilities by enumerating every joint bucket assignment."""
    if model.eliminated:
        raise ValidationError("oracles expect a first-round model")
    rankings, supports, probs = _columns(model)
    sizes = [s.size for s in supports]
    n_states = int(np.prod(sizes, dtype=object)) if sizes else 1
    if n_states > max_states:
        raise StateSpaceError(n_states, max_states)
    n = len(model.candidates)
    acc = np.zeros(n)
    total = 0.0
    for start in range(0, n_states, EXHAUSTIVE_CHUNK):
        flat = np.arange(start, min(start + EXHAUSTIVE_CHUNK, n_states))
        if sizes:
            digits = np.unravel_index(flat, sizes)
            values = np.column_stack([supports[j][digits[j]] for j in range(len(sizes))])
            weight = np.ones(flat.size)
            for j in range(len(sizes)):
                weight *= probs[j][digits[j]]
        else:
            values = np.zeros((1, 0), dtype=np.int64)
            weight = np.ones(1)
        shares = tabulate_batch(values, rankings, n, ties="split")
        acc += weight @ shares
        total += float(weight.sum())
    win = WinVector(model.candidates, {i: float(acc[i]) for i in range(n)})
    report = OracleReport("exhaustive", win, n_states, total_weight=total)
    return _compare(report, model, engine)


def _mc_chunk(rankings, cdfs, offsets, n_candidates: int, seed: int, chunk: int, size: int) -> np.ndarray:
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(chunk,)))
    values = np.empty((size, len(rankings)), dtype=np.int64)
    for j, (c, off) in enumerate(zip(cdfs, offsets)):
        u = rng.random(size)
        values[:, j] = off + np.minimum(np.searchsorted(c, u, side="right"), c.size - 1)
    shares = tabulate_batch(values, rankings, n_candidates, ties="random", rng=rng)
    return shares.sum(axis=0)


def mc_win_probs(model: ElectionModel, n: int, seed: int = 0, n_jobs: int = 1,
                 engine: bool | WinVector = True) -> OracleReport:
    """Monte Carlo win probabilities from ``n`` independent joint draws.

    Draws are made in fixed-size chunks, each with its own seed derived from
    ``(seed, chunk number)``, so the estimate does not depend on ``n_jobs``.
    """
    if n < 1:
        raise ValidationError("n must be at least 1")
    if model.eliminated:
        raise ValidationError("oracles expect a first-round model")
    rankings = [r for r in model.dists if r]
    cdfs = [np.cumsum(model.dists[r].mass) for r in rankings]
    for c in cdfs:
        c /= c[-1]
    offsets = [model.dists[r].offset for r in rankings]
    k = len(model.candidates)
    jobs = [(i, min(MC_CHUNK, n - start)) for i, start in enumerate(range(0, n, MC_CHUNK))]

    def run(job):
        return _mc_chunk(rankings, cdfs, offsets, k, seed, *job)

    if n_jobs > 1:
        with ThreadPoolExecutor(n_jobs) as pool:
            parts = list(pool.map(run, jobs))
    else:
        parts = [run(j) for j in jobs]
    counts = np.zeros(k)
    for p in parts:
        counts += p
    p_hat = counts / n
    se = np.sqrt(p_hat * (1 - p_hat) / n)
    win = WinVector(model.candidates, {i: float(p_hat[i]) for i in range(k)})
    report = OracleReport("monte-carlo", win, n, std_error={i: float(se[i]) for i in range(k)}, seed=seed)
    return _compare(report, model, engine)
