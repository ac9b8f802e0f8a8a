"""Deterministic IRV tabulation of concrete tallies.

``run_irv`` counts one tally round by round. ``tabulate_batch`` does the
same for many tallies at once (one row per tally) and is what the oracles
use to score joint states.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal, Mapping, Sequence

import numpy as np

from .domain import Candidate, Ranking, first_remaining, validate_ranking
from .errors import TieError, ValidationError

TallyMap = dict[Ranking, int]
TiePolicy = Literal["eliminate-all", "uniform-random", "error"]
TIE_POLICIES = ("eliminate-all", "uniform-random", "error")


@dataclass(frozen=True)
class RoundRecord:
    remaining: frozenset[int]
    top_totals: dict[int, int]
    exhausted: int
    eliminated: frozenset[int] = field(default_factory=frozenset)


@dataclass(frozen=True)
class IRVResult:
    rounds: tuple[RoundRecord, ...]
    winner: int | None
    elimination_order: tuple[int, ...]

    @property
    def n_rounds(self) -> int:
        return len(self.rounds)


def _n_candidates(candidates: int | Sequence[Candidate]) -> int:
    return candidates if isinstance(candidates, int) else len(candidates)


def validate_tally(t: Mapping[Ranking, int], n_candidates: int) -> TallyMap:
    out: TallyMap = {}
    for r, c in t.items():
        r = validate_ranking(r, n_candidates)
        if c < 0 or int(c) != c:
            raise ValidationError(f"count for ranking {r} must be a non-negative integer, got {c}")
        out[r] = out.get(r, 0) + int(c)
    return out


def first_place_totals(t: Mapping[Ranking, int], remaining) -> tuple[dict[int, int], int]:
    """Credit each ballot to its highest-ranked remaining candidate.

    Returns ``(totals, exhausted)``; every remaining candidate has a key.
    """
    remaining = frozenset(remaining)
    if not remaining:
        raise ValidationError("remaining candidate set is empty")
    totals = {c: 0 for c in sorted(remaining)}
    exhausted = 0
    for r, n in t.items():
        top = first_remaining(r, remaining)
        if top is None:
            exhausted += n
        else:
            totals[top] += n
    return totals, exhausted


def run_irv(t: Mapping[Ranking, int], candidates: int | Sequence[Candidate],
            tie_policy: TiePolicy = "uniform-random", seed: int | None = None) -> IRVResult:
    """Tabulate an IRV election to completion (no majority stop).

    Ties for last place follow ``tie_policy``: ``eliminate-all`` drops every
    tied candidate, ``uniform-random`` drops one chosen with the given seed,
    ``error`` raises :class:`TieError`.
    """
    if tie_policy not in TIE_POLICIES:
        raise ValidationError(f"unknown tie policy {tie_policy!r}")
    n = _n_candidates(candidates)
    if n < 1:
        raise ValidationError("at least one candidate is required")
    t = validate_tally(t, n)
    rng = np.random.default_rng(seed)
    remaining = frozenset(range(n))
    rounds: list[RoundRecord] = []
    order: list[int] = []
    while remaining:
        totals, exhausted = first_place_totals(t, remaining)
        if len(remaining) == 1:
            rounds.append(RoundRecord(remaining, totals, exhausted, frozenset()))
            return IRVResult(tuple(rounds), next(iter(remaining)), tuple(order))
        low = min(totals.values())
        tied = sorted(c for c, v in totals.items() if v == low)
        if len(tied) > 1:
            if tie_policy == "error":
                raise TieError(tied, len(rounds) + 1)
            if tie_policy == "uniform-random":
                tied = [int(rng.choice(tied))]
        out = frozenset(tied)
        rounds.append(RoundRecord(remaining, totals, exhausted, out))
        order.extend(tied)
        remaining = remaining - out
    return IRVResult(tuple(rounds), None, tuple(order))


def tabulate_batch(counts: np.ndarray, rankings: Sequence[Ranking], n_candidates: int,
                   ties: Literal["split", "random"] = "split",
                   rng: np.random.Generator | None = None) -> np.ndarray:
    """Win shares for many tallies at once.

    ``counts[s, j]`` is the vote count of ``rankings[j]`` in tally ``s``.
    Returns an ``(S, N)`` array. With ``ties="split"`` a last-place tie
    among ``m`` candidates sends ``1/m`` of the tally's weight down each
    elimination branch; with ``ties="random"`` one tied candidate is drawn
    uniformly from ``rng`` and each row is a 0/1 indicator.
    """
    counts = np.asarray(counts)
    if counts.ndim != 2 or counts.shape[1] != len(rankings):
        raise ValidationError("counts must have one column per ranking")
    if ties == "random" and rng is None:
        raise ValidationError("ties='random' needs an rng")
    n_states = counts.shape[0]
    out = np.zeros((n_states, n_candidates))

    def recurse(remaining: tuple[int, ...], idx: np.ndarray, share: np.ndarray) -> None:
        if len(remaining) == 1:
            np.add.at(out, (idx, remaining[0]), share)
            return
        rem_set = frozenset(remaining)
        tops = [first_remaining(r, rem_set) for r in rankings]
        sub = counts[idx]
        totals = np.empty((idx.size, len(remaining)), dtype=np.float64)
        for j, c in enumerate(remaining):
            cols = [k for k, top in enumerate(tops) if top == c]
            totals[:, j] = sub[:, cols].sum(axis=1) if cols else 0
        low = totals.min(axis=1, keepdims=True)
        tied = totals == low
        if ties == "split":
            n_tied = tied.sum(axis=1)
            for j, c in enumerate(remaining):
                sel = tied[:, j]
                if sel.any():
                    nxt = tuple(x for x in remaining if x != c)
                    recurse(nxt, idx[sel], share[sel] / n_tied[sel])
        else:
            key = rng.random(totals.shape)
            key[~tied] = np.inf
            pick = key.argmin(axis=1)
            for j, c in enumerate(remaining):
                sel = pick == j
                if sel.any():
                    nxt = tuple(x for x in remaining if x != c)
                    recurse(nxt, idx[sel], share[sel])

    if n_states:
        recurse(tuple(range(n_candidates)), np.arange(n_states), np.ones(n_states))
    return out
