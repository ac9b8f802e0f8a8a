"""Win probabilities for an IRV election with independent per-ranking vote totals.

Each round's first-place total for a candidate is the convolution of the
distributions of rankings headed by that candidate. From those totals we get
the probability that each subset of candidates shares the lowest bucket; a
bucket-tie among ``m`` candidates is split evenly between them. Eliminating
a candidate merges rankings that become identical, which again is a
convolution, and the win vector is the elimination-weighted average of the
win vectors of the next rounds.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .dist import DiscreteDist, Strategy, cdf, convolve_many
from .domain import (EMPTY, Candidate, Ranking, check_candidates, first_remaining,
                     remove_candidate, validate_ranking)
from .errors import DomainMismatchError, ValidationError
from .tree import EliminationTree, TreeNode, WinVector

SUM_TOL = 1e-9


def _ranking_key(r: Ranking) -> tuple[int, Ranking]:
    return (len(r), r)


@dataclass(frozen=True, eq=False)
class ElectionModel:
    """Candidates plus one vote-total distribution per ranking.

    Rankings absent from ``dists`` receive no votes. ``eliminated`` lists the
    candidates already removed, in order; rankings may only use the others.
    """

    candidates: tuple[Candidate, ...]
    dists: Mapping[Ranking, DiscreteDist]
    bucket_size: int = 1
    eliminated: tuple[int, ...] = ()

    def __post_init__(self):
        cands = tuple(self.candidates)
        check_candidates(cands)
        object.__setattr__(self, "candidates", cands)
        n = len(cands)
        out = set(self.eliminated)
        if len(out) != len(self.eliminated) or any(not 0 <= a < n for a in out):
            raise ValidationError(f"bad eliminated sequence {self.eliminated}")
        if len(out) >= n:
            raise ValidationError("at least one candidate must remain")
        dists: dict[Ranking, DiscreteDist] = {}
        for r, f in self.dists.items():
            r = validate_ranking(r, n)
            if out.intersection(r):
                raise ValidationError(f"ranking {r} uses an eliminated candidate")
            if f.bucket_size != self.bucket_size:
                raise DomainMismatchError(
                    f"ranking {r} has bucket size {f.bucket_size}, model uses {self.bucket_size}")
            if abs(float(f.mass.sum()) - 1.0) > SUM_TOL:
                raise ValidationError(f"distribution for {r} does not sum to 1")
            dists[r] = f
        dists.setdefault(EMPTY, DiscreteDist.point(0, self.bucket_size))
        object.__setattr__(self, "dists", {r: dists[r] for r in sorted(dists, key=_ranking_key)})

    @classmethod
    def from_codes(cls, codes: str | Sequence[str], dists: Mapping[str, DiscreteDist],
                   bucket_size: int | None = None) -> "ElectionModel":
        """Convenience constructor keyed by ranking text, e.g. ``{"AB": f}``."""
        from .domain import make_candidates, parse_ranking
        cands = make_candidates(codes)
        if bucket_size is None:
            sizes = {f.bucket_size for f in dists.values()}
            bucket_size = sizes.pop() if len(sizes) == 1 else 1
        return cls(cands, {parse_ranking(k, cands): f for k, f in dists.items()}, bucket_size)

    @property
    def remaining(self) -> tuple[int, ...]:
        out = set(self.eliminated)
        return tuple(c.index for c in self.candidates if c.index not in out)

    def dist(self, r: Ranking) -> DiscreteDist:
        return self.dists.get(tuple(r), DiscreteDist.point(0, self.bucket_size))

    def collapse_full_rankings(self) -> "ElectionModel":
        """Fold each ranking of every remaining candidate into its prefix."""
        n = len(self.remaining)
        groups: dict[Ranking, list[DiscreteDist]] = {}
        for r, f in self.dists.items():
            groups.setdefault(r[:-1] if len(r) == n else r, []).append(f)
        return ElectionModel(self.candidates,
                             {r: convolve_many(fs) for r, fs in groups.items()},
                             self.bucket_size, self.eliminated)

    def allclose(self, other: "ElectionModel", atol: float = 1e-12) -> bool:
        keys = set(self.dists) | set(other.dists)
        return (self.remaining == other.remaining
                and all(self.dist(k).allclose(other.dist(k), atol) for k in keys))

    def n_joint_states(self) -> int:
        n = 1
        for f in self.dists.values():
            n *= int(np.count_nonzero(f.mass))
        return n


@dataclass(frozen=True)
class RoundTables:
    """First-place total distributions (``tau``) and their cdfs (``kappa``)."""

    tau: dict[int, DiscreteDist]
    kappa: dict[int, np.ndarray]
    length: int

    @property
    def remaining(self) -> tuple[int, ...]:
        return tuple(self.tau)

    def dense_tau(self, a: int) -> np.ndarray:
        return self.tau[a].dense(self.length)


def compute_tau(model: ElectionModel, remaining: Iterable[int] | None, a: int,
                strategy: Strategy = "auto") -> DiscreteDist:
    """Distribution of the number of ballots whose top remaining choice is ``a``."""
    rem = frozenset(model.remaining if remaining is None else remaining)
    if a not in rem:
        raise ValidationError(f"candidate {a} is not among the remaining candidates")
    parts = [f for r, f in model.dists.items() if first_remaining(r, rem) == a]
    if not parts:
        return DiscreteDist.point(0, model.bucket_size)
    return convolve_many(parts, strategy)


def round_tables(model: ElectionModel, strategy: Strategy = "auto") -> RoundTables:
    rem = model.remaining
    tau = {a: compute_tau(model, rem, a, strategy) for a in rem}
    length = max(t.end for t in tau.values())
    kappa = {a: cdf(t, length) for a, t in tau.items()}
    return RoundTables(tau, kappa, length)


def tie_set_prob(tables: RoundTables, s: Iterable[int]) -> float:
    """Probability that exactly the candidates in ``s`` share the lowest bucket."""
    s = frozenset(s)
    if not s or not s <= set(tables.remaining):
        raise ValidationError(f"tie set {sorted(s)} must be a non-empty subset of the remaining candidates")
    prod = np.ones(tables.length)
    for a in tables.remaining:
        if a in s:
            prod *= tables.dense_tau(a)
        else:
            # cumulative sums can overshoot 1 by round-off
            prod *= np.maximum(1.0 - tables.kappa[a], 0.0)
    return float(prod.sum())


def tie_set_probs(tables: RoundTables) -> dict[tuple[int, ...], float]:
    rem = tables.remaining
    out = {}
    for k in range(1, len(rem) + 1):
        for s in itertools.combinations(rem, k):
            out[s] = tie_set_prob(tables, s)
    return out


def elimination_probs(tables: RoundTables,
                      ties: Mapping[tuple[int, ...], float] | None = None) -> dict[int, float]:
    """Probability each candidate is eliminated this round, splitting bucket-ties evenly."""
    rem = tables.remaining
    if len(rem) < 2:
        raise ValidationError("elimination needs at least two remaining candidates")
    if ties is None:
        ties = tie_set_probs(tables)
    out = {a: 0.0 for a in rem}
    for s, p in ties.items():
        for a in s:
            out[a] += p / len(s)
    return out


def project(model: ElectionModel, a: int, strategy: Strategy = "auto") -> ElectionModel:
    """The next round's model after eliminating ``a``.

    Rankings that coincide once ``a`` is removed have their distributions
    convolved; ballots listing only ``a`` join the exhausted ranking.
    """
    if a not in model.remaining:
        raise ValidationError(f"candidate {a} is not among the remaining candidates")
    groups: dict[Ranking, list[DiscreteDist]] = {}
    for r, f in model.dists.items():
        groups.setdefault(remove_candidate(r, a), []).append(f)
    dists = {r: convolve_many(fs, strategy) for r, fs in groups.items()}
    return ElectionModel(model.candidates, dists, model.bucket_size, model.eliminated + (a,))


def _indicator(model: ElectionModel) -> dict[int, float]:
    (winner,) = model.remaining
    return {c.index: float(c.index == winner) for c in model.candidates}


def _evaluate_round(model: ElectionModel, strategy: Strategy):
    tables = round_tables(model, strategy)
    ties = tie_set_probs(tables)
    return ties, elimination_probs(tables, ties)


def _combine(model: ElectionModel, elim: Mapping[int, float],
             child_wins: Mapping[int, Mapping[int, float]]) -> dict[int, float]:
    win = {c.index: 0.0 for c in model.candidates}
    for a in model.remaining:
        for c in win:
            win[c] += elim[a] * child_wins[a][c]
    return win


def win_vector(model: ElectionModel, strategy: Strategy = "auto") -> tuple[WinVector, EliminationTree]:
    """Win probability of every candidate, with the full elimination tree.

    Every elimination order is expanded separately.
    """
    tree = EliminationTree(model.candidates)

    def recurse(m: ElectionModel) -> dict[int, float]:
        node = TreeNode(m.eliminated, m.remaining)
        tree.nodes[m.eliminated] = node
        if len(m.remaining) == 1:
            node.win = _indicator(m)
            return node.win
        node.tie_probs, node.elim_probs = _evaluate_round(m, strategy)
        child = {a: recurse(project(m, a, strategy)) for a in m.remaining}
        node.win = _combine(m, node.elim_probs, child)
        return node.win

    win = recurse(model)
    return WinVector(model.candidates, win), tree


def win_vector_memoized(model: ElectionModel,
                        strategy: Strategy = "auto") -> tuple[WinVector, EliminationTree]:
    """Same result as :func:`win_vector`, sharing work across elimination orders.

    A round's model depends only on which candidates are out, not on the
    order they left, so projections and round results are cached per set.
    Projection always proceeds in sorted order of the eliminated set, so the
    cached model does not depend on which path reached it first.
    """
    models: dict[frozenset[int], ElectionModel] = {frozenset(model.eliminated): model}
    rounds: dict[frozenset[int], tuple] = {}
    wins: dict[frozenset[int], dict[int, float]] = {}
    base = frozenset(model.eliminated)

    def get_model(out: frozenset[int]) -> ElectionModel:
        if out not in models:
            last = max(out - base)
            models[out] = project(get_model(out - {last}), last, strategy)
        return models[out]

    def solve(out: frozenset[int]) -> dict[int, float]:
        if out in wins:
            return wins[out]
        m = get_model(out)
        if len(m.remaining) == 1:
            wins[out] = _indicator(m)
            return wins[out]
        rounds[out] = _evaluate_round(m, strategy)
        child = {a: solve(out | {a}) for a in m.remaining}
        wins[out] = _combine(m, rounds[out][1], child)
        return wins[out]

    win = solve(base)
    tree = EliminationTree(model.candidates)
    n = len(model.candidates)

    def build(order: tuple[int, ...]) -> None:
        out = base | set(order)
        rem = tuple(c for c in range(n) if c not in out)
        node = TreeNode(model.eliminated + order, rem, win=wins[out])
        tree.nodes[node.order] = node
        if len(rem) > 1:
            node.tie_probs, node.elim_probs = rounds[out]
            for a in rem:
                build(order + (a,))

    build(())
    return WinVector(model.candidates, win), tree
