"""Candidates, rankings and the combinatorics of subset permutations.

A ranking is a plain tuple of candidate indices, most preferred first. The
empty tuple is the exhausted ballot and is a key like any other.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import ParseError, ValidationError

Ranking = tuple[int, ...]
EMPTY: Ranking = ()


@dataclass(frozen=True)
class Candidate:
    index: int
    code: str
    display_name: str = ""

    def __post_init__(self):
        if self.index < 0:
            raise ValidationError(f"candidate index must be non-negative, got {self.index}")
        if not self.code:
            raise ValidationError("candidate code must be non-empty")

    @property
    def name(self) -> str:
        return self.display_name or self.code


def make_candidates(codes: Iterable[str], names: Sequence[str] | None = None) -> tuple[Candidate, ...]:
    """Build a contiguous candidate tuple from codes, e.g. ``make_candidates("ABC")``."""
    codes = list(codes)
    if names is None:
        names = [""] * len(codes)
    if len(set(codes)) != len(codes):
        raise ValidationError(f"candidate codes must be distinct: {codes}")
    return tuple(Candidate(i, c, n) for i, (c, n) in enumerate(zip(codes, names)))


def check_candidates(candidates: Sequence[Candidate]) -> None:
    idx = [c.index for c in candidates]
    if sorted(idx) != list(range(len(idx))):
        raise ValidationError(f"candidate indices must be contiguous from 0: {idx}")
    codes = [c.code for c in candidates]
    if len(set(codes)) != len(codes):
        raise ValidationError(f"candidate codes must be distinct: {codes}")


def subset_permutation_count(n: int) -> int:
    """Number of rankings (of any length, including empty) over ``n`` candidates."""
    return sum(math.perm(n, k) for k in range(n + 1))


def enumerate_rankings(candidates: Iterable[int | Candidate], max_len: int | None = None) -> list[Ranking]:
    """All subset permutations, ordered by length and then lexicographically by index."""
    idx = sorted(c.index if isinstance(c, Candidate) else int(c) for c in candidates)
    if not idx:
        raise ValidationError("candidate set must be non-empty")
    if max_len is None:
        max_len = len(idx)
    if max_len > len(idx):
        raise ValidationError(f"max_len {max_len} exceeds candidate count {len(idx)}")
    out: list[Ranking] = []
    for k in range(max_len + 1):
        out.extend(itertools.permutations(idx, k))
    return out


def remove_candidate(r: Ranking, a: int) -> Ranking:
    return tuple(x for x in r if x != a)


def first_choice(r: Ranking) -> int | None:
    return r[0] if r else None


def first_remaining(r: Ranking, remaining: frozenset[int] | set[int]) -> int | None:
    """Highest-ranked candidate of ``r`` still in ``remaining``."""
    for x in r:
        if x in remaining:
            return x
    return None


def validate_ranking(r: Ranking, n_candidates: int) -> Ranking:
    r = tuple(int(x) for x in r)
    if len(set(r)) != len(r):
        raise ValidationError(f"ranking repeats a candidate: {r}")
    if any(x < 0 or x >= n_candidates for x in r):
        raise ValidationError(f"ranking {r} refers to unknown candidates (N={n_candidates})")
    return r


def collapse_full_rankings(t, n_candidates: int | None = None):
    """Merge every length-N ranking into its length-(N-1) prefix.

    Works on tallies (``{ranking: count}``) and on election models; for a
    model the distributions of merged keys are convolved.
    """
    if hasattr(t, "collapse_full_rankings"):
        return t.collapse_full_rankings()
    if n_candidates is None:
        raise ValidationError("n_candidates is required to collapse a tally")
    out: dict[Ranking, int] = {}
    for r, c in t.items():
        key = r[:-1] if len(r) == n_candidates else r
        out[key] = out.get(key, 0) + c
    return out


# -- text syntax ---------------------------------------------------------

def format_ranking(r: Ranking, candidates: Sequence[Candidate]) -> str:
    if not r:
        return "-"
    return "".join(candidates[i].code for i in r)


def parse_ranking(text: str, candidates: Sequence[Candidate]) -> Ranking:
    """Parse concatenated codes ("GF"); "" or "-" is the empty ranking.

    Codes may be longer than one character as long as the concatenation is
    unambiguous; the longest matching code wins at each position.
    """
    text = text.strip()
    if text in ("", "-", "∅"):
        return EMPTY
    by_code = sorted(((c.code, c.index) for c in candidates), key=lambda x: -len(x[0]))
    out: list[int] = []
    pos = 0
    while pos < len(text):
        for code, i in by_code:
            if text.startswith(code, pos):
                out.append(i)
                pos += len(code)
                break
        else:
            raise ParseError(f"unknown candidate code in ranking {text!r} at position {pos}")
    if len(set(out)) != len(out):
        raise ParseError(f"ranking {text!r} repeats a candidate")
    return tuple(out)


def infer_candidates(ranking_texts: Iterable[str]) -> tuple[Candidate, ...]:
    """Single-character codes in order of first appearance across ranking texts."""
    seen: list[str] = []
    for text in ranking_texts:
        text = text.strip()
        if text in ("", "-", "∅"):
            continue
        for ch in text:
            if ch not in seen:
                seen.append(ch)
    if not seen:
        raise ParseError("no candidate codes found")
    return make_candidates(seen)


def code_lookup(candidates: Sequence[Candidate]) -> Mapping[str, int]:
    return {c.code: c.index for c in candidates}
