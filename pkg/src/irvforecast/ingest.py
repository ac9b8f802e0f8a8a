"""Cast vote records, precinct-ordered partial counts, and election-night replays."""
from __future__ import annotations

import csv
import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Mapping, Sequence, TextIO

import numpy as np

from .domain import Candidate, Ranking, collapse_full_rankings, make_candidates
from .engine import win_vector_memoized
from .errors import ParseError, ValidationError
from .models import PartialCountParams, partial_count_model
from .tabulator import TallyMap
from .tree import WinVector

# Cells that end a ranking without naming a candidate.
STOP_MARKS = frozenset({"", "-", "undervote", "skipped", "overvote", "writein", "write-in"})
OVERVOTE_SEPARATORS = ("|", "=")


@dataclass(frozen=True)
class Ballot:
    ballot_id: str
    precinct_portion: str
    ranking: Ranking


@dataclass(frozen=True)
class CastVoteRecord:
    candidates: tuple[Candidate, ...]
    ballots: tuple[Ballot, ...]

    def __len__(self) -> int:
        return len(self.ballots)

    def precinct_portions(self) -> list[str]:
        """Precinct portions in order of first appearance."""
        return list(dict.fromkeys(b.precinct_portion for b in self.ballots))

    def tally(self) -> TallyMap:
        out: TallyMap = {}
        for b in self.ballots:
            out[b.ranking] = out.get(b.ranking, 0) + 1
        return out


@dataclass(frozen=True)
class ReplayScenario:
    precinct_order: tuple[str, ...]
    step: float
    seed: int | None = None

    def __post_init__(self):
        if not 0 < self.step <= 1:
            raise ValidationError(f"step must be in (0, 1], got {self.step}")

    def fractions(self) -> list[float]:
        n = int(np.ceil(1 / self.step - 1e-9))
        return [min(1.0, k * self.step) if k < n else 1.0 for k in range(1, n + 1)]


def _resolve_candidates(candidate_codes) -> tuple[tuple[Candidate, ...], dict[str, int]]:
    if isinstance(candidate_codes, Mapping):
        codes = list(dict.fromkeys(candidate_codes.values()))
        cands = make_candidates(codes)
        index = {c.code: c.index for c in cands}
        lookup = {cell: index[code] for cell, code in candidate_codes.items()}
        lookup.update(index)
    else:
        cands = tuple(candidate_codes)
        lookup = {c.code: c.index for c in cands}
        lookup.update({c.display_name: c.index for c in cands if c.display_name})
    return cands, lookup


def parse_cvr(source: TextIO | str, candidate_codes: Mapping[str, str] | Sequence[Candidate],
              id_column: str = "ballot_id", precinct_column: str = "precinct_portion",
              rank_prefix: str = "rank") -> CastVoteRecord:
    """Read a CVR with header ``ballot_id,precinct_portion,rank1,...,rankK``.

    ``candidate_codes`` maps the text that appears in rank cells to a
    candidate code (or is a candidate sequence, matched by code or display
    name). Marks are read in rank order: a repeated candidate is skipped, a
    blank, undervote, write-in or overvote cell ends the ranking, and any
    other unrecognised text is an error.
    """
    cands, lookup = _resolve_candidates(candidate_codes)
    text = source if isinstance(source, str) else source.read()
    reader = csv.reader(io.StringIO(text))
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise ParseError("CVR is empty") from None
    try:
        id_col, pp_col = header.index(id_column), header.index(precinct_column)
    except ValueError:
        raise ParseError(f"CVR header must include {id_column!r} and {precinct_column!r}: {header}") from None
    rank_cols = [i for i, h in enumerate(header) if h.lower().startswith(rank_prefix.lower())]
    if not rank_cols:
        raise ParseError(f"CVR header has no {rank_prefix}* columns")
    ballots = []
    for lineno, row in enumerate(reader, start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) < len(header):
            raise ParseError(f"CVR row {lineno}: expected {len(header)} columns, got {len(row)}")
        ranking: list[int] = []
        for col in rank_cols:
            cell = row[col].strip()
            if cell.lower() in STOP_MARKS or any(s in cell for s in OVERVOTE_SEPARATORS):
                break
            if cell not in lookup:
                raise ParseError(f"CVR row {lineno}: unknown candidate {cell!r}")
            idx = lookup[cell]
            if idx not in ranking:
                ranking.append(idx)
        ballots.append(Ballot(row[id_col].strip(), row[pp_col].strip(), tuple(ranking)))
    return CastVoteRecord(cands, tuple(ballots))


def write_cvr(cvr: CastVoteRecord) -> str:
    k = len(cvr.candidates)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["ballot_id", "precinct_portion"] + [f"rank{i}" for i in range(1, k + 1)])
    for b in cvr.ballots:
        marks = [cvr.candidates[i].code for i in b.ranking]
        w.writerow([b.ballot_id, b.precinct_portion] + marks + [""] * (k - len(marks)))
    return buf.getvalue()


def make_scenario(cvr: CastVoteRecord, step: float, seed: int) -> ReplayScenario:
    """Seeded random ordering of the precinct portions."""
    portions = sorted(cvr.precinct_portions())
    perm = np.random.default_rng(seed).permutation(len(portions))
    return ReplayScenario(tuple(portions[i] for i in perm), step, seed)


def precinct_tallies(cvr: CastVoteRecord) -> dict[str, TallyMap]:
    out: dict[str, TallyMap] = {}
    for b in cvr.ballots:
        t = out.setdefault(b.precinct_portion, {})
        t[b.ranking] = t.get(b.ranking, 0) + 1
    return out


def tally_prefix(cvr: CastVoteRecord, order: Sequence[str], fraction: float,
                 by_precinct: Mapping[str, TallyMap] | None = None) -> tuple[TallyMap, float]:
    """Count whole precinct portions in ``order`` until ``fraction`` of ballots is reached.

    Returns the collapsed tally and the fraction of ballots it actually holds.
    """
    if not 0 <= fraction <= 1:
        raise ValidationError(f"fraction must be in [0, 1], got {fraction}")
    total = len(cvr)
    if total == 0:
        raise ValidationError("CVR has no ballots")
    if set(order) != set(cvr.precinct_portions()):
        raise ValidationError("precinct order must be a permutation of the CVR's precinct portions")
    if by_precinct is None:
        by_precinct = precinct_tallies(cvr)
    counted: TallyMap = {}
    n = 0
    target = fraction * total - 1e-9
    for p in order:
        if n >= target:
            break
        for r, c in by_precinct.get(p, {}).items():
            counted[r] = counted.get(r, 0) + c
            n += c
    k = len(cvr.candidates)
    return collapse_full_rankings(counted, k), n / total


@dataclass(frozen=True)
class ReplayPoint:
    fraction: float
    fraction_exact: float
    win: WinVector


def replay(cvr: CastVoteRecord, scenario: ReplayScenario, params: PartialCountParams,
           n_jobs: int = 1) -> list[ReplayPoint]:
    """Win vectors as the count advances through the scenario's precinct order."""
    if set(scenario.precinct_order) != set(cvr.precinct_portions()):
        raise ValidationError("scenario precinct order does not match the CVR")
    by_precinct = precinct_tallies(cvr)

    def point(x: float) -> ReplayPoint:
        counted, fx = tally_prefix(cvr, scenario.precinct_order, x, by_precinct)
        model = partial_count_model(counted, cvr.candidates, replace(params, fraction_counted=fx))
        return ReplayPoint(x, fx, win_vector_memoized(model)[0])

    xs = scenario.fractions()
    if n_jobs > 1:
        with ThreadPoolExecutor(n_jobs) as pool:
            return list(pool.map(point, xs))
    return [point(x) for x in xs]


def write_series(points: Sequence[ReplayPoint], candidates: Sequence[Candidate],
                 scenario: ReplayScenario | None = None, ternary: bool = False) -> str:
    """Replay series as CSV: ``fraction,<code>,...`` (or ``fraction,pA,pB,pC``)."""
    if ternary and len(candidates) != 3:
        raise ValidationError("ternary output needs exactly three candidates")
    buf = io.StringIO()
    if scenario is not None:
        buf.write(f"# seed={scenario.seed} step={scenario.step} precincts={len(scenario.precinct_order)}\n")
    w = csv.writer(buf, lineterminator="\n")
    prefix = "p" if ternary else ""
    w.writerow(["fraction"] + [prefix + c.code for c in candidates])
    for pt in points:
        p = pt.win.as_array()
        if ternary:
            p = np.clip(p, 0.0, 1.0)
            p = p / p.sum()
        w.writerow([f"{pt.fraction:.6g}"] + [repr(float(v)) for v in p])
    return buf.getvalue()
