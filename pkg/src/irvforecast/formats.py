"""Distribution tables and tallies as delimiter-separated text.

Distribution table::

    votes,A,B,AB,...
    0,0.50,0.10,.
    100,0.50,.,0.17

Each column is one ranking's distribution over bucket labels (lower edges);
"." or an empty cell is zero. Tally file::

    ranking,count
    AB,501
    -,12
"""
from __future__ import annotations

import csv
import io
import warnings
from typing import Iterable, Mapping, Sequence, TextIO

import numpy as np

from .dist import DiscreteDist
from .domain import Candidate, Ranking, enumerate_rankings, format_ranking, infer_candidates, parse_ranking
from .engine import ElectionModel
from .errors import ParseError

COLUMN_SUM_TOL = 0.05


def _rows(source: TextIO | str) -> list[list[str]]:
    text = source if isinstance(source, str) else source.read()
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise ParseError("input is empty")
    delim = "\t" if "\t" in lines[0] else ";" if ";" in lines[0] and "," not in lines[0] else ","
    return [[cell.strip() for cell in row] for row in csv.reader(lines, delimiter=delim)]


def _prob(cell: str, where: str) -> float:
    if cell in ("", "."):
        return 0.0
    try:
        return float(cell)
    except ValueError:
        raise ParseError(f"{where}: not a probability: {cell!r}") from None


def read_dist_table(source: TextIO | str, bucket_size: int = 1,
                    candidates: Sequence[Candidate] | None = None) -> ElectionModel:
    """Load a distribution table into an :class:`ElectionModel`.

    Columns off unit sum by at most 0.05 (printed tables are rounded) are
    renormalized with a warning; larger deviations are rejected. Vote
    labels must be multiples of ``bucket_size``.
    """
    rows = _rows(source)
    header, body = rows[0], rows[1:]
    if len(header) < 2:
        raise ParseError("distribution table needs a votes column and at least one ranking column")
    names = header[1:]
    if candidates is None:
        candidates = infer_candidates(names)
    rankings = [parse_ranking(n, candidates) for n in names]
    if len(set(rankings)) != len(rankings):
        raise ParseError("duplicate ranking column in distribution table")
    buckets: list[int] = []
    values = np.zeros((len(body), len(names)))
    for i, row in enumerate(body, start=2):
        if len(row) != len(header):
            raise ParseError(f"line {i}: expected {len(header)} cells, got {len(row)}")
        try:
            label = int(float(row[0]))
        except ValueError:
            raise ParseError(f"line {i}: bad vote label {row[0]!r}") from None
        if label < 0 or label % bucket_size:
            raise ParseError(f"line {i}: vote label {label} is not a non-negative multiple of {bucket_size}")
        buckets.append(label // bucket_size)
        values[i - 2] = [_prob(c, f"line {i}") for c in row[1:]]
    if len(set(buckets)) != len(buckets):
        raise ParseError("duplicate vote label in distribution table")
    if (values < 0).any() or (values > 1).any():
        raise ParseError("probabilities must lie in [0, 1]")
    idx = np.asarray(buckets, dtype=np.int64)
    dists: dict[Ranking, DiscreteDist] = {}
    for j, (name, r) in enumerate(zip(names, rankings)):
        total = values[:, j].sum()
        if abs(total - 1.0) > COLUMN_SUM_TOL:
            raise ParseError(f"column {name!r} sums to {total:.4f}; more than {COLUMN_SUM_TOL} from 1")
        if abs(total - 1.0) > 1e-9:
            warnings.warn(f"column {name!r} sums to {total:.4f}; renormalized", stacklevel=2)
        dense = np.zeros(int(idx.max()) + 1 if idx.size else 1)
        dense[idx] = values[:, j]
        dists[r] = DiscreteDist.from_array(dense, bucket_size, normalize=True)
    return ElectionModel(tuple(candidates), dists, bucket_size)


def write_dist_table(model: ElectionModel, rankings: Iterable[Ranking] | None = None,
                     zero: str = ".") -> str:
    if rankings is None:
        rankings = [r for r in enumerate_rankings(model.remaining) if r in model.dists]
    rankings = list(rankings)
    lo = min(model.dist(r).offset for r in rankings)
    hi = max(model.dist(r).end for r in rankings)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["votes"] + [format_ranking(r, model.candidates) for r in rankings])
    for k in range(lo, hi):
        cells = [model.dist(r).pmf(k) for r in rankings]
        if not any(cells):
            continue
        w.writerow([k * model.bucket_size] + [repr(c) if c else zero for c in cells])
    return buf.getvalue()


def read_tally(source: TextIO | str, candidates: Sequence[Candidate] | None = None
               ) -> tuple[dict[Ranking, int], tuple[Candidate, ...]]:
    """Parse ``ranking,count`` lines; a non-numeric count on line 1 marks a header."""
    rows = _rows(source)
    if rows and len(rows[0]) >= 2 and not rows[0][1].lstrip("-").isdigit():
        rows = rows[1:]
    for i, row in enumerate(rows, 1):
        if len(row) != 2:
            raise ParseError(f"tally line {i}: expected 'ranking,count', got {row}")
    if candidates is None:
        candidates = infer_candidates(r[0] for r in rows)
    tally: dict[Ranking, int] = {}
    for i, (text, count) in enumerate(rows, 1):
        try:
            c = int(count)
        except ValueError:
            raise ParseError(f"tally line {i}: bad count {count!r}") from None
        if c < 0:
            raise ParseError(f"tally line {i}: negative count")
        r = parse_ranking(text, candidates)
        tally[r] = tally.get(r, 0) + c
    return tally, tuple(candidates)


def write_tally(tally: Mapping[Ranking, int], candidates: Sequence[Candidate]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["ranking", "count"])
    for r in sorted(tally, key=lambda r: (len(r), r)):
        w.writerow([format_ranking(r, candidates), tally[r]])
    return buf.getvalue()
