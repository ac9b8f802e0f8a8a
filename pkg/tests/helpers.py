"""Printed reference tables, sample data loaders and random model generators."""
from __future__ import annotations

from pathlib import Path

import numpy as np

from irvforecast.dist import DiscreteDist
from irvforecast.domain import enumerate_rankings, make_candidates
from irvforecast.engine import ElectionModel
from irvforecast.formats import read_dist_table

DATA = Path(__file__).resolve().parent.parent / "data"

EXAMPLE2_TALLY_TEXT = {"AB": 501, "AC": 300, "BA": 400, "BC": 400, "CA": 200, "CB": 600,
                       "A": 500, "B": 400, "C": 500}


# First-place total tables for the three-candidate worked example (labels 0..1400 by 100).
EX5_TAU = {
    0: [0.0025, 0.047, 0.1639, 0.2559, 0.2336, 0.1618, 0.0932, 0.0337, 0.0069, 0.0015, 0, 0, 0, 0, 0],
    1: [0, 0, 0, 0.0045, 0.0301, 0.0867, 0.1525, 0.1968, 0.199, 0.1577, 0.0998, 0.0496, 0.018, 0.0047, 0.0006],
    2: [0.0003, 0.007, 0.039, 0.095, 0.175, 0.1934, 0.1813, 0.1466, 0.0931, 0.0453, 0.0181, 0.0055, 0.0004, 0, 0],
}
EX5_KAPPA = {
    0: [0.0025, 0.0495, 0.2134, 0.4693, 0.7029, 0.8647, 0.9579, 0.9916, 0.9985, 1, 1, 1, 1, 1, 1],
    1: [0, 0, 0, 0.0045, 0.0346, 0.1213, 0.2738, 0.4706, 0.6696, 0.8273, 0.9271, 0.9767, 0.9947, 0.9994, 1],
    2: [0.0003, 0.0073, 0.0463, 0.1413, 0.3163, 0.5097, 0.691, 0.8376, 0.9307, 0.976, 0.9941, 0.9996, 1, 1, 1],
}
EX5_TIES = {(0,): 0.672, (1,): 0.016, (2,): 0.167, (0, 1): 0.018, (0, 2): 0.112, (1, 2): 0.005, (0, 1, 2): 0.007}

# Recount table for the 3801-ballot tally, entries rounded to two places.
EX2_RECOUNT_TABLE = {
    "CA": {200: .98, 201: .02},
    "AC": {299: .02, 300: .79, 301: .19},
    "B": {399: .06, 400: .59, 401: .34, 402: .01},
    "BA": {399: .06, 400: .59, 401: .34, 402: .01},
    "BC": {399: .06, 400: .59, 401: .34, 402: .01},
    "A": {499: .09, 500: .48, 501: .38, 502: .05},
    "C": {499: .09, 500: .48, 501: .38, 502: .05},
    "AB": {500: .09, 501: .47, 502: .38, 503: .05},
    "CB": {598: .01, 599: .11, 600: .40, 601: .38, 602: .10, 603: .01},
}


def example5():
    return read_dist_table((DATA / "example5.csv").read_text(), bucket_size=100)


def house18():
    import warnings
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return read_dist_table((DATA / "house18_partial.csv").read_text(), bucket_size=75)


def example2_tally():
    from irvforecast.domain import parse_ranking
    cands = make_candidates("ABC")
    return {parse_ranking(k, cands): v for k, v in EXAMPLE2_TALLY_TEXT.items()}, cands


def random_dist(rng: np.random.Generator, lo: int, hi: int, max_support: int,
                bucket_size: int = 1) -> DiscreteDist:
    """Random mass on up to ``max_support`` buckets drawn from [lo, hi]."""
    k = int(rng.integers(1, max_support + 1))
    ks = rng.choice(np.arange(lo, hi + 1), size=min(k, hi - lo + 1), replace=False)
    m = np.zeros(hi + 1)
    m[ks] = rng.random(ks.size) + 0.05
    return DiscreteDist.from_array(m, bucket_size, normalize=True)


def random_model(rng: np.random.Generator, n: int, hi: int = 12, max_support: int = 3,
                 p_present: float = 0.8, bucket_size: int = 1) -> ElectionModel:
    """Random model over all non-empty rankings shorter than ``n`` (collapsed key space)."""
    cands = make_candidates("ABCDE"[:n])
    dists = {}
    for r in enumerate_rankings(range(n), max_len=max(n - 1, 1))[1:]:
        if rng.random() < p_present:
            dists[r] = random_dist(rng, 0, hi, max_support, bucket_size)
    return ElectionModel(cands, dists, bucket_size)


def first_round_separated_model(rng: np.random.Generator) -> ElectionModel:
    """3-candidate model whose first elimination is certain.

    Every ranking headed by the loser sits on buckets 0..2, so that
    candidate's first-place total is at most 6; the other two candidates
    each have a single-choice ranking supported on 7..12. The remaining
    two-way round is unconstrained.
    """
    cands = make_candidates("ABC")
    loser = int(rng.integers(3))
    dists = {}
    for r in enumerate_rankings(range(3), max_len=2)[1:]:
        if r[0] == loser:
            dists[r] = random_dist(rng, 0, 2, 2)
        elif len(r) == 1:
            dists[r] = random_dist(rng, 7, 12, 3)
        else:
            dists[r] = random_dist(rng, 0, 6, 2)
    return ElectionModel(cands, dists, 1)


def random_tally(rng: np.random.Generator, n: int, n_rankings: int, max_count: int = 50) -> dict:
    all_r = enumerate_rankings(range(n))
    idx = rng.choice(len(all_r), size=min(n_rankings, len(all_r)), replace=False)
    return {all_r[i]: int(rng.integers(0, max_count + 1)) for i in idx}
