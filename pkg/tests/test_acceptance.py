"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -s`` (the lines are also
emitted without ``-s``) or ``python3 tests/test_acceptance.py``.
"""
from __future__ import annotations

import sys
import time

import numpy as np
import pytest

from irvforecast.cli import main as cli_main
from irvforecast.dist import DiscreteDist, convolve, convolve_fft, convolve_naive
from irvforecast.domain import collapse_full_rankings, enumerate_rankings, make_candidates, parse_ranking
from irvforecast.engine import ElectionModel, elimination_probs, round_tables, tie_set_probs, win_vector
from irvforecast.engine import win_vector_memoized
from irvforecast.ingest import parse_cvr
from irvforecast.models import recount_model
from irvforecast.oracle import exhaustive_win_probs, mc_win_probs
from irvforecast.tabulator import run_irv

import helpers


@pytest.fixture
def report(capsys):
    def emit(n: int | str, ok: bool, detail: str = "") -> None:
        with capsys.disabled():
            sys.stdout.write(f"\ncriterion {n}: {'PASS' if ok else 'FAIL'}  {detail}\n")
    return emit


def _within(got, want, tol) -> bool:
    return bool(np.all(np.abs(np.asarray(got, float) - np.asarray(want, float)) <= tol))


def _max_diff(f: DiscreteDist, g: DiscreteDist) -> float:
    n = max(f.end, g.end)
    return float(np.max(np.abs(f.dense(n) - g.dense(n))))


def test_criterion_1_worked_example(report):
    t0 = time.perf_counter()
    m = helpers.example5()
    tables = round_tables(m)
    ties = tie_set_probs(tables)
    elim = elimination_probs(tables, ties)
    win, tree = win_vector(m)
    elapsed = time.perf_counter() - t0

    checks = {}
    checks["tau"] = all(_within(tables.dense_tau(a)[:15], helpers.EX5_TAU[a], 1e-3) for a in range(3))
    checks["kappa"] = all(
        _within(np.concatenate([tables.kappa[a], np.ones(15)])[:15], helpers.EX5_KAPPA[a], 1e-3)
        for a in range(3))
    checks["tie sets"] = all(abs(ties[s] - v) <= 2e-3 for s, v in helpers.EX5_TIES.items())
    checks["elimination"] = _within([elim[a] for a in range(3)], [0.740, 0.031, 0.229], 2e-3)
    node = lambda k: [tree.nodes[k].win[c] for c in range(3)]  # noqa: E731
    checks["W after A"] = _within(node((0,)), [0, 0.909, 0.090], 5e-3)
    # printed figures at the B and C nodes are those nodes' elimination probabilities
    checks["W after B"] = _within(node((1,)), [0.254, 0, 0.745], 5e-3)
    checks["W after C"] = _within(node((2,)), [0.176, 0.823, 0], 5e-3)
    eb, ec = tree.nodes[(1,)].elim_probs, tree.nodes[(2,)].elim_probs
    checks["E after B/C"] = _within([eb[0], eb[2], ec[0], ec[1]], [0.745, 0.254, 0.823, 0.176], 5e-3)
    checks["W"] = _within(win.as_array(), [0.048, 0.861, 0.089], 5e-3)
    checks["runtime"] = elapsed < 1.0
    ok = all(checks.values())
    bad = [k for k, v in checks.items() if not v]
    report(1, ok, f"W={np.round(win.as_array(), 4).tolist()} in {elapsed:.3f}s" + (f" failed: {bad}" if bad else ""))
    assert ok, bad


@pytest.mark.xfail(strict=True, reason="printed node vectors for the B and C rounds are elimination "
                                        "probabilities; as win vectors they contradict the printed final W")
def test_criterion_1_node_vectors_as_printed(report):
    _, tree = win_vector(helpers.example5())
    got_b = [tree.nodes[(1,)].win[c] for c in range(3)]
    got_c = [tree.nodes[(2,)].win[c] for c in range(3)]
    ok = _within(got_b, [0.745, 0, 0.254], 5e-3) and _within(got_c, [0.823, 0.176, 0], 5e-3)
    report("1 (literal B/C node vectors)", ok,
           f"engine W after B={np.round(got_b, 3).tolist()}, after C={np.round(got_c, 3).tolist()}; "
           "see decisions ledger")
    assert ok


def test_criterion_2_partial_count_table(report):
    t0 = time.perf_counter()
    m = helpers.house18()
    win, tree = win_vector_memoized(m)
    elapsed = time.perf_counter() - t0
    e_f = tree.root.elim_probs[0]
    ok = (_within(win.as_array(), [0.026, 0.253, 0.721], 0.03) and abs(e_f - 0.915) <= 0.03
          and elapsed < 1.0)
    report(2, ok, f"W(F,N,G)={np.round(win.as_array(), 4).tolist()} E_F={e_f:.4f} in {elapsed:.3f}s")
    assert ok


def test_criterion_3_recount(report):
    tally, cands = helpers.example2_tally()
    m = recount_model(tally, cands)
    win, _ = win_vector_memoized(m)
    worst = 0.0
    for text, col in helpers.EX2_RECOUNT_TABLE.items():
        f = m.dist(parse_ranking(text, cands))
        for v in range(min(col) - 3, max(col) + 4):
            worst = max(worst, abs(f.prob_at_votes(v) - col.get(v, 0.0)))
    ok = _within(win.as_array(), [0.72, 0.0, 0.28], 0.05) and worst <= 0.01
    report(3, ok, f"W={np.round(win.as_array(), 4).tolist()} worst table entry error {worst:.4f}")
    assert ok


def test_criterion_4_oracle_agreement(report, capsys):
    rng = np.random.default_rng(404)
    worst_exact = 0.0
    for _ in range(50):
        m = helpers.first_round_separated_model(rng)
        worst_exact = max(worst_exact, exhaustive_win_probs(m).max_abs_gap_vs_engine)

    n = 1_000_000
    outside, gaps, zmax = 0, [], 0.0
    for i in range(50):
        m = helpers.random_model(rng, 3, hi=20, max_support=4)
        assert m.n_joint_states() <= 10**6
        ex = exhaustive_win_probs(m)
        mc = mc_win_probs(m, n, seed=i, engine=False)
        p, q = ex.win_probs.as_array(), mc.win_probs.as_array()
        sigma = np.sqrt(p * (1 - p) / n)
        dev = np.abs(q - p)
        if np.any(dev > 3 * sigma + 1e-12):
            outside += 1
        zmax = max(zmax, float(np.max(np.where(sigma > 0, dev / np.maximum(sigma, 1e-300), 0))))
        gaps.append(ex.max_abs_gap_vs_engine)
    ok = worst_exact < 1e-9 and outside == 0
    report(4, ok, f"separated: max |engine-exhaustive|={worst_exact:.2e}; "
                  f"MC outside 3 sigma in {outside}/50 (max z {zmax:.2f}); "
                  f"engine-exhaustive gap median {np.median(gaps):.4f} max {np.max(gaps):.4f}")
    with_gaps = ", ".join(f"{g:.4f}" for g in gaps)
    with capsys.disabled():
        sys.stdout.write(f"  per-instance max |engine - exhaustive|: {with_gaps}\n")
    assert ok


def test_criterion_5_convolution(report):
    rng = np.random.default_rng(5)
    lengths = np.concatenate([[1, 2, 2000], rng.integers(1, 2001, size=60)])
    worst_fft = worst_assoc = 0.0
    for la, lb in zip(lengths, rng.permutation(lengths)):
        f = DiscreteDist.from_array(rng.random(la) + 1e-3, normalize=True)
        g = DiscreteDist.from_array(rng.random(lb) + 1e-3, normalize=True)
        a, b = convolve_fft(f, g), convolve_naive(f, g)
        worst_fft = max(worst_fft, _max_diff(a, b))
    for _ in range(20):
        f, g, h = (DiscreteDist.from_array(rng.random(int(rng.integers(1, 2001))), normalize=True)
                   for _ in range(3))
        left, right = convolve(convolve(f, g), h), convolve(f, convolve(g, h))
        worst_assoc = max(worst_assoc, _max_diff(left, right))
    ok = worst_fft <= 1e-9 and worst_assoc <= 1e-9
    report(5, ok, f"max |fft-naive|={worst_fft:.2e}, max associativity error={worst_assoc:.2e}")
    assert ok


def test_criterion_6_conservation(report):
    rng = np.random.default_rng(6)
    worst_edge = worst_win = 0.0
    nodes = 0
    for i in range(200):
        m = helpers.random_model(rng, (2, 3, 4)[i % 3], hi=15, max_support=5)
        _, tree = win_vector_memoized(m)
        for node in tree:
            nodes += 1
            worst_win = max(worst_win, abs(sum(node.win.values()) - 1))
            if not node.is_leaf:
                worst_edge = max(worst_edge, abs(sum(node.elim_probs.values()) - 1))
    ok = worst_edge <= 1e-6 and worst_win <= 1e-6
    report(6, ok, f"{nodes} nodes; max |sum edges - 1|={worst_edge:.2e}, max |sum W - 1|={worst_win:.2e}")
    assert ok


def test_criterion_7_collapse_invariance(report):
    rng = np.random.default_rng(7)
    mismatches = 0
    for i in range(200):
        n = int(rng.integers(2, 6))
        t = helpers.random_tally(rng, n, int(rng.integers(3, 20)), max_count=40)
        c = collapse_full_rankings(t, n)
        for policy in ("eliminate-all", "uniform-random"):
            a, b = run_irv(t, n, policy, seed=i), run_irv(c, n, policy, seed=i)
            # every contested round matches exactly; the one-candidate final round
            # differs only in how many last-choice-only ballots it still counts
            same = (a.winner == b.winner and a.elimination_order == b.elimination_order
                    and [r for r in a.rounds if len(r.remaining) > 1]
                    == [r for r in b.rounds if len(r.remaining) > 1])
            mismatches += not same
    ok = mismatches == 0
    report(7, ok, f"{mismatches} mismatches over 200 tallies x 2 tie policies")
    assert ok


def _perf_model(rng, n: int) -> ElectionModel:
    cands = make_candidates("ABCDE"[:n])
    dists = {r: DiscreteDist.from_array(rng.random(1500) + 0.01, normalize=True)
             for r in enumerate_rankings(range(n))[1:]}
    return ElectionModel(cands, dists)


def test_criterion_8_performance(report):
    rng = np.random.default_rng(8)
    limits = {3: 1.0, 4: 5.0, 5: 120.0}
    times = {}
    for n in limits:
        m = _perf_model(rng, n)
        t0 = time.perf_counter()
        win, _ = win_vector_memoized(m)
        times[n] = time.perf_counter() - t0
        assert abs(win.total() - 1) < 1e-6
    ok = all(times[n] < limits[n] for n in limits)
    report(8, ok, ", ".join(f"N={n}: {times[n]:.2f}s (limit {limits[n]:.0f}s)" for n in limits))
    assert ok


def test_criterion_9_replay(report, tmp_path, capsys):
    cvr_path = str(helpers.DATA / "synthetic_cvr.csv")
    names = "F=Fenwick,N=Navarro,G=Galloway"
    cvr = parse_cvr((helpers.DATA / "synthetic_cvr.csv").read_text(),
                    {"Fenwick": "F", "Navarro": "N", "Galloway": "G"})
    winner = run_irv(cvr.tally(), cvr.candidates, tie_policy="error").winner
    expect_last = [float(i == winner) for i in range(3)]
    ok = True
    for seed in (0, 1, 2):
        outs = []
        for k in range(2):
            path = tmp_path / f"s{seed}_{k}.csv"
            code = cli_main(["replay", cvr_path, "--candidates", names, "--step", "0.05", "--seed", str(seed),
                             "--bucket-size", "10", "--output", str(path)])
            ok &= code == 0
            outs.append(path.read_bytes())
        ok &= outs[0] == outs[1]
        last = outs[0].decode().splitlines()[-1].split(",")
        ok &= last[0] == "1" and [float(x) for x in last[1:]] == expect_last
    capsys.readouterr()
    report(9, ok, f"3 seeds x 2 runs byte-identical; terminal row = indicator of {cvr.candidates[winner].code}")
    assert ok


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q", "-rx"]))
