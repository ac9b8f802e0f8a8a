"""Command-line interface: ``irvforecast <command> ...``.

Exit status: 0 on success, 2 for usage errors, 3 for unreadable or
malformed input, 4 for invalid values, 5 for numerical failures, 6 for a
last-place tie under ``--tie-policy error``.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import warnings
from pathlib import Path
from typing import Sequence

from . import __version__
from .domain import Candidate, make_candidates
from .engine import ElectionModel, win_vector, win_vector_memoized
from .errors import IRVError, ParseError
from .formats import read_dist_table, read_tally
from .ingest import make_scenario, parse_cvr, replay, write_series
from .models import (PartialCountParams, RecountParams, load_params_file, params_from,
                     recount_model)
from .oracle import DEFAULT_MAX_STATES, exhaustive_win_probs, mc_win_probs
from .tabulator import TIE_POLICIES, IRVResult, run_irv
from .tree import EliminationTree, WinVector


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ParseError(f"cannot read {path}: {e.strerror}") from None


def _parse_candidates(text: str | None) -> tuple[tuple[Candidate, ...] | None, dict[str, str]]:
    """``"G,F,N"`` or ``"G=Galloway,F=Fenwick"`` (code, then optional CVR cell text)."""
    if not text:
        return None, {}
    codes, names, cells = [], [], {}
    for item in text.split(","):
        code, _, name = item.partition("=")
        code, name = code.strip(), name.strip()
        codes.append(code)
        names.append(name)
        cells[code] = code
        if name:
            cells[name] = code
    return make_candidates(codes, names), cells


def _pct(p: float) -> str:
    return f"{100 * p:.1f}%"


def _win_text(win: WinVector) -> str:
    width = max(len(c.name) for c in win.candidates)
    return "".join(f"  {c.name:<{width}}  {_pct(win[c.index]):>6}\n" for c in win.candidates)


def _win_csv(win: WinVector) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["candidate", "probability"])
    for c in win.candidates:
        w.writerow([c.code, repr(win[c.index])])
    return buf.getvalue()


def _emit_prediction(win: WinVector, tree: EliminationTree, fmt: str) -> str:
    if fmt == "json":
        return json.dumps({"win": win.by_code(), "tree": tree.to_dict()}, indent=2) + "\n"
    if fmt == "csv":
        return _win_csv(win)
    if fmt == "dot":
        return tree.to_dot()
    return "win probabilities\n" + _win_text(win) + "elimination tree\n" + tree.to_text()


def _tabulation_report(res: IRVResult, cands: Sequence[Candidate], fmt: str) -> str:
    code = lambda i: cands[i].code  # noqa: E731
    if fmt == "json":
        return json.dumps({
            "rounds": [{
                "totals": {code(c): v for c, v in r.top_totals.items()},
                "exhausted": r.exhausted,
                "eliminated": [code(c) for c in sorted(r.eliminated)],
            } for r in res.rounds],
            "winner": code(res.winner) if res.winner is not None else None,
        }, indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["round"] + [c.code for c in cands] + ["exhausted", "eliminated"])
        for i, r in enumerate(res.rounds, 1):
            w.writerow([i] + [r.top_totals.get(c.index, "") for c in cands]
                       + [r.exhausted, "".join(code(c) for c in sorted(r.eliminated))])
        return buf.getvalue()
    lines = []
    for i, r in enumerate(res.rounds, 1):
        totals = "  ".join(f"{code(c)}:{v}" for c, v in r.top_totals.items())
        out = ", ".join(code(c) for c in sorted(r.eliminated))
        tail = f"  -> eliminate {out}" if out else ""
        lines.append(f"round {i}: {totals}  exhausted:{r.exhausted}{tail}")
    lines.append(f"winner: {code(res.winner)}" if res.winner is not None else "winner: none (all tied)")
    return "\n".join(lines) + "\n"


def _load_table(args) -> ElectionModel:
    cands, _ = _parse_candidates(args.candidates)
    return read_dist_table(_read(args.table), bucket_size=args.bucket_size, candidates=cands)


def _engine(model: ElectionModel, memoize: bool):
    return (win_vector_memoized if memoize else win_vector)(model)


def cmd_tabulate(args) -> str:
    cands, cells = _parse_candidates(args.candidates)
    if args.input_format == "cvr":
        if cands is None:
            raise ParseError("--candidates is required for CVR input")
        cvr = parse_cvr(_read(args.input), cells)
        tally, cands = cvr.tally(), cvr.candidates
    else:
        tally, cands = read_tally(_read(args.input), cands)
    res = run_irv(tally, cands, tie_policy=args.tie_policy, seed=args.seed)
    return _tabulation_report(res, cands, args.format)


def cmd_predict(args) -> str:
    win, tree = _engine(_load_table(args), not args.no_memo)
    return _emit_prediction(win, tree, args.format)


def cmd_tree(args) -> str:
    _, tree = _engine(_load_table(args), not args.no_memo)
    if args.format == "json":
        return tree.to_json() + "\n"
    if args.format == "text":
        return tree.to_text()
    return tree.to_dot()


def cmd_recount(args) -> str:
    cands, _ = _parse_candidates(args.candidates)
    tally, cands = read_tally(_read(args.tally), cands)
    values = load_params_file(args.config) if args.config else {}
    params = params_from(RecountParams, values, mean_shift=args.mean_shift, sd_shift=args.sd_shift,
                         trunc_z=args.trunc_z)
    win, tree = win_vector_memoized(recount_model(tally, cands, params))
    return _emit_prediction(win, tree, args.format)


def cmd_replay(args) -> str:
    cands, cells = _parse_candidates(args.candidates)
    if cands is None:
        raise ParseError("--candidates is required for CVR input")
    cvr = parse_cvr(_read(args.cvr), cells)
    values = load_params_file(args.config) if args.config else {}
    params = params_from(PartialCountParams, values, dispersion=args.dispersion,
                         bucket_size=args.bucket_size, trunc_z=args.trunc_z)
    scenario = make_scenario(cvr, args.step, args.seed)
    points = replay(cvr, scenario, params, n_jobs=args.jobs)
    return write_series(points, cvr.candidates, scenario, ternary=args.ternary)


def cmd_oracle(args) -> str:
    model = _load_table(args)
    ew, _ = win_vector_memoized(model)
    reports = []
    if args.method in ("exhaustive", "both"):
        reports.append(exhaustive_win_probs(model, max_states=args.max_states, engine=ew))
    if args.method in ("mc", "both"):
        reports.append(mc_win_probs(model, args.samples, seed=args.seed, n_jobs=args.jobs, engine=ew))
    if args.format == "json":
        return json.dumps([r.to_dict() for r in reports], indent=2) + "\n"
    lines = []
    for r in reports:
        lines.append(f"{r.method} ({r.samples_or_states} {'states' if r.method == 'exhaustive' else 'samples'})"
                     + (f", seed {r.seed}" if r.seed is not None else ""))
        for c in model.candidates:
            se = f" ± {r.std_error[c.index]:.4f}" if r.std_error else ""
            lines.append(f"  {c.name}: {r.win_probs[c.index]:.4f}{se}   engine {ew[c.index]:.4f}"
                         f"   gap {r.win_probs[c.index] - ew[c.index]:+.4f}")
        lines.append(f"  max |gap| vs engine: {r.max_abs_gap_vs_engine:.4g}")
    return "\n".join(lines) + "\n"


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="irvforecast", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, formats, default):
        sp.add_argument("--format", choices=formats, default=default)
        sp.add_argument("-o", "--output", help="write to this file instead of standard output")
        sp.add_argument("--candidates", help='candidate codes in index order, e.g. "A,B,C" or "G=Galloway,F=Fenwick"')

    t = sub.add_parser("tabulate", help="round-by-round IRV count of a tally or CVR")
    t.add_argument("input")
    t.add_argument("--input-format", choices=["tally", "cvr"], default="tally")
    t.add_argument("--tie-policy", choices=TIE_POLICIES, default="uniform-random")
    t.add_argument("--seed", type=int, default=0)
    common(t, ["text", "json", "csv"], "text")
    t.set_defaults(func=cmd_tabulate)

    for name, fn, formats, default, helptext in (
            ("predict", cmd_predict, ["text", "json", "csv", "dot"], "text",
             "win probabilities and elimination tree from a distribution table"),
            ("tree", cmd_tree, ["dot", "json", "text"], "dot", "elimination tree only")):
        sp = sub.add_parser(name, help=helptext)
        sp.add_argument("table")
        sp.add_argument("--bucket-size", type=int, default=1)
        sp.add_argument("--no-memo", action="store_true", help="expand every elimination order separately")
        common(sp, formats, default)
        sp.set_defaults(func=fn)

    r = sub.add_parser("recount", help="predict a recount from a final tally")
    r.add_argument("tally")
    r.add_argument("--mean-shift", type=float)
    r.add_argument("--sd-shift", type=float)
    r.add_argument("--trunc-z", type=float)
    r.add_argument("--config", help="key = value parameter file")
    common(r, ["text", "json", "csv", "dot"], "text")
    r.set_defaults(func=cmd_recount)

    rp = sub.add_parser("replay", help="simulate an election-night count from a CVR")
    rp.add_argument("cvr")
    rp.add_argument("--step", type=float, default=0.01)
    rp.add_argument("--seed", type=int, default=0)
    rp.add_argument("--dispersion", type=float)
    rp.add_argument("--bucket-size", type=int)
    rp.add_argument("--trunc-z", type=float)
    rp.add_argument("--config", help="key = value parameter file")
    rp.add_argument("--ternary", action="store_true", help="fraction,pA,pB,pC rows (three candidates)")
    rp.add_argument("--jobs", type=int, default=1)
    common(rp, ["csv"], "csv")
    rp.set_defaults(func=cmd_replay)

    o = sub.add_parser("oracle", help="compare the engine with exhaustive / Monte Carlo ground truth")
    o.add_argument("table")
    o.add_argument("--bucket-size", type=int, default=1)
    o.add_argument("--method", choices=["exhaustive", "mc", "both"], default="exhaustive")
    o.add_argument("--samples", type=int, default=100_000)
    o.add_argument("--seed", type=int, default=0)
    o.add_argument("--max-states", type=int, default=DEFAULT_MAX_STATES)
    o.add_argument("--jobs", type=int, default=1)
    common(o, ["text", "json"], "text")
    o.set_defaults(func=cmd_oracle)
    return p


def _show_warning(message, category, filename, lineno, file=None, line=None):
    print(f"irvforecast: warning: {message}", file=sys.stderr)


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with warnings.catch_warnings():
            warnings.showwarning = _show_warning
            text = args.func(args)
    except IRVError as e:
        print(f"irvforecast: error: {e}", file=sys.stderr)
        return e.exit_code
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
