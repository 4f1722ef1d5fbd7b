"""Command-line entry point: ``hybcore run|check|conform|classify``.

Exit codes: 0 success, 1 parse or type error, 2 runtime fault,
3 conformance mismatch.
"""

from __future__ import annotations

import argparse
import math
import sys
import time
from pathlib import Path
from typing import Sequence

from ..denote import denote_h, denote_q
from ..errors import FrontendError, ParseError, RuntimeFault
from ..frontend import parse
from ..hybrid import eval_traj
from ..opsem import Converged, bs_duration, ss_run
from ..params import DEFAULT_PARAMS, EvalParams
from ..prim import eval_value
from ..typecheck import check_program
from . import report
from .conform import (
    ConformanceReport,
    ProgramRecord,
    check_adequacy,
    compare_small_big,
    conform_corpus,
    grid,
    parse_grid,
    sample,
    taxonomy_of,
)
from .corpus import load_corpus
from .generate import random_programs

EXIT_OK, EXIT_FRONTEND, EXIT_FAULT, EXIT_MISMATCH = 0, 1, 2, 3

SEMANTICS = ("duration", "duration-smallstep", "evolution", "denot-q", "denot-h")


def _num(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        if math.isinf(x):
            return "inf"
        return repr(x)[:-2] if x.is_integer() and abs(x) < 1e16 else repr(x)
    if x == ():
        return "*"
    if isinstance(x, tuple):
        return f"({_num(x[0])}, {_num(x[1])})"
    return str(x)


def format_outcome(o) -> str:
    """Human-readable outcome, e.g. ``Converged(5, 0)`` or ``Diverged(inf, progressive)``."""
    if isinstance(o, Converged):
        return f"Converged({_num(o.dur)}, {_num(eval_value({}, o.val))})"
    if hasattr(o, "kind"):
        return f"Diverged({_num(o.dur)}, {o.kind})"
    if hasattr(o, "val"):
        return f"Done({_num(o.dur)}, {_num(o.val)})"
    return f"Diverge({_num(o.dur)})"


def _params(args) -> EvalParams:
    changes = {}
    for flag, name in (("max_unfold", "max_unfold"), ("zeno_eps", "zeno_eps"), ("boundary_tol", "boundary_tol"), ("seq_check_step", "seq_check_step")):
        value = getattr(args, flag, None)
        if value is not None:
            changes[name] = value
    return DEFAULT_PARAMS.with_(**changes)


def _load(path: str):
    term = parse(Path(path).read_text())
    ty = check_program(term)
    return term, ty


def _emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")


def cmd_run(args) -> int:
    term, _ = _load(args.file)
    params = _params(args)
    start = time.perf_counter()
    sem = args.semantics
    if sem in ("evolution", "denot-h") and (args.grid or not args.json):
        if args.grid:
            times = parse_grid(args.grid)
        else:
            b = bs_duration(term, params)
            end = b.dur if math.isfinite(b.dur) else 10.0
            times = grid(0.0, end, params.sample_step)
        rows = sample(term, times, params, engine="evo" if sem == "evolution" else "denot")
        _emit(report.write_csv(rows), args.output)
        return EXIT_OK
    if sem == "duration":
        result = bs_duration(term, params)
        taxonomy = taxonomy_of(result)
    elif sem == "duration-smallstep":
        result = ss_run(term, params)
        taxonomy = taxonomy_of(result)
    elif sem == "denot-q":
        result = denote_q(term, None, params)
        taxonomy = None
    else:
        T = denote_h(term, None, params)
        outcome = {"kind": T.tag, "duration": report.encode_duration(T.dur)}
        if T.tag == "cc":
            outcome["value"] = report.encode_value(eval_traj(T, T.dur))
        _emit(report.dumps(report.make_report(args.file, sem, outcome, params.to_dict())), args.output)
        return EXIT_OK
    if args.json:
        doc = report.make_report(args.file, sem, report.outcome_json(result, taxonomy), params.to_dict())
        doc["wall_time"] = time.perf_counter() - start
        _emit(report.dumps(doc), args.output)
    else:
        _emit(format_outcome(result), args.output)
    return EXIT_OK


def cmd_check(args) -> int:
    _, ty = _load(args.file)
    print(f"{args.file}: {ty}")
    return EXIT_OK


def cmd_classify(args) -> int:
    term, _ = _load(args.file)
    print(taxonomy_of(bs_duration(term, _params(args))))
    return EXIT_OK


def cmd_conform(args) -> int:
    entries = load_corpus(args.dir, base=_params(args))
    rep = conform_corpus(entries, args.grid_step)
    params = _params(args).with_(max_unfold=args.max_unfold or 64)
    for k, term in enumerate(random_programs(args.random, args.seed)):
        pid = f"random-{args.seed}-{k}"
        if args.full:
            rep.records.append(check_adequacy(term, grid(0.0, 6.0, 0.25), params, pid, exact=True))
        else:
            rec = ProgramRecord(pid)
            rec.mismatches, rec.inconclusive = compare_small_big(term, params, exact=True)
            rep.records.append(rec)
    _print_conformance(rep, args.json)
    return EXIT_OK if rep.ok else EXIT_MISMATCH


def _print_conformance(rep: ConformanceReport, as_json: bool) -> None:
    if as_json:
        doc = {
            "programs": [
                {
                    "program": r.id,
                    "taxonomy": r.taxonomy,
                    "duration_ok": r.duration_ok,
                    "duration_delta": report.encode_duration(r.duration_delta),
                    "value_ok": r.value_ok,
                    "evolution_points": r.evo_points,
                    "evolution_mismatches": r.evo_mismatches,
                    "cc_ok": r.cc_ok,
                    "inconclusive": r.inconclusive,
                    "mismatches": r.mismatches,
                }
                for r in rep.records
            ],
            "mismatches": rep.mismatches,
        }
        print(report.dumps(doc))
        return
    for r in rep.records:
        if r.id.startswith("random-") and r.ok:
            continue
        status = "ok" if r.ok else "MISMATCH"
        print(f"{r.id:<24} {r.taxonomy:<28} {status}")
        for m in r.mismatches:
            print(f"    {m}")
    print(rep.summary())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hybcore", description="Run and cross-check HybCore hybrid programs.")
    sub = parser.add_subparsers(dest="command", required=True)

    def knobs(p):
        p.add_argument("--max-unfold", type=int, dest="max_unfold")
        p.add_argument("--zeno-eps", type=float, dest="zeno_eps")
        p.add_argument("--boundary-tol", type=float, dest="boundary_tol")
        p.add_argument("--seq-check-step", type=float, dest="seq_check_step")

    run = sub.add_parser("run", help="evaluate a program")
    run.add_argument("file")
    run.add_argument("--semantics", choices=SEMANTICS, default="duration")
    run.add_argument("--grid", help="sample times start:stop:step (evolution, denot-h)")
    run.add_argument("--output", "-o")
    run.add_argument("--json", action="store_true", help="write a JSON report")
    knobs(run)
    run.set_defaults(func=cmd_run)

    check = sub.add_parser("check", help="parse and typecheck only")
    check.add_argument("file")
    check.set_defaults(func=cmd_check)

    classify = sub.add_parser("classify", help="print the loop taxonomy label")
    classify.add_argument("file")
    knobs(classify)
    classify.set_defaults(func=cmd_classify)

    conform = sub.add_parser("conform", help="cross-check all engines on a program directory")
    conform.add_argument("dir", nargs="?", help="directory of .hc files (default: the shipped corpus)")
    conform.add_argument("--random", type=int, default=0, help="also test N generated programs")
    conform.add_argument("--seed", type=int, default=0)
    conform.add_argument("--full", action="store_true", help="run every engine on generated programs, not just the two step semantics")
    conform.add_argument("--grid-step", type=float, default=0.1, dest="grid_step")
    conform.add_argument("--json", action="store_true")
    knobs(conform)
    conform.set_defaults(func=cmd_conform)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"parse error {exc}", file=sys.stderr)
        return EXIT_FRONTEND
    except FrontendError as exc:
        print(f"type error: {exc}", file=sys.stderr)
        return EXIT_FRONTEND
    except RuntimeFault as exc:
        print(f"runtime fault: {exc}", file=sys.stderr)
        return EXIT_FAULT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FRONTEND


if __name__ == "__main__":
    sys.exit(main())
