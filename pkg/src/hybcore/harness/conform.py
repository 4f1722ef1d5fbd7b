"""Cross-checks between the five engines, taxonomy labels and trajectory sampling."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from ..denote import denote_h, denote_q
from ..duration import Done
from ..errors import RuntimeFault
from ..hybrid import CC, Undefined, defined, eval_traj
from ..opsem import Converged, Diverged, Outcome, bs_duration, evo_eval, ss_run
from ..params import DEFAULT_PARAMS, EvalParams
from ..prim import eval_value, values_close
from ..syntax import Comp

TAXONOMY = (
    "convergent-nonprogressive",
    "convergent-progressive",
    "divergent-nonprogressive",
    "divergent-progressive",
    "zeno",
    "unknown",
)

LOOSE_TOL = 1e-6


def grid(start: float, stop: float, step: float) -> list[float]:
    """Arithmetic grid start, start+step, ... up to stop inclusive."""
    if step <= 0:
        raise ValueError("grid step must be positive")
    n = int(math.floor((stop - start) / step + 1e-9))
    return [float(x) for x in np.round(start + step * np.arange(n + 1), 12)]


def parse_grid(text: str) -> list[float]:
    try:
        start, stop, step = (float(part) for part in text.split(":"))
    except ValueError:
        raise ValueError(f"grid must look like start:stop:step, got {text!r}") from None
    return grid(start, stop, step)


def taxonomy_of(outcome: Outcome) -> str:
    if isinstance(outcome, Converged):
        return "convergent-progressive" if outcome.dur > 0 else "convergent-nonprogressive"
    return {
        "nonprogressive": "divergent-nonprogressive",
        "progressive": "divergent-progressive",
        "zeno": "zeno",
    }.get(outcome.kind, "unknown")


def classify(p: Comp, params: EvalParams = DEFAULT_PARAMS) -> str:
    return taxonomy_of(bs_duration(p, params))


def sample(p: Comp, times: Sequence[float], params: EvalParams = DEFAULT_PARAMS, engine: str = "denot") -> list[tuple[float, Any]]:
    """One row per time: the program's value, or an Undefined marker."""
    if engine == "denot":
        T = denote_h(p, None, params)
        return [(t, eval_traj(T, t)) for t in times]
    if engine == "evo":
        rows = []
        for t in times:
            r = evo_eval(p, t, params)
            rows.append((t, r if isinstance(r, Undefined) else r.val))
        return rows
    raise ValueError(f"unknown engine {engine!r}")


@dataclass
class ProgramRecord:
    id: str
    taxonomy: str = "unknown"
    duration_ok: bool = True
    duration_delta: float = 0.0
    value_ok: bool = True
    evo_points: int = 0
    evo_mismatches: int = 0
    cc_ok: bool = True
    inconclusive: bool = False
    error: str | None = None
    mismatches: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.mismatches


@dataclass
class ConformanceReport:
    records: list[ProgramRecord] = field(default_factory=list)

    @property
    def mismatches(self) -> list[str]:
        return [f"{r.id}: {m}" for r in self.records for m in r.mismatches]

    @property
    def ok(self) -> bool:
        return not self.mismatches

    @property
    def exhausted(self) -> int:
        return sum(r.inconclusive for r in self.records)

    def summary(self) -> str:
        n = len(self.records)
        return f"{n} programs, {len(self.mismatches)} mismatches, {self.exhausted} inconclusive (budget exhausted)"


def _same_duration(a: float, b: float, exact: bool) -> bool:
    if math.isinf(a) or math.isinf(b):
        return a == b
    return a == b if exact else abs(a - b) <= LOOSE_TOL


def _delta(a: float, b: float) -> float:
    if a == b:
        return 0.0
    return abs(a - b)


def compare_small_big(p: Comp, params: EvalParams, exact: bool = True) -> tuple[list[str], bool]:
    """Small-step against big-step: (mismatches, inconclusive)."""
    s, b = ss_run(p, params), bs_duration(p, params)
    if _exhausted(s) or _exhausted(b):
        return [], True
    out = []
    if type(s) is not type(b):
        out.append(f"small-step {s} vs big-step {b}")
    elif not _same_duration(s.dur, b.dur, exact):
        out.append(f"small-step duration {s.dur!r} vs big-step {b.dur!r}")
    elif isinstance(s, Converged) and s.val != b.val:
        out.append(f"small-step value {s.val} vs big-step {b.val}")
    return out, False


def _exhausted(o: Outcome) -> bool:
    return isinstance(o, Diverged) and o.kind == "exhausted"


def check_adequacy(
    p: Comp,
    times: Sequence[float],
    params: EvalParams = DEFAULT_PARAMS,
    pid: str = "program",
    exact: bool = False,
) -> ProgramRecord:
    """Run every engine on p and record where they disagree."""
    rec = ProgramRecord(pid)
    try:
        _check(p, times, params, exact, rec)
    except RuntimeFault as exc:
        rec.error = str(exc)
        rec.mismatches.append(f"runtime fault: {exc}")
    return rec


def _check(p: Comp, times: Sequence[float], params: EvalParams, exact: bool, rec: ProgramRecord) -> None:
    mism, inconclusive = compare_small_big(p, params, exact)
    rec.mismatches.extend(mism)
    b = bs_duration(p, params)
    rec.taxonomy = taxonomy_of(b)
    rec.inconclusive = inconclusive
    q = denote_q(p, None, params)

    # big-step against the duration denotation
    if not inconclusive:
        if isinstance(b, Converged) != isinstance(q, Done):
            rec.duration_ok = False
            rec.mismatches.append(f"big-step {b} vs duration denotation {q}")
        else:
            rec.duration_delta = _delta(b.dur, q.dur)
            if not _same_duration(b.dur, q.dur, exact):
                rec.duration_ok = False
                rec.mismatches.append(f"big-step duration {b.dur!r} vs denotation {q.dur!r}")
            if isinstance(b, Converged) and eval_value({}, b.val) != q.val:
                rec.value_ok = False
                rec.mismatches.append(f"big-step value {b.val} vs denotation {q.val!r}")

    # trajectory: cc exactly when the duration denotation converges in the same time
    T = denote_h(p, None, params)
    if T.tag == CC:
        if not (isinstance(q, Done) and _same_duration(T.dur, q.dur, exact)):
            rec.cc_ok = False
            rec.mismatches.append(f"trajectory cc of duration {T.dur!r} but duration denotation {q}")
        elif not values_close(eval_traj(T, T.dur), q.val, 0.0 if exact else LOOSE_TOL):
            rec.cc_ok = False
            rec.mismatches.append(f"trajectory endpoint {eval_traj(T, T.dur)!r} vs {q.val!r}")
    elif isinstance(q, Done) and _same_duration(T.dur, q.dur, exact):
        # an undefined continuation may cut the trajectory short, but then
        # its duration must differ from the converging one
        rec.cc_ok = False
        rec.mismatches.append(f"duration denotation {q} but trajectory tagged {T.tag} of equal duration")

    # evolution semantics against the trajectory, pointwise
    for t in times:
        a, h = evo_eval(p, t, params), eval_traj(T, t)
        rec.evo_points += 1
        da, dh = defined(a), defined(h)
        if da != dh or (da and not values_close(a.val, h, LOOSE_TOL)):
            rec.evo_mismatches += 1
            if rec.evo_mismatches <= 3:
                rec.mismatches.append(f"t={t!r}: evolution {a!r} vs trajectory {h!r}")


def conform_corpus(entries, grid_step: float = 0.1) -> ConformanceReport:
    report = ConformanceReport()
    for entry in entries:
        times = grid(0.0, entry.T, grid_step)
        report.records.append(check_adequacy(entry.term, times, entry.params, entry.id, entry.exact))
    return report
