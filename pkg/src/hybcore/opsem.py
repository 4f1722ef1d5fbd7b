"""Operational semantics on closed programs.

* :func:`ss_step` / :func:`ss_run` - small-step duration semantics;
* :func:`bs_duration` - big-step duration semantics, loops unrolled
  structurally and infinite loops summed under a budget;
* :func:`evo_eval` - big-step evolution semantics: the program's state at
  time t.

Substitution always inserts literal values (the variable's runtime value
reified as a term), which keeps terms small across loop unfoldings.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Union

from .duration import classify_sum, divergence_kind, outcome_duration, seq_sum
from .errors import HybError
from .hybrid import OUTSIDE, TRUNCATED, Undefined, defined
from .params import DEFAULT_PARAMS, EvalParams
from .prim import Boundary, TimeFun, check_grid, eval_value, find_boundary, reify
from .syntax import Comp, Evolve, If, Now, PairMatch, Seq, Value, While, substitute

# ------------------------------------------------------------------ results


@dataclass(frozen=True)
class Step:
    dur: float
    next: Comp


@dataclass(frozen=True)
class StepDiverge:
    dur: float


class _Terminal:
    def __repr__(self) -> str:
        return "TERMINAL"


TERMINAL = _Terminal()
StepResult = Union[Step, StepDiverge, _Terminal]


@dataclass(frozen=True)
class Converged:
    dur: float
    val: Value


@dataclass(frozen=True)
class Diverged:
    dur: float
    kind: str  # nonprogressive | progressive | zeno | exhausted


Outcome = Union[Converged, Diverged]


@dataclass(frozen=True)
class At:
    val: Any


UndefinedAt = Undefined
EvoResult = Union[At, Undefined]

# ------------------------------------------------------------------ helpers


def literal(v: Value, env: dict | None = None) -> Value:
    return reify(eval_value(env or {}, v))


def _bind(x: str, val: Value) -> dict[str, Value]:
    return {} if x == "_" else {x: val}


def evolve_parts(e: Evolve, env: dict, params: EvalParams) -> tuple[Boundary, TimeFun]:
    flow = TimeFun.make(e.flow, e.time, env)
    guard = TimeFun.make(e.guard, e.state, env)
    return find_boundary(flow, guard, params), flow


def _open_kind(d: float) -> str:
    return "progressive" if math.isinf(d) else "nonprogressive"


def _guard(x: str, w: Value, val) -> bool:
    return bool(eval_value({x: val}, w))


@lru_cache(maxsize=4096)
def is_instant(p: Comp) -> bool:
    """True when p contains no evolution or loop, so it always terminates at time 0."""
    match p:
        case Now():
            return True
        case Seq(_, first, rest):
            return is_instant(first) and is_instant(rest)
        case PairMatch(_, _, _, body):
            return is_instant(body)
        case If(_, then, orelse):
            return is_instant(then) and is_instant(orelse)
    return False


# --------------------------------------------------------------- small step


def _ss(p: Comp, params: EvalParams) -> tuple[StepResult, bool]:
    """One step, plus whether it unfolded a loop body."""
    match p:
        case Now():
            return TERMINAL, False
        case PairMatch(x, y, v, body):
            val = eval_value({}, v)
            return Step(0.0, substitute(body, {**_bind(x, reify(val[0])), **_bind(y, reify(val[1]))})), False
        case Seq(x, Now(v), rest):
            return Step(0.0, substitute(rest, _bind(x, literal(v)))), False
        case Seq(x, first, rest):
            r, unfolded = _ss(first, params)
            if isinstance(r, Step):
                return Step(r.dur, Seq(x, r.next, rest)), unfolded
            return r, unfolded
        case If(c, then, orelse):
            return Step(0.0, then if eval_value({}, c) else orelse), False
        case Evolve():
            bd, h = evolve_parts(p, {}, params)
            if bd.closed:
                return Step(bd.d, Now(reify(h(bd.d)))), False
            return StepDiverge(bd.d), False
        case While(x, Now(v), w, body):
            val = eval_value({}, v)
            if not _guard(x, w, val):
                return Step(0.0, Now(reify(val))), False
            return Step(0.0, While(x, substitute(body, _bind(x, reify(val))), w, body)), True
        case While(x, init, w, body):
            r, unfolded = _ss(init, params)
            if isinstance(r, Step):
                return Step(r.dur, While(x, r.next, w, body)), unfolded
            return r, unfolded
    raise HybError(f"not a computation term: {p!r}")


def ss_step(p: Comp, params: EvalParams = DEFAULT_PARAMS) -> StepResult:
    return _ss(p, params)[0]


def ss_run(p: Comp, params: EvalParams = DEFAULT_PARAMS, trace: list | None = None) -> Outcome:
    """Iterate single steps. Delays are grouped per loop unfolding; after
    ``max_unfold`` unfoldings the grouped delays are classified."""
    groups: list[float] = []
    current = 0.0
    unfolds = 0
    while True:
        r, unfolded = _ss(p, params)
        if trace is not None:
            trace.append((r, p))
        if r is TERMINAL:
            return Converged(seq_sum(groups + [current]), literal(p.value))
        if isinstance(r, StepDiverge):
            return Diverged(seq_sum(groups + [current]) + r.dur, _open_kind(r.dur))
        if unfolded:
            unfolds += 1
            if unfolds > params.max_unfold:
                break
            groups.append(current)
            current = 0.0
        current += r.dur
        p = r.next
    outcome = classify_sum(groups, params)
    return Diverged(outcome_duration(outcome), divergence_kind(groups, outcome, params))


# ----------------------------------------------------------------- big step


def bs_duration(p: Comp, params: EvalParams = DEFAULT_PARAMS) -> Outcome:
    return _bs(p, params)


@lru_cache(maxsize=65536)
def _bs(p: Comp, params: EvalParams) -> Outcome:
    match p:
        case Now(v):
            return Converged(0.0, literal(v))
        case PairMatch(x, y, v, body):
            val = eval_value({}, v)
            return _bs(substitute(body, {**_bind(x, reify(val[0])), **_bind(y, reify(val[1]))}), params)
        case If(c, then, orelse):
            return _bs(then if eval_value({}, c) else orelse, params)
        case Evolve():
            bd, h = evolve_parts(p, {}, params)
            if bd.closed:
                return Converged(bd.d, reify(h(bd.d)))
            return Diverged(bd.d, _open_kind(bd.d))
        case Seq(x, first, rest):
            r = _bs(first, params)
            if isinstance(r, Diverged):
                return r
            r2 = _bs(substitute(rest, _bind(x, r.val)), params)
            if isinstance(r2, Converged):
                return Converged(r.dur + r2.dur, r2.val)
            return Diverged(r.dur + r2.dur, r2.kind)
        case While(x, init, w, body):
            r = _bs(init, params)
            if isinstance(r, Diverged):
                return r
            d0, v = r.dur, r.val
            incs: list[float] = []
            for _ in range(params.max_unfold):
                if not _guard(x, w, eval_value({}, v)):
                    return Converged(d0 + seq_sum(incs), v)
                rb = _bs(substitute(body, _bind(x, v)), params)
                if isinstance(rb, Diverged):
                    return Diverged(d0 + (seq_sum(incs) + rb.dur), rb.kind)
                incs.append(rb.dur)
                v = rb.val
            outcome = classify_sum(incs, params)
            return Diverged(d0 + outcome_duration(outcome), divergence_kind(incs, outcome, params))
    raise HybError(f"not a computation term: {p!r}")


# ---------------------------------------------------------------- evolution


def evo_eval(p: Comp, t: float, params: EvalParams = DEFAULT_PARAMS) -> EvoResult:
    return _evo(p, float(t), params)


def _seq_premises(first: Comp, x: str, rest: Comp, upto: float, params: EvalParams) -> bool:
    """first is defined on [0, upto] and rest, started from each of those
    states, is defined at time 0 (checked on the sample grid plus upto)."""
    if not _premise_at(first, x, rest, upto, params):
        return False
    if is_instant(rest):
        return True
    return _grid_ok_below(first, x, rest, upto, params)


def _premise_at(first: Comp, x: str, rest: Comp, s: float, params: EvalParams) -> bool:
    vs = _evo(first, s, params)
    if not defined(vs):
        return False
    return is_instant(rest) or defined(_evo(substitute(rest, _bind(x, reify(vs.val))), 0.0, params))


# (first, x, rest, params) -> [last grid point checked, first failing point]
_scans: dict[tuple, list] = {}


def _grid_ok_below(first: Comp, x: str, rest: Comp, upto: float, params: EvalParams) -> bool:
    """Premises hold at every check-grid point below upto. The grid below
    upto is a prefix of every longer grid, so scans resume where the last
    query stopped."""
    key = (first, x, rest, params)
    state = _scans.setdefault(key, [-1.0, math.inf])
    if state[1] < upto:
        return False
    if state[0] >= upto or state[1] != math.inf:
        return state[1] >= upto
    for s in check_grid(upto, params):
        if s <= state[0]:
            continue
        if not _premise_at(first, x, rest, s, params):
            state[1] = s
            return False
        state[0] = s
    return True


@lru_cache(maxsize=262144)
def _evo(p: Comp, t: float, params: EvalParams) -> EvoResult:
    if t < 0:
        return OUTSIDE
    match p:
        case Now(v):
            return At(eval_value({}, v)) if t == 0 else OUTSIDE
        case PairMatch(x, y, v, body):
            val = eval_value({}, v)
            return _evo(substitute(body, {**_bind(x, reify(val[0])), **_bind(y, reify(val[1]))}), t, params)
        case If(c, then, orelse):
            return _evo(then if eval_value({}, c) else orelse, t, params)
        case Evolve():
            bd, h = evolve_parts(p, {}, params)
            if t < bd.d or (bd.closed and t == bd.d):
                return At(h(t))
            return OUTSIDE
        case Seq(x, first, rest):
            r = _bs(first, params)
            if isinstance(r, Converged) and t >= r.dur:
                if not _seq_premises(first, x, rest, r.dur, params):
                    return OUTSIDE
                vd = _evo(first, r.dur, params)
                return _evo(substitute(rest, _bind(x, reify(vd.val))), t - r.dur, params)
            if not _seq_premises(first, x, rest, t, params):
                return OUTSIDE
            vt = _evo(first, t, params)
            return _evo(substitute(rest, _bind(x, reify(vt.val))), 0.0, params)
        case While(x, init, w, body):
            return _evo_while(x, init, w, body, t, params)
    raise HybError(f"not a computation term: {p!r}")


def _evo_while(x: str, init: Comp, w: Value, body: Comp, t: float, params: EvalParams) -> EvoResult:
    p = init
    for i in range(params.max_unfold + 1):
        r = _bs(p, params)
        if isinstance(r, Diverged):
            return _evo(p, t, params) if t < r.dur else OUTSIDE
        d = r.dur
        if t < d:
            return _evo(p, t, params)
        vd = _evo(p, d, params)
        if not defined(vd):
            return OUTSIDE
        if i == params.max_unfold:
            break
        if not _guard(x, w, vd.val):
            return vd if t == d else OUTSIDE
        p = substitute(body, _bind(x, reify(vd.val)))
        t = t - d
    return TRUNCATED


def clear_caches() -> None:
    _bs.cache_clear()
    _evo.cache_clear()
    _scans.clear()
    find_boundary.cache_clear()
