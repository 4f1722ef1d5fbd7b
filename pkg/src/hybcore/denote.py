"""Denotational semantics: computations as Q-valued (duration) and
H-valued (trajectory) functions of an environment.

Environments are plain dicts from variable names to runtime values; binding
a name shadows any earlier binding, matching the typing contexts.
"""

from __future__ import annotations

from typing import Any, Callable

from .duration import Diverge, Done, Inl, Inr, QRes, q_bind, q_iter, q_map
from .errors import HybError
from .hybrid import (
    BOTTOM,
    CC,
    OD,
    OUTSIDE,
    Segment,
    Traj,
    Undefined,
    defined,
    eval_traj,
    h_bind,
    h_iter,
    h_map,
    h_unit,
    kappa,
)
from .opsem import evolve_parts, is_instant
from .params import DEFAULT_PARAMS, EvalParams
from .prim import eval_value
from .syntax import Comp, Evolve, If, Now, PairMatch, Seq, While

Env = dict[str, Any]


def _extend(env: Env, x: str, val: Any) -> Env:
    if x == "_":
        return env
    out = dict(env)
    out[x] = val
    return out


def _match(env: Env, x: str, y: str, val: Any) -> Env:
    if not isinstance(val, tuple) or len(val) != 2:
        raise HybError(f"pattern match on a non-pair value {val!r}")
    return _extend(_extend(env, x, val[0]), y, val[1])


# ------------------------------------------------------------------ duration


def denote_q(p: Comp, env: Env | None = None, params: EvalParams = DEFAULT_PARAMS) -> QRes:
    """Duration denotation: Done(d, value) or Diverge(d)."""
    return _dq(p, env or {}, params)


def _dq(p: Comp, env: Env, params: EvalParams) -> QRes:
    match p:
        case Now(v):
            return Done(0.0, eval_value(env, v))
        case PairMatch(x, y, v, body):
            return _dq(body, _match(env, x, y, eval_value(env, v)), params)
        case If(c, then, orelse):
            return _dq(then if eval_value(env, c) else orelse, env, params)
        case Evolve():
            bd, h = evolve_parts(p, env, params)
            if bd.closed:
                return Done(bd.d, h(bd.d))
            return Diverge(bd.d)
        case Seq(x, first, rest):
            return q_bind(lambda val: _dq(rest, _extend(env, x, val), params), _dq(first, env, params))
        case While(x, init, guard, body):

            def step(val):
                inner = _extend(env, x, val)
                if eval_value(inner, guard):
                    return q_map(Inr, _dq(body, inner, params))
                return Done(0.0, Inl(val))

            return q_bind(lambda val: q_iter(step, val, params), _dq(init, env, params))
    raise HybError(f"not a computation term: {p!r}")


# ---------------------------------------------------------------- trajectory


def denote_h(p: Comp, env: Env | None = None, params: EvalParams = DEFAULT_PARAMS) -> Traj:
    """Trajectory denotation."""
    return _dh(p, env or {}, params)


def _relabel(pair: tuple) -> Any:
    val, flag = pair
    return Inr(val) if flag else Inl(val)


def _dh(p: Comp, env: Env, params: EvalParams) -> Traj:
    match p:
        case Now(v):
            return h_unit(eval_value(env, v))
        case PairMatch(x, y, v, body):
            return _dh(body, _match(env, x, y, eval_value(env, v)), params)
        case If(c, then, orelse):
            return _dh(then if eval_value(env, c) else orelse, env, params)
        case Evolve():
            bd, h = evolve_parts(p, env, params)
            if bd.closed:
                return Traj(CC, bd.d, (Segment(0.0, bd.d, h),))
            if bd.d == 0:
                return BOTTOM
            return Traj(OD, bd.d, (Segment(0.0, bd.d, h, open_end=True),))
        case Seq(x, first, rest):
            return h_bind(
                lambda val: _dh(rest, _extend(env, x, val), params),
                _dh(first, env, params),
                params,
                at_zero=lambda val: h_at_zero(rest, _extend(env, x, val), params)[0],
                total=is_instant(rest),
            )
        case While(x, init, guard, body):
            return _dh_while(x, init, guard, body, env, params)
    raise HybError(f"not a computation term: {p!r}")


def loop_step(x: str, guard, body: Comp, env: Env, params: EvalParams = DEFAULT_PARAMS) -> Callable[[Any], Traj]:
    """One loop round as a function to tagged trajectories: the body's
    trajectory with its endpoint tagged Inr (continue) and all other points
    Inl, or an instant Inl exit when the guard fails."""

    def iterate(val) -> Traj:
        inner = _extend(env, x, val)
        if eval_value(inner, guard):
            return h_map(_relabel, kappa(_dh(body, inner, params)), "relabel")
        return h_unit(Inl(val))

    return iterate


def _dh_while(x: str, init: Comp, guard, body: Comp, env: Env, params: EvalParams) -> Traj:
    # The loop runs from the endpoint of the initial trajectory only: the
    # endpoint flag added by kappa decides whether iteration starts.
    iterate = loop_step(x, guard, body, env, params)
    memo: dict = {}

    def run(pair) -> Traj:
        val, flag = pair
        if not flag:
            return h_unit(val)
        if pair not in memo:
            memo[pair] = h_iter(iterate, val, params)
        return memo[pair]

    def at_zero(pair) -> Any:
        val, flag = pair
        return eval_traj(run(pair), 0.0) if flag else val

    return h_bind(run, kappa(_dh(init, env, params)), params, at_zero=at_zero)


def h_at_zero(p: Comp, env: Env, params: EvalParams = DEFAULT_PARAMS) -> tuple[Any, bool]:
    """The trajectory denotation's value at time 0 (or an Undefined marker),
    and whether the trajectory is closed-convergent of duration 0.

    Agrees with ``eval_traj(denote_h(p, env), 0)`` without building the
    whole trajectory.
    """
    match p:
        case Now(v):
            return eval_value(env, v), True
        case PairMatch(x, y, v, body):
            return h_at_zero(body, _match(env, x, y, eval_value(env, v)), params)
        case If(c, then, orelse):
            return h_at_zero(then if eval_value(env, c) else orelse, env, params)
        case Evolve():
            bd, h = evolve_parts(p, env, params)
            if bd.d == 0 and not bd.closed:
                return OUTSIDE, False
            return h(0.0), bd.closed and bd.d == 0
        case Seq(x, first, rest):
            v0, instant0 = h_at_zero(first, env, params)
            if not defined(v0):
                return OUTSIDE, False
            w0, instant1 = h_at_zero(rest, _extend(env, x, v0), params)
            if not defined(w0):
                return OUTSIDE, False
            return w0, instant0 and instant1
        case While(x, init, guard, body):
            v0, instant0 = h_at_zero(init, env, params)
            if not defined(v0) or not instant0:
                return v0, False
            state = v0
            for _ in range(params.max_unfold):
                inner = _extend(env, x, state)
                if not eval_value(inner, guard):
                    return state, True
                l0, instant = h_at_zero(body, inner, params)
                if not defined(l0):
                    return OUTSIDE, False
                if not instant:
                    return l0, False
                state = l0
            return OUTSIDE, False
    raise HybError(f"not a computation term: {p!r}")


def endpoint(T: Traj) -> Any:
    """Value at the end of a closed trajectory (Undefined for open ones)."""
    if T.tag == OD:
        return OUTSIDE
    return eval_traj(T, T.dur)


__all__ = ["denote_q", "denote_h", "h_at_zero", "endpoint", "loop_step", "Undefined"]
