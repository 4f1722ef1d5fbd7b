"""Runtime values, the builtin signature, value evaluation and the boundary solver.

Runtime values are plain Python data: ``()`` for the unit, ``bool``,
``int`` for naturals, ``float`` for reals and 2-tuples for pairs. The same
compiled evaluators also run on numpy arrays, which is how the boundary
solver scans a whole grid at once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Callable, Iterator, Mapping, Union

import numpy as np

from .errors import HybError, RuntimeFault
from .params import EvalParams
from .syntax import (
    BOOL,
    FALSE,
    NAT,
    REAL,
    STAR,
    TRUE,
    UNIT,
    App,
    Base,
    BoolLit,
    Num,
    Pair,
    Prod,
    Star,
    Ty,
    Value,
    Var,
    free_vars,
)

RtVal = Union[tuple, bool, int, float]
UNIT_VALUE: tuple = ()

# ------------------------------------------------------------ runtime values


def reify(val: RtVal) -> Value:
    """Turn a runtime value back into a closed value term."""
    if isinstance(val, bool):
        return TRUE if val else FALSE
    if isinstance(val, int):
        return Num(val, NAT)
    if isinstance(val, float):
        return Num(val, REAL)
    if isinstance(val, tuple):
        if len(val) == 0:
            return STAR
        if len(val) == 2:
            return Pair(reify(val[0]), reify(val[1]))
    raise HybError(f"not a runtime value: {val!r}")


def type_of_value(val: RtVal) -> Ty:
    if isinstance(val, bool):
        return BOOL
    if isinstance(val, int):
        return NAT
    if isinstance(val, float):
        return REAL
    if val == ():
        return UNIT
    return Prod(type_of_value(val[0]), type_of_value(val[1]))


def flatten_value(val: RtVal, prefix: str = "v") -> list[tuple[str, Any]]:
    """Flatten nested pairs into ``(field-name, scalar)`` columns: v.0, v.1.0, ..."""
    if isinstance(val, tuple) and len(val) == 2:
        return flatten_value(val[0], prefix + ".0") + flatten_value(val[1], prefix + ".1")
    return [(prefix, val)]


def field_names(ty: Ty, prefix: str = "v") -> list[str]:
    if isinstance(ty, Prod):
        return field_names(ty.left, prefix + ".0") + field_names(ty.right, prefix + ".1")
    return [prefix]


def values_close(a: RtVal, b: RtVal, tol: float) -> bool:
    if isinstance(a, tuple) and isinstance(b, tuple):
        return len(a) == len(b) and all(values_close(x, y, tol) for x, y in zip(a, b))
    if isinstance(a, bool) or isinstance(b, bool):
        return isinstance(a, bool) and isinstance(b, bool) and a == b
    if isinstance(a, (int, float)) and isinstance(b, (int, float)):
        return abs(a - b) <= tol
    return a == b


# ----------------------------------------------------------------- signature


def _real(x: float) -> float:
    if not math.isfinite(x):
        raise RuntimeFault(f"non-finite real result {x!r}")
    return x


def _div(a: tuple) -> float:
    x, y = a
    if y == 0:
        raise RuntimeFault("division by zero")
    return _real(x / y)


def _round_nearest(x: float) -> int:
    # nearest natural, ties rounded up; negative inputs clamp to 0
    return max(0, math.floor(x + 0.5))


def _args3(a: tuple) -> tuple:
    return a[0], a[1][0], a[1][1]


def _ball_u(u, v, t):
    return u + v * t - 4.9 * t * t


def _ball_v(u, v, t):
    return v - 9.8 * t


def _accel_u(u, v, t):
    return u + v * t + t * t / 2


def _accel_v(u, v, t):
    return v + t


def _brake_u(u, v, t):
    return u + v * t - t * t / 2


def _brake_v(u, v, t):
    return v - t


@dataclass(frozen=True)
class SigEntry:
    """A signature symbol: typing rule, scalar and vectorised implementations."""

    name: str
    typing: Callable[[Ty], Ty | None]
    fn: Callable[[Any], RtVal]
    vec: Callable[[Any], Any]
    doc: str = ""


def _typing(*pairs: tuple[Ty, Ty]) -> Callable[[Ty], Ty | None]:
    table = dict(pairs)
    return table.get


def _proj_typing(index: int) -> Callable[[Ty], Ty | None]:
    def typing(ty: Ty) -> Ty | None:
        if isinstance(ty, Prod):
            return ty.left if index == 0 else ty.right
        return None

    return typing


def _eq_typing(ty: Ty) -> Ty | None:
    if isinstance(ty, Prod) and ty.left == ty.right and isinstance(ty.left, Base):
        return BOOL
    return None


class Signature(Mapping[str, SigEntry]):
    """Immutable table of signature symbols."""

    def __init__(self, entries: list[SigEntry]):
        self._entries = {e.name: e for e in entries}

    def __getitem__(self, name: str) -> SigEntry:
        return self._entries[name]

    def __iter__(self):
        return iter(self._entries)

    def __len__(self) -> int:
        return len(self._entries)


RR = Prod(REAL, REAL)
NN = Prod(NAT, NAT)
BB = Prod(BOOL, BOOL)
R3 = Prod(REAL, Prod(REAL, REAL))


def _monus(a: tuple) -> int:
    return max(a[0] - a[1], 0)


def _build() -> Signature:
    def arith(name, real_fn, nat_fn, vec_fn, doc):
        def fn(a):
            if isinstance(a[0], int) and not isinstance(a[0], bool):
                return nat_fn(a)
            return _real(real_fn(a))

        return SigEntry(name, _typing((RR, REAL), (NN, NAT)), fn, vec_fn, doc)

    def compare(name, op, doc):
        return SigEntry(name, _typing((RR, BOOL), (NN, BOOL)), lambda a: op(a[0], a[1]), lambda a: op(a[0], a[1]), doc)

    def real3(name, f, doc):
        return SigEntry(name, _typing((R3, REAL)), lambda a: _real(f(*_args3(a))), lambda a: f(*_args3(a)), doc)

    entries = [
        arith("+", lambda a: a[0] + a[1], lambda a: a[0] + a[1], lambda a: a[0] + a[1], "addition"),
        arith("-", lambda a: a[0] - a[1], _monus, lambda a: a[0] - a[1], "subtraction (truncated on N)"),
        arith("*", lambda a: a[0] * a[1], lambda a: a[0] * a[1], lambda a: a[0] * a[1], "multiplication"),
        SigEntry("/", _typing((RR, REAL)), _div, lambda a: np.divide(a[0], a[1]), "division; zero divisor is a runtime fault"),
        SigEntry("neg", _typing((REAL, REAL)), lambda a: -a, lambda a: -a, "unary minus"),
        compare("<", lambda x, y: x < y, "less than"),
        compare("<=", lambda x, y: x <= y, "less or equal"),
        compare(">", lambda x, y: x > y, "greater than"),
        compare(">=", lambda x, y: x >= y, "greater or equal"),
        SigEntry("==", _eq_typing, lambda a: a[0] == a[1], lambda a: np.equal(a[0], a[1]), "equality on base types"),
        SigEntry("!=", _eq_typing, lambda a: a[0] != a[1], lambda a: np.not_equal(a[0], a[1]), "inequality on base types"),
        SigEntry("&&", _typing((BB, BOOL)), lambda a: a[0] and a[1], lambda a: np.logical_and(a[0], a[1]), "conjunction"),
        SigEntry("||", _typing((BB, BOOL)), lambda a: a[0] or a[1], lambda a: np.logical_or(a[0], a[1]), "disjunction"),
        SigEntry("!", _typing((BOOL, BOOL)), lambda a: not a, lambda a: np.logical_not(a), "negation"),
        SigEntry("fst", _proj_typing(0), lambda a: a[0], lambda a: a[0], "first projection"),
        SigEntry("snd", _proj_typing(1), lambda a: a[1], lambda a: a[1], "second projection"),
        SigEntry("round", _typing((REAL, NAT)), _round_nearest, lambda a: np.maximum(np.floor(a + 0.5), 0), "nearest natural, ties up"),
        SigEntry("nat2real", _typing((NAT, REAL)), lambda a: float(a), lambda a: a * 1.0, "embedding N into R"),
        SigEntry("abs", _typing((REAL, REAL)), abs, np.abs, "absolute value"),
        SigEntry("min", _typing((RR, REAL)), lambda a: min(a[0], a[1]), lambda a: np.minimum(a[0], a[1]), "minimum"),
        SigEntry("max", _typing((RR, REAL)), lambda a: max(a[0], a[1]), lambda a: np.maximum(a[0], a[1]), "maximum"),
        SigEntry("line", _typing((RR, REAL)), lambda a: _real(a[0] + a[1]), lambda a: a[0] + a[1], "solution of x' = 1: x0 + t"),
        real3("ball_u", _ball_u, "falling body position: u + v t - 4.9 t^2"),
        real3("ball_v", _ball_v, "falling body velocity: v - 9.8 t"),
        real3("accel_u", _accel_u, "position under unit acceleration"),
        real3("accel_v", _accel_v, "velocity under unit acceleration"),
        real3("brake_u", _brake_u, "position under unit deceleration"),
        real3("brake_v", _brake_v, "velocity under unit deceleration"),
        SigEntry("signal", _typing((RR, REAL)), lambda a: math.sin(a[0] + a[1]), lambda a: np.sin(a[0] + a[1]), "sin(v + t)"),
    ]
    return Signature(entries)


_BUILTIN = _build()


def builtin_signature() -> Signature:
    return _BUILTIN


# ---------------------------------------------------------------- evaluation

Env = Mapping[str, RtVal]
Compiled = Callable[[Env], Any]


@lru_cache(maxsize=65536)
def compile_value(v: Value, vectorised: bool = False) -> Compiled:
    """Compile a value term (against the builtin signature) into a closure over an environment."""
    match v:
        case Var(name):

            def var(env, name=name):
                try:
                    return env[name]
                except KeyError:
                    raise HybError(f"unbound variable {name!r} at run time") from None

            return var
        case Num(value):
            return lambda env, value=value: value
        case BoolLit(value):
            return lambda env, value=value: value
        case Star():
            return lambda env: ()
        case Pair(a, b):
            fa, fb = compile_value(a, vectorised), compile_value(b, vectorised)
            return lambda env: (fa(env), fb(env))
        case App(sym, arg):
            try:
                entry = _BUILTIN[sym]
            except KeyError:
                raise HybError(f"unknown signature symbol {sym!r}") from None
            fn = entry.vec if vectorised else entry.fn
            farg = compile_value(arg, vectorised)
            return lambda env: fn(farg(env))
    raise HybError(f"not a value term: {v!r}")


def eval_value(env: Env, v: Value) -> RtVal:
    return compile_value(v)(env)


def env_key(env: Env, names: frozenset[str] | set[str]) -> tuple:
    """Hashable restriction of an environment to ``names``."""
    return tuple(sorted((n, env[n]) for n in names if n in env))


@dataclass(frozen=True)
class TimeFun:
    """A value term with one distinguished real binder and a captured environment."""

    term: Value
    var: str
    env: tuple = ()

    @classmethod
    def make(cls, term: Value, var: str, env: Env) -> "TimeFun":
        return cls(term, var, env_key(env, free_vars(term) - {var}))

    def __call__(self, t: float) -> RtVal:
        env = dict(self.env)
        env[self.var] = t
        return compile_value(self.term)(env)

    def vec(self, ts: np.ndarray) -> Any:
        env = dict(self.env)
        env[self.var] = ts
        return compile_value(self.term, True)(env)


# A predicate is the same shape: a Bool-valued term over one binder.
Predicate = TimeFun


@dataclass(frozen=True)
class Boundary:
    d: float
    closed: bool


def _scan_chunks(params: EvalParams) -> Iterator[np.ndarray]:
    """Ascending grid points in (0, horizon]; spacing grows once far from 0 so
    relative resolution stays near 1/4096 of the elapsed time."""
    step = params.grid_step
    pos = 0.0
    size = 256
    horizon = params.horizon
    while pos < horizon:
        ts = pos + step * np.arange(1, size + 1, dtype=float)
        if ts[-1] >= horizon:
            ts = np.append(ts[ts < horizon], horizon)
        yield ts
        pos = float(ts[-1])
        size = min(size * 2, 4096)
        step = max(step, pos / 4096)


def check_grid(upto: float, params: EvalParams) -> Iterator[float]:
    """Sample points 0, h, 2h, ... strictly below ``upto`` (h = check step),
    coarsening like the boundary scan far from 0 and stopping at the horizon."""
    h = params.check_step
    limit = min(upto, params.horizon)
    k = 0
    while True:
        s = k * h
        if s >= limit:
            break
        yield s
        k += 1
        if k >= 4096:
            break
    pos = k * h
    while pos < limit:
        yield pos
        pos += max(h, pos / 4096)


def _pred_at(h: TimeFun, b: Predicate, t: float) -> bool:
    return bool(b(h(t)))


def _first_false(h: TimeFun, b: Predicate, ts: np.ndarray) -> int | None:
    """Index of the first grid point where the predicate fails, or None."""
    try:
        with np.errstate(all="ignore"):
            vals = h.vec(ts)
            ok = np.broadcast_to(np.asarray(b.vec(vals), dtype=bool), ts.shape)
        finite = all(np.all(np.isfinite(np.asarray(c, dtype=float))) for c in _leaves(vals))
    except (HybError, ArithmeticError, TypeError, ValueError):
        finite = False
    if finite:
        bad = np.flatnonzero(~ok)
        return int(bad[0]) if bad.size else None
    for i, t in enumerate(ts):  # exact scalar semantics, faults included
        if not _pred_at(h, b, float(t)):
            return i
    return None


def _leaves(val: Any) -> list:
    if isinstance(val, tuple):
        return [leaf for part in val for leaf in _leaves(part)]
    return [val]


# hi counts as an exact boundary point when its shortest decimal form has
# this many fewer significant digits than lo's.
DIGIT_GAP = 4


def _digits(x: float) -> int:
    mantissa = repr(x).split("e")[0]
    return len(mantissa.replace("-", "").replace(".", "").lstrip("0").rstrip("0")) or 1


def _snap(lo: float, hi: float) -> Boundary:
    """Choose between the last float where the predicate holds and the next
    float where it fails. The open reading wins only when hi is a much
    shorter decimal than lo, i.e. the guard evidently fails exactly at hi."""
    if _digits(hi) + DIGIT_GAP <= _digits(lo):
        return Boundary(hi, False)
    return Boundary(lo, True)


def bisect_edge(ok: Callable[[float], bool], lo: float, hi: float) -> tuple[float, float]:
    """Shrink [lo, hi] with ok(lo) true and ok(hi) false to adjacent floats."""
    while True:
        mid = lo + (hi - lo) / 2
        if mid <= lo or mid >= hi:
            return lo, hi
        if ok(mid):
            lo = mid
        else:
            hi = mid


@lru_cache(maxsize=65536)
def find_boundary(h: TimeFun, b: Predicate, params: EvalParams) -> Boundary:
    """sup{e | for all t in [0, e]. b(h(t))} together with whether it is attained."""
    if not _pred_at(h, b, 0.0):
        return Boundary(0.0, False)
    lo = 0.0
    for ts in _scan_chunks(params):
        idx = _first_false(h, b, ts)
        if idx is None:
            lo = float(ts[-1])
            continue
        hi = float(ts[idx])
        if idx > 0:
            lo = float(ts[idx - 1])
        lo, hi = bisect_edge(lambda t: _pred_at(h, b, t), lo, hi)
        return _snap(lo, hi)
    return Boundary(math.inf, False)
