"""The hybrid monad H: trajectories tagged closed-convergent (cc),
closed-divergent (cd) or open-divergent (od).

A trajectory is stored piecewise. Each segment covers ``[start, start+length]``
(or ``[start, start+length)`` when ``open_end``) and maps local time to a
value through a segment function. Lookups at a shared breakpoint use the
later segment.
"""

from __future__ import annotations

import heapq
import math
from bisect import bisect_right
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Iterator

from .duration import Inl, Inr, classify_sum, outcome_duration
from .errors import ShapeViolation
from .params import DEFAULT_PARAMS, EvalParams
from .prim import bisect_edge, check_grid

CC, CD, OD = "cc", "cd", "od"

# ------------------------------------------------------------ undefinedness


@dataclass(frozen=True)
class Undefined:
    """Marker for a time outside a trajectory's domain."""

    reason: str = "outside"

    def __bool__(self) -> bool:
        return False


OUTSIDE = Undefined("outside")
TRUNCATED = Undefined("truncated")


def defined(v: Any) -> bool:
    return not isinstance(v, Undefined)


# ---------------------------------------------------------- segment functions


@dataclass(frozen=True)
class ConstFun:
    value: Any

    def __call__(self, s: float) -> Any:
        return self.value


@dataclass(frozen=True)
class MapFun:
    """Post-compose a segment function with a Python callable."""

    inner: Callable[[float], Any]
    fn: Callable[[Any], Any] = field(compare=False)
    label: str = ""

    def __call__(self, s: float) -> Any:
        return self.fn(self.inner(s))


@dataclass(frozen=True)
class FlagFun:
    """Pairs every value with the endpoint flag; ``end`` is the local time of
    the flagged point (None when the segment carries no endpoint)."""

    inner: Callable[[float], Any]
    end: float | None

    def __call__(self, s: float) -> Any:
        return (self.inner(s), self.end is not None and s == self.end)


@dataclass(frozen=True)
class Segment:
    start: float
    length: float
    fun: Callable[[float], Any]
    open_end: bool = False

    @property
    def stop(self) -> float:
        return self.start + self.length

    def shifted(self, offset: float) -> "Segment":
        return Segment(self.start + offset, self.length, self.fun, self.open_end)

    def mapped(self, fn: Callable[[Any], Any], label: str = "") -> "Segment":
        return Segment(self.start, self.length, MapFun(self.fun, fn, label), self.open_end)


# ---------------------------------------------------------------- trajectory


class Traj:
    __slots__ = ("tag", "dur", "segments", "truncated", "_starts")

    def __init__(self, tag: str, dur: float, segments: Iterable[Segment] = (), truncated: bool = False):
        if tag not in (CC, CD, OD):
            raise ValueError(f"bad tag {tag!r}")
        if tag != OD and math.isinf(dur):
            raise ValueError("closed trajectories have finite duration")
        self.tag = tag
        self.dur = dur
        self.segments = tuple(segments)
        self.truncated = truncated
        self._starts = [seg.start for seg in self.segments]

    @property
    def is_bottom(self) -> bool:
        return self.tag == OD and self.dur == 0

    @property
    def closed(self) -> bool:
        return self.tag != OD

    @property
    def extent(self) -> float:
        """End of the materialised part."""
        if not self.segments:
            return 0.0
        return max(seg.stop for seg in self.segments)

    def breakpoints(self) -> list[float]:
        points = set()
        for seg in self.segments:
            points.add(seg.start)
            if math.isfinite(seg.stop):
                points.add(seg.stop)
        return sorted(points)

    def __repr__(self) -> str:
        trunc = ", truncated" if self.truncated else ""
        return f"Traj({self.tag}, {self.dur!r}, {len(self.segments)} segments{trunc})"


BOTTOM = Traj(OD, 0.0, ())


def in_domain(T: Traj, t: float) -> bool:
    if t < 0:
        return False
    return t <= T.dur if T.closed else t < T.dur


def eval_traj(T: Traj, t: float) -> Any:
    """Value of the trajectory at time t, or an Undefined marker."""
    if not in_domain(T, t):
        return OUTSIDE
    i = bisect_right(T._starts, t) - 1
    if i < 0:
        return TRUNCATED if T.truncated else OUTSIDE
    seg = T.segments[i]
    # t == seg.stop is read at the exact local length, not a rounded difference
    local = seg.length if t == seg.stop else t - seg.start
    if local > seg.length or (local == seg.length and seg.open_end):
        return TRUNCATED if T.truncated else OUTSIDE
    try:
        return seg.fun(local)
    except _Continue:
        return TRUNCATED


class _Continue(Exception):
    """Raised when a continue-tagged value is read off a loop trajectory."""


def h_unit(x: Any) -> Traj:
    return Traj(CC, 0.0, (Segment(0.0, 0.0, ConstFun(x)),))


def h_map(g: Callable[[Any], Any], T: Traj, label: str = "") -> Traj:
    return Traj(T.tag, T.dur, [seg.mapped(g, label) for seg in T.segments], T.truncated)


def kappa(T: Traj) -> Traj:
    """Flag the endpoint of a closed-convergent trajectory with True, every
    other point with False."""
    segs = []
    last = len(T.segments) - 1
    for i, seg in enumerate(T.segments):
        end = seg.length if (T.tag == CC and i == last) else None
        segs.append(Segment(seg.start, seg.length, FlagFun(seg.fun, end), seg.open_end))
    return Traj(T.tag, T.dur, segs, T.truncated)


# --------------------------------------------------------------------- bind


def _check_points(T: Traj, params: EvalParams) -> Iterator[float]:
    limit = T.extent if T.truncated else T.dur
    grid = check_grid(limit, params)
    points = [b for b in T.breakpoints() if b < limit]
    if T.closed and not T.truncated:
        points.append(T.dur)
    last = None
    for s in heapq.merge(grid, sorted(points)):
        if s != last:
            yield s
            last = s


def _prefix(T: Traj, az: Callable[[Any], Any], upto: float, closed: bool) -> list[Segment]:
    """Segments of T restricted to [0, upto] (or [0, upto)), composed with az."""
    out = []
    for seg in T.segments:
        if seg.start > upto or (seg.start == upto and not closed):
            break
        length = seg.length
        open_end = seg.open_end
        if seg.stop >= upto:
            length = upto - seg.start
            open_end = not closed
        out.append(Segment(seg.start, length, MapFun(seg.fun, az, "at-zero"), open_end))
    return out


def value_at_zero(T: Traj) -> Any:
    return eval_traj(T, 0.0)


def h_bind(
    f: Callable[[Any], Traj],
    T: Traj,
    params: EvalParams = DEFAULT_PARAMS,
    at_zero: Callable[[Any], Any] | None = None,
    total: bool = False,
) -> Traj:
    """Kleisli extension of H.

    ``at_zero(x)`` must equal ``eval_traj(f(x), 0)`` and may be a cheaper way
    to compute it; ``total=True`` asserts f never returns the empty trajectory.
    """
    if T.is_bottom:
        return BOTTOM
    az = at_zero or (lambda x: value_at_zero(f(x)))

    def ok(s: float) -> bool:
        x = eval_traj(T, s)
        return defined(x) and defined(az(x))

    if not total:
        good = None
        for s in _check_points(T, params):
            x = eval_traj(T, s)
            if not defined(x):
                break
            if not defined(az(x)):
                if good is None:
                    return BOTTOM
                lo, hi = bisect_edge(ok, good, s)
                if hi in T.breakpoints() or hi == T.dur or len(repr(hi)) < len(repr(lo)):
                    return Traj(OD, hi, _prefix(T, az, hi, False))
                return Traj(CD, lo, _prefix(T, az, lo, True))
            good = s

    d = T.dur
    if T.tag == CC:
        F = f(eval_traj(T, d))
        prefix = [seg for seg in _prefix(T, az, d, True) if seg.length > 0]
        return Traj(F.tag, d + F.dur, prefix + [seg.shifted(d) for seg in F.segments], F.truncated)
    if T.tag == CD:
        return Traj(CD, d, _prefix(T, az, d, True))
    return Traj(OD, d, _prefix(T, az, d, False), T.truncated)


# ---------------------------------------------------------------- iteration


def _unwrap_inl(v: Any) -> Any:
    if isinstance(v, Inl):
        return v.value
    if isinstance(v, Inr):
        raise ShapeViolation("continue-tag inside an iterated trajectory")
    raise ShapeViolation(f"expected a tagged value, got {v!r}")


def _unwrap_inl_or_continue(v: Any) -> Any:
    if isinstance(v, Inr):
        raise _Continue
    return _unwrap_inl(v)


@dataclass
class IterTrace:
    """Optional instrumentation of h_iter: per-iteration durations."""

    durations: list[float] = field(default_factory=list)


def h_iter(
    f: Callable[[Any], Traj],
    x: Any,
    params: EvalParams = DEFAULT_PARAMS,
    trace: IterTrace | None = None,
) -> Traj:
    """Iteration for trajectories whose only continue-tag sits on a closed endpoint.

    Unfolds f from x, concatenating iterates, until an iterate exits (its
    values are all tagged Inl) or diverges; if ``max_unfold`` iterates all
    continue, the duration is classified as a Zeno limit or infinity and the
    trajectory is marked truncated.
    """
    segs: list[Segment] = []
    total = 0.0
    incs: list[float] = []
    state = x
    for _ in range(params.max_unfold):
        T = f(state)
        end = eval_traj(T, T.dur) if T.tag == CC else None
        if isinstance(end, Inr):
            if T.dur > 0:
                body = [seg.mapped(_unwrap_inl_or_continue, "inl") for seg in T.segments]
                body[-1] = Segment(body[-1].start, body[-1].length, body[-1].fun, True)
                segs.extend(seg.shifted(total) for seg in body)
            total += T.dur
            incs.append(T.dur)
            if trace is not None:
                trace.durations.append(T.dur)
            state = end.value
            continue
        if T.tag == CC and not isinstance(end, Inl):
            raise ShapeViolation(f"iterate endpoint is not tagged: {end!r}")
        segs.extend(seg.mapped(_unwrap_inl, "inl").shifted(total) for seg in T.segments)
        return Traj(T.tag, total + T.dur, segs, T.truncated)
    outcome = classify_sum(incs, params)
    return Traj(OD, outcome_duration(outcome), segs, truncated=True)
