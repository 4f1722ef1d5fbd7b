"""The duration monad Q, its layered refinement Q-hat and derived iteration.

``Q X`` holds either ``Done(d, x)`` (terminated after finite time ``d``) or
``Diverge(d)`` (ran forever, elapsing ``d``, possibly infinite). ``Q-hat``
records each unfolding's delay separately: a finite word of delays with a
result, or an infinite stream of delays. Iteration on Q is obtained as
``rho . (upsilon . f)-dagger`` where the dagger is unique guarded iteration
on Q-hat.

Infinite sums are evaluated under a budget and classified (see
:func:`classify_sum`).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Generic, Iterable, Iterator, Sequence, TypeVar, Union

from .errors import HybError
from .params import DEFAULT_PARAMS, EvalParams

X = TypeVar("X")
Y = TypeVar("Y")

INF = math.inf

# ---------------------------------------------------------------- sums


@dataclass(frozen=True, slots=True)
class Inl:
    """Left injection: the loop is finished with this value."""

    value: Any


@dataclass(frozen=True, slots=True)
class Inr:
    """Right injection: the loop continues from this state."""

    value: Any


# --------------------------------------------------------------------- Q


@dataclass(frozen=True, slots=True)
class Done(Generic[X]):
    dur: float
    val: X


@dataclass(frozen=True, slots=True)
class Diverge:
    dur: float
    exhausted: bool = field(default=False, compare=False)


QRes = Union[Done, Diverge]


def q_unit(x) -> Done:
    return Done(0.0, x)


def q_bind(f: Callable[[Any], QRes], q: QRes) -> QRes:
    """Kleisli extension: durations add, divergence absorbs."""
    if isinstance(q, Diverge):
        return q
    r = f(q.val)
    if isinstance(r, Done):
        return Done(q.dur + r.dur, r.val)
    return Diverge(q.dur + r.dur, r.exhausted)


def q_map(g: Callable[[Any], Any], q: QRes) -> QRes:
    if isinstance(q, Done):
        return Done(q.dur, g(q.val))
    return q


# ----------------------------------------------------- sum classification


@dataclass(frozen=True)
class Finite:
    total: float


@dataclass(frozen=True)
class Infinite:
    pass


@dataclass(frozen=True)
class ZenoLimit:
    total: float


@dataclass(frozen=True)
class Exhausted:
    partial: float


SumOutcome = Union[Finite, Infinite, ZenoLimit, Exhausted]

# Halves of the recent positive increments are compared: a ratio at or above
# STEADY means the sum keeps growing, at or below DECAY means a geometric tail.
STEADY = 0.9
DECAY = 0.5


def seq_sum(values: Iterable[float]) -> float:
    """Left-to-right float sum (kept explicit so every engine groups alike)."""
    total = 0.0
    for v in values:
        total += v
    return total


def classify_sum(increments: Sequence[float], params: EvalParams = DEFAULT_PARAMS) -> SumOutcome:
    """Classify a budget-truncated infinite series of nonnegative delays.

    * the recent window sums below ``zeno_eps`` -> the partial sum is the limit;
    * the partial sum passed the horizon, or the recent positive increments
      are not shrinking -> the series diverges to infinity;
    * the recent positive increments shrink geometrically and the
      extrapolated tail is below ``zeno_eps`` -> limit is partial sum + tail;
    * anything else is inconclusive.
    """
    total = seq_sum(increments)
    if math.isinf(total) or total > params.horizon:
        return Infinite()
    window = increments[-params.zeno_window:]
    if seq_sum(window) < params.zeno_eps:
        return ZenoLimit(total)
    positive = [d for d in increments if d > 0][-params.zeno_window:]
    half = len(positive) // 2
    if half < 2:
        return Exhausted(total)
    older, newer = seq_sum(positive[-2 * half:-half]), seq_sum(positive[-half:])
    ratio = newer / older
    if ratio >= STEADY:
        return Infinite()
    if ratio <= DECAY:
        r = ratio ** (1.0 / half)
        tail = positive[-1] * r / (1.0 - r)
        if tail < params.zeno_eps:
            return ZenoLimit(total + tail)
    return Exhausted(total)


def divergence_kind(increments: Sequence[float], outcome: SumOutcome, params: EvalParams = DEFAULT_PARAMS) -> str:
    """Refine a divergent outcome into the loop taxonomy."""
    if isinstance(outcome, Infinite):
        return "progressive"
    if isinstance(outcome, Exhausted):
        return "exhausted"
    last_positive = next((d for d in reversed(increments) if d > 0), 0.0)
    if last_positive >= params.zeno_eps or last_positive == 0.0:
        return "nonprogressive"
    return "zeno"


def outcome_duration(outcome: SumOutcome) -> float:
    match outcome:
        case Finite(total) | ZenoLimit(total):
            return total
        case Infinite():
            return INF
        case Exhausted(partial):
            return partial
    raise TypeError(outcome)


# ------------------------------------------------------------------ Q-hat


@dataclass(frozen=True)
class Word(Generic[X]):
    delays: tuple[float, ...]
    val: X


class Stream:
    """An infinite stream of delays: a materialised prefix followed by a tail.

    The tail is all zeros, all ones, a repeated cycle of delays, or produced
    on demand by a deterministic generator factory.
    """

    __slots__ = ("prefix", "tail", "cycle", "_factory")

    def __init__(
        self,
        prefix: Iterable[float] = (),
        tail: str = "zeros",
        factory: Callable[[], Iterator[float]] | None = None,
        cycle: Sequence[float] = (),
    ):
        if tail not in ("zeros", "ones", "cycle", "generic"):
            raise ValueError(tail)
        if (tail == "generic") != (factory is not None):
            raise ValueError("a generic tail needs a producer and only a generic tail has one")
        if (tail == "cycle") != bool(cycle):
            raise ValueError("a cycle tail needs a nonempty cycle and only a cycle tail has one")
        self.prefix = tuple(prefix)
        self.tail = tail
        self.cycle = tuple(cycle)
        self._factory = factory

    def tail_iter(self) -> Iterator[float]:
        if self.tail == "zeros":
            return itertools.repeat(0.0)
        if self.tail == "ones":
            return itertools.repeat(1.0)
        if self.tail == "cycle":
            return itertools.cycle(self.cycle)
        return self._factory()

    def __iter__(self) -> Iterator[float]:
        return itertools.chain(self.prefix, self.tail_iter())

    def take(self, n: int) -> list[float]:
        return list(itertools.islice(iter(self), n))

    def prepend(self, delays: Sequence[float]) -> "Stream":
        return Stream(tuple(delays) + self.prefix, self.tail, self._factory, self.cycle)

    def __repr__(self) -> str:
        shown = ", ".join(repr(d) for d in self.prefix[:6])
        more = ", ..." if len(self.prefix) > 6 else ""
        tail = f"cycle{self.cycle!r}" if self.tail == "cycle" else self.tail
        return f"Stream([{shown}{more}] + {tail})"


QHatRes = Union[Word, Stream]


def qhat_unit(x) -> Word:
    return Word((), x)


def qhat_bind(f: Callable[[Any], QHatRes], m: QHatRes) -> QHatRes:
    if isinstance(m, Stream):
        return m
    r = f(m.val)
    if isinstance(r, Word):
        return Word(m.delays + r.delays, r.val)
    return r.prepend(m.delays)


def is_guarded_step(r: QHatRes) -> bool:
    """A step may only continue (inr) after a nonempty word of delays."""
    return not (isinstance(r, Word) and isinstance(r.val, Inr) and len(r.delays) == 0)


def qhat_iter_guarded(f: Callable[[Any], QHatRes], x, budget: int) -> QHatRes:
    """Unique guarded iteration, unfolded at most ``budget`` times eagerly.

    f is deterministic, so revisiting a state means the delays repeat from
    that point on forever; the result is then a stream with a cycle tail.
    If the budget runs out first the remaining unfoldings become the
    generic tail of the returned stream, computed lazily on demand.
    """
    delays: list[float] = []
    # keyed by repr so that equal-comparing values such as 0.0 and -0.0,
    # which f may treat differently, stay apart
    seen: dict[str, int] = {}
    state = x
    for _ in range(budget):
        start = seen.setdefault(repr(state), len(delays))
        if start != len(delays):
            return Stream(delays[:start], "cycle", cycle=delays[start:])
        r = f(state)
        if not is_guarded_step(r):
            raise HybError("unguarded step: continuing with an empty word of delays")
        if isinstance(r, Stream):
            return r.prepend(delays)
        delays.extend(r.delays)
        if isinstance(r.val, Inl):
            return Word(tuple(delays), r.val.value)
        state = r.val.value
    return Stream(delays, "generic", lambda: _unfold_forever(f, state))


def _unfold_forever(f: Callable[[Any], QHatRes], state) -> Iterator[float]:
    while True:
        r = f(state)
        if isinstance(r, Stream):
            yield from r
            return
        yield from r.delays
        if isinstance(r.val, Inl):
            # the eager phase never saw this exit, so this cannot happen for
            # deterministic f; keep the stream well-formed regardless
            while True:
                yield 0.0
        state = r.val.value


def rho(m: QHatRes, params: EvalParams = DEFAULT_PARAMS) -> QRes:
    """Collapse per-step delays into a single duration."""
    if isinstance(m, Word):
        return Done(seq_sum(m.delays), m.val)
    if m.tail == "zeros":
        return Diverge(seq_sum(m.prefix))
    if m.tail == "ones":
        return Diverge(INF)
    if m.tail == "cycle":
        return Diverge(INF) if any(d > 0 for d in m.cycle) else Diverge(seq_sum(m.prefix))
    needed = max(0, params.max_unfold - len(m.prefix))
    delays = list(m.prefix) + list(itertools.islice(m.tail_iter(), needed))
    outcome = classify_sum(delays, params)
    return Diverge(outcome_duration(outcome), isinstance(outcome, Exhausted))


def upsilon(q: QRes) -> QHatRes:
    """Section of rho: a single delay, or a stream with the same total."""
    if isinstance(q, Done):
        return Word((q.dur,), q.val)
    if math.isinf(q.dur):
        return Stream((), "ones")
    return Stream((q.dur,), "zeros")


def q_iter(f: Callable[[Any], QRes], x, params: EvalParams = DEFAULT_PARAMS) -> QRes:
    """Elgot iteration on Q: rho . (upsilon . f)-dagger."""
    return rho(qhat_iter_guarded(lambda z: upsilon(f(z)), x, params.max_unfold), params)
