import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hybcore.duration import (
    Diverge,
    Done,
    Exhausted,
    Infinite,
    Inl,
    Inr,
    Stream,
    Word,
    ZenoLimit,
    classify_sum,
    divergence_kind,
    q_bind,
    q_iter,
    q_unit,
    qhat_bind,
    qhat_iter_guarded,
    rho,
    upsilon,
)
from hybcore.errors import HybError
from hybcore.params import DEFAULT_PARAMS, EvalParams

dyadic = st.integers(0, 64).map(lambda k: k / 4)
results = st.one_of(
    st.builds(Done, dyadic, st.integers(0, 5)),
    st.builds(Diverge, st.one_of(dyadic, st.just(math.inf))),
)


def test_unit_and_bind():
    assert q_unit(3) == Done(0.0, 3)
    assert q_bind(lambda x: Done(1.5, x + 1), Done(2.0, 1)) == Done(3.5, 2)
    assert q_bind(lambda x: Diverge(1.0), Done(2.0, 1)) == Diverge(3.0)
    assert q_bind(lambda x: Done(1.0, x), Diverge(4.0)) == Diverge(4.0)


@given(results, st.integers(0, 3))
def test_monad_laws(m, shift):
    f = lambda x: Done(shift / 2, x + 1) if x % 2 else Diverge(shift)
    g = lambda x: Done(0.25, x * 2)
    assert q_bind(q_unit, m) == m
    assert q_bind(lambda x: q_bind(g, f(x)), m) == q_bind(g, q_bind(f, m))
    assert q_bind(f, q_unit(3)) == f(3)


@given(results)
def test_rho_is_left_inverse_of_upsilon(m):
    assert rho(upsilon(m)) == m


def test_rho_sums_words_and_known_tails():
    assert rho(Word((1.0, 0.5, 0.25), "x")) == Done(1.75, "x")
    assert rho(Stream((1.0, 2.0), "zeros")) == Diverge(3.0)
    assert rho(Stream((), "ones")) == Diverge(math.inf)


def test_rho_of_geometric_stream_is_two():
    def halves():
        k = 0
        while True:
            yield 2.0**-k
            k += 1

    assert rho(Stream((), "generic", halves), EvalParams(max_unfold=64)).dur == pytest.approx(2.0, abs=1e-12)


def test_qhat_bind_concatenates_and_absorbs():
    assert qhat_bind(lambda x: Word((2.0,), x + 1), Word((1.0,), 1)) == Word((1.0, 2.0), 2)
    s = qhat_bind(lambda x: Stream((5.0,), "zeros"), Word((1.0,), 1))
    assert s.take(3) == [1.0, 5.0, 0.0]


def test_unguarded_iteration_is_rejected():
    with pytest.raises(HybError):
        qhat_iter_guarded(lambda x: Word((), Inr(x)), 0, 10)


def test_q_iter_countdown_and_divergence():
    countdown = lambda x: Done(1.0, Inr(x - 1)) if x > 0 else Done(0.0, Inl(x))
    assert q_iter(countdown, 5) == Done(5.0, 0)
    assert q_iter(lambda x: Done(1.0, Inr(x)), 0, EvalParams(max_unfold=64)) == Diverge(math.inf)
    assert q_iter(lambda x: Done(0.0, Inr(x)), 0, EvalParams(max_unfold=64)) == Diverge(0.0)
    assert q_iter(lambda x: Diverge(2.5) if x == 3 else Done(1.0, Inr(x + 1)), 0) == Diverge(5.5)


def test_classify_sum():
    p = EvalParams(zeno_window=16, zeno_eps=1e-9)
    assert classify_sum([1.0] * 40, p) == Infinite()
    assert classify_sum([1.0, 0.5] + [0.0] * 20, p) == ZenoLimit(1.5)
    assert classify_sum([2.0**-k for k in range(60)], p) == ZenoLimit(pytest.approx(2.0, abs=1e-12))
    assert isinstance(classify_sum([1 / (k + 1) for k in range(40)], p), Exhausted)
    assert classify_sum([1e6, 1.0], p) == Infinite()


def test_divergence_kinds():
    p = DEFAULT_PARAMS
    geometric = [2.0**-k for k in range(80)]
    assert divergence_kind(geometric, classify_sum(geometric, p), p) == "zeno"
    zeros = [1.0] + [0.0] * 80
    assert divergence_kind(zeros, classify_sum(zeros, p), p) == "nonprogressive"
    ones = [1.0] * 80
    assert divergence_kind(ones, classify_sum(ones, p), p) == "progressive"


@settings(max_examples=200)
@given(st.lists(dyadic, min_size=1, max_size=4), st.integers(0, 5))
def test_rho_commutes_with_collapsing_each_step(delays, n):
    # summing per step first, or all delays at once, gives the same total
    f = lambda x: Word(tuple(delays), Inr(x + 1) if x < n else Inl(x))
    g = lambda x: upsilon(rho(f(x)))
    assert rho(qhat_iter_guarded(f, 0, 100)) == rho(qhat_iter_guarded(g, 0, 100))


def test_revisited_state_gives_exact_cycle():
    # delays 4, 1/4, 1/4, 1/4, 1/4 repeat forever: no budget needed
    f = lambda x: Done(4.0 if x == 0 else 0.25, Inr((x + 1) % 5))
    m = qhat_iter_guarded(lambda z: upsilon(f(z)), 0, 100)
    assert isinstance(m, Stream) and m.tail == "cycle"
    assert m.cycle == (4.0, 0.25, 0.25, 0.25, 0.25)
    assert q_iter(f, 0, EvalParams(max_unfold=8)) == Diverge(math.inf)
    stall = lambda x: Done(1.0 if x < 2 else 0.0, Inr(min(x + 1, 3)))
    assert q_iter(stall, 0, EvalParams(max_unfold=8)) == Diverge(2.0)


def test_signed_zero_states_are_distinct():
    f = lambda x: Done(1.0, Inl(x)) if math.copysign(1, x) < 0 else Done(1.0, Inr(-0.0))
    assert q_iter(f, 0.0) == Done(2.0, -0.0)
