import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hybcore import parse
from hybcore.denote import denote_h, denote_q, endpoint, h_at_zero
from hybcore.duration import Diverge, Done
from hybcore.errors import HybError
from hybcore.harness.generate import random_programs
from hybcore.hybrid import CC, OD, defined, eval_traj
from hybcore.opsem import Converged, bs_duration
from conftest import FAST


def test_duration_denotation_basics():
    assert denote_q(parse("ret 2")) == Done(0.0, 2.0)
    assert denote_q(parse("wait 1.5; ret 3")) == Done(1.5, 3.0)
    assert denote_q(parse("evolve y = t. t & y < 1")) == Diverge(1.0)


def test_environment_shadowing():
    p = parse("x := ret 1; x := ret x + 1; ret x")
    assert denote_q(p) == Done(0.0, 2.0)
    assert denote_q(parse("ret x"), {"x": 4.0}) == Done(0.0, 4.0)


def test_pair_matching():
    assert denote_q(parse("(a, b) := ret (1, 2); ret b - a")) == Done(0.0, 1.0)
    assert denote_q(parse("(a, _) := ret (1, 2); ret a")) == Done(0.0, 1.0)


def test_match_on_non_pair_rejected():
    from hybcore.syntax import PairMatch, Var, Now

    with pytest.raises(HybError):
        denote_q(PairMatch("a", "b", Var("x"), Now(Var("a"))), {"x": 1.0})


def test_taxonomy_in_q(corpus):
    assert denote_q(corpus["taxonomy_a"].term, params=FAST) == Done(0.0, 0.0)
    assert denote_q(corpus["taxonomy_b"].term, params=FAST) == Done(5.0, 0.0)
    assert denote_q(corpus["taxonomy_c"].term, params=FAST) == Diverge(0.0)
    assert denote_q(corpus["taxonomy_d"].term, params=FAST) == Diverge(math.inf)
    assert denote_q(corpus["taxonomy_e"].term, params=FAST).dur == pytest.approx(2.0, abs=1e-6)


def test_trajectory_shapes(corpus):
    le = denote_h(corpus["line_le"].term)
    assert (le.tag, le.dur, endpoint(le)) == (CC, 1.0, 1.0)
    lt = denote_h(corpus["line_lt"].term)
    assert (lt.tag, lt.dur) == (OD, 1.0)
    assert not defined(endpoint(lt))
    assert denote_h(corpus["diverge_at_zero"].term).is_bottom
    assert denote_h(corpus["stuck_after"].term).is_bottom


def test_h_at_zero_agrees_with_trajectory(corpus):
    for entry in corpus.values():
        T = denote_h(entry.term, params=entry.params)
        v0, instant = h_at_zero(entry.term, {}, entry.params)
        assert defined(v0) == defined(eval_traj(T, 0.0)), entry.id
        if defined(v0):
            assert v0 == eval_traj(T, 0.0), entry.id
        assert instant == (T.tag == CC and T.dur == 0.0), entry.id


def test_closed_convergent_iff_q_done_with_same_duration(corpus):
    for entry in corpus.values():
        q = denote_q(entry.term, params=entry.params)
        T = denote_h(entry.term, params=entry.params)
        if T.tag == CC:
            assert q == Done(T.dur, endpoint(T)), entry.id


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000))
def test_q_denotation_matches_big_step(seed):
    (p,) = random_programs(1, seed=seed)
    q = denote_q(p, params=FAST)
    o = bs_duration(p, FAST)
    assert isinstance(q, Done) == isinstance(o, Converged)
    assert q.dur == o.dur
