import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hybcore.errors import RuntimeFault
from hybcore.frontend import parse_value
from hybcore.params import DEFAULT_PARAMS, EvalParams
from hybcore.prim import (
    Boundary,
    TimeFun,
    bisect_edge,
    builtin_signature,
    check_grid,
    eval_value,
    find_boundary,
    flatten_value,
    reify,
    values_close,
)


def ev(src, **env):
    return eval_value(env, parse_value(src))


def test_ode_solutions():
    assert ev("ball_u(5, 0, 0.5)") == pytest.approx(3.775, abs=1e-12)
    assert ev("ball_v(5, 0, 1)") == pytest.approx(-9.8)
    assert ev("accel_v(0, 0, 3)") == 3.0
    assert ev("brake_u(0, 2, 2)") == 2.0
    assert ev("line(1.5, 2)") == 3.5
    assert ev("signal(0, 0)") == 0.0


def test_round_is_nearest_with_ties_up_and_clamped():
    assert ev("round(2.4)") == 2
    assert ev("round(2.5)") == 3
    assert ev("round(-3.2)") == 0
    assert isinstance(ev("round(2.4)"), int)


def test_nat_subtraction_truncates():
    assert ev("2n - 5n") == 0
    assert ev("nat2real(3n) / 2") == 1.5


def test_faults():
    with pytest.raises(RuntimeFault):
        ev("1 / 0")
    with pytest.raises(RuntimeFault):
        ev("1e308 * 10")


def test_reify_round_trip():
    for val in [(), True, 3, 2.5, (1.0, (False, ()))]:
        assert eval_value({}, reify(val)) == val


def test_flatten_and_closeness():
    assert flatten_value((1.0, (2.0, 3.0))) == [("v.0", 1.0), ("v.1.0", 2.0), ("v.1.1", 3.0)]
    assert values_close((1.0, True), (1.0 + 1e-12, True), 1e-9)
    assert not values_close((1.0, True), (1.0, False), 1e-9)
    assert not values_close(1, True, 1.0)


def test_signature_documents_every_symbol():
    sig = builtin_signature()
    assert all(entry.doc for entry in sig.values())
    assert {"ball_u", "accel_v", "brake_u", "signal", "round"} <= set(sig)


@settings(max_examples=100, deadline=None)
@given(
    st.floats(-50, 50, allow_nan=False),
    st.floats(-50, 50, allow_nan=False),
    st.floats(0, 10, allow_nan=False),
)
def test_ode_derivatives_match(u, v, t):
    # d/dt of each position solution is the matching velocity solution
    h = 1e-6
    for pos, vel in [("ball_u", "ball_v"), ("accel_u", "accel_v"), ("brake_u", "brake_v")]:
        env = {"u": u, "v": v}
        f = lambda s: ev(f"{pos}(u, v, s)", s=s, **env)
        deriv = (f(t + h) - f(t - h)) / (2 * h)
        assert deriv == pytest.approx(ev(f"{vel}(u, v, s)", s=t, **env), abs=1e-5)


def boundary(flow, guard, env=None, params=DEFAULT_PARAMS):
    h = TimeFun.make(parse_value(flow), "t", env or {})
    b = TimeFun.make(parse_value(guard), "x", env or {})
    return find_boundary(h, b, params)


def test_boundary_closed_and_open():
    assert boundary("line(0, t)", "x <= 1") == Boundary(1.0, True)
    assert boundary("line(0, t)", "x < 1") == Boundary(1.0, False)
    assert boundary("t", "x <= 7") == Boundary(7.0, True)


def test_boundary_degenerate_cases():
    assert boundary("t", "true") == Boundary(math.inf, False)
    assert boundary("t", "x <= 0") == Boundary(0.0, True)
    assert boundary("t", "x < 0") == Boundary(0.0, False)
    assert boundary("t", "x <= 1e6 + 1", params=EvalParams(horizon=1e6)) == Boundary(math.inf, False)


def test_boundary_of_falling_ball():
    d = boundary("ball_u(5, 0, t)", "x >= 0").d
    assert d == pytest.approx(math.sqrt(10 / 9.8), abs=1e-12)
    assert ev("ball_u(5, 0, s)", s=d) >= 0


def test_boundary_uses_captured_environment():
    assert boundary("t", "x <= c", {"c": 0.75}) == Boundary(0.75, True)


def test_subnormal_boundaries_stay_closed():
    assert boundary("t", "x <= 5.180654e-318") == Boundary(5.180654e-318, True)


def test_bisect_edge_reaches_adjacent_floats():
    lo, hi = bisect_edge(lambda t: t * t <= 2, 0.0, 2.0)
    assert np.nextafter(lo, 3.0) == hi
    assert lo * lo <= 2 < hi * hi


def test_check_grid_is_prefix_stable():
    params = EvalParams(grid_step=0.01)
    short, long = list(check_grid(1.0, params)), list(check_grid(2.0, params))
    assert long[: len(short)] == short
    assert short[0] == 0.0 and short[-1] < 1.0
