"""Acceptance criteria, one test each. Every test prints a single
PASS/FAIL line (shown even under output capture) before asserting."""

import math
import random
import time

import pytest

from hybcore.denote import denote_h, denote_q, endpoint, loop_step
from hybcore.duration import (
    Diverge,
    Done,
    Inl,
    Inr,
    Stream,
    Word,
    q_bind,
    q_iter,
    q_map,
    q_unit,
    qhat_iter_guarded,
    rho,
    upsilon,
)
from hybcore.harness.cli import format_outcome
from hybcore.harness.conform import compare_small_big, conform_corpus, grid, sample
from hybcore.harness.generate import random_programs
from hybcore.hybrid import CC, Segment, Traj, defined, eval_traj, h_bind, h_iter, h_map, h_unit, in_domain, kappa
from hybcore.opsem import Converged, Diverged, bs_duration, clear_caches, ss_run
from hybcore.params import EvalParams
from hybcore.prim import eval_value, values_close
from hybcore.syntax import While


@pytest.fixture
def verdict(capsys):
    def emit(name: str, ok: bool, detail: str = "") -> None:
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} {name}{': ' + detail if detail else ''}")
        assert ok, detail

    return emit


def val(term_value):
    return eval_value({}, term_value)


# ------------------------------------------------------------ 1 taxonomy


def test_loop_taxonomy(corpus, verdict):
    clear_caches()
    params = EvalParams(max_unfold=64)
    start = time.perf_counter()
    got = {pid: bs_duration(corpus[pid].term, params) for pid in ("taxonomy_a", "taxonomy_b", "taxonomy_c", "taxonomy_d", "taxonomy_e")}
    elapsed = time.perf_counter() - start
    a, b, c, d, e = got.values()
    checks = [
        isinstance(a, Converged) and (a.dur, val(a.val)) == (0.0, 0.0),
        isinstance(b, Converged) and (b.dur, val(b.val)) == (5.0, 0.0),
        c == Diverged(0.0, "nonprogressive"),
        d == Diverged(math.inf, "progressive"),
        isinstance(e, Diverged) and e.kind == "zeno" and abs(e.dur - 2.0) <= 1e-6,
        elapsed < 1.0,
    ]
    verdict("loop taxonomy", all(checks), ", ".join(map(format_outcome, got.values())) + f" in {elapsed:.3f}s")


# ------------------------------------------------------- 2 bouncing ball


def test_bouncing_ball(corpus, verdict):
    entry = corpus["ball"]
    params = entry.params.with_(max_unfold=60)
    T = denote_h(entry.term, params=params)
    oracle = math.sqrt(10 / 9.8) + 2 * math.sqrt(98) / 9.8
    heights = {t: eval_traj(T, t)[0] for t in (0.0, 0.5, 1.0)}
    errors = [abs(h - (5 - 4.9 * t * t)) for t, h in heights.items()]
    ok = abs(T.dur - oracle) <= 1e-3 and max(errors) <= 1e-9
    verdict("bouncing ball", ok, f"duration {T.dur!r} vs {oracle!r}, height error {max(errors):.2e}")


# ------------------------------------------------------------- 3 cruise


def test_cruise_controller(corpus, verdict):
    entry = corpus["cruise"]
    start = time.perf_counter()
    rows = sample(entry.term, grid(123.0, 141.0, 0.5), entry.params)
    elapsed = time.perf_counter() - start

    def tri(p):
        return p if p <= 3 else 6 - p

    worst = max(abs(v[1] - (120 + tri((t - 120) % 6))) for t, v in rows)
    verdict("cruise controller", worst <= 1e-9 and elapsed < 1.0, f"{len(rows)} points, max error {worst:.2e}, {elapsed:.3f}s")


# ------------------------------------------------- 4 closed vs open guard


def test_closed_and_open_guards(corpus, verdict):
    le, lt = corpus["line_le"].term, corpus["line_lt"].term
    outcomes = []
    ok = True
    for engine in (bs_duration, ss_run):
        a, b = engine(le), engine(lt)
        outcomes += [a, b]
        ok &= isinstance(a, Converged) and (a.dur, val(a.val)) == (1.0, 1.0)
        ok &= isinstance(b, Diverged) and b.dur == 1.0
    ok &= denote_q(le) == Done(1.0, 1.0) and denote_q(lt) == Diverge(1.0)
    verdict("closed and open guards", ok, ", ".join(map(format_outcome, outcomes)))


# --------------------------------------------------- 5 small vs big step


def test_small_step_matches_big_step(corpus, verdict):
    params = EvalParams(max_unfold=64)
    mismatches, exhausted, total = [], 0, 0
    programs = [(e.id, e.term, e.params, e.exact) for e in corpus.values()]
    programs += [(f"random-{k}", p, params, True) for k, p in enumerate(random_programs(200, seed=0))]
    for pid, term, p, exact in programs:
        found, inconclusive = compare_small_big(term, p, exact)
        mismatches += [f"{pid}: {m}" for m in found]
        exhausted += inconclusive
        total += 1
    verdict("small-step vs big-step", not mismatches, f"{total} programs, {len(mismatches)} mismatches, {exhausted} exhausted")


# ------------------------------------------------------ 6 duration monad

PARAMS_Q = EvalParams(max_unfold=64)


def dyadic(rng: random.Random) -> float:
    return rng.randint(0, 64) / 16


def random_q(rng: random.Random, leaves: list) -> object:
    roll = rng.random()
    if roll < 0.1:
        return Diverge(math.inf)
    if roll < 0.25:
        return Diverge(dyadic(rng))
    return Done(dyadic(rng), rng.choice(leaves))


def random_kleisli(rng: random.Random, xs: list, ys: list) -> dict:
    """A table X -> Q(Y + X)."""
    leaves = [Inl(y) for y in ys] + [Inr(x) for x in xs]
    return {x: random_q(rng, leaves) for x in xs}


def sizes(rng: random.Random) -> tuple[list, list]:
    return list(range(rng.randint(1, 6))), [f"y{k}" for k in range(rng.randint(1, 6))]


def copair(left, right):
    return lambda e: left(e.value) if isinstance(e, Inl) else right(e.value)


def iterate(table):
    return lambda x: q_iter(table.__getitem__, x, PARAMS_Q)


def law_fixpoint(rng):
    xs, ys = sizes(rng)
    f = random_kleisli(rng, xs, ys)
    x = rng.choice(xs)
    return iterate(f)(x) == q_bind(copair(q_unit, iterate(f)), f[x])


def law_naturality(rng):
    xs, ys = sizes(rng)
    f = random_kleisli(rng, xs, ys)
    g = {y: random_q(rng, ["z0", "z1", "z2"]) for y in ys}
    x = rng.choice(xs)
    lhs = q_bind(g.__getitem__, iterate(f)(x))
    step = lambda z: q_bind(copair(lambda y: q_map(Inl, g[y]), lambda w: q_unit(Inr(w))), f[z])
    return lhs == q_iter(step, x, PARAMS_Q)


def law_codiagonal(rng):
    xs, ys = sizes(rng)
    leaves = [Inl(Inl(y)) for y in ys] + [Inl(Inr(x)) for x in xs] + [Inr(x) for x in xs]
    f = {x: random_q(rng, leaves) for x in xs}
    x = rng.choice(xs)
    merged = {z: q_map(copair(lambda e: e, Inr), f[z]) for z in xs}
    inner = iterate(f)
    return iterate(merged)(x) == q_iter(inner, x, PARAMS_Q)


def law_uniformity(rng):
    xs, ys = sizes(rng)
    f = random_kleisli(rng, xs, ys)
    # Z extends X; h is the identity on X and sends extra points anywhere
    zs = list(range(rng.randint(len(xs), 6)))
    h = {z: z if z < len(xs) else rng.choice(xs) for z in zs}
    fibres = {x: [z for z in zs if h[z] == x] for x in xs}
    section = {x: rng.choice(fibres[x]) for x in xs}
    # g(z) = Q(id + section)(f(h z)) makes f . h = Q(id + h) . g hold
    g = {z: q_map(copair(Inl, lambda x: Inr(section[x])), f[h[z]]) for z in zs}
    assert all(f[h[z]] == q_map(copair(Inl, lambda w: Inr(h[w])), g[z]) for z in zs)
    z = rng.choice(zs)
    return iterate(f)(h[z]) == iterate(g)(z)


def law_strength(rng):
    xs, ys = sizes(rng)
    f = random_kleisli(rng, xs, ys)
    c, x = rng.choice(["c0", "c1"]), rng.choice(xs)
    tagged = lambda p: q_map(copair(lambda y: Inl((p[0], y)), lambda w: Inr((p[0], w))), f[p[1]])
    return q_iter(tagged, (c, x), PARAMS_Q) == q_map(lambda y: (c, y), iterate(f)(x))


def law_monad(rng):
    xs, ys = sizes(rng)
    leaves = xs + ys
    m = random_q(rng, leaves)
    f = {a: random_q(rng, leaves) for a in leaves}
    g = {a: random_q(rng, leaves) for a in leaves}
    a = rng.choice(leaves)
    return (
        q_bind(f.__getitem__, q_unit(a)) == f[a]
        and q_bind(q_unit, m) == m
        and q_bind(g.__getitem__, q_bind(f.__getitem__, m)) == q_bind(lambda b: q_bind(g.__getitem__, f[b]), m)
    )


def random_qhat(rng: random.Random, xs: list, ys: list):
    """A guarded step X -> Q-hat(Y + X): continuing needs a nonempty word."""
    roll = rng.random()
    word = tuple(dyadic(rng) for _ in range(rng.randint(0, 3)))
    if roll < 0.1:
        return Stream(word, rng.choice(["zeros", "ones"]))
    if roll < 0.15:
        return Stream(word, "cycle", cycle=tuple(dyadic(rng) for _ in range(rng.randint(1, 3))))
    if roll < 0.45:
        return Word(word, Inl(rng.choice(ys)))
    return Word(word or (dyadic(rng),), Inr(rng.choice(xs)))


def rho_commutes(rng):
    xs, ys = sizes(rng)
    f = {x: random_qhat(rng, xs, ys) for x in xs}
    x = rng.choice(xs)
    lhs = rho(qhat_iter_guarded(f.__getitem__, x, 64), PARAMS_Q)
    rhs = rho(qhat_iter_guarded(lambda z: upsilon(rho(f[z], PARAMS_Q)), x, 64), PARAMS_Q)
    if type(lhs) is not type(rhs) or getattr(lhs, "val", None) != getattr(rhs, "val", None):
        return False
    return lhs.dur == rhs.dur or abs(lhs.dur - rhs.dur) <= 1e-12


def test_duration_monad_laws(verdict):
    rng = random.Random(20261015)
    counts = {}
    failures = []
    laws = [law_monad, law_fixpoint, law_naturality, law_codiagonal, law_uniformity, law_strength]
    for law in laws:
        bad = [k for k in range(1000) if not law(rng)]
        counts[law.__name__] = 1000
        failures += [f"{law.__name__}#{k}" for k in bad[:3]]
    section = [random_q(rng, [0, 1, "a", (1, 2)]) for _ in range(1000)]
    failures += [f"rho.upsilon on {m}" for m in section if rho(upsilon(m)) != m][:3]
    bad = [k for k in range(500) if not rho_commutes(rng)]
    failures += [f"rho_commutes#{k}" for k in bad[:3]]
    detail = f"{sum(counts.values())} law instances, 1000 section checks, 500 guarded collapses"
    verdict("duration monad laws", not failures, detail + (f"; failing: {failures}" if failures else ""))


# ------------------------------------------------------- 7 hybrid monad

TOL = 1e-9


def points(T: Traj, step: float = 0.05) -> list[float]:
    stop = T.dur if math.isfinite(T.dur) else 10.0
    return sorted(set(grid(0.0, min(stop, 10.0), step) + ([T.dur] if math.isfinite(T.dur) else [])))


def same_traj(A: Traj, B: Traj) -> bool:
    if A.tag != B.tag or not (A.dur == B.dur or abs(A.dur - B.dur) <= TOL):
        return False
    for t in points(A):
        a, b = eval_traj(A, t), eval_traj(B, t)
        if defined(a) != defined(b):
            # the materialised parts of two budget-truncated runs may end at
            # slightly different times
            if A.truncated or B.truncated:
                continue
            return False
        if defined(a) and not values_close(a, b, TOL):
            return False
    return True


def delay(d: float):
    return lambda x: Traj(CC, d, (Segment(0.0, d, lambda t, x=x: x),))


def fixpoint_sides(term: While, params: EvalParams) -> tuple[Traj, Traj]:
    start = endpoint(denote_h(term.init, params=params))
    step = loop_step(term.var, term.guard, term.body, {}, params)
    lhs = h_iter(step, start, params)
    rhs = h_bind(lambda e: h_unit(e.value) if isinstance(e, Inl) else h_iter(step, e.value, params), step(start), params)
    return lhs, rhs


def downward_closed(T: Traj) -> bool:
    seen_gap = False
    for t in points(T, 0.01):
        inside = in_domain(T, t)
        if inside and seen_gap:
            return False
        seen_gap |= not inside
    return True


def kappa_flags_ok(T: Traj) -> bool:
    K = kappa(T)
    flagged = [t for t in points(T) if defined(eval_traj(K, t)) and eval_traj(K, t)[1]]
    return flagged == ([T.dur] if T.tag == CC else [])


def test_hybrid_monad_properties(corpus, verdict):
    failures = []
    produced = 0
    for pid, entry in corpus.items():
        T = denote_h(entry.term, params=entry.params)
        p = entry.params
        # every continuation below is total, which spares h_bind its scan
        bind = lambda k, U: h_bind(k, U, p, total=True)
        right = bind(h_unit, T)
        if not same_traj(right, T):
            failures.append(f"{pid}: right unit")
        x0 = eval_traj(T, 0.0)
        left = bind(delay(0.5), h_unit(x0))
        if not same_traj(left, delay(0.5)(x0)):
            failures.append(f"{pid}: left unit")
        f, g = delay(0.25), lambda x: h_map(lambda v: (v, v), delay(0.5)(x))
        assoc = (bind(g, bind(f, T)), bind(lambda x: bind(g, f(x)), T))
        if not same_traj(*assoc):
            failures.append(f"{pid}: associativity")
        if not kappa_flags_ok(T):
            failures.append(f"{pid}: kappa flag")
        made = [T, right, *assoc]
        if defined(x0):
            made.append(left)
        if isinstance(entry.term, While):
            sides = fixpoint_sides(entry.term, p)
            if not same_traj(*sides):
                failures.append(f"{pid}: iteration fixpoint")
            made += sides
        produced += len(made)
        if not all(downward_closed(U) for U in made):
            failures.append(f"{pid}: downward closure")
    loops = sum(isinstance(e.term, While) for e in corpus.values())
    verdict("hybrid monad properties", not failures, f"{len(corpus)} programs, {loops} loops, {produced} trajectories checked" + (f"; failing: {failures}" if failures else ""))


# ------------------------------------------------------ 8 conformance


def test_corpus_conformance(corpus, verdict):
    clear_caches()
    start = time.perf_counter()
    rep = conform_corpus(corpus.values(), 0.1)
    elapsed = time.perf_counter() - start
    verdict("corpus conformance", rep.ok and elapsed < 30.0, f"{rep.summary()} in {elapsed:.1f}s" + (f"; {rep.mismatches[:3]}" if rep.mismatches else ""))

