"""Random well-typed closed programs for differential testing.

Every program has type R. Constants are small dyadic rationals so that all
durations are computed exactly in floating point. Evolutions are clocks
(``t`` or ``line(0, t)``) tested against a dyadic threshold, which keeps
every boundary on an exactly representable time. Loops are counters (finite) nested anywhere,
plus, at the top level only, an endless waiting loop or a halving Zeno loop.
"""

from __future__ import annotations

import random

from ..syntax import REAL, TRUE, App, Comp, Evolve, If, Now, Num, Pair, PairMatch, Seq, Value, Var, While

CONSTS = (0.0, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0)
WAITS = (0.25, 0.5, 1.0)


def _num(x: float) -> Num:
    return Num(float(x), REAL)


def _app(sym: str, a: Value, b: Value) -> App:
    return App(sym, Pair(a, b))


class ProgramGenerator:
    def __init__(self, seed: int = 0, max_depth: int = 4):
        self.rng = random.Random(seed)
        self.max_depth = max_depth
        self._counter = 0

    def fresh(self, hint: str = "x") -> str:
        self._counter += 1
        return f"{hint}{self._counter}"

    # -------------------------------------------------------------- values

    def expr(self, names: list[str]) -> Value:
        rng = self.rng
        c = _num(rng.choice(CONSTS))
        if not names or rng.random() < 0.3:
            return c
        v = Var(rng.choice(names))
        return rng.choice([v, _app("+", v, c), _app("-", v, c), _app("*", v, _num(0.5))])

    def cond(self, names: list[str]) -> Value:
        op = self.rng.choice(["<", "<=", ">", ">="])
        return _app(op, self.expr(names), _num(self.rng.choice(CONSTS)))

    # -------------------------------------------------------- computations

    def evolve(self, names: list[str]) -> Comp:
        # a clock running until a dyadic threshold: the boundary is the
        # threshold itself, so every duration stays exact
        rng = self.rng
        t, y = self.fresh("t"), self.fresh("y")
        op = rng.choice(["<=", "<=", "<"])
        if rng.random() < 0.5:
            return Evolve(t, Var(t), y, _app(op, Var(y), _num(rng.choice(WAITS))))
        return Evolve(t, App("line", Pair(_num(0.0), Var(t))), y, _app(op, Var(y), self.expr(names)))

    def comp(self, depth: int, names: list[str]) -> Comp:
        rng = self.rng
        if depth <= 0:
            return Now(self.expr(names)) if rng.random() < 0.5 else self.evolve(names)
        kind = rng.choice(["now", "evolve", "seq", "seq", "if", "loop", "match"])
        if kind == "now":
            return Now(self.expr(names))
        if kind == "evolve":
            return self.evolve(names)
        if kind == "seq":
            x = self.fresh()
            return Seq(x, self.comp(depth - 1, names), self.comp(depth - 1, names + [x]))
        if kind == "if":
            return If(self.cond(names), self.comp(depth - 1, names), self.comp(depth - 1, names))
        if kind == "loop":
            i, y = self.fresh("i"), self.fresh()
            body = Seq(y, self.comp(depth - 1, names + [i]), Now(_app("-", Var(i), _num(1.0))))
            return While(i, Now(_num(rng.randint(0, 3))), _app(">", Var(i), _num(0.0)), body)
        z, a, b = self.fresh("z"), self.fresh("a"), self.fresh("b")
        return Seq(z, Now(Pair(self.expr(names), self.expr(names))), PairMatch(a, b, Var(z), self.comp(depth - 1, names + [a, b])))

    def program(self) -> Comp:
        rng = self.rng
        roll = rng.random()
        if roll < 0.1:
            x = self.fresh()
            t, w = self.fresh("t"), self.fresh("w")
            body = Seq("_", Evolve(t, Var(t), w, _app("<=", Var(w), Var(x))), Now(_app("*", Var(x), _num(0.5))))
            return While(x, Now(_num(rng.choice((0.5, 1.0, 2.0)))), TRUE, body)
        if roll < 0.2:
            x = self.fresh()
            body = Seq("_", self.evolve([x]), self.comp(self.max_depth - 2, [x]))
            return While(x, self.comp(1, []), TRUE, body)
        return self.comp(self.max_depth, [])


def random_programs(n: int, seed: int = 0, max_depth: int = 4) -> list[Comp]:
    gen = ProgramGenerator(seed, max_depth)
    return [gen.program() for _ in range(n)]
