"""Recursive-descent parser producing core terms.

Surface conveniences are expanded here:

* ``x := p`` as the last statement means ``x := p; ret x``;
* ``p; q`` discards the result of ``p`` (binder ``_``);
* a bare value ``v`` in computation position means ``ret v``;
* tuple binders ``(u, v) := p; q`` bind a fresh name and destructure it;
* ``wait s`` is ``evolve w = t. t & w <= s``;
* ``evolve x = t. v for r`` runs the flow for exactly ``r`` time units by
  tracking elapsed time in the state;
* ``ball(a, b, c)``, ``accel(...)`` and ``brake(...)`` build the position
  and velocity pair from the matching ``*_u`` / ``*_v`` symbols.
"""

from __future__ import annotations

from typing import Union

from ..errors import ParseError
from ..syntax import (
    FALSE,
    NAT,
    REAL,
    STAR,
    TRUE,
    App,
    Comp,
    Evolve,
    If,
    Now,
    Num,
    Pair,
    PairMatch,
    Seq,
    Value,
    Var,
    While,
    free_vars,
    substitute,
)
from .lexer import Token, tokenize

# A binder pattern: a name (possibly "_") or a nested pair of patterns.
Pattern = Union[str, tuple]

MACROS = {"ball": ("ball_u", "ball_v"), "accel": ("accel_u", "accel_v"), "brake": ("brake_u", "brake_v")}

COMPARISONS = ("<", "<=", ">", ">=", "==", "!=")


class Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.pos = 0
        self._used = {t.text for t in self.tokens if t.kind == "ident"}
        self._fresh_counter = 0

    # ---------------------------------------------------------- helpers

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def peek(self, offset: int = 1) -> Token:
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def at(self, text: str) -> bool:
        tok = self.tok
        return tok.kind in ("sym", "kw") and tok.text == text

    def advance(self) -> Token:
        tok = self.tok
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def error(self, expected: set[str] | frozenset[str], message: str | None = None) -> ParseError:
        tok = self.tok
        return ParseError(message or f"unexpected {tok.describe()}", tok.line, tok.col, frozenset(expected))

    def expect(self, text: str) -> Token:
        if not self.at(text):
            raise self.error({repr(text)})
        return self.advance()

    def ident(self) -> str:
        if self.tok.kind != "ident":
            raise self.error({"identifier"})
        return self.advance().text

    def fresh(self, hint: str) -> str:
        while True:
            name = f"_{hint}{self._fresh_counter}"
            self._fresh_counter += 1
            if name not in self._used:
                self._used.add(name)
                return name

    # ---------------------------------------------------------- patterns

    def binder(self) -> Pattern:
        if self.at("("):
            self.advance()
            parts = [self.binder()]
            while self.at(","):
                self.advance()
                parts.append(self.binder())
            self.expect(")")
            if len(parts) < 2:
                return parts[0]
            return _nest(parts)
        return self.ident()

    def try_binder_then(self, text: str) -> Pattern | None:
        """Parse a binder followed by ``text``; backtrack and return None otherwise."""
        start = self.pos
        if self.tok.kind != "ident" and not self.at("("):
            return None
        try:
            pat = self.binder()
        except ParseError:
            self.pos = start
            return None
        if self.at(text):
            self.advance()
            return pat
        self.pos = start
        return None

    def bind(self, pat: Pattern, first: Comp, rest: Comp) -> Comp:
        if isinstance(pat, str):
            return Seq(pat, first, rest)
        z = self.fresh("z")
        return Seq(z, first, self.destructure(pat, Var(z), rest))

    def destructure(self, pat: Pattern, value: Value, body: Comp) -> Comp:
        if isinstance(pat, str):
            # only reachable for nested components handled by the caller
            raise AssertionError("destructure expects a tuple pattern")
        left, right = pat
        lname = left if isinstance(left, str) else self.fresh("p")
        rname = right if isinstance(right, str) else self.fresh("p")
        if not isinstance(right, str):
            body = self.destructure(right, Var(rname), body)
        if not isinstance(left, str):
            body = self.destructure(left, Var(lname), body)
        return PairMatch(lname, rname, value, body)

    # ---------------------------------------------------------- computations

    def program(self) -> Comp:
        comp = self.comp()
        if self.tok.kind != "eof":
            raise self.error({"';'", "end of input"})
        return comp

    def comp(self) -> Comp:
        pat = self.try_binder_then(":=")
        first = self.simple()
        if self.at(";"):
            self.advance()
            rest = self.comp()
        elif pat is None:
            return first
        else:
            rest = Now(_pattern_value(pat))
        if pat is None:
            return Seq("_", first, rest)
        return self.bind(pat, first, rest)

    def simple(self) -> Comp:
        tok = self.tok
        if tok.kind == "kw":
            handler = {
                "ret": self._ret,
                "let": self._let,
                "if": self._if,
                "while": self._while,
                "evolve": self._evolve,
                "wait": self._wait,
            }.get(tok.text)
            if handler is not None:
                self.advance()
                return handler()
        if self.at("{"):
            self.advance()
            inner = self.comp()
            self.expect("}")
            return inner
        return Now(self.value())

    def _ret(self) -> Comp:
        return Now(self.value())

    def _let(self) -> Comp:
        if not self.at("("):
            raise self.error({"'('"}, "let expects a tuple pattern")
        pat = self.binder()
        if isinstance(pat, str):
            raise self.error({"','"}, "let expects a tuple pattern")
        self.expect("=")
        value = self.value()
        self.expect("in")
        body = self.comp()
        return self.destructure(pat, value, body)

    def _if(self) -> Comp:
        cond = self.value()
        self.expect("then")
        then = self.simple()
        self.expect("else")
        orelse = self.simple()
        return If(cond, then, orelse)

    def _while(self) -> Comp:
        pat = self.binder()
        self.expect(":=")
        init = self.simple()
        self.expect("&")
        guard = self.value()
        self.expect("{")
        body = self.comp()
        self.expect("}")
        if isinstance(pat, str):
            return While(pat, init, guard, body)
        z = self.fresh("z")
        return While(z, init, _project(guard, pat, Var(z)), self.destructure(pat, Var(z), body))

    def _evolve(self) -> Comp:
        pat = self.try_binder_then("=")
        time = self.ident()
        self.expect(".")
        flow = self.value()
        if self.at("for"):
            self.advance()
            span = self.value()
            return self._evolve_for(time, flow, span)
        self.expect("&")
        guard = self.value()
        if pat is None:
            return Evolve(time, flow, "_", guard)
        if isinstance(pat, str):
            return Evolve(time, flow, pat, guard)
        z = self.fresh("z")
        return Evolve(time, flow, z, _project(guard, pat, Var(z)))

    def _evolve_for(self, time: str, flow: Value, span: Value) -> Comp:
        # x := t. <v, t> & snd x <= r; let (y, _) = x in ret y
        state, result, y, elapsed = self.fresh("x"), self.fresh("z"), self.fresh("y"), self.fresh("t")
        guard = App("<=", Pair(App("snd", Var(state)), span))
        return Seq(
            result,
            Evolve(time, Pair(flow, Var(time)), state, guard),
            PairMatch(y, elapsed, Var(result), Now(Var(y))),
        )

    def _wait(self) -> Comp:
        span = self.value()
        names = free_vars(span)
        time = "t" if "t" not in names else self.fresh("t")
        state = "w" if "w" not in names else self.fresh("w")
        return Evolve(time, Var(time), state, App("<=", Pair(Var(state), span)))

    # ---------------------------------------------------------- values

    def value(self) -> Value:
        return self._or()

    def _or(self) -> Value:
        left = self._and()
        while self.at("||"):
            self.advance()
            left = App("||", Pair(left, self._and()))
        return left

    def _and(self) -> Value:
        left = self._not()
        while self.at("&&"):
            self.advance()
            left = App("&&", Pair(left, self._not()))
        return left

    def _not(self) -> Value:
        if self.at("!"):
            self.advance()
            return App("!", self._not())
        return self._cmp()

    def _cmp(self) -> Value:
        left = self._add()
        if self.tok.kind == "sym" and self.tok.text in COMPARISONS:
            op = self.advance().text
            left = App(op, Pair(left, self._add()))
            if self.tok.kind == "sym" and self.tok.text in COMPARISONS:
                raise self.error(set(), "comparisons do not chain; add parentheses")
        return left

    def _add(self) -> Value:
        left = self._mul()
        while self.at("+") or self.at("-"):
            op = self.advance().text
            left = App(op, Pair(left, self._mul()))
        return left

    def _mul(self) -> Value:
        left = self._unary()
        while self.at("*") or self.at("/"):
            op = self.advance().text
            left = App(op, Pair(left, self._unary()))
        return left

    def _unary(self) -> Value:
        if self.at("-"):
            self.advance()
            if self.tok.kind == "num":
                num = self._number()
                return Num(-num.value, num.ty)
            return App("neg", self._unary())
        return self._atom()

    def _number(self) -> Num:
        text = self.advance().text
        if text.endswith("n"):
            digits = text[:-1]
            if not digits.isdigit():
                raise ParseError(f"natural literal {text!r} must be a whole number", self.tok.line, self.tok.col)
            return Num(int(digits), NAT)
        return Num(float(text), REAL)

    def _atom(self) -> Value:
        tok = self.tok
        if tok.kind == "num":
            return self._number()
        if self.at("true"):
            self.advance()
            return TRUE
        if self.at("false"):
            self.advance()
            return FALSE
        if self.at("*"):
            self.advance()
            return STAR
        if self.at("("):
            self.advance()
            parts = [self.value()]
            while self.at(","):
                self.advance()
                parts.append(self.value())
            self.expect(")")
            return parts[0] if len(parts) == 1 else _nest(parts, Pair)
        if tok.kind == "ident":
            name = self.advance().text
            if self.at("("):
                self.advance()
                args = [self.value()]
                while self.at(","):
                    self.advance()
                    args.append(self.value())
                self.expect(")")
                arg = args[0] if len(args) == 1 else _nest(args, Pair)
                if name in MACROS:
                    u, v = MACROS[name]
                    return Pair(App(u, arg), App(v, arg))
                return App(name, arg)
            return Var(name)
        raise self.error({"number", "identifier", "'('", "'true'", "'false'", "'*'"})


def _nest(parts: list, pair=lambda a, b: (a, b)):
    """Right-nest a list: [a, b, c] -> (a, (b, c))."""
    out = parts[-1]
    for part in reversed(parts[:-1]):
        out = pair(part, out)
    return out


def _pattern_value(pat: Pattern) -> Value:
    if isinstance(pat, str):
        return Var(pat)
    return Pair(_pattern_value(pat[0]), _pattern_value(pat[1]))


def _projections(pat: Pattern, value: Value) -> dict[str, Value]:
    if isinstance(pat, str):
        return {} if pat == "_" else {pat: value}
    out = _projections(pat[0], App("fst", value))
    out.update(_projections(pat[1], App("snd", value)))
    return out


def _project(guard: Value, pat: Pattern, value: Value) -> Value:
    return substitute(guard, _projections(pat, value))


def parse(text: str) -> Comp:
    """Parse a complete program into a core computation term."""
    return Parser(text).program()


def parse_value(text: str) -> Value:
    parser = Parser(text)
    value = parser.value()
    if parser.tok.kind != "eof":
        raise parser.error({"end of input"})
    return value
