"""Pretty-printer for core terms; its output parses back to the same term."""

from __future__ import annotations

from ..syntax import (
    NAT,
    App,
    BoolLit,
    Comp,
    Evolve,
    If,
    Now,
    Num,
    Pair,
    PairMatch,
    Seq,
    Star,
    Term,
    Value,
    Var,
    While,
)

INFIX = {
    "||": (1, "left"),
    "&&": (2, "left"),
    "<": (4, "none"),
    "<=": (4, "none"),
    ">": (4, "none"),
    ">=": (4, "none"),
    "==": (4, "none"),
    "!=": (4, "none"),
    "+": (5, "left"),
    "-": (5, "left"),
    "*": (6, "left"),
    "/": (6, "left"),
}
ATOM = 9


def _num(n: Num) -> str:
    if n.ty == NAT:
        return f"{n.value}n"
    return repr(float(n.value))


def _value(v: Value, ctx: int = 0) -> str:
    text, prec = _value_prec(v)
    return f"({text})" if prec < ctx else text


def _value_prec(v: Value) -> tuple[str, int]:
    match v:
        case Var(name):
            return name, ATOM
        case Star():
            return "*", ATOM
        case BoolLit(b):
            return ("true" if b else "false"), ATOM
        case Num():
            # a negative literal reads back through the unary-minus fold
            return _num(v), (7 if v.value < 0 or str(v.value).startswith("-") else ATOM)
        case Pair(a, b):
            return f"({_value(a)}, {_value(b)})", ATOM
        case App(sym, Pair(a, b)) if sym in INFIX:
            prec, assoc = INFIX[sym]
            lctx = prec if assoc == "left" else prec + 1
            return f"{_value(a, lctx)} {sym} {_value(b, prec + 1)}", prec
        case App("neg", arg):
            if isinstance(arg, Num):
                return f"-({_value(arg)})", 7
            return f"-{_value(arg, 7)}", 7
        case App("!", arg):
            return f"!{_value(arg, ATOM)}", 3
        case App(sym, arg):
            return f"{sym}({', '.join(_value(a) for a in _call_args(arg))})", ATOM
    raise TypeError(f"not a value term: {v!r}")


def _call_args(arg: Value) -> list[Value]:
    out = []
    while isinstance(arg, Pair):
        out.append(arg.left)
        arg = arg.right
    out.append(arg)
    return out


def _simple(p: Comp, indent: int) -> str:
    if isinstance(p, (Seq, PairMatch)):
        pad = "  " * (indent + 1)
        return "{\n" + pad + _comp(p, indent + 1) + "\n" + "  " * indent + "}"
    return _comp(p, indent)


def _comp(p: Comp, indent: int = 0) -> str:
    pad = "  " * indent
    match p:
        case Now(v):
            return f"ret {_value(v)}"
        case Seq("_", first, rest):
            return f"{_simple(first, indent)};\n{pad}{_comp(rest, indent)}"
        case Seq(x, first, rest):
            return f"{x} := {_simple(first, indent)};\n{pad}{_comp(rest, indent)}"
        case PairMatch(x, y, v, body):
            return f"let ({x}, {y}) = {_value(v)} in\n{pad}{_comp(body, indent)}"
        case If(c, then, orelse):
            return f"if {_value(c)} then {_simple(then, indent)} else {_simple(orelse, indent)}"
        case While(x, init, guard, body):
            inner = "  " * (indent + 1)
            return (
                f"while {x} := {_simple(init, indent)} & {_value(guard)} {{\n"
                f"{inner}{_comp(body, indent + 1)}\n{pad}}}"
            )
        case Evolve(t, flow, x, guard):
            return f"evolve {x} = {t}. {_value(flow)} & {_value(guard)}"
    raise TypeError(f"not a computation term: {p!r}")


def pretty(term: Term) -> str:
    """Render a value or computation term as concrete syntax."""
    if isinstance(term, (Now, Seq, PairMatch, If, While, Evolve)):
        return _comp(term)
    return _value(term)
