"""The two typing judgements: values (ctx |- v : A) and computations (ctx |- p : A)."""

from __future__ import annotations

from .errors import ArgumentTypeMismatch, IllTyped, UnboundVariable, UnknownSymbol
from .prim import Signature, builtin_signature
from .syntax import (
    BOOL,
    REAL,
    UNIT,
    App,
    BoolLit,
    Comp,
    Context,
    Evolve,
    If,
    Now,
    Num,
    Pair,
    PairMatch,
    Prod,
    Seq,
    Star,
    Ty,
    Value,
    Var,
    While,
)


def infer_value(ctx: Context, v: Value, sig: Signature | None = None) -> Ty:
    sig = sig or builtin_signature()
    match v:
        case Var(name):
            ty = ctx.lookup(name)
            if ty is None:
                raise UnboundVariable(f"unbound variable {name!r}")
            return ty
        case Star():
            return UNIT
        case BoolLit():
            return BOOL
        case Num(_, ty):
            return ty
        case Pair(a, b):
            return Prod(infer_value(ctx, a, sig), infer_value(ctx, b, sig))
        case App(sym, arg):
            entry = sig.get(sym)
            if entry is None:
                raise UnknownSymbol(f"unknown signature symbol {sym!r}")
            arg_ty = infer_value(ctx, arg, sig)
            result = entry.typing(arg_ty)
            if result is None:
                raise ArgumentTypeMismatch(f"{sym!r} cannot be applied to an argument of type {arg_ty}")
            return result
    raise IllTyped(f"not a value term: {v!r}")


def _expect(ctx: Context, v: Value, want: Ty, what: str, sig: Signature) -> None:
    got = infer_value(ctx, v, sig)
    if got != want:
        raise IllTyped(f"{what} has type {got}, expected {want}")


def infer_comp(ctx: Context, p: Comp, sig: Signature | None = None) -> Ty:
    sig = sig or builtin_signature()
    match p:
        case Now(v):
            return infer_value(ctx, v, sig)
        case Seq(x, first, rest):
            a = infer_comp(ctx, first, sig)
            return infer_comp(ctx.extend(x, a), rest, sig)
        case PairMatch(x, y, v, body):
            ty = infer_value(ctx, v, sig)
            if not isinstance(ty, Prod):
                raise IllTyped(f"pattern match on a value of non-product type {ty}")
            return infer_comp(ctx.extend(x, ty.left).extend(y, ty.right), body, sig)
        case If(c, then, orelse):
            _expect(ctx, c, BOOL, "if-condition", sig)
            a, b = infer_comp(ctx, then, sig), infer_comp(ctx, orelse, sig)
            if a != b:
                raise IllTyped(f"if-branches disagree: {a} vs {b}")
            return a
        case While(x, init, guard, body):
            a = infer_comp(ctx, init, sig)
            inner = ctx.extend(x, a)
            _expect(inner, guard, BOOL, "loop guard", sig)
            b = infer_comp(inner, body, sig)
            if b != a:
                raise IllTyped(f"loop body has type {b}, loop state has type {a}")
            return a
        case Evolve(t, flow, x, guard):
            a = infer_value(ctx.extend(t, REAL), flow, sig)
            _expect(ctx.extend(x, a), guard, BOOL, "evolution guard", sig)
            return a
    raise IllTyped(f"not a computation term: {p!r}")


def check_program(p: Comp, sig: Signature | None = None) -> Ty:
    """Typecheck a closed program."""
    return infer_comp(Context(), p, sig)
