"""Abstract syntax of HybCore: types, value terms, computation terms, contexts.

Only core forms live here; the surface conveniences (``wait``, tail
assignments, pattern binders, ``for r``) are expanded by the frontend.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Mapping, Union

# ---------------------------------------------------------------- types


@dataclass(frozen=True, slots=True)
class Base:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True, slots=True)
class Prod:
    left: "Ty"
    right: "Ty"

    def __str__(self) -> str:
        def side(t: Ty) -> str:
            return f"({t})" if isinstance(t, Prod) else str(t)

        return f"{side(self.left)} x {side(self.right)}"


Ty = Union[Base, Prod]

NAT = Base("N")
REAL = Base("R")
UNIT = Base("1")
BOOL = Base("2")

# ---------------------------------------------------------------- values


@dataclass(frozen=True, slots=True)
class Var:
    name: str


@dataclass(frozen=True, slots=True)
class Star:
    pass


@dataclass(frozen=True, slots=True)
class BoolLit:
    value: bool


@dataclass(frozen=True, slots=True)
class Num:
    """A numeric constant; ``ty`` is NAT or REAL.

    Constants are nullary signature symbols as far as typing goes; keeping
    them as their own node lets evaluators reify runtime values back into
    terms when substituting.
    """

    value: Union[int, float]
    ty: Base = REAL


@dataclass(frozen=True, slots=True)
class Pair:
    left: "Value"
    right: "Value"


@dataclass(frozen=True, slots=True)
class App:
    """Application of a signature symbol to a (possibly tupled) argument."""

    sym: str
    arg: "Value"


Value = Union[Var, Star, BoolLit, Num, Pair, App]

TRUE = BoolLit(True)
FALSE = BoolLit(False)
STAR = Star()

# ---------------------------------------------------------- computations


@dataclass(frozen=True, slots=True)
class Now:
    value: Value


@dataclass(frozen=True, slots=True)
class Seq:
    """``x := first; rest``. The binder ``_`` is never referenced."""

    var: str
    first: "Comp"
    rest: "Comp"


@dataclass(frozen=True, slots=True)
class PairMatch:
    """``let (left, right) = value in body``."""

    left: str
    right: str
    value: Value
    body: "Comp"


@dataclass(frozen=True, slots=True)
class If:
    cond: Value
    then: "Comp"
    orelse: "Comp"


@dataclass(frozen=True, slots=True)
class While:
    """``while var := init & guard { body }``; guard and body see ``var``."""

    var: str
    init: "Comp"
    guard: Value
    body: "Comp"


@dataclass(frozen=True, slots=True)
class Evolve:
    """``evolve state = time. flow & guard``.

    ``flow`` sees the time binder, ``guard`` sees the state binder.
    """

    time: str
    flow: Value
    state: str
    guard: Value


Comp = Union[Now, Seq, PairMatch, If, While, Evolve]
Term = Union[Value, Comp]

# --------------------------------------------------------------- context


class Context:
    """Ordered typing context. Extending with an existing name shadows it,
    so the underlying list never repeats a name."""

    __slots__ = ("_items",)

    def __init__(self, items: tuple[tuple[str, Ty], ...] | list[tuple[str, Ty]] = ()):
        seen: dict[str, Ty] = {}
        for name, ty in items:
            seen.pop(name, None)
            seen[name] = ty
        self._items = tuple(seen.items())

    def extend(self, name: str, ty: Ty) -> "Context":
        if name == "_":
            return self
        return Context(self._items + ((name, ty),))

    def lookup(self, name: str) -> Ty | None:
        for n, ty in reversed(self._items):
            if n == name:
                return ty
        return None

    def names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self._items)

    def __iter__(self) -> Iterator[tuple[str, Ty]]:
        return iter(self._items)

    def __len__(self) -> int:
        return len(self._items)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Context) and self._items == other._items

    def __hash__(self) -> int:
        return hash(self._items)

    def __repr__(self) -> str:
        return "Context([" + ", ".join(f"{n}: {t}" for n, t in self._items) + "])"


# ---------------------------------------------------------- free variables


def free_vars(term: Term) -> frozenset[str]:
    match term:
        case Var(name):
            return frozenset({name})
        case Star() | BoolLit() | Num():
            return frozenset()
        case Pair(a, b):
            return free_vars(a) | free_vars(b)
        case App(_, arg):
            return free_vars(arg)
        case Now(v):
            return free_vars(v)
        case Seq(x, p, q):
            return free_vars(p) | (free_vars(q) - {x})
        case PairMatch(x, y, v, q):
            return free_vars(v) | (free_vars(q) - {x, y})
        case If(c, p, q):
            return free_vars(c) | free_vars(p) | free_vars(q)
        case While(x, p, w, q):
            return free_vars(p) | ((free_vars(w) | free_vars(q)) - {x})
        case Evolve(t, v, x, w):
            return (free_vars(v) - {t}) | (free_vars(w) - {x})
    raise TypeError(f"not a term: {term!r}")


def is_closed(term: Term) -> bool:
    return not free_vars(term)


# ------------------------------------------------------------ substitution


def substitute(term: Term, subst: Mapping[str, Value]) -> Term:
    """Replace free occurrences of variables by values.

    Evaluators only ever substitute closed values, so there is no capture to
    avoid: a binder simply removes its name from the substitution below it.
    """
    if not subst:
        return term
    return _subst(term, dict(subst))


def _without(subst: dict[str, Value], *names: str) -> dict[str, Value]:
    if not any(n in subst for n in names):
        return subst
    return {k: v for k, v in subst.items() if k not in names}


def _subst(term: Term, s: dict[str, Value]) -> Term:
    if not s:
        return term
    match term:
        case Var(name):
            return s.get(name, term)
        case Star() | BoolLit() | Num():
            return term
        case Pair(a, b):
            return Pair(_subst(a, s), _subst(b, s))
        case App(sym, arg):
            return App(sym, _subst(arg, s))
        case Now(v):
            return Now(_subst(v, s))
        case Seq(x, p, q):
            return Seq(x, _subst(p, s), _subst(q, _without(s, x)))
        case PairMatch(x, y, v, q):
            return PairMatch(x, y, _subst(v, s), _subst(q, _without(s, x, y)))
        case If(c, p, q):
            return If(_subst(c, s), _subst(p, s), _subst(q, s))
        case While(x, p, w, q):
            inner = _without(s, x)
            return While(x, _subst(p, s), _subst(w, inner), _subst(q, inner))
        case Evolve(t, v, x, w):
            return Evolve(t, _subst(v, _without(s, t)), x, _subst(w, _without(s, x)))
    raise TypeError(f"not a term: {term!r}")


def term_size(term: Term) -> int:
    match term:
        case Var() | Star() | BoolLit() | Num():
            return 1
        case Pair(a, b):
            return 1 + term_size(a) + term_size(b)
        case App(_, arg):
            return 1 + term_size(arg)
        case Now(v):
            return 1 + term_size(v)
        case Seq(_, p, q):
            return 1 + term_size(p) + term_size(q)
        case PairMatch(_, _, v, q):
            return 1 + term_size(v) + term_size(q)
        case If(c, p, q):
            return 1 + term_size(c) + term_size(p) + term_size(q)
        case While(_, p, w, q):
            return 1 + term_size(p) + term_size(w) + term_size(q)
        case Evolve(_, v, _, w):
            return 1 + term_size(v) + term_size(w)
    raise TypeError(f"not a term: {term!r}")
