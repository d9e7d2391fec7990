"""Guard language for transition conditions.

Grammar (lowest precedence first)::

    expr  := and ("or" and)*
    and   := not ("and" not)*
    not   := ["not"] cmp
    cmp   := sum (("<" | "<=" | "=" | "!=" | ">=" | ">") sum)?
    sum   := prod (("+" | "-") prod)*
    prod  := unary (("*" | "/") unary)*
    unary := "-" unary | atom
    atom  := number | "true" | "false" | "val(" id ")" | "in(" id "," id ")"
           | "bonded(" id "," id "," id ")" | "tokens_in(" id "," id ")"
           | ident "(" args ")" | ident | "(" expr ")"

A bare identifier is only meaningful as a host-function argument, where it
names a place, base or type.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Any, Callable, Union

from .errors import (
    ConditionTypeError,
    GuardDivisionByZero,
    GuardSyntaxError,
    GuardTypeError,
    MissingHostFunction,
)
from .model import BASE, BOOLEAN, IDLIST, PLACE, REAL, TYPE, Bond, Kind


@dataclass(frozen=True)
class Bool:
    value: bool


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Name:
    id: str


@dataclass(frozen=True)
class Val:
    base: str


@dataclass(frozen=True)
class In:
    base: str
    place: str


@dataclass(frozen=True)
class Bonded:
    a: str
    b: str
    place: str


@dataclass(frozen=True)
class TokensIn:
    place: str
    type: str


@dataclass(frozen=True)
class Not:
    operand: Expr


@dataclass(frozen=True)
class BoolOp:
    op: str  # "and" | "or"
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Compare:
    op: str
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Arith:
    op: str
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple


Expr = Union[Bool, Num, Name, Val, In, Bonded, TokensIn, Not, BoolOp, Compare, Arith, Call]

TRUE = Bool(True)
FALSE = Bool(False)


@dataclass(frozen=True)
class HostFunction:
    """A function guards may call.

    ``params`` are kinds; ``Kind("vector", None)`` accepts a vector of any
    length.  With ``needs_context`` the callback receives an
    :class:`EvalContext` before its arguments.
    """

    name: str
    params: tuple
    result: Kind
    impl: Callable[..., Any]
    needs_context: bool = False


@dataclass(frozen=True)
class EvalContext:
    net: Any
    state: Any


# -- parsing -----------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+\.\d*(?:[eE][+-]?\d+)?|\d+(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)"
    r"|(?P<id>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op><=|>=|!=|[<>=+\-*/(),]))"
)
_CMP = ("<", "<=", "=", "!=", ">=", ">")
_KEYWORDS = {"and", "or", "not", "true", "false"}


def _lex(text: str) -> list[tuple[str, str, int]]:
    toks = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise GuardSyntaxError(f"unexpected character {text[pos]!r}", *_linecol(text, pos))
        kind = m.lastgroup
        toks.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    toks.append(("eof", "", len(text)))
    return toks


def _linecol(text: str, pos: int) -> tuple[int, int]:
    line = text.count("\n", 0, pos) + 1
    col = pos - (text.rfind("\n", 0, pos) + 1) + 1
    return line, col


class _Parser:
    def __init__(self, text):
        self.text = text
        self.toks = _lex(text)
        self.i = 0

    def peek(self, ahead=0):
        return self.toks[min(self.i + ahead, len(self.toks) - 1)]

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        got = tok[1] or "end of input"
        return GuardSyntaxError(f"{msg}, got {got!r}", *_linecol(self.text, tok[2]))

    def take(self, value=None, kind=None):
        tok = self.peek()
        if (value is not None and tok[1] != value) or (kind is not None and tok[0] != kind):
            raise self.error(f"expected {value or kind}")
        self.i += 1
        return tok

    def at(self, value):
        tok = self.peek()
        return tok[0] in ("op", "id") and tok[1] == value

    def parse(self):
        e = self.or_expr()
        if self.peek()[0] != "eof":
            raise self.error("unexpected trailing input")
        return e

    def or_expr(self):
        e = self.and_expr()
        while self.at("or"):
            self.i += 1
            e = BoolOp("or", e, self.and_expr())
        return e

    def and_expr(self):
        e = self.not_expr()
        while self.at("and"):
            self.i += 1
            e = BoolOp("and", e, self.not_expr())
        return e

    def not_expr(self):
        if self.at("not"):
            self.i += 1
            return Not(self.cmp())
        return self.cmp()

    def cmp(self):
        e = self.sum()
        if self.peek()[0] == "op" and self.peek()[1] in _CMP:
            op = self.take()[1]
            e = Compare(op, e, self.sum())
        return e

    def sum(self):
        e = self.prod()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.take()[1]
            e = Arith(op, e, self.prod())
        return e

    def prod(self):
        e = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in "*/":
            op = self.take()[1]
            e = Arith(op, e, self.unary())
        return e

    def unary(self):
        if self.at("-"):
            self.i += 1
            inner = self.unary()
            if isinstance(inner, Num):
                return Num(-inner.value)
            return Arith("-", Num(0.0), inner)
        return self.atom()

    def ident(self):
        tok = self.take(kind="id")
        if tok[1] in _KEYWORDS:
            raise self.error("expected identifier", tok)
        return tok[1]

    def atom(self):
        kind, value, _ = self.peek()
        if kind == "num":
            self.i += 1
            return Num(float(value))
        if kind == "op" and value == "(":
            self.i += 1
            e = self.or_expr()
            self.take(")")
            return e
        if kind != "id":
            raise self.error("expected an operand")
        if value in ("true", "false"):
            self.i += 1
            return Bool(value == "true")
        if value in _KEYWORDS:
            raise self.error("expected an operand")
        self.i += 1
        if not self.at("("):
            return Name(value)
        self.i += 1
        if value == "val":
            node = Val(self.ident())
        elif value == "in":
            a = self.ident()
            self.take(",")
            node = In(a, self.ident())
        elif value == "bonded":
            a = self.ident()
            self.take(",")
            b = self.ident()
            self.take(",")
            node = Bonded(a, b, self.ident())
        elif value == "tokens_in":
            p = self.ident()
            self.take(",")
            node = TokensIn(p, self.ident())
        else:
            args = []
            if not self.at(")"):
                args.append(self.or_expr())
                while self.at(","):
                    self.i += 1
                    args.append(self.or_expr())
            node = Call(value, tuple(args))
        self.take(")")
        return node


def parse(text: str) -> Expr:
    """Parse guard text; raises GuardSyntaxError with line/column."""
    return _Parser(text).parse()


# -- printing ----------------------------------------------------------------

_PREC = {"or": 1, "and": 2, "not": 3, "cmp": 4, "+": 5, "-": 5, "*": 6, "/": 6}


def _num(v: float) -> str:
    return repr(float(v))


def to_text(e: Expr) -> str:
    """Canonical text; ``parse(to_text(e)) == e``."""
    return _show(e, 0)


def _show(e, ctx: int) -> str:
    if isinstance(e, BoolOp):
        p = _PREC[e.op]
        s = f"{_show(e.left, p)} {e.op} {_show(e.right, p + 1)}"
    elif isinstance(e, Not):
        p = _PREC["not"]
        s = f"not {_show(e.operand, _PREC['cmp'])}"
    elif isinstance(e, Compare):
        p = _PREC["cmp"]
        s = f"{_show(e.left, p + 1)} {e.op} {_show(e.right, p + 1)}"
    elif isinstance(e, Arith):
        p = _PREC[e.op]
        s = f"{_show(e.left, p)} {e.op} {_show(e.right, p + 1)}"
    else:
        return _atom(e)
    return f"({s})" if p < ctx else s


def _atom(e) -> str:
    if isinstance(e, Bool):
        return "true" if e.value else "false"
    if isinstance(e, Num):
        return _num(e.value)
    if isinstance(e, Name):
        return e.id
    if isinstance(e, Val):
        return f"val({e.base})"
    if isinstance(e, In):
        return f"in({e.base}, {e.place})"
    if isinstance(e, Bonded):
        return f"bonded({e.a}, {e.b}, {e.place})"
    if isinstance(e, TokensIn):
        return f"tokens_in({e.place}, {e.type})"
    if isinstance(e, Call):
        return f"{e.name}({', '.join(_show(a, 0) for a in e.args)})"
    raise TypeError(f"not a guard expression: {e!r}")


# -- type checking -----------------------------------------------------------


def _accepts(param: Kind, got: Kind) -> bool:
    if param == got:
        return True
    return param.name == "vector" and param.dim is None and got.name == "vector"


def typecheck(e: Expr, net, expect: Kind | None = None) -> Kind:
    """Kind of *e* in the context of *net*; raises GuardTypeError.

    ``expect`` is only used to resolve bare identifiers in argument position.
    """
    if isinstance(e, Bool):
        return BOOLEAN
    if isinstance(e, Num):
        return REAL
    if isinstance(e, Name):
        spaces = {BASE: net.bases, PLACE: net.places, TYPE: net.types}
        if expect in spaces:
            if e.id not in spaces[expect]:
                raise GuardTypeError(f"unknown {expect} {e.id!r}", e)
            return expect
        raise GuardTypeError(f"bare identifier {e.id!r} outside a function argument", e)
    if isinstance(e, Val):
        _need_base(net, e.base, e)
        return net.kind_of(e.base)
    if isinstance(e, In):
        _need_base(net, e.base, e)
        _need_place(net, e.place, e)
        return BOOLEAN
    if isinstance(e, Bonded):
        _need_base(net, e.a, e)
        _need_base(net, e.b, e)
        _need_place(net, e.place, e)
        if e.a == e.b:
            raise GuardTypeError("a base cannot be bonded to itself", e)
        return BOOLEAN
    if isinstance(e, TokensIn):
        _need_place(net, e.place, e)
        if e.type not in net.types:
            raise GuardTypeError(f"unknown type {e.type!r}", e)
        return IDLIST
    if isinstance(e, Not):
        _expect(typecheck(e.operand, net), BOOLEAN, e)
        return BOOLEAN
    if isinstance(e, BoolOp):
        _expect(typecheck(e.left, net), BOOLEAN, e)
        _expect(typecheck(e.right, net), BOOLEAN, e)
        return BOOLEAN
    if isinstance(e, Compare):
        _expect(typecheck(e.left, net), REAL, e)
        _expect(typecheck(e.right, net), REAL, e)
        return BOOLEAN
    if isinstance(e, Arith):
        _expect(typecheck(e.left, net), REAL, e)
        _expect(typecheck(e.right, net), REAL, e)
        return REAL
    if isinstance(e, Call):
        fn = net.functions.get(e.name)
        if fn is None:
            raise GuardTypeError(f"unknown function {e.name!r}", e)
        if len(fn.params) != len(e.args):
            raise GuardTypeError(
                f"{e.name} takes {len(fn.params)} arguments, got {len(e.args)}", e
            )
        for param, arg in zip(fn.params, e.args):
            got = typecheck(arg, net, expect=param)
            if not _accepts(param, got):
                raise GuardTypeError(f"{e.name} expects {param}, got {got}", arg)
        return fn.result
    raise GuardTypeError("not a guard expression", e)


def _need_base(net, b, node):
    if b not in net.bases:
        raise GuardTypeError(f"unknown base {b!r}", node)


def _need_place(net, p, node):
    if p not in net.places:
        raise GuardTypeError(f"unknown place {p!r}", node)


def _expect(got: Kind, want: Kind, node):
    if got != want:
        raise GuardTypeError(f"expected {want}, got {got}", node)


# -- evaluation --------------------------------------------------------------


def evaluate(e: Expr, state, net) -> Any:
    """Strict evaluation over the marking of *state* and the values of *net*.

    The history of *state* is never consulted.
    """
    if isinstance(e, (Bool, Num)):
        return e.value
    if isinstance(e, Name):
        return e.id
    if isinstance(e, Val):
        return net.values[e.base]
    if isinstance(e, In):
        return e.base in state.marking[e.place]
    if isinstance(e, Bonded):
        return Bond(e.a, e.b) in state.marking[e.place]
    if isinstance(e, TokensIn):
        return tuple(
            sorted(
                x for x in state.marking[e.place]
                if isinstance(x, str) and net.bases[x] == e.type
            )
        )
    if isinstance(e, Not):
        return not evaluate(e.operand, state, net)
    if isinstance(e, BoolOp):
        left = evaluate(e.left, state, net)
        right = evaluate(e.right, state, net)
        return (left and right) if e.op == "and" else (left or right)
    if isinstance(e, Compare):
        a = evaluate(e.left, state, net)
        b = evaluate(e.right, state, net)
        return bool({
            "<": a < b, "<=": a <= b, "=": a == b,
            "!=": a != b, ">=": a >= b, ">": a > b,
        }[e.op])
    if isinstance(e, Arith):
        a = evaluate(e.left, state, net)
        b = evaluate(e.right, state, net)
        if e.op == "+":
            return a + b
        if e.op == "-":
            return a - b
        if e.op == "*":
            return a * b
        if b == 0:
            raise GuardDivisionByZero(f"division by zero in {to_text(e)}")
        return a / b
    if isinstance(e, Call):
        fn = net.functions.get(e.name)
        if fn is None:
            raise MissingHostFunction(e.name)
        args = [evaluate(a, state, net) for a in e.args]
        if fn.needs_context:
            return fn.impl(EvalContext(net, state), *args)
        return fn.impl(*args)
    raise TypeError(f"not a guard expression: {e!r}")


def holds(e: Expr, state, net) -> bool:
    """Evaluate a guard and insist on a boolean result."""
    v = evaluate(e, state, net)
    if not isinstance(v, bool):
        raise ConditionTypeError(f"guard {to_text(e)} evaluated to {v!r}")
    return v
