"""A small arithmetic expression language for chart components.

Grammar (lowest to highest binding)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := ('-' | '+') unary | power
    power  := atom ('^' unary)?          # right associative
    atom   := NUMBER | IDENT | FUNC '(' expr ')' | '(' expr ')'

The identifier set is closed: coordinates ``u v s t w`` and constants
``pi e``; functions are ``exp sin cos sqrt log``.  Trees are immutable
tuples-of-dataclasses and can be evaluated over floats, numpy arrays or
:class:`~quasiminimal.jets.Jet` objects.
"""
import math
import re
from dataclasses import dataclass
from typing import Union

from . import jets
from .errors import ExprSyntaxError, UnknownIdentifier

VARIABLES = ("u", "v", "s", "t", "w")
CONSTANTS = {"pi": math.pi, "e": math.e}
FUNCTIONS = ("exp", "sin", "cos", "sqrt", "log")

_JET_FUNCS = {
    "exp": jets.exp,
    "sin": jets.sin,
    "cos": jets.cos,
    "sqrt": jets.sqrt,
    "log": jets.log,
}


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
    name: str


@dataclass(frozen=True)
class Neg:
    arg: "Expr"


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


Expr = Union[Num, Var, Const, Neg, Call, BinOp]


# tokenizer --------------------------------------------------------------

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^()])
""", re.VERBOSE)


def tokenize(src):
    tokens = []
    pos = 0
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        if m is None:
            raise ExprSyntaxError(f"unexpected character {src[pos]!r}", pos)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append((kind, m.group(), pos))
        pos = m.end()
    tokens.append(("end", "", len(src)))
    return tokens


class _Parser:
    def __init__(self, src):
        self.tokens = tokenize(src)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, text):
        kind, val, pos = self.take()
        if val != text or kind == "end":
            found = "end of input" if kind == "end" else repr(val)
            raise ExprSyntaxError(f"expected {text!r}, found {found}", pos)

    def parse(self):
        node = self.expr()
        kind, val, pos = self.peek()
        if kind != "end":
            raise ExprSyntaxError(f"unexpected {val!r}", pos)
        return node

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.unary())
        return node

    def unary(self):
        kind, val, _ = self.peek()
        if kind == "op" and val == "-":
            self.take()
            return Neg(self.unary())
        if kind == "op" and val == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            return BinOp("^", base, self.unary())
        return base

    def atom(self):
        kind, val, pos = self.take()
        if kind == "num":
            return Num(float(val))
        if kind == "ident":
            if val in FUNCTIONS:
                nxt = self.peek()
                if nxt[1] != "(":
                    raise ExprSyntaxError(f"function {val!r} needs parentheses",
                                          nxt[2])
                self.take()
                arg = self.expr()
                self.expect(")")
                return Call(val, arg)
            if val in VARIABLES:
                return Var(val)
            if val in CONSTANTS:
                return Const(val)
            raise UnknownIdentifier(f"unknown identifier {val!r} at offset {pos}",
                                    name=val, offset=pos)
        if kind == "op" and val == "(":
            node = self.expr()
            self.expect(")")
            return node
        found = "end of input" if kind == "end" else repr(val)
        raise ExprSyntaxError(f"expected an operand, found {found}", pos)


def parse(src):
    """Parse source text into an expression tree."""
    if not isinstance(src, str):
        src = repr(float(src))
    return _Parser(src).parse()


# printing ---------------------------------------------------------------

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "neg": 3, "^": 4}


def _prec(node):
    if isinstance(node, BinOp):
        return _PREC[node.op]
    if isinstance(node, Neg):
        return _PREC["neg"]
    return 5


def to_source(node):
    """Render a tree as text that parses back to the same tree."""
    if isinstance(node, Num):
        return repr(float(node.value))
    if isinstance(node, (Var, Const)):
        return node.name
    if isinstance(node, Call):
        return f"{node.func}({to_source(node.arg)})"
    if isinstance(node, Neg):
        inner = to_source(node.arg)
        if _prec(node.arg) < _PREC["neg"]:
            inner = f"({inner})"
        return f"-{inner}"
    p = _PREC[node.op]
    left, right = to_source(node.left), to_source(node.right)
    if node.op == "^":
        # base binds tighter than '^'; exponent may be a unary or a power
        if _prec(node.left) <= p:
            left = f"({left})"
        if _prec(node.right) < _PREC["neg"]:
            right = f"({right})"
    else:
        if _prec(node.left) < p:
            left = f"({left})"
        if _prec(node.right) <= p:
            right = f"({right})"
    return f"{left} {node.op} {right}"


def variables(node):
    """Set of coordinate names used in a tree."""
    if isinstance(node, Var):
        return {node.name}
    if isinstance(node, (Neg, Call)):
        return variables(node.arg)
    if isinstance(node, BinOp):
        return variables(node.left) | variables(node.right)
    return set()


# evaluation -------------------------------------------------------------

def evaluate(node, env):
    """Evaluate a tree; ``env`` maps coordinate names to floats, arrays or jets."""
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Const):
        return CONSTANTS[node.name]
    if isinstance(node, Var):
        try:
            return env[node.name]
        except KeyError:
            raise UnknownIdentifier(f"coordinate {node.name!r} is not bound "
                                    f"(available: {sorted(env)})",
                                    name=node.name) from None
    if isinstance(node, Neg):
        return -evaluate(node.arg, env)
    if isinstance(node, Call):
        return _JET_FUNCS[node.func](evaluate(node.arg, env))
    left = evaluate(node.left, env)
    if node.op == "^":
        if not variables(node.right):
            return jets.power(left, float(evaluate(node.right, env)))
        return jets.exp(evaluate(node.right, env) * jets.log(left))
    right = evaluate(node.right, env)
    if node.op == "+":
        return left + right
    if node.op == "-":
        return left - right
    if node.op == "*":
        return left * right
    return left * jets.reciprocal(right)


def eval_jet(node, p, order=jets.DEFAULT_ORDER, names=("u", "v")):
    """Jet of an expression at the point ``p`` in the named coordinates."""
    U, V = jets.Jet.variables(p[0], p[1], order)
    out = evaluate(node, {names[0]: U, names[1]: V})
    if not isinstance(out, jets.Jet):
        out = jets.Jet.constant(out, order)
    return out


def as_expr(obj):
    """Accept an expression tree, source text or a number."""
    if isinstance(obj, (Num, Var, Const, Neg, Call, BinOp)):
        return obj
    if isinstance(obj, (int, float)):
        return Num(float(obj)) if obj >= 0 else Neg(Num(float(-obj)))
    return parse(obj)
