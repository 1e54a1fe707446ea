"""Expression language for curve and hypersurface definitions.

Grammar (lowest to highest precedence)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' unary)?          # right associative
    atom   := NUMBER | NAME | NAME '(' expr ')' | '(' expr ')'

so ``-s^2`` is ``-(s^2)`` and ``2^-1`` is ``2^(-1)``.
"""

import math
import re
from dataclasses import dataclass

from ..errors import DomainError, ExprSyntaxError, UnknownIdentifier
from . import jet as _jet
from .jet import FUNCTIONS, Jet

CONSTANTS = {"pi": math.pi}


class Expr:
    __slots__ = ()

    def __str__(self):
        return to_source(self)


@dataclass(frozen=True)
class Num(Expr):
    value: float


@dataclass(frozen=True)
class Var(Expr):
    name: str


@dataclass(frozen=True)
class Neg(Expr):
    arg: Expr


@dataclass(frozen=True)
class Add(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Sub(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Mul(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Div(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Pow(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Call(Expr):
    func: str
    arg: Expr


# -- parsing ------------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^(),]))"
)
_OPERAND = frozenset({"number", "identifier", "'('", "'-'"})


def _tokenize(src):
    tokens = []
    pos = 0
    n = len(src)
    while pos < n:
        if src[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(src, pos)
        if m is None or m.lastgroup is None:
            raise ExprSyntaxError(f"unexpected character {src[pos]!r}", pos, _OPERAND)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("end", "", n))
    return tokens


class _Parser:
    def __init__(self, src, variables):
        self.tokens = _tokenize(src)
        self.i = 0
        self.variables = set(variables)

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, expected):
        kind, text, pos = self.peek()
        what = "end of input" if kind == "end" else repr(text)
        raise ExprSyntaxError(f"unexpected {what}", pos, expected)

    def expect(self, op):
        kind, text, _ = self.peek()
        if kind != "op" or text != op:
            self.fail({f"'{op}'"})
        self.take()

    def parse(self):
        e = self.expr()
        if self.peek()[0] != "end":
            self.fail({"'+'", "'-'", "'*'", "'/'", "'^'", "end of input"})
        return e

    def expr(self):
        left = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.take()[1]
            right = self.term()
            left = Add(left, right) if op == "+" else Sub(left, right)
        return left

    def term(self):
        left = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in "*/":
            op = self.take()[1]
            right = self.unary()
            left = Mul(left, right) if op == "*" else Div(left, right)
        return left

    def unary(self):
        if self.peek()[:2] == ("op", "-"):
            self.take()
            return Neg(self.unary())
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[:2] == ("op", "^"):
            self.take()
            return Pow(base, self.unary())
        return base

    def atom(self):
        kind, text, pos = self.peek()
        if kind == "num":
            self.take()
            return Num(float(text))
        if kind == "name":
            self.take()
            if self.peek()[:2] == ("op", "("):
                if text not in FUNCTIONS:
                    raise UnknownIdentifier(text, pos)
                self.take()
                arg = self.expr()
                self.expect(")")
                return Call(text, arg)
            if text in self.variables:
                return Var(text)
            if text in CONSTANTS:
                return Num(CONSTANTS[text])
            raise UnknownIdentifier(text, pos)
        if kind == "op" and text == "(":
            self.take()
            e = self.expr()
            self.expect(")")
            return e
        self.fail(_OPERAND)


def parse_expr(src, variables):
    """Parse ``src`` into an AST whose free variables are among ``variables``.

    Raises ExprSyntaxError (with offset and expected-token set) on malformed
    text and UnknownIdentifier on names that are neither declared variables,
    known functions nor the constant ``pi``.
    """
    return _Parser(src, variables).parse()


# -- printing -----------------------------------------------------------------

_PREC = {Add: 1, Sub: 1, Mul: 2, Div: 2, Neg: 3, Pow: 4}


def _fmt_num(v):
    if v.is_integer() and abs(v) < 1e16:
        return str(int(v))
    return repr(v)


def to_source(e):
    """Render ``e`` as text that parses back to the same tree."""
    if isinstance(e, Num):
        s = _fmt_num(e.value)
        return f"({s})" if e.value < 0 else s
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Call):
        return f"{e.func}({to_source(e.arg)})"
    if isinstance(e, Neg):
        inner = to_source(e.arg)
        if _PREC.get(type(e.arg), 5) < 3:
            inner = f"({inner})"
        return "-" + inner
    if isinstance(e, Pow):
        left = to_source(e.left)
        if _PREC.get(type(e.left), 5) <= 4 or (isinstance(e.left, Num) and e.left.value < 0):
            left = f"({left})"
        right = to_source(e.right)
        if _PREC.get(type(e.right), 5) < 3:
            right = f"({right})"
        return f"{left}^{right}"
    op = {Add: "+", Sub: "-", Mul: "*", Div: "/"}[type(e)]
    prec = _PREC[type(e)]
    left = to_source(e.left)
    if _PREC.get(type(e.left), 5) < prec:
        left = f"({left})"
    right = to_source(e.right)
    if _PREC.get(type(e.right), 5) <= prec:
        right = f"({right})"
    sep = " " if prec == 1 else ""
    return f"{left}{sep}{op}{sep}{right}"


# -- simplifying constructors -------------------------------------------------

ZERO = Num(0.0)
ONE = Num(1.0)


def _is(e, v):
    return isinstance(e, Num) and e.value == v


def add(a, b):
    if _is(a, 0.0):
        return b
    if _is(b, 0.0):
        return a
    if isinstance(a, Num) and isinstance(b, Num):
        return Num(a.value + b.value)
    return Add(a, b)


def sub(a, b):
    if _is(b, 0.0):
        return a
    if _is(a, 0.0):
        return neg(b)
    if isinstance(a, Num) and isinstance(b, Num):
        return Num(a.value - b.value)
    return Sub(a, b)


def neg(a):
    if isinstance(a, Num):
        return Num(-a.value) if a.value else ZERO
    if isinstance(a, Neg):
        return a.arg
    return Neg(a)


def mul(a, b):
    if _is(a, 0.0) or _is(b, 0.0):
        return ZERO
    if _is(a, 1.0):
        return b
    if _is(b, 1.0):
        return a
    if isinstance(a, Num) and isinstance(b, Num):
        return Num(a.value * b.value)
    return Mul(a, b)


def div(a, b):
    if _is(b, 1.0):
        return a
    if _is(a, 0.0):
        return ZERO
    return Div(a, b)


def power(a, b):
    if _is(b, 1.0):
        return a
    if _is(b, 0.0):
        return ONE
    return Pow(a, b)


def call(f, a):
    return Call(f, a)


# -- differentiation ----------------------------------------------------------


def free_vars(e):
    if isinstance(e, Var):
        return {e.name}
    if isinstance(e, Num):
        return set()
    if isinstance(e, (Neg, Call)):
        return free_vars(e.arg)
    return free_vars(e.left) | free_vars(e.right)


def diff_expr(e, var):
    """Exact symbolic partial derivative of ``e`` with respect to ``var``."""
    if isinstance(e, Num):
        return ZERO
    if isinstance(e, Var):
        return ONE if e.name == var else ZERO
    if isinstance(e, Neg):
        return neg(diff_expr(e.arg, var))
    if isinstance(e, Add):
        return add(diff_expr(e.left, var), diff_expr(e.right, var))
    if isinstance(e, Sub):
        return sub(diff_expr(e.left, var), diff_expr(e.right, var))
    if isinstance(e, Mul):
        da, db = diff_expr(e.left, var), diff_expr(e.right, var)
        return add(mul(da, e.right), mul(e.left, db))
    if isinstance(e, Div):
        da, db = diff_expr(e.left, var), diff_expr(e.right, var)
        return sub(div(da, e.right), div(mul(e.left, db), power(e.right, Num(2.0))))
    if isinstance(e, Pow):
        a, b = e.left, e.right
        da, db = diff_expr(a, var), diff_expr(b, var)
        if var not in free_vars(b):
            if isinstance(b, Num):
                lowered = Num(b.value - 1.0)
            else:
                lowered = sub(b, ONE)
            return mul(mul(b, power(a, lowered)), da)
        # a^b * (b' log a + b a'/a)
        return mul(e, add(mul(db, call("log", a)), div(mul(b, da), a)))
    if isinstance(e, Call):
        a = e.arg
        da = diff_expr(a, var)
        if _is(da, 0.0):
            return ZERO
        outer = {
            "sin": lambda: call("cos", a),
            "cos": lambda: neg(call("sin", a)),
            "tan": lambda: div(ONE, power(call("cos", a), Num(2.0))),
            "sinh": lambda: call("cosh", a),
            "cosh": lambda: call("sinh", a),
            "tanh": lambda: div(ONE, power(call("cosh", a), Num(2.0))),
            "exp": lambda: e,
            "log": lambda: div(ONE, a),
            "sqrt": lambda: div(ONE, mul(Num(2.0), e)),
            "atan": lambda: div(ONE, add(ONE, power(a, Num(2.0)))),
        }[e.func]()
        return mul(outer, da)
    raise TypeError(f"not an expression: {e!r}")


# -- evaluation -----------------------------------------------------------------


def evaluate(e, env):
    """Evaluate over floats or jets; the result has the scalar type of ``env``."""
    if isinstance(e, Num):
        return e.value
    if isinstance(e, Var):
        try:
            return env[e.name]
        except KeyError:
            raise UnknownIdentifier(e.name, -1) from None
    if isinstance(e, Neg):
        return -evaluate(e.arg, env)
    if isinstance(e, Call):
        return FUNCTIONS[e.func](evaluate(e.arg, env))
    a = evaluate(e.left, env)
    if isinstance(e, Pow):
        return _pow(a, e.right, env)
    b = evaluate(e.right, env)
    if isinstance(e, Add):
        return a + b
    if isinstance(e, Sub):
        return a - b
    if isinstance(e, Mul):
        return a * b
    if isinstance(e, Div):
        if not isinstance(b, Jet) and b == 0.0:
            raise DomainError("division by zero")
        return a / b
    raise TypeError(f"not an expression: {e!r}")


def _pow(a, right, env):
    b = evaluate(right, env)
    if isinstance(b, Jet):
        return _jet.exp(b * _jet.log(a))
    if isinstance(a, Jet):
        return a**b
    if float(b).is_integer():
        if a == 0.0 and b < 0:
            raise DomainError("zero to a negative power")
        return a ** int(b)
    if a < 0.0:
        raise DomainError(f"negative base {a} with non-integer exponent {b}")
    return math.pow(a, b)


def eval_jet(e, assignments):
    """Truncated Taylor expansion of ``e`` along the jet-valued variable(s).

    Real-valued assignments are treated as constants. When no jet is given the
    result is an order-0 jet at base 0.
    """
    jets = [v for v in assignments.values() if isinstance(v, Jet)]
    if jets:
        base, order = jets[0].base, jets[0].order
        if any(j.base != base or j.order != order for j in jets):
            raise ValueError("jet assignments must share base point and order")
    else:
        base, order = 0.0, 0
    out = evaluate(e, assignments)
    if isinstance(out, Jet):
        return out
    return Jet.constant(out, base, order)
