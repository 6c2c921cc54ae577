"""A minimal arithmetic expression language for user-supplied h(t) and g(y).

Grammar (whitespace-insensitive)::

    expression := term (('+' | '-') term)*
    term       := factor (('*' | '/') factor)*
    factor     := '-' factor | power
    power      := primary ('^' factor)?          # right-associative
    primary    := NUMBER | IDENT | IDENT '(' expression ')' | '(' expression ')'

``^`` binds tightest (so ``-2^2 == -(2^2)``), then unary minus, then ``* /``,
then ``+ -``.  Exactly one free variable is allowed, named at parse time;
known functions are exp, ln, sqrt, sin, cos, sec, abs and the constants pi
and e fold to literals.  Parse and eval are pure; trees are immutable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

from .errors import ArityError, EvalPole, ExprSyntaxError, UnknownIdentifier

FUNCTIONS = ("exp", "ln", "sqrt", "sin", "cos", "sec", "abs")
CONSTANTS = {"pi": math.pi, "e": math.e}

#: Denominator magnitudes below this are treated as division poles.
DIV_TOL = 1e-300
#: ``|cos x|`` below this makes sec(x) a pole (float pi/2 only gets within ~6e-17).
SEC_TOL = 1e-12


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * / ^
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Expr"


Expr = Union[Num, Var, Neg, BinOp, Call]


# ---------------------------------------------------------------------------
# tokenizer

_OPS = "+-*/^"


@dataclass(frozen=True)
class _Token:
    kind: str  # 'num', 'ident', 'op', '(', ')', ',', 'end'
    text: str
    pos: int
    value: float = 0.0


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if c in _OPS:
            tokens.append(_Token("op", c, i))
            i += 1
        elif c == "(":
            tokens.append(_Token("(", c, i))
            i += 1
        elif c == ")":
            tokens.append(_Token(")", c, i))
            i += 1
        elif c == ",":
            tokens.append(_Token(",", c, i))
            i += 1
        elif c.isdigit() or (c == "." and i + 1 < n and text[i + 1].isdigit()):
            start = i
            while i < n and text[i].isdigit():
                i += 1
            if i < n and text[i] == ".":
                i += 1
                while i < n and text[i].isdigit():
                    i += 1
            if i < n and text[i] in "eE":
                j = i + 1
                if j < n and text[j] in "+-":
                    j += 1
                if j < n and text[j].isdigit():
                    i = j
                    while i < n and text[i].isdigit():
                        i += 1
            lit = text[start:i]
            try:
                val = float(lit)
            except ValueError:
                raise ExprSyntaxError(f"bad numeric literal {lit!r}", start) from None
            tokens.append(_Token("num", lit, start, val))
        elif c.isalpha() or c == "_":
            start = i
            while i < n and (text[i].isalnum() or text[i] == "_"):
                i += 1
            tokens.append(_Token("ident", text[start:i], start))
        else:
            raise ExprSyntaxError(f"unexpected character {c!r}", i)
    tokens.append(_Token("end", "", n))
    return tokens


# ---------------------------------------------------------------------------
# parser

class _Parser:
    def __init__(self, tokens: list[_Token], var_name: str):
        self.tokens = tokens
        self.var_name = var_name
        self.i = 0

    def peek(self) -> _Token:
        return self.tokens[self.i]

    def advance(self) -> _Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, kind: str) -> _Token:
        tok = self.peek()
        if tok.kind != kind:
            raise ExprSyntaxError(f"expected {kind!r}, found {tok.text or 'end of input'!r}", tok.pos)
        return self.advance()

    def expression(self) -> Expr:
        node = self.term()
        while self.peek().kind == "op" and self.peek().text in "+-":
            op = self.advance().text
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Expr:
        node = self.factor()
        while self.peek().kind == "op" and self.peek().text in "*/":
            op = self.advance().text
            node = BinOp(op, node, self.factor())
        return node

    def factor(self) -> Expr:
        tok = self.peek()
        if tok.kind == "op" and tok.text == "-":
            self.advance()
            return Neg(self.factor())
        return self.power()

    def power(self) -> Expr:
        base = self.primary()
        tok = self.peek()
        if tok.kind == "op" and tok.text == "^":
            self.advance()
            return BinOp("^", base, self.factor())
        return base

    def primary(self) -> Expr:
        tok = self.advance()
        if tok.kind == "num":
            return Num(tok.value)
        if tok.kind == "(":
            node = self.expression()
            self.expect(")")
            return node
        if tok.kind == "ident":
            name = tok.text
            if self.peek().kind == "(":
                if name not in FUNCTIONS:
                    raise UnknownIdentifier(f"unknown function {name!r}", tok.pos)
                self.advance()
                if self.peek().kind == ")":
                    raise ArityError(f"{name} expects one argument, got none", tok.pos)
                arg = self.expression()
                if self.peek().kind == ",":
                    raise ArityError(f"{name} expects one argument", self.peek().pos)
                self.expect(")")
                return Call(name, arg)
            if name == self.var_name:
                return Var(name)
            if name in CONSTANTS:
                return Num(CONSTANTS[name])
            raise UnknownIdentifier(f"unknown identifier {name!r}", tok.pos)
        raise ExprSyntaxError(f"unexpected {tok.text or 'end of input'!r}", tok.pos)


def parse(text: str, var_name: str) -> Expr:
    """Parse ``text`` into an expression tree over the single variable ``var_name``."""
    if not text or not text.strip():
        raise ExprSyntaxError("empty expression", 0)
    parser = _Parser(_tokenize(text), var_name)
    node = parser.expression()
    trailing = parser.peek()
    if trailing.kind != "end":
        raise ExprSyntaxError(f"unexpected trailing input {trailing.text!r}", trailing.pos)
    return node


# ---------------------------------------------------------------------------
# evaluation and printing

def _check_finite(value: float, node: Expr) -> float:
    if not math.isfinite(value):
        raise EvalPole("non-finite result", pretty(node))
    return value


def evaluate(e: Expr, value: float) -> float:
    """Evaluate ``e`` with its free variable bound to ``value``."""
    if not math.isfinite(value):
        raise EvalPole(f"variable value {value!r} is not finite")
    return _eval(e, value)


def _eval(e: Expr, x: float) -> float:
    if isinstance(e, Num):
        return e.value
    if isinstance(e, Var):
        return x
    if isinstance(e, Neg):
        return -_eval(e.operand, x)
    if isinstance(e, BinOp):
        a = _eval(e.left, x)
        b = _eval(e.right, x)
        if e.op == "+":
            return _check_finite(a + b, e)
        if e.op == "-":
            return _check_finite(a - b, e)
        if e.op == "*":
            return _check_finite(a * b, e)
        if e.op == "/":
            if abs(b) < DIV_TOL:
                raise EvalPole("division by (near-)zero", pretty(e))
            return _check_finite(a / b, e)
        # '^': real-valued only; negative base needs an integer exponent
        if a < 0.0 and b != math.floor(b):
            raise EvalPole("negative base with non-integer exponent", pretty(e))
        try:
            return _check_finite(a ** b, e)
        except (OverflowError, ZeroDivisionError):
            raise EvalPole("power overflow or zero to a negative power", pretty(e)) from None
    if isinstance(e, Call):
        a = _eval(e.arg, x)
        try:
            if e.func == "exp":
                return _check_finite(math.exp(a), e)
            if e.func == "ln":
                return _check_finite(math.log(a), e)
            if e.func == "sqrt":
                return _check_finite(math.sqrt(a), e)
            if e.func == "sin":
                return math.sin(a)
            if e.func == "cos":
                return math.cos(a)
            if e.func == "sec":
                c = math.cos(a)
                if abs(c) < SEC_TOL:
                    raise EvalPole("sec pole (cos vanishes)", pretty(e))
                return _check_finite(1.0 / c, e)
            if e.func == "abs":
                return abs(a)
        except (ValueError, OverflowError):
            raise EvalPole(f"domain error in {e.func}", pretty(e)) from None
    raise TypeError(f"not an expression node: {e!r}")


_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "neg": 3, "^": 4}


def _prec(e: Expr) -> int:
    if isinstance(e, BinOp):
        return _PREC[e.op]
    if isinstance(e, Neg):
        return _PREC["neg"]
    return 5


def pretty(e: Expr) -> str:
    """Render a tree to text that reparses to a structurally identical tree."""
    if isinstance(e, Num):
        return repr(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Neg):
        inner = pretty(e.operand)
        if _prec(e.operand) < _PREC["neg"]:
            inner = f"({inner})"
        return f"-{inner}"
    if isinstance(e, Call):
        return f"{e.func}({pretty(e.arg)})"
    if isinstance(e, BinOp):
        lp, rp = pretty(e.left), pretty(e.right)
        p = _PREC[e.op]
        if e.op == "^":
            # right-associative and tighter than unary minus: parenthesize any
            # non-atomic base, and any right operand that binds looser than '^'
            if _prec(e.left) <= p:
                lp = f"({lp})"
            if _prec(e.right) < p:
                rp = f"({rp})"
        else:
            if _prec(e.left) < p:
                lp = f"({lp})"
            if _prec(e.right) <= p:
                rp = f"({rp})"
        return f"{lp}{e.op}{rp}"
    raise TypeError(f"not an expression node: {e!r}")
