"""Tiny arithmetic language for payoff formulas.

Grammar, loosest to tightest binding::

    expr   := expr ('+' | '-') expr          left associative
            | expr ('*' | '/') expr          left associative
            | '-' expr                       unary minus
            | expr '^' expr                  right associative
            | NUMBER | VARIABLE | FUNC '(' expr {',' expr} ')' | '(' expr ')'

so ``-x1^2`` is ``-(x1^2)`` and ``-a*b`` is ``(-a)*b``. Variables are
``x1 .. xn``; functions are ``abs``, ``min`` and ``max``. Evaluation works
element-wise on numpy arrays as well as on plain floats.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .errors import EvaluationError, InputError

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>\*\*|[-+*/^(),×÷−]))"
)
_ALIASES = {"**": "^", "×": "*", "÷": "/", "−": "-"}
_FUNCS = {"abs": 1, "min": None, "max": None}

_BINARY_BP = {"+": 10, "-": 10, "*": 20, "/": 20, "^": 30}
_UNARY_BP = 25


@dataclass(frozen=True)
class Token:
    kind: str  # num | name | op | end
    text: str
    pos: int


def tokenize(src: str) -> list[Token]:
    out = []
    pos = 0
    src = src.rstrip()
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        if not m or m.end() == pos:
            raise InputError(f"unexpected character {src[pos:].strip()[:1]!r} at {pos} in {src!r}")
        kind = m.lastgroup
        text = m.group(kind)
        out.append(Token(kind, _ALIASES.get(text, text), m.start(kind)))
        pos = m.end()
    out.append(Token("end", "", len(src)))
    return out


class _Parser:
    def __init__(self, src: str, variables: frozenset[str]):
        self.src = src
        self.tokens = tokenize(src)
        self.i = 0
        self.variables = variables

    def peek(self) -> Token:
        return self.tokens[self.i]

    def take(self) -> Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, text: str) -> None:
        tok = self.take()
        if tok.text != text:
            self.fail(tok, f"expected {text!r}")

    def fail(self, tok: Token, msg: str):
        where = "end of input" if tok.kind == "end" else repr(tok.text)
        raise InputError(f"{msg} at {where} (position {tok.pos}) in {self.src!r}")

    def parse(self):
        node = self.expression(0)
        if self.peek().kind != "end":
            self.fail(self.peek(), "unexpected trailing input")
        return node

    def expression(self, rbp: int):
        left = self.prefix(self.take())
        while True:
            tok = self.peek()
            bp = _BINARY_BP.get(tok.text, 0) if tok.kind == "op" else 0
            if bp <= rbp:
                return left
            self.take()
            # '^' is right associative: its right operand may contain another '^'
            right = self.expression(bp - 1 if tok.text == "^" else bp)
            left = ("bin", tok.text, left, right)

    def prefix(self, tok: Token):
        if tok.kind == "num":
            return ("num", float(tok.text))
        if tok.kind == "name":
            if tok.text in _FUNCS:
                return self.call(tok)
            if tok.text not in self.variables:
                self.fail(tok, "undeclared variable")
            return ("var", tok.text)
        if tok.text == "-":
            return ("neg", self.expression(_UNARY_BP))
        if tok.text == "+":
            return self.expression(_UNARY_BP)
        if tok.text == "(":
            inner = self.expression(0)
            self.expect(")")
            return inner
        self.fail(tok, "expected a number, variable or '('")

    def call(self, tok: Token):
        self.expect("(")
        args = [self.expression(0)]
        while self.peek().text == ",":
            self.take()
            args.append(self.expression(0))
        self.expect(")")
        arity = _FUNCS[tok.text]
        if arity is not None and len(args) != arity:
            self.fail(tok, f"{tok.text} takes {arity} argument(s)")
        return ("call", tok.text, tuple(args))


class Expression:
    """A parsed formula over ``x1 .. x{n_vars}``."""

    def __init__(self, source: str, n_vars: int):
        self.source = source
        self.n_vars = n_vars
        self.tree = _Parser(source, frozenset(f"x{i}" for i in range(1, n_vars + 1))).parse()

    def __repr__(self) -> str:
        return f"Expression({self.source!r})"

    def __call__(self, *values):
        if len(values) != self.n_vars:
            raise InputError(f"expected {self.n_vars} values, got {len(values)}")
        env = {f"x{i}": v for i, v in enumerate(values, start=1)}
        with np.errstate(all="ignore"):
            out = _eval(self.tree, env)
        if not np.all(np.isfinite(out)):
            raise EvaluationError(f"{self.source!r} is not finite at {values}")
        return out


def _eval(node, env):
    tag = node[0]
    if tag == "num":
        return node[1]
    if tag == "var":
        return env[node[1]]
    if tag == "neg":
        return -_eval(node[1], env)
    if tag == "call":
        args = [_eval(a, env) for a in node[2]]
        if node[1] == "abs":
            return np.abs(args[0])
        fold = np.minimum if node[1] == "min" else np.maximum
        acc = args[0]
        for a in args[1:]:
            acc = fold(acc, a)
        return acc
    _, op, lhs, rhs = node
    a, b = _eval(lhs, env), _eval(rhs, env)
    if op == "+":
        return a + b
    if op == "-":
        return a - b
    if op == "*":
        return a * b
    if op == "/":
        if np.any(np.asarray(b) == 0):
            raise EvaluationError("division by zero")
        return np.divide(a, b)
    return np.power(np.asarray(a, dtype=float), b)
