#!/usr/bin/env python3
"""
Closed-form expressions for the command line.

Small arithmetic grammar compiled to numpy callables:
numbers, pi, e, named variables, + - * / ^ (right-associative, binds
tighter than unary minus), parentheses and the functions
sin, cos, log, exp, sqrt, abs. Negative exponents need parentheses: n^(-2).
"""

from dataclasses import dataclass
from typing import Dict, Sequence, Tuple

import numpy as np
from pyparsing import (
    Forward,
    OpAssoc,
    ParseException,
    ParserElement,
    Regex,
    Suppress,
    Word,
    alphanums,
    alphas,
    infix_notation,
    one_of,
)

from errors import ExpressionError

ParserElement.enable_packrat()

FUNCTIONS = {
    "sin": np.sin,
    "cos": np.cos,
    "log": np.log,
    "exp": np.exp,
    "sqrt": np.sqrt,
    "abs": np.abs,
}
CONSTANTS = {"pi": np.pi, "e": np.e}


class _Node:
    def evaluate(self, env: Dict[str, np.ndarray]):
        raise NotImplementedError

    def names(self):
        return []


@dataclass
class _Number(_Node):
    value: float

    def evaluate(self, env):
        return self.value


@dataclass
class _Name(_Node):
    name: str
    loc: int

    def evaluate(self, env):
        if self.name in CONSTANTS:
            return CONSTANTS[self.name]
        return env[self.name]

    def names(self):
        return [self]


@dataclass
class _Call(_Node):
    name: str
    loc: int
    argument: _Node

    def evaluate(self, env):
        return FUNCTIONS[self.name](self.argument.evaluate(env))

    def names(self):
        return self.argument.names()


@dataclass
class _Negate(_Node):
    operand: _Node

    def evaluate(self, env):
        return -self.operand.evaluate(env)

    def names(self):
        return self.operand.names()


@dataclass
class _Binary(_Node):
    op: str
    left: _Node
    right: _Node

    def evaluate(self, env):
        a = self.left.evaluate(env)
        b = self.right.evaluate(env)
        if self.op == "+":
            return a + b
        if self.op == "-":
            return a - b
        if self.op == "*":
            return a * b
        if self.op == "/":
            return np.divide(a, b)
        return np.power(a, b)

    def names(self):
        return self.left.names() + self.right.names()


def _fold_left(tokens):
    items = tokens[0]
    node = items[0]
    for op, operand in zip(items[1::2], items[2::2]):
        node = _Binary(op, node, operand)
    return node


def _fold_right(tokens):
    items = tokens[0]
    node = items[-1]
    for operand in reversed(items[:-1:2]):
        node = _Binary("^", operand, node)
    return node


def _negate(tokens):
    return _Negate(tokens[0][1])


def _build_grammar():
    expr = Forward()
    number = Regex(r"(\d+\.?\d*|\.\d+)([eE][-+]?\d+)?").set_parse_action(lambda t: _Number(float(t[0])))
    identifier = Word(alphas, alphanums + "_")
    call = (identifier + Suppress("(") + expr + Suppress(")")).set_parse_action(
        lambda s, loc, t: _Call(t[0], loc, t[1])
    )
    name = identifier.copy().set_parse_action(lambda s, loc, t: _Name(t[0], loc))
    operand = call | number | name
    expr <<= infix_notation(
        operand,
        [
            ("^", 2, OpAssoc.RIGHT, _fold_right),
            ("-", 1, OpAssoc.RIGHT, _negate),
            (one_of("* /"), 2, OpAssoc.LEFT, _fold_left),
            (one_of("+ -"), 2, OpAssoc.LEFT, _fold_left),
        ],
    )
    return expr


GRAMMAR = _build_grammar()


@dataclass(frozen=True)
class Expression:
    """A compiled expression; call with keyword arrays or build a positional function."""

    text: str
    variables: Tuple[str, ...]
    tree: _Node

    def __call__(self, **values):
        self._check_bound(values)
        env = {name: np.asarray(value, dtype=float) for name, value in values.items()}
        result = np.asarray(self.tree.evaluate(env), dtype=float)
        # constant expressions still follow the shape of their arguments
        shape = np.broadcast_shapes(result.shape, *(v.shape for v in env.values()))
        if result.shape != shape:
            result = np.broadcast_to(result, shape)
        return float(result) if result.ndim == 0 else np.array(result)

    def as_function(self, *names: str):
        """Positional callable f(*args) in the given variable order."""
        self._check_bound(names)
        return lambda *args: self(**dict(zip(names, args)))

    def _check_bound(self, names):
        missing = [n for n in self.variables if n not in names]
        if missing:
            raise ExpressionError(self.text, 0, f"unbound variable(s) {', '.join(missing)}")


def compile_expression(text: str, variables: Sequence[str] = ("n",)) -> Expression:
    """Parses ``text``; only ``variables``, constants and known functions may appear."""
    try:
        tree = GRAMMAR.parse_string(text, parse_all=True)[0]
    except ParseException as exc:
        raise ExpressionError(text, exc.loc, f"cannot parse expression ({exc.msg})") from exc

    used = []
    for node in _walk_calls(tree):
        if node.name not in FUNCTIONS:
            raise ExpressionError(text, node.loc, f"unknown function '{node.name}'")
    for node in tree.names():
        if node.name in CONSTANTS:
            continue
        if node.name not in variables:
            raise ExpressionError(text, node.loc, f"unknown name '{node.name}'")
        if node.name not in used:
            used.append(node.name)
    return Expression(text, tuple(used), tree)


def _walk_calls(node):
    if isinstance(node, _Call):
        yield node
        yield from _walk_calls(node.argument)
    elif isinstance(node, _Negate):
        yield from _walk_calls(node.operand)
    elif isinstance(node, _Binary):
        yield from _walk_calls(node.left)
        yield from _walk_calls(node.right)
