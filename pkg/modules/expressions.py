"""
Parsing of command-line numbers and lists.

Real parameters are arithmetic expressions such as "(1+sqrt(5))/2" or "2^(1/3)", evaluated
with mpmath at the working precision so points like the golden ratio survive long flows.
"""

import ast
import operator
from collections.abc import Callable
from fractions import Fraction

import mpmath
import numpy as np

from .lattice_reduction import working_precision

_BINARY: dict[type, Callable] = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Pow: operator.pow,
}

_FUNCTIONS: dict[str, Callable] = {
    "sqrt": mpmath.sqrt,
    "cbrt": mpmath.cbrt,
    "exp": mpmath.exp,
    "log": mpmath.log,
    "sin": mpmath.sin,
    "cos": mpmath.cos,
    "root": mpmath.root,
}

_CONSTANTS: dict[str, Callable[[], mpmath.mpf]] = {
    "pi": lambda: +mpmath.pi,
    "e": lambda: +mpmath.e,
}


def _evaluate(node: ast.AST, text: str) -> mpmath.mpf:
    match node:
        case ast.Expression(body=body):
            return _evaluate(body, text)
        case ast.Constant(value=value) if isinstance(value, int | float) and not isinstance(value, bool):
            # str() keeps "0.1" exact up to the working precision
            return mpmath.mpf(str(value))
        case ast.UnaryOp(op=ast.USub(), operand=operand):
            return -_evaluate(operand, text)
        case ast.UnaryOp(op=ast.UAdd(), operand=operand):
            return _evaluate(operand, text)
        case ast.BinOp(left=left, op=op, right=right) if type(op) in _BINARY:
            return _BINARY[type(op)](_evaluate(left, text), _evaluate(right, text))
        case ast.Name(id=name) if name in _CONSTANTS:
            return _CONSTANTS[name]()
        case ast.Call(func=ast.Name(id=name), args=args, keywords=[]) if name in _FUNCTIONS:
            return _FUNCTIONS[name](*(_evaluate(a, text) for a in args))

    msg = f"Unsupported element in expression {text!r}: {ast.dump(node)[:40]}"
    raise ValueError(msg)


def evaluate_real(text: str) -> mpmath.mpf:
    """A real number from an arithmetic expression. '^' is accepted for powers."""

    source = text.strip().replace("^", "**")
    if not source:
        msg = "Empty number."
        raise ValueError(msg)
    try:
        tree = ast.parse(source, mode="eval")
    except SyntaxError as e:
        msg = f"Cannot parse number {text!r}."
        raise ValueError(msg) from e

    with mpmath.workdps(working_precision()):
        try:
            value = _evaluate(tree, text)
        except ZeroDivisionError as e:
            msg = f"Division by zero in {text!r}."
            raise ValueError(msg) from e
        if not isinstance(value, mpmath.mpf):
            msg = f"{text!r} is not a real number."
            raise ValueError(msg)
        return value


def parse_comma_separated(text: str) -> list[str]:
    """Split on commas outside parentheses, so "root(2,3),sqrt(5)" has two items."""

    items: list[str] = []
    depth, start = 0, 0
    for i, char in enumerate(text):
        if char == "(":
            depth += 1
        elif char == ")":
            depth -= 1
        elif char == "," and depth == 0:
            items.append(text[start:i])
            start = i + 1
    items.append(text[start:])
    return [item.strip() for item in items if item.strip()]


def parse_real_list(text: str) -> list[mpmath.mpf]:
    return [evaluate_real(item) for item in parse_comma_separated(text)]


def parse_int_list(text: str) -> list[int]:
    try:
        return [int(item) for item in parse_comma_separated(text)]
    except ValueError as e:
        msg = f"Expected comma separated integers, got {text!r}."
        raise ValueError(msg) from e


def parse_fraction_list(text: str) -> list[Fraction]:
    try:
        return [Fraction(item) for item in parse_comma_separated(text)]
    except (ValueError, ZeroDivisionError) as e:
        msg = f"Expected comma separated rationals, got {text!r}."
        raise ValueError(msg) from e


def parse_matrix(text: str) -> list[list[mpmath.mpf | Fraction]]:
    """Rows separated by ';', entries by ','. Rational entries stay exact."""

    rows = []
    for row_text in text.split(";"):
        row: list[mpmath.mpf | Fraction] = []
        for item in parse_comma_separated(row_text):
            try:
                row.append(Fraction(item))
            except (ValueError, ZeroDivisionError):
                row.append(evaluate_real(item))
        rows.append(row)
    return rows


def parse_grid(text: str) -> list[float]:
    """Either "start:stop:count" for an evenly spaced grid, or a comma separated list."""

    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:  # noqa: PLR2004
            msg = f"A grid range is start:stop:count, got {text!r}."
            raise ValueError(msg)
        start, stop = float(evaluate_real(parts[0])), float(evaluate_real(parts[1]))
        count = int(parts[2])
        if count < 1:
            msg = "A grid needs at least one point."
            raise ValueError(msg)
        return np.linspace(start, stop, count).tolist()

    values = [float(v) for v in parse_real_list(text)]
    if not values:
        msg = "A grid needs at least one point."
        raise ValueError(msg)
    return values
