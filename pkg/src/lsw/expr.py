"""Parser and evaluator for a small operator-expression language.

Grammar (whitespace insensitive)::

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '⊗' | 'kron') factor)*
    factor := atom '†'*
    atom   := complex-literal | name | '(' expr ')'

Complex literals are single tokens: ``a``, ``bi`` or ``a+bi`` with decimal
or exponent notation (``2``, ``0.5i``, ``1.5-2e-3i``).  ``*`` is the matrix
product, ``kron``/``⊗`` the tensor product (left factor slowest), ``†`` the
adjoint and binds tightest.  Scalars multiply operators but cannot be added
to them.
"""

import re
from dataclasses import dataclass

import numpy as np

from .exceptions import DimensionMismatchError, ExprSyntaxError, UnknownSymbolError
from .operators import tensor

_NUM = r"(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?"
_COMPLEX_RE = re.compile(rf"(?P<re>{_NUM})(?:(?P<im>[+-]{_NUM})i|(?P<only>i))?")
_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")
_WS_RE = re.compile(r"\s+")


@dataclass(frozen=True)
class Literal:
    value: complex


@dataclass(frozen=True)
class Symbol:
    name: str
    position: int = 0


@dataclass(frozen=True)
class BinOp:
    op: str  # '+', '-', '*', 'kron'
    lhs: object
    rhs: object
    position: int = 0


@dataclass(frozen=True)
class Dagger:
    child: object


def _tokenize(text):
    tokens = []
    pos = 0
    while pos < len(text):
        ws = _WS_RE.match(text, pos)
        if ws:
            pos = ws.end()
            continue
        ch = text[pos]
        m = _COMPLEX_RE.match(text, pos)
        if m:
            real = float(m.group("re"))
            if m.group("im") is not None:
                value = complex(real, float(m.group("im")))
            elif m.group("only") is not None:
                value = complex(0.0, real)
            else:
                value = complex(real)
            tokens.append(("lit", value, pos))
            pos = m.end()
            continue
        nm = _NAME_RE.match(text, pos)
        if nm:
            word = nm.group(0)
            tokens.append(("kron" if word == "kron" else "name", word, pos))
            pos = nm.end()
            continue
        if ch in "+-*()":
            tokens.append((ch, ch, pos))
            pos += 1
            continue
        if ch == "⊗":
            tokens.append(("kron", ch, pos))
            pos += 1
            continue
        if ch == "†":
            tokens.append(("dag", ch, pos))
            pos += 1
            continue
        raise ExprSyntaxError(f"unexpected character {ch!r}", pos)
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.index = 0

    def peek(self):
        return self.tokens[self.index]

    def advance(self):
        tok = self.tokens[self.index]
        self.index += 1
        return tok

    def expect(self, kind):
        tok = self.advance()
        if tok[0] != kind:
            raise ExprSyntaxError(f"expected {kind!r}, found {tok[1]!r}", tok[2])
        return tok

    def parse_expr(self):
        node = self.parse_term()
        while self.peek()[0] in ("+", "-"):
            op, _, pos = self.advance()
            node = BinOp(op, node, self.parse_term(), pos)
        return node

    def parse_term(self):
        node = self.parse_factor()
        while self.peek()[0] in ("*", "kron"):
            kind, _, pos = self.advance()
            op = "*" if kind == "*" else "kron"
            node = BinOp(op, node, self.parse_factor(), pos)
        return node

    def parse_factor(self):
        node = self.parse_atom()
        while self.peek()[0] == "dag":
            self.advance()
            node = Dagger(node)
        return node

    def parse_atom(self):
        kind, value, pos = self.advance()
        if kind == "lit":
            return Literal(value)
        if kind == "name":
            return Symbol(value, pos)
        if kind == "(":
            node = self.parse_expr()
            self.expect(")")
            return node
        raise ExprSyntaxError(f"unexpected token {value!r}", pos)


def parse(text):
    """Parse an expression into its syntax tree."""
    parser = _Parser(_tokenize(text))
    node = parser.parse_expr()
    tok = parser.peek()
    if tok[0] != "end":
        raise ExprSyntaxError(f"trailing input {tok[1]!r}", tok[2])
    return node


def evaluate(node, symbols):
    """Evaluate a syntax tree to a complex scalar or an operator matrix."""
    if isinstance(node, Literal):
        return node.value
    if isinstance(node, Symbol):
        if node.name not in symbols:
            raise UnknownSymbolError(node.name, node.position)
        return np.asarray(symbols[node.name], dtype=complex)
    if isinstance(node, Dagger):
        value = evaluate(node.child, symbols)
        return np.conj(value) if np.isscalar(value) else value.conj().T
    lhs = evaluate(node.lhs, symbols)
    rhs = evaluate(node.rhs, symbols)
    lscalar, rscalar = np.isscalar(lhs), np.isscalar(rhs)
    if node.op in ("+", "-"):
        if lscalar != rscalar:
            raise DimensionMismatchError(
                f"cannot add a scalar and an operator (position {node.position})"
            )
        if not lscalar and lhs.shape != rhs.shape:
            raise DimensionMismatchError(
                f"sum of operators with dimensions {lhs.shape[0]} and "
                f"{rhs.shape[0]} (position {node.position})"
            )
        return lhs + rhs if node.op == "+" else lhs - rhs
    if node.op == "*":
        if lscalar or rscalar:
            return lhs * rhs
        if lhs.shape[1] != rhs.shape[0]:
            raise DimensionMismatchError(
                f"product of operators with dimensions {lhs.shape[0]} and "
                f"{rhs.shape[0]} (position {node.position})"
            )
        return lhs @ rhs
    if node.op == "kron":
        if lscalar or rscalar:
            return lhs * rhs
        return tensor(lhs, rhs)
    raise AssertionError(f"unknown operator {node.op!r}")


def parse_operator_expr(text, symbols):
    """Parse and evaluate; the result must be an operator, not a bare scalar."""
    value = evaluate(parse(text), symbols)
    if np.isscalar(value):
        raise DimensionMismatchError("expression evaluates to a scalar, not an operator")
    return value


def _format_number(x):
    out = repr(float(x))
    return out[:-2] if out.endswith(".0") else out


def _format_literal(value):
    re_, im = value.real, value.imag
    if im == 0:
        return _format_number(re_)
    if re_ == 0:
        return f"{_format_number(im)}i"
    sign = "+" if im >= 0 else "-"
    return f"{_format_number(re_)}{sign}{_format_number(abs(im))}i"


_PRECEDENCE = {"+": 1, "-": 1, "*": 2, "kron": 2}


def pretty(node, parent_level=0):
    """Render a tree back to parseable text; re-parsing yields the same matrix."""
    if isinstance(node, Literal):
        return _format_literal(node.value)
    if isinstance(node, Symbol):
        return node.name
    if isinstance(node, Dagger):
        inner = pretty(node.child, parent_level=3)
        return f"{inner}†"
    level = _PRECEDENCE[node.op]
    lhs = pretty(node.lhs, parent_level=level - 1)
    # right child needs parens at equal precedence: '-' and '*' associate left
    rhs = pretty(node.rhs, parent_level=level)
    op = {"+": " + ", "-": " - ", "*": "*", "kron": " kron "}[node.op]
    text = f"{lhs}{op}{rhs}"
    if level <= parent_level:
        return f"({text})"
    return text
