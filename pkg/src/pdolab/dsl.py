"""Tiny expression language for symbols a(x, xi).

Grammar (whitespace-insensitive):

    expr   := '-'? term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := atom ('^' signed-number)?
    atom   := number | 'x' | 'xi' | name '(' expr (',' expr)* ')' | '(' expr ')'

'^' binds tighter than '*' and its exponent must be a literal number; unary
minus is parsed as 0 - e.  Numbers are decimal literals with an optional
exponent.  The callable names and their arities:

    sin, cos, exp, abs, jb, phi0, chi : 1 argument
    weier(r, e)                       : Weierstrass series with exponent r
    psi(j, e)                         : dyadic block j of the partition

jb(e) is the bracket sqrt(1 + e^2); phi0 is the base cutoff (1 on [-1,1],
0 outside [-2,2]); chi is the same bump under its conventional name.
Parse failures report the 0-based byte offset of the first invalid token.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .grid import PeriodicGrid
from .lp import LPPartition, PROFILES, make_partition
from .symbols import SampledSymbol, SEMINORM_DEPTH

__all__ = [
    "Number",
    "Var",
    "Binary",
    "Call",
    "DslError",
    "ParseError",
    "ArityError",
    "UnknownName",
    "DomainError",
    "parse",
    "render",
    "evaluate",
    "evaluate_x_profile",
    "FUNCTIONS",
]


class DslError(ValueError):
    """Base class for expression-language failures."""


class ParseError(DslError):
    def __init__(self, offset: int, expected: str):
        self.offset = offset
        self.expected = expected
        super().__init__(f"parse error at offset {offset}: expected {expected}")


class ArityError(DslError):
    def __init__(self, name: str, got: int, want: int):
        self.name, self.got, self.want = name, got, want
        super().__init__(f"{name} takes {want} argument(s), got {got}")


class UnknownName(DslError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"unknown name {name!r}")


class DomainError(DslError):
    """Evaluation failure at a specific lattice point."""


FUNCTIONS = {
    "sin": 1,
    "cos": 1,
    "exp": 1,
    "abs": 1,
    "jb": 1,
    "phi0": 1,
    "chi": 1,
    "weier": 2,
    "psi": 2,
}


@dataclass(frozen=True)
class Number:
    value: float


@dataclass(frozen=True)
class Var:
    name: str  # 'x' or 'xi'


@dataclass(frozen=True)
class Binary:
    op: str  # one of + - * / ^
    left: object
    right: object


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple


_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<sym>[-+*/^(),]))"
)


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None or m.end() == pos:
            # pure trailing whitespace is fine
            if text[pos:].strip() == "":
                break
            bad = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise ParseError(bad, "a token")
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def match_sym(self, sym: str) -> bool:
        kind, text, _ = self.peek()
        if kind == "sym" and text == sym:
            self.advance()
            return True
        return False

    def expect_sym(self, sym: str):
        kind, text, off = self.peek()
        if kind == "sym" and text == sym:
            self.advance()
            return
        raise ParseError(off, f"'{sym}'")

    def parse_expr(self):
        if self.match_sym("-"):
            node = Binary("-", Number(0.0), self.parse_term())
        else:
            node = self.parse_term()
        while True:
            kind, text, _ = self.peek()
            if kind == "sym" and text in "+-":
                self.advance()
                node = Binary(text, node, self.parse_term())
            else:
                return node

    def parse_term(self):
        node = self.parse_factor()
        while True:
            kind, text, _ = self.peek()
            if kind == "sym" and text in "*/":
                self.advance()
                node = Binary(text, node, self.parse_factor())
            else:
                return node

    def parse_factor(self):
        node = self.parse_atom()
        if self.match_sym("^"):
            sign = 1.0
            if self.match_sym("-"):
                sign = -1.0
            elif self.match_sym("+"):
                pass
            kind, text, off = self.peek()
            if kind != "num":
                raise ParseError(off, "a number exponent")
            self.advance()
            node = Binary("^", node, Number(sign * float(text)))
        return node

    def parse_atom(self):
        kind, text, off = self.advance()
        if kind == "num":
            return Number(float(text))
        if kind == "name":
            if text in ("x", "xi"):
                return Var(text)
            if text not in FUNCTIONS:
                raise UnknownName(text)
            kind2, text2, off2 = self.peek()
            if not (kind2 == "sym" and text2 == "("):
                raise ParseError(off2, "'('")
            self.advance()
            args = [self.parse_expr()]
            while self.match_sym(","):
                args.append(self.parse_expr())
            self.expect_sym(")")
            want = FUNCTIONS[text]
            if len(args) != want:
                raise ArityError(text, len(args), want)
            return Call(text, tuple(args))
        if kind == "sym" and text == "(":
            node = self.parse_expr()
            self.expect_sym(")")
            return node
        raise ParseError(off, "a number, variable, call, or '('")


def parse(text: str):
    """Parse an expression to its AST; errors carry 0-based byte offsets."""
    parser = _Parser(_tokenize(text))
    node = parser.parse_expr()
    kind, _, off = parser.peek()
    if kind != "end":
        raise ParseError(off, "end of input")
    return node


def render(node) -> str:
    """Canonical pretty-printer; parse(render(t)) == t for parser output."""
    if isinstance(node, Number):
        return repr(node.value)
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Binary):
        return f"({render(node.left)} {node.op} {render(node.right)})"
    if isinstance(node, Call):
        return f"{node.name}({', '.join(render(a) for a in node.args)})"
    raise TypeError(f"not an AST node: {node!r}")


def _require_real(arr: np.ndarray, what: str) -> np.ndarray:
    arr = np.asarray(arr)
    if np.iscomplexobj(arr):
        if np.max(np.abs(arr.imag)) > 1e-12 * max(1.0, np.max(np.abs(arr.real))):
            raise DomainError(f"{what} requires a real argument")
        arr = arr.real
    return arr


def _literal(node, what: str) -> float:
    if isinstance(node, Number):
        return node.value
    if isinstance(node, Binary) and node.op == "-" and node.left == Number(0.0) and isinstance(node.right, Number):
        return -node.right.value
    raise DslError(f"{what} must be a literal number")


class _Evaluator:
    """Evaluates an AST on the grid x lattice product, by broadcasting."""

    def __init__(self, grid: PeriodicGrid, partition: LPPartition):
        self.grid = grid
        self.partition = partition
        self.x = grid.points.reshape(-1, 1).astype(np.complex128)
        self.xi = grid.freqs.reshape(1, -1).astype(np.complex128)

    def run(self, node) -> np.ndarray:
        out = self.eval(node)
        return np.broadcast_to(np.asarray(out, dtype=np.complex128), (self.grid.n, self.grid.n))

    def _zero_site(self, mask: np.ndarray) -> tuple:
        mask = np.broadcast_to(mask, (self.grid.n, self.grid.n))
        j, i = np.argwhere(mask)[0]
        return float(self.grid.points[j]), int(self.grid.freqs[i])

    def eval(self, node):
        if isinstance(node, Number):
            return np.complex128(node.value)
        if isinstance(node, Var):
            return self.x if node.name == "x" else self.xi
        if isinstance(node, Binary):
            if node.op == "^":
                base = np.asarray(self.eval(node.left))
                power = node.right.value
                if power < 0 and np.any(base == 0):
                    xj, k = self._zero_site(np.asarray(base) == 0)
                    raise DomainError(
                        f"zero base with negative exponent at (x = {xj:.6g}, k = {k})"
                    )
                return np.power(base, power)
            left = self.eval(node.left)
            right = self.eval(node.right)
            if node.op == "+":
                return left + right
            if node.op == "-":
                return left - right
            if node.op == "*":
                return left * right
            if node.op == "/":
                right = np.asarray(right)
                if np.any(right == 0):
                    xj, k = self._zero_site(right == 0)
                    raise DomainError(f"division by zero at (x = {xj:.6g}, k = {k})")
                return left / right
            raise DslError(f"unknown operator {node.op!r}")
        if isinstance(node, Call):
            return self.call(node)
        raise TypeError(f"not an AST node: {node!r}")

    def call(self, node: Call):
        name = node.name
        if name in ("sin", "cos", "exp"):
            return getattr(np, name)(self.eval(node.args[0]))
        if name == "abs":
            return np.abs(self.eval(node.args[0])).astype(np.complex128)
        if name == "jb":
            e = self.eval(node.args[0])
            return np.sqrt(1.0 + e * e)
        if name in ("phi0", "chi"):
            e = _require_real(self.eval(node.args[0]), name)
            return self.partition.profile(e).astype(np.complex128)
        if name == "psi":
            level = _literal(node.args[0], "psi level")
            j = int(level)
            if j != level or not 0 <= j <= self.partition.levels:
                raise DslError(
                    f"psi level must be an integer in [0, {self.partition.levels}], got {level!r}"
                )
            e = _require_real(self.eval(node.args[1]), "psi")
            return self.partition.block_profile(j, e).astype(np.complex128)
        if name == "weier":
            r = _literal(node.args[0], "weier exponent")
            if not 0.0 < r < 4.0:
                raise DslError(f"weier exponent must lie in (0, 4), got {r!r}")
            e = self.eval(node.args[1])
            total = np.zeros(np.broadcast(e, np.empty((1, 1))).shape, dtype=np.complex128)
            for j in range(self.grid.top_level + 1):
                total = total + 2.0 ** (-j * r) * np.cos((2 ** j) * e)
            return total
        raise UnknownName(name)


def evaluate(
    expr,
    grid: PeriodicGrid,
    declared_m: float = 0.0,
    partition: LPPartition | None = None,
    declared_regularity: float | None = None,
) -> SampledSymbol:
    """Sample an AST (or source text) as a symbol on grid x lattice."""
    if isinstance(expr, str):
        expr = parse(expr)
    if partition is None:
        partition = make_partition(grid)
    values = _Evaluator(grid, partition).run(expr)
    return SampledSymbol.from_values(
        grid,
        values,
        order=declared_m,
        declared_regularity=declared_regularity,
        provenance=("dsl", render(expr)),
    )


def evaluate_x_profile(text: str, grid: PeriodicGrid) -> np.ndarray:
    """Evaluate an x-only expression to N samples; rejects uses of xi."""
    node = parse(text)

    def uses_xi(n) -> bool:
        if isinstance(n, Var):
            return n.name == "xi"
        if isinstance(n, Binary):
            return uses_xi(n.left) or uses_xi(n.right)
        if isinstance(n, Call):
            return any(uses_xi(a) for a in n.args)
        return False

    if uses_xi(node):
        raise DslError("expression for a multiplication symbol must not use xi")
    partition = make_partition(grid)
    values = _Evaluator(grid, partition).run(node)
    return values[:, 0]
