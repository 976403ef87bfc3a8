"""Exact rational-expression trees with hash-consing.

Expressions are immutable nodes over arbitrary-precision rationals and named
symbols, closed under +, -, *, / and integer powers.  Every node is interned,
so structurally equal expressions are literally the same object: `is`
comparison, per-node caches and substitution pruning all come for free.

The symbol universe is closed: q, nu1..nu8, kappa1, kappa2, f, g, z, u,
delta, c, s, plus any names a caller declares explicitly when parsing.
The names pi1, pi2, pi are reserved for Weyl words and never appear inside
expressions.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Mapping

RESERVED_SYMBOLS: tuple[str, ...] = (
    "q",
    "nu1", "nu2", "nu3", "nu4", "nu5", "nu6", "nu7", "nu8",
    "kappa1", "kappa2",
    "f", "g", "z", "u",
    "delta", "c", "s",
)

PARAM_SYMBOLS: tuple[str, ...] = (
    "q",
    "nu1", "nu2", "nu3", "nu4", "nu5", "nu6", "nu7", "nu8",
    "kappa1", "kappa2",
)

#: Parameters plus the dependent pair (f, g): the symbols a family
#: transformation may move.
ACTION_SYMBOLS: tuple[str, ...] = PARAM_SYMBOLS + ("f", "g")


class ExprError(ValueError):
    """Malformed expression construction (e.g. a syntactically zero denominator)."""


class ExprSyntaxError(ExprError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class UnknownSymbolError(ExprError):
    def __init__(self, name: str, offset: int):
        super().__init__(f"unknown symbol '{name}' at offset {offset}")
        self.name = name
        self.offset = offset


class DivisionByZero(ArithmeticError):
    """Evaluation hit a zero denominator; carries the offending subexpression."""

    def __init__(self, node: "Expr"):
        super().__init__(f"division by zero in {node}")
        self.node = node


class Expr:
    """One interned expression node.  Construct only via the factory functions."""

    __slots__ = ("kind", "value", "name", "children", "exp", "free", "uid")

    def __init__(self, kind, value=None, name=None, children=(), exp=0):
        self.kind = kind
        self.value = value          # Fraction, for 'num'
        self.name = name            # str, for 'sym'
        self.children = children    # tuple[Expr, ...]
        self.exp = exp              # int, for 'pow'
        if kind == "num":
            self.free = frozenset()
        elif kind == "sym":
            self.free = frozenset((name,))
        else:
            fs: frozenset[str] = frozenset()
            for ch in children:
                fs = fs | ch.free
            self.free = fs
        self.uid = 0                # assigned by the intern table

    def __repr__(self):
        return f"Expr({to_string(self)})"

    def __str__(self):
        return to_string(self)


_INTERN: dict[tuple, Expr] = {}
_NEXT_UID = 1


def _intern(key: tuple, build) -> Expr:
    global _NEXT_UID
    node = _INTERN.get(key)
    if node is None:
        node = build()
        node.uid = _NEXT_UID
        _NEXT_UID += 1
        _INTERN[key] = node
    return node


def num(value) -> Expr:
    v = value if isinstance(value, Fraction) else Fraction(value)
    return _intern(("num", v), lambda: Expr("num", value=v))


def sym(name: str) -> Expr:
    return _intern(("sym", name), lambda: Expr("sym", name=name))


ZERO = num(0)
ONE = num(1)
MINUS_ONE = num(-1)


def add(*terms: Expr) -> Expr:
    flat: list[Expr] = []
    const = Fraction(0)
    for t in terms:
        if t.kind == "add":
            for ch in t.children:
                if ch.kind == "num":
                    const += ch.value
                else:
                    flat.append(ch)
        elif t.kind == "num":
            const += t.value
        else:
            flat.append(t)
    if const != 0:
        flat.append(num(const))
    if not flat:
        return ZERO
    if len(flat) == 1:
        return flat[0]
    key = ("add",) + tuple(ch.uid for ch in flat)
    children = tuple(flat)
    return _intern(key, lambda: Expr("add", children=children))


def mul(*factors: Expr) -> Expr:
    flat: list[Expr] = []
    const = Fraction(1)
    for fct in factors:
        if fct.kind == "mul":
            for ch in fct.children:
                if ch.kind == "num":
                    const *= ch.value
                else:
                    flat.append(ch)
        elif fct.kind == "num":
            const *= fct.value
        else:
            flat.append(fct)
    if const == 0:
        return ZERO
    if const != 1:
        flat.insert(0, num(const))
    if not flat:
        return ONE
    if len(flat) == 1:
        return flat[0]
    key = ("mul",) + tuple(ch.uid for ch in flat)
    children = tuple(flat)
    return _intern(key, lambda: Expr("mul", children=children))


def pow_(base: Expr, exponent: int) -> Expr:
    if not isinstance(exponent, int):
        raise ExprError("exponent must be an integer")
    if exponent == 0:
        return ONE
    if exponent == 1:
        return base
    if base.kind == "num":
        if base.value == 0 and exponent < 0:
            raise ExprError("zero base with negative exponent")
        return num(base.value ** exponent)
    if base.kind == "pow":
        return pow_(base.children[0], base.exp * exponent)
    key = ("pow", base.uid, exponent)
    return _intern(key, lambda: Expr("pow", children=(base,), exp=exponent))


def div(numer: Expr, denom: Expr) -> Expr:
    if denom.kind == "num":
        # Fold constant denominators into a product; keeps every remaining
        # quotient node's denominator symbolic.
        if denom.value == 0:
            raise ExprError("syntactically zero denominator")
        return mul(num(1 / denom.value), numer)
    # Flatten nested quotients so inverses collapse: 1/(1/x) is x.
    if denom.kind == "div":
        return div(mul(numer, denom.children[1]), denom.children[0])
    if numer.kind == "div":
        return div(numer.children[0], mul(numer.children[1], denom))
    if numer is ZERO:
        return ZERO
    if numer.kind == "num" and numer.value < 0:
        return mul(MINUS_ONE, div(num(-numer.value), denom))
    key = ("div", numer.uid, denom.uid)
    children = (numer, denom)
    return _intern(key, lambda: Expr("div", children=children))


def neg(e: Expr) -> Expr:
    return mul(MINUS_ONE, e)


def sub(a: Expr, b: Expr) -> Expr:
    return add(a, neg(b))


def inv(e: Expr) -> Expr:
    return div(ONE, e)


def dag_size(e: Expr) -> int:
    """Number of distinct nodes reachable from e."""
    seen: set[Expr] = set()
    stack = [e]
    while stack:
        node = stack.pop()
        if node in seen:
            continue
        seen.add(node)
        stack.extend(node.children)
    return len(seen)


# ---------------------------------------------------------------------------
# substitution

def substitute(e: Expr, images: Mapping[str, Expr], memo: dict | None = None) -> Expr:
    """Replace every symbol occurrence simultaneously by its image.

    Symbols absent from `images` map to themselves.  Substitution rebuilds
    through the factory functions, so it is a ring homomorphism by
    construction.  Nodes whose free symbols are disjoint from the mapping are
    returned unchanged (shared).
    """
    if memo is None:
        memo = {}
    keys = images.keys()
    stack = [e]
    while stack:
        node = stack[-1]
        if node in memo:
            stack.pop()
            continue
        if not (node.free & keys):
            memo[node] = node
            stack.pop()
            continue
        if node.kind == "sym":
            memo[node] = images.get(node.name, node)
            stack.pop()
            continue
        pending = [ch for ch in node.children if ch not in memo]
        if pending:
            stack.extend(pending)
            continue
        stack.pop()
        kids = [memo[ch] for ch in node.children]
        if node.kind == "add":
            memo[node] = add(*kids)
        elif node.kind == "mul":
            memo[node] = mul(*kids)
        elif node.kind == "pow":
            memo[node] = pow_(kids[0], node.exp)
        elif node.kind == "div":
            memo[node] = div(kids[0], kids[1])
        else:
            memo[node] = node
    return memo[e]


# ---------------------------------------------------------------------------
# evaluation

def _mod_inverse(a: int, p: int, node: Expr) -> int:
    a %= p
    if a == 0:
        raise DivisionByZero(node)
    return pow(a, p - 2, p)


def evaluate(e: Expr, values: Mapping[str, object], p: int | None = None):
    """Evaluate over the exact rationals (p=None) or the prime field F_p.

    `values` must cover every free symbol of e.  Raises DivisionByZero with
    the offending subexpression when a denominator vanishes; the caller is
    expected to resample.
    """
    memo: dict[Expr, object] = {}
    stack = [e]
    while stack:
        node = stack[-1]
        if node in memo:
            stack.pop()
            continue
        kind = node.kind
        if kind == "num":
            if p is None:
                memo[node] = node.value
            else:
                den = node.value.denominator % p
                memo[node] = node.value.numerator % p * _mod_inverse(den, p, node) % p
            stack.pop()
            continue
        if kind == "sym":
            try:
                v = values[node.name]
            except KeyError:
                raise ExprError(f"no value for symbol '{node.name}'") from None
            memo[node] = v % p if p is not None else Fraction(v)
            stack.pop()
            continue
        pending = [ch for ch in node.children if ch not in memo]
        if pending:
            stack.extend(pending)
            continue
        stack.pop()
        kids = [memo[ch] for ch in node.children]
        if kind == "add":
            if p is None:
                memo[node] = sum(kids, Fraction(0))
            else:
                acc = 0
                for v in kids:
                    acc = (acc + v) % p
                memo[node] = acc
        elif kind == "mul":
            if p is None:
                acc = Fraction(1)
                for v in kids:
                    acc *= v
                memo[node] = acc
            else:
                acc = 1
                for v in kids:
                    acc = acc * v % p
                memo[node] = acc
        elif kind == "pow":
            base = kids[0]
            n = node.exp
            if p is None:
                if base == 0 and n < 0:
                    raise DivisionByZero(node)
                memo[node] = base ** n
            else:
                if n < 0:
                    base = _mod_inverse(base, p, node)
                    n = -n
                memo[node] = pow(base, n, p)
        elif kind == "div":
            if p is None:
                if kids[1] == 0:
                    raise DivisionByZero(node)
                memo[node] = kids[0] / kids[1]
            else:
                memo[node] = kids[0] * _mod_inverse(kids[1], p, node) % p
    return memo[e]


# ---------------------------------------------------------------------------
# printing

def to_string(e: Expr) -> str:
    if e.kind == "num":
        return str(e.value)
    if e.kind == "sym":
        return e.name
    if e.kind == "add":
        parts: list[str] = []
        for i, ch in enumerate(e.children):
            s = to_string(ch)
            if i == 0:
                parts.append(s)
            elif s.startswith("-"):
                parts.append(" - " + s[1:])
            else:
                parts.append(" + " + s)
        return "".join(parts)
    if e.kind == "mul":
        children = e.children
        lead = ""
        if children[0].kind == "num" and children[0].value == -1 and len(children) > 1:
            lead = "-"
            children = children[1:]
        parts = []
        for i, ch in enumerate(children):
            s = to_string(ch)
            # A quotient after the first slot must be wrapped: * and / are
            # left-associative, so a*b/c reparses as (a*b)/c.
            if ch.kind == "add" or (ch.kind == "div" and i > 0):
                s = "(" + s + ")"
            parts.append(s)
        return lead + "*".join(parts)
    if e.kind == "pow":
        base = e.children[0]
        s = to_string(base)
        if base.kind != "sym":
            s = "(" + s + ")"
        return f"{s}^{e.exp}"
    if e.kind == "div":
        n, d = e.children
        ns = to_string(n)
        if n.kind in ("add", "mul", "div"):
            ns = "(" + ns + ")"
        ds = to_string(d)
        if d.kind in ("add", "mul", "div"):
            ds = "(" + ds + ")"
        return f"{ns}/{ds}"
    raise ExprError(f"unprintable node kind {e.kind}")


_LATEX_SYMBOLS = {
    "kappa1": r"\kappa_{1}", "kappa2": r"\kappa_{2}", "delta": r"\delta",
    "fbar": r"\overline{f}", "gbar": r"\overline{g}",
}
for _i in range(1, 9):
    _LATEX_SYMBOLS[f"nu{_i}"] = r"\nu_{%d}" % _i


def to_latex(e: Expr) -> str:
    if e.kind == "num":
        v = e.value
        if v.denominator == 1:
            return str(v.numerator)
        s = r"\frac{%d}{%d}" % (abs(v.numerator), v.denominator)
        return "-" + s if v < 0 else s
    if e.kind == "sym":
        return _LATEX_SYMBOLS.get(e.name, e.name)
    if e.kind == "add":
        parts = []
        for i, ch in enumerate(e.children):
            s = to_latex(ch)
            if i == 0:
                parts.append(s)
            elif s.startswith("-"):
                parts.append(" - " + s[1:])
            else:
                parts.append(" + " + s)
        return "".join(parts)
    if e.kind == "mul":
        parts = []
        for ch in e.children:
            s = to_latex(ch)
            if ch.kind == "add":
                s = r"\left(" + s + r"\right)"
            parts.append(s)
        return r" \cdot ".join(parts)
    if e.kind == "pow":
        base = e.children[0]
        s = to_latex(base)
        if base.kind != "sym":
            s = r"\left(" + s + r"\right)"
        return "{%s}^{%d}" % (s, e.exp)
    if e.kind == "div":
        n, d = e.children
        return r"\frac{%s}{%s}" % (to_latex(n), to_latex(d))
    raise ExprError(f"unprintable node kind {e.kind}")


# ---------------------------------------------------------------------------
# parsing
#
# Grammar: integers, rationals p/q, symbols, + - * / ^ and parentheses.
# ^ takes an integer literal exponent (optionally negated).

_TOKEN_RE = re.compile(
    r"(?P<INT>\d+)|(?P<NAME>[A-Za-z_][A-Za-z0-9_]*)|(?P<OP>[-+*/^()])|(?P<WS>\s+)"
)


def _tokenize(text: str):
    pos = 0
    tokens: list[tuple[str, str, int]] = []
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ExprSyntaxError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        if kind != "WS":
            tokens.append((kind, m.group(), pos))
        pos = m.end()
    tokens.append(("END", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, tokens, allowed: frozenset[str]):
        self.tokens = tokens
        self.i = 0
        self.allowed = allowed

    def peek(self):
        return self.tokens[self.i]

    def next(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op: str):
        kind, text, pos = self.next()
        if kind != "OP" or text != op:
            raise ExprSyntaxError(f"expected '{op}'", pos)

    def parse_expr(self) -> Expr:
        kind, text, _ = self.peek()
        negated = False
        if kind == "OP" and text == "-":
            self.next()
            negated = True
        elif kind == "OP" and text == "+":
            self.next()
        e = self.parse_term()
        if negated:
            e = neg(e)
        while True:
            kind, text, _ = self.peek()
            if kind == "OP" and text in "+-":
                self.next()
                rhs = self.parse_term()
                e = add(e, rhs if text == "+" else neg(rhs))
            else:
                return e

    def parse_term(self) -> Expr:
        e = self.parse_factor()
        while True:
            kind, text, _ = self.peek()
            if kind == "OP" and text in "*/":
                self.next()
                rhs = self.parse_factor()
                e = mul(e, rhs) if text == "*" else div(e, rhs)
            else:
                return e

    def parse_factor(self) -> Expr:
        e = self.parse_atom()
        kind, text, _ = self.peek()
        if kind == "OP" and text == "^":
            self.next()
            e = pow_(e, self.parse_int_literal())
        return e

    def parse_int_literal(self) -> int:
        kind, text, pos = self.next()
        signum = 1
        if kind == "OP" and text == "-":
            signum = -1
            kind, text, pos = self.next()
        if kind != "INT":
            raise ExprSyntaxError("expected integer exponent", pos)
        return signum * int(text)

    def parse_atom(self) -> Expr:
        kind, text, pos = self.next()
        if kind == "INT":
            return num(int(text))
        if kind == "NAME":
            if text not in self.allowed:
                raise UnknownSymbolError(text, pos)
            return sym(text)
        if kind == "OP" and text == "(":
            e = self.parse_expr()
            self.expect_op(")")
            return e
        if kind == "OP" and text == "-":
            return neg(self.parse_atom())
        raise ExprSyntaxError(f"unexpected token {text!r}", pos)


def parse(text: str, extra_symbols: Iterable[str] = ()) -> Expr:
    """Parse an expression string.

    Only the reserved symbol set plus `extra_symbols` is accepted; anything
    else raises UnknownSymbolError with the offending name.
    """
    allowed = frozenset(RESERVED_SYMBOLS) | frozenset(extra_symbols)
    parser = _Parser(_tokenize(text), allowed)
    e = parser.parse_expr()
    kind, text_, pos = parser.peek()
    if kind != "END":
        raise ExprSyntaxError(f"trailing input {text_!r}", pos)
    return e
