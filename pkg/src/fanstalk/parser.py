"""Reading and writing binomials.

A binomial over variables ``x_1..x_m`` is stored in the normalized shape

    unit * x^C * (x^A - lam * x^B)

with ``supp(A)`` and ``supp(B)`` disjoint, or as a monomial ``unit * x^C``.
Expressions are expanded exactly (``Fraction`` coefficients) before being
normalized, so ``x1^2*(x1^3 - 2*y)`` and ``x1^5 - 2*x1^2*y`` give the same
record.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator

from .errors import (
    EmptySystem,
    ExpressionSyntaxError,
    NegativeExponent,
    NotBinomial,
    ParseError,
    UnknownVariable,
)

_NAME = re.compile(r"[A-Za-z][A-Za-z0-9_']*\Z")


@dataclass(frozen=True)
class VariableOrder:
    names: tuple[str, ...]

    def __post_init__(self):
        names = tuple(self.names)
        object.__setattr__(self, "names", names)
        if not names:
            raise ParseError("variable order must be nonempty")
        for n in names:
            if not _NAME.match(n):
                raise ParseError(f"invalid variable name {n!r}")
        if len(set(names)) != len(names):
            raise ParseError(f"duplicate variable names in {names}")

    def __len__(self):
        return len(self.names)

    def index(self, name: str) -> int:
        return self.names.index(name)


@dataclass(frozen=True)
class Binomial:
    """``unit * x^C * (x^A - lam * x^B)``; ``A``, ``B`` and ``lam`` are
    ``None`` for a monomial."""

    order: VariableOrder
    C: tuple[int, ...]
    A: tuple[int, ...] | None = None
    B: tuple[int, ...] | None = None
    lam: Fraction | None = None
    unit: Fraction = Fraction(1)

    def __post_init__(self):
        m = len(self.order)
        object.__setattr__(self, "C", tuple(int(c) for c in self.C))
        object.__setattr__(self, "unit", Fraction(self.unit))
        if len(self.C) != m or min(self.C) < 0:
            raise ValueError(f"bad monomial factor {self.C} for {m} variables")
        if self.unit == 0:
            raise ValueError("unit must be nonzero")
        if self.A is None:
            if self.B is not None or self.lam is not None:
                raise ValueError("a monomial carries no A, B or lam")
            return
        A = tuple(int(a) for a in self.A)
        B = tuple(int(b) for b in self.B)
        lam = Fraction(self.lam)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "lam", lam)
        if len(A) != m or len(B) != m or min(A + B) < 0:
            raise ValueError("bad exponent vectors")
        if any(a and b for a, b in zip(A, B)):
            raise ValueError(f"supports of A={A} and B={B} overlap")
        if not any(A) and not any(B):
            raise ValueError("A and B cannot both vanish")
        if lam == 0:
            raise ValueError("lam must be nonzero")

    @property
    def is_pure(self) -> bool:
        return self.A is not None

    @property
    def kind(self) -> str:
        return "pure" if self.is_pure else "monomial"

    @property
    def dim(self) -> int:
        return len(self.order)

    def exponent_points(self) -> tuple[tuple[int, ...], ...]:
        """Exponents of the (one or two) terms: ``C + A`` and ``C + B``."""
        if not self.is_pure:
            return (self.C,)
        return (
            tuple(c + a for c, a in zip(self.C, self.A)),
            tuple(c + b for c, b in zip(self.C, self.B)),
        )

    def tropical(self) -> tuple[int, ...]:
        """Signed exponent ``A - B``; zero for a monomial."""
        if not self.is_pure:
            return tuple(0 for _ in self.C)
        return tuple(a - b for a, b in zip(self.A, self.B))

    def __str__(self):
        return format_binomial(self)


@dataclass(frozen=True)
class BinomialSystem:
    order: VariableOrder
    members: tuple[Binomial, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(self.members))
        if not self.members:
            raise EmptySystem("a binomial system needs at least one member")
        for b in self.members:
            if b.order != self.order:
                raise ValueError("all members must share the variable order")

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    @property
    def dim(self) -> int:
        return len(self.order)

    @property
    def pure_members(self) -> tuple[Binomial, ...]:
        return tuple(b for b in self.members if b.is_pure)


# --- tokenizer -------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+)|(?P<name>[A-Za-z][A-Za-z0-9_']*)|(?P<op>\*\*|[-+*/^()]))"
)


def _tokens(text: str) -> Iterator[tuple[str, str, int]]:
    pos = 0
    n = len(text)
    while True:
        while pos < n and text[pos].isspace():
            pos += 1
        if pos >= n:
            yield ("end", "", pos)
            return
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ExpressionSyntaxError(f"unexpected character {text[pos]!r}", pos)
        start = m.start(m.lastgroup)
        kind = m.lastgroup
        value = m.group(kind)
        if kind == "op" and value == "**":
            value = "^"
        yield (kind, value, start)
        pos = m.end()


# --- polynomial arithmetic on {exponent tuple: Fraction} dicts ---------------

def _add(p, q, sign=1):
    out = dict(p)
    for e, c in q.items():
        v = out.get(e, 0) + sign * c
        if v:
            out[e] = v
        else:
            out.pop(e, None)
    return out


def _mul(p, q):
    out = {}
    for e1, c1 in p.items():
        for e2, c2 in q.items():
            e = tuple(a + b for a, b in zip(e1, e2))
            v = out.get(e, 0) + c1 * c2
            if v:
                out[e] = v
            else:
                out.pop(e, None)
    return out


class _Parser:
    def __init__(self, text: str, order: VariableOrder):
        self.text = text
        self.order = order
        self.m = len(order)
        self.toks = list(_tokens(text))
        self.i = 0

    @property
    def tok(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def const(self, c):
        c = Fraction(c)
        return {(0,) * self.m: c} if c else {}

    def parse(self):
        poly = self.expr()
        kind, value, pos = self.tok
        if kind != "end":
            if kind in ("num", "name") or value == "(":
                raise ExpressionSyntaxError("implicit multiplication is not allowed", pos)
            raise ExpressionSyntaxError(f"unexpected {value!r}", pos)
        return poly

    def expr(self):
        poly = self.term()
        while self.tok[1] in ("+", "-") and self.tok[0] == "op":
            _, op, _ = self.take()
            poly = _add(poly, self.term(), 1 if op == "+" else -1)
        return poly

    def term(self):
        poly = self.unary()
        while self.tok[0] == "op" and self.tok[1] in ("*", "/"):
            _, op, pos = self.take()
            rhs = self.unary()
            if op == "*":
                poly = _mul(poly, rhs)
                continue
            zero = (0,) * self.m
            if not rhs:
                raise ExpressionSyntaxError("division by zero", pos)
            if set(rhs) != {zero}:
                raise ExpressionSyntaxError("division by a non-constant", pos)
            poly = {e: c / rhs[zero] for e, c in poly.items()}
        return poly

    def unary(self):
        if self.tok[0] == "op" and self.tok[1] in ("+", "-"):
            _, op, _ = self.take()
            inner = self.unary()
            return inner if op == "+" else {e: -c for e, c in inner.items()}
        return self.power()

    def power(self):
        base = self.primary()
        if self.tok[0] == "op" and self.tok[1] == "^":
            self.take()
            negative = False
            if self.tok[0] == "op" and self.tok[1] in ("+", "-"):
                negative = self.take()[1] == "-"
            kind, value, pos = self.take()
            if kind != "num":
                raise ExpressionSyntaxError("exponent must be an integer literal", pos)
            k = int(value)
            if negative and k:
                raise NegativeExponent(f"negative exponent -{k}", pos)
            result = self.const(1)
            for _ in range(k):
                result = _mul(result, base)
            return result
        return base

    def primary(self):
        kind, value, pos = self.take()
        if kind == "num":
            return self.const(int(value))
        if kind == "name":
            if value not in self.order.names:
                raise UnknownVariable(f"unknown variable {value!r}", pos)
            e = [0] * self.m
            e[self.order.index(value)] = 1
            return {tuple(e): Fraction(1)}
        if value == "(":
            inner = self.expr()
            k2, v2, p2 = self.take()
            if v2 != ")":
                if k2 in ("num", "name") or v2 == "(":
                    raise ExpressionSyntaxError("implicit multiplication is not allowed", p2)
                raise ExpressionSyntaxError("expected ')'", p2)
            return inner
        if kind == "end":
            raise ExpressionSyntaxError("unexpected end of expression", pos)
        raise ExpressionSyntaxError(f"unexpected {value!r}", pos)


def expand(text: str, order: VariableOrder) -> dict[tuple[int, ...], Fraction]:
    """Expand ``text`` into ``{exponent: coefficient}`` in first-appearance order."""
    return _Parser(text, order).parse()


def binomial_from_terms(terms, order: VariableOrder) -> Binomial:
    items = list(terms.items())
    if not items:
        raise NotBinomial("expression expands to the zero polynomial")
    if len(items) > 2:
        raise NotBinomial(f"expression has {len(items)} terms after expansion")
    if len(items) == 1:
        (e, c), = items
        return Binomial(order, e, unit=c)
    (e1, c1), (e2, c2) = items
    C = tuple(min(a, b) for a, b in zip(e1, e2))
    A = tuple(a - c for a, c in zip(e1, C))
    B = tuple(b - c for b, c in zip(e2, C))
    return Binomial(order, C, A, B, -c2 / c1, unit=c1)


def parse_binomial(text: str, order: VariableOrder) -> Binomial:
    return binomial_from_terms(expand(text, order), order)


def parse_order(line: str) -> VariableOrder:
    head, _, rest = line.partition(":")
    if head.strip() != "vars" or not _:
        raise ParseError("expected a 'vars:' declaration")
    return VariableOrder(tuple(rest.split()))


def parse_system(text: str) -> BinomialSystem:
    order = None
    members = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            if order is None:
                order = parse_order(line)
            else:
                members.append(parse_binomial(line, order))
        except ParseError as exc:
            raise exc.at_line(lineno)
    if order is None:
        raise EmptySystem("missing 'vars:' declaration")
    if not members:
        raise EmptySystem("system has no binomials")
    return BinomialSystem(order, tuple(members))


# --- formatting ------------------------------------------------------------

def format_monomial(exps, names) -> str:
    parts = []
    for e, name in zip(exps, names):
        if e == 1:
            parts.append(name)
        elif e > 1:
            parts.append(f"{name}^{e}")
    return "*".join(parts)


def _scaled(coef: Fraction, mono: str) -> str:
    if not mono:
        return str(coef)
    if coef == 1:
        return mono
    return f"{coef}*{mono}"


def format_binomial(b: Binomial) -> str:
    names = b.order.names
    outer = format_monomial(b.C, names)
    if not b.is_pure:
        if not outer:
            return str(b.unit)
        if b.unit == -1:
            return f"-{outer}"
        return _scaled(b.unit, outer)

    first = format_monomial(b.A, names) or "1"
    sign, mag = (" - ", b.lam) if b.lam > 0 else (" + ", -b.lam)
    inner = first + sign + _scaled(mag, format_monomial(b.B, names))
    if b.unit == 1 and not outer:
        return inner
    prefix = outer
    if b.unit == -1:
        return f"-{prefix}*({inner})" if prefix else f"-({inner})"
    if b.unit != 1:
        prefix = f"{b.unit}*{prefix}" if prefix else str(b.unit)
    return f"{prefix}*({inner})"


def format_system(system: BinomialSystem) -> str:
    lines = ["vars: " + " ".join(system.order.names)]
    lines.extend(format_binomial(b) for b in system.members)
    return "\n".join(lines) + "\n"
