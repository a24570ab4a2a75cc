"""Randomisation-object expressions: parsing, formatting and randomisation-nesting.

Grammar (loosest binding first)::

    label   := NAME '=' arrow | arrow
    arrow   := within ('→' within)?
    within  := indep ('[' indep ']')*
    indep   := comb ('⊗' comb)*
    comb    := atom ('∧' atom)*
    atom    := NAME | '{' indep-or-within '}'

A bracket applies to everything before it at the same level, so ``A^B[C]``
is ``{A∧B}[C]``. ASCII spellings ``^``, ``(x)`` and ``->`` are accepted;
output always uses ``∧``, ``⊗`` and ``→``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Union

AND = "∧"
TIMES = "⊗"
ARROW = "→"


class ExpressionError(ValueError):
    """Malformed randomisation expression."""


class UnsupportedExpression(ExpressionError):
    """Expression shape outside the supported randomisation-nesting forms."""


@dataclass(frozen=True)
class Base:
    name: str


@dataclass(frozen=True)
class Combine:
    children: tuple["Expr", ...]


@dataclass(frozen=True)
class Independent:
    children: tuple["Expr", ...]


@dataclass(frozen=True)
class Within:
    inner: "Expr"
    context: "Expr"


@dataclass(frozen=True)
class Alias:
    name: str
    inner: "Expr"


@dataclass(frozen=True)
class Randomised:
    """``source → target`` written inside a single label."""

    source: "Expr"
    target: "Expr"


Expr = Union[Base, Combine, Independent, Within, Alias, Randomised]

MEAN = Base("Mean")

_SINGLE = {"[": "[", "]": "]", "{": "{", "}": "}", "=": "=",
           "^": AND, AND: AND, TIMES: TIMES, ARROW: ARROW}
_MULTI = {"->": ARROW, "(x)": TIMES}


def _special_at(text: str, pos: int) -> tuple[str, int] | None:
    for spelling, op in _MULTI.items():
        if text.startswith(spelling, pos):
            return op, len(spelling)
    if text[pos] in _SINGLE:
        return _SINGLE[text[pos]], 1
    return None


def tokenize(text: str) -> list[tuple[str, str]]:
    """Split a label into (kind, value) tokens; names may contain inner spaces."""
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        special = _special_at(text, pos)
        if special:
            op, width = special
            kind = "arrow" if op == ARROW else "op" if op in (AND, TIMES) else op
            tokens.append((kind, op))
            pos += width
            continue
        start = pos
        while pos < len(text) and not _special_at(text, pos):
            pos += 1
        tokens.append(("name", text[start:pos].strip()))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.i = 0

    def peek(self, k: int = 0):
        j = self.i + k
        return self.tokens[j] if j < len(self.tokens) else ("end", "")

    def take(self, kind: str):
        tok = self.peek()
        if tok[0] != kind:
            found = tok[1] or "end of label"
            raise ExpressionError(f"expected {kind} but found {found!r} in {self.text!r}")
        self.i += 1
        return tok

    def label(self) -> Expr:
        if self.peek()[0] == "name" and self.peek(1)[0] == "=":
            name = self.take("name")[1]
            self.take("=")
            expr = Alias(name, self.arrow())
        else:
            expr = self.arrow()
        if self.peek()[0] != "end":
            raise ExpressionError(f"unexpected {self.peek()[1]!r} in {self.text!r}")
        return expr

    def arrow(self) -> Expr:
        left = self.within()
        if self.peek()[0] == "arrow":
            self.take("arrow")
            return Randomised(left, self.within())
        return left

    def within(self) -> Expr:
        expr = self.indep()
        while self.peek()[0] == "[":
            self.take("[")
            ctx = self.within()
            self.take("]")
            expr = Within(expr, ctx)
        return expr

    def indep(self) -> Expr:
        parts = [self.comb()]
        while self.peek() == ("op", TIMES):
            self.take("op")
            parts.append(self.comb())
        return _flat(Independent, parts)

    def comb(self) -> Expr:
        parts = [self.atom()]
        while self.peek() == ("op", AND):
            self.take("op")
            parts.append(self.atom())
        return _flat(Combine, parts)

    def atom(self) -> Expr:
        kind, value = self.peek()
        if kind == "name":
            self.i += 1
            return Base(value)
        if kind == "{":
            self.take("{")
            inner = self.within()
            self.take("}")
            return inner
        found = value or "end of label"
        raise ExpressionError(f"expected a factor name but found {found!r} in {self.text!r}")


def _flat(kind, parts: list[Expr]) -> Expr:
    if len(parts) == 1:
        return parts[0]
    children: list[Expr] = []
    for p in parts:
        children.extend(p.children if isinstance(p, kind) else (p,))
    return kind(tuple(children))


def names_in(expr: Expr) -> list[str]:
    """Factor names used by an expression (aliases excluded), in order of appearance."""
    if isinstance(expr, Base):
        return [expr.name]
    if isinstance(expr, (Combine, Independent)):
        return [n for c in expr.children for n in names_in(c)]
    if isinstance(expr, Within):
        return names_in(expr.inner) + names_in(expr.context)
    if isinstance(expr, Alias):
        return names_in(expr.inner)
    if isinstance(expr, Randomised):
        return names_in(expr.source) + names_in(expr.target)
    raise TypeError(expr)


def parse_rand_expr(label: str, factor_names: Iterable[str] | None = None) -> Expr:
    """Parse a randomisation label. With ``factor_names``, unknown names are an error."""
    if not label or not label.strip():
        raise ExpressionError("empty randomisation label")
    expr = _Parser(label).label()
    if factor_names is not None:
        known = set(factor_names) | {"Mean"}
        unknown = [n for n in names_in(expr) if n not in known]
        if unknown:
            raise ExpressionError(f"unknown factor name {unknown[0]!r} in {label!r}")
    return expr


def format_expr(expr: Expr) -> str:
    if isinstance(expr, Base):
        return expr.name
    if isinstance(expr, Combine):
        return AND.join(_wrap(c, (Base,)) for c in expr.children)
    if isinstance(expr, Independent):
        return f" {TIMES} ".join(_wrap(c, (Base, Combine)) for c in expr.children)
    if isinstance(expr, Within):
        return f"{_wrap(expr.inner, (Base,))}[{_wrap(expr.context, (Base, Combine, Independent, Within))}]"
    if isinstance(expr, Alias):
        return f"{expr.name}={format_expr(expr.inner)}"
    if isinstance(expr, Randomised):
        return f"{format_expr(expr.source)} {ARROW} {format_expr(expr.target)}"
    raise TypeError(expr)


def _wrap(expr: Expr, bare: tuple) -> str:
    text = format_expr(expr)
    return text if isinstance(expr, bare) else "{" + text + "}"


def _is_flat(expr: Expr) -> bool:
    return isinstance(expr, (Combine, Independent)) and all(isinstance(c, Base) for c in expr.children)


def _sub_combinations(expr: Combine | Independent) -> list[Expr]:
    kind = type(expr)
    out: list[Expr] = []
    kids = expr.children
    for size in range(1, len(kids)):
        for combo in itertools.combinations(kids, size):
            out.append(combo[0] if size == 1 else kind(combo))
    return out


def rand_nest_set(expr: Expr) -> list[Expr]:
    """Randomisation objects that randomisation-nest ``expr``.

    Supported shapes: ``A``; flat ``A∧B∧…`` and ``A⊗B⊗…``; ``A[B]`` and
    ``A[B⊗C]`` (any flat context); ``{A⊗B}[C]``; ``A⊗{B[C]}``. Anything
    else raises :class:`UnsupportedExpression`.
    """
    if isinstance(expr, Alias):
        return rand_nest_set(expr.inner)
    if isinstance(expr, Base):
        return [MEAN] if expr != MEAN else []
    if _is_flat(expr):
        return [MEAN] + _sub_combinations(expr)
    if isinstance(expr, Within):
        inner, ctx = expr.inner, expr.context
        if isinstance(inner, Base) and (isinstance(ctx, Base) or _is_flat(ctx)):
            return _dedupe([MEAN, ctx] + rand_nest_set(ctx))
        if isinstance(inner, Independent) and _is_flat(inner) and isinstance(ctx, Base):
            nested = [Within(s, ctx) for s in _sub_combinations(inner)]
            return [MEAN] + nested + [ctx]
    if isinstance(expr, Independent) and len(expr.children) == 2:
        a, b = expr.children
        if isinstance(b, Base) and isinstance(a, Within):
            a, b = b, a
        if (isinstance(a, Base) and isinstance(b, Within)
                and isinstance(b.inner, Base) and isinstance(b.context, Base)):
            c = b.context
            return [MEAN, Independent((a, c)), b, a, c]
    raise UnsupportedExpression(f"unsupported randomisation expression {format_expr(expr)!r}")


def _dedupe(items: list[Expr]) -> list[Expr]:
    out: list[Expr] = []
    for x in items:
        if x not in out:
            out.append(x)
    return out
