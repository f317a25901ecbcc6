"""Expression text <-> algebra objects.

The accepted grammar is deliberately small: integer literals, symbol names,
binary + - * /, unary -, ^ with a nonnegative integer literal exponent, and
parentheses.  The parser evaluates on the fly through a resolver callback,
so the same grammar serves rational functions in one variable and
multivariate Hamiltonian polynomials.

Rendering produces text the parser maps back to the same object.
"""
from __future__ import annotations

from typing import Callable, NamedTuple

from .rationals import QQ


class ExprError(ValueError):
    """Parse or evaluation failure, carrying the offending position."""

    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} (at position {pos})")
        self.pos = pos


class Token(NamedTuple):
    kind: str  # int | name | op | end
    text: str
    pos: int


def tokenize(text: str) -> list[Token]:
    toks = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            toks.append(Token("int", text[i:j], i))
            i = j
        elif ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            toks.append(Token("name", text[i:j], i))
            i = j
        elif ch in "+-*/^()":
            toks.append(Token("op", ch, i))
            i += 1
        else:
            raise ExprError(f"unexpected character {ch!r}", i)
    toks.append(Token("end", "", n))
    return toks


class _Parser:
    def __init__(self, tokens, resolve_name, make_const):
        self.toks = tokens
        self.k = 0
        self.resolve_name = resolve_name
        self.make_const = make_const

    def peek(self) -> Token:
        return self.toks[self.k]

    def next(self) -> Token:
        t = self.toks[self.k]
        self.k += 1
        return t

    def expect_op(self, ch):
        t = self.next()
        if t.kind != "op" or t.text != ch:
            raise ExprError(f"expected {ch!r}, found {t.text or 'end of input'!r}", t.pos)

    def parse(self):
        v = self.expr()
        t = self.peek()
        if t.kind != "end":
            raise ExprError(f"trailing input {t.text!r}", t.pos)
        return v

    def expr(self):
        v = self.term()
        while self.peek().kind == "op" and self.peek().text in "+-":
            op = self.next()
            rhs = self.term()
            v = v + rhs if op.text == "+" else v - rhs
        return v

    def term(self):
        v = self.factor()
        while self.peek().kind == "op" and self.peek().text in "*/":
            op = self.next()
            rhs = self.factor()
            if op.text == "*":
                v = v * rhs
            else:
                try:
                    v = v / rhs
                except ZeroDivisionError:
                    raise ExprError("division by zero", op.pos) from None
                except ValueError as exc:
                    raise ExprError(str(exc), op.pos) from None
        return v

    def factor(self):
        t = self.peek()
        if t.kind == "op" and t.text == "-":
            self.next()
            return -self.factor()
        v = self.atom()
        while self.peek().kind == "op" and self.peek().text == "^":
            self.next()
            e = self.next()
            if e.kind != "int":
                raise ExprError("exponent must be a nonnegative integer literal", e.pos)
            v = v ** int(e.text)
        return v

    def atom(self):
        t = self.next()
        if t.kind == "int":
            return self.make_const(int(t.text))
        if t.kind == "name":
            v = self.resolve_name(t.text)
            if v is None:
                raise ExprError(f"unknown symbol {t.text!r}", t.pos)
            return v
        if t.kind == "op" and t.text == "(":
            v = self.expr()
            self.expect_op(")")
            return v
        raise ExprError(f"unexpected {t.text or 'end of input'!r}", t.pos)


def parse_expression(text: str, resolve_name: Callable, make_const: Callable):
    """Parse text, mapping names and integer literals through the callbacks."""
    return _Parser(tokenize(text), resolve_name, make_const).parse()


# ---- rendering -----------------------------------------------------------


def _coeff_text(c) -> str:
    return str(c) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def poly_to_text(p, var: str) -> str:
    """Canonical text for a Poly, terms in descending degree."""
    if p.is_zero:
        return "0"
    parts = []
    for k in range(len(p.coeffs) - 1, -1, -1):
        c = p.coeffs[k]
        if not c:
            continue
        neg = c < 0
        a = -c if neg else c
        if k == 0:
            body = _coeff_text(a)
        else:
            xs = var if k == 1 else f"{var}^{k}"
            body = xs if a == 1 else f"{_coeff_text(a)}*{xs}"
        if not parts:
            parts.append(f"-{body}" if neg else body)
        else:
            parts.append(f" - {body}" if neg else f" + {body}")
    return "".join(parts)


def _is_bare_atom(text: str) -> bool:
    """True if the rendered polynomial is safe unparenthesized around / or *."""
    return all(ch not in "+-*/" for ch in text[1:]) and not text.startswith("-")
