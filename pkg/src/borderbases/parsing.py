"""Parser for the plain-text polynomial grammar.

Grammar (UTF-8): a polynomial is a signed sequence of products.  Each product
is an optional rational coefficient (``3``, ``-1/2``) followed by variable
powers (``x^2``, ``y``).  ``*`` between factors is optional; variables must
be declared names of the context.  The canonical printer's output always
re-parses to the same polynomial.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .ring import Context, Polynomial


class ParseError(ValueError):
    """Syntax or name error with position information."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


@dataclass
class _Token:
    kind: str  # INT, IDENT, or one of ^ * / + -
    text: str
    line: int
    column: int


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    line, col = 1, 1
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch.isspace():
            col += 1
            i += 1
            continue
        if ch == "−":  # unicode minus
            ch = "-"
        if ch in "+-*/^":
            tokens.append(_Token(ch, ch, line, col))
            i += 1
            col += 1
            continue
        if ch.isdigit():
            j = i
            while j < len(text) and text[j].isdigit():
                j += 1
            tokens.append(_Token("INT", text[i:j], line, col))
            col += j - i
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < len(text) and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(_Token("IDENT", text[i:j], line, col))
            col += j - i
            i = j
            continue
        raise ParseError(f"unexpected character {ch!r}", line, col)
    return tokens


class _Parser:
    def __init__(self, tokens: list[_Token], ctx: Context):
        self.tokens = tokens
        self.pos = 0
        self.ctx = ctx

    def peek(self) -> _Token | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self) -> _Token:
        tok = self.peek()
        if tok is None:
            last = self.tokens[-1] if self.tokens else _Token("", "", 1, 1)
            raise ParseError("unexpected end of input", last.line,
                             last.column + len(last.text))
        self.pos += 1
        return tok

    def expect(self, kind: str) -> _Token:
        tok = self.take()
        if tok.kind != kind:
            raise ParseError(f"expected {kind}, found {tok.text!r}", tok.line, tok.column)
        return tok

    def parse(self) -> Polynomial:
        result = Polynomial.zero(self.ctx)
        sign = 1
        tok = self.peek()
        if tok is None:
            raise ParseError("empty polynomial", 1, 1)
        if tok.kind in "+-":
            sign = -1 if tok.kind == "-" else 1
            self.take()
        result = result + self.parse_product(sign)
        while self.peek() is not None:
            tok = self.take()
            if tok.kind == "+":
                result = result + self.parse_product(1)
            elif tok.kind == "-":
                result = result + self.parse_product(-1)
            else:
                raise ParseError(f"expected '+' or '-', found {tok.text!r}",
                                 tok.line, tok.column)
        return result

    def parse_product(self, sign: int) -> Polynomial:
        coeff = Fraction(sign)
        saw_coeff = False
        tok = self.peek()
        if tok is not None and tok.kind == "INT":
            self.take()
            num = int(tok.text)
            if self.peek() is not None and self.peek().kind == "/":
                self.take()
                den_tok = self.expect("INT")
                den = int(den_tok.text)
                if den == 0:
                    raise ParseError("zero denominator", den_tok.line, den_tok.column)
                coeff *= Fraction(num, den)
            else:
                coeff *= num
            saw_coeff = True
        factors = Polynomial.constant(self.ctx, coeff)
        saw_var = False
        while True:
            tok = self.peek()
            if tok is None:
                break
            if tok.kind == "*":
                self.take()
                tok = self.peek()
                if tok is None or tok.kind not in ("IDENT",):
                    where = tok if tok is not None else self.tokens[-1]
                    raise ParseError("expected a variable after '*'",
                                     where.line, where.column)
                continue
            if tok.kind != "IDENT":
                break
            self.take()
            if not self.ctx.has_var(tok.text):
                raise ParseError(f"unknown variable {tok.text!r}", tok.line, tok.column)
            exp = 1
            if self.peek() is not None and self.peek().kind == "^":
                self.take()
                exp_tok = self.expect("INT")
                exp = int(exp_tok.text)
            factors = factors * (Polynomial.variable(self.ctx, tok.text) ** exp)
            saw_var = True
        if not saw_coeff and not saw_var:
            tok = self.peek() if self.peek() is not None else self.tokens[self.pos - 1]
            raise ParseError(f"expected a term, found {tok.text!r}", tok.line, tok.column)
        return factors


def parse_polynomial(text: str, ctx: Context) -> Polynomial:
    """Parse ``text`` into a canonical polynomial over ``ctx``."""
    tokens = _tokenize(text)
    if not tokens:
        raise ParseError("empty polynomial", 1, 1)
    return _Parser(tokens, ctx).parse()
