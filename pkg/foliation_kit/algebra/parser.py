# ============================================================
# foliation_kit/algebra/parser.py — Polynomial Text Format
# ============================================================
# Grammar (whitespace insignificant):
#
#   poly   := term (('+'|'-') term)*
#   term   := sign? coeff ('*' factor)* | sign? factor ('*' factor)*
#   factor := (var | '(' poly ')') ('^' uint)?
#   coeff  := uint | uint '/' uint
#
# The optional leading sign of a term is how signed integer
# coefficients are written ("-3*x", "x + -y", "-x^2").
#
# format_poly() prints the canonical form: terms in decreasing
# ring order, "a/b*" coefficients, "var^e" powers joined by "*".
# Parsing canonical text and printing it again is the identity.
# ============================================================

import re

from sympy import QQ

from foliation_kit.algebra.poly import polynomial_ring
from foliation_kit.errors import ParseError

_TOKEN = re.compile(r'\s*(?:(?P<num>\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*/^()]))')


def _tokenize(text):
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == '':
            break
        match = _TOKEN.match(text, pos)
        if match is None:
            start = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise ParseError(f"Unexpected character {text[start]!r}", text, start)
        kind = match.lastgroup
        start = match.start(kind)
        tokens.append((kind, match.group(kind), start))
        pos = match.end()
    tokens.append(('end', '', len(text)))
    return tokens


class _Parser:
    """Recursive-descent reader producing elements of `ring`."""

    def __init__(self, text, ring):
        self.text = text
        self.ring = ring
        self.tokens = _tokenize(text)
        self.index = 0
        self.names = {str(s): g for s, g in zip(ring.symbols, ring.gens)}

    # --- token helpers ---
    def peek(self):
        return self.tokens[self.index]

    def take(self):
        token = self.tokens[self.index]
        self.index += 1
        return token

    def at_op(self, *ops):
        kind, value, _ = self.peek()
        return kind == 'op' and value in ops

    def expect_op(self, op):
        kind, value, pos = self.take()
        if kind != 'op' or value != op:
            raise ParseError(f"Expected '{op}'", self.text, pos)

    def uint(self):
        kind, value, pos = self.take()
        if kind != 'num':
            raise ParseError("Expected an unsigned integer", self.text, pos)
        return int(value)

    # --- grammar ---
    def parse(self):
        result = self.poly()
        kind, value, pos = self.peek()
        if kind != 'end':
            raise ParseError(f"Unexpected token {value!r}", self.text, pos)
        return result

    def poly(self):
        result = self.term()
        while self.at_op('+', '-'):
            _, op, _ = self.take()
            term = self.term()
            result = result + term if op == '+' else result - term
        return result

    def term(self):
        sign = 1
        if self.at_op('+', '-'):
            _, op, _ = self.take()
            sign = -1 if op == '-' else 1
        kind, _, _ = self.peek()
        if kind == 'num':
            numerator = self.uint()
            denominator = 1
            if self.at_op('/'):
                self.take()
                _, _, pos = self.peek()
                denominator = self.uint()
                if denominator == 0:
                    raise ParseError("Zero denominator", self.text, pos)
            value = self.ring.ground_new(QQ(sign * numerator, denominator))
        else:
            value = self.factor().mul_ground(QQ(sign))
        while self.at_op('*'):
            self.take()
            value = value * self.factor()
        return value

    def factor(self):
        kind, value, pos = self.take()
        if kind == 'name':
            if value not in self.names:
                raise ParseError(f"Unknown variable {value!r}", self.text, pos)
            base = self.names[value]
        elif kind == 'op' and value == '(':
            base = self.poly()
            self.expect_op(')')
        else:
            shown = value or 'end of input'
            raise ParseError(f"Expected a variable or '(' but found {shown!r}", self.text, pos)
        if self.at_op('^'):
            self.take()
            base = base ** self.uint()
        return base


def parse_poly(text, variables=None, ring=None):
    """
    Parse polynomial text.

    Args:
        text (str):       input in the grammar above.
        variables (list): variable names (graded reverse lex ring),
                          ignored when `ring` is given.
        ring (PolyRing):  target ring.

    Returns:
        PolyElement: the canonical polynomial.

    Raises:
        ParseError: syntax error or unknown variable, with position.
    """
    if ring is None:
        ring = polynomial_ring(tuple(variables))
    return _Parser(str(text), ring).parse()


def _format_coefficient(value):
    value = QQ(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def format_monomial(monom, names):
    parts = []
    for name, e in zip(names, monom):
        if e == 1:
            parts.append(name)
        elif e > 1:
            parts.append(f"{name}^{e}")
    return '*'.join(parts)


def format_poly(p):
    """Canonical text of p; "0" for the zero polynomial."""
    if not p:
        return '0'
    names = [str(s) for s in p.ring.symbols]
    pieces = []
    for i, (monom, coeff) in enumerate(p.terms()):
        negative = coeff < 0
        magnitude = -coeff if negative else coeff
        mono = format_monomial(monom, names)
        if not mono:
            body = _format_coefficient(magnitude)
        elif magnitude == 1:
            body = mono
        else:
            body = f"{_format_coefficient(magnitude)}*{mono}"
        if i == 0:
            pieces.append(f"-{body}" if negative else body)
        else:
            pieces.append(f" - {body}" if negative else f" + {body}")
    return ''.join(pieces)
