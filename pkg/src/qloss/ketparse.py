"""Text front end for state input: ket expressions and complex literals.

Expression grammar::

    expr   := ['+'|'-'] term (('+'|'-') term)*
    term   := [coeff ['*']] ket
    coeff  := factor (('*'|'/') factor)*
    factor := number | 'sqrt' '(' number ['/' number] ')'
    ket    := '|' label (',' label)* ('⟩' | '>')
    label  := digit string

Labels may be written without commas (one digit per subsystem, "|010>") only
when every subsystem dimension is at most 10; mixing the two styles inside
one ket is rejected. Coefficients are real; relative phases are limited to
the signs between terms.

Errors carry the byte offset of the offending character so callers can point
at the fault in the original input.
"""

from __future__ import annotations

import numpy as np

from .errors import EmptyStateError, KetSyntaxError, LabelOutOfRangeError

_CLOSERS = ("⟩", ">")


def _byte_offset(text: str, pos: int) -> int:
    return len(text[:pos].encode("utf-8"))


class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def fail(self, message: str, pos: int | None = None):
        raise KetSyntaxError(message, _byte_offset(self.text, self.pos if pos is None else pos))

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def advance(self) -> str:
        ch = self.peek()
        self.pos += 1
        return ch

    def expect(self, ch: str):
        if self.peek() != ch:
            self.fail(f"expected {ch!r}")
        self.pos += 1

    def number(self) -> float:
        start = self.pos
        while self.peek().isdigit():
            self.pos += 1
        if self.peek() == ".":
            self.pos += 1
            while self.peek().isdigit():
                self.pos += 1
        if self.pos == start or self.text[start:self.pos] == ".":
            self.fail("expected a number", start)
        return float(self.text[start:self.pos])

    def factor(self) -> float:
        self.skip_ws()
        if self.text.startswith("sqrt", self.pos):
            self.pos += 4
            self.skip_ws()
            self.expect("(")
            self.skip_ws()
            value = self.number()
            self.skip_ws()
            if self.peek() == "/":
                self.pos += 1
                self.skip_ws()
                den = self.number()
                if den == 0:
                    self.fail("division by zero in sqrt()")
                value /= den
                self.skip_ws()
            self.expect(")")
            if value < 0:
                self.fail("sqrt of a negative value")
            return float(np.sqrt(value))
        if self.peek().isdigit() or self.peek() == ".":
            return self.number()
        self.fail("expected a coefficient")

    def coefficient(self) -> float:
        value = self.factor()
        while True:
            self.skip_ws()
            op = self.peek()
            if op == "*":
                mark = self.pos
                self.pos += 1
                self.skip_ws()
                if self.peek() == "|":
                    # '*' was the separator between coefficient and ket
                    self.pos = mark + 1
                    return value
                self.pos = mark + 1
                value *= self.factor()
            elif op == "/":
                self.pos += 1
                self.skip_ws()
                if self.peek() == "|":
                    self.fail("cannot divide by a ket")
                den = self.factor()
                if den == 0:
                    self.fail("division by zero")
                value /= den
            else:
                return value

    def ket_labels(self, dims: tuple[int, ...]) -> tuple[int, ...]:
        start = self.pos
        self.expect("|")
        body_start = self.pos
        while self.peek() not in _CLOSERS:
            if self.peek() == "":
                self.fail("unterminated ket", start)
            if not (self.peek().isdigit() or self.peek() == ","):
                self.fail("ket labels must be digits (comma-separated for large dimensions)")
            self.pos += 1
        body = self.text[body_start:self.pos]
        self.pos += 1  # closer
        if body == "":
            self.fail("empty ket", body_start)
        if "," in body:
            parts = body.split(",")
            if any(p == "" for p in parts):
                self.fail("empty label in ket", body_start)
            labels = tuple(int(p) for p in parts)
        else:
            if any(d > 10 for d in dims):
                self.fail("dimensions above 10 need comma-separated labels", body_start)
            labels = tuple(int(c) for c in body)
        if len(labels) != len(dims):
            self.fail(f"expected {len(dims)} labels, got {len(labels)}", body_start)
        for label, dim in zip(labels, dims):
            if label >= dim:
                raise LabelOutOfRangeError(
                    f"label {label} out of range for dimension-{dim} subsystem")
        return labels


def parse_ket_amplitudes(text: str, dims) -> np.ndarray:
    """Parse a ket expression into an (unnormalized) amplitude vector.

    Basis order is row-major over the subsystem labels (last label fastest).
    """
    dims = tuple(int(d) for d in dims)
    if any(d < 1 for d in dims):
        raise KetSyntaxError("subsystem dimensions must be positive", 0)
    sc = _Scanner(text)
    amps = np.zeros(int(np.prod(dims)), dtype=complex)
    strides = np.cumprod((1,) + dims[:0:-1])[::-1]

    sc.skip_ws()
    if sc.peek() == "":
        raise EmptyStateError("empty ket expression")
    sign = 1.0
    if sc.peek() in "+-":
        sign = -1.0 if sc.advance() == "-" else 1.0
    nterms = 0
    while True:
        sc.skip_ws()
        coeff = 1.0
        if sc.peek() != "|":
            coeff = sc.coefficient()
            sc.skip_ws()
        if sc.peek() != "|":
            sc.fail("expected a ket")
        labels = sc.ket_labels(dims)
        index = int(sum(l * s for l, s in zip(labels, strides)))
        amps[index] += sign * coeff
        nterms += 1
        sc.skip_ws()
        if sc.peek() == "":
            break
        if sc.peek() not in "+-":
            sc.fail("expected '+' or '-' between terms")
        sign = -1.0 if sc.advance() == "-" else 1.0
    if nterms == 0:
        raise EmptyStateError("expression contains no kets")
    return amps


def parse_complex(token: str) -> complex:
    """Parse one 'a+bi' (or plain real) literal.

    Raises ValueError on malformed input; decimal-to-binary conversion is the
    usual round-to-nearest, so identical text always yields identical bits.
    """
    s = token.strip()
    if s.endswith(("i", "I")):
        s = s[:-1] + "j"
    return complex(s)
