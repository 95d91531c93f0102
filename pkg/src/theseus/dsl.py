"""Target-expression parser.

Grammar:
    expression  := term (('+' | '-') term)*
    term        := [coefficient '*'] ket
    ket         := '|' digit+ '>'
    coefficient := decimal ['i']
plus the named constructors ghz(n,d), bell(d) and cnot(d_control,d_target).
Kets use one digit per slot, which covers local dimensions up to ten.
"""

from __future__ import annotations

import re

from .errors import ParseError
from .objective import TargetGate, TargetState, bell_state, cnot_gate, ghz_state

_CONSTRUCTOR = re.compile(r"^\s*(ghz|bell|cnot)\s*\(([^)]*)\)\s*$")
_NUMBER = re.compile(r"(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?")


def _parse_constructor(name: str, args_text: str, pos: int):
    parts = [a.strip() for a in args_text.split(",")] if args_text.strip() else []
    try:
        args = [int(a) for a in parts]
    except ValueError:
        raise ParseError(f"constructor {name} takes integer arguments", pos)
    try:
        if name == "ghz":
            if len(args) != 2:
                raise ParseError("ghz(n,d) takes two arguments", pos)
            return ghz_state(*args)
        if name == "bell":
            if len(args) != 1:
                raise ParseError("bell(d) takes one argument", pos)
            return bell_state(args[0])
        if len(args) != 2:
            raise ParseError("cnot(d_control,d_target) takes two arguments", pos)
        return cnot_gate(*args)
    except ParseError:
        raise
    except Exception as exc:
        raise ParseError(str(exc), pos)


class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self):
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, ch: str):
        self.skip_ws()
        if self.peek() != ch:
            raise ParseError(f"expected {ch!r}", self.pos)
        self.pos += 1

    def number(self):
        self.skip_ws()
        m = _NUMBER.match(self.text, self.pos)
        if not m:
            raise ParseError("expected a number", self.pos)
        self.pos = m.end()
        value = float(m.group())
        if self.pos < len(self.text) and self.text[self.pos] == "i":
            self.pos += 1
            return complex(0.0, value)
        return complex(value, 0.0)

    def ket(self):
        self.expect("|")
        start = self.pos
        digits = []
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            digits.append(int(self.text[self.pos]))
            self.pos += 1
        if not digits:
            raise ParseError("empty ket", start)
        if self.peek() != ">":
            raise ParseError("unterminated ket, expected '>'", self.pos)
        self.pos += 1
        return tuple(digits)


def parse_target(s: str):
    """Parse a target expression into a TargetState or TargetGate."""
    m = _CONSTRUCTOR.match(s)
    if m:
        return _parse_constructor(m.group(1), m.group(2), m.start(1))
    sc = _Scanner(s)
    terms: dict[tuple, complex] = {}
    sign = 1.0
    if sc.peek() == "-":
        sc.expect("-")
        sign = -1.0
    elif sc.peek() == "+":
        sc.expect("+")
    length = None
    while True:
        coeff = complex(1.0)
        if sc.peek() not in ("|",):
            coeff = sc.number()
            sc.expect("*")
        ket_pos = sc.pos
        ket = sc.ket()
        if length is None:
            length = len(ket)
        elif len(ket) != length:
            raise ParseError(
                f"ket length {len(ket)} does not match earlier length {length}", ket_pos
            )
        terms[ket] = terms.get(ket, 0j) + sign * coeff
        nxt = sc.peek()
        if nxt == "":
            break
        if nxt == "+":
            sc.expect("+")
            sign = 1.0
        elif nxt == "-":
            sc.expect("-")
            sign = -1.0
        else:
            raise ParseError(f"unexpected character {nxt!r}", sc.pos)
    terms = {k: c for k, c in terms.items() if c != 0}
    if not terms:
        raise ParseError("zero-norm expression", 0)
    return TargetState.from_terms(terms)


def _format_coeff(c: complex) -> str:
    out = []
    if abs(c.real) > 1e-15:
        out.append(repr(c.real))
    if abs(c.imag) > 1e-15:
        out.append(repr(c.imag) + "i")
    return out


def format_target(t) -> str:
    """Canonical text for a target; parse(format(t)) equals t."""
    if isinstance(t, TargetGate):
        # only the cnot constructor has a textual form
        d_t = max(k[1] for k, _ in
                  [(term[0], term[1]) for s in t.outputs for term in s.terms]) + 1
        d_c = max(i for i, _ in t.input_basis) + 1
        ref = cnot_gate(d_c, d_t)
        if ref == t:
            return f"cnot({d_c},{d_t})"
        raise ParseError("only cnot gates have a textual form", 0)
    pieces = []
    for ket, coeff in t.terms:
        ket_text = "|" + "".join(str(m) for m in ket) + ">"
        for part in _format_coeff(coeff):
            sign = "-" if part.startswith("-") else "+"
            pieces.append((sign, part.lstrip("-"), ket_text))
    first = True
    out = []
    for sign, mag, ket_text in pieces:
        if first:
            out.append(("-" if sign == "-" else "") + f"{mag}*{ket_text}")
            first = False
        else:
            out.append(f" {sign} {mag}*{ket_text}")
    return "".join(out)
