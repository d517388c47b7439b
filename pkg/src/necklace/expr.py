"""Parsing and printing of element expressions.

    expr := term (('+' | '-') term)*
    term := [rational '*'] atom
    atom := path | 'cyc(' path ')' | 'e_' vertex
    path := edgename ('.' edgename)*

Whitespace is ignored between tokens.  Any cyc(...) atom makes the whole
expression a necklace element; idempotents then stand for trivial cycles.
"""
from __future__ import annotations

import re
from fractions import Fraction
from typing import List, Optional, Tuple, Union

from .algebra import NecklaceElement, PathAlgebraElement, _accumulate, format_element
from .errors import NonComposablePath, ParseError, UnknownEdge
from .quiver import Path, Quiver

Element = Union[PathAlgebraElement, NecklaceElement]

_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\*?")
_RATIONAL = re.compile(r"\d+(?:/\d+)?")
_VERTEX = re.compile(r"[A-Za-z0-9_]+")


class _Parser:
    def __init__(self, text: str, q: Quiver):
        self.s = text
        self.q = q
        self.i = 0

    def skip(self):
        while self.i < len(self.s) and self.s[self.i].isspace():
            self.i += 1

    def peek(self) -> str:
        self.skip()
        return self.s[self.i] if self.i < len(self.s) else ""

    def expect(self, ch: str):
        if self.peek() != ch:
            raise ParseError(f"expected {ch!r}", self.i)
        self.i += 1

    def parse(self) -> List[Tuple[Fraction, str, Path]]:
        self.skip()
        if not self.s.strip():
            raise ParseError("empty expression", 0)
        terms = []
        sign = 1
        if self.peek() in "+-":
            sign = -1 if self.s[self.i] == "-" else 1
            self.i += 1
        while True:
            coeff, kind, path = self.term()
            terms.append((sign * coeff, kind, path))
            ch = self.peek()
            if not ch:
                return terms
            if ch not in "+-":
                raise ParseError(f"unexpected character {ch!r}", self.i)
            sign = -1 if ch == "-" else 1
            self.i += 1

    def term(self) -> Tuple[Fraction, str, Optional[Path]]:
        self.skip()
        m = _RATIONAL.match(self.s, self.i)
        coeff = Fraction(1)
        if m:
            start = self.i
            num, _, den = m.group().partition("/")
            if den and int(den) == 0:
                raise ParseError("zero denominator", start)
            coeff = Fraction(int(num), int(den) if den else 1)
            self.i = m.end()
            if self.peek() != "*":
                if m.group() == "0" and self.peek() in ("", "+", "-"):
                    return Fraction(0), "zero", None
                raise ParseError("expected '*' after coefficient", self.i)
            self.i += 1
        kind, path = self.atom()
        return coeff, kind, path

    def atom(self) -> Tuple[str, Path]:
        self.skip()
        if self.s.startswith("cyc(", self.i):
            start = self.i
            self.i += 4
            path = self.path()
            self.expect(")")
            if path.start != path.end:
                raise NonComposablePath("cyc() needs a closed path", start)
            return "cyc", path
        m = _NAME.match(self.s, self.i)
        if not m:
            raise ParseError("expected a path, cyc(...) or an idempotent", self.i)
        name = m.group()
        if name.startswith("e_") and not self.q.has_edge(name) and not self._continues(m.end()):
            vid = name[2:]
            vm = _VERTEX.fullmatch(vid)
            try:
                v = self.q.vertex_index(vid) if vm else None
            except KeyError:
                v = None
            if v is None:
                raise ParseError(f"unknown vertex {vid!r}", self.i + 2)
            self.i = m.end()
            return "idem", self.q.trivial(v)
        return "path", self.path()

    def _continues(self, pos: int) -> bool:
        j = pos
        while j < len(self.s) and self.s[j].isspace():
            j += 1
        return j < len(self.s) and self.s[j] == "."

    def path(self) -> Path:
        edges = []
        positions = []
        while True:
            self.skip()
            m = _NAME.match(self.s, self.i)
            if not m:
                raise ParseError("expected an edge name", self.i)
            name = m.group()
            if not self.q.has_edge(name):
                raise UnknownEdge(f"unknown edge {name!r}", self.i)
            edges.append(self.q.edge_index(name))
            positions.append(self.i)
            self.i = m.end()
            if self.peek() != ".":
                break
            self.i += 1
        q = self.q
        for k in range(1, len(edges)):
            if q.heads[edges[k - 1]] != q.tails[edges[k]]:
                raise NonComposablePath(
                    f"{q.edges[edges[k - 1]].name}.{q.edges[edges[k]].name} is not composable", positions[k])
        return Path(q.tails[edges[0]], q.heads[edges[-1]], tuple(edges))


def parse_element(text: str, q: Quiver, kind: Optional[str] = None) -> Element:
    """Parse an expression; kind may force 'path' or 'necklace' output."""
    terms = _Parser(text, q).parse()
    necklace = kind == "necklace" or (kind is None and any(k == "cyc" for _, k, _ in terms))
    if kind == "path" and any(k == "cyc" for _, k, _ in terms):
        raise ParseError("cyc(...) is not allowed in a path-algebra expression", 0)
    out = {}
    for c, k, p in terms:
        if k == "zero":
            continue
        if necklace and k == "path":
            if p.start != p.end:
                raise NonComposablePath("open path in a necklace expression", 0)
        _accumulate(out, p, c)
    if necklace:
        return NecklaceElement(q, out)
    return PathAlgebraElement(q, out)


def format_expression(x: Element) -> str:
    return format_element(x)
