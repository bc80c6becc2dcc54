"""Hand-rolled lexer for the style/architecture language.

Identifiers are ``[A-Za-z_][A-Za-z0-9_-]*`` (hyphens allowed, so ``a-b`` is a
single identifier). Comments run ``//`` to end of line. Strings are
double-quoted with backslash escapes.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..constraints import Span
from .ast import Diagnostic, ParseFailure

IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_-]*")
NUMBER_RE = re.compile(r"\d+(\.\d+)?")

PUNCT = [
    "->", "==", "!=", "<=", ">=",
    "{", "}", "(", ")", ":", ";", ",", ".", "=", "|", "<", ">",
]


@dataclass
class Token:
    kind: str       # IDENT | NUMBER | STRING | PUNCT | EOF
    value: object
    span: Span

    def __repr__(self):
        return f"Token({self.kind}, {self.value!r})"


def tokenize(text: str, filename: str = "<input>") -> list[Token]:
    tokens = []
    line, col, i = 1, 1, 0
    n = len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if text.startswith("//", i):
            nl = text.find("\n", i)
            if nl == -1:
                break
            col += nl - i
            i = nl
            continue
        span = Span(filename, line, col)
        if c == '"':
            j = i + 1
            out = []
            while j < n and text[j] != '"':
                if text[j] == "\\" and j + 1 < n:
                    esc = text[j + 1]
                    out.append({"n": "\n", "t": "\t", '"': '"', "\\": "\\"}.get(esc, esc))
                    j += 2
                else:
                    if text[j] == "\n":
                        raise ParseFailure([Diagnostic(span, "unterminated string literal")])
                    out.append(text[j])
                    j += 1
            if j >= n:
                raise ParseFailure([Diagnostic(span, "unterminated string literal")])
            tokens.append(Token("STRING", "".join(out), span))
            col += j + 1 - i
            i = j + 1
            continue
        m = IDENT_RE.match(text, i)
        if m:
            tokens.append(Token("IDENT", m.group(), span))
            col += len(m.group())
            i = m.end()
            continue
        m = NUMBER_RE.match(text, i)
        if m:
            raw = m.group()
            value = float(raw) if "." in raw else int(raw)
            tokens.append(Token("NUMBER", value, span))
            col += len(raw)
            i = m.end()
            continue
        for p in PUNCT:
            if text.startswith(p, i):
                tokens.append(Token("PUNCT", p, span))
                col += len(p)
                i += len(p)
                break
        else:
            raise ParseFailure([Diagnostic(span, f"unexpected character {c!r}")])
    tokens.append(Token("EOF", None, Span(filename, line, col)))
    return tokens
