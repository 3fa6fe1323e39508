"""Line-oriented triple interchange format.

Grammar subset: IRIs in angle brackets, plain / language-tagged / datatyped
literals, one statement per `.`-terminated line, full-line `#` comments.
Blank nodes are rejected by policy. Serialization is canonical: triples in
total order, `\\n` line endings, and exactly the five escapes \\" \\\\ \\n \\r \\t
(all other characters are emitted as raw UTF-8), so equal stores produce
byte-identical files.
"""

from __future__ import annotations

from .model import Iri, Literal, Term, TermError, Triple
from .store import GraphStore


class NtriplesError(ValueError):
    """Hard input failure (non-UTF-8 bytes). Per-line errors are returned, not raised."""


class _LineError(Exception):
    def __init__(self, message: str):
        self.message = message


_ESCAPES = {'"': '"', "\\": "\\", "n": "\n", "r": "\r", "t": "\t"}
_UNESCAPES = {"\\": "\\\\", '"': '\\"', "\n": "\\n", "\r": "\\r", "\t": "\\t"}


class _Cursor:
    def __init__(self, line: str):
        self.line = line
        self.pos = 0

    def eol(self) -> bool:
        return self.pos >= len(self.line)

    def peek(self) -> str:
        return "" if self.eol() else self.line[self.pos]

    def skip_ws(self) -> None:
        while not self.eol() and self.line[self.pos] in " \t":
            self.pos += 1

    def expect_ws(self) -> None:
        if self.eol() or self.line[self.pos] not in " \t":
            raise _LineError(f"expected whitespace at column {self.pos + 1}")
        self.skip_ws()

    def read_iri(self) -> Iri:
        if self.peek() != "<":
            raise _LineError(f"expected '<' at column {self.pos + 1}")
        end = self.line.find(">", self.pos + 1)
        if end < 0:
            raise _LineError("unterminated IRI")
        value = self.line[self.pos + 1 : end]
        self.pos = end + 1
        try:
            return Iri(value)
        except TermError as e:
            raise _LineError(str(e))

    def read_literal(self) -> Literal:
        if self.peek() != '"':
            raise _LineError(f"expected '\"' at column {self.pos + 1}")
        self.pos += 1
        out: list[str] = []
        while True:
            if self.eol():
                raise _LineError("unterminated literal")
            ch = self.line[self.pos]
            self.pos += 1
            if ch == '"':
                break
            if ch == "\\":
                if self.eol():
                    raise _LineError("dangling escape at end of line")
                esc = self.line[self.pos]
                self.pos += 1
                if esc not in _ESCAPES:
                    raise _LineError(f"unsupported escape '\\{esc}'")
                out.append(_ESCAPES[esc])
            else:
                out.append(ch)
        lexical = "".join(out)
        if self.peek() == "@":
            self.pos += 1
            start = self.pos
            while not self.eol() and (self.line[self.pos].isascii() and (self.line[self.pos].isalnum() or self.line[self.pos] == "-")):
                self.pos += 1
            tag = self.line[start : self.pos]
            try:
                return Literal(lexical, lang=tag)
            except TermError as e:
                raise _LineError(str(e))
        if self.line[self.pos : self.pos + 2] == "^^":
            self.pos += 2
            return Literal(lexical, datatype=self.read_iri())
        return Literal(lexical)

    def check_blank(self) -> None:
        if self.line[self.pos : self.pos + 2] == "_:":
            raise _LineError("blank nodes unsupported")


def _parse_line(line: str) -> Triple | None:
    cur = _Cursor(line)
    cur.skip_ws()
    if cur.eol() or cur.peek() == "#":
        return None
    cur.check_blank()
    if cur.peek() == '"':
        raise _LineError("literal in subject position")
    subject = cur.read_iri()
    cur.expect_ws()
    cur.check_blank()
    if cur.peek() == '"':
        raise _LineError("literal in predicate position")
    predicate = cur.read_iri()
    cur.expect_ws()
    cur.check_blank()
    obj: Term
    if cur.peek() == '"':
        obj = cur.read_literal()
    else:
        obj = cur.read_iri()
    cur.skip_ws()
    if cur.peek() != ".":
        raise _LineError(f"expected '.' at column {cur.pos + 1}")
    cur.pos += 1
    cur.skip_ws()
    if not cur.eol():
        raise _LineError(f"trailing characters after '.' at column {cur.pos + 1}")
    return Triple(subject, predicate, obj)


def parse(data: bytes) -> tuple[list[Triple], list[tuple[int, str]]]:
    """Parse bytes into triples plus a (lineNumber, message) list for bad lines."""
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as e:
        raise NtriplesError(f"input is not valid UTF-8: {e}") from None
    triples: list[Triple] = []
    errors: list[tuple[int, str]] = []
    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw[:-1] if raw.endswith("\r") else raw
        try:
            t = _parse_line(line)
        except _LineError as e:
            errors.append((lineno, e.message))
            continue
        if t is not None:
            triples.append(t)
    return triples, errors


def load_store(data: bytes) -> tuple[GraphStore, list[tuple[int, str]]]:
    triples, errors = parse(data)
    store = GraphStore()
    store.insert_all(triples)
    return store, errors


def _escape(s: str) -> str:
    return "".join(_UNESCAPES.get(ch, ch) for ch in s)


def format_term(term: Term) -> str:
    if isinstance(term, Iri):
        return f"<{term.value}>"
    body = f'"{_escape(term.lexical)}"'
    if term.lang is not None:
        return f"{body}@{term.lang}"
    if term.datatype is not None:
        return f"{body}^^<{term.datatype.value}>"
    return body


def format_triple(t: Triple) -> str:
    return f"{format_term(t.subject)} {format_term(t.predicate)} {format_term(t.object)} ."


def serialize(store: GraphStore) -> bytes:
    """Canonical serialization: sorted triples, one per line, LF endings, UTF-8."""
    return "".join(format_triple(t) + "\n" for t in store).encode("utf-8")
