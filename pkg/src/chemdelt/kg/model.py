"""Triple data model: IRIs, literals, and totally ordered triples."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

_IRI_RE = re.compile(r'^[A-Za-z][A-Za-z0-9+.\-]*:[^\x00-\x20<>"{}|^`\\]*$')
_LANG_RE = re.compile(r"^[A-Za-z]+(-[A-Za-z0-9]+)*$")


class TermError(ValueError):
    """Malformed IRI, literal, or triple."""


@dataclass(frozen=True)
class Iri:
    """Absolute IRI: a scheme, a colon, and no whitespace or angle brackets."""

    value: str

    def __post_init__(self) -> None:
        if not isinstance(self.value, str) or not _IRI_RE.match(self.value):
            raise TermError(f"malformed IRI: {self.value!r}")

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Literal:
    """A literal value: lexical form plus at most one of language tag / datatype.

    Literals compare by their (lexical, tag/datatype) pair; there is no
    value-space normalization, so "01" and "1" are distinct.
    """

    lexical: str
    lang: str | None = None
    datatype: Iri | None = None

    def __post_init__(self) -> None:
        if not isinstance(self.lexical, str):
            raise TermError("literal lexical form must be a string")
        if self.lang is not None and self.datatype is not None:
            raise TermError("literal cannot carry both a language tag and a datatype")
        if self.lang is not None and not _LANG_RE.match(self.lang):
            raise TermError(f"malformed language tag: {self.lang!r}")
        if self.datatype is not None and not isinstance(self.datatype, Iri):
            raise TermError("literal datatype must be an Iri")


Term = Union[Iri, Literal]


def term_key(term: Term) -> tuple:
    """Total-order sort key over terms: IRIs before literals, then codepoint order."""
    if isinstance(term, Iri):
        return (0, term.value, 0, "")
    if isinstance(term, Literal):
        if term.lang is not None:
            return (1, term.lexical, 1, term.lang)
        if term.datatype is not None:
            return (1, term.lexical, 2, term.datatype.value)
        return (1, term.lexical, 0, "")
    raise TermError(f"not a term: {term!r}")


@dataclass(frozen=True)
class Triple:
    """One (subject, predicate, object) statement. Subject/predicate are IRIs."""

    subject: Iri
    predicate: Iri
    object: Term

    def __post_init__(self) -> None:
        if not isinstance(self.subject, Iri):
            if isinstance(self.subject, Literal):
                raise TermError("literal in subject position")
            raise TermError(f"subject must be an IRI: {self.subject!r}")
        if not isinstance(self.predicate, Iri):
            if isinstance(self.predicate, Literal):
                raise TermError("literal in predicate position")
            raise TermError(f"predicate must be an IRI: {self.predicate!r}")
        if not isinstance(self.object, (Iri, Literal)):
            raise TermError(f"object must be an IRI or literal: {self.object!r}")

    def sort_key(self) -> tuple:
        return (self.subject.value, self.predicate.value, term_key(self.object))

    def __lt__(self, other: "Triple") -> bool:
        return self.sort_key() < other.sort_key()
