"""The fixed vocabulary: every predicate any module emits comes from this set."""

from __future__ import annotations

from .model import Iri, Literal, Term

NS = "http://example.org/chemelearn/"

RDF_TYPE = Iri("http://www.w3.org/1999/02/22-rdf-syntax-ns#type")
XSD_INTEGER = Iri("http://www.w3.org/2001/XMLSchema#integer")

# classes
CONCEPT = Iri(NS + "Concept")
LEARNING_UNIT = Iri(NS + "LearningUnit")
CHAPTER = Iri(NS + "Chapter")
MEDIA_OBJECT = Iri(NS + "MediaObject")

# predicates
LABEL = Iri(NS + "label")
SYNONYM = Iri(NS + "synonym")
EXTERNAL_ID = Iri(NS + "externalId")
TEACHES = Iri(NS + "teaches")
REQUIRES = Iri(NS + "requires")
BROADER = Iri(NS + "broader")
PART_OF = Iri(NS + "partOf")
ORDER = Iri(NS + "order")
NEXT = Iri(NS + "next")
HAS_MEDIA = Iri(NS + "hasMedia")
MEDIA_TYPE = Iri(NS + "mediaType")
STUDY_TIME = Iri(NS + "studyTime")
TARGET_GROUP = Iri(NS + "targetGroup")
DIFFICULTY = Iri(NS + "difficulty")
RECOMMENDED_READING = Iri(NS + "recommendedReading")
ALIGNED_WITH = Iri(NS + "alignedWith")

PREDICATES = frozenset(
    {
        RDF_TYPE,
        LABEL,
        SYNONYM,
        EXTERNAL_ID,
        TEACHES,
        REQUIRES,
        BROADER,
        PART_OF,
        ORDER,
        NEXT,
        HAS_MEDIA,
        MEDIA_TYPE,
        STUDY_TIME,
        TARGET_GROUP,
        DIFFICULTY,
        RECOMMENDED_READING,
        ALIGNED_WITH,
    }
)


def unit_iri(token: str) -> Iri:
    return Iri(f"{NS}unit/{token}")


def concept_iri(token: str) -> Iri:
    return Iri(f"{NS}concept/{token}")


def chapter_iri(token: str) -> Iri:
    return Iri(f"{NS}chapter/{token}")


def media_iri(unit_token: str, k: int) -> Iri:
    return Iri(f"{NS}media/{unit_token}-{k}")


def local_id(iri: Iri) -> str:
    """Trailing path segment of a vocabulary IRI ("...unit/u-0001" -> "u-0001")."""
    return iri.value.rsplit("/", 1)[-1]


def int_literal(n: int) -> Literal:
    return Literal(str(int(n)), datatype=XSD_INTEGER)


def int_from_literal(term: Term) -> int | None:
    """Integer value of a digits-only literal, else None."""
    if isinstance(term, Literal) and term.lang is None and term.lexical.isascii() and term.lexical.isdigit():
        return int(term.lexical)
    return None
