"""Knowledge-graph core: triple model, indexed store, interchange I/O, queries."""

from .model import Iri, Literal, Term, TermError, Triple, term_key
from .ntriples import NtriplesError, format_triple, load_store, parse, serialize
from .queries import (
    QueryError,
    Violation,
    prerequisite_closure,
    subjects_of_type,
    transitive_broader,
    validate_schema,
)
from .store import GraphStore

__all__ = [
    "GraphStore",
    "Iri",
    "Literal",
    "NtriplesError",
    "QueryError",
    "Term",
    "TermError",
    "Triple",
    "Violation",
    "format_triple",
    "load_store",
    "parse",
    "prerequisite_closure",
    "serialize",
    "subjects_of_type",
    "term_key",
    "transitive_broader",
    "validate_schema",
]
