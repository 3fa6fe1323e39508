"""Full-text search with TF-IDF scoring and multi-select faceted filtering.

Terms are conjunctive across all fields; score(d) = sum over terms and fields
of weight(field) * tf * idf with idf(t) = ln(1 + N/df(t)). Facet counts use
multi-select semantics: the counts for a dimension are computed with every
filter applied except that dimension's own.

The store holds no prose, so the index builder takes the retained lesson body
texts alongside the store (title and concept labels come from triples).
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field

from .kg import vocab
from .kg.model import Iri, Literal
from .kg.queries import first_literal, int_value, iri_objects, subjects_of_type
from .kg.store import GraphStore
from .linker import normalize, token_spans

FIELD_WEIGHTS = {"title": 3.0, "conceptLabels": 2.0, "body": 1.0}
FACET_DIMENSIONS = ("targetGroup", "difficulty", "mediaType", "chapter", "studyTimeBucket")

STUDY_TIME_BUCKETS = ("0-10", "11-30", "31-60", "61+")


def study_time_bucket(minutes: int) -> str:
    if minutes <= 10:
        return "0-10"
    if minutes <= 30:
        return "11-30"
    if minutes <= 60:
        return "31-60"
    return "61+"


def tokenize(text: str) -> list[str]:
    """Normalized tokens: maximal alphanumeric runs with internal hyphens."""
    norm = normalize(text)
    return [normalize(norm[a:b]) for a, b in token_spans(norm)]


@dataclass
class IndexDoc:
    unit: Iri
    title: str
    field_tokens: dict[str, list[str]]
    facets: dict[str, set[str]]
    token_set: set[str] = field(default_factory=set)
    tf: dict[str, dict[str, int]] = field(default_factory=dict)  # field -> token -> count


@dataclass
class Index:
    docs: dict[str, IndexDoc] = field(default_factory=dict)  # unit IRI string -> doc
    df: Counter = field(default_factory=Counter)

    @property
    def n_docs(self) -> int:
        return len(self.docs)


@dataclass
class SearchQuery:
    terms: list[str] = field(default_factory=list)
    filters: dict[str, set[str]] = field(default_factory=dict)
    page: int = 0
    page_size: int = 10


@dataclass(frozen=True)
class SearchHit:
    unit: Iri
    score: float
    title: str


@dataclass
class ResultPage:
    total: int
    hits: list[SearchHit]
    facet_counts: dict[str, dict[str, int]]


def build_index(store: GraphStore, bodies: dict[str, str] | None = None) -> Index:
    """Index every learning unit in the store; bodies maps unit IRI -> prose."""
    bodies = bodies or {}
    index = Index()
    for unit in subjects_of_type(store, vocab.LEARNING_UNIT):
        title = first_literal(store, unit, vocab.LABEL) or ""
        concept_labels: list[str] = []
        for concept in sorted(iri_objects(store, unit, vocab.TEACHES), key=lambda i: i.value):
            concept_labels.extend(
                t.object.lexical for t in store.match(s=concept, p=vocab.LABEL)
                if isinstance(t.object, Literal)
            )
        field_tokens = {
            "title": tokenize(title),
            "body": tokenize(bodies.get(unit.value, "")),
            "conceptLabels": tokenize(" ".join(concept_labels)),
        }
        facets = {
            "targetGroup": set(),
            "difficulty": set(),
            "mediaType": set(),
            "chapter": set(),
            "studyTimeBucket": set(),
        }
        group = first_literal(store, unit, vocab.TARGET_GROUP)
        if group is not None:
            facets["targetGroup"].add(group)
        difficulty = int_value(store, unit, vocab.DIFFICULTY)
        if difficulty is not None:
            facets["difficulty"].add(str(difficulty))
        for media in iri_objects(store, unit, vocab.HAS_MEDIA):
            mtype = first_literal(store, media, vocab.MEDIA_TYPE)
            if mtype is not None:
                facets["mediaType"].add(mtype)
        for chapter in iri_objects(store, unit, vocab.PART_OF):
            facets["chapter"].add(vocab.local_id(chapter))
        minutes = int_value(store, unit, vocab.STUDY_TIME)
        if minutes is not None:
            facets["studyTimeBucket"].add(study_time_bucket(minutes))

        doc = IndexDoc(unit=unit, title=title, field_tokens=field_tokens, facets=facets)
        for fname, tokens in field_tokens.items():
            doc.tf[fname] = dict(Counter(tokens))
            doc.token_set.update(tokens)
        index.docs[unit.value] = doc
    for doc in index.docs.values():
        for token in doc.token_set:
            index.df[token] += 1
    return index


def _matches_filters(doc: IndexDoc, filters: dict[str, set[str]], exclude: str | None = None) -> bool:
    for dim, values in filters.items():
        if dim == exclude or not values:
            continue
        if not doc.facets.get(dim, set()) & values:
            return False
    return True


def _score(index: Index, doc: IndexDoc, terms: list[str]) -> float:
    if not terms:
        return 0.0
    total = 0.0
    for term in terms:
        df = index.df.get(term, 0)
        if df == 0:
            return 0.0
        idf = math.log(1.0 + index.n_docs / df)
        for fname, weight in FIELD_WEIGHTS.items():
            tf = doc.tf[fname].get(term, 0)
            if tf:
                total += weight * tf * idf
    return total


def search(index: Index, query: SearchQuery) -> ResultPage:
    candidates = [
        doc for doc in index.docs.values()
        if all(term in doc.token_set for term in query.terms)
    ]
    hits_docs = [d for d in candidates if _matches_filters(d, query.filters)]
    scored = sorted(
        ((_score(index, d, query.terms), d) for d in hits_docs),
        key=lambda pair: (-pair[0], pair[1].unit.value),
    )
    total = len(scored)
    start = query.page * query.page_size
    page = scored[start : start + query.page_size]

    facet_counts: dict[str, dict[str, int]] = {}
    for dim in FACET_DIMENSIONS:
        counter: Counter = Counter()
        for doc in candidates:
            if _matches_filters(doc, query.filters, exclude=dim):
                counter.update(doc.facets.get(dim, set()))
        facet_counts[dim] = dict(sorted(counter.items()))

    return ResultPage(
        total=total,
        hits=[SearchHit(d.unit, score, d.title) for score, d in page],
        facet_counts=facet_counts,
    )
