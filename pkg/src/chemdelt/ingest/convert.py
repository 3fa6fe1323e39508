"""Conversion of parsed course documents into graph triples.

The mapping is bit-exact and documented in the README; per lesson it emits
type, label, partOf, order, studyTime, targetGroup and difficulty (7 triples),
plus recommendedReading / hasMedia+mediaType / teaches triples and the
order-derived next chain, plus one type triple per chapter and the concept
blocks. Dangling references are reported and skipped, never emitted.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..kg import vocab
from ..kg.model import Iri, Literal, Triple
from ..kg.store import GraphStore
from ..linker import build_lexicon, link_entities
from .clem import ChemRef, ConceptDoc, LessonDoc, MediaRef, TextRun


class ConversionError(ValueError):
    pass


@dataclass
class ConversionReport:
    files_parsed: int = 0
    triples_emitted: int = 0
    mentions_linked: int = 0
    mentions_ambiguous: int = 0
    dangling_refs: int = 0
    diagnostics: list[str] = field(default_factory=list)


@dataclass(frozen=True)
class CorpusStats:
    pages: int
    chapters: int
    media_objects: int
    concepts: int
    triples: int


def convert_corpus(
    lessons: list[LessonDoc],
    concepts: list[ConceptDoc],
    link=link_entities,
) -> tuple[GraphStore, ConversionReport]:
    """Emit the full corpus into a fresh store.

    Explicit chem references become teaches triples directly; plain text runs
    go through the entity linker and accepted mentions become teaches triples
    as well, with the chapter's already-linked concepts as linking context.
    """
    _check_unique(lessons, concepts)
    report = ConversionReport(files_parsed=len(lessons) + (1 if concepts else 0))
    store = GraphStore()
    emitted = 0

    unit_ids = {doc.id for doc in lessons}
    concept_ids = {doc.id for doc in concepts}

    def put(subject: Iri, predicate: Iri, obj) -> None:
        nonlocal emitted
        if store.insert(Triple(subject, predicate, obj)):
            emitted += 1

    for doc in sorted(concepts, key=lambda d: d.id):
        c = vocab.concept_iri(doc.id)
        put(c, vocab.RDF_TYPE, vocab.CONCEPT)
        put(c, vocab.LABEL, Literal(doc.label))
        for synonym in doc.synonyms:
            put(c, vocab.SYNONYM, Literal(synonym))
        for ref in doc.broader:
            if ref in concept_ids:
                put(c, vocab.BROADER, vocab.concept_iri(ref))
            else:
                _dangle(report, f"concept {doc.id}: broader ref '{ref}' does not resolve")
        for ref in doc.requires:
            if ref in concept_ids:
                put(c, vocab.REQUIRES, vocab.concept_iri(ref))
            else:
                _dangle(report, f"concept {doc.id}: requires ref '{ref}' does not resolve")
        if doc.external_id is not None:
            put(c, vocab.EXTERNAL_ID, Literal(doc.external_id))

    lexicon = build_lexicon(store)

    by_chapter: dict[str, list[LessonDoc]] = {}
    for doc in lessons:
        by_chapter.setdefault(doc.chapter_id, []).append(doc)

    for chapter_id in sorted(by_chapter):
        chapter = vocab.chapter_iri(chapter_id)
        put(chapter, vocab.RDF_TYPE, vocab.CHAPTER)
        docs = sorted(by_chapter[chapter_id], key=lambda d: d.order)
        context: set[Iri] = set()
        for doc in docs:
            unit = vocab.unit_iri(doc.id)
            put(unit, vocab.RDF_TYPE, vocab.LEARNING_UNIT)
            put(unit, vocab.LABEL, Literal(doc.title))
            put(unit, vocab.PART_OF, chapter)
            put(unit, vocab.ORDER, vocab.int_literal(doc.order))
            put(unit, vocab.STUDY_TIME, vocab.int_literal(doc.study_time))
            put(unit, vocab.TARGET_GROUP, Literal(doc.target_group))
            put(unit, vocab.DIFFICULTY, vocab.int_literal(doc.difficulty))
            for ref in doc.recommended_reading:
                if ref in unit_ids:
                    put(unit, vocab.RECOMMENDED_READING, vocab.unit_iri(ref))
                else:
                    _dangle(report, f"lesson {doc.id}: recommendedReading '{ref}' does not resolve")
            media_index = 0
            for run in doc.body:
                if isinstance(run, MediaRef):
                    media_index += 1
                    media = vocab.media_iri(doc.id, media_index)
                    put(unit, vocab.HAS_MEDIA, media)
                    put(media, vocab.MEDIA_TYPE, Literal(run.type))
                elif isinstance(run, ChemRef):
                    if run.concept_id in concept_ids:
                        concept = vocab.concept_iri(run.concept_id)
                        put(unit, vocab.TEACHES, concept)
                        context.add(concept)
                    else:
                        _dangle(report, f"lesson {doc.id}: chem ref '{run.concept_id}' does not resolve")
            for run in doc.body:
                if isinstance(run, TextRun):
                    for mention in link(run.text, lexicon, context):
                        put(unit, vocab.TEACHES, mention.concept)
                        context.add(mention.concept)
                        report.mentions_linked += 1
                        if mention.ambiguous:
                            report.mentions_ambiguous += 1
        for prev, nxt in zip(docs, docs[1:]):
            put(vocab.unit_iri(prev.id), vocab.NEXT, vocab.unit_iri(nxt.id))

    report.triples_emitted = emitted
    assert emitted == len(store)
    return store, report


def _dangle(report: ConversionReport, message: str) -> None:
    report.dangling_refs += 1
    report.diagnostics.append(message)


def _check_unique(lessons: list[LessonDoc], concepts: list[ConceptDoc]) -> None:
    seen: set[str] = set()
    for doc in lessons:
        if doc.id in seen:
            raise ConversionError(f"duplicate lesson id: {doc.id}")
        seen.add(doc.id)
    seen.clear()
    for doc in concepts:
        if doc.id in seen:
            raise ConversionError(f"duplicate concept id: {doc.id}")
        seen.add(doc.id)
    orders: set[tuple[str, int]] = set()
    for doc in lessons:
        key = (doc.chapter_id, doc.order)
        if key in orders:
            raise ConversionError(f"duplicate order {doc.order} in chapter {doc.chapter_id}")
        orders.add(key)


def corpus_stats(store: GraphStore) -> CorpusStats:
    """Headline corpus counters. Media objects are counted as distinct subjects
    of mediaType triples (media carry no type triple of their own)."""
    return CorpusStats(
        pages=len(store.subjects(vocab.RDF_TYPE, vocab.LEARNING_UNIT)),
        chapters=len(store.subjects(vocab.RDF_TYPE, vocab.CHAPTER)),
        media_objects=len({t.subject for t in store.match(p=vocab.MEDIA_TYPE)}),
        concepts=len(store.subjects(vocab.RDF_TYPE, vocab.CONCEPT)),
        triples=len(store),
    )
