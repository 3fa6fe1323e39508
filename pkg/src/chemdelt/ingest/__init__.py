"""Course ingestion: strict XML parsing, triple conversion, corpus generation."""

from .clem import (
    ChemRef,
    ClemError,
    ConceptDoc,
    LessonDoc,
    MediaRef,
    TextRun,
    parse_concept_xml,
    parse_lesson_xml,
)
from .convert import ConversionError, ConversionReport, CorpusStats, convert_corpus, corpus_stats
from .generate import CorpusSummary, Xorshift64Star, generate_corpus

__all__ = [
    "ChemRef",
    "ClemError",
    "ConceptDoc",
    "ConversionError",
    "ConversionReport",
    "CorpusStats",
    "CorpusSummary",
    "LessonDoc",
    "MediaRef",
    "TextRun",
    "Xorshift64Star",
    "convert_corpus",
    "corpus_stats",
    "generate_corpus",
    "parse_concept_xml",
    "parse_lesson_xml",
]
