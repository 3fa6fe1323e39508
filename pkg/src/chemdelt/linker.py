"""Dictionary-based entity linking and external-vocabulary alignment.

Mentions are located by greedy longest-match over normalized label windows;
alignment connects local concepts to external vocabulary entries by identifier
equality first, label equality second.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass, field

from .kg import vocab
from .kg.model import Iri, Literal, Triple
from .kg.ntriples import parse as parse_ntriples
from .kg.queries import subjects_of_type
from .kg.store import GraphStore

IDENTIFIER_CONFIDENCE = 1.0
LABEL_CONFIDENCE = 0.8


def normalize(text: str) -> str:
    """NFC, lowercased, whitespace runs collapsed to single spaces, stripped.

    Applied to a fixpoint so the function is idempotent even for inputs where
    lowercasing disturbs the composed form.
    """
    s = text
    while True:
        nxt = " ".join(unicodedata.normalize("NFC", s).lower().split())
        if nxt == s:
            return s
        s = nxt


def token_spans(text: str) -> list[tuple[int, int]]:
    """Character spans of maximal alphanumeric runs, keeping internal hyphens."""
    spans: list[tuple[int, int]] = []
    i, n = 0, len(text)
    while i < n:
        if not text[i].isalnum():
            i += 1
            continue
        j = i + 1
        while j < n:
            ch = text[j]
            if ch.isalnum():
                j += 1
            elif ch == "-" and j + 1 < n and text[j + 1].isalnum():
                j += 2
            else:
                break
        spans.append((i, j))
        i = j
    return spans


@dataclass
class Lexicon:
    """Normalized label -> sorted candidate concepts, plus tie-break salience.

    Salience (triples-in-store per concept, subject or object position) is
    captured at build time because mention linking runs without store access.
    """

    entries: dict[str, list[Iri]] = field(default_factory=dict)
    max_token_length: int = 0
    salience: dict[Iri, int] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.entries)


def build_lexicon(store: GraphStore) -> Lexicon:
    """Lexicon over the labels and synonyms of every typed concept in the store."""
    entries: dict[str, set[Iri]] = {}
    salience: dict[Iri, int] = {}
    for concept in subjects_of_type(store, vocab.CONCEPT):
        salience[concept] = len(store.match(s=concept)) + len(store.match(o=concept))
        for predicate in (vocab.LABEL, vocab.SYNONYM):
            for t in store.match(s=concept, p=predicate):
                if not isinstance(t.object, Literal):
                    continue
                key = normalize(t.object.lexical)
                if key:
                    entries.setdefault(key, set()).add(concept)
    lexicon = Lexicon(
        entries={k: sorted(v, key=lambda i: i.value) for k, v in entries.items()},
        salience=salience,
    )
    lexicon.max_token_length = max((len(token_spans(k)) for k in lexicon.entries), default=0)
    return lexicon


@dataclass(frozen=True)
class Mention:
    """A located concept occurrence. Offsets are byte offsets into the UTF-8 text."""

    start: int
    end: int
    surface: str
    concept: Iri
    ambiguous: bool


def _resolve(candidates: list[Iri], context: set[Iri], salience: dict[Iri, int]) -> tuple[Iri, bool]:
    if len(candidates) == 1:
        return candidates[0], False
    in_context = [c for c in candidates if c in context]
    if len(in_context) == 1:
        return in_context[0], True
    best = min(candidates, key=lambda c: (-salience.get(c, 0), c.value))
    return best, True


def link_entities(text: str, lexicon: Lexicon, context: set[Iri] | None = None) -> list[Mention]:
    """Greedy longest-match scan; returns non-overlapping mentions sorted by start.

    Ambiguity resolution order: unique candidate in context, then highest
    salience, then smallest IRI.
    """
    context = context or set()
    spans = token_spans(text)
    if not spans or not lexicon.entries:
        return []
    byte_at = [0] * (len(text) + 1)
    for i, ch in enumerate(text):
        byte_at[i + 1] = byte_at[i] + len(ch.encode("utf-8"))
    mentions: list[Mention] = []
    i = 0
    while i < len(spans):
        hit = False
        for j in range(min(i + lexicon.max_token_length, len(spans)), i, -1):
            start, end = spans[i][0], spans[j - 1][1]
            surface = text[start:end]
            candidates = lexicon.entries.get(normalize(surface))
            if candidates:
                concept, ambiguous = _resolve(candidates, context, lexicon.salience)
                mentions.append(Mention(byte_at[start], byte_at[end], surface, concept, ambiguous))
                i = j
                hit = True
                break
        if not hit:
            i += 1
    return mentions


@dataclass(frozen=True)
class VocabEntry:
    iri: Iri
    label: str
    identifier_key: str | None = None


@dataclass
class ExternalVocab:
    name: str
    entries: list[VocabEntry] = field(default_factory=list)


def vocab_from_triples(triples, name: str) -> ExternalVocab:
    labels: dict[Iri, list[str]] = {}
    keys: dict[Iri, list[str]] = {}
    for t in triples:
        if not isinstance(t.object, Literal):
            continue
        if t.predicate == vocab.LABEL:
            labels.setdefault(t.subject, []).append(t.object.lexical)
        elif t.predicate == vocab.EXTERNAL_ID:
            keys.setdefault(t.subject, []).append(t.object.lexical)
    entries = []
    for subject in sorted(set(labels) | set(keys), key=lambda i: i.value):
        entries.append(
            VocabEntry(
                iri=subject,
                label=min(labels.get(subject, [""])),
                identifier_key=min(keys[subject]) if subject in keys else None,
            )
        )
    return ExternalVocab(name=name, entries=entries)


def load_external_vocab(data: bytes, name: str) -> ExternalVocab:
    """Build a vocabulary from label / externalId triples; other predicates ignored."""
    triples, _errors = parse_ntriples(data)
    return vocab_from_triples(triples, name)


@dataclass(frozen=True)
class AlignmentLink:
    local: Iri
    external: Iri
    method: str  # "identifier" | "label"
    confidence: float


def align(store: GraphStore, ext: ExternalVocab) -> list[AlignmentLink]:
    """Link local concepts to the external vocabulary and record the links.

    Identifier equality always wins over label equality; candidate ties break
    toward the smallest external IRI. Emits one alignedWith triple per link.
    """
    by_key: dict[str, list[VocabEntry]] = {}
    by_label: dict[str, list[VocabEntry]] = {}
    for entry in ext.entries:
        if entry.identifier_key is not None:
            by_key.setdefault(entry.identifier_key, []).append(entry)
        norm = normalize(entry.label)
        if norm:
            by_label.setdefault(norm, []).append(entry)

    links: list[AlignmentLink] = []
    for concept in sorted(subjects_of_type(store, vocab.CONCEPT), key=lambda i: i.value):
        candidates: list[VocabEntry] = []
        method = "identifier"
        for t in store.match(s=concept, p=vocab.EXTERNAL_ID):
            if isinstance(t.object, Literal):
                candidates.extend(by_key.get(t.object.lexical, []))
        if not candidates:
            method = "label"
            for predicate in (vocab.LABEL, vocab.SYNONYM):
                for t in store.match(s=concept, p=predicate):
                    if isinstance(t.object, Literal):
                        candidates.extend(by_label.get(normalize(t.object.lexical), []))
        if not candidates:
            continue
        chosen = min(candidates, key=lambda e: e.iri.value)
        confidence = IDENTIFIER_CONFIDENCE if method == "identifier" else LABEL_CONFIDENCE
        links.append(AlignmentLink(concept, chosen.iri, method, confidence))
        store.insert(Triple(concept, vocab.ALIGNED_WITH, chosen.iri))
    return links


def alignment_report(links: list[AlignmentLink]) -> str:
    """Tab-separated link report sorted by local IRI."""
    lines = [
        f"{l.local.value}\t{l.external.value}\t{l.method}\t{l.confidence!r}"
        for l in sorted(links, key=lambda l: l.local.value)
    ]
    return "".join(line + "\n" for line in lines)
