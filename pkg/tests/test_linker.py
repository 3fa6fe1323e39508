import random

from hypothesis import given, settings
from hypothesis import strategies as st

from chemdelt.kg import vocab
from chemdelt.kg.model import Iri, Literal, Triple
from chemdelt.kg.store import GraphStore
from chemdelt.linker import (
    AlignmentLink,
    Lexicon,
    align,
    alignment_report,
    build_lexicon,
    link_entities,
    load_external_vocab,
    normalize,
    token_spans,
)


def test_normalize_strip_and_lower():
    assert normalize("  Benzol  ") == "benzol"
    assert normalize("ESSIG-Säure") == "essig-säure"
    assert normalize("a\t b\n\nc") == "a b c"
    assert normalize("STRASSE ß") == "strasse ß"  # no ß/ss folding


@settings(max_examples=300)
@given(st.text(max_size=60))
def test_normalize_idempotent(text):
    once = normalize(text)
    assert normalize(once) == once


def test_token_spans_hyphens():
    text = "2,4-Dinitrophenol löst a--b x-"
    tokens = [text[a:b] for a, b in token_spans(text)]
    assert tokens == ["2", "4-Dinitrophenol", "löst", "a", "b", "x"]


def _lexicon(mapping: dict[str, list[str]]) -> Lexicon:
    entries = {k: [vocab.concept_iri(c) for c in sorted(v)] for k, v in mapping.items()}
    lex = Lexicon(entries=entries)
    lex.max_token_length = max((len(token_spans(k)) for k in entries), default=0)
    return lex


def test_build_lexicon_from_store():
    store = GraphStore()
    c1, c2 = vocab.concept_iri("c1"), vocab.concept_iri("c2")
    for c in (c1, c2):
        store.insert(Triple(c, vocab.RDF_TYPE, vocab.CONCEPT))
    store.insert(Triple(c1, vocab.LABEL, Literal("Benzol")))
    store.insert(Triple(c1, vocab.LABEL, Literal("Säure")))
    store.insert(Triple(c2, vocab.SYNONYM, Literal("säure")))
    # unit labels must not leak into the lexicon
    u = vocab.unit_iri("u1")
    store.insert(Triple(u, vocab.RDF_TYPE, vocab.LEARNING_UNIT))
    store.insert(Triple(u, vocab.LABEL, Literal("Benzol Grundlagen")))
    lex = build_lexicon(store)
    assert set(lex.entries) == {"benzol", "säure"}
    assert lex.entries["säure"] == [c1, c2]
    assert lex.max_token_length == 1
    assert lex.salience[c1] == 3


def test_build_lexicon_empty_store():
    lex = build_lexicon(GraphStore())
    assert len(lex) == 0
    assert lex.max_token_length == 0


def test_single_mention_offsets():
    lex = _lexicon({"benzol": ["c1"]})
    mentions = link_entities("Benzol ist aromatisch", lex)
    assert len(mentions) == 1
    m = mentions[0]
    assert (m.start, m.end, m.surface, m.concept, m.ambiguous) == (
        0,
        6,
        "Benzol",
        vocab.concept_iri("c1"),
        False,
    )


def test_byte_offsets_with_multibyte_text():
    lex = _lexicon({"säure": ["c1"]})
    text = "Über Säure"
    mentions = link_entities(text, lex)
    assert len(mentions) == 1
    m = mentions[0]
    raw = text.encode("utf-8")
    assert raw[m.start : m.end].decode("utf-8") == m.surface == "Säure"


def test_longest_match_wins():
    lex = _lexicon({"essig": ["c1"], "essig säure": ["c2"]})
    mentions = link_entities("Essig Säure", lex)
    assert len(mentions) == 1
    assert mentions[0].concept == vocab.concept_iri("c2")
    assert mentions[0].surface == "Essig Säure"


def test_context_resolves_ambiguity():
    lex = _lexicon({"säure": ["c1", "c2"]})
    mentions = link_entities("die Säure", lex, context={vocab.concept_iri("c2")})
    assert mentions[0].concept == vocab.concept_iri("c2")
    assert mentions[0].ambiguous is True


def test_salience_then_iri_resolve_ambiguity():
    lex = _lexicon({"säure": ["c1", "c2"]})
    lex.salience = {vocab.concept_iri("c2"): 5, vocab.concept_iri("c1"): 1}
    assert link_entities("Säure", lex)[0].concept == vocab.concept_iri("c2")
    lex.salience = {}
    assert link_entities("Säure", lex)[0].concept == vocab.concept_iri("c1")


def _brute_force_mentions(text: str, lex: Lexicon) -> list[tuple[int, int]]:
    """Enumerate every matching window anywhere, then replay leftmost-longest
    selection over the complete match set."""
    spans = token_spans(text)
    all_matches = []
    for i in range(len(spans)):
        for j in range(i + 1, len(spans) + 1):
            surface = text[spans[i][0] : spans[j - 1][1]]
            if normalize(surface) in lex.entries:
                all_matches.append((i, j))
    chosen = []
    pos = 0
    while True:
        viable = [(i, j) for i, j in all_matches if i >= pos]
        if not viable:
            break
        first = min(i for i, _ in viable)
        j = max(j for i, j in viable if i == first)
        chosen.append((spans[first][0], spans[j - 1][1]))
        pos = j
    return chosen


def test_longest_match_against_brute_force():
    rng = random.Random(42)
    vocab_words = ["essig", "säure", "essig säure", "benzol", "chlor-benzol", "chlor", "oxid", "chlor oxid plus"]
    lex = _lexicon({w: [f"c{k}"] for k, w in enumerate(vocab_words)})
    fillers = ["und", "das", "mit", "wird"]
    for _ in range(300):
        words = []
        for _ in range(rng.randint(0, 12)):
            if rng.random() < 0.5:
                words.append(rng.choice(vocab_words))
            else:
                words.append(rng.choice(fillers))
        text = " ".join(w.title() if rng.random() < 0.5 else w for w in words)
        got = [(m.start, m.end) for m in link_entities(text, lex)]
        # brute-force offsets are char offsets; text here is ASCII-only words
        # except "säure"/"benzol" umlauts, so compare via byte conversion
        expected = []
        for a, b in _brute_force_mentions(text, lex):
            expected.append((len(text[:a].encode()), len(text[:b].encode())))
        assert got == expected


def test_mentions_non_overlapping_sorted():
    rng = random.Random(7)
    lex = _lexicon({"aa": ["c1"], "aa bb": ["c2"], "bb": ["c3"], "cc dd ee": ["c4"]})
    words = ["aa", "bb", "cc", "dd", "ee", "zz"]
    for _ in range(200):
        text = " ".join(rng.choice(words) for _ in range(rng.randint(0, 15)))
        mentions = link_entities(text, lex)
        for a, b in zip(mentions, mentions[1:]):
            assert a.end <= b.start
        raw = text.encode()
        for m in mentions:
            assert raw[m.start : m.end].decode() == m.surface


def test_planted_recall_and_precision():
    rng = random.Random(11)
    labels = [f"stoff{k}" for k in range(30)]
    lex = _lexicon({l: [f"c{k}"] for k, l in enumerate(labels)})
    fillers = ["und", "wird", "mit", "sehr", "dann"]
    for _ in range(100):
        planted = []
        parts = []
        for _ in range(rng.randint(1, 10)):
            parts.extend(rng.choice(fillers) for _ in range(rng.randint(1, 3)))
            label = rng.choice(labels)
            planted.append(label)
            parts.append(label)
        parts.append(rng.choice(fillers))
        text = " ".join(parts)
        mentions = link_entities(text, lex)
        assert [m.surface for m in mentions] == planted  # recall and precision both 100%


# ----------------------------------------------------------------- alignment


def test_load_external_vocab():
    data = (
        '<http://ext/1> <{ns}label> "wasser" .\n'
        '<http://ext/1> <{ns}externalId> "KEY-001" .\n'
        '<http://ext/2> <{ns}label> "salz" .\n'
        '<http://ext/3> <{ns}externalId> "KEY-003" .\n'
        "<http://ext/3> <http://other> <http://ignored> .\n"
    ).format(ns=vocab.NS)
    ext = load_external_vocab(data.encode(), "testvocab")
    assert ext.name == "testvocab"
    assert len(ext.entries) == 3
    by_iri = {e.iri.value: e for e in ext.entries}
    assert by_iri["http://ext/1"].identifier_key == "KEY-001"
    assert by_iri["http://ext/2"].identifier_key is None
    assert by_iri["http://ext/3"].label == ""
    assert load_external_vocab(b"", "empty").entries == []


def _concept(store, cid, label=None, synonyms=(), external=None):
    c = vocab.concept_iri(cid)
    store.insert(Triple(c, vocab.RDF_TYPE, vocab.CONCEPT))
    if label:
        store.insert(Triple(c, vocab.LABEL, Literal(label)))
    for s in synonyms:
        store.insert(Triple(c, vocab.SYNONYM, Literal(s)))
    if external:
        store.insert(Triple(c, vocab.EXTERNAL_ID, Literal(external)))
    return c


def test_align_identifier_beats_label():
    store = GraphStore()
    c1 = _concept(store, "c1", label="wasser", external="KEY-001")
    ext_data = (
        '<http://ext/by-label> <{ns}label> "wasser" .\n'
        '<http://ext/by-id> <{ns}externalId> "KEY-001" .\n'
    ).format(ns=vocab.NS)
    links = align(store, load_external_vocab(ext_data.encode(), "v"))
    assert links == [AlignmentLink(c1, Iri("http://ext/by-id"), "identifier", 1.0)]
    assert store.match(s=c1, p=vocab.ALIGNED_WITH)[0].object == Iri("http://ext/by-id")


def test_align_label_via_normalization():
    store = GraphStore()
    c2 = _concept(store, "c2", label="wasser")
    ext_data = f'<http://ext/9> <{vocab.NS}label> "Wasser" .\n'
    links = align(store, load_external_vocab(ext_data.encode(), "v"))
    assert links == [AlignmentLink(c2, Iri("http://ext/9"), "label", 0.8)]


def test_align_tie_breaks_to_smallest_external_iri():
    store = GraphStore()
    _concept(store, "c1", label="salz")
    ext_data = (
        f'<http://ext/b> <{vocab.NS}label> "salz" .\n'
        f'<http://ext/a> <{vocab.NS}label> "salz" .\n'
    )
    links = align(store, load_external_vocab(ext_data.encode(), "v"))
    assert links[0].external == Iri("http://ext/a")


def _planted_fixture():
    """100 local concepts: 60 with matching identifiers, 30 label-only, 10 unmatched."""
    store = GraphStore()
    ext_lines = []
    for k in range(100):
        cid = f"c{k:03d}"
        if k < 60:
            _concept(store, cid, label=f"loc{k}", external=f"KEY-{k:03d}")
            ext_lines.append(f'<http://ext/{k:03d}> <{vocab.NS}externalId> "KEY-{k:03d}" .')
            if k % 2 == 0:  # identifier must win even when the label also matches
                ext_lines.append(f'<http://ext/label{k:03d}> <{vocab.NS}label> "loc{k}" .')
        elif k < 90:
            if k % 3 == 0:  # a non-matching identifier must fall back to label
                _concept(store, cid, label=f"loc{k}", external=f"MISSING-{k}")
            else:
                _concept(store, cid, label=f"loc{k}")
            ext_lines.append(f'<http://ext/{k:03d}> <{vocab.NS}label> "loc{k}" .')
        else:
            _concept(store, cid, label=f"nowhere{k}", external=f"ABSENT-{k}")
    data = "\n".join(ext_lines).encode() + b"\n"
    return store, load_external_vocab(data, "planted")


def test_alignment_planted_fixture_counts():
    store, ext = _planted_fixture()
    links = align(store, ext)
    identifier = [l for l in links if l.method == "identifier"]
    label = [l for l in links if l.method == "label"]
    assert len(identifier) == 60
    assert len(label) == 30
    assert len(links) == 90  # 10 unlinked
    for l in identifier:
        assert l.confidence == 1.0
        assert not l.external.value.startswith("http://ext/label")
    assert all(l.confidence == 0.8 for l in label)


def test_identifier_precedence_randomized():
    rng = random.Random(3)
    for _ in range(30):
        store = GraphStore()
        ext_lines = []
        with_id = set()
        for k in range(rng.randint(1, 40)):
            cid = f"c{k:03d}"
            has_id = rng.random() < 0.5
            _concept(
                store,
                cid,
                label=f"w{k}",
                external=f"KEY-{k}" if has_id else None,
            )
            if has_id:
                with_id.add(vocab.concept_iri(cid).value)
                ext_lines.append(f'<http://ext/id{k}> <{vocab.NS}externalId> "KEY-{k}" .')
            ext_lines.append(f'<http://ext/lbl{k}> <{vocab.NS}label> "w{k}" .')
        links = align(store, load_external_vocab("\n".join(ext_lines).encode() + b"\n", "v"))
        for link in links:
            if link.local.value in with_id:
                assert link.method == "identifier"


def test_alignment_report_format():
    store = GraphStore()
    _concept(store, "c2", label="b", external="K2")
    _concept(store, "c1", label="a", external="K1")
    ext = (
        f'<http://ext/1> <{vocab.NS}externalId> "K1" .\n'
        f'<http://ext/2> <{vocab.NS}externalId> "K2" .\n'
    )
    links = align(store, load_external_vocab(ext.encode(), "v"))
    report = alignment_report(links)
    lines = report.strip().split("\n")
    assert lines[0] == f"{vocab.concept_iri('c1').value}\thttp://ext/1\tidentifier\t1.0"
    assert lines == sorted(lines)
