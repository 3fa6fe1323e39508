"""Shared fixtures and independent oracles used across the suite.

The oracles here deliberately avoid the production code paths they check:
pattern matching is re-done as a linear scan, search as a naive per-document
recount, and trajectory invariants are re-derived from raw store edges.
"""

from __future__ import annotations

import math
import random

from chemdelt.kg import vocab
from chemdelt.kg.model import Iri, Literal, Triple
from chemdelt.kg.store import GraphStore
from chemdelt.search import FACET_DIMENSIONS, FIELD_WEIGHTS

# ---------------------------------------------------------------- random stores

_SCHEMES = ("http", "urn", "tag")
_WORDS = ("a", "b", "c", "benzol", "säure", "x1", "n-2")
_LANGS = (None, "de", "en", "de-DE")


def random_iri(rng: random.Random) -> Iri:
    scheme = rng.choice(_SCHEMES)
    path = "/".join(rng.choice(_WORDS) for _ in range(rng.randint(1, 3)))
    if scheme == "http":
        return Iri(f"http://{path}")
    return Iri(f"{scheme}:{path}")


def random_literal(rng: random.Random) -> Literal:
    lexical = " ".join(rng.choice(_WORDS) for _ in range(rng.randint(0, 3)))
    if rng.random() < 0.2:
        lexical += rng.choice(['"', "\\", "\n", "\r", "\t", "ü"])
    kind = rng.random()
    if kind < 0.5:
        return Literal(lexical)
    if kind < 0.75:
        return Literal(lexical, lang=rng.choice([l for l in _LANGS if l]))
    return Literal(lexical, datatype=random_iri(rng))


def random_triple(rng: random.Random) -> Triple:
    obj = random_iri(rng) if rng.random() < 0.5 else random_literal(rng)
    return Triple(random_iri(rng), random_iri(rng), obj)


def random_store(rng: random.Random, max_triples: int) -> GraphStore:
    store = GraphStore()
    for _ in range(rng.randint(0, max_triples)):
        store.insert(random_triple(rng))
    return store


def match_oracle(store: GraphStore, s=None, p=None, o=None) -> list[Triple]:
    """Linear scan over every triple, sorted by the canonical key."""
    out = [
        t
        for t in store
        if (s is None or t.subject == s)
        and (p is None or t.predicate == p)
        and (o is None or t.object == o)
    ]
    return sorted(out, key=lambda t: t.sort_key())

# ---------------------------------------------------------------- search oracle


def naive_search(index, terms, filters, page, page_size):
    """Recompute totals, hits, scores and facet counts per document from the
    token lists, with no inverted index involved."""
    docs = sorted(index.docs.values(), key=lambda d: d.unit.value)
    n = len(docs)

    def doc_has(doc, term):
        return any(term in tokens for tokens in doc.field_tokens.values())

    def df(term):
        return sum(1 for d in docs if doc_has(d, term))

    def passes(doc, exclude=None):
        for dim, values in filters.items():
            if dim == exclude or not values:
                continue
            if not (doc.facets.get(dim, set()) & values):
                return False
        return True

    def score(doc):
        if not terms:
            return 0.0
        total = 0.0
        for term in terms:
            d = df(term)
            if d == 0:
                return 0.0
            idf = math.log(1 + n / d)
            for fname, weight in FIELD_WEIGHTS.items():
                total += weight * doc.field_tokens[fname].count(term) * idf
        return total

    candidates = [d for d in docs if all(doc_has(d, t) for t in terms)]
    matched = [d for d in candidates if passes(d)]
    ranked = sorted(((score(d), d) for d in matched), key=lambda x: (-x[0], x[1].unit.value))
    facet_counts = {}
    for dim in FACET_DIMENSIONS:
        counts = {}
        for d in candidates:
            if passes(d, exclude=dim):
                for value in d.facets.get(dim, set()):
                    counts[value] = counts.get(value, 0) + 1
        facet_counts[dim] = counts
    return {
        "total": len(ranked),
        "hits": ranked[page * page_size : (page + 1) * page_size],
        "facets": facet_counts,
    }

# ----------------------------------------------------------- trajectory fixtures


def build_course_store(
    concepts: dict[str, list[str]],
    units: dict[str, dict],
    chapters: dict[str, list[str]] | None = None,
) -> GraphStore:
    """Small hand-specified course graph.

    concepts: id -> list of required concept ids
    units: id -> {teaches: [...], minutes: int, difficulty: int, chapter: str, order: int}
    chapters: id -> unit ids in next-chain order (links emitted in list order)
    """
    store = GraphStore()
    for cid, requires in concepts.items():
        c = vocab.concept_iri(cid)
        store.insert(Triple(c, vocab.RDF_TYPE, vocab.CONCEPT))
        store.insert(Triple(c, vocab.LABEL, Literal(cid)))
        for dep in requires:
            store.insert(Triple(c, vocab.REQUIRES, vocab.concept_iri(dep)))
    for uid, info in units.items():
        u = vocab.unit_iri(uid)
        store.insert(Triple(u, vocab.RDF_TYPE, vocab.LEARNING_UNIT))
        store.insert(Triple(u, vocab.LABEL, Literal(info.get("title", uid))))
        store.insert(Triple(u, vocab.STUDY_TIME, vocab.int_literal(info.get("minutes", 10))))
        store.insert(Triple(u, vocab.DIFFICULTY, vocab.int_literal(info.get("difficulty", 3))))
        store.insert(Triple(u, vocab.TARGET_GROUP, Literal(info.get("targetGroup", "students"))))
        if "chapter" in info:
            store.insert(Triple(u, vocab.PART_OF, vocab.chapter_iri(info["chapter"])))
        if "order" in info:
            store.insert(Triple(u, vocab.ORDER, vocab.int_literal(info["order"])))
        for cid in info.get("teaches", []):
            store.insert(Triple(u, vocab.TEACHES, vocab.concept_iri(cid)))
    for chid, unit_ids in (chapters or {}).items():
        ch = vocab.chapter_iri(chid)
        store.insert(Triple(ch, vocab.RDF_TYPE, vocab.CHAPTER))
        for prev, nxt in zip(unit_ids, unit_ids[1:]):
            store.insert(Triple(vocab.unit_iri(prev), vocab.NEXT, vocab.unit_iri(nxt)))
    return store


def random_course(rng: random.Random, max_concepts: int = 200, max_units: int = 400):
    """Random acyclic course: forward-only prerequisite edges over a permutation,
    units teaching 1..3 concepts each. Returns (store, concept_iris)."""
    n_concepts = rng.randint(1, max_concepts)
    n_units = rng.randint(0, max_units)
    ids = [f"c{i:03d}" for i in range(n_concepts)]
    perm = list(range(n_concepts))
    rng.shuffle(perm)
    pos = {i: k for k, i in enumerate(perm)}
    concepts = {}
    for i in range(n_concepts):
        earlier = [ids[j] for j in range(n_concepts) if pos[j] < pos[i]]
        k = min(len(earlier), rng.randint(0, 3))
        concepts[ids[i]] = rng.sample(earlier, k) if k else []
    units = {}
    for u in range(n_units):
        taught = rng.sample(ids, min(len(ids), rng.randint(1, 3)))
        units[f"u{u:03d}"] = {
            "teaches": taught,
            "minutes": rng.randint(0, 60),
            "difficulty": rng.randint(1, 5),
        }
    store = build_course_store(concepts, units)
    return store, [vocab.concept_iri(c) for c in ids]


def check_trajectory(store: GraphStore, required: list[Iri], mastered: set[Iri], trajectory) -> None:
    """Independent invariant validator: soundness, completeness, disjointness,
    step bound, and the total-minutes sum, all re-derived from the store."""
    required_set = set(required)
    contributed: dict[Iri, int] = {}
    units_seen = set()
    for i, step in enumerate(trajectory.steps):
        assert step.unit not in units_seen, "duplicate unit in trajectory"
        units_seen.add(step.unit)
        for c in step.contributes:
            assert c not in contributed, "concept contributed twice"
            contributed[c] = i
    overlap = set(contributed) & trajectory.gaps
    assert not overlap, f"contributes and gaps overlap: {overlap}"
    assert set(contributed) | trajectory.gaps == required_set, "completeness violated"
    assert len(trajectory.steps) <= len(required_set), "step bound violated"
    assert trajectory.total_minutes == sum(s.study_minutes for s in trajectory.steps)
    for c, i in contributed.items():
        for t in store.match(s=c, p=vocab.REQUIRES):
            dep = t.object
            if not isinstance(dep, Iri) or dep not in required_set:
                continue
            if dep in mastered or dep in trajectory.gaps:
                continue
            assert dep in contributed and contributed[dep] <= i, (
                f"{dep.value} must be taught at or before step {i}"
            )
