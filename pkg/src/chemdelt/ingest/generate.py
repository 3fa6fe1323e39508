"""Deterministic synthetic-corpus generator.

Everything derives from one xorshift64* stream, so a given parameter set
always produces a byte-identical file tree. Shape defaults target the desk
scale the engine is tested at: 170 chapters averaging 10.6 pages (~1,800
pages) with ~1.4 media objects per page (~2,500 total).

PRNG: xorshift64*: state' = s ^= s>>12, s ^= s<<25, s ^= s>>27 (64-bit);
output = state' * 0x2545F4914F6CDD1D mod 2^64. Bounded draws use the
multiply-shift reduction (next * n) >> 64.

The concept prerequisite graph is a DAG by construction: concepts are
permuted once and edges are only ever sampled from later to earlier
permutation positions. Roughly 30% of in-text concept occurrences are left
as plain text rather than tagged references, so entity linking has real work
to do on every generated corpus. All generated references resolve.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from xml.sax.saxutils import escape, quoteattr

DEFAULT_SEED = 42
DEFAULT_CHAPTERS = 170
DEFAULT_MEAN_PAGES = 10.6
DEFAULT_CONCEPTS = 400
DEFAULT_DENSITY = 0.01

_MASK64 = (1 << 64) - 1


class Xorshift64Star:
    def __init__(self, seed: int):
        self.state = (seed & _MASK64) or 0x9E3779B97F4A7C15

    def next_u64(self) -> int:
        x = self.state
        x ^= x >> 12
        x ^= (x << 25) & _MASK64
        x ^= x >> 27
        self.state = x
        return (x * 0x2545F4914F6CDD1D) & _MASK64

    def below(self, n: int) -> int:
        return (self.next_u64() * n) >> 64

    def randint(self, lo: int, hi: int) -> int:
        return lo + self.below(hi - lo + 1)

    def random(self) -> float:
        return (self.next_u64() >> 11) / float(1 << 53)

    def chance(self, p: float) -> bool:
        return self.random() < p

    def choice(self, seq):
        return seq[self.below(len(seq))]

    def shuffle(self, items: list) -> None:
        for i in range(len(items) - 1, 0, -1):
            j = self.below(i + 1)
            items[i], items[j] = items[j], items[i]

    def sample_distinct(self, n: int, k: int) -> list[int]:
        """k distinct indices below n (k <= n)."""
        picked: list[int] = []
        seen: set[int] = set()
        while len(picked) < k:
            i = self.below(n)
            if i not in seen:
                seen.add(i)
                picked.append(i)
        return picked


_STEMS = (
    "chlor", "fluor", "brom", "iod", "meth", "eth", "prop", "but", "pent",
    "hex", "benz", "phen", "hydrox", "oxal", "amin", "nitro", "sulf", "carb",
    "cycl", "acet", "keto", "form", "glyc", "lact", "malon",
)
_SUFFIXES = ("an", "en", "in", "ol", "al", "on", "id", "at", "amid", "oxid", "ester", "säure")
_SYNONYM_TAILS = ("Säure", "Base", "Verbindung", "Lösung")

_FILLER = (
    "die", "der", "das", "eine", "wird", "mit", "durch", "unter", "bildet",
    "reagiert", "stark", "schwach", "farblos", "löslich", "wichtig", "typisch",
    "dabei", "zuerst", "danach", "schließlich", "häufig", "selten", "neben",
    "gegen", "ohne", "innerhalb", "während", "deutlich", "langsam", "schnell",
)

_MEDIA_EXT = {"video": "mp4", "animation": "gif", "image": "png", "applet": "jar"}
# per-page media count distribution, mean ~1.39
_MEDIA_WEIGHTS = ((0, 0.24), (1, 0.30), (2, 0.29), (3, 0.17))
_TARGET_WEIGHTS = (("students", 0.55), ("pupils", 0.2), ("teachers", 0.15), ("trainees", 0.1))


def _weighted(rng: Xorshift64Star, table) -> object:
    x = rng.random()
    acc = 0.0
    for value, w in table:
        acc += w
        if x < acc:
            return value
    return table[-1][0]


def _chem_name(rng: Xorshift64Star, taken: set[str]) -> str:
    for attempt in range(100):
        stems = 1 + rng.below(2)
        word = "".join(rng.choice(_STEMS) for _ in range(stems)) + rng.choice(_SUFFIXES)
        name = word[0].upper() + word[1:]
        if name.lower() not in taken:
            taken.add(name.lower())
            return name
    # name space exhausted; force uniqueness with a counter suffix
    k = 1
    while f"{name.lower()}-{k}" in taken:
        k += 1
    taken.add(f"{name.lower()}-{k}")
    return f"{name}-{k}"


@dataclass
class GeneratedConcept:
    id: str
    label: str
    synonyms: list[str]
    broader: list[str]
    requires: list[str]
    external_id: str | None


@dataclass
class CorpusSummary:
    chapters: int
    pages: int
    media_objects: int
    concepts: int
    lesson_files: list[str]
    concept_file: str


def _generate_concepts(rng: Xorshift64Star, count: int, density: float) -> list[GeneratedConcept]:
    taken: set[str] = set()
    order = list(range(count))
    rng.shuffle(order)
    concepts: list[GeneratedConcept] = []
    ids = [f"c-{i + 1:04d}" for i in range(count)]
    labels = [_chem_name(rng, taken) for _ in range(count)]
    synonyms: list[list[str]] = []
    for i in range(count):
        syns = []
        n_syn = rng.below(3)  # 0..2
        for _ in range(n_syn):
            if rng.chance(0.25):
                syns.append(f"{_chem_name(rng, taken)} {rng.choice(_SYNONYM_TAILS)}")
            else:
                syns.append(_chem_name(rng, taken))
        synonyms.append(syns)
    # requires: only forward edges over the permutation, so the graph is a DAG
    position = {order[pos]: pos for pos in range(count)}
    for i in range(count):
        requires = []
        for j in range(count):
            if position[j] < position[i] and rng.chance(density):
                requires.append(ids[j])
        broader = []
        if position[i] > 0 and rng.chance(0.6):
            broader.append(ids[order[rng.below(position[i])]])
        external = f"KEY-{i + 1:05d}" if rng.chance(0.5) else None
        concepts.append(
            GeneratedConcept(
                id=ids[i],
                label=labels[i],
                synonyms=synonyms[i],
                broader=broader,
                requires=requires,
                external_id=external,
            )
        )
    return concepts


def _sentence(rng: Xorshift64Star, words: int) -> list[str]:
    return [rng.choice(_FILLER) for _ in range(words)]


def _lesson_xml(
    rng: Xorshift64Star,
    unit_id: str,
    chapter_id: str,
    order: int,
    concepts: list[GeneratedConcept],
    prior_units: list[str],
) -> tuple[bytes, int]:
    """Render one lesson; returns (bytes, media_count)."""
    title_concept = concepts[rng.below(len(concepts))] if concepts else None
    title = f"Lektion {order}: {title_concept.label}" if title_concept else f"Lektion {order}"
    study_time = rng.randint(5, 45)
    difficulty = rng.randint(1, 5)
    target = _weighted(rng, _TARGET_WEIGHTS)
    readings = []
    if prior_units and rng.chance(0.6):
        for idx in rng.sample_distinct(len(prior_units), min(rng.randint(1, 2), len(prior_units))):
            readings.append(prior_units[idx])

    taught = []
    if concepts:
        k = min(1 + rng.below(4), len(concepts))
        taught = [concepts[i] for i in rng.sample_distinct(len(concepts), k)]

    paragraphs = []
    for _ in range(rng.randint(2, 4)):
        parts: list[str] = []
        parts.extend(escape(w) for w in _sentence(rng, rng.randint(6, 14)))
        for concept in taught:
            if rng.chance(0.5):
                continue  # concept appears in some other paragraph instead
            surface = concept.label if not concept.synonyms or rng.chance(0.75) else rng.choice(concept.synonyms)
            if rng.chance(0.7):
                parts.append(f"<chem ref={quoteattr(concept.id)}>{escape(surface)}</chem>")
            else:
                parts.append(escape(surface))
            parts.extend(escape(w) for w in _sentence(rng, rng.randint(3, 8)))
        paragraphs.append("<p>" + " ".join(parts) + "</p>")
    # guarantee at least one occurrence per taught concept somewhere
    anchor: list[str] = []
    for concept in taught:
        if rng.chance(0.7):
            anchor.append(f"<chem ref={quoteattr(concept.id)}>{escape(concept.label)}</chem>")
        else:
            anchor.append(escape(concept.label))
        anchor.extend(escape(w) for w in _sentence(rng, rng.randint(2, 5)))
    if anchor:
        paragraphs.append("<p>" + " ".join(anchor) + "</p>")

    media_count = _weighted(rng, _MEDIA_WEIGHTS)
    media_lines = []
    for k in range(media_count):
        mtype = rng.choice(("image", "image", "video", "animation", "applet"))
        src = f"assets/{unit_id}-{k + 1}.{_MEDIA_EXT[mtype]}"
        media_lines.append(f"  <media type={quoteattr(mtype)} src={quoteattr(src)}/>")

    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f"<lesson id={quoteattr(unit_id)} chapter={quoteattr(chapter_id)} order={quoteattr(str(order))}>",
        f"  <title>{escape(title)}</title>",
        "  <meta>",
        f'    <studyTime minutes="{study_time}"/>',
        f"    <targetGroup>{target}</targetGroup>",
        f'    <difficulty level="{difficulty}"/>',
    ]
    lines.extend(f"    <recommendedReading ref={quoteattr(r)}/>" for r in readings)
    lines.append("  </meta>")
    lines.append("  <body>")
    lines.extend("  " + p for p in paragraphs)
    lines.extend(media_lines)
    lines.append("  </body>")
    lines.append("</lesson>")
    return ("\n".join(lines) + "\n").encode("utf-8"), media_count


def _concepts_xml(concepts: list[GeneratedConcept]) -> bytes:
    lines = ['<?xml version="1.0" encoding="UTF-8"?>', "<conceptScheme>"]
    for c in concepts:
        attrs = f"id={quoteattr(c.id)}"
        if c.external_id is not None:
            attrs += f" externalId={quoteattr(c.external_id)}"
        lines.append(f"  <concept {attrs}>")
        lines.append(f"    <label>{escape(c.label)}</label>")
        lines.extend(f"    <synonym>{escape(s)}</synonym>" for s in c.synonyms)
        lines.extend(f"    <broader ref={quoteattr(r)}/>" for r in c.broader)
        lines.extend(f"    <requires ref={quoteattr(r)}/>" for r in c.requires)
        lines.append("  </concept>")
    lines.append("</conceptScheme>")
    return ("\n".join(lines) + "\n").encode("utf-8")


def generate_corpus(
    out_dir: str,
    seed: int = DEFAULT_SEED,
    chapters: int = DEFAULT_CHAPTERS,
    mean_pages: float = DEFAULT_MEAN_PAGES,
    concepts: int = DEFAULT_CONCEPTS,
    density: float = DEFAULT_DENSITY,
) -> CorpusSummary:
    if chapters <= 0 or concepts < 0 or mean_pages <= 0:
        raise ValueError("chapters and mean_pages must be positive, concepts non-negative")
    if not 0.0 <= density <= 1.0:
        raise ValueError("density must be a probability")
    rng = Xorshift64Star(seed)
    concept_docs = _generate_concepts(rng, concepts, density)

    concept_path = os.path.join(out_dir, "concepts.xml")
    os.makedirs(os.path.join(out_dir, "lessons"), exist_ok=True)
    with open(concept_path, "wb") as fh:
        fh.write(_concepts_xml(concept_docs))

    lesson_files: list[str] = []
    prior_units: list[str] = []
    total_media = 0
    unit_no = 0
    spread = min(4.0, max(mean_pages - 1.0, 0.0))
    for ch in range(1, chapters + 1):
        chapter_id = f"ch-{ch:04d}"
        pages = max(1, round(mean_pages + (rng.random() * 2.0 - 1.0) * spread))
        chapter_dir = os.path.join(out_dir, "lessons", chapter_id)
        os.makedirs(chapter_dir, exist_ok=True)
        for order in range(1, pages + 1):
            unit_no += 1
            unit_id = f"u-{unit_no:05d}"
            data, media_count = _lesson_xml(rng, unit_id, chapter_id, order, concept_docs, prior_units)
            total_media += media_count
            path = os.path.join(chapter_dir, f"{unit_id}.xml")
            with open(path, "wb") as fh:
                fh.write(data)
            lesson_files.append(path)
            prior_units.append(unit_id)

    return CorpusSummary(
        chapters=chapters,
        pages=unit_no,
        media_objects=total_media,
        concepts=concepts,
        lesson_files=lesson_files,
        concept_file=concept_path,
    )
