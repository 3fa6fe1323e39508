"""Strict parser for the CLEM course XML schema.

Two document kinds: lesson files and concept-scheme files. The schema is
closed: unknown elements or attributes and stray character data are errors,
so surprising input fails loudly before it can reach the graph.

Lesson:
    <lesson id= chapter= order=>
      <title>...</title>
      <meta>?            (studyTime/targetGroup/difficulty at most once each)
        <studyTime minutes=/> <targetGroup>...</targetGroup>
        <difficulty level=/> <recommendedReading ref=/>*
      </meta>
      <body> (<p>text|<chem ref=>surface</chem>...</p> | <media type= src=/>)* </body>
    </lesson>
Defaults when meta entries are absent: studyTime=10, difficulty=3,
targetGroup=students.

Concept scheme:
    <conceptScheme>
      <concept id= externalId=?>
        <label>..</label> <synonym>..</synonym>* <broader ref=/>* <requires ref=/>*
      </concept>*
    </conceptScheme>
"""

from __future__ import annotations

import re
import xml.parsers.expat
from dataclasses import dataclass, field

DEFAULT_STUDY_TIME = 10
DEFAULT_DIFFICULTY = 3
DEFAULT_TARGET_GROUP = "students"

TARGET_GROUPS = ("teachers", "students", "pupils", "trainees")
MEDIA_TYPES = ("video", "animation", "image", "applet")

_TOKEN_RE = re.compile(r"^[A-Za-z0-9_\-]+$")


class ClemError(ValueError):
    """Parse or schema failure; carries the byte offset where it was detected."""

    def __init__(self, message: str, byte_offset: int | None = None):
        self.byte_offset = byte_offset
        suffix = f" (byte {byte_offset})" if byte_offset is not None else ""
        super().__init__(message + suffix)


@dataclass(frozen=True)
class TextRun:
    text: str


@dataclass(frozen=True)
class ChemRef:
    concept_id: str
    surface: str


@dataclass(frozen=True)
class MediaRef:
    type: str
    src: str


@dataclass
class LessonDoc:
    id: str
    chapter_id: str
    order: int
    title: str = ""
    study_time: int = DEFAULT_STUDY_TIME
    target_group: str = DEFAULT_TARGET_GROUP
    difficulty: int = DEFAULT_DIFFICULTY
    recommended_reading: list[str] = field(default_factory=list)
    body: list = field(default_factory=list)  # TextRun | ChemRef | MediaRef

    def body_text(self) -> str:
        """Prose reconstruction: text runs plus inline chem surfaces, in order."""
        parts = []
        for run in self.body:
            if isinstance(run, TextRun):
                parts.append(run.text)
            elif isinstance(run, ChemRef):
                parts.append(run.surface)
        return "".join(parts)

    def media(self) -> list[MediaRef]:
        return [run for run in self.body if isinstance(run, MediaRef)]


@dataclass
class ConceptDoc:
    id: str
    label: str
    synonyms: list[str] = field(default_factory=list)
    broader: list[str] = field(default_factory=list)
    requires: list[str] = field(default_factory=list)
    external_id: str | None = None


_LESSON_ATTRS = {
    "lesson": {"id", "chapter", "order"},
    "title": set(),
    "meta": set(),
    "studyTime": {"minutes"},
    "targetGroup": set(),
    "difficulty": {"level"},
    "recommendedReading": {"ref"},
    "body": set(),
    "p": set(),
    "chem": {"ref"},
    "media": {"type", "src"},
}
_LESSON_CHILDREN = {
    "": {"lesson"},
    "lesson": {"title", "meta", "body"},
    "meta": {"studyTime", "targetGroup", "difficulty", "recommendedReading"},
    "body": {"p", "media"},
    "p": {"chem"},
}
_TEXT_ELEMENTS_LESSON = {"title", "targetGroup", "p", "chem"}

_SCHEME_ATTRS = {
    "conceptScheme": set(),
    "concept": {"id", "externalId"},
    "label": set(),
    "synonym": set(),
    "broader": {"ref"},
    "requires": {"ref"},
}
_SCHEME_CHILDREN = {
    "": {"conceptScheme"},
    "conceptScheme": {"concept"},
    "concept": {"label", "synonym", "broader", "requires"},
}
_TEXT_ELEMENTS_SCHEME = {"label", "synonym"}


class _StrictReader:
    """Shared expat plumbing: builds a nested (tag, attrs, children, text) tree
    while enforcing the closed element/attribute sets."""

    def __init__(self, attrs_schema, children_schema, text_elements):
        self.attrs_schema = attrs_schema
        self.children_schema = children_schema
        self.text_elements = text_elements
        self.parser = xml.parsers.expat.ParserCreate("UTF-8")
        self.parser.StartElementHandler = self._start
        self.parser.EndElementHandler = self._end
        self.parser.CharacterDataHandler = self._chars
        self.stack: list[dict] = []
        self.root: dict | None = None

    def _offset(self) -> int:
        return self.parser.CurrentByteIndex

    def _fail(self, message: str):
        raise ClemError(message, self._offset())

    def _start(self, name: str, attrs: dict):
        parent = self.stack[-1]["tag"] if self.stack else ""
        allowed = self.children_schema.get(parent, set())
        if name not in allowed:
            self._fail(f"unexpected element <{name}> inside <{parent or 'document root'}>")
        declared = self.attrs_schema[name]
        for key in attrs:
            if key not in declared:
                self._fail(f"unexpected attribute '{key}' on <{name}>")
        node = {"tag": name, "attrs": attrs, "children": [], "text": [], "ordered": []}
        if self.stack:
            self.stack[-1]["children"].append(node)
            self.stack[-1]["ordered"].append(("elem", node))
        else:
            self.root = node
        self.stack.append(node)

    def _end(self, name: str):
        self.stack.pop()

    def _chars(self, data: str):
        if not self.stack:
            return
        node = self.stack[-1]
        if node["tag"] in self.text_elements:
            node["text"].append(data)
            ordered = node["ordered"]
            if ordered and ordered[-1][0] == "text":
                ordered[-1] = ("text", ordered[-1][1] + data)
            else:
                ordered.append(("text", data))
        elif data.strip():
            self._fail(f"stray character data inside <{node['tag']}>")

    def parse(self, data: bytes) -> dict:
        try:
            self.parser.Parse(data, True)
        except xml.parsers.expat.ExpatError as e:
            raise ClemError(
                f"malformed XML: {xml.parsers.expat.errors.messages[e.code]}",
                self.parser.ErrorByteIndex,
            ) from None
        assert self.root is not None
        return self.root


def _require_token(node: dict, attr: str) -> str:
    value = node["attrs"].get(attr)
    if value is None:
        raise ClemError(f"<{node['tag']}> is missing required attribute '{attr}'")
    if not _TOKEN_RE.match(value):
        raise ClemError(f"<{node['tag']}> attribute '{attr}' is not a token: {value!r}")
    return value


def _require_int(node: dict, attr: str, lo: int, hi: int | None = None) -> int:
    raw = node["attrs"].get(attr)
    if raw is None:
        raise ClemError(f"<{node['tag']}> is missing required attribute '{attr}'")
    try:
        value = int(raw)
    except ValueError:
        raise ClemError(f"<{node['tag']}> attribute '{attr}' is not an integer: {raw!r}") from None
    if value < lo or (hi is not None and value > hi):
        bound = f">= {lo}" if hi is None else f"in {lo}..{hi}"
        raise ClemError(f"<{node['tag']}> attribute '{attr}' must be {bound}: {value}")
    return value


def parse_lesson_xml(data: bytes) -> LessonDoc:
    root = _StrictReader(_LESSON_ATTRS, _LESSON_CHILDREN, _TEXT_ELEMENTS_LESSON).parse(data)
    doc = LessonDoc(
        id=_require_token(root, "id"),
        chapter_id=_require_token(root, "chapter"),
        order=_require_int(root, "order", 1),
    )
    tags = [child["tag"] for child in root["children"]]
    if tags not in (["title", "body"], ["title", "meta", "body"]):
        raise ClemError(f"<lesson> must contain <title>, optional <meta>, then <body>; got {tags}")
    for child in root["children"]:
        if child["tag"] == "title":
            doc.title = "".join(child["text"]).strip()
            if not doc.title:
                raise ClemError("<title> must not be empty")
        elif child["tag"] == "meta":
            _read_meta(child, doc)
        else:
            _read_body(child, doc)
    return doc


def _read_meta(meta: dict, doc: LessonDoc) -> None:
    seen: set[str] = set()
    for node in meta["children"]:
        tag = node["tag"]
        if tag in ("studyTime", "targetGroup", "difficulty"):
            if tag in seen:
                raise ClemError(f"<{tag}> appears more than once in <meta>")
            seen.add(tag)
        if tag == "studyTime":
            doc.study_time = _require_int(node, "minutes", 0)
        elif tag == "difficulty":
            doc.difficulty = _require_int(node, "level", 1, 5)
        elif tag == "targetGroup":
            group = "".join(node["text"]).strip()
            if group not in TARGET_GROUPS:
                raise ClemError(f"unknown target group {group!r}")
            doc.target_group = group
        else:
            doc.recommended_reading.append(_require_token(node, "ref"))


def _read_body(body: dict, doc: LessonDoc) -> None:
    for node in body["children"]:
        if node["tag"] == "media":
            media_type = node["attrs"].get("type")
            if media_type not in MEDIA_TYPES:
                raise ClemError(f"unknown media type {media_type!r}")
            src = node["attrs"].get("src")
            if not src:
                raise ClemError("<media> requires a non-empty 'src'")
            doc.body.append(MediaRef(media_type, src))
            continue
        doc.body.extend(_paragraph_runs(node))


def _paragraph_runs(p_node: dict) -> list:
    runs: list = []
    for item in p_node["ordered"]:
        kind, payload = item
        if kind == "text":
            if payload:
                runs.append(TextRun(payload))
        else:
            surface = "".join(payload["text"])
            if not surface:
                raise ClemError("<chem> must wrap a non-empty surface form")
            runs.append(ChemRef(_require_token(payload, "ref"), surface))
    return runs


def parse_concept_xml(data: bytes) -> list[ConceptDoc]:
    root = _StrictReader(_SCHEME_ATTRS, _SCHEME_CHILDREN, _TEXT_ELEMENTS_SCHEME).parse(data)
    docs: list[ConceptDoc] = []
    for node in root["children"]:
        concept_id = _require_token(node, "id")
        external = node["attrs"].get("externalId")
        labels = [
            "".join(child["text"]).strip() for child in node["children"] if child["tag"] == "label"
        ]
        if len(labels) != 1 or not labels[0]:
            raise ClemError(f"concept '{concept_id}' needs exactly one non-empty <label>")
        doc = ConceptDoc(id=concept_id, label=labels[0], external_id=external)
        for child in node["children"]:
            if child["tag"] == "synonym":
                synonym = "".join(child["text"]).strip()
                if not synonym:
                    raise ClemError(f"concept '{concept_id}' has an empty <synonym>")
                doc.synonyms.append(synonym)
            elif child["tag"] == "broader":
                doc.broader.append(_require_token(child, "ref"))
            elif child["tag"] == "requires":
                ref = _require_token(child, "ref")
                if ref == concept_id:
                    raise ClemError(f"concept '{concept_id}' requires itself")
                doc.requires.append(ref)
        docs.append(doc)
    return docs
