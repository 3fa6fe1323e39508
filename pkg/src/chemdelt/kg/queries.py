"""Graph queries over a store: prerequisite closure, broader chains, schema checks."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Callable, Iterable

from . import vocab
from .model import Iri, Literal, Triple
from .store import GraphStore


class QueryError(ValueError):
    pass


def literal_values(store: GraphStore, s: Iri, p: Iri) -> list[str]:
    return [t.object.lexical for t in store.match(s=s, p=p) if isinstance(t.object, Literal)]


def first_literal(store: GraphStore, s: Iri, p: Iri) -> str | None:
    values = literal_values(store, s, p)
    return values[0] if values else None


def int_value(store: GraphStore, s: Iri, p: Iri) -> int | None:
    for t in store.match(s=s, p=p):
        n = vocab.int_from_literal(t.object)
        if n is not None:
            return n
    return None


def iri_objects(store: GraphStore, s: Iri, p: Iri) -> list[Iri]:
    return [t.object for t in store.match(s=s, p=p) if isinstance(t.object, Iri)]


def has_type(store: GraphStore, s: Iri, cls: Iri) -> bool:
    return Triple(s, vocab.RDF_TYPE, cls) in store

def subjects_of_type(store: GraphStore, cls: Iri) -> list[Iri]:
    return store.subjects(vocab.RDF_TYPE, cls)


def prerequisite_closure(store: GraphStore, goal: Iri, mastered: Callable[[Iri], bool]) -> set[Iri]:
    """Smallest set containing the goal and, through every unmastered member,
    all of that member's prerequisite concepts.

    Mastered concepts are included when reached but never expanded, so nothing
    is pulled in through them.
    """
    if not has_type(store, goal, vocab.CONCEPT):
        raise QueryError(f"goal is not a concept: {goal.value}")
    closure = {goal}
    frontier = deque([goal])
    while frontier:
        c = frontier.popleft()
        if mastered(c):
            continue
        for dep in iri_objects(store, c, vocab.REQUIRES):
            if dep not in closure:
                closure.add(dep)
                frontier.append(dep)
    return closure


def transitive_broader(store: GraphStore, concept: Iri) -> list[Iri]:
    """Broader-concept ancestors in breadth-first order (nearest first)."""
    seen = {concept}
    out: list[Iri] = []
    level = [concept]
    while level:
        nxt: list[Iri] = []
        for c in level:
            for b in iri_objects(store, c, vocab.BROADER):
                if b not in seen:
                    seen.add(b)
                    nxt.append(b)
        nxt.sort(key=lambda i: i.value)
        out.extend(nxt)
        level = nxt
    return out


@dataclass(frozen=True)
class Violation:
    subject: Iri
    rule: str
    message: str


def _strongly_connected(nodes: Iterable[Iri], edges: dict[Iri, list[Iri]]) -> list[list[Iri]]:
    """Tarjan SCC, iterative. Returns components of size > 1 plus self-loops."""
    index: dict[Iri, int] = {}
    low: dict[Iri, int] = {}
    on_stack: set[Iri] = set()
    stack: list[Iri] = []
    components: list[list[Iri]] = []
    counter = [0]

    def visit(root: Iri) -> None:
        work = [(root, 0)]
        while work:
            node, ei = work.pop()
            if ei == 0:
                index[node] = low[node] = counter[0]
                counter[0] += 1
                stack.append(node)
                on_stack.add(node)
            targets = edges.get(node, [])
            advanced = False
            for i in range(ei, len(targets)):
                tgt = targets[i]
                if tgt not in index:
                    work.append((node, i + 1))
                    work.append((tgt, 0))
                    advanced = True
                    break
                if tgt in on_stack:
                    low[node] = min(low[node], index[tgt])
            if advanced:
                continue
            if low[node] == index[node]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == node:
                        break
                if len(comp) > 1 or node in edges.get(node, []):
                    components.append(sorted(comp, key=lambda i: i.value))
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[node])

    for n in sorted(nodes, key=lambda i: i.value):
        if n not in index:
            visit(n)
    return components


def validate_schema(store: GraphStore) -> list[Violation]:
    """Schema conformance report. Violations are data, not failures."""
    violations: list[Violation] = []
    concepts = set(subjects_of_type(store, vocab.CONCEPT))

    for t in store.match(p=vocab.TEACHES):
        if not isinstance(t.object, Iri) or t.object not in concepts:
            violations.append(
                Violation(t.subject, "teaches-target", f"teaches object is not a concept: {t.object}")
            )

    requires_edges: dict[Iri, list[Iri]] = {}
    for t in store.match(p=vocab.REQUIRES):
        ok = isinstance(t.object, Iri) and t.object in concepts and t.subject in concepts
        if not ok:
            violations.append(
                Violation(t.subject, "requires-endpoints", "requires must connect two concepts")
            )
        else:
            requires_edges.setdefault(t.subject, []).append(t.object)

    for t in store.match(p=vocab.STUDY_TIME):
        if vocab.int_from_literal(t.object) is None:
            violations.append(
                Violation(t.subject, "study-time-value", "studyTime must be a non-negative integer literal")
            )

    for t in store.match(p=vocab.DIFFICULTY):
        n = vocab.int_from_literal(t.object)
        if n is None or not 1 <= n <= 5:
            violations.append(
                Violation(t.subject, "difficulty-range", "difficulty must be an integer in 1..5")
            )

    # next must form chains inside one chapter: in/out degree at most 1, no cycles
    out_deg: dict[Iri, int] = {}
    in_deg: dict[Iri, int] = {}
    next_edge: dict[Iri, Iri] = {}
    for t in store.match(p=vocab.NEXT):
        if not isinstance(t.object, Iri):
            violations.append(Violation(t.subject, "next-chain", "next object must be a unit IRI"))
            continue
        out_deg[t.subject] = out_deg.get(t.subject, 0) + 1
        in_deg[t.object] = in_deg.get(t.object, 0) + 1
        next_edge.setdefault(t.subject, t.object)
        sub_ch = iri_objects(store, t.subject, vocab.PART_OF)
        obj_ch = iri_objects(store, t.object, vocab.PART_OF)
        if sub_ch and obj_ch and set(sub_ch).isdisjoint(obj_ch):
            violations.append(
                Violation(t.subject, "next-chain", f"next crosses chapters to {t.object.value}")
            )
    for u, d in out_deg.items():
        if d > 1:
            violations.append(Violation(u, "next-chain", f"unit has {d} outgoing next links"))
    for u, d in in_deg.items():
        if d > 1:
            violations.append(Violation(u, "next-chain", f"unit has {d} incoming next links"))
    seen: set[Iri] = set()
    for start in sorted(next_edge, key=lambda i: i.value):
        if start in seen:
            continue
        path: list[Iri] = []
        on_path: set[Iri] = set()
        node: Iri | None = start
        while node is not None and node not in seen:
            if node in on_path:
                cycle = path[path.index(node) :]
                smallest = min(cycle, key=lambda i: i.value)
                violations.append(
                    Violation(smallest, "next-chain", "next links form a cycle: " + " -> ".join(i.value for i in cycle))
                )
                break
            on_path.add(node)
            path.append(node)
            node = next_edge.get(node)
        seen.update(on_path)

    for cycle in _strongly_connected(concepts, requires_edges):
        violations.append(
            Violation(
                cycle[0],
                "requires-acyclic",
                "prerequisite cycle: " + " -> ".join(i.value for i in cycle),
            )
        )

    violations.sort(key=lambda v: (v.rule, v.subject.value, v.message))
    return violations
