"""Dynamic learning-trajectory generation.

Pipeline: prerequisite closure from the goal, pruned at mastered concepts;
deterministic topological ordering of what remains (smallest IRI first among
the ready set); then a greedy cost-weighted unit cover that walks the ordered
concepts and picks the cheapest unit teaching each uncovered one. A selected
unit absorbs any other still-uncovered concept it teaches whose prerequisites
are already covered at that moment, so no concept is ever taught before its
prerequisites. Concepts no unit covers are reported as gaps, not failures.

Unit cost: studyTime * (1 + BETA * |difficulty - requested level|).
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field

from .kg import vocab
from .kg.model import Iri
from .kg.queries import int_value, iri_objects, prerequisite_closure
from .kg.store import GraphStore
from .learner import DEFAULT_THETA, UserProfile, mastered_set

BETA = 0.25


class CyclicPrerequisitesError(ValueError):
    def __init__(self, cycle: list[Iri]):
        self.cycle = cycle
        super().__init__("prerequisite cycle: " + " -> ".join(c.value for c in cycle))


class BrokenChainError(ValueError):
    pass


@dataclass
class TrajectoryRequest:
    goal: Iri
    profile: UserProfile = field(default_factory=UserProfile)
    level: int = 3
    theta: float = DEFAULT_THETA
    max_minutes: int | None = None


@dataclass
class TrajectoryStep:
    unit: Iri
    contributes: set[Iri]
    study_minutes: int


@dataclass
class Trajectory:
    steps: list[TrajectoryStep] = field(default_factory=list)
    gaps: set[Iri] = field(default_factory=set)
    total_minutes: int = 0
    truncated: bool = False


@dataclass
class PathComparison:
    static_units: list[Iri]
    dynamic_units: list[Iri]
    shared: set[Iri]
    skipped: set[Iri]
    added: set[Iri]
    order_inversions: int


def required_concepts(
    store: GraphStore, goal: Iri, profile: UserProfile, theta: float = DEFAULT_THETA
) -> list[Iri]:
    """Unmastered closure of the goal, topologically sorted (prerequisites first,
    ties broken by smallest IRI)."""
    mastered = mastered_set(profile, theta)
    closure = prerequisite_closure(store, goal, lambda c: c in mastered)
    required = closure - mastered

    deps = {c: set(iri_objects(store, c, vocab.REQUIRES)) & required for c in required}
    dependents: dict[Iri, list[Iri]] = {c: [] for c in required}
    for c, cs in deps.items():
        for d in cs:
            dependents[d].append(c)
    pending = {c: len(cs) for c, cs in deps.items()}
    ready = [c.value for c in required if pending[c] == 0]
    heapq.heapify(ready)
    by_value = {c.value: c for c in required}
    order: list[Iri] = []
    while ready:
        c = by_value[heapq.heappop(ready)]
        order.append(c)
        for dependent in dependents[c]:
            pending[dependent] -= 1
            if pending[dependent] == 0:
                heapq.heappush(ready, dependent.value)
    if len(order) < len(required):
        remaining = required - set(order)
        raise CyclicPrerequisitesError(_find_cycle(remaining, deps))
    return order


def _find_cycle(remaining: set[Iri], deps: dict[Iri, set[Iri]]) -> list[Iri]:
    start = min(remaining, key=lambda c: c.value)
    path: list[Iri] = []
    seen: set[Iri] = set()
    node = start
    while node not in seen:
        seen.add(node)
        path.append(node)
        node = min(
            (d for d in deps[node] if d in remaining), key=lambda c: c.value
        )
    return path[path.index(node) :]


def unit_cost(store: GraphStore, unit: Iri, level: int) -> float:
    minutes = int_value(store, unit, vocab.STUDY_TIME) or 0
    difficulty = int_value(store, unit, vocab.DIFFICULTY)
    mismatch = abs(difficulty - level) if difficulty is not None else 0
    return minutes * (1.0 + BETA * mismatch)


def select_units(store: GraphStore, ordered_concepts: list[Iri], level: int = 3) -> Trajectory:
    """Greedy cover of the ordered concepts by min-cost teaching units.

    Each unit appears at most once. A concept whose only teaching units were
    already consumed earlier in the path is reported as a gap rather than
    scheduling a revisit: by then the learner has seen that unit, just before
    its prerequisites were in place.
    """
    required = set(ordered_concepts)
    deps = {c: set(iri_objects(store, c, vocab.REQUIRES)) & required for c in ordered_concepts}
    assigned: set[Iri] = set()
    used_units: set[Iri] = set()
    trajectory = Trajectory()
    for concept in ordered_concepts:
        if concept in assigned:
            continue
        candidates = sorted(
            (u for u in store.subjects(vocab.TEACHES, concept) if u not in used_units),
            key=lambda u: u.value,
        )
        if not candidates:
            trajectory.gaps.add(concept)
            assigned.add(concept)
            continue
        unit = min(candidates, key=lambda u: (unit_cost(store, u, level), u.value))
        used_units.add(unit)
        taught_here = set(iri_objects(store, unit, vocab.TEACHES))
        contributes = {concept}
        assigned.add(concept)
        for other in ordered_concepts:
            if other in assigned or other not in taught_here:
                continue
            if deps[other] <= assigned:
                contributes.add(other)
                assigned.add(other)
        minutes = int_value(store, unit, vocab.STUDY_TIME) or 0
        trajectory.steps.append(TrajectoryStep(unit, contributes, minutes))
        trajectory.total_minutes += minutes
    return trajectory


def generate_trajectory(store: GraphStore, request: TrajectoryRequest) -> Trajectory:
    ordered = required_concepts(store, request.goal, request.profile, request.theta)
    trajectory = select_units(store, ordered, request.level)
    if request.max_minutes is not None:
        kept: list[TrajectoryStep] = []
        cumulative = 0
        for i, step in enumerate(trajectory.steps):
            if cumulative + step.study_minutes <= request.max_minutes:
                cumulative += step.study_minutes
                kept.append(step)
            else:
                for dropped in trajectory.steps[i:]:
                    trajectory.gaps.update(dropped.contributes)
                trajectory.truncated = True
                break
        trajectory.steps = kept
        trajectory.total_minutes = cumulative
    return trajectory


def static_chain(store: GraphStore, chapter: Iri) -> list[Iri]:
    """The hand-authored unit order of a chapter, walked along its next links."""
    units = sorted(store.subjects(vocab.PART_OF, chapter), key=lambda u: u.value)
    if not units:
        return []
    unit_set = set(units)
    nexts: dict[Iri, Iri] = {}
    has_incoming: set[Iri] = set()
    for u in units:
        targets = [t for t in iri_objects(store, u, vocab.NEXT) if t in unit_set]
        if len(targets) > 1:
            raise BrokenChainError(f"unit {u.value} has multiple next links")
        if targets:
            nexts[u] = targets[0]
            if targets[0] in has_incoming:
                raise BrokenChainError(f"unit {targets[0].value} has multiple incoming next links")
            has_incoming.add(targets[0])
    roots = [u for u in units if u not in has_incoming]
    if len(roots) != 1:
        raise BrokenChainError(f"chapter {chapter.value} has {len(roots)} chain starts, expected 1")
    chain = [roots[0]]
    seen = {roots[0]}
    while chain[-1] in nexts:
        nxt = nexts[chain[-1]]
        if nxt in seen:
            raise BrokenChainError(f"next links cycle at {nxt.value}")
        chain.append(nxt)
        seen.add(nxt)
    if len(chain) != len(units):
        raise BrokenChainError(f"chapter {chapter.value} units do not form a single chain")
    return chain


def compare_with_static(store: GraphStore, trajectory: Trajectory, chapter: Iri) -> PathComparison:
    """How the generated path differs from the chapter's hardcoded order."""
    static = static_chain(store, chapter)
    dynamic = [step.unit for step in trajectory.steps]
    static_set, dynamic_set = set(static), set(dynamic)
    shared = static_set & dynamic_set
    static_pos = {u: i for i, u in enumerate(static)}
    dynamic_pos = {u: i for i, u in enumerate(dynamic)}
    shared_sorted = sorted(shared, key=lambda u: static_pos[u])
    inversions = 0
    for i in range(len(shared_sorted)):
        for j in range(i + 1, len(shared_sorted)):
            if dynamic_pos[shared_sorted[i]] > dynamic_pos[shared_sorted[j]]:
                inversions += 1
    return PathComparison(
        static_units=static,
        dynamic_units=dynamic,
        shared=shared,
        skipped=static_set - dynamic_set,
        added=dynamic_set - static_set,
        order_inversions=inversions,
    )
