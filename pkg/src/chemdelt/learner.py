"""Session events, mastery estimation, and durable profiles for registered users.

Mastery follows an exponential approach: every event of quality q moves each
taught concept's score by alpha * q * (1 - m), which keeps scores in [0, 1],
makes them monotone under positive-quality events, and converges past any
threshold below 1 in a closed-form number of steps. View quality is dwell
time normalised by the unit's declared study time; quiz quality is the score.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field, replace

from .kg import vocab
from .kg.model import Iri, TermError
from .kg.queries import has_type, int_value, iri_objects
from .kg.store import GraphStore

ALPHA = 0.6
DEFAULT_THETA = 0.7

EVENT_KINDS = ("view", "quiz", "reset")


class LearnerError(ValueError):
    pass


class UnknownUnitError(LearnerError):
    pass


class UserExistsError(LearnerError):
    pass


@dataclass(frozen=True)
class SessionEvent:
    kind: str
    session_id: str = ""
    unit: Iri | None = None
    dwell_seconds: int | None = None
    score: float | None = None
    sequence: int = 0

    def __post_init__(self) -> None:
        if self.kind not in EVENT_KINDS:
            raise LearnerError(f"unknown event kind: {self.kind!r}")
        if self.kind == "view":
            if self.unit is None or self.dwell_seconds is None or self.score is not None:
                raise LearnerError("view events carry unit and dwellSeconds only")
            if not isinstance(self.dwell_seconds, int) or isinstance(self.dwell_seconds, bool) or self.dwell_seconds < 0:
                raise LearnerError("dwellSeconds must be a non-negative integer")
        elif self.kind == "quiz":
            if self.unit is None or self.score is None or self.dwell_seconds is not None:
                raise LearnerError("quiz events carry unit and score only")
            if isinstance(self.score, bool) or not isinstance(self.score, (int, float)) or not 0.0 <= self.score <= 1.0:
                raise LearnerError("score must be a number in [0, 1]")
        else:
            if self.unit is not None or self.dwell_seconds is not None or self.score is not None:
                raise LearnerError("reset events carry no payload")


@dataclass(frozen=True)
class UserProfile:
    mastery: dict[Iri, float] = field(default_factory=dict)
    event_count: int = 0
    registered: bool = False
    user_id: str | None = None


def _event_quality(event: SessionEvent, store: GraphStore) -> float:
    if event.kind == "quiz":
        return float(event.score)
    minutes = int_value(store, event.unit, vocab.STUDY_TIME) or 0
    denominator = 60 * minutes
    if event.dwell_seconds == 0:
        return 0.0
    if denominator == 0:
        return 1.0  # zero declared study time: any dwell saturates
    return min(1.0, event.dwell_seconds / denominator)


def apply_event(profile: UserProfile, event: SessionEvent, store: GraphStore) -> UserProfile:
    """Fold one event into a profile; the input profile is never modified."""
    if event.kind == "reset":
        return replace(profile, mastery={}, event_count=profile.event_count + 1)
    if not has_type(store, event.unit, vocab.LEARNING_UNIT):
        raise UnknownUnitError(f"unknown unit: {event.unit.value}")
    q = _event_quality(event, store)
    mastery = dict(profile.mastery)
    if q > 0.0:
        for concept in iri_objects(store, event.unit, vocab.TEACHES):
            m = mastery.get(concept, 0.0)
            mastery[concept] = m + ALPHA * q * (1.0 - m)
    return replace(profile, mastery=mastery, event_count=profile.event_count + 1)


def mastered_set(profile: UserProfile, theta: float = DEFAULT_THETA) -> set[Iri]:
    if not 0.0 < theta <= 1.0:
        raise LearnerError(f"theta must be in (0, 1]: {theta}")
    return {c for c, m in profile.mastery.items() if m >= theta}


def format_profile_record(user_id: str, profile: UserProfile) -> str:
    """One durable record: userId, eventCount, then concept=mastery pairs
    sorted by IRI. Mastery uses the shortest decimal that parses back exactly."""
    pairs = ",".join(
        f"{c.value}={m!r}" for c, m in sorted(profile.mastery.items(), key=lambda kv: kv[0].value)
    )
    return f"{user_id}\t{profile.event_count}\t{pairs}"


def parse_profile_record(line: str) -> tuple[str, UserProfile]:
    parts = line.split("\t")
    if len(parts) != 3:
        raise LearnerError("record must have exactly three tab-separated fields")
    user_id, count_s, pairs_s = parts
    if not user_id:
        raise LearnerError("empty userId")
    try:
        event_count = int(count_s)
    except ValueError:
        raise LearnerError(f"bad event count: {count_s!r}") from None
    mastery: dict[Iri, float] = {}
    if pairs_s:
        for pair in pairs_s.split(","):
            key, _, value_s = pair.rpartition("=")
            if not key:
                raise LearnerError(f"bad mastery pair: {pair!r}")
            try:
                concept = Iri(key)
                value = float(value_s)
            except (TermError, ValueError):
                raise LearnerError(f"bad mastery pair: {pair!r}") from None
            if not 0.0 <= value <= 1.0:
                raise LearnerError(f"mastery out of range: {pair!r}")
            mastery[concept] = value
    return user_id, UserProfile(mastery=mastery, event_count=event_count, registered=True, user_id=user_id)


class ProfileStore:
    """Session table (ephemeral) plus registered table (durable, append-only file,
    last record per user wins on replay). Event application is serialized per
    session; file appends run under a single writer lock."""

    def __init__(self, path: str | None = None):
        self.path = path
        self.sessions: dict[str, UserProfile] = {}
        self.registered: dict[str, UserProfile] = {}
        self._session_user: dict[str, str] = {}
        self._sequences: dict[str, int] = {}
        self._lock = threading.Lock()
        self._write_lock = threading.Lock()

    @classmethod
    def load(cls, path: str) -> tuple["ProfileStore", list[tuple[int, str]]]:
        """Replay the durable file; corrupt lines are skipped with a diagnostic."""
        store = cls(path)
        diagnostics: list[tuple[int, str]] = []
        try:
            with open(path, "r", encoding="utf-8") as fh:
                lines = fh.read().split("\n")
        except FileNotFoundError:
            return store, diagnostics
        for lineno, line in enumerate(lines, start=1):
            if not line.strip():
                continue
            try:
                user_id, profile = parse_profile_record(line)
            except LearnerError as e:
                diagnostics.append((lineno, str(e)))
                continue
            store.registered[user_id] = profile
        return store, diagnostics

    def session_profile(self, session_id: str) -> UserProfile:
        """Current profile for a session; unknown sessions read as empty and are
        not created."""
        return self.sessions.get(session_id, UserProfile())

    def next_sequence(self, session_id: str) -> int:
        with self._lock:
            seq = self._sequences.get(session_id, 0) + 1
            self._sequences[session_id] = seq
            return seq

    def apply_session_event(self, session_id: str, event: SessionEvent, store: GraphStore) -> UserProfile:
        with self._lock:
            profile = self.sessions.get(session_id, UserProfile())
            updated = apply_event(profile, event, store)
            self.sessions[session_id] = updated
            user_id = self._session_user.get(session_id)
            if user_id is not None:
                self.registered[user_id] = updated
        if user_id is not None:
            self.persist_profile(user_id)
        return updated

    def promote_session(self, session_id: str, user_id: str) -> UserProfile:
        """Turn a session into a registered, durable profile."""
        with self._lock:
            if user_id in self.registered:
                raise UserExistsError(f"userId already registered: {user_id}")
            profile = replace(
                self.sessions.get(session_id, UserProfile()), registered=True, user_id=user_id
            )
            self.sessions[session_id] = profile
            self.registered[user_id] = profile
            self._session_user[session_id] = user_id
        self.persist_profile(user_id)
        return profile

    def persist_profile(self, user_id: str) -> None:
        profile = self.registered.get(user_id)
        if profile is None or not profile.registered:
            raise LearnerError(f"no registered profile for userId: {user_id}")
        if self.path is None:
            return
        record = format_profile_record(user_id, profile)
        with self._write_lock:
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(record + "\n")


def load_profiles(path: str) -> tuple[ProfileStore, list[tuple[int, str]]]:
    return ProfileStore.load(path)


def persist_profile(profile_store: ProfileStore, user_id: str) -> None:
    profile_store.persist_profile(user_id)
