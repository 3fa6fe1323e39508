"""HTTP API over a loaded corpus: search, content, sessions, trajectories.

Handlers hold no logic: every response is the direct JSON rendering of an
engine result, with keys in the documented order. Error responses are
{"code", "message"} with the documented status per code:

    404 unit_not_found / concept_not_found / chapter_not_found / not_found
    400 bad_event / bad_request
    409 user_exists
    422 cyclic_prerequisites / broken_chain
"""

from __future__ import annotations

from dataclasses import dataclass, field

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from starlette.exceptions import HTTPException as StarletteHTTPException

from .ingest.clem import LessonDoc
from .ingest.convert import corpus_stats
from .kg import vocab
from .kg.model import Iri, Literal, TermError
from .kg.queries import first_literal, has_type, int_value, iri_objects
from .kg.store import GraphStore
from .learner import (
    DEFAULT_THETA,
    LearnerError,
    ProfileStore,
    SessionEvent,
    UnknownUnitError,
    UserExistsError,
)
from .search import FACET_DIMENSIONS, Index, SearchQuery, build_index, search as run_search, tokenize
from .trajectory import (
    BrokenChainError,
    CyclicPrerequisitesError,
    PathComparison,
    Trajectory,
    TrajectoryRequest,
    compare_with_static,
    generate_trajectory,
)


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str):
        self.status = status
        self.code = code
        self.message = message


@dataclass
class AppState:
    """One consistent snapshot: the store, the index built from exactly that
    store, the retained lesson docs, and the profile store."""

    store: GraphStore
    index: Index
    profiles: ProfileStore
    lessons: dict[str, LessonDoc] = field(default_factory=dict)  # unit IRI -> doc

    @classmethod
    def build(
        cls,
        store: GraphStore,
        lessons: list[LessonDoc] | None = None,
        profiles: ProfileStore | None = None,
    ) -> "AppState":
        docs = {vocab.unit_iri(doc.id).value: doc for doc in lessons or []}
        bodies = {iri: doc.body_text() for iri, doc in docs.items()}
        return cls(
            store=store,
            index=build_index(store, bodies),
            profiles=profiles or ProfileStore(),
            lessons=docs,
        )


def _ids(iris) -> list[str]:
    return sorted(vocab.local_id(i) for i in iris)


def _resolve_iri(builder, token: str, status: int, code: str, message: str) -> Iri:
    try:
        return builder(token)
    except TermError:
        raise ApiError(status, code, message) from None


def unit_view(state: AppState, unit_id: str) -> dict:
    unit = _resolve_iri(vocab.unit_iri, unit_id, 404, "unit_not_found", f"no such unit: {unit_id}")
    store = state.store
    if not has_type(store, unit, vocab.LEARNING_UNIT):
        raise ApiError(404, "unit_not_found", f"no such unit: {unit_id}")
    doc = state.lessons.get(unit.value)
    if doc is not None:
        media = [{"type": m.type, "src": m.src} for m in doc.media()]
        body = doc.body_text()
    else:
        media = [
            {"type": first_literal(store, m, vocab.MEDIA_TYPE) or "", "src": ""}
            for m in iri_objects(store, unit, vocab.HAS_MEDIA)
        ]
        body = ""
    chapters = iri_objects(store, unit, vocab.PART_OF)
    nexts = iri_objects(store, unit, vocab.NEXT)
    return {
        "id": unit_id,
        "title": first_literal(store, unit, vocab.LABEL) or "",
        "chapter": vocab.local_id(chapters[0]) if chapters else None,
        "order": int_value(store, unit, vocab.ORDER),
        "studyTime": int_value(store, unit, vocab.STUDY_TIME),
        "targetGroup": first_literal(store, unit, vocab.TARGET_GROUP),
        "difficulty": int_value(store, unit, vocab.DIFFICULTY),
        "media": media,
        "teaches": _ids(iri_objects(store, unit, vocab.TEACHES)),
        "recommendedReading": _ids(iri_objects(store, unit, vocab.RECOMMENDED_READING)),
        "next": vocab.local_id(nexts[0]) if nexts else None,
        "body": body,
    }


def concept_view(state: AppState, concept_id: str) -> dict:
    concept = _resolve_iri(
        vocab.concept_iri, concept_id, 404, "concept_not_found", f"no such concept: {concept_id}"
    )
    store = state.store
    if not has_type(store, concept, vocab.CONCEPT):
        raise ApiError(404, "concept_not_found", f"no such concept: {concept_id}")
    synonyms = sorted(
        t.object.lexical for t in store.match(s=concept, p=vocab.SYNONYM)
        if isinstance(t.object, Literal)
    )
    return {
        "id": concept_id,
        "label": first_literal(store, concept, vocab.LABEL) or "",
        "synonyms": synonyms,
        "broader": _ids(iri_objects(store, concept, vocab.BROADER)),
        "requires": _ids(iri_objects(store, concept, vocab.REQUIRES)),
        "requiredBy": _ids(store.subjects(vocab.REQUIRES, concept)),
        "taughtBy": _ids(store.subjects(vocab.TEACHES, concept)),
        "alignedWith": sorted(i.value for i in iri_objects(store, concept, vocab.ALIGNED_WITH)),
    }


def result_page_view(page) -> dict:
    return {
        "total": page.total,
        "hits": [
            {"id": vocab.local_id(h.unit), "title": h.title, "score": h.score}
            for h in page.hits
        ],
        "facets": page.facet_counts,
    }


def profile_view(profile) -> dict:
    return {
        "mastery": {
            vocab.local_id(c): m
            for c, m in sorted(profile.mastery.items(), key=lambda kv: kv[0].value)
        },
        "eventCount": profile.event_count,
        "registered": profile.registered,
    }


def trajectory_view(state: AppState, trajectory: Trajectory) -> dict:
    store = state.store
    return {
        "steps": [
            {
                "unit": vocab.local_id(step.unit),
                "title": first_literal(store, step.unit, vocab.LABEL) or "",
                "minutes": step.study_minutes,
                "contributes": _ids(step.contributes),
            }
            for step in trajectory.steps
        ],
        "gaps": _ids(trajectory.gaps),
        "totalMinutes": trajectory.total_minutes,
        "truncated": trajectory.truncated,
    }


def comparison_view(comparison: PathComparison) -> dict:
    return {
        "staticUnits": [vocab.local_id(u) for u in comparison.static_units],
        "dynamicUnits": [vocab.local_id(u) for u in comparison.dynamic_units],
        "shared": _ids(comparison.shared),
        "skipped": _ids(comparison.skipped),
        "added": _ids(comparison.added),
        "orderInversions": comparison.order_inversions,
    }


def stats_view(state: AppState) -> dict:
    stats = corpus_stats(state.store)
    return {
        "pages": stats.pages,
        "chapters": stats.chapters,
        "mediaObjects": stats.media_objects,
        "concepts": stats.concepts,
        "triples": stats.triples,
    }


def _event_from_payload(session_id: str, payload, sequence: int) -> SessionEvent:
    if not isinstance(payload, dict):
        raise LearnerError("event body must be an object")
    allowed = {"kind", "unitId", "dwellSeconds", "score"}
    unknown = set(payload) - allowed
    if unknown:
        raise LearnerError(f"unknown event fields: {sorted(unknown)}")
    kind = payload.get("kind")
    if not isinstance(kind, str):
        raise LearnerError("event kind must be a string")
    unit_id = payload.get("unitId")
    unit = None
    if unit_id is not None:
        if not isinstance(unit_id, str):
            raise LearnerError("unitId must be a string")
        try:
            unit = vocab.unit_iri(unit_id)
        except TermError:
            raise LearnerError(f"unitId is not a token: {unit_id!r}") from None
    score = payload.get("score")
    if isinstance(score, int) and not isinstance(score, bool):
        score = float(score)
    return SessionEvent(
        kind=kind,
        session_id=session_id,
        unit=unit,
        dwell_seconds=payload.get("dwellSeconds"),
        score=score,
        sequence=sequence,
    )


def _trajectory_request(state: AppState, payload) -> TrajectoryRequest:
    if not isinstance(payload, dict):
        raise ApiError(400, "bad_request", "body must be an object")
    unknown = set(payload) - {"sessionId", "goal", "level", "theta", "maxMinutes"}
    if unknown:
        raise ApiError(400, "bad_request", f"unknown fields: {sorted(unknown)}")
    session_id = payload.get("sessionId")
    goal_id = payload.get("goal")
    if not isinstance(session_id, str) or not isinstance(goal_id, str):
        raise ApiError(400, "bad_request", "sessionId and goal are required strings")
    level = payload.get("level", 3)
    theta = payload.get("theta", DEFAULT_THETA)
    max_minutes = payload.get("maxMinutes")
    if not isinstance(level, int) or isinstance(level, bool) or not 1 <= level <= 5:
        raise ApiError(400, "bad_request", "level must be an integer in 1..5")
    if isinstance(theta, int) and not isinstance(theta, bool):
        theta = float(theta)
    if not isinstance(theta, float) or not 0.0 < theta <= 1.0:
        raise ApiError(400, "bad_request", "theta must be a number in (0, 1]")
    if max_minutes is not None and (
        not isinstance(max_minutes, int) or isinstance(max_minutes, bool) or max_minutes < 0
    ):
        raise ApiError(400, "bad_request", "maxMinutes must be a non-negative integer")
    goal = _resolve_iri(
        vocab.concept_iri, goal_id, 404, "concept_not_found", f"no such concept: {goal_id}"
    )
    if not has_type(state.store, goal, vocab.CONCEPT):
        raise ApiError(404, "concept_not_found", f"no such concept: {goal_id}")
    profile = state.profiles.session_profile(session_id)
    return TrajectoryRequest(
        goal=goal, profile=profile, level=level, theta=theta, max_minutes=max_minutes
    )


def create_app(state: AppState, cors_origin: str | None = None) -> FastAPI:
    app = FastAPI(title="chemdelt", docs_url=None, redoc_url=None, openapi_url=None)
    if cors_origin:
        from fastapi.middleware.cors import CORSMiddleware

        app.add_middleware(
            CORSMiddleware,
            allow_origins=[cors_origin],
            allow_methods=["*"],
            allow_headers=["*"],
        )
    app.state.engine = state

    @app.exception_handler(ApiError)
    async def on_api_error(_request: Request, exc: ApiError):
        return JSONResponse(status_code=exc.status, content={"code": exc.code, "message": exc.message})

    @app.exception_handler(StarletteHTTPException)
    async def on_http_error(_request: Request, exc: StarletteHTTPException):
        code = "not_found" if exc.status_code == 404 else "bad_request"
        return JSONResponse(status_code=exc.status_code, content={"code": code, "message": str(exc.detail)})

    @app.get("/api/units/{unit_id}")
    def get_unit(unit_id: str):
        return unit_view(app.state.engine, unit_id)

    @app.get("/api/concepts/{concept_id}")
    def get_concept(concept_id: str):
        return concept_view(app.state.engine, concept_id)

    @app.get("/api/search")
    def get_search(request: Request):
        engine: AppState = app.state.engine
        params = request.query_params
        try:
            page = int(params.get("page", "0"))
            size = int(params.get("size", "10"))
        except ValueError:
            raise ApiError(400, "bad_request", "page and size must be integers")
        if page < 0 or size <= 0:
            raise ApiError(400, "bad_request", "page must be >= 0 and size > 0")
        filters: dict[str, set[str]] = {}
        for key, value in params.multi_items():
            if not key.startswith("facet."):
                continue
            dim = key[len("facet.") :]
            if dim not in FACET_DIMENSIONS:
                raise ApiError(400, "bad_request", f"unknown facet dimension: {dim}")
            filters.setdefault(dim, set()).add(value)
        query = SearchQuery(
            terms=tokenize(params.get("q", "")), filters=filters, page=page, page_size=size
        )
        return result_page_view(run_search(engine.index, query))

    async def read_json(request: Request, code: str) -> object:
        try:
            return await request.json()
        except Exception:
            raise ApiError(400, code, "request body must be valid JSON") from None

    @app.post("/api/sessions/{session_id}/events")
    async def post_event(session_id: str, request: Request):
        engine: AppState = app.state.engine
        payload = await read_json(request, "bad_event")
        sequence = engine.profiles.next_sequence(session_id)
        try:
            event = _event_from_payload(session_id, payload, sequence)
        except LearnerError as e:
            raise ApiError(400, "bad_event", str(e))
        try:
            profile = engine.profiles.apply_session_event(session_id, event, engine.store)
        except UnknownUnitError as e:
            raise ApiError(404, "unit_not_found", str(e))
        except LearnerError as e:
            raise ApiError(400, "bad_event", str(e))
        return {"eventCount": profile.event_count}

    @app.get("/api/sessions/{session_id}/profile")
    def get_profile(session_id: str):
        engine: AppState = app.state.engine
        return profile_view(engine.profiles.session_profile(session_id))

    @app.post("/api/sessions/{session_id}/register")
    async def post_register(session_id: str, request: Request):
        engine: AppState = app.state.engine
        payload = await read_json(request, "bad_request")
        user_id = payload.get("userId") if isinstance(payload, dict) else None
        if not isinstance(user_id, str) or not user_id:
            raise ApiError(400, "bad_request", "userId is required")
        try:
            profile = engine.profiles.promote_session(session_id, user_id)
        except UserExistsError as e:
            raise ApiError(409, "user_exists", str(e))
        view = profile_view(profile)
        view["userId"] = profile.user_id
        return view

    @app.post("/api/trajectories")
    async def post_trajectory(request: Request):
        engine: AppState = app.state.engine
        payload = await read_json(request, "bad_request")
        traj_request = _trajectory_request(engine, payload)
        try:
            trajectory = generate_trajectory(engine.store, traj_request)
        except CyclicPrerequisitesError as e:
            raise ApiError(422, "cyclic_prerequisites", str(e))
        return trajectory_view(engine, trajectory)

    @app.get("/api/trajectories/compare")
    def get_compare(sessionId: str = "", goal: str = "", chapter: str = ""):
        engine: AppState = app.state.engine
        request = _trajectory_request(engine, {"sessionId": sessionId, "goal": goal})
        chapter_iri = _resolve_iri(
            vocab.chapter_iri, chapter, 404, "chapter_not_found", f"no such chapter: {chapter}"
        )
        if not has_type(engine.store, chapter_iri, vocab.CHAPTER):
            raise ApiError(404, "chapter_not_found", f"no such chapter: {chapter}")
        try:
            trajectory = generate_trajectory(engine.store, request)
            comparison = compare_with_static(engine.store, trajectory, chapter_iri)
        except CyclicPrerequisitesError as e:
            raise ApiError(422, "cyclic_prerequisites", str(e))
        except BrokenChainError as e:
            raise ApiError(422, "broken_chain", str(e))
        return comparison_view(comparison)

    @app.get("/api/stats")
    def get_stats():
        return stats_view(app.state.engine)

    return app
