"""Operator command line: corpus generation, ingestion, validation, alignment,
trajectory preview, search, stats, and the API server.

Exit codes: 0 success, 1 validation failure, 2 usage or I/O error.

Commands that read a corpus accept either a canonical .nt export or a corpus
directory. Loading the directory re-runs ingestion in memory and retains the
lesson bodies, which the served unit JSON and the body search field need; a
bare .nt store carries no prose, so those fields are empty in that mode.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import linker, search
from .ingest import clem, convert, generate
from .kg import ntriples, queries, vocab
from .kg.model import TermError
from .kg.store import GraphStore
from .learner import ProfileStore, UserProfile
from .service import AppState
from .trajectory import CyclicPrerequisitesError, TrajectoryRequest, generate_trajectory


class CliError(Exception):
    def __init__(self, message: str, exit_code: int = 2):
        super().__init__(message)
        self.exit_code = exit_code


def _read_bytes(path: str) -> bytes:
    try:
        with open(path, "rb") as fh:
            return fh.read()
    except OSError as e:
        raise CliError(f"cannot read {path}: {e.strerror}")


def _write_bytes(path: str, data: bytes) -> None:
    try:
        with open(path, "wb") as fh:
            fh.write(data)
    except OSError as e:
        raise CliError(f"cannot write {path}: {e.strerror}")


def _discover_corpus(directory: str) -> tuple[list[clem.LessonDoc], list[clem.ConceptDoc]]:
    lessons: list[clem.LessonDoc] = []
    concepts: list[clem.ConceptDoc] = []
    paths: list[str] = []
    for root, _dirs, files in os.walk(directory):
        paths.extend(os.path.join(root, f) for f in files if f.endswith(".xml"))
    if not paths:
        raise CliError(f"no .xml files under {directory}")
    for path in sorted(paths):
        data = _read_bytes(path)
        try:
            if b"<conceptScheme" in data[:512]:
                concepts.extend(clem.parse_concept_xml(data))
            else:
                lessons.append(clem.parse_lesson_xml(data))
        except clem.ClemError as e:
            raise CliError(f"{path}: {e}")
    return lessons, concepts


def _load_source(source: str) -> tuple[GraphStore, list[clem.LessonDoc]]:
    """A corpus directory (full ingest, bodies retained) or an .nt export."""
    if os.path.isdir(source):
        lessons, concepts = _discover_corpus(source)
        try:
            store, _report = convert.convert_corpus(lessons, concepts)
        except convert.ConversionError as e:
            raise CliError(str(e))
        return store, lessons
    store, errors = ntriples.load_store(_read_bytes(source))
    for lineno, message in errors:
        print(f"{source}:{lineno}: {message}", file=sys.stderr)
    return store, []


def _load_profile(args) -> UserProfile:
    if not getattr(args, "profile", None):
        return UserProfile()
    profiles, diagnostics = ProfileStore.load(args.profile)
    for lineno, message in diagnostics:
        print(f"{args.profile}:{lineno}: {message}", file=sys.stderr)
    if not args.user:
        raise CliError("--profile requires --user")
    profile = profiles.registered.get(args.user)
    if profile is None:
        raise CliError(f"no profile for user {args.user!r} in {args.profile}")
    return profile


def cmd_gen_corpus(args) -> int:
    try:
        summary = generate.generate_corpus(
            args.out,
            seed=args.seed,
            chapters=args.chapters,
            mean_pages=args.mean_pages,
            concepts=args.concepts,
            density=args.density,
        )
    except ValueError as e:
        raise CliError(str(e))
    print(f"chapters={summary.chapters}")
    print(f"pages={summary.pages}")
    print(f"mediaObjects={summary.media_objects}")
    print(f"concepts={summary.concepts}")
    return 0


def cmd_ingest(args) -> int:
    lessons, concepts = _discover_corpus(args.directory)
    try:
        store, report = convert.convert_corpus(lessons, concepts)
    except convert.ConversionError as e:
        raise CliError(str(e))
    _write_bytes(args.out, ntriples.serialize(store))
    lines = [
        f"filesParsed={report.files_parsed}",
        f"triplesEmitted={report.triples_emitted}",
        f"mentionsLinked={report.mentions_linked}",
        f"mentionsAmbiguous={report.mentions_ambiguous}",
        f"danglingRefs={report.dangling_refs}",
    ]
    lines.extend(report.diagnostics)
    if args.report:
        _write_bytes(args.report, ("\n".join(lines) + "\n").encode("utf-8"))
    else:
        print("\n".join(lines))
    return 0


def cmd_validate(args) -> int:
    store, _lessons = _load_source(args.source)
    violations = queries.validate_schema(store)
    for v in violations:
        print(f"{v.rule} {v.subject.value}: {v.message}")
    return 1 if violations else 0


def cmd_align(args) -> int:
    store, _lessons = _load_source(args.source)
    data = _read_bytes(args.external)
    triples, errors = ntriples.parse(data)
    for lineno, message in errors:
        print(f"{args.external}:{lineno}: {message}", file=sys.stderr)
    ext = linker.vocab_from_triples(triples, args.name)
    links = linker.align(store, ext)
    _write_bytes(args.out, ntriples.serialize(store))
    report = linker.alignment_report(links)
    if args.report:
        _write_bytes(args.report, report.encode("utf-8"))
    identifier = sum(1 for l in links if l.method == "identifier")
    print(f"aligned={len(links)} identifier={identifier} label={len(links) - identifier}")
    return 0


def cmd_trajectory(args) -> int:
    store, _lessons = _load_source(args.source)
    profile = _load_profile(args)
    try:
        goal = vocab.concept_iri(args.goal)
    except TermError:
        raise CliError(f"goal is not a valid concept id: {args.goal!r}")
    request = TrajectoryRequest(
        goal=goal,
        profile=profile,
        level=args.level,
        theta=args.theta,
        max_minutes=args.max_minutes,
    )
    try:
        trajectory = generate_trajectory(store, request)
    except queries.QueryError:
        raise CliError(f"unknown goal concept: {args.goal}")
    except CyclicPrerequisitesError as e:
        raise CliError(str(e), exit_code=1)
    cumulative = 0
    print("step\tunit\ttitle\tminutes\tcumulative\tcontributes")
    for i, step in enumerate(trajectory.steps, start=1):
        cumulative += step.study_minutes
        title = queries.first_literal(store, step.unit, vocab.LABEL) or ""
        contributed = ",".join(sorted(vocab.local_id(c) for c in step.contributes))
        print(f"{i}\t{vocab.local_id(step.unit)}\t{title}\t{step.study_minutes}\t{cumulative}\t{contributed}")
    print(f"totalMinutes={trajectory.total_minutes}")
    print(f"truncated={'true' if trajectory.truncated else 'false'}")
    if trajectory.gaps:
        print("gaps=" + ",".join(sorted(vocab.local_id(c) for c in trajectory.gaps)))
    return 0


def cmd_search(args) -> int:
    store, lessons = _load_source(args.source)
    bodies = {vocab.unit_iri(d.id).value: d.body_text() for d in lessons}
    index = search.build_index(store, bodies)
    filters: dict[str, set[str]] = {}
    for item in args.facet or []:
        dim, sep, value = item.partition("=")
        if not sep or dim not in search.FACET_DIMENSIONS:
            raise CliError(f"bad facet filter (use dim=value with a known dimension): {item!r}")
        filters.setdefault(dim, set()).add(value)
    query = search.SearchQuery(
        terms=search.tokenize(args.q or ""), filters=filters, page=args.page, page_size=args.size
    )
    page = search.search(index, query)
    print(f"total={page.total}")
    for hit in page.hits:
        print(f"{vocab.local_id(hit.unit)}\t{hit.score:.6f}\t{hit.title}")
    for dim in search.FACET_DIMENSIONS:
        counts = page.facet_counts.get(dim, {})
        if counts:
            rendered = ",".join(f"{value}:{count}" for value, count in sorted(counts.items()))
            print(f"facet.{dim}={rendered}")
    return 0


def cmd_stats(args) -> int:
    store, _lessons = _load_source(args.source)
    stats = convert.corpus_stats(store)
    print(f"pages={stats.pages}")
    print(f"chapters={stats.chapters}")
    print(f"mediaObjects={stats.media_objects}")
    print(f"concepts={stats.concepts}")
    print(f"triples={stats.triples}")
    for key, value in store.stats().items():
        if key != "triples":
            print(f"{key}={value}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    store, lessons = _load_source(args.source)
    profiles = ProfileStore(args.profiles)
    if args.profiles and os.path.exists(args.profiles):
        profiles, diagnostics = ProfileStore.load(args.profiles)
        for lineno, message in diagnostics:
            print(f"{args.profiles}:{lineno}: {message}", file=sys.stderr)
    state = AppState.build(store, lessons, profiles)
    app = create_app(state, cors_origin=args.cors_origin)
    port = args.port if args.port is not None else int(os.environ.get("CHEMDELT_PORT", "8000"))
    uvicorn.run(app, host=args.host, port=port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="chemdelt")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-corpus", help="generate a deterministic synthetic corpus")
    p.add_argument("--seed", type=int, default=generate.DEFAULT_SEED)
    p.add_argument("--chapters", type=int, default=generate.DEFAULT_CHAPTERS)
    p.add_argument("--mean-pages", type=float, default=generate.DEFAULT_MEAN_PAGES)
    p.add_argument("--concepts", type=int, default=generate.DEFAULT_CONCEPTS)
    p.add_argument("--density", type=float, default=generate.DEFAULT_DENSITY)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen_corpus)

    p = sub.add_parser("ingest", help="parse a corpus directory and export canonical triples")
    p.add_argument("directory")
    p.add_argument("--out", required=True)
    p.add_argument("--report")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("validate", help="schema-check a store; exit 0 iff clean")
    p.add_argument("source")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("align", help="align concepts with an external vocabulary")
    p.add_argument("source")
    p.add_argument("--external", required=True)
    p.add_argument("--name", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--report")
    p.set_defaults(func=cmd_align)

    p = sub.add_parser("trajectory", help="generate a learning trajectory")
    p.add_argument("source")
    p.add_argument("--goal", required=True)
    p.add_argument("--profile")
    p.add_argument("--user")
    p.add_argument("--level", type=int, default=3)
    p.add_argument("--theta", type=float, default=0.7)
    p.add_argument("--max-minutes", type=int, default=None)
    p.set_defaults(func=cmd_trajectory)

    p = sub.add_parser("search", help="full-text and faceted search")
    p.add_argument("source")
    p.add_argument("--q", default="")
    p.add_argument("--facet", action="append", metavar="DIM=VALUE")
    p.add_argument("--page", type=int, default=0)
    p.add_argument("--size", type=int, default=10)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("stats", help="corpus and store statistics")
    p.add_argument("source")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("serve", help="serve the HTTP API")
    p.add_argument("source")
    p.add_argument("--port", type=int, default=None)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--profiles")
    p.add_argument("--cors-origin", default=None)
    p.set_defaults(func=cmd_serve)

    return parser


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code
    except ntriples.NtriplesError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())
