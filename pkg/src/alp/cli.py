"""Curator command line: the store's only writer, plus read utilities.

Mutating commands (library add, ingest, match, geo set, asset register)
serialize through a file lock so exactly one writer touches the store at
a time; the HTTP service stays read-only. Exit codes are a scripting
contract: 0 success, 1 partial (some rows rejected or some records hit
provider errors), 2 fatal.
"""

from __future__ import annotations

import csv
import io
import re
import sys
import time
from contextlib import contextmanager
from dataclasses import replace
from datetime import datetime, timezone
from pathlib import Path

import click
from filelock import FileLock, Timeout

from .assets import AssetError, AssetKind, Rights, register_asset
from .catalog import (
    ArtistLibrary,
    BibRecord,
    Provenance,
    SequenceOverflowError,
    Store,
    StoreError,
    UnknownLibraryError,
    assign_id,
    validate_library,
    validate_record,
)
from .comparison import ComparisonError, Level, author_frequency, compare
from .config import Config, ConfigError, load_config
from .matcher import MatcherError, Verdict, classify, attach_surrogate, csv_row, error_row, reports_to_csv
from .metadata import IngestFormatError, RowError, build_record, parse_ingest_csv
from .providers import (
    LiveTransport,
    MODE_REPLAY,
    ProviderError,
    ProviderQuery,
    ReplayTransport,
    search_rest,
    search_sru,
)
from .query import ADVANCED, SIMPLE, QueryError, build_index, execute, parse_query

EXIT_OK = 0
EXIT_PARTIAL = 1
EXIT_FATAL = 2

LOCK_TIMEOUT_S = 5.0

_YEAR_RE = re.compile(r"\b\d{4}\b")


def _fail(message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(EXIT_FATAL)


def _now() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


@contextmanager
def writer_lock(store: Store):
    """Exclusive writer role; a held lock is a fatal error, not a wait."""
    store.root.mkdir(parents=True, exist_ok=True)
    lock = FileLock(str(store.lock_path), timeout=LOCK_TIMEOUT_S)
    try:
        lock.acquire()
    except Timeout:
        _fail("another writer holds the store lock")
    try:
        yield
    finally:
        lock.release()


def _load_snapshot(store: Store):
    try:
        return store.load_snapshot()
    except StoreError as exc:
        _fail(str(exc))


@click.group()
@click.option("--config", "config_path", type=click.Path(path_type=Path), default=None,
              help="TOML settings file (default: alp.toml if present, else built-ins).")
@click.option("--store", "store_root", type=click.Path(path_type=Path), default=None,
              help="Store directory; overrides the configured one.")
@click.pass_context
def main(ctx: click.Context, config_path: Path | None, store_root: Path | None):
    """Catalog engine for artists' personal libraries."""
    try:
        cfg = load_config(config_path)
    except ConfigError as exc:
        _fail(str(exc))
    if store_root is not None:
        cfg = replace(cfg, store_root=store_root.absolute())
    ctx.obj = cfg


# --- collections ---------------------------------------------------------------


@main.group()
def library():
    """Manage the collection registry."""


@library.command("add")
@click.argument("slug")
@click.option("--name", required=True, help="Artist's display name.")
@click.option("--provenance", required=True, type=click.Choice([p.value for p in Provenance]))
@click.option("--site", required=True, help="Holding institution or place.")
@click.option("--birth-year", type=int, default=None)
@click.option("--death-year", type=int, default=None)
@click.option("--lat", type=float, default=None)
@click.option("--lon", type=float, default=None)
@click.option("--description", default="")
@click.pass_obj
def library_add(cfg: Config, slug, name, provenance, site, birth_year, death_year, lat, lon, description):
    """Register a new collection under SLUG."""
    lib = ArtistLibrary(
        slug=slug,
        artist_name=name,
        provenance=Provenance(provenance),
        holding_site=site,
        birth_year=birth_year,
        death_year=death_year,
        latitude=lat,
        longitude=lon,
        description=description,
    )
    problems = validate_library(lib)
    if problems:
        _fail("; ".join(f"{v.field}: {v.message}" for v in problems))
    store = Store(cfg.store_root)
    with writer_lock(store):
        libraries = store.read_libraries()
        if any(existing.slug == slug for existing in libraries):
            _fail(f"library {slug!r} already exists")
        store.write_libraries(libraries + [lib])
    click.echo(f"added library {slug}")


# --- ingest ----------------------------------------------------------------------


def _write_row_errors(path: Path, errors: list[RowError]) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(("line", "reason"))
    for err in sorted(errors, key=lambda e: e.line):
        writer.writerow((err.line, err.reason))
    path.write_text(buf.getvalue(), encoding="utf-8")


@main.command()
@click.argument("csv_path", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--report", "report_path", type=click.Path(dir_okay=False, path_type=Path),
              default=None, help="Rejected-row report (default: <csv>.errors.csv).")
@click.pass_obj
def ingest(cfg: Config, csv_path: Path, report_path: Path | None):
    """Load curated catalog rows from CSV_PATH into the store.

    Every rejected row lands in the error report with its line number;
    exit status is 1 when any row was rejected.
    """
    report_path = report_path or csv_path.with_name(csv_path.name + ".errors.csv")
    try:
        rows, errors = parse_ingest_csv(csv_path.read_bytes())
    except (IngestFormatError, OSError) as exc:
        _fail(str(exc))
    store = Store(cfg.store_root)
    accepted = 0
    with writer_lock(store):
        known = {lib.slug for lib in store.read_libraries()}
        created_at = _now()
        next_seq: dict[str, int] = {}
        batches: dict[str, list[BibRecord]] = {}
        for row in rows:
            if row.library_slug not in known:
                errors.append(RowError(row.line, f"unknown library {row.library_slug!r}"))
                continue
            seq = next_seq.get(row.library_slug)
            if seq is None:
                seq = store.max_sequence(row.library_slug)
            try:
                record = build_record(row, assign_id(row.library_slug, seq), created_at)
            except SequenceOverflowError as exc:
                errors.append(RowError(row.line, str(exc)))
                continue
            problems = validate_record(record, known)
            if problems:
                errors.append(RowError(row.line, "; ".join(f"{v.field}: {v.message}" for v in problems)))
                continue
            next_seq[row.library_slug] = seq + 1
            batches.setdefault(row.library_slug, []).append(record)
            accepted += 1
        for slug in sorted(batches):
            store.append_records(slug, batches[slug])
    _write_row_errors(report_path, errors)
    total = accepted + len(errors)
    click.echo(f"rows={total} accepted={accepted} rejected={len(errors)} report={report_path}")
    sys.exit(EXIT_PARTIAL if errors else EXIT_OK)


# --- read utilities -----------------------------------------------------------


@main.command()
@click.pass_obj
def validate(cfg: Config):
    """Check every stored document; exit 2 with a line-numbered report on corruption."""
    snapshot = _load_snapshot(Store(cfg.store_root))
    click.echo(
        f"store valid: {len(snapshot.libraries)} libraries, "
        f"{len(snapshot.records)} records, fingerprint {snapshot.fingerprint}"
    )


@main.command()
@click.pass_obj
def index(cfg: Config):
    """Build the search index once and report its size and build time."""
    snapshot = _load_snapshot(Store(cfg.store_root))
    started = time.perf_counter()
    idx = build_index(list(snapshot.records))
    elapsed = time.perf_counter() - started
    click.echo(
        f"indexed {len(idx.all_ids)} records, {len(idx.postings)} distinct tokens "
        f"in {elapsed:.3f}s"
    )


@main.command()
@click.argument("query_text")
@click.option("--mode", type=click.Choice([SIMPLE, ADVANCED]), default=SIMPLE)
@click.option("--library", "library_slug", default=None, help="Restrict hits to one collection.")
@click.option("--limit", type=int, default=20, show_default=True)
@click.pass_obj
def search(cfg: Config, query_text: str, mode: str, library_slug: str | None, limit: int):
    """Run QUERY_TEXT against the store; one hit per line (id, title)."""
    snapshot = _load_snapshot(Store(cfg.store_root))
    if library_slug is not None and not snapshot.has_library(library_slug):
        _fail(f"unknown library {library_slug!r}")
    try:
        ast = parse_query(query_text, mode)
    except QueryError as exc:
        _fail(f"query syntax at offset {exc.offset}: {exc}")
    ids = execute(build_index(list(snapshot.records)), ast)
    if library_slug is not None:
        ids = [rid for rid in ids if snapshot.record(rid).library_slug == library_slug]
    for rid in ids[:limit]:
        record = snapshot.record(rid)
        click.echo(f"{rid}\t{record.first_value('title') or ''}")
    click.echo(f"total={len(ids)}", err=True)


@main.command("compare")
@click.argument("slugs", nargs=-1, required=True)
@click.option("--level", type=click.Choice([l.value for l in Level]), default=Level.WORK.value,
              show_default=True)
@click.option("--authors", "show_authors", is_flag=True, help="Also print author frequencies.")
@click.pass_obj
def compare_cmd(cfg: Config, slugs: tuple[str, ...], level: str, show_authors: bool):
    """Overlap analysis across two or more collections."""
    snapshot = _load_snapshot(Store(cfg.store_root))
    try:
        report = compare(snapshot, list(slugs), Level(level))
    except (ComparisonError, UnknownLibraryError) as exc:
        _fail(str(exc))
    for slug in report.libraries:
        click.echo(f"{slug}: {report.key_counts[slug]} distinct {level} keys")
    click.echo(f"shared {level} keys: {len(report.shared)}")
    for group in report.shared:
        click.echo(f"  {group.key} [{', '.join(group.libraries)}] {' '.join(group.record_ids)}")
    for pair in report.pairs:
        click.echo(
            f"{pair.left} ~ {pair.right}: intersection={pair.intersection} "
            f"union={pair.union} jaccard={pair.jaccard:.4f}"
        )
    if show_authors:
        click.echo("authors:")
        for row in author_frequency(snapshot, list(slugs)):
            per_lib = " ".join(f"{slug}={n}" for slug, n in sorted(row.counts.items()))
            click.echo(f"  {row.creator_surname}: total={row.total} {per_lib}")


# --- provider matching -----------------------------------------------------------


def _first_year(record: BibRecord) -> str | None:
    for value in record.values("date"):
        found = _YEAR_RE.search(value)
        if found:
            return found.group(0)
    return None


def _searcher_for(name: str):
    if name == "open_library_like":
        return search_rest
    if name == "gallica_like":
        return search_sru
    _fail(f"no client for provider {name!r} (expected gallica_like or open_library_like)")


@main.command("match")
@click.argument("slug")
@click.option("--providers", "provider_names", default=None,
              help="Comma-separated provider names (default: all configured).")
@click.option("--out", "out_path", type=click.Path(dir_okay=False, path_type=Path), default=None,
              help="Curator-review CSV (default: <slug>_match_report.csv).")
@click.option("--max-results", type=int, default=10, show_default=True)
@click.pass_obj
def match_cmd(cfg: Config, slug: str, provider_names: str | None, out_path: Path | None, max_results: int):
    """Search providers for records lacking a surrogate and attach matches.

    A second run attaches nothing new: records that already carry a
    surrogate are skipped. Provider failures are recorded per-record in
    the review CSV and never abort the batch (exit 1 when any occurred).
    """
    out_path = out_path or Path(f"{slug}_match_report.csv")
    names = (
        [n.strip() for n in provider_names.split(",") if n.strip()]
        if provider_names
        else sorted(cfg.providers)
    )
    searchers = []
    for name in names:
        provider_cfg = cfg.providers.get(name)
        if provider_cfg is None:
            _fail(f"provider {name!r} is not configured")
        search_fn = _searcher_for(name)
        transport = (
            ReplayTransport(provider_cfg.fixtures_dir)
            if provider_cfg.mode == MODE_REPLAY
            else LiveTransport(provider_cfg.rate_limit_per_s)
        )
        searchers.append((name, provider_cfg, search_fn, transport))

    store = Store(cfg.store_root)
    rows: list[list[str]] = []
    tally = {Verdict.EXACT_EDITION: 0, Verdict.APPROXIMATE_EDITION: 0, Verdict.NO_MATCH: 0}
    attached = skipped = failed = 0
    with writer_lock(store):
        snapshot = _load_snapshot(store)
        if not snapshot.has_library(slug):
            _fail(f"unknown library {slug!r}")
        updated: list[BibRecord] = []
        for record in snapshot.records_for(slug):
            if record.surrogates:
                skipped += 1
                updated.append(record)
                continue
            title = record.first_value("title")
            creator = record.first_value("creator")
            if not title and not creator:
                rows.append(error_row(record.record_id, "record has no searchable fields"))
                failed += 1
                updated.append(record)
                continue
            query = ProviderQuery(
                title=title, creator=creator, year=_first_year(record), max_results=max_results
            )
            candidates, outages = [], []
            for name, provider_cfg, search_fn, transport in searchers:
                try:
                    candidates.extend(search_fn(provider_cfg.endpoint, query, transport=transport))
                except ProviderError as exc:
                    outages.append(f"{name}: {exc}")
            if outages:
                # conservative: classify nothing this run, keep the record
                # eligible for the next one
                rows.append(error_row(record.record_id, "; ".join(outages)))
                failed += 1
                updated.append(record)
                continue
            try:
                report = classify(record, candidates)
            except MatcherError as exc:
                rows.append(error_row(record.record_id, str(exc)))
                failed += 1
                updated.append(record)
                continue
            rows.append(csv_row(report))
            tally[report.verdict] += 1
            if report.verdict is not Verdict.NO_MATCH:
                record = attach_surrogate(record, report)
                attached += 1
            updated.append(record)
        store.write_records(slug, updated)

    out_path.write_text(reports_to_csv(rows), encoding="utf-8")
    click.echo(
        f"processed={len(rows)} exact={tally[Verdict.EXACT_EDITION]} "
        f"approximate={tally[Verdict.APPROXIMATE_EDITION]} no_match={tally[Verdict.NO_MATCH]} "
        f"errors={failed} attached={attached} skipped={skipped} report={out_path}"
    )
    sys.exit(EXIT_PARTIAL if failed else EXIT_OK)


# --- locations and assets ---------------------------------------------------------


@main.group()
def geo():
    """Location facts feeding the map export."""


@geo.command("set")
@click.argument("slug")
@click.argument("latitude", type=float)
@click.argument("longitude", type=float)
@click.pass_obj
def geo_set(cfg: Config, slug: str, latitude: float, longitude: float):
    """Place SLUG's holding site at LATITUDE LONGITUDE (WGS84 degrees)."""
    store = Store(cfg.store_root)
    with writer_lock(store):
        libraries = store.read_libraries()
        if not any(lib.slug == slug for lib in libraries):
            _fail(f"unknown library {slug!r}")
        moved = [
            replace(lib, latitude=latitude, longitude=longitude) if lib.slug == slug else lib
            for lib in libraries
        ]
        target = next(lib for lib in moved if lib.slug == slug)
        problems = validate_library(target)
        if problems:
            _fail("; ".join(f"{v.field}: {v.message}" for v in problems))
        store.write_libraries(moved)
    click.echo(f"{slug}: location set to ({latitude}, {longitude})")


@main.group()
def asset():
    """Photographs of reading marks, gated by rights."""


@asset.command("register")
@click.argument("record_id")
@click.argument("kind", type=click.Choice([k.value for k in AssetKind]))
@click.argument("rights", type=click.Choice([r.value for r in Rights]))
@click.argument("original", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--derivative", type=click.Path(exists=True, dir_okay=False, path_type=Path),
              default=None, help="Redacted/cropped variant; required unless public domain.")
@click.pass_obj
def asset_register(cfg: Config, record_id: str, kind: str, rights: str, original: Path,
                   derivative: Path | None):
    """Attach ORIGINAL (photograph) to RECORD_ID and print the asset id."""
    store = Store(cfg.store_root)
    with writer_lock(store):
        try:
            registered = register_asset(
                store, record_id, AssetKind(kind), Rights(rights), original, derivative
            )
        except (AssetError, StoreError) as exc:
            _fail(str(exc))
    click.echo(registered.asset_id)


# --- serving ----------------------------------------------------------------------


@main.command()
@click.option("--host", default=None, help="Bind address (default from config).")
@click.option("--port", type=int, default=None, help="Port (default from config).")
@click.pass_obj
def serve(cfg: Config, host: str | None, port: int | None):
    """Serve the read-only API, portal bundle, and OAI endpoint."""
    from .api import create_app

    try:
        app = create_app(cfg)
    except StoreError as exc:
        _fail(str(exc))
    import uvicorn

    uvicorn.run(app, host=host or cfg.host, port=port or cfg.port, log_level="warning")


if __name__ == "__main__":
    main()
