"""Read-only HTTP surface: catalog lookups, search, comparison, map,
rights-gated asset bytes, and the OAI-PMH endpoint.

Every JSON body carries ``schema_version``; errors use one envelope
shape with a code from {BadQuery, NotFound, AccessDenied, Internal} and
messages that never mention file-system paths. All handlers read from
an immutable snapshot loaded at startup, so concurrent requests need no
locking and responses are deterministic until the process restarts.
"""

from __future__ import annotations

import math
import mimetypes
from pathlib import Path
from urllib.parse import parse_qsl

from fastapi import FastAPI, Request, Response
from fastapi.responses import FileResponse, JSONResponse
from fastapi.staticfiles import StaticFiles
from starlette.exceptions import HTTPException as StarletteHTTPException

from .assets import Denied, Variant, load_all_assets, resolve_variant
from .catalog import (
    Snapshot,
    Store,
    UnknownLibraryError,
    library_to_json,
    record_to_json,
)
from .comparison import ComparisonError, Level, author_frequency, compare
from .config import Config
from .geo import GEOJSON_MEDIA_TYPE, geojson_bytes
from .oai import OaiEndpoint
from .query import ADVANCED, SIMPLE, QueryError, build_index, execute, parse_query, to_query_string

SCHEMA_VERSION = 1
DEFAULT_PER_PAGE = 20
MAX_PER_PAGE = 100
OAI_MEDIA_TYPE = "text/xml; charset=utf-8"


class ApiException(Exception):
    """Carries the error envelope; a handler turns it into JSON."""

    def __init__(self, status: int, code: str, message: str, detail: dict | None = None):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message
        self.detail = detail


def bad_query(message: str, detail: dict | None = None) -> ApiException:
    return ApiException(400, "BadQuery", message, detail)


def not_found(message: str) -> ApiException:
    return ApiException(404, "NotFound", message)


def access_denied(message: str, detail: dict | None = None) -> ApiException:
    return ApiException(403, "AccessDenied", message, detail)


def _error_response(status: int, code: str, message: str, detail: dict | None = None) -> JSONResponse:
    error: dict = {"code": code, "message": message}
    if detail is not None:
        error["detail"] = detail
    return JSONResponse({"schema_version": SCHEMA_VERSION, "error": error}, status_code=status)


def _ok(payload: dict) -> JSONResponse:
    return JSONResponse({"schema_version": SCHEMA_VERSION, **payload})


def _int_param(params, name: str, default: int, low: int, high: int | None = None) -> int:
    raw = params.get(name)
    if raw is None or raw == "":
        return default
    try:
        value = int(raw)
    except ValueError:
        raise bad_query(f"{name} must be an integer, got {raw!r}") from None
    if value < low or (high is not None and value > high):
        bound = f">= {low}" if high is None else f"in {low}..{high}"
        raise bad_query(f"{name} must be {bound}, got {value}")
    return value


def _summary(record) -> dict:
    return {
        "record_id": record.record_id,
        "library_slug": record.library_slug,
        "title": record.first_value("title"),
        "creator": record.first_value("creator"),
        "date": record.first_value("date"),
    }


def create_app(config: Config) -> FastAPI:
    store = Store(config.store_root)
    snapshot: Snapshot = store.load_snapshot()  # fails fast, line-numbered report
    index = build_index(list(snapshot.records))
    assets = load_all_assets(store)
    oai = OaiEndpoint(
        snapshot,
        repository_id=config.repository_id,
        repository_name=config.repository_name,
        base_url=config.oai_base_url,
        admin_email=config.admin_email,
    )

    app = FastAPI(title="artist-libraries-catalog", docs_url=None, redoc_url=None)
    app.state.snapshot = snapshot
    app.state.index = index
    app.state.assets = assets
    app.state.store = store

    @app.exception_handler(ApiException)
    async def _api_exception(_request: Request, exc: ApiException) -> JSONResponse:
        return _error_response(exc.status, exc.code, exc.message, exc.detail)

    @app.exception_handler(StarletteHTTPException)
    async def _http_exception(_request: Request, exc: StarletteHTTPException) -> JSONResponse:
        if exc.status_code == 404:
            return _error_response(404, "NotFound", "no such resource")
        if exc.status_code in (401, 403):
            return _error_response(exc.status_code, "AccessDenied", "access denied")
        if 400 <= exc.status_code < 500:
            return _error_response(exc.status_code, "BadQuery", str(exc.detail))
        return _error_response(exc.status_code, "Internal", "internal error")

    @app.exception_handler(Exception)
    async def _unhandled(_request: Request, _exc: Exception) -> JSONResponse:
        return _error_response(500, "Internal", "internal error")

    @app.get("/api")
    async def api_root() -> JSONResponse:
        return _ok(
            {
                "service": "artist-libraries-catalog",
                "endpoints": [
                    "/api/libraries",
                    "/api/libraries/{slug}",
                    "/api/records/{record_id}",
                    "/api/search",
                    "/api/compare",
                    "/api/authors",
                    "/api/map.geojson",
                    "/api/assets/{asset_id}",
                    "/oai",
                ],
            }
        )

    @app.get("/api/libraries")
    async def list_libraries() -> JSONResponse:
        payload = []
        for lib in snapshot.libraries:
            doc = library_to_json(lib)
            doc["record_count"] = len(snapshot.records_for(lib.slug))
            payload.append(doc)
        return _ok({"libraries": payload})

    @app.get("/api/libraries/{slug}")
    async def get_library(slug: str) -> JSONResponse:
        if not snapshot.has_library(slug):
            raise not_found(f"unknown library {slug!r}")
        doc = library_to_json(snapshot.library(slug))
        doc["record_count"] = len(snapshot.records_for(slug))
        return _ok({"library": doc})

    @app.get("/api/records/{record_id}")
    async def get_record(record_id: str) -> JSONResponse:
        record = snapshot.record(record_id)
        if record is None:
            raise not_found(f"unknown record {record_id!r}")
        doc = record_to_json(record)
        doc["assets"] = [
            {
                "asset_id": a.asset_id,
                "kind": a.kind.value,
                "rights": a.rights.value,
                "has_derivative": a.derivative_path is not None,
            }
            for a in sorted(assets.values(), key=lambda a: a.asset_id)
            if a.record_id == record_id
        ]
        return _ok({"record": doc})

    @app.get("/api/search")
    async def search(request: Request) -> JSONResponse:
        params = request.query_params
        q = params.get("q")
        if q is None or not q.strip():
            raise bad_query("missing query parameter q")
        mode = params.get("mode", SIMPLE)
        if mode not in (SIMPLE, ADVANCED):
            raise bad_query(f"mode must be simple or advanced, got {mode!r}")
        library = params.get("library")
        if library is not None and library != "" and not snapshot.has_library(library):
            raise bad_query(f"unknown library {library!r}")
        page = _int_param(params, "page", 1, 1)
        per_page = _int_param(params, "per_page", DEFAULT_PER_PAGE, 1, MAX_PER_PAGE)
        try:
            ast = parse_query(q, mode)
        except QueryError as exc:
            raise bad_query(f"query syntax: {exc}", {"offset": exc.offset}) from exc

        matched = execute(index, ast)
        # the library facet spans the unfiltered result so the sidebar can
        # switch collections; marktype reflects the filtered view
        library_facet: dict[str, int] = {}
        for rid in matched:
            slug = snapshot.record(rid).library_slug
            library_facet[slug] = library_facet.get(slug, 0) + 1
        if library:
            matched = [rid for rid in matched if snapshot.record(rid).library_slug == library]
        marktype_facet = {
            kind: len(ids.intersection(matched))
            for kind, ids in sorted(index.marktypes.items())
            if ids.intersection(matched)
        }
        total = len(matched)
        start = (page - 1) * per_page
        return _ok(
            {
                "query": to_query_string(ast),
                "mode": mode,
                "page": page,
                "per_page": per_page,
                "total": total,
                "pages": math.ceil(total / per_page),
                "results": [_summary(snapshot.record(rid)) for rid in matched[start : start + per_page]],
                "facets": {
                    "library": dict(sorted(library_facet.items())),
                    "marktype": marktype_facet,
                },
            }
        )

    def _slugs_param(params, required_minimum: int) -> list[str]:
        raw = params.get("libs")
        if raw is None or not raw.strip():
            if required_minimum <= 1:
                return [lib.slug for lib in snapshot.libraries]
            raise bad_query("libs must name at least two libraries, comma-separated")
        slugs = [part.strip() for part in raw.split(",") if part.strip()]
        for slug in slugs:
            if not snapshot.has_library(slug):
                raise not_found(f"unknown library {slug!r}")
        return slugs

    @app.get("/api/compare")
    async def compare_endpoint(request: Request) -> JSONResponse:
        params = request.query_params
        slugs = _slugs_param(params, required_minimum=2)
        level_raw = params.get("level", Level.WORK.value)
        try:
            level = Level(level_raw)
        except ValueError:
            raise bad_query(f"level must be work or edition, got {level_raw!r}") from None
        try:
            report = compare(snapshot, slugs, level)
        except UnknownLibraryError as exc:
            raise not_found(str(exc)) from exc
        except ComparisonError as exc:
            raise bad_query(str(exc)) from exc
        return _ok(
            {
                "level": report.level.value,
                "libraries": list(report.libraries),
                "key_counts": report.key_counts,
                "shared": [
                    {"key": g.key, "libraries": list(g.libraries), "record_ids": list(g.record_ids)}
                    for g in report.shared
                ],
                "pairs": [
                    {
                        "left": p.left,
                        "right": p.right,
                        "intersection": p.intersection,
                        "union": p.union,
                        "jaccard": p.jaccard,
                    }
                    for p in report.pairs
                ],
            }
        )

    @app.get("/api/authors")
    async def authors_endpoint(request: Request) -> JSONResponse:
        slugs = _slugs_param(request.query_params, required_minimum=1)
        try:
            rows = author_frequency(snapshot, slugs)
        except UnknownLibraryError as exc:
            raise not_found(str(exc)) from exc
        except ComparisonError as exc:
            raise bad_query(str(exc)) from exc
        return _ok(
            {
                "libraries": slugs,
                "authors": [
                    {"creator_surname": r.creator_surname, "counts": r.counts, "total": r.total}
                    for r in rows
                ],
            }
        )

    @app.get("/api/map.geojson")
    async def map_geojson() -> Response:
        return Response(content=geojson_bytes(list(snapshot.libraries)), media_type=GEOJSON_MEDIA_TYPE)

    @app.get("/api/assets/{asset_id}")
    async def get_asset(asset_id: str, request: Request) -> Response:
        asset = assets.get(asset_id)
        if asset is None:
            raise not_found(f"unknown asset {asset_id!r}")
        variant_raw = request.query_params.get("variant", Variant.DERIVATIVE.value)
        try:
            variant = Variant(variant_raw)
        except ValueError:
            raise bad_query(f"variant must be original or derivative, got {variant_raw!r}") from None
        outcome = resolve_variant(asset, variant)
        if isinstance(outcome, Denied):
            raise access_denied(
                f"asset {asset_id} is not served in the {variant.value} variant",
                {"reason": outcome.reason},
            )
        path = store.root / Path(outcome.path)
        if not path.is_file():
            raise ApiException(500, "Internal", "asset bytes unavailable")
        media_type = mimetypes.guess_type(path.name)[0] or "application/octet-stream"
        return FileResponse(path, media_type=media_type)

    async def _oai(request: Request) -> Response:
        if request.method == "POST":
            body = (await request.body()).decode("utf-8", "replace")
            pairs = parse_qsl(body, keep_blank_values=True)
        else:
            pairs = request.query_params.multi_items()
        names = [name for name, _ in pairs]
        if len(names) != len(set(names)):
            dupes = sorted({n for n in names if names.count(n) > 1})
            xml = oai.error_response("badArgument", f"repeated argument(s): {', '.join(dupes)}")
        else:
            xml = oai.handle(dict(pairs))
        return Response(content=xml, media_type=OAI_MEDIA_TYPE)

    app.add_api_route("/oai", _oai, methods=["GET", "POST"])

    if config.static_dir is not None and Path(config.static_dir).is_dir():
        app.mount("/", StaticFiles(directory=config.static_dir, html=True), name="portal")

    return app
