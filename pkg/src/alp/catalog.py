"""Canonical domain types, validation, identifiers and the file-backed store.

Store layout (all paths relative to the store root, see FORMAT.md):

    libraries.json                    array of ArtistLibrary documents
    collections/<slug>/records.jsonl  one BibRecord per line, UTF-8
    collections/<slug>/assets.jsonl   one AssetRecord per line
    collections/<slug>/assets/        binary asset files

Mutation is single-writer (the CLI takes a lock file); the serving
process loads an immutable Snapshot and never writes.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path

DC_ELEMENTS = frozenset(
    {
        "contributor",
        "coverage",
        "creator",
        "date",
        "description",
        "format",
        "identifier",
        "language",
        "publisher",
        "relation",
        "rights",
        "source",
        "subject",
        "title",
        "type",
    }
)

RECORD_ID_RE = re.compile(r"^[a-z0-9_]+-[0-9]{6}$")
SLUG_RE = re.compile(r"^[a-z0-9_]+$")
QUALIFIER_RE = re.compile(r"^[a-z][a-z0-9_]*$")

MAX_SEQUENCE = 999999


class CatalogError(Exception):
    """Base class for catalog-level failures."""


class SequenceOverflowError(CatalogError):
    """Raised when a collection has exhausted its 6-digit id space."""


class DuplicateRecordError(CatalogError):
    """Raised when a write would store two records with the same id."""


class UnknownLibraryError(CatalogError):
    """Raised when an operation names a library slug the registry lacks."""


class StoreError(CatalogError):
    """Raised on store corruption; message carries file and line context."""


class MarkKind(Enum):
    DEDICATION = "dedication"
    ANNOTATION = "annotation"
    PRICE_ANNOTATION = "price_annotation"
    DOG_EAR = "dog_ear"
    BOOKMARK = "bookmark"
    ERASURE = "erasure"

    @classmethod
    def parse(cls, raw: str) -> "MarkKind":
        """Accept both wire names ("dog_ear") and ingest names ("DogEar")."""
        text = raw.strip()
        for kind in cls:
            if text == kind.value or text.lower().replace("_", "") == kind.value.replace("_", ""):
                return kind
        raise ValueError(f"unknown mark kind: {raw!r}")


class Provenance(Enum):
    MATERIAL_FONDS = "material_fonds"
    RECONSTITUTED = "reconstituted"
    INVENTORY = "inventory"
    SALES_CATALOG = "sales_catalog"


class Provider(Enum):
    GALLICA_LIKE = "gallica_like"
    OPEN_LIBRARY_LIKE = "open_library_like"
    FIXTURE = "fixture"


class MatchLevel(Enum):
    EXACT_EDITION = "exact_edition"
    APPROXIMATE_EDITION = "approximate_edition"


@dataclass(frozen=True)
class DcElement:
    """One Dublin Core statement: element name, optional qualifier, value."""

    element: str
    value: str
    qualifier: str | None = None
    lang: str | None = None


@dataclass(frozen=True)
class ReadingMark:
    """A physical trace individualizing a copy (dedication, dog-ear, ...)."""

    kind: MarkKind
    locus: str
    transcription: str | None = None
    asset_ids: tuple[str, ...] = ()


@dataclass(frozen=True)
class DigitalSurrogate:
    """Link to a provider's digitized edition standing in for the copy."""

    provider: Provider
    provider_record_id: str
    access_url: str
    match_level: MatchLevel
    total_score: float


@dataclass(frozen=True)
class BibRecord:
    """One book in one artist's library.

    ``created_at`` is the ingest timestamp (UTC, ``YYYY-MM-DDThh:mm:ssZ``);
    it doubles as the OAI-PMH datestamp.
    """

    record_id: str
    library_slug: str
    elements: tuple[DcElement, ...]
    shelf_mark: str | None = None
    marks: tuple[ReadingMark, ...] = ()
    surrogates: tuple[DigitalSurrogate, ...] = ()
    created_at: str | None = None

    def values(self, element: str) -> list[str]:
        return [e.value for e in self.elements if e.element == element]

    def first_value(self, element: str) -> str | None:
        for e in self.elements:
            if e.element == element:
                return e.value
        return None

    def with_surrogate(self, surrogate: DigitalSurrogate) -> "BibRecord":
        return replace(self, surrogates=self.surrogates + (surrogate,))


@dataclass(frozen=True)
class ArtistLibrary:
    """A collection: artist identity, provenance type, holding location."""

    slug: str
    artist_name: str
    provenance: Provenance
    holding_site: str
    birth_year: int | None = None
    death_year: int | None = None
    latitude: float | None = None
    longitude: float | None = None
    description: str = ""


@dataclass(frozen=True)
class Violation:
    """One broken invariant; ``field`` and ``rule`` identify it, data not failure."""

    field: str
    rule: str
    message: str


def assign_id(library_slug: str, existing_max_seq: int) -> str:
    """Next record id for a collection: ``<slug>-<seq+1 zero-padded to 6>``.

    Pure and monotone in ``existing_max_seq``; raises SequenceOverflowError
    past 999999.
    """
    if existing_max_seq < 0:
        raise ValueError(f"existing_max_seq must be >= 0, got {existing_max_seq}")
    nxt = existing_max_seq + 1
    if nxt > MAX_SEQUENCE:
        raise SequenceOverflowError(f"collection {library_slug!r} exhausted its {MAX_SEQUENCE} record ids")
    return f"{library_slug}-{nxt:06d}"


def record_sequence(record_id: str) -> int:
    """Sequence number embedded in a record id ("monet-000900" -> 900)."""
    return int(record_id.rsplit("-", 1)[1])


def validate_record(record: BibRecord, known_libraries: set[str]) -> list[Violation]:
    """Check every record invariant; never raises, violations are data.

    Store-wide id uniqueness is checked at write time, not here.
    """
    violations: list[Violation] = []

    if not isinstance(record.record_id, str) or not RECORD_ID_RE.match(record.record_id):
        violations.append(
            Violation("record_id", "format", f"record_id {record.record_id!r} does not match <slug>-<6 digits>")
        )
    elif record.record_id.rsplit("-", 1)[0] != record.library_slug:
        violations.append(
            Violation(
                "record_id",
                "library_prefix",
                f"record_id {record.record_id!r} does not embed library_slug {record.library_slug!r}",
            )
        )

    if record.library_slug not in known_libraries:
        violations.append(
            Violation("library_slug", "unknown_library", f"library {record.library_slug!r} is not registered")
        )

    has_title = False
    for i, el in enumerate(record.elements):
        where = f"elements[{i}]"
        if el.element not in DC_ELEMENTS:
            violations.append(
                Violation(where, "illegal_element_name", f"{el.element!r} is not one of the 15 Dublin Core elements")
            )
        elif el.element == "title":
            has_title = True
        if not isinstance(el.value, str) or not el.value.strip():
            violations.append(Violation(where, "empty_value", f"{el.element} value is empty after trimming"))
        if el.qualifier is not None and not QUALIFIER_RE.match(el.qualifier):
            violations.append(
                Violation(where, "qualifier_format", f"qualifier {el.qualifier!r} does not match [a-z][a-z0-9_]*")
            )
    if not has_title:
        violations.append(Violation("elements", "missing_title", "at least one title element is required"))

    for i, mark in enumerate(record.marks):
        if not isinstance(mark.kind, MarkKind):
            violations.append(Violation(f"marks[{i}]", "mark_kind", f"unknown mark kind {mark.kind!r}"))

    return violations


def validate_library(library: ArtistLibrary) -> list[Violation]:
    """Check ArtistLibrary invariants (slug shape, coordinates, life years)."""
    violations: list[Violation] = []
    if not isinstance(library.slug, str) or not SLUG_RE.match(library.slug):
        violations.append(Violation("slug", "format", f"slug {library.slug!r} does not match [a-z0-9_]+"))
    if not isinstance(library.provenance, Provenance):
        violations.append(Violation("provenance", "enum", f"unknown provenance {library.provenance!r}"))
    if (library.latitude is None) != (library.longitude is None):
        violations.append(Violation("latitude", "coordinate_pair", "latitude and longitude must be set together"))
    if library.latitude is not None and not -90.0 <= library.latitude <= 90.0:
        violations.append(Violation("latitude", "range", f"latitude {library.latitude} outside [-90, 90]"))
    if library.longitude is not None and not -180.0 <= library.longitude <= 180.0:
        violations.append(Violation("longitude", "range", f"longitude {library.longitude} outside [-180, 180]"))
    if library.birth_year is not None and library.death_year is not None and library.birth_year >= library.death_year:
        violations.append(
            Violation("birth_year", "life_years", f"birth_year {library.birth_year} >= death_year {library.death_year}")
        )
    return violations


# --- JSON codecs (line-level encoding documented in FORMAT.md) ---------------


def element_to_json(el: DcElement) -> dict:
    d: dict = {"element": el.element, "value": el.value}
    if el.qualifier is not None:
        d["qualifier"] = el.qualifier
    if el.lang is not None:
        d["lang"] = el.lang
    return d


def element_from_json(d: dict) -> DcElement:
    return DcElement(
        element=d["element"], value=d["value"], qualifier=d.get("qualifier"), lang=d.get("lang")
    )


def mark_to_json(mark: ReadingMark) -> dict:
    d: dict = {"kind": mark.kind.value, "locus": mark.locus}
    if mark.transcription is not None:
        d["transcription"] = mark.transcription
    if mark.asset_ids:
        d["asset_ids"] = list(mark.asset_ids)
    return d


def mark_from_json(d: dict) -> ReadingMark:
    return ReadingMark(
        kind=MarkKind(d["kind"]),
        locus=d["locus"],
        transcription=d.get("transcription"),
        asset_ids=tuple(d.get("asset_ids", ())),
    )


def surrogate_to_json(s: DigitalSurrogate) -> dict:
    return {
        "provider": s.provider.value,
        "provider_record_id": s.provider_record_id,
        "access_url": s.access_url,
        "match_level": s.match_level.value,
        "total_score": s.total_score,
    }


def surrogate_from_json(d: dict) -> DigitalSurrogate:
    return DigitalSurrogate(
        provider=Provider(d["provider"]),
        provider_record_id=d["provider_record_id"],
        access_url=d["access_url"],
        match_level=MatchLevel(d["match_level"]),
        total_score=d["total_score"],
    )


def record_to_json(record: BibRecord) -> dict:
    d: dict = {
        "record_id": record.record_id,
        "library_slug": record.library_slug,
        "elements": [element_to_json(e) for e in record.elements],
    }
    if record.shelf_mark is not None:
        d["shelf_mark"] = record.shelf_mark
    if record.marks:
        d["marks"] = [mark_to_json(m) for m in record.marks]
    if record.surrogates:
        d["surrogates"] = [surrogate_to_json(s) for s in record.surrogates]
    if record.created_at is not None:
        d["created_at"] = record.created_at
    return d


def record_from_json(d: dict) -> BibRecord:
    return BibRecord(
        record_id=d["record_id"],
        library_slug=d["library_slug"],
        elements=tuple(element_from_json(e) for e in d["elements"]),
        shelf_mark=d.get("shelf_mark"),
        marks=tuple(mark_from_json(m) for m in d.get("marks", ())),
        surrogates=tuple(surrogate_from_json(s) for s in d.get("surrogates", ())),
        created_at=d.get("created_at"),
    )


def library_to_json(lib: ArtistLibrary) -> dict:
    d: dict = {
        "slug": lib.slug,
        "artist_name": lib.artist_name,
        "provenance": lib.provenance.value,
        "holding_site": lib.holding_site,
    }
    if lib.birth_year is not None:
        d["birth_year"] = lib.birth_year
    if lib.death_year is not None:
        d["death_year"] = lib.death_year
    if lib.latitude is not None:
        d["latitude"] = lib.latitude
    if lib.longitude is not None:
        d["longitude"] = lib.longitude
    if lib.description:
        d["description"] = lib.description
    return d


def library_from_json(d: dict) -> ArtistLibrary:
    return ArtistLibrary(
        slug=d["slug"],
        artist_name=d["artist_name"],
        provenance=Provenance(d["provenance"]),
        holding_site=d["holding_site"],
        birth_year=d.get("birth_year"),
        death_year=d.get("death_year"),
        latitude=d.get("latitude"),
        longitude=d.get("longitude"),
        description=d.get("description", ""),
    )


def _dump(obj: dict) -> str:
    return json.dumps(obj, ensure_ascii=False)


# --- Store -------------------------------------------------------------------


class Store:
    """File-backed document store rooted at one directory.

    Callers mutating the store must hold the single-writer role (the CLI
    serializes through a lock file); readers load immutable snapshots.
    """

    LOCK_NAME = ".writer.lock"

    def __init__(self, root: str | Path):
        self.root = Path(root)

    @property
    def libraries_path(self) -> Path:
        return self.root / "libraries.json"

    @property
    def lock_path(self) -> Path:
        return self.root / self.LOCK_NAME

    def collection_dir(self, slug: str) -> Path:
        return self.root / "collections" / slug

    def records_path(self, slug: str) -> Path:
        return self.collection_dir(slug) / "records.jsonl"

    def assets_registry_path(self, slug: str) -> Path:
        return self.collection_dir(slug) / "assets.jsonl"

    def assets_dir(self, slug: str) -> Path:
        return self.collection_dir(slug) / "assets"

    # -- libraries

    def read_libraries(self) -> list[ArtistLibrary]:
        if not self.libraries_path.exists():
            return []
        try:
            raw = json.loads(self.libraries_path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise StoreError(f"{self.libraries_path.name}: invalid JSON: {exc}") from exc
        libs = [library_from_json(d) for d in raw]
        slugs = [lib.slug for lib in libs]
        dupes = {s for s in slugs if slugs.count(s) > 1}
        if dupes:
            raise StoreError(f"{self.libraries_path.name}: duplicate library slugs {sorted(dupes)}")
        return libs

    def write_libraries(self, libraries: list[ArtistLibrary]) -> None:
        slugs = [lib.slug for lib in libraries]
        dupes = {s for s in slugs if slugs.count(s) > 1}
        if dupes:
            raise StoreError(f"duplicate library slugs {sorted(dupes)}")
        self.root.mkdir(parents=True, exist_ok=True)
        payload = json.dumps([library_to_json(l) for l in libraries], ensure_ascii=False, indent=2) + "\n"
        _atomic_write(self.libraries_path, payload.encode("utf-8"))

    # -- records

    def read_records(self, slug: str) -> list[BibRecord]:
        return [record for _, record in self.iter_records(slug)]

    def iter_records(self, slug: str):
        """Yield (line_number, BibRecord); line numbers feed corruption reports."""
        path = self.records_path(slug)
        if not path.exists():
            return
        with path.open(encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    yield lineno, record_from_json(json.loads(line))
                except (json.JSONDecodeError, KeyError, ValueError) as exc:
                    rel = path.relative_to(self.root)
                    raise StoreError(f"{rel}:{lineno}: bad record line: {exc}") from exc

    def write_records(self, slug: str, records: list[BibRecord]) -> None:
        """Replace a collection's record file; duplicate record ids are an error."""
        seen: set[str] = set()
        for record in records:
            if record.record_id in seen:
                raise DuplicateRecordError(f"duplicate record_id {record.record_id!r}")
            seen.add(record.record_id)
        self.collection_dir(slug).mkdir(parents=True, exist_ok=True)
        body = "".join(_dump(record_to_json(r)) + "\n" for r in records)
        _atomic_write(self.records_path(slug), body.encode("utf-8"))

    def append_records(self, slug: str, new_records: list[BibRecord]) -> None:
        existing = self.read_records(slug)
        self.write_records(slug, existing + list(new_records))

    def max_sequence(self, slug: str) -> int:
        """Highest sequence number currently stored for a collection (0 if none)."""
        seqs = [record_sequence(r.record_id) for r in self.read_records(slug)]
        return max(seqs, default=0)

    def load_snapshot(self) -> "Snapshot":
        return Snapshot.load(self)


def _atomic_write(path: Path, data: bytes) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_bytes(data)
    tmp.replace(path)


class Snapshot:
    """Immutable view of the whole store used by the serving process.

    Loading validates every record and fails fast with file:line context.
    ``fingerprint`` identifies the content; OAI resumption tokens bind to it.
    """

    def __init__(self, libraries: list[ArtistLibrary], records: list[BibRecord]):
        self.libraries = tuple(sorted(libraries, key=lambda l: l.slug))
        self.records = tuple(sorted(records, key=lambda r: r.record_id))
        self._by_slug = {lib.slug: lib for lib in self.libraries}
        self._by_id = {r.record_id: r for r in self.records}
        digest = hashlib.sha256()
        for lib in self.libraries:
            digest.update(_dump(library_to_json(lib)).encode("utf-8"))
        for record in self.records:
            digest.update(_dump(record_to_json(record)).encode("utf-8"))
        self.fingerprint = digest.hexdigest()[:16]

    @classmethod
    def load(cls, store: Store) -> "Snapshot":
        libraries = store.read_libraries()
        known = {lib.slug for lib in libraries}
        problems: list[str] = []
        for lib in libraries:
            for v in validate_library(lib):
                problems.append(f"libraries.json: {lib.slug}: {v.field}: {v.message}")
        records: list[BibRecord] = []
        seen_ids: set[str] = set()
        for slug in sorted(known):
            rel = store.records_path(slug).relative_to(store.root)
            for lineno, record in store.iter_records(slug):
                for v in validate_record(record, known):
                    problems.append(f"{rel}:{lineno}: {v.field}: {v.message}")
                if record.record_id in seen_ids:
                    problems.append(f"{rel}:{lineno}: duplicate record_id {record.record_id!r}")
                seen_ids.add(record.record_id)
                records.append(record)
        if problems:
            raise StoreError("store validation failed:\n" + "\n".join(problems))
        return cls(libraries, records)

    def library(self, slug: str) -> ArtistLibrary:
        try:
            return self._by_slug[slug]
        except KeyError:
            raise UnknownLibraryError(f"unknown library {slug!r}") from None

    def has_library(self, slug: str) -> bool:
        return slug in self._by_slug

    def record(self, record_id: str) -> BibRecord | None:
        return self._by_id.get(record_id)

    def records_for(self, slug: str) -> list[BibRecord]:
        if slug not in self._by_slug:
            raise UnknownLibraryError(f"unknown library {slug!r}")
        return [r for r in self.records if r.library_slug == slug]
