"""Bibliographic metadata codecs: RAMEAU headings, ingest CSV, oai_dc XML.

Wire details (exact header, marks grammar, qualifier encoding) are
documented in FORMAT.md. All functions here are pure.
"""

from __future__ import annotations

import csv
import io
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field

from .catalog import (
    DC_ELEMENTS,
    BibRecord,
    DcElement,
    MarkKind,
    ReadingMark,
)

RAMEAU_SEPARATOR = " -- "

RIGHTS_VALUES = ("public_domain", "in_copyright", "unknown")

INGEST_HEADER = (
    "library_slug",
    "title",
    "creator",
    "date",
    "publisher",
    "language",
    "shelf_mark",
    "subjects",
    "marks",
    "rights",
)

OAI_DC_NS = "http://www.openarchives.org/OAI/2.0/oai_dc/"
DC_NS = "http://purl.org/dc/elements/1.1/"
XSI_NS = "http://www.w3.org/2001/XMLSchema-instance"
XML_NS = "http://www.w3.org/XML/1998/namespace"
# Extension namespace carrying DC qualifiers (see FORMAT.md and schemas/).
QDC_NS = "urn:alp:qualified-dc"

OAI_DC_SCHEMA_LOCATION = f"{OAI_DC_NS} http://www.openarchives.org/OAI/2.0/oai_dc.xsd"

for _prefix, _uri in (
    ("oai_dc", OAI_DC_NS),
    ("dc", DC_NS),
    ("xsi", XSI_NS),
    ("aqdc", QDC_NS),
):
    ET.register_namespace(_prefix, _uri)


class MetadataError(Exception):
    """Base class for metadata codec failures."""


class RameauParseError(MetadataError):
    def __init__(self, message: str, segment_index: int):
        super().__init__(message)
        self.segment_index = segment_index


class IngestFormatError(MetadataError):
    """Whole-file ingest failure (bad header, undecodable bytes)."""


class DcXmlError(MetadataError):
    """Raised on malformed oai_dc XML or illegal element names."""

    def __init__(self, message: str, illegal_names: tuple[str, ...] = ()):
        super().__init__(message)
        self.illegal_names = illegal_names


@dataclass(frozen=True)
class RameauHeading:
    """A RAMEAU subject heading: head term plus ordered subdivisions."""

    head: str
    subdivisions: tuple[str, ...] = ()

    def serialize(self) -> str:
        return RAMEAU_SEPARATOR.join((self.head,) + self.subdivisions)


def parse_rameau(raw: str) -> RameauHeading:
    """Split on literal " -- ", trimming segments; first segment is the head.

    "Peinture -- France -- 19e siècle" -> head "Peinture",
    subdivisions ("France", "19e siècle").
    """
    segments = [seg.strip() for seg in raw.split(RAMEAU_SEPARATOR)]
    for i, seg in enumerate(segments):
        if not seg:
            what = "head" if i == 0 else f"subdivision {i}"
            raise RameauParseError(f"empty {what} in RAMEAU heading {raw!r}", segment_index=i)
    return RameauHeading(head=segments[0], subdivisions=tuple(segments[1:]))


@dataclass(frozen=True)
class IngestRow:
    """One accepted CSV data row, decoded but not yet a stored record."""

    line: int
    library_slug: str
    title: str
    creator: str | None = None
    date: str | None = None
    publisher: str | None = None
    language: str | None = None
    shelf_mark: str | None = None
    subjects: tuple[RameauHeading, ...] = ()
    marks: tuple[ReadingMark, ...] = ()
    rights: str | None = None


@dataclass(frozen=True)
class RowError:
    line: int
    reason: str


def _clean(cell: str) -> str | None:
    """Trim a CSV cell and normalize embedded CR/CRLF; empty becomes None."""
    value = cell.replace("\r\n", "\n").replace("\r", "\n").strip()
    return value or None


def parse_marks(cell: str) -> tuple[ReadingMark, ...]:
    """Parse the marks grammar ``kind:locus[:transcription]`` joined by ``;``."""
    marks = []
    for item in cell.split(";"):
        item = item.strip()
        if not item:
            continue
        parts = item.split(":", 2)
        if len(parts) < 2 or not parts[1].strip():
            raise ValueError(f"mark descriptor {item!r} lacks a locus")
        kind = MarkKind.parse(parts[0])
        transcription = parts[2].strip() if len(parts) == 3 and parts[2].strip() else None
        marks.append(ReadingMark(kind=kind, locus=parts[1].strip(), transcription=transcription))
    return tuple(marks)


def parse_ingest_csv(data: bytes) -> tuple[list[IngestRow], list[RowError]]:
    """Decode an ingest CSV: every data row yields exactly one IngestRow or RowError.

    The parser is total over row contents; only a missing/misordered header
    or undecodable bytes reject the whole file.
    """
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise IngestFormatError(f"ingest CSV is not valid UTF-8: {exc}") from exc
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise IngestFormatError("ingest CSV is empty") from None
    if tuple(h.strip() for h in header) != INGEST_HEADER:
        raise IngestFormatError(
            f"ingest CSV header must be exactly {','.join(INGEST_HEADER)}; got {','.join(header)!r}"
        )

    rows: list[IngestRow] = []
    errors: list[RowError] = []
    for line, cells in enumerate(reader, start=2):
        if not cells or all(not c.strip() for c in cells):
            continue
        if len(cells) != len(INGEST_HEADER):
            errors.append(RowError(line, f"expected {len(INGEST_HEADER)} columns, got {len(cells)}"))
            continue
        raw = dict(zip(INGEST_HEADER, cells))
        library_slug = _clean(raw["library_slug"])
        title = _clean(raw["title"])
        if not library_slug:
            errors.append(RowError(line, "library_slug mandatory"))
            continue
        if not title:
            errors.append(RowError(line, "title mandatory"))
            continue

        try:
            subjects = tuple(
                parse_rameau(part)
                for part in (raw["subjects"] or "").split("||")
                if part.strip()
            )
        except RameauParseError as exc:
            errors.append(RowError(line, f"subjects: {exc}"))
            continue
        try:
            marks = parse_marks(raw["marks"] or "")
        except ValueError as exc:
            errors.append(RowError(line, f"marks: {exc}"))
            continue
        rights = _clean(raw["rights"])
        if rights is not None and rights not in RIGHTS_VALUES:
            errors.append(RowError(line, f"rights must be one of {', '.join(RIGHTS_VALUES)}; got {rights!r}"))
            continue

        rows.append(
            IngestRow(
                line=line,
                library_slug=library_slug,
                title=title,
                creator=_clean(raw["creator"]),
                date=_clean(raw["date"]),
                publisher=_clean(raw["publisher"]),
                language=_clean(raw["language"]),
                shelf_mark=_clean(raw["shelf_mark"]),
                subjects=subjects,
                marks=marks,
                rights=rights,
            )
        )
    return rows, errors


def build_record(row: IngestRow, record_id: str, created_at: str | None = None) -> BibRecord:
    """Materialize an accepted ingest row as a BibRecord with the given id."""
    elements = [DcElement("title", row.title)]
    for name in ("creator", "date", "publisher", "language"):
        value = getattr(row, name)
        if value:
            elements.append(DcElement(name, value))
    for heading in row.subjects:
        elements.append(DcElement("subject", heading.serialize()))
    if row.rights:
        elements.append(DcElement("rights", row.rights))
    return BibRecord(
        record_id=record_id,
        library_slug=row.library_slug,
        elements=tuple(elements),
        shelf_mark=row.shelf_mark,
        marks=row.marks,
        created_at=created_at,
    )


# --- oai_dc XML --------------------------------------------------------------


def to_oai_dc_xml(record: BibRecord) -> ET.Element:
    """Emit an ``oai_dc:dc`` element, one child per DcElement in stored order.

    Qualifiers ride as an ``xsi:type``-declared extension attribute so the
    output stays valid against the vendored oai_dc schema (FORMAT.md).
    """
    root = ET.Element(f"{{{OAI_DC_NS}}}dc")
    root.set(f"{{{XSI_NS}}}schemaLocation", OAI_DC_SCHEMA_LOCATION)
    for el in record.elements:
        child = ET.SubElement(root, f"{{{DC_NS}}}{el.element}")
        child.text = el.value
        if el.qualifier is not None:
            child.set(f"{{{XSI_NS}}}type", "aqdc:QualifiedLiteral")
            child.set(f"{{{QDC_NS}}}qualifier", el.qualifier)
        if el.lang is not None:
            child.set(f"{{{XML_NS}}}lang", el.lang)
    return root


def to_oai_dc_bytes(record: BibRecord) -> bytes:
    return ET.tostring(to_oai_dc_xml(record), encoding="utf-8", xml_declaration=False)


def from_oai_dc_xml(fragment: ET.Element | str | bytes) -> list[DcElement]:
    """Inverse of to_oai_dc_xml; unknown child elements are an error, not dropped."""
    if isinstance(fragment, (str, bytes)):
        try:
            fragment = ET.fromstring(fragment)
        except ET.ParseError as exc:
            raise DcXmlError(f"malformed oai_dc XML: {exc}") from exc
    elements: list[DcElement] = []
    illegal: list[str] = []
    for child in fragment:
        if not child.tag.startswith(f"{{{DC_NS}}}"):
            illegal.append(child.tag)
            continue
        name = child.tag[len(DC_NS) + 2 :]
        if name not in DC_ELEMENTS:
            illegal.append(name)
            continue
        elements.append(
            DcElement(
                element=name,
                value=child.text or "",
                qualifier=child.get(f"{{{QDC_NS}}}qualifier"),
                lang=child.get(f"{{{XML_NS}}}lang"),
            )
        )
    if illegal:
        raise DcXmlError(
            f"illegal element name(s) in oai_dc payload: {', '.join(sorted(illegal))}",
            illegal_names=tuple(sorted(illegal)),
        )
    return elements
