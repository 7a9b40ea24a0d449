"""OAI-PMH 2.0 data provider over a store snapshot.

Sets map 1:1 to library slugs; datestamps are record ingest timestamps;
deleted-record tracking is declared "no". Protocol errors (badVerb,
badArgument, idDoesNotExist, noRecordsMatch, badResumptionToken,
cannotDisseminateFormat) are returned inside the XML envelope, never as
transport errors. Resumption tokens are opaque base64 bound to the
snapshot fingerprint, so a reload invalidates them instead of silently
reshuffling a harvest.
"""

from __future__ import annotations

import base64
import binascii
import json
import re
from dataclasses import dataclass
from datetime import datetime, timezone
from xml.etree import ElementTree as ET

from .catalog import BibRecord, Snapshot
from .metadata import OAI_DC_NS, XSI_NS, to_oai_dc_xml

OAI_NS = "http://www.openarchives.org/OAI/2.0/"
OAI_SCHEMA_LOCATION = f"{OAI_NS} http://www.openarchives.org/OAI/2.0/OAI-PMH.xsd"
OAI_DC_SCHEMA_URL = "http://www.openarchives.org/OAI/2.0/oai_dc.xsd"

ET.register_namespace("", OAI_NS)

PAGE_SIZE = 100
METADATA_PREFIX = "oai_dc"
EARLIEST_FALLBACK = "1970-01-01T00:00:00Z"

VERBS = (
    "Identify",
    "ListMetadataFormats",
    "ListSets",
    "GetRecord",
    "ListIdentifiers",
    "ListRecords",
)

# arguments each verb accepts, per the protocol's argument tables
_VERB_ARGS: dict[str, set[str]] = {
    "Identify": set(),
    "ListMetadataFormats": {"identifier"},
    "ListSets": {"resumptionToken"},
    "GetRecord": {"identifier", "metadataPrefix"},
    "ListIdentifiers": {"metadataPrefix", "from", "until", "set", "resumptionToken"},
    "ListRecords": {"metadataPrefix", "from", "until", "set", "resumptionToken"},
}

_DATE_RE = re.compile(r"\d{4}-\d{2}-\d{2}")
_DATETIME_RE = re.compile(r"\d{4}-\d{2}-\d{2}T\d{2}:\d{2}:\d{2}Z")


class OaiProtocolError(Exception):
    """Internal control flow; rendered as an <error> element, never raised out."""

    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code
        self.message = message


class TokenError(ValueError):
    pass


@dataclass(frozen=True)
class ResumptionToken:
    """Continuation state: where a list stopped and which snapshot it walked."""

    verb: str
    offset: int
    snapshot_id: str
    set_spec: str | None = None
    date_from: str | None = None
    date_until: str | None = None

    def encode(self) -> str:
        payload = {
            "verb": self.verb,
            "offset": self.offset,
            "snap": self.snapshot_id,
            "set": self.set_spec,
            "from": self.date_from,
            "until": self.date_until,
        }
        blob = json.dumps(payload, sort_keys=True, separators=(",", ":")).encode("utf-8")
        return base64.urlsafe_b64encode(blob).decode("ascii")

    @classmethod
    def decode(cls, raw: str) -> "ResumptionToken":
        try:
            payload = json.loads(base64.urlsafe_b64decode(raw.encode("ascii")))
        except (ValueError, binascii.Error) as exc:
            raise TokenError(f"undecodable resumption token: {exc}") from exc
        if not isinstance(payload, dict):
            raise TokenError("resumption token payload is not an object")
        try:
            token = cls(
                verb=payload["verb"],
                offset=int(payload["offset"]),
                snapshot_id=payload["snap"],
                set_spec=payload.get("set"),
                date_from=payload.get("from"),
                date_until=payload.get("until"),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise TokenError(f"malformed resumption token: {exc}") from exc
        if token.offset < 0:
            raise TokenError("negative offset")
        return token


def _utc_now() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def _normalize_bound(value: str, is_until: bool) -> str:
    """Pad a day-granularity bound to the second granularity records carry."""
    if _DATETIME_RE.fullmatch(value):
        return value
    return f"{value}T23:59:59Z" if is_until else f"{value}T00:00:00Z"


class OaiEndpoint:
    """Stateless request handler; every call renders one complete envelope."""

    def __init__(
        self,
        snapshot: Snapshot,
        repository_id: str = "alp",
        repository_name: str = "Artist Libraries Catalog",
        base_url: str = "http://localhost:8000/oai",
        admin_email: str = "curator@example.org",
        page_size: int = PAGE_SIZE,
        clock=_utc_now,
    ):
        self.snapshot = snapshot
        self.repository_id = repository_id
        self.repository_name = repository_name
        self.base_url = base_url
        self.admin_email = admin_email
        self.page_size = page_size
        self.clock = clock

    # -- public entry points

    def handle(self, params: dict[str, str]) -> bytes:
        params = dict(params)
        verb = params.pop("verb", None)
        try:
            if verb is None or verb not in VERBS:
                raise OaiProtocolError("badVerb", f"unknown or missing verb {verb!r}")
            allowed = _VERB_ARGS[verb]
            illegal = sorted(set(params) - allowed)
            if illegal:
                raise OaiProtocolError("badVerb" if "verb" in illegal else "badArgument",
                                       f"illegal argument(s) for {verb}: {', '.join(illegal)}")
            if "resumptionToken" in params and len(params) > 1:
                raise OaiProtocolError(
                    "badArgument", "resumptionToken is an exclusive argument"
                )
            body = getattr(self, f"_verb_{verb}")(params)
            return self._envelope(verb, params, body)
        except OaiProtocolError as err:
            return self._error_envelope(verb if verb in VERBS else None, params, err)

    def handle_oai(self, verb: str, params: dict[str, str]) -> bytes:
        return self.handle({**params, "verb": verb})

    def error_response(self, code: str, message: str) -> bytes:
        """Envelope for transport-level problems (e.g. repeated arguments)."""
        return self._error_envelope(None, {}, OaiProtocolError(code, message))

    # -- envelope plumbing

    def _request_element(self, verb: str | None, params: dict[str, str]) -> ET.Element:
        request = ET.Element(f"{{{OAI_NS}}}request")
        request.text = self.base_url
        if verb is not None:
            request.set("verb", verb)
            for key, value in sorted(params.items()):
                request.set(key, value)
        return request

    def _shell(self, request: ET.Element) -> ET.Element:
        root = ET.Element(f"{{{OAI_NS}}}OAI-PMH")
        root.set(f"{{{XSI_NS}}}schemaLocation", OAI_SCHEMA_LOCATION)
        response_date = ET.SubElement(root, f"{{{OAI_NS}}}responseDate")
        response_date.text = self.clock()
        root.append(request)
        return root

    def _envelope(self, verb: str, params: dict[str, str], body: ET.Element) -> bytes:
        root = self._shell(self._request_element(verb, params))
        root.append(body)
        return ET.tostring(root, encoding="utf-8", xml_declaration=True)

    def _error_envelope(
        self, verb: str | None, params: dict[str, str], err: OaiProtocolError
    ) -> bytes:
        # bad requests echo no arguments, per the protocol's error rules
        echo_args = err.code not in ("badVerb", "badArgument")
        request = self._request_element(verb if echo_args else None, params if echo_args else {})
        root = self._shell(request)
        error = ET.SubElement(root, f"{{{OAI_NS}}}error")
        error.set("code", err.code)
        error.text = err.message
        return ET.tostring(root, encoding="utf-8", xml_declaration=True)

    # -- identifiers and record rendering

    def identifier_for(self, record_id: str) -> str:
        return f"oai:{self.repository_id}:{record_id}"

    def _record_for_identifier(self, identifier: str) -> BibRecord:
        prefix = f"oai:{self.repository_id}:"
        record = (
            self.snapshot.record(identifier[len(prefix):])
            if identifier.startswith(prefix)
            else None
        )
        if record is None:
            raise OaiProtocolError("idDoesNotExist", f"no record with identifier {identifier!r}")
        return record

    def _datestamp(self, record: BibRecord) -> str:
        return record.created_at or EARLIEST_FALLBACK

    def _header_element(self, record: BibRecord) -> ET.Element:
        header = ET.Element(f"{{{OAI_NS}}}header")
        identifier = ET.SubElement(header, f"{{{OAI_NS}}}identifier")
        identifier.text = self.identifier_for(record.record_id)
        datestamp = ET.SubElement(header, f"{{{OAI_NS}}}datestamp")
        datestamp.text = self._datestamp(record)
        set_spec = ET.SubElement(header, f"{{{OAI_NS}}}setSpec")
        set_spec.text = record.library_slug
        return header

    def _record_element(self, record: BibRecord) -> ET.Element:
        record_el = ET.Element(f"{{{OAI_NS}}}record")
        record_el.append(self._header_element(record))
        metadata = ET.SubElement(record_el, f"{{{OAI_NS}}}metadata")
        metadata.append(to_oai_dc_xml(record))
        return record_el

    # -- list selection

    def _check_prefix(self, params: dict[str, str]) -> None:
        prefix = params.get("metadataPrefix")
        if prefix is None:
            raise OaiProtocolError("badArgument", "metadataPrefix is required")
        if prefix != METADATA_PREFIX:
            raise OaiProtocolError(
                "cannotDisseminateFormat", f"only {METADATA_PREFIX} is supported, not {prefix!r}"
            )

    def _check_datestamp_arg(self, params: dict[str, str], key: str) -> str | None:
        value = params.get(key)
        if value is None:
            return None
        if not (_DATE_RE.fullmatch(value) or _DATETIME_RE.fullmatch(value)):
            raise OaiProtocolError(
                "badArgument",
                f"{key} must be YYYY-MM-DD or YYYY-MM-DDThh:mm:ssZ, got {value!r}",
            )
        return value

    def _selection(self, verb: str, params: dict[str, str]) -> tuple[list[BibRecord], ResumptionToken | None, int]:
        """Filtered record list, the continuation state, and the page offset."""
        raw_token = params.get("resumptionToken")
        if raw_token is not None:
            try:
                token = ResumptionToken.decode(raw_token)
            except TokenError as exc:
                raise OaiProtocolError("badResumptionToken", str(exc)) from exc
            if token.snapshot_id != self.snapshot.fingerprint:
                raise OaiProtocolError(
                    "badResumptionToken", "token belongs to an earlier store snapshot"
                )
            if token.verb != verb:
                raise OaiProtocolError("badResumptionToken", f"token was issued for {token.verb}")
            set_spec, date_from, date_until = token.set_spec, token.date_from, token.date_until
            offset = token.offset
        else:
            self._check_prefix(params)
            set_spec = params.get("set")
            date_from = self._check_datestamp_arg(params, "from")
            date_until = self._check_datestamp_arg(params, "until")
            if date_from and date_until and _normalize_bound(date_from, False) > _normalize_bound(date_until, True):
                raise OaiProtocolError("badArgument", "from is later than until")
            offset = 0

        records = [
            r
            for r in self.snapshot.records
            if (set_spec is None or r.library_slug == set_spec)
            and (date_from is None or self._datestamp(r) >= _normalize_bound(date_from, False))
            and (date_until is None or self._datestamp(r) <= _normalize_bound(date_until, True))
        ]
        if not records:
            raise OaiProtocolError("noRecordsMatch", "the selection is empty")
        next_token = None
        if offset + self.page_size < len(records):
            next_token = ResumptionToken(
                verb=verb,
                offset=offset + self.page_size,
                snapshot_id=self.snapshot.fingerprint,
                set_spec=set_spec,
                date_from=date_from,
                date_until=date_until,
            )
        return records, next_token, offset

    def _token_element(
        self, next_token: ResumptionToken | None, offset: int, total: int
    ) -> ET.Element | None:
        """Continuation element; the final page of a token walk carries an
        empty one to signal completion."""
        if next_token is None and offset == 0:
            return None
        element = ET.Element(f"{{{OAI_NS}}}resumptionToken")
        element.set("completeListSize", str(total))
        element.set("cursor", str(offset))
        if next_token is not None:
            element.text = next_token.encode()
        return element

    # -- verbs

    def _verb_Identify(self, params: dict[str, str]) -> ET.Element:
        body = ET.Element(f"{{{OAI_NS}}}Identify")
        earliest = min(
            (self._datestamp(r) for r in self.snapshot.records), default=EARLIEST_FALLBACK
        )
        fields = (
            ("repositoryName", self.repository_name),
            ("baseURL", self.base_url),
            ("protocolVersion", "2.0"),
            ("adminEmail", self.admin_email),
            ("earliestDatestamp", earliest),
            ("deletedRecord", "no"),
            ("granularity", "YYYY-MM-DDThh:mm:ssZ"),
        )
        for name, value in fields:
            child = ET.SubElement(body, f"{{{OAI_NS}}}{name}")
            child.text = value
        return body

    def _verb_ListMetadataFormats(self, params: dict[str, str]) -> ET.Element:
        identifier = params.get("identifier")
        if identifier is not None:
            self._record_for_identifier(identifier)
        body = ET.Element(f"{{{OAI_NS}}}ListMetadataFormats")
        fmt = ET.SubElement(body, f"{{{OAI_NS}}}metadataFormat")
        for name, value in (
            ("metadataPrefix", METADATA_PREFIX),
            ("schema", OAI_DC_SCHEMA_URL),
            ("metadataNamespace", OAI_DC_NS),
        ):
            child = ET.SubElement(fmt, f"{{{OAI_NS}}}{name}")
            child.text = value
        return body

    def _verb_ListSets(self, params: dict[str, str]) -> ET.Element:
        if "resumptionToken" in params:
            raise OaiProtocolError("badResumptionToken", "set lists are never paginated here")
        body = ET.Element(f"{{{OAI_NS}}}ListSets")
        for library in self.snapshot.libraries:
            set_el = ET.SubElement(body, f"{{{OAI_NS}}}set")
            spec = ET.SubElement(set_el, f"{{{OAI_NS}}}setSpec")
            spec.text = library.slug
            name = ET.SubElement(set_el, f"{{{OAI_NS}}}setName")
            name.text = library.artist_name
        return body

    def _verb_GetRecord(self, params: dict[str, str]) -> ET.Element:
        identifier = params.get("identifier")
        if identifier is None:
            raise OaiProtocolError("badArgument", "identifier is required")
        self._check_prefix(params)
        record = self._record_for_identifier(identifier)
        body = ET.Element(f"{{{OAI_NS}}}GetRecord")
        body.append(self._record_element(record))
        return body

    def _verb_ListRecords(self, params: dict[str, str]) -> ET.Element:
        records, next_token, offset = self._selection("ListRecords", params)
        body = ET.Element(f"{{{OAI_NS}}}ListRecords")
        for record in records[offset : offset + self.page_size]:
            body.append(self._record_element(record))
        token_el = self._token_element(next_token, offset, len(records))
        if token_el is not None:
            body.append(token_el)
        return body

    def _verb_ListIdentifiers(self, params: dict[str, str]) -> ET.Element:
        records, next_token, offset = self._selection("ListIdentifiers", params)
        body = ET.Element(f"{{{OAI_NS}}}ListIdentifiers")
        for record in records[offset : offset + self.page_size]:
            body.append(self._header_element(record))
        token_el = self._token_element(next_token, offset, len(records))
        if token_el is not None:
            body.append(token_el)
        return body
