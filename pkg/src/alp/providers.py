"""Clients for digitization providers: an SRU/XML shape and a REST/JSON shape.

Both run against a Transport. LiveTransport does real HTTP (opt-in via
configuration, rate limited); ReplayTransport serves canned responses keyed
by the sha256 of the request URL, so the parsers exercise real payload
shapes while tests stay offline. A `<hash>.error` file simulates a network
failure for that request.
"""

from __future__ import annotations

import hashlib
import json
import threading
import time
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from pathlib import Path
from urllib.parse import urlencode, urlsplit

import requests

from .catalog import Provider
from .matcher import ProviderRecord
from .metadata import DC_NS

SRW_NS = "http://www.loc.gov/zing/srw/"

MAX_RESULTS_CAP = 50

MODE_LIVE = "live"
MODE_REPLAY = "replay"


class ProviderError(Exception):
    """Base class for provider client failures."""


class NetworkError(ProviderError):
    """Connection-level failure; raised after the retry budget is spent."""

    def __init__(self, message: str, attempts: int = 1):
        super().__init__(message)
        self.attempts = attempts


class HttpStatusError(ProviderError):
    def __init__(self, message: str, status: int):
        super().__init__(message)
        self.status = status


class MalformedResponseError(ProviderError):
    """Response arrived but does not parse as the provider's format."""


class FixtureMissingError(ProviderError):
    """Replay mode has no canned response for this request URL."""


@dataclass(frozen=True)
class ProviderQuery:
    title: str | None = None
    creator: str | None = None
    year: str | None = None
    max_results: int = 20

    def __post_init__(self):
        if not (self.title and self.title.strip()) and not (self.creator and self.creator.strip()):
            raise ValueError("provider query needs a title or a creator")
        if not 1 <= self.max_results <= MAX_RESULTS_CAP:
            raise ValueError(f"max_results must be in [1, {MAX_RESULTS_CAP}], got {self.max_results}")


def request_hash(url: str) -> str:
    return hashlib.sha256(url.encode("utf-8")).hexdigest()


class RateLimiter:
    """Serializes calls to at most ``per_second`` per instance; thread-safe."""

    def __init__(self, per_second: float):
        self.interval = 1.0 / per_second if per_second > 0 else 0.0
        self._lock = threading.Lock()
        self._next_at = 0.0

    def wait(self) -> None:
        if not self.interval:
            return
        with self._lock:
            now = time.monotonic()
            delay = self._next_at - now
            self._next_at = max(now, self._next_at) + self.interval
        if delay > 0:
            time.sleep(delay)


class LiveTransport:
    """Real HTTP GET; single-attempt errors, retried by the client wrapper."""

    def __init__(self, rate_limit_per_s: float = 2.0, timeout_s: float = 15.0):
        self.limiter = RateLimiter(rate_limit_per_s)
        self.timeout_s = timeout_s

    def fetch(self, url: str) -> bytes:
        self.limiter.wait()
        try:
            response = requests.get(url, timeout=self.timeout_s)
        except requests.RequestException as exc:
            raise NetworkError(f"request failed: {exc}") from exc
        if response.status_code != 200:
            raise HttpStatusError(
                f"provider answered HTTP {response.status_code}", status=response.status_code
            )
        return response.content


class ReplayTransport:
    """Serves fixtures/providers/<name>/<sha256(url)>.resp; no network ever."""

    def __init__(self, fixture_dir: str | Path):
        self.fixture_dir = Path(fixture_dir)

    def fetch(self, url: str) -> bytes:
        digest = request_hash(url)
        error_path = self.fixture_dir / f"{digest}.error"
        if error_path.exists():
            reason = error_path.read_text(encoding="utf-8").strip() or "simulated network failure"
            raise NetworkError(reason)
        resp_path = self.fixture_dir / f"{digest}.resp"
        if not resp_path.exists():
            raise FixtureMissingError(f"no canned response for {url} (expected {resp_path})")
        return resp_path.read_bytes()


def fetch_with_retry(
    transport,
    url: str,
    retries: int = 3,
    backoff_base_s: float = 0.5,
    sleep=time.sleep,
) -> bytes:
    """Retry NetworkError with exponential backoff; other errors pass through."""
    last: NetworkError | None = None
    for attempt in range(retries):
        try:
            return transport.fetch(url)
        except NetworkError as exc:
            last = exc
            if attempt + 1 < retries:
                sleep(backoff_base_s * (2**attempt))
    assert last is not None
    raise NetworkError(f"{last} (after {retries} attempts)", attempts=retries) from last


# --- SRU (searchRetrieve 1.2, CQL) --------------------------------------------


def build_cql(q: ProviderQuery) -> str:
    parts = []
    if q.title and q.title.strip():
        parts.append(f'dc.title all "{q.title.strip()}"')
    if q.creator and q.creator.strip():
        parts.append(f'dc.creator all "{q.creator.strip()}"')
    if q.year and q.year.strip():
        parts.append(f'dc.date any "{q.year.strip()}"')
    return " and ".join(parts)


def sru_request_url(endpoint: str, q: ProviderQuery) -> str:
    params = [
        ("operation", "searchRetrieve"),
        ("version", "1.2"),
        ("query", build_cql(q)),
        ("maximumRecords", str(q.max_results)),
    ]
    return f"{endpoint}?{urlencode(params)}"


def _sru_text(element: ET.Element, tag: str) -> str | None:
    child = element.find(f"{{{DC_NS}}}{tag}")
    return child.text if child is not None and child.text and child.text.strip() else None


def parse_sru_response(data: bytes) -> list[ProviderRecord]:
    try:
        root = ET.fromstring(data)
    except ET.ParseError as exc:
        raise MalformedResponseError(f"SRU response is not well-formed XML: {exc}") from exc
    if root.tag != f"{{{SRW_NS}}}searchRetrieveResponse":
        raise MalformedResponseError(f"unexpected SRU root element {root.tag}")
    records: list[ProviderRecord] = []
    for i, record_el in enumerate(root.iter(f"{{{SRW_NS}}}record")):
        data_el = record_el.find(f"{{{SRW_NS}}}recordData")
        payload = data_el[0] if data_el is not None and len(data_el) else None
        if payload is None:
            raise MalformedResponseError(f"SRU record {i} has no recordData payload")
        identifiers = [
            el.text.strip()
            for el in payload.findall(f"{{{DC_NS}}}identifier")
            if el.text and el.text.strip()
        ]
        access_url = next((u for u in identifiers if u.startswith(("http://", "https://"))), None)
        id_el = record_el.find(f"{{{SRW_NS}}}recordIdentifier")
        provider_record_id = (
            id_el.text.strip() if id_el is not None and id_el.text and id_el.text.strip() else None
        ) or (identifiers[0] if identifiers else None)
        if not access_url or not provider_record_id:
            raise MalformedResponseError(f"SRU record {i} lacks an identifier or access URL")
        records.append(
            ProviderRecord(
                provider=Provider.GALLICA_LIKE,
                provider_record_id=provider_record_id,
                access_url=access_url,
                title=_sru_text(payload, "title"),
                creator=_sru_text(payload, "creator"),
                date=_sru_text(payload, "date"),
                publisher=_sru_text(payload, "publisher"),
            )
        )
    return records


def search_sru(
    endpoint: str,
    q: ProviderQuery,
    transport=None,
    retries: int = 3,
    backoff_base_s: float = 0.5,
    sleep=time.sleep,
) -> list[ProviderRecord]:
    """searchRetrieve against an SRU endpoint; result order is provider order."""
    transport = transport if transport is not None else LiveTransport()
    data = fetch_with_retry(transport, sru_request_url(endpoint, q), retries, backoff_base_s, sleep)
    return parse_sru_response(data)[: q.max_results]


# --- REST (JSON search) --------------------------------------------------------


def rest_request_url(endpoint: str, q: ProviderQuery) -> str:
    params = []
    if q.title and q.title.strip():
        params.append(("title", q.title.strip()))
    if q.creator and q.creator.strip():
        params.append(("author", q.creator.strip()))
    if q.year and q.year.strip():
        params.append(("first_publish_year", q.year.strip()))
    params.append(("limit", str(q.max_results)))
    return f"{endpoint}?{urlencode(params)}"


def _first(value) -> str | None:
    if isinstance(value, list):
        value = value[0] if value else None
    if value is None:
        return None
    text = str(value).strip()
    return text or None


def parse_rest_response(data: bytes, endpoint: str) -> list[ProviderRecord]:
    try:
        doc = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise MalformedResponseError(f"REST response is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or not isinstance(doc.get("docs"), list):
        raise MalformedResponseError("REST response lacks a docs array")
    base = urlsplit(endpoint)
    records: list[ProviderRecord] = []
    for i, item in enumerate(doc["docs"]):
        if not isinstance(item, dict) or not _first(item.get("key")):
            raise MalformedResponseError(f"REST doc {i} lacks a key")
        key = _first(item.get("key"))
        access_url = f"{base.scheme}://{base.netloc}{key}" if key.startswith("/") else key
        if not access_url.startswith(("http://", "https://")):
            access_url = f"{base.scheme}://{base.netloc}/{key}"
        records.append(
            ProviderRecord(
                provider=Provider.OPEN_LIBRARY_LIKE,
                provider_record_id=key.rstrip("/").rsplit("/", 1)[-1],
                access_url=access_url,
                title=_first(item.get("title")),
                creator=_first(item.get("author_name")),
                date=_first(item.get("first_publish_year")),
                publisher=_first(item.get("publisher")),
            )
        )
    return records


def search_rest(
    endpoint: str,
    q: ProviderQuery,
    transport=None,
    retries: int = 3,
    backoff_base_s: float = 0.5,
    sleep=time.sleep,
) -> list[ProviderRecord]:
    """JSON search against a REST endpoint; same bounds contract as search_sru."""
    transport = transport if transport is not None else LiveTransport()
    data = fetch_with_retry(transport, rest_request_url(endpoint, q), retries, backoff_base_s, sleep)
    return parse_rest_response(data, endpoint)[: q.max_results]
