"""Regenerate the canned provider responses under fixtures/providers/.

The replay transport keys fixtures by sha256 of the full request URL, so
the files must be derived from the exact queries the match command sends
for fixtures/ingest/bracquemond_books.csv. Run from the repository root:

    python tools/make_provider_fixtures.py

The canned corpus is built so a match run over the bracquemond library
classifies its five records as 2 exact, 2 approximate and 1 no-match:
an identical hit on each provider, a truncated-title hit, a later
reissue, and two records no provider knows.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path
from xml.etree import ElementTree as ET

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from alp.config import DEFAULT_PROVIDERS  # noqa: E402
from alp.metadata import DC_NS, parse_ingest_csv  # noqa: E402
from alp.providers import (  # noqa: E402
    ProviderQuery,
    SRW_NS,
    request_hash,
    rest_request_url,
    sru_request_url,
)

MAX_RESULTS = 10  # the match command's default

# per record title: list of SRU candidates (None = no fixture, empty = zero hits)
SRU_HITS: dict[str, list[dict]] = {
    "Du dessin et de la couleur": [
        {
            "id": "ark:/12148/bpt6k1001",
            "title": "Du dessin et de la couleur",
            "creator": "Bracquemond, Félix",
            "date": "1885",
            "publisher": "Charpentier",
        }
    ],
    "L'ingénieur Hidalgo Don Quichotte de la Manche": [
        {
            "id": "ark:/12148/bpt6k1002",
            "title": "Don Quichotte de la Manche",
            "creator": "Cervantes Saavedra, Miguel de",
            "date": "1869",
            "publisher": "Hachette",
        }
    ],
    "Œuvres complètes de Gustave Flaubert": [],
    "Histoire d'un dessinateur": [
        {
            "id": "ark:/12148/bpt6k1004",
            "title": "Histoire d'un dessinateur",
            "creator": "Viollet-le-Duc, Eugène",
            "date": "1890",
            "publisher": "Didot",
        }
    ],
    "Notes et croquis inédits": [],
}

REST_HITS: dict[str, list[dict]] = {
    "Du dessin et de la couleur": [],
    "L'ingénieur Hidalgo Don Quichotte de la Manche": [],
    "Œuvres complètes de Gustave Flaubert": [
        {
            "key": "/books/OL100003M",
            "title": "Œuvres complètes de Gustave Flaubert",
            "author_name": ["Flaubert, Gustave"],
            "first_publish_year": 1885,
            "publisher": ["Quantin"],
        }
    ],
    "Histoire d'un dessinateur": [],
    "Notes et croquis inédits": [],
}


def sru_response(hits: list[dict]) -> bytes:
    root = ET.Element(f"{{{SRW_NS}}}searchRetrieveResponse")
    ET.SubElement(root, f"{{{SRW_NS}}}version").text = "1.2"
    ET.SubElement(root, f"{{{SRW_NS}}}numberOfRecords").text = str(len(hits))
    records = ET.SubElement(root, f"{{{SRW_NS}}}records")
    for hit in hits:
        record = ET.SubElement(records, f"{{{SRW_NS}}}record")
        ET.SubElement(record, f"{{{SRW_NS}}}recordSchema").text = "info:srw/schema/1/dc-v1.1"
        ET.SubElement(record, f"{{{SRW_NS}}}recordPacking").text = "xml"
        data = ET.SubElement(record, f"{{{SRW_NS}}}recordData")
        dc = ET.SubElement(data, "{http://www.openarchives.org/OAI/2.0/oai_dc/}dc")
        for element in ("title", "creator", "date", "publisher"):
            if hit.get(element):
                ET.SubElement(dc, f"{{{DC_NS}}}{element}").text = hit[element]
        url = f"https://gallica.example.org/{hit['id']}"
        ET.SubElement(dc, f"{{{DC_NS}}}identifier").text = url
        ET.SubElement(record, f"{{{SRW_NS}}}recordIdentifier").text = hit["id"]
    return ET.tostring(root, encoding="utf-8", xml_declaration=True)


def rest_response(hits: list[dict]) -> bytes:
    body = {"numFound": len(hits), "docs": hits}
    return json.dumps(body, ensure_ascii=False, indent=2).encode("utf-8")


def first_year(value: str | None) -> str | None:
    import re

    if not value:
        return None
    found = re.search(r"\b\d{4}\b", value)
    return found.group(0) if found else None


def main() -> None:
    csv_path = ROOT / "fixtures" / "ingest" / "bracquemond_books.csv"
    rows, errors = parse_ingest_csv(csv_path.read_bytes())
    if errors:
        raise SystemExit(f"{csv_path} has rejected rows: {errors}")

    gallica = DEFAULT_PROVIDERS["gallica_like"]
    openlib = DEFAULT_PROVIDERS["open_library_like"]
    out_gallica = ROOT / "fixtures" / "providers" / "gallica_like"
    out_openlib = ROOT / "fixtures" / "providers" / "open_library_like"
    out_gallica.mkdir(parents=True, exist_ok=True)
    out_openlib.mkdir(parents=True, exist_ok=True)

    written = 0
    for row in rows:
        query = ProviderQuery(
            title=row.title,
            creator=row.creator,
            year=first_year(row.date),
            max_results=MAX_RESULTS,
        )
        sru_url = sru_request_url(gallica.endpoint, query)
        rest_url = rest_request_url(openlib.endpoint, query)
        (out_gallica / f"{request_hash(sru_url)}.resp").write_bytes(
            sru_response(SRU_HITS[row.title])
        )
        (out_openlib / f"{request_hash(rest_url)}.resp").write_bytes(
            rest_response(REST_HITS[row.title])
        )
        written += 2
        print(f"{row.title}")
        print(f"  sru  {request_hash(sru_url)[:12]}… <- {sru_url}")
        print(f"  rest {request_hash(rest_url)[:12]}… <- {rest_url}")
    print(f"wrote {written} fixture files")


if __name__ == "__main__":
    main()
