"""Shared corpus builders.

The demo store is assembled from fixtures/ingest/*.csv through the real
ingest code path, so fixture drift breaks tests instead of hiding. It is
session-scoped and must stay immutable: tests that mutate (match, CLI
writes) build their own store or copy this one.
"""

from __future__ import annotations

import shutil
from pathlib import Path

import pytest

from alp.assets import AssetKind, Rights, register_asset
from alp.catalog import ArtistLibrary, Provenance, Store, assign_id
from alp.config import Config
from alp.metadata import build_record, parse_ingest_csv

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

DEMO_LIBRARIES = [
    ArtistLibrary(
        slug="monet",
        artist_name="Claude Monet",
        provenance=Provenance.MATERIAL_FONDS,
        holding_site="Giverny, maison de l'artiste",
        birth_year=1840,
        death_year=1926,
        latitude=49.0754,
        longitude=1.5332,
        description="Working library preserved in place.",
    ),
    ArtistLibrary(
        slug="detaille",
        artist_name="Édouard Detaille",
        provenance=Provenance.SALES_CATALOG,
        holding_site="Paris, hôtel Drouot",
        birth_year=1848,
        death_year=1912,
        latitude=48.8566,
        longitude=2.3522,
    ),
    ArtistLibrary(
        slug="bergman",
        artist_name="Hjalmar Bergman",
        provenance=Provenance.INVENTORY,
        holding_site="Paris, fonds nordique",
        latitude=48.8566,
        longitude=2.3522,
    ),
    ArtistLibrary(
        slug="kandinsky",
        artist_name="Vassily Kandinsky",
        provenance=Provenance.RECONSTITUTED,
        holding_site="Neuilly-sur-Seine",
    ),
]

# one ingest stamp per collection so OAI from/until filtering has edges
DEMO_STAMPS = {
    "monet": "2026-07-01T09:00:00Z",
    "detaille": "2026-07-10T09:00:00Z",
    "bergman": "2026-07-15T09:00:00Z",
    "kandinsky": "2026-07-20T09:00:00Z",
}

PNG_BYTES = b"\x89PNG\r\n\x1a\n" + b"demo-image-payload"


def ingest_csv(store: Store, csv_path: Path, stamps: dict[str, str] | None = None) -> int:
    """Push a fixture CSV through the ingest path; rejected rows are a bug here."""
    rows, errors = parse_ingest_csv(csv_path.read_bytes())
    assert not errors, f"fixture {csv_path.name} has rejected rows: {errors}"
    sequences: dict[str, int] = {}
    batches: dict[str, list] = {}
    for row in rows:
        seq = sequences.get(row.library_slug)
        if seq is None:
            seq = store.max_sequence(row.library_slug)
        created_at = (stamps or {}).get(row.library_slug, "2026-07-01T00:00:00Z")
        record = build_record(row, assign_id(row.library_slug, seq), created_at)
        sequences[row.library_slug] = seq + 1
        batches.setdefault(row.library_slug, []).append(record)
    for slug in sorted(batches):
        store.append_records(slug, batches[slug])
    return sum(len(v) for v in batches.values())


def add_demo_assets(store: Store, scratch: Path) -> dict[str, str]:
    """Register one asset per rights value; returns {label: asset_id}."""
    original = scratch / "mark.png"
    original.write_bytes(PNG_BYTES)
    derivative = scratch / "mark_small.png"
    derivative.write_bytes(PNG_BYTES + b"-derivative")
    ids = {}
    ids["pd_original_only"] = register_asset(
        store, "monet-000001", AssetKind.DEDICATION_PHOTO, Rights.PUBLIC_DOMAIN, original
    ).asset_id
    ids["copyright_with_derivative"] = register_asset(
        store, "monet-000005", AssetKind.OTHER_MARK_PHOTO, Rights.IN_COPYRIGHT, original, derivative
    ).asset_id
    ids["unknown_with_derivative"] = register_asset(
        store, "kandinsky-000001", AssetKind.ANNOTATION_PHOTO, Rights.UNKNOWN, original, derivative
    ).asset_id
    return ids


def build_demo_store(root: Path, scratch: Path) -> Store:
    store = Store(root)
    store.write_libraries(DEMO_LIBRARIES)
    ingest_csv(store, FIXTURES / "ingest" / "demo_books.csv", DEMO_STAMPS)
    add_demo_assets(store, scratch)
    return store


@pytest.fixture(scope="session")
def demo_store_root(tmp_path_factory) -> Path:
    base = tmp_path_factory.mktemp("demo")
    build_demo_store(base / "store", base)
    return base / "store"


@pytest.fixture(scope="session")
def demo_snapshot(demo_store_root):
    return Store(demo_store_root).load_snapshot()


@pytest.fixture(scope="session")
def demo_config(demo_store_root) -> Config:
    return Config(store_root=demo_store_root)


@pytest.fixture(scope="session")
def client(demo_config):
    from fastapi.testclient import TestClient

    from alp.api import create_app

    return TestClient(create_app(demo_config), raise_server_exceptions=False)


@pytest.fixture()
def store_copy(demo_store_root, tmp_path) -> Store:
    """Mutable clone of the demo store for write-path tests."""
    root = tmp_path / "store"
    shutil.copytree(demo_store_root, root)
    return Store(root)


@pytest.fixture()
def match_store(tmp_path) -> Store:
    """The five-record provider-matching corpus, fresh per test."""
    store = Store(tmp_path / "store")
    store.write_libraries(
        [
            ArtistLibrary(
                slug="bracquemond",
                artist_name="Félix Bracquemond",
                provenance=Provenance.SALES_CATALOG,
                holding_site="Paris",
            )
        ]
    )
    ingest_csv(store, FIXTURES / "ingest" / "bracquemond_books.csv")
    return store
