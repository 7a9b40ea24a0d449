"""Reading-mark photographs: registration and rights-aware serving decisions.

Policy: public-domain assets serve any variant; anything else (in copyright
or unknown, treated alike) never serves the original, only a bounded
derivative, which must therefore exist before a non-public asset can be
registered. Derivative production itself happens before registration and
is out of scope here.
"""

from __future__ import annotations

import json
import re
import shutil
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

from .catalog import Store, StoreError

ASSET_ID_RE = re.compile(r"^(?P<record_id>[a-z0-9_]+-[0-9]{6})-a(?P<seq>[0-9]+)$")

DENIED_RIGHTS = "rights"
DENIED_NO_DERIVATIVE = "no derivative"


class AssetError(ValueError):
    """Registration rejected (missing file, missing derivative, unknown record)."""


class AssetKind(Enum):
    DEDICATION_PHOTO = "dedication_photo"
    ANNOTATION_PHOTO = "annotation_photo"
    OTHER_MARK_PHOTO = "other_mark_photo"

    @classmethod
    def parse(cls, raw: str) -> "AssetKind":
        text = raw.strip()
        for kind in cls:
            if text == kind.value or text.lower().replace("_", "") == kind.value.replace("_", ""):
                return kind
        raise ValueError(f"unknown asset kind: {raw!r}")


class Rights(Enum):
    PUBLIC_DOMAIN = "public_domain"
    IN_COPYRIGHT = "in_copyright"
    UNKNOWN = "unknown"

    @classmethod
    def parse(cls, raw: str) -> "Rights":
        text = raw.strip()
        for rights in cls:
            if text == rights.value or text.lower().replace("_", "") == rights.value.replace("_", ""):
                return rights
        raise ValueError(f"unknown rights value: {raw!r}")


class Variant(Enum):
    ORIGINAL = "original"
    DERIVATIVE = "derivative"


@dataclass(frozen=True)
class AssetRecord:
    """One photograph; paths are store-root-relative POSIX strings."""

    asset_id: str
    record_id: str
    kind: AssetKind
    rights: Rights
    original_path: str
    derivative_path: str | None = None


@dataclass(frozen=True)
class Allowed:
    path: str


@dataclass(frozen=True)
class Denied:
    reason: str


def resolve_variant(asset: AssetRecord, requested: Variant) -> Allowed | Denied:
    """Pure access decision over (rights, requested variant, variants present)."""
    if requested is Variant.ORIGINAL:
        if asset.rights is Rights.PUBLIC_DOMAIN:
            return Allowed(asset.original_path)
        return Denied(DENIED_RIGHTS)
    if asset.derivative_path is not None:
        return Allowed(asset.derivative_path)
    if asset.rights is Rights.PUBLIC_DOMAIN:
        # no bounded copy was produced; the unrestricted original stands in
        return Allowed(asset.original_path)
    return Denied(DENIED_NO_DERIVATIVE)


def asset_to_json(asset: AssetRecord) -> dict:
    variants: dict = {"original": asset.original_path}
    if asset.derivative_path is not None:
        variants["derivative"] = asset.derivative_path
    return {
        "asset_id": asset.asset_id,
        "record_id": asset.record_id,
        "kind": asset.kind.value,
        "rights": asset.rights.value,
        "variants": variants,
    }


def asset_from_json(d: dict) -> AssetRecord:
    return AssetRecord(
        asset_id=d["asset_id"],
        record_id=d["record_id"],
        kind=AssetKind(d["kind"]),
        rights=Rights(d["rights"]),
        original_path=d["variants"]["original"],
        derivative_path=d["variants"].get("derivative"),
    )


def read_assets(store: Store, slug: str) -> list[AssetRecord]:
    path = store.assets_registry_path(slug)
    if not path.exists():
        return []
    assets = []
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                assets.append(asset_from_json(json.loads(line)))
            except (json.JSONDecodeError, KeyError, ValueError) as exc:
                rel = path.relative_to(store.root)
                raise StoreError(f"{rel}:{lineno}: bad asset line: {exc}") from exc
    return assets


def load_all_assets(store: Store) -> dict[str, AssetRecord]:
    """Every registered asset across all collections, keyed by asset_id."""
    assets: dict[str, AssetRecord] = {}
    for lib in store.read_libraries():
        for asset in read_assets(store, lib.slug):
            if asset.asset_id in assets:
                raise StoreError(f"duplicate asset_id {asset.asset_id!r}")
            assets[asset.asset_id] = asset
    return assets


def _append_asset(store: Store, slug: str, asset: AssetRecord) -> None:
    store.collection_dir(slug).mkdir(parents=True, exist_ok=True)
    with store.assets_registry_path(slug).open("a", encoding="utf-8") as fh:
        fh.write(json.dumps(asset_to_json(asset), ensure_ascii=False) + "\n")


def next_asset_id(existing: list[AssetRecord], record_id: str) -> str:
    top = 0
    for asset in existing:
        m = ASSET_ID_RE.match(asset.asset_id)
        if m and m.group("record_id") == record_id:
            top = max(top, int(m.group("seq")))
    return f"{record_id}-a{top + 1}"


def register_asset(
    store: Store,
    record_id: str,
    kind: AssetKind,
    rights: Rights,
    original_path: str | Path,
    derivative_path: str | Path | None = None,
) -> AssetRecord:
    """Copy the files into the store and append a registry line.

    Caller must hold the writer lock. The "non-public requires derivative"
    invariant is enforced here, before anything is copied.
    """
    slug = record_id.rsplit("-", 1)[0]
    if not any(r.record_id == record_id for r in store.read_records(slug)):
        raise AssetError(f"unknown record_id {record_id!r}")
    original_path = Path(original_path)
    if not original_path.is_file():
        raise AssetError(f"original file not found: {original_path}")
    if rights is not Rights.PUBLIC_DOMAIN and derivative_path is None:
        raise AssetError(f"{rights.value} asset needs a derivative before it can be registered")
    if derivative_path is not None:
        derivative_path = Path(derivative_path)
        if not derivative_path.is_file():
            raise AssetError(f"derivative file not found: {derivative_path}")

    existing = read_assets(store, slug)
    asset_id = next_asset_id(existing, record_id)
    assets_dir = store.assets_dir(slug)
    assets_dir.mkdir(parents=True, exist_ok=True)

    original_dest = assets_dir / f"{asset_id}-original{original_path.suffix}"
    shutil.copyfile(original_path, original_dest)
    derivative_rel = None
    if derivative_path is not None:
        derivative_dest = assets_dir / f"{asset_id}-derivative{derivative_path.suffix}"
        shutil.copyfile(derivative_path, derivative_dest)
        derivative_rel = derivative_dest.relative_to(store.root).as_posix()

    asset = AssetRecord(
        asset_id=asset_id,
        record_id=record_id,
        kind=kind,
        rights=rights,
        original_path=original_dest.relative_to(store.root).as_posix(),
        derivative_path=derivative_rel,
    )
    _append_asset(store, slug, asset)
    return asset
