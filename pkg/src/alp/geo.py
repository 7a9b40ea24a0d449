"""Map backend: group libraries by holding location and export GeoJSON.

Libraries sharing an exact coordinate pair merge into one feature (several
collections can be kept at one site); libraries without coordinates are
reported in a top-level ``unlocated`` member rather than dropped.
"""

from __future__ import annotations

import json

from .catalog import ArtistLibrary

GEOJSON_MEDIA_TYPE = "application/geo+json"


def _library_properties(lib: ArtistLibrary) -> dict:
    return {
        "slug": lib.slug,
        "artist_name": lib.artist_name,
        "provenance": lib.provenance.value,
    }


def export_geojson(libraries: list[ArtistLibrary]) -> dict:
    """FeatureCollection with one Point feature per distinct coordinate pair.

    Coordinates are [longitude, latitude]; features sort by (latitude,
    longitude) and each feature's libraries by slug, so output is
    deterministic for a given registry.
    """
    by_coord: dict[tuple[float, float], list[ArtistLibrary]] = {}
    unlocated: list[ArtistLibrary] = []
    for lib in sorted(libraries, key=lambda l: l.slug):
        if lib.latitude is None or lib.longitude is None:
            unlocated.append(lib)
        else:
            by_coord.setdefault((lib.latitude, lib.longitude), []).append(lib)

    features = []
    for (lat, lon), libs in sorted(by_coord.items()):
        sites = sorted({l.holding_site for l in libs if l.holding_site})
        features.append(
            {
                "type": "Feature",
                "geometry": {"type": "Point", "coordinates": [lon, lat]},
                "properties": {
                    "site_name": " / ".join(sites),
                    "libraries": [_library_properties(l) for l in libs],
                },
            }
        )
    return {
        "type": "FeatureCollection",
        "features": features,
        "unlocated": [_library_properties(l) for l in unlocated],
    }


def geojson_bytes(libraries: list[ArtistLibrary]) -> bytes:
    """Byte-deterministic serialization of export_geojson."""
    doc = export_geojson(libraries)
    return (json.dumps(doc, ensure_ascii=False, sort_keys=True, indent=2) + "\n").encode("utf-8")
