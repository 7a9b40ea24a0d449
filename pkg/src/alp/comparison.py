"""Cross-library analytics: shared works and editions, author frequency,
pairwise overlap.

Work identity is a folded-title-token set plus the first creator's surname;
edition identity adds the extracted year and publisher tokens. This is the
strongest identity derivable from short catalog records without authority
ids; generic titles ("Œuvres") can falsely merge and that is accepted.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from itertools import combinations

from .catalog import BibRecord, Snapshot
from .textnorm import extract_year, fold, tokenize


class Level(Enum):
    WORK = "work"
    EDITION = "edition"


class ComparisonError(ValueError):
    """Bad comparison request (too few libraries, duplicate slugs)."""


@dataclass(frozen=True)
class WorkKey:
    """Work-level identity: same text, any edition."""

    title_tokens: tuple[str, ...]  # sorted, deduplicated, folded
    creator_surname: str  # "" when the record has no creator

    def canonical(self) -> str:
        return f"{self.creator_surname}|{' '.join(self.title_tokens)}"


@dataclass(frozen=True)
class EditionKey:
    """Edition-level identity: the work plus year and publisher."""

    work: WorkKey
    year: int | None
    publisher_tokens: tuple[str, ...]

    def canonical(self) -> str:
        year = "" if self.year is None else str(self.year)
        return f"{self.work.canonical()}|{year}|{' '.join(self.publisher_tokens)}"


def surname(creator: str) -> str:
    """Folded text before the first comma ("La Fontaine, Jean de" -> "la fontaine")."""
    return fold(creator.split(",", 1)[0]).strip()


def work_key(record: BibRecord) -> WorkKey:
    first_creator = record.first_value("creator")
    return WorkKey(
        title_tokens=tuple(sorted(set(tokenize(record.first_value("title") or "")))),
        creator_surname=surname(first_creator) if first_creator else "",
    )


def edition_key(record: BibRecord) -> EditionKey:
    date = record.first_value("date")
    publisher = record.first_value("publisher") or ""
    return EditionKey(
        work=work_key(record),
        year=extract_year(date) if date else None,
        publisher_tokens=tuple(sorted(set(tokenize(publisher)))),
    )


def key_for(record: BibRecord, level: Level):
    return work_key(record) if level is Level.WORK else edition_key(record)


@dataclass(frozen=True)
class KeyGroup:
    """One shared key: who holds it and through which records."""

    key: str  # canonical serialization
    libraries: tuple[str, ...]
    record_ids: tuple[str, ...]


@dataclass(frozen=True)
class PairOverlap:
    left: str
    right: str
    intersection: int
    union: int
    jaccard: float


@dataclass(frozen=True)
class ComparisonReport:
    level: Level
    libraries: tuple[str, ...]
    key_counts: dict[str, int]  # distinct keys per library
    shared: tuple[KeyGroup, ...]  # keys held by >= 2 libraries
    pairs: tuple[PairOverlap, ...]


def _check_slugs(snapshot: Snapshot, slugs: list[str], minimum: int) -> list[str]:
    if len(slugs) < minimum:
        raise ComparisonError(f"need at least {minimum} libraries, got {len(slugs)}")
    if len(set(slugs)) != len(slugs):
        dupes = sorted({s for s in slugs if slugs.count(s) > 1})
        raise ComparisonError(f"duplicate library slug(s): {', '.join(dupes)}")
    for slug in slugs:
        snapshot.library(slug)  # raises UnknownLibraryError
    return slugs


def jaccard(a: set, b: set) -> float:
    """|A∩B| / |A∪B|, defined as 0.0 when both sets are empty."""
    union = a | b
    if not union:
        return 0.0
    return len(a & b) / len(union)


def compare(snapshot: Snapshot, slugs: list[str], level: Level) -> ComparisonReport:
    """Group records sharing a key across libraries and overlap every pair.

    Shared groups are keys present in at least two of the chosen libraries,
    in lexicographic order of the canonical key serialization.
    """
    _check_slugs(snapshot, slugs, minimum=2)
    key_sets: dict[str, set] = {}
    holders: dict[object, dict[str, list[str]]] = {}  # key -> slug -> record_ids
    for slug in slugs:
        keys: set = set()
        for record in snapshot.records_for(slug):
            key = key_for(record, level)
            keys.add(key)
            holders.setdefault(key, {}).setdefault(slug, []).append(record.record_id)
        key_sets[slug] = keys

    shared = [
        KeyGroup(
            key=key.canonical(),
            libraries=tuple(sorted(by_slug)),
            record_ids=tuple(sorted(rid for rids in by_slug.values() for rid in rids)),
        )
        for key, by_slug in holders.items()
        if len(by_slug) >= 2
    ]
    shared.sort(key=lambda g: g.key)

    pairs = [
        PairOverlap(
            left=a,
            right=b,
            intersection=len(key_sets[a] & key_sets[b]),
            union=len(key_sets[a] | key_sets[b]),
            jaccard=jaccard(key_sets[a], key_sets[b]),
        )
        for a, b in combinations(sorted(slugs), 2)
    ]

    return ComparisonReport(
        level=level,
        libraries=tuple(slugs),
        key_counts={slug: len(keys) for slug, keys in key_sets.items()},
        shared=tuple(shared),
        pairs=tuple(pairs),
    )


@dataclass(frozen=True)
class AuthorRow:
    creator_surname: str
    counts: dict[str, int]  # per library slug
    total: int


def author_frequency(snapshot: Snapshot, slugs: list[str]) -> list[AuthorRow]:
    """Record counts per creator surname across the chosen libraries.

    A record counts once per distinct surname among its creator elements
    (never once per element); records without creators are not counted.
    Rows sort by descending total, ties by ascending surname.
    """
    _check_slugs(snapshot, slugs, minimum=1)
    counts: dict[str, dict[str, int]] = {}
    for slug in slugs:
        for record in snapshot.records_for(slug):
            surnames = {surname(c) for c in record.values("creator")}
            for name in sorted(surnames - {""}):
                per_lib = counts.setdefault(name, {})
                per_lib[slug] = per_lib.get(slug, 0) + 1
    rows = [
        AuthorRow(creator_surname=name, counts=per_lib, total=sum(per_lib.values()))
        for name, per_lib in counts.items()
    ]
    rows.sort(key=lambda r: (-r.total, r.creator_surname))
    return rows
