"""Edition matching: score digitization candidates against a catalog record
and classify the best as an exact edition, an approximate one, or no match.

All scoring is token-set Jaccard over folded text, so every value is
reproducible by hand; the calibration (weights and thresholds) lives in one
structure. A field that is absent, or folds to no tokens, counts as missing.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from enum import Enum

from .catalog import BibRecord, DigitalSurrogate, MatchLevel, Provider
from .comparison import surname
from .textnorm import extract_year, tokenize

MATCH_CSV_HEADER = (
    "record_id",
    "provider",
    "provider_record_id",
    "title_sim",
    "creator_sim",
    "year_score",
    "publisher_sim",
    "total",
    "verdict",
)


class MatcherError(ValueError):
    """Scoring precondition broken (no title) or bad attach request."""


class Verdict(Enum):
    EXACT_EDITION = "exact_edition"
    APPROXIMATE_EDITION = "approximate_edition"
    NO_MATCH = "no_match"


@dataclass(frozen=True)
class ProviderRecord:
    """One candidate digitized edition as a provider describes it."""

    provider: Provider
    provider_record_id: str
    access_url: str
    title: str | None = None
    creator: str | None = None
    date: str | None = None
    publisher: str | None = None

    def __post_init__(self):
        if not self.access_url:
            raise ValueError("access_url must be non-empty")
        if not self.provider_record_id:
            raise ValueError("provider_record_id must be non-empty")


@dataclass(frozen=True)
class Calibration:
    """The matcher's entire tuning surface; defaults are the published ones."""

    weight_title: float = 0.45
    weight_creator: float = 0.25
    weight_year: float = 0.20
    weight_publisher: float = 0.10
    exact_title: float = 0.9
    exact_creator: float = 0.9
    exact_publisher: float = 0.6
    approx_total: float = 0.55
    approx_title: float = 0.5
    year_near_window: int = 2
    neutral: float = 0.5


DEFAULT_CALIBRATION = Calibration()


@dataclass(frozen=True)
class CandidateScore:
    candidate: ProviderRecord
    title_sim: float
    creator_sim: float
    year_score: float
    publisher_sim: float
    total: float


@dataclass(frozen=True)
class MatchReport:
    record_id: str
    verdict: Verdict
    chosen: CandidateScore | None
    scores: tuple[CandidateScore, ...]


def _jaccard(a: set[str], b: set[str]) -> float:
    union = a | b
    if not union:
        return 0.0
    return len(a & b) / len(union)


def _missing(value: str | None) -> bool:
    return value is None or not tokenize(value)


def _record_fields(record: BibRecord) -> dict[str, str | None]:
    return {
        "title": record.first_value("title"),
        "creator": record.first_value("creator"),
        "date": record.first_value("date"),
        "publisher": record.first_value("publisher"),
    }


def score_candidate(
    record: BibRecord, cand: ProviderRecord, cal: Calibration = DEFAULT_CALIBRATION
) -> CandidateScore:
    """Score one candidate; every component and the total stay in [0, 1]."""
    rec = _record_fields(record)
    if _missing(rec["title"]):
        raise MatcherError(f"record {record.record_id} has no title to match on")

    if _missing(cand.title):
        title_sim = 0.0
    else:
        title_sim = _jaccard(set(tokenize(rec["title"])), set(tokenize(cand.title)))

    if _missing(rec["creator"]) or _missing(cand.creator):
        creator_sim = cal.neutral
    elif surname(rec["creator"]) == surname(cand.creator):
        creator_sim = 1.0
    else:
        creator_sim = _jaccard(set(tokenize(rec["creator"])), set(tokenize(cand.creator)))

    record_year = extract_year(rec["date"]) if rec["date"] else None
    cand_year = extract_year(cand.date) if cand.date else None
    if record_year is not None and cand_year is not None and record_year == cand_year:
        year_score = 1.0
    elif record_year is None or cand_year is None or abs(record_year - cand_year) <= cal.year_near_window:
        year_score = cal.neutral
    else:
        year_score = 0.0

    if _missing(rec["publisher"]) or _missing(cand.publisher):
        publisher_sim = cal.neutral
    else:
        publisher_sim = _jaccard(set(tokenize(rec["publisher"])), set(tokenize(cand.publisher)))

    total = (
        cal.weight_title * title_sim
        + cal.weight_creator * creator_sim
        + cal.weight_year * year_score
        + cal.weight_publisher * publisher_sim
    )
    return CandidateScore(
        candidate=cand,
        title_sim=title_sim,
        creator_sim=creator_sim,
        year_score=year_score,
        publisher_sim=publisher_sim,
        total=total,
    )


def classify(
    record: BibRecord,
    candidates: list[ProviderRecord],
    cal: Calibration = DEFAULT_CALIBRATION,
) -> MatchReport:
    """Pick the best candidate and apply the exact/approximate thresholds.

    Best = highest total; ties broken by ascending (provider,
    provider_record_id), so candidate order never matters. year_score 1.0
    occurs exactly when both years are present and equal, which is the
    exact-verdict year requirement.
    """
    scores = tuple(score_candidate(record, c, cal) for c in candidates)
    if not scores:
        return MatchReport(record.record_id, Verdict.NO_MATCH, None, ())
    best = sorted(
        scores,
        key=lambda s: (-s.total, s.candidate.provider.value, s.candidate.provider_record_id),
    )[0]
    if (
        best.title_sim >= cal.exact_title
        and best.creator_sim >= cal.exact_creator
        and best.year_score == 1.0
        and best.publisher_sim >= cal.exact_publisher
    ):
        verdict = Verdict.EXACT_EDITION
    elif best.total >= cal.approx_total and best.title_sim >= cal.approx_title:
        verdict = Verdict.APPROXIMATE_EDITION
    else:
        verdict = Verdict.NO_MATCH
    chosen = best if verdict is not Verdict.NO_MATCH else None
    return MatchReport(record.record_id, verdict, chosen, scores)


def attach_surrogate(record: BibRecord, report: MatchReport) -> BibRecord:
    """Append the chosen candidate as a surrogate link; idempotent.

    A surrogate with the same provider and provider_record_id already on
    the record means this report was applied before: the record returns
    unchanged.
    """
    if report.verdict is Verdict.NO_MATCH or report.chosen is None:
        raise MatcherError("cannot attach a surrogate for a no_match verdict")
    cand = report.chosen.candidate
    for existing in record.surrogates:
        if (
            existing.provider == cand.provider
            and existing.provider_record_id == cand.provider_record_id
        ):
            return record
    surrogate = DigitalSurrogate(
        provider=cand.provider,
        provider_record_id=cand.provider_record_id,
        access_url=cand.access_url,
        match_level=MatchLevel(report.verdict.value),
        total_score=report.chosen.total,
    )
    return record.with_surrogate(surrogate)


def csv_row(report: MatchReport) -> list[str]:
    """One curator-review row; scores are for the best candidate if any."""
    best = report.chosen
    if best is None and report.scores:
        best = sorted(
            report.scores,
            key=lambda s: (-s.total, s.candidate.provider.value, s.candidate.provider_record_id),
        )[0]
    if best is None:
        return [report.record_id, "", "", "", "", "", "", "", report.verdict.value]
    return [
        report.record_id,
        best.candidate.provider.value,
        best.candidate.provider_record_id,
        f"{best.title_sim:.6f}",
        f"{best.creator_sim:.6f}",
        f"{best.year_score:.6f}",
        f"{best.publisher_sim:.6f}",
        f"{best.total:.6f}",
        report.verdict.value,
    ]


def error_row(record_id: str, message: str) -> list[str]:
    """Row for a record whose provider lookups failed; never aborts a batch."""
    return [record_id, "", "", "", "", "", "", "", f"provider_error: {message}"]


def reports_to_csv(rows: list[list[str]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(MATCH_CSV_HEADER)
    writer.writerows(rows)
    return buf.getvalue()
