"""Edition scoring and classification, checked against the standalone oracle."""

import json
import random
import subprocess
import sys
from pathlib import Path

import pytest
from hypothesis import given
from hypothesis import strategies as st

from alp.catalog import BibRecord, DcElement, MatchLevel, Provider
from alp.matcher import (
    MATCH_CSV_HEADER,
    Calibration,
    MatcherError,
    ProviderRecord,
    Verdict,
    attach_surrogate,
    classify,
    csv_row,
    error_row,
    reports_to_csv,
    score_candidate,
)

REPO = Path(__file__).resolve().parents[1]
GOLDEN = REPO / "fixtures" / "golden_pairs.json"
SCORER = REPO / "tools" / "reference_scorer.py"

TOLERANCE = 1e-9


def record_from_case(fields, rid="case-000001"):
    elements = [DcElement("title", fields["title"])]
    for name in ("creator", "date", "publisher"):
        if fields.get(name):
            elements.append(DcElement(name, fields[name]))
    return BibRecord(record_id=rid, library_slug="case", elements=tuple(elements))


def candidate_from_case(fields):
    return ProviderRecord(
        provider=Provider(fields["provider"]),
        provider_record_id=fields["provider_record_id"],
        access_url=fields["access_url"],
        title=fields.get("title"),
        creator=fields.get("creator"),
        date=fields.get("date"),
        publisher=fields.get("publisher"),
    )


@pytest.fixture(scope="module")
def golden_cases():
    return json.loads(GOLDEN.read_text(encoding="utf-8"))


@pytest.fixture(scope="module")
def oracle_results(golden_cases):
    """Run the independent scorer as a subprocess; keyed by case name."""
    proc = subprocess.run(
        [sys.executable, str(SCORER), str(GOLDEN)],
        capture_output=True,
        text=True,
        check=True,
    )
    return {entry["name"]: entry for entry in json.loads(proc.stdout)}


def test_golden_set_has_twenty_cases(golden_cases):
    assert len(golden_cases) == 20
    assert len({c["name"] for c in golden_cases}) == 20


def test_every_golden_case_matches_the_oracle(golden_cases, oracle_results):
    for case in golden_cases:
        record = record_from_case(case["record"])
        candidates = [candidate_from_case(c) for c in case["candidates"]]
        report = classify(record, candidates)
        expected = oracle_results[case["name"]]

        assert report.verdict.value == expected["verdict"], case["name"]
        if expected["chosen"] is None:
            assert report.chosen is None, case["name"]
        else:
            assert report.chosen is not None, case["name"]
            assert report.chosen.candidate.provider.value == expected["chosen"]["provider"]
            assert report.chosen.candidate.provider_record_id == expected["chosen"]["provider_record_id"]

        want = {(e["provider"], e["provider_record_id"]): e for e in expected["candidates"]}
        assert len(report.scores) == len(want)
        for got in report.scores:
            key = (got.candidate.provider.value, got.candidate.provider_record_id)
            exp = want[key]
            for component in ("title_sim", "creator_sim", "year_score", "publisher_sim", "total"):
                assert abs(getattr(got, component) - exp[component]) <= TOLERANCE, (
                    case["name"],
                    key,
                    component,
                )


def test_candidate_order_never_changes_the_outcome(golden_cases):
    rng = random.Random(20260814)
    for case in golden_cases:
        record = record_from_case(case["record"])
        candidates = [candidate_from_case(c) for c in case["candidates"]]
        baseline = classify(record, candidates)
        for _ in range(10):
            shuffled = candidates[:]
            rng.shuffle(shuffled)
            report = classify(record, shuffled)
            assert report.verdict == baseline.verdict
            if baseline.chosen is None:
                assert report.chosen is None
            else:
                assert report.chosen.candidate == baseline.chosen.candidate
                assert report.chosen.total == baseline.chosen.total


# --- spec worked values -----------------------------------------------------------


def cand(**kw):
    kw.setdefault("provider", Provider.GALLICA_LIKE)
    kw.setdefault("provider_record_id", "x1")
    kw.setdefault("access_url", "https://gallica.example.org/x1")
    return ProviderRecord(**kw)


def test_truncated_quixote_title_similarity():
    # token sets {l,ingenieur,hidalgo,don,quichotte,de,la,manche} vs
    # {don,quichotte,de,la,manche}: 5 shared of 8 -> 0.625
    record = record_from_case({"title": "L'ingénieur Hidalgo Don Quichotte de la Manche"})
    score = score_candidate(record, cand(title="Don Quichotte de la Manche"))
    assert score.title_sim == pytest.approx(0.625, abs=TOLERANCE)


def test_identical_candidate_scores_one():
    record = record_from_case(
        {"title": "Fables", "creator": "La Fontaine, Jean de", "date": "1868", "publisher": "Hachette"}
    )
    score = score_candidate(
        record,
        cand(title="Fables", creator="La Fontaine, Jean de", date="1868", publisher="Hachette"),
    )
    assert (score.title_sim, score.creator_sim, score.year_score, score.publisher_sim) == (1.0, 1.0, 1.0, 1.0)
    assert score.total == pytest.approx(1.0, abs=TOLERANCE)


def test_year_off_by_one_scores_half():
    record = record_from_case({"title": "Fables", "date": "1869"})
    score = score_candidate(record, cand(title="Fables", date="1870"))
    assert score.year_score == 0.5


def test_year_beyond_window_scores_zero():
    record = record_from_case({"title": "Fables", "date": "1869"})
    assert score_candidate(record, cand(title="Fables", date="1880")).year_score == 0.0


def test_missing_fields_use_neutral_half():
    record = record_from_case({"title": "Fables"})
    score = score_candidate(record, cand(title="Fables"))
    assert score.creator_sim == 0.5
    assert score.year_score == 0.5
    assert score.publisher_sim == 0.5
    assert score.total == pytest.approx(0.45 + 0.25 * 0.5 + 0.20 * 0.5 + 0.10 * 0.5, abs=TOLERANCE)


def test_missing_candidate_title_scores_zero():
    record = record_from_case({"title": "Fables"})
    assert score_candidate(record, cand(title=None)).title_sim == 0.0
    assert score_candidate(record, cand(title="   !!!")).title_sim == 0.0


def test_surname_match_beats_token_jaccard():
    record = record_from_case({"title": "Fables", "creator": "La Fontaine, Jean de"})
    full = score_candidate(record, cand(title="Fables", creator="La Fontaine"))
    assert full.creator_sim == 1.0
    other = score_candidate(record, cand(title="Fables", creator="Doré, Gustave"))
    assert other.creator_sim < 1.0


def test_record_without_title_is_an_error():
    record = BibRecord(
        record_id="case-000001",
        library_slug="case",
        elements=(DcElement("title", "   "), DcElement("creator", "Anonyme")),
    )
    with pytest.raises(MatcherError, match="no title"):
        score_candidate(record, cand(title="Fables"))


# --- classification boundaries ------------------------------------------------------


def test_empty_candidate_list_is_no_match():
    report = classify(record_from_case({"title": "Fables"}), [])
    assert report.verdict is Verdict.NO_MATCH
    assert report.chosen is None and report.scores == ()


def test_exact_requires_equal_years_not_near_years():
    record = record_from_case(
        {"title": "Fables", "creator": "La Fontaine, Jean de", "date": "1868", "publisher": "Hachette"}
    )
    near = classify(
        record,
        [cand(title="Fables", creator="La Fontaine, Jean de", date="1869", publisher="Hachette")],
    )
    assert near.verdict is Verdict.APPROXIMATE_EDITION
    equal = classify(
        record,
        [cand(title="Fables", creator="La Fontaine, Jean de", date="1868", publisher="Hachette")],
    )
    assert equal.verdict is Verdict.EXACT_EDITION


def test_exact_requires_publisher_threshold():
    record = record_from_case(
        {"title": "Fables", "creator": "La Fontaine, Jean de", "date": "1868", "publisher": "Hachette"}
    )
    report = classify(
        record,
        [cand(title="Fables", creator="La Fontaine, Jean de", date="1868", publisher="Didot")],
    )
    assert report.verdict is Verdict.APPROXIMATE_EDITION


def test_approximate_needs_half_the_title():
    record = record_from_case({"title": "Histoire de la peinture en Italie", "date": "1868"})
    # high total but title overlap below 0.5 stays a no-match
    report = classify(
        record,
        [cand(title="Histoire navale", creator=None, date="1868", publisher=None)],
    )
    assert report.scores[0].title_sim < 0.5
    assert report.verdict is Verdict.NO_MATCH


def test_exact_verdict_also_satisfies_approximate_thresholds():
    cal = Calibration()
    record = record_from_case(
        {"title": "Fables", "creator": "La Fontaine, Jean de", "date": "1868", "publisher": "Hachette"}
    )
    report = classify(
        record,
        [cand(title="Fables", creator="La Fontaine, Jean de", date="1868", publisher="Hachette")],
    )
    assert report.verdict is Verdict.EXACT_EDITION
    assert report.chosen.total >= cal.approx_total
    assert report.chosen.title_sim >= cal.approx_title


def test_tie_break_ascending_provider_then_id():
    record = record_from_case({"title": "Fables"})
    a = cand(title="Fables", provider=Provider.OPEN_LIBRARY_LIKE, provider_record_id="OL1M",
             access_url="https://openlibrary.example.org/OL1M")
    b = cand(title="Fables", provider=Provider.GALLICA_LIKE, provider_record_id="ark-2",
             access_url="https://gallica.example.org/ark-2")
    c = cand(title="Fables", provider=Provider.GALLICA_LIKE, provider_record_id="ark-1",
             access_url="https://gallica.example.org/ark-1")
    report = classify(record, [a, b, c])
    assert report.chosen.candidate is c  # gallica_like < open_library_like, then id


# --- properties ----------------------------------------------------------------------

TEXTS = st.one_of(st.none(), st.text(max_size=40))


@given(title=st.text(min_size=1, max_size=40).filter(lambda s: s.strip("!@# \t")),
       c_title=TEXTS, c_creator=TEXTS, c_date=TEXTS, c_publisher=TEXTS)
def test_score_bounds_on_arbitrary_inputs(title, c_title, c_creator, c_date, c_publisher):
    from alp.textnorm import tokenize

    if not tokenize(title):
        return
    record = record_from_case({"title": title})
    score = score_candidate(
        record, cand(title=c_title, creator=c_creator, date=c_date, publisher=c_publisher)
    )
    for value in (score.title_sim, score.creator_sim, score.year_score, score.publisher_sim, score.total):
        assert 0.0 <= value <= 1.0


def test_title_similarity_symmetric():
    a = record_from_case({"title": "L'ingénieur Hidalgo Don Quichotte de la Manche"})
    b = record_from_case({"title": "Don Quichotte de la Manche"})
    ab = score_candidate(a, cand(title="Don Quichotte de la Manche")).title_sim
    ba = score_candidate(b, cand(title="L'ingénieur Hidalgo Don Quichotte de la Manche")).title_sim
    assert ab == ba


def test_total_monotone_in_each_component():
    record = record_from_case(
        {"title": "Fables choisies", "creator": "La Fontaine, Jean de", "date": "1868", "publisher": "Hachette"}
    )
    worse = score_candidate(record, cand(title="Fables", creator="La Fontaine, Jean de",
                                         date="1868", publisher="Hachette"))
    better = score_candidate(record, cand(title="Fables choisies", creator="La Fontaine, Jean de",
                                          date="1868", publisher="Hachette"))
    assert better.title_sim > worse.title_sim
    assert better.total >= worse.total


# --- surrogates ------------------------------------------------------------------------


def exact_report():
    record = record_from_case(
        {"title": "Fables", "creator": "La Fontaine, Jean de", "date": "1868", "publisher": "Hachette"}
    )
    report = classify(
        record,
        [cand(title="Fables", creator="La Fontaine, Jean de", date="1868", publisher="Hachette")],
    )
    return record, report


def test_attach_then_reattach_is_idempotent():
    record, report = exact_report()
    once = attach_surrogate(record, report)
    twice = attach_surrogate(once, report)
    assert len(once.surrogates) == 1
    assert twice == once
    surrogate = once.surrogates[0]
    assert surrogate.match_level is MatchLevel.EXACT_EDITION
    assert surrogate.provider is Provider.GALLICA_LIKE
    assert surrogate.total_score == pytest.approx(1.0)


def test_attach_approximate_carries_level():
    record = record_from_case({"title": "Fables", "date": "1868"})
    report = classify(record, [cand(title="Fables", date="1869")])
    assert report.verdict is Verdict.APPROXIMATE_EDITION
    updated = attach_surrogate(record, report)
    assert updated.surrogates[0].match_level is MatchLevel.APPROXIMATE_EDITION


def test_attach_no_match_is_an_error():
    record = record_from_case({"title": "Fables"})
    report = classify(record, [])
    with pytest.raises(MatcherError, match="no_match"):
        attach_surrogate(record, report)


# --- curator CSV -------------------------------------------------------------------------


def test_csv_row_shapes():
    record, report = exact_report()
    row = csv_row(report)
    assert row[0] == record.record_id
    assert row[1] == "gallica_like"
    assert row[-1] == "exact_edition"
    assert row[7] == "1.000000"

    empty = classify(record_from_case({"title": "Fables"}), [])
    assert csv_row(empty) == ["case-000001", "", "", "", "", "", "", "", "no_match"]

    assert error_row("case-000009", "boom")[-1] == "provider_error: boom"


def test_reports_to_csv_header():
    record, report = exact_report()
    text = reports_to_csv([csv_row(report)])
    lines = text.splitlines()
    assert lines[0] == ",".join(MATCH_CSV_HEADER)
    assert len(lines) == 2
