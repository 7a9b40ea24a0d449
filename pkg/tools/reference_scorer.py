#!/usr/bin/env python3
"""Standalone brute-force edition scorer used as the test oracle.

Reimplements the published scoring rules from scratch on purpose: no
imports from the package, so the two implementations can only agree by
both being right. Reads a golden-pairs JSON file and prints per-candidate
component scores, totals, verdicts and the chosen candidate.

Usage: reference_scorer.py fixtures/golden_pairs.json
"""

import json
import re
import sys
import unicodedata

WEIGHTS = {"title": 0.45, "creator": 0.25, "year": 0.20, "publisher": 0.10}


def fold(s):
    decomposed = unicodedata.normalize("NFD", s)
    stripped = "".join(ch for ch in decomposed if not unicodedata.combining(ch))
    return stripped.lower()


def tokens(s):
    if s is None:
        return []
    return re.findall(r"[^\W_]+", fold(s), re.UNICODE)


def token_set(s):
    return set(tokens(s))


def jaccard(a, b):
    union = a | b
    if not union:
        return 0.0
    return len(a & b) / len(union)


def surname(creator):
    return fold(creator.split(",", 1)[0]).strip()


def year_of(date):
    if date is None:
        return None
    m = re.search(r"\d{4}", date)
    return int(m.group(0)) if m else None


def missing(value):
    # absent or foldable to nothing counts as missing
    return value is None or not tokens(value)


def score(record, cand):
    rec_title = token_set(record.get("title"))
    if missing(cand.get("title")):
        title_sim = 0.0
    else:
        title_sim = jaccard(rec_title, token_set(cand["title"]))

    if missing(record.get("creator")) or missing(cand.get("creator")):
        creator_sim = 0.5
    elif surname(record["creator"]) == surname(cand["creator"]):
        creator_sim = 1.0
    else:
        creator_sim = jaccard(token_set(record["creator"]), token_set(cand["creator"]))

    ry, cy = year_of(record.get("date")), year_of(cand.get("date"))
    if ry is not None and cy is not None and ry == cy:
        year_score = 1.0
    elif ry is None or cy is None or abs(ry - cy) <= 2:
        year_score = 0.5
    else:
        year_score = 0.0

    if missing(record.get("publisher")) or missing(cand.get("publisher")):
        publisher_sim = 0.5
    else:
        publisher_sim = jaccard(token_set(record["publisher"]), token_set(cand["publisher"]))

    total = (
        WEIGHTS["title"] * title_sim
        + WEIGHTS["creator"] * creator_sim
        + WEIGHTS["year"] * year_score
        + WEIGHTS["publisher"] * publisher_sim
    )
    return {
        "provider": cand["provider"],
        "provider_record_id": cand["provider_record_id"],
        "title_sim": title_sim,
        "creator_sim": creator_sim,
        "year_score": year_score,
        "publisher_sim": publisher_sim,
        "total": total,
    }


def classify(record, candidates):
    scored = [score(record, c) for c in candidates]
    if not scored:
        return {"verdict": "no_match", "chosen": None, "candidates": []}
    best = sorted(scored, key=lambda s: (-s["total"], s["provider"], s["provider_record_id"]))[0]
    ry = year_of(record.get("date"))
    cand = next(
        c
        for c in candidates
        if c["provider"] == best["provider"] and c["provider_record_id"] == best["provider_record_id"]
    )
    cy = year_of(cand.get("date"))
    exact = (
        best["title_sim"] >= 0.9
        and best["creator_sim"] >= 0.9
        and ry is not None
        and cy is not None
        and ry == cy
        and best["publisher_sim"] >= 0.6
    )
    if exact:
        verdict = "exact_edition"
    elif best["total"] >= 0.55 and best["title_sim"] >= 0.5:
        verdict = "approximate_edition"
    else:
        verdict = "no_match"
    chosen = None
    if verdict != "no_match":
        chosen = {"provider": best["provider"], "provider_record_id": best["provider_record_id"]}
    return {"verdict": verdict, "chosen": chosen, "candidates": scored}


def main():
    if len(sys.argv) != 2:
        sys.exit("usage: reference_scorer.py <golden_pairs.json>")
    with open(sys.argv[1], encoding="utf-8") as fh:
        cases = json.load(fh)
    results = []
    for case in cases:
        out = classify(case["record"], case["candidates"])
        out["name"] = case["name"]
        results.append(out)
    json.dump(results, sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")


if __name__ == "__main__":
    main()
