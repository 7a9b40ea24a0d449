"""Deterministic text normalization shared by search, comparison and matching.

All matching and indexing in this package goes through ``fold`` and
``tokenize`` so that scores and result sets are reproducible by hand:
no stopwords, no stemming, apostrophes and every other non-alphanumeric
character separate tokens (French elisions like "l'" become standalone
tokens).
"""

from __future__ import annotations

import re
import unicodedata

# Runs of Unicode alphanumerics; underscore is a separator, not a word char.
_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)

_YEAR_RE = re.compile(r"\d{4}")


def fold(s: str) -> str:
    """Case- and diacritic-fold ``s``: NFD-decompose, strip combining marks, lowercase.

    Idempotent: ``fold(fold(s)) == fold(s)``. Punctuation and spacing are
    preserved; only marks and case are removed ("Doré" -> "dore").
    """
    decomposed = unicodedata.normalize("NFD", s)
    stripped = "".join(c for c in decomposed if not unicodedata.combining(c))
    return stripped.lower()


def tokenize(s: str) -> list[str]:
    """Split ``fold(s)`` on every non-alphanumeric character, dropping empties.

    "Du dessin et de la couleur" -> ["du", "dessin", "et", "de", "la", "couleur"]
    """
    return _TOKEN_RE.findall(fold(s))


def extract_year(s: str | None) -> int | None:
    """First 4-digit substring of ``s`` as an int, or None.

    This is the single year-extraction rule used by the query date index,
    edition keys and the matcher.
    """
    if not s:
        return None
    m = _YEAR_RE.search(s)
    return int(m.group()) if m else None
