"""Two-level search: keyword mode plus a fielded boolean/range query language.

Advanced grammar (the public contract, also used by the UI query builder):

    or      := and ("OR" and)*
    and     := not (("AND")? not)*          juxtaposition means AND
    not     := "NOT" not | primary
    primary := "(" or ")"
             | FIELD ":" (word | quoted | "[" YEAR "TO" YEAR "]")
             | word | quoted

Field names are case-insensitive; the operator keywords AND/OR/NOT/TO are
uppercase-only (lowercase forms are ordinary search terms). Quoted phrases
match as contiguous ordered token sequences after folding. Ranges are only
legal under ``date``. A query whose every top-level branch is negated is
rejected (pure negation).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field as dc_field
from typing import Union

from .catalog import BibRecord, MarkKind
from .textnorm import extract_year, fold, tokenize

FIELDS = frozenset(
    {"title", "creator", "date", "publisher", "subject", "language", "library", "marktype", "any"}
)
# Fields whose postings come from tokenized DC element values.
ELEMENT_FIELDS = frozenset({"title", "creator", "date", "publisher", "subject", "language"})
# Facet fields matched by exact (folded) value, not tokenization.
FACET_FIELDS = frozenset({"library", "marktype"})

SIMPLE = "simple"
ADVANCED = "advanced"


class QueryError(ValueError):
    """Query rejected; ``offset`` is the byte offset into the input, if known."""

    def __init__(self, message: str, offset: int | None = None):
        super().__init__(message)
        self.offset = offset


@dataclass(frozen=True)
class Term:
    field: str
    token: str


@dataclass(frozen=True)
class Phrase:
    field: str
    tokens: tuple[str, ...]


@dataclass(frozen=True)
class DateRange:
    lo: int
    hi: int


@dataclass(frozen=True)
class Not:
    child: "Node"


@dataclass(frozen=True)
class And:
    children: tuple["Node", ...]


@dataclass(frozen=True)
class Or:
    children: tuple["Node", ...]


Node = Union[Term, Phrase, DateRange, Not, And, Or]


# --- lexer --------------------------------------------------------------------

_SPECIALS = {"(": "LPAREN", ")": "RPAREN", "[": "LBRACKET", "]": "RBRACKET", ":": "COLON"}


@dataclass(frozen=True)
class _Tok:
    kind: str  # LPAREN RPAREN LBRACKET RBRACKET COLON QUOTED WORD EOF
    text: str
    pos: int  # character offset


def _byte_offset(text: str, pos: int) -> int:
    return len(text[:pos].encode("utf-8"))


def _lex(text: str) -> list[_Tok]:
    toks: list[_Tok] = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if c in _SPECIALS:
            toks.append(_Tok(_SPECIALS[c], c, i))
            i += 1
            continue
        if c == '"':
            end = text.find('"', i + 1)
            if end == -1:
                raise QueryError("unterminated quote", offset=_byte_offset(text, i))
            toks.append(_Tok("QUOTED", text[i + 1 : end], i))
            i = end + 1
            continue
        j = i
        while j < n and not text[j].isspace() and text[j] not in _SPECIALS and text[j] != '"':
            j += 1
        toks.append(_Tok("WORD", text[i:j], i))
        i = j
    toks.append(_Tok("EOF", "", n))
    return toks


# --- parser -------------------------------------------------------------------


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _lex(text)
        self.i = 0

    def peek(self, ahead: int = 0) -> _Tok:
        return self.toks[min(self.i + ahead, len(self.toks) - 1)]

    def next(self) -> _Tok:
        tok = self.toks[self.i]
        if tok.kind != "EOF":
            self.i += 1
        return tok

    def fail(self, message: str, tok: _Tok) -> "QueryError":
        return QueryError(message, offset=_byte_offset(self.text, tok.pos))

    def parse(self) -> Node:
        node = self.parse_or()
        tok = self.peek()
        if tok.kind != "EOF":
            raise self.fail(f"unexpected {tok.text!r}", tok)
        return node

    def parse_or(self) -> Node:
        children = [self.parse_and()]
        while self.peek().kind == "WORD" and self.peek().text == "OR":
            self.next()
            children.append(self.parse_and())
        return children[0] if len(children) == 1 else Or(tuple(children))

    def _starts_primary(self, tok: _Tok) -> bool:
        if tok.kind in ("LPAREN", "QUOTED"):
            return True
        return tok.kind == "WORD" and tok.text != "OR"

    def parse_and(self) -> Node:
        children = [self.parse_not()]
        while True:
            tok = self.peek()
            if tok.kind == "WORD" and tok.text == "AND":
                self.next()
                children.append(self.parse_not())
            elif self._starts_primary(tok):
                children.append(self.parse_not())
            else:
                break
        return children[0] if len(children) == 1 else And(tuple(children))

    def parse_not(self) -> Node:
        tok = self.peek()
        if tok.kind == "WORD" and tok.text == "NOT":
            self.next()
            inner = self.parse_not()
            # NOT NOT x is x; keeps Not nodes single-layer for execution.
            return inner.child if isinstance(inner, Not) else Not(inner)
        return self.parse_primary()

    def parse_primary(self) -> Node:
        tok = self.next()
        if tok.kind == "LPAREN":
            node = self.parse_or()
            closing = self.next()
            if closing.kind != "RPAREN":
                raise self.fail("expected ')'", closing)
            return node
        if tok.kind == "QUOTED":
            return self._leaf("any", tok.text, quoted=True, tok=tok)
        if tok.kind == "WORD":
            if tok.text in ("AND", "OR", "NOT", "TO"):
                raise self.fail(f"operator {tok.text} needs an operand", tok)
            if self.peek().kind == "COLON":
                field_name = tok.text.lower()
                if field_name not in FIELDS:
                    raise self.fail(f"unknown field {tok.text!r}", tok)
                self.next()  # colon
                return self._fielded_value(field_name)
            return self._leaf("any", tok.text, quoted=False, tok=tok)
        raise self.fail(f"unexpected {tok.text or tok.kind!r}", tok)

    def _fielded_value(self, field_name: str) -> Node:
        tok = self.next()
        if tok.kind == "LBRACKET":
            if field_name != "date":
                raise self.fail(f"range syntax is only legal under date, not {field_name}", tok)
            lo = self._year(self.next())
            to_tok = self.next()
            if not (to_tok.kind == "WORD" and to_tok.text == "TO"):
                raise self.fail("expected TO in range", to_tok)
            hi = self._year(self.next())
            closing = self.next()
            if closing.kind != "RBRACKET":
                raise self.fail("expected ']'", closing)
            if lo > hi:
                raise self.fail(f"inverted range [{lo} TO {hi}]", tok)
            return DateRange(lo, hi)
        if tok.kind in ("WORD", "QUOTED"):
            if field_name == "date":
                return DateRange(self._year(tok), self._year(tok))
            return self._leaf(field_name, tok.text, quoted=tok.kind == "QUOTED", tok=tok)
        raise self.fail(f"expected a value after {field_name}:", tok)

    def _year(self, tok: _Tok) -> int:
        text = tok.text.strip() if tok.kind in ("WORD", "QUOTED") else ""
        if not text.isdigit():
            raise self.fail(f"date expects an integer year, got {tok.text!r}", tok)
        return int(text)

    def _leaf(self, field_name: str, raw: str, quoted: bool, tok: _Tok) -> Node:
        if field_name in FACET_FIELDS:
            value = fold(raw).strip()
            if not value:
                raise self.fail(f"{field_name}: needs a value", tok)
            if field_name == "marktype":
                try:
                    value = MarkKind.parse(value).value
                except ValueError:
                    pass  # unknown kinds simply match nothing
            return Term(field_name, value)
        tokens = tokenize(raw)
        if not tokens:
            raise self.fail(f"{raw!r} has no searchable tokens", tok)
        if len(tokens) == 1 and not (quoted and " " in raw.strip()):
            return Term(field_name, tokens[0])
        return Phrase(field_name, tuple(tokens))


def _check_positivity(node: Node) -> None:
    """Reject queries where some top-level branch has no positive leaf."""
    if isinstance(node, Not):
        raise QueryError("pure negation query: NOT needs a positive sibling")
    if isinstance(node, Or):
        for child in node.children:
            _check_positivity(child)
    elif isinstance(node, And):
        if all(isinstance(c, Not) for c in node.children):
            raise QueryError("pure negation query: NOT needs a positive sibling")
        for child in node.children:
            if not isinstance(child, Not):
                _check_positivity(child)


def parse_query(text: str, mode: str = SIMPLE) -> Node:
    """Parse either search level into an AST.

    Simple mode folds and tokenizes the input and ANDs every token over
    field ``any``; advanced mode applies the grammar above.
    """
    if not text or not text.strip():
        raise QueryError("empty query")
    if mode == SIMPLE:
        tokens = tokenize(text)
        if not tokens:
            raise QueryError("query has no searchable tokens")
        return And(tuple(Term("any", t) for t in tokens))
    if mode != ADVANCED:
        raise QueryError(f"unknown mode {mode!r} (expected simple or advanced)")
    node = _Parser(text).parse()
    _check_positivity(node)
    return node


def to_query_string(node: Node) -> str:
    """Canonical advanced-grammar text for an AST; re-parses structurally equal."""
    if isinstance(node, Term):
        return node.token if node.field == "any" else f"{node.field}:{node.token}"
    if isinstance(node, Phrase):
        quoted = '"' + " ".join(node.tokens) + '"'
        return quoted if node.field == "any" else f"{node.field}:{quoted}"
    if isinstance(node, DateRange):
        return f"date:[{node.lo} TO {node.hi}]"
    if isinstance(node, Not):
        return f"NOT {to_query_string(node.child)}"
    if isinstance(node, And):
        return "(" + " AND ".join(to_query_string(c) for c in node.children) + ")"
    if isinstance(node, Or):
        return "(" + " OR ".join(to_query_string(c) for c in node.children) + ")"
    raise TypeError(f"not a query node: {node!r}")


# --- index --------------------------------------------------------------------


@dataclass
class SearchIndex:
    """Inverted index over a store snapshot; immutable once built.

    ``postings`` maps a folded token to the (record_id, field) pairs holding
    it; ``sequences`` keeps per-field token sequences for phrase containment;
    ``years`` is the date index; facet sets live in ``libraries``/``marktypes``.
    """

    postings: dict[str, set[tuple[str, str]]] = dc_field(default_factory=dict)
    sequences: dict[str, dict[str, list[tuple[str, ...]]]] = dc_field(default_factory=dict)
    years: dict[str, int] = dc_field(default_factory=dict)
    libraries: dict[str, set[str]] = dc_field(default_factory=dict)
    marktypes: dict[str, set[str]] = dc_field(default_factory=dict)
    all_ids: tuple[str, ...] = ()

    def ids_for_term(self, field_name: str, token: str) -> set[str]:
        if field_name == "library":
            return set(self.libraries.get(token, ()))
        if field_name == "marktype":
            return set(self.marktypes.get(token, ()))
        pairs = self.postings.get(token, ())
        return {rid for rid, f in pairs if f == field_name}


def _index_tokens(index: SearchIndex, rid: str, field_name: str, text: str) -> None:
    tokens = tokenize(text)
    if not tokens:
        return
    for t in tokens:
        index.postings.setdefault(t, set()).add((rid, field_name))
    index.sequences.setdefault(rid, {}).setdefault(field_name, []).append(tuple(tokens))


def build_index(records: list[BibRecord]) -> SearchIndex:
    """Index every stored record: all DC values under ``any`` plus their own
    field when queryable, shelf marks and mark transcriptions under ``any``,
    mark kinds and library slugs as facets, first parseable year per record.
    """
    index = SearchIndex()
    for record in sorted(records, key=lambda r: r.record_id):
        rid = record.record_id
        index.libraries.setdefault(record.library_slug, set()).add(rid)
        for el in record.elements:
            _index_tokens(index, rid, "any", el.value)
            if el.element in ELEMENT_FIELDS:
                _index_tokens(index, rid, el.element, el.value)
            if el.element == "date" and rid not in index.years:
                year = extract_year(el.value)
                if year is not None:
                    index.years[rid] = year
        if record.shelf_mark:
            _index_tokens(index, rid, "any", record.shelf_mark)
        for mark in record.marks:
            index.marktypes.setdefault(mark.kind.value, set()).add(rid)
            if mark.transcription:
                _index_tokens(index, rid, "any", mark.transcription)
    index.all_ids = tuple(sorted({r.record_id for r in records}))
    return index


# --- execution ----------------------------------------------------------------


def _contains_seq(haystack: tuple[str, ...], needle: tuple[str, ...]) -> bool:
    if len(needle) > len(haystack):
        return False
    return any(haystack[i : i + len(needle)] == needle for i in range(len(haystack) - len(needle) + 1))


def _eval(index: SearchIndex, node: Node) -> set[str]:
    if isinstance(node, Term):
        return index.ids_for_term(node.field, node.token)
    if isinstance(node, Phrase):
        candidates: set[str] | None = None
        for t in node.tokens:
            ids = index.ids_for_term(node.field, t)
            candidates = ids if candidates is None else candidates & ids
            if not candidates:
                return set()
        assert candidates is not None
        return {
            rid
            for rid in candidates
            if any(
                _contains_seq(seq, node.tokens)
                for seq in index.sequences.get(rid, {}).get(node.field, ())
            )
        }
    if isinstance(node, DateRange):
        return {rid for rid, year in index.years.items() if node.lo <= year <= node.hi}
    if isinstance(node, And):
        positives = [c for c in node.children if not isinstance(c, Not)]
        negatives = [c.child for c in node.children if isinstance(c, Not)]
        if not positives:
            raise QueryError("pure negation query: NOT needs a positive sibling")
        result: set[str] | None = None
        for child in positives:
            ids = _eval(index, child)
            result = ids if result is None else result & ids
            if not result:
                return set()
        assert result is not None
        for child in negatives:
            result = result - _eval(index, child)
        return result
    if isinstance(node, Or):
        result: set[str] = set()
        for child in node.children:
            result |= _eval(index, child)
        return result
    if isinstance(node, Not):
        raise QueryError("pure negation query: NOT needs a positive sibling")
    raise TypeError(f"not a query node: {node!r}")


def _positive_token_fields(node: Node, out: dict[str, set[str]]) -> None:
    """Collect token -> fields from non-negated leaves, for ranking."""
    if isinstance(node, Term):
        out.setdefault(node.token, set()).add(node.field)
    elif isinstance(node, Phrase):
        for t in node.tokens:
            out.setdefault(t, set()).add(node.field)
    elif isinstance(node, (And, Or)):
        for child in node.children:
            if not isinstance(child, Not):
                _positive_token_fields(child, out)


def execute(index: SearchIndex, ast: Node) -> list[str]:
    """Set-semantics evaluation with deterministic ranking.

    Records are ordered by descending count of distinct query tokens they
    match (tokens from non-negated leaves, matched in those leaves' fields),
    ties broken by ascending record_id.
    """
    matched = _eval(index, ast)
    token_fields: dict[str, set[str]] = {}
    _positive_token_fields(ast, token_fields)

    # resolve each token's id set once; scoring is then O(tokens) per record
    token_ids: list[set[str]] = []
    for token, fields in token_fields.items():
        ids: set[str] = set()
        for field_name in fields:
            ids |= index.ids_for_term(field_name, token)
        token_ids.append(ids)

    def score(rid: str) -> int:
        return sum(1 for ids in token_ids if rid in ids)

    return sorted(matched, key=lambda rid: (-score(rid), rid))
