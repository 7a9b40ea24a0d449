/**
 * Search form state and its serialization into the server's advanced
 * query grammar.
 *
 * The grammar the server parses (and that buildQueryString must always
 * satisfy):
 *
 *     or      := and ("OR" and)*
 *     and     := not (("AND")? not)*
 *     not     := "NOT" not | primary
 *     primary := "(" or ")"
 *              | FIELD ":" (word | quoted | "[" YEAR "TO" YEAR "]")
 *              | word | quoted
 *
 * Words end at whitespace and at any of ( ) [ ] : " — values containing
 * those are emitted quoted. Quotes run to the next double quote with no
 * escape, so embedded double quotes are dropped. AND/OR/NOT/TO in
 * uppercase are operators, never values, so a value equal to one of
 * them is quoted too. Range syntax is legal only under date, and a
 * query where some OR branch is all-negated is rejected server-side;
 * validateForm blocks both before a request is ever sent.
 */

export const FIELDS = [
  "any",
  "title",
  "creator",
  "date",
  "publisher",
  "subject",
  "language",
  "library",
  "marktype",
] as const;

export type FieldName = (typeof FIELDS)[number];

export type RowOperator = "is" | "not" | "between";

export type Joiner = "AND" | "OR";

export interface AdvancedRow {
  field: FieldName;
  operator: RowOperator;
  value: string;
  /** Upper bound year; only read when operator is "between". */
  valueTo?: string;
}

export interface SearchFormState {
  mode: "simple" | "advanced";
  keyword: string;
  rows: AdvancedRow[];
  /** joiners[i] sits between rows[i] and rows[i+1]. */
  joiners: Joiner[];
  library: string;
  page: number;
}

export function emptyForm(): SearchFormState {
  return {
    mode: "simple",
    keyword: "",
    rows: [{ field: "any", operator: "is", value: "" }],
    joiners: [],
    library: "",
    page: 1,
  };
}

const OPERATOR_WORDS = new Set(["AND", "OR", "NOT", "TO"]);

// Mirrors the server tokenizer's notion of "has searchable text":
// at least one Unicode letter or digit survives folding.
const SEARCHABLE = /[\p{L}\p{N}]/u;

const YEAR = /^\d+$/;

// Characters that terminate an unquoted word in the server lexer.
const NEEDS_QUOTES = /[\s()[\]:"]/;

export function validateForm(state: SearchFormState): string[] {
  if (state.mode === "simple") {
    return SEARCHABLE.test(state.keyword) ? [] : ["enter a search term"];
  }
  const problems: string[] = [];
  if (state.rows.length === 0) {
    return ["add at least one criterion"];
  }
  if (state.joiners.length !== state.rows.length - 1) {
    return ["form rows and joiners are out of step"];
  }
  state.rows.forEach((row, i) => {
    const label = `row ${i + 1}`;
    if (row.operator === "between") {
      if (row.field !== "date") {
        problems.push(`${label}: a year range only applies to date`);
        return;
      }
      const lo = row.value.trim();
      const hi = (row.valueTo ?? "").trim();
      if (!YEAR.test(lo) || !YEAR.test(hi)) {
        problems.push(`${label}: both range bounds must be years`);
      } else if (Number(lo) > Number(hi)) {
        problems.push(`${label}: year range is inverted`);
      }
      return;
    }
    if (row.field === "date") {
      if (!YEAR.test(row.value.trim())) {
        problems.push(`${label}: date expects a year`);
      }
      return;
    }
    if (!SEARCHABLE.test(row.value)) {
      problems.push(`${label}: value has no searchable text`);
    }
  });
  // Every OR branch needs a non-negated row, or the server rejects the
  // query as pure negation.
  for (const run of andRuns(state)) {
    if (run.every((row) => row.operator === "not")) {
      problems.push("each OR branch needs at least one criterion that is not negated");
      break;
    }
  }
  return problems;
}

/** Rows grouped into maximal AND-joined runs (OR starts a new run). */
function andRuns(state: SearchFormState): AdvancedRow[][] {
  const runs: AdvancedRow[][] = [];
  let current: AdvancedRow[] = [];
  state.rows.forEach((row, i) => {
    current.push(row);
    if (state.joiners[i] === "OR") {
      runs.push(current);
      current = [];
    }
  });
  if (current.length) runs.push(current);
  return runs;
}

function emitValue(raw: string): string {
  const value = raw.replace(/"/g, "").trim();
  if (NEEDS_QUOTES.test(value) || OPERATOR_WORDS.has(value)) {
    return `"${value}"`;
  }
  return value;
}

function emitRow(row: AdvancedRow): string {
  let body: string;
  if (row.operator === "between") {
    body = `date:[${row.value.trim()} TO ${(row.valueTo ?? "").trim()}]`;
  } else if (row.field === "date") {
    body = `date:${row.value.trim()}`;
  } else if (row.field === "any") {
    body = emitValue(row.value);
  } else {
    body = `${row.field}:${emitValue(row.value)}`;
  }
  return row.operator === "not" ? `NOT ${body}` : body;
}

/**
 * Serialize a validated advanced form into grammar-conformant text.
 *
 * Callers must run validateForm first; this function assumes a clean
 * state and emits explicit AND/OR between rows.
 */
export function buildQueryString(state: SearchFormState): string {
  const parts = state.rows.map(emitRow);
  let out = parts[0] ?? "";
  state.joiners.forEach((joiner, i) => {
    out += ` ${joiner} ${parts[i + 1]}`;
  });
  return out;
}
