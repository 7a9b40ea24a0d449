import { describe, expect, it } from "vitest";

import {
  buildQueryString,
  emptyForm,
  validateForm,
  type AdvancedRow,
  type Joiner,
  type SearchFormState,
} from "../src/form.js";

function advanced(rows: AdvancedRow[], joiners: Joiner[] = []): SearchFormState {
  if (!joiners.length && rows.length > 1) {
    joiners = Array(rows.length - 1).fill("AND") as Joiner[];
  }
  return { mode: "advanced", keyword: "", rows, joiners, library: "", page: 1 };
}

describe("buildQueryString", () => {
  it("serializes the documented two-row example", () => {
    const state = advanced([
      { field: "creator", operator: "is", value: "La Fontaine" },
      { field: "date", operator: "between", value: "1860", valueTo: "1870" },
    ]);
    expect(validateForm(state)).toEqual([]);
    expect(buildQueryString(state)).toBe('creator:"La Fontaine" AND date:[1860 TO 1870]');
  });

  it("leaves single bare words unquoted", () => {
    const state = advanced([{ field: "title", operator: "is", value: "fables" }]);
    expect(buildQueryString(state)).toBe("title:fables");
  });

  it("quotes values containing lexer specials", () => {
    for (const value of ["géographie (universelle)", "tome[1]", "a:b", 'a"b c']) {
      const state = advanced([{ field: "title", operator: "is", value }]);
      expect(validateForm(state)).toEqual([]);
      const q = buildQueryString(state);
      expect(q.startsWith('title:"')).toBe(true);
      expect(q.endsWith('"')).toBe(true);
    }
  });

  it("drops embedded double quotes, which the grammar cannot express", () => {
    const state = advanced([{ field: "any", operator: "is", value: 'prix "3 francs"' }]);
    expect(buildQueryString(state)).toBe('"prix 3 francs"');
  });

  it("quotes values that collide with operator keywords", () => {
    for (const value of ["AND", "OR", "NOT", "TO"]) {
      const state = advanced([{ field: "any", operator: "is", value }]);
      expect(buildQueryString(state)).toBe(`"${value}"`);
    }
  });

  it("lowercase operator lookalikes pass through bare", () => {
    const state = advanced([{ field: "any", operator: "is", value: "and" }]);
    expect(buildQueryString(state)).toBe("and");
  });

  it("prefixes NOT and emits explicit joiners", () => {
    const state = advanced(
      [
        { field: "creator", operator: "is", value: "hugo" },
        { field: "language", operator: "not", value: "eng" },
        { field: "any", operator: "is", value: "roman" },
      ],
      ["AND", "OR"],
    );
    expect(buildQueryString(state)).toBe("creator:hugo AND NOT language:eng OR roman");
  });

  it("emits a plain year for date equality", () => {
    const state = advanced([{ field: "date", operator: "is", value: " 1868 " }]);
    expect(buildQueryString(state)).toBe("date:1868");
  });
});

describe("validateForm", () => {
  it("blocks the all-empty form", () => {
    const state = emptyForm();
    expect(validateForm(state)).toEqual(["enter a search term"]);
    state.mode = "advanced";
    expect(validateForm(state).length).toBeGreaterThan(0);
  });

  it("accepts a bare keyword in simple mode", () => {
    const state = { ...emptyForm(), keyword: "Doré" };
    expect(validateForm(state)).toEqual([]);
  });

  it("rejects punctuation-only values", () => {
    const state = advanced([{ field: "title", operator: "is", value: "?!;" }]);
    expect(validateForm(state)).toEqual(["row 1: value has no searchable text"]);
  });

  it("rejects a range on a non-date field", () => {
    const state = advanced([
      { field: "title", operator: "between", value: "1860", valueTo: "1870" },
    ]);
    expect(validateForm(state)).toEqual(["row 1: a year range only applies to date"]);
  });

  it("rejects non-year range bounds and inverted ranges", () => {
    const bad = advanced([
      { field: "date", operator: "between", value: "186x", valueTo: "1870" },
    ]);
    expect(validateForm(bad)).toEqual(["row 1: both range bounds must be years"]);
    const inverted = advanced([
      { field: "date", operator: "between", value: "1870", valueTo: "1860" },
    ]);
    expect(validateForm(inverted)).toEqual(["row 1: year range is inverted"]);
  });

  it("rejects a non-year date value", () => {
    const state = advanced([{ field: "date", operator: "is", value: "vers 1868" }]);
    expect(validateForm(state)).toEqual(["row 1: date expects a year"]);
  });

  it("rejects forms where an OR branch is entirely negated", () => {
    const allNegated = advanced([{ field: "title", operator: "not", value: "fables" }]);
    expect(validateForm(allNegated)).toEqual([
      "each OR branch needs at least one criterion that is not negated",
    ]);
    const negatedBranch = advanced(
      [
        { field: "title", operator: "is", value: "fables" },
        { field: "creator", operator: "not", value: "hugo" },
      ],
      ["OR"],
    );
    expect(validateForm(negatedBranch).length).toBe(1);
    const fine = advanced(
      [
        { field: "title", operator: "not", value: "fables" },
        { field: "creator", operator: "is", value: "hugo" },
      ],
      ["AND"],
    );
    expect(validateForm(fine)).toEqual([]);
  });
});
