/**
 * Browser entry: a small hash router over the page renderers.
 *
 * Routes:
 *   #/                      search form + library list
 *   #/search?q=&mode=&library=&page=
 *   #/record/{id}
 *   #/library/{slug}        header + that library's records
 *   #/compare?libs=&level=
 *   #/map
 *
 * All data access goes through ApiClient; API failures land in a
 * dismissable banner and never blank the page.
 */
import { ApiClient, ApiError } from "./api.js";
import {
  FIELDS,
  buildQueryString,
  emptyForm,
  validateForm,
  type AdvancedRow,
  type FieldName,
  type Joiner,
  type RowOperator,
  type SearchFormState,
} from "./form.js";
import { esc, frag } from "./html.js";
import { mapSvg, markers, popupHtml, unlocatedHtml } from "./map.js";
import {
  authorsHtml,
  bannerHtml,
  compareHtml,
  compareView,
  librariesHtml,
  recordHtml,
  searchResultsHtml,
} from "./views.js";

const api = new ApiClient("");
const view = () => document.querySelector("#view") as HTMLElement;
const banner = () => document.querySelector("#banner") as HTMLElement;

let form: SearchFormState = emptyForm();

function showError(err: unknown): void {
  if (err instanceof ApiError) {
    banner().innerHTML = bannerHtml(err.code, err.message);
  } else {
    banner().innerHTML = bannerHtml("Error", String(err));
  }
}

function clearBanner(): void {
  banner().innerHTML = "";
}

// --- search form ------------------------------------------------------------

function rowHtml(row: AdvancedRow, i: number): string {
  const fieldOptions = FIELDS.map(
    (f) => `<option value="${f}"${f === row.field ? " selected" : ""}>${f}</option>`,
  ).join("");
  const ops: RowOperator[] = row.field === "date" ? ["is", "between", "not"] : ["is", "not"];
  const opOptions = ops
    .map((o) => `<option value="${o}"${o === row.operator ? " selected" : ""}>${o}</option>`)
    .join("");
  return frag(
    `<div class="form-row" data-row="${i}">`,
    i > 0
      ? `<select data-joiner="${i - 1}">` +
          (["AND", "OR"] as Joiner[])
            .map((j) => `<option${j === form.joiners[i - 1] ? " selected" : ""}>${j}</option>`)
            .join("") +
          `</select>`
      : `<span class="joiner-spacer"></span>`,
    `<select data-field="${i}">${fieldOptions}</select>`,
    `<select data-op="${i}">${opOptions}</select>`,
    `<input data-value="${i}" value="${esc(row.value)}" placeholder="value">`,
    row.operator === "between"
      ? `<input data-value-to="${i}" value="${esc(row.valueTo ?? "")}" placeholder="to year" size="6">`
      : "",
    `<button type="button" data-remove="${i}" title="remove">×</button>`,
    `</div>`,
  );
}

function formHtml(): string {
  const advanced = form.mode === "advanced";
  return frag(
    `<form id="search-form" class="search-form">`,
    `<label><input type="radio" name="mode" value="simple"${advanced ? "" : " checked"}> keyword</label> `,
    `<label><input type="radio" name="mode" value="advanced"${advanced ? " checked" : ""}> advanced</label>`,
    advanced
      ? frag(
          `<div class="rows">`,
          form.rows.map(rowHtml).join(""),
          `</div>`,
          `<button type="button" id="add-row">add criterion</button>`,
          `<details class="raw"><summary>raw query</summary>`,
          `<code id="raw-query">${esc(previewQuery())}</code></details>`,
        )
      : `<input id="keyword" value="${esc(form.keyword)}" placeholder="e.g. Doré">`,
    ` <button type="submit">search</button>`,
    `<div id="form-problems" class="muted"></div>`,
    `</form>`,
  );
}

function previewQuery(): string {
  return validateForm(form).length ? "" : buildQueryString(form);
}

function readForm(root: HTMLElement): void {
  const mode = root.querySelector<HTMLInputElement>("input[name=mode]:checked");
  form.mode = mode?.value === "advanced" ? "advanced" : "simple";
  const keyword = root.querySelector<HTMLInputElement>("#keyword");
  if (keyword) form.keyword = keyword.value;
  root.querySelectorAll<HTMLSelectElement>("[data-field]").forEach((el) => {
    const row = form.rows[Number(el.dataset.field)];
    if (row) row.field = el.value as FieldName;
  });
  root.querySelectorAll<HTMLSelectElement>("[data-op]").forEach((el) => {
    const row = form.rows[Number(el.dataset.op)];
    if (row) row.operator = el.value as RowOperator;
  });
  root.querySelectorAll<HTMLInputElement>("[data-value]").forEach((el) => {
    const row = form.rows[Number(el.dataset.value)];
    if (row) row.value = el.value;
  });
  root.querySelectorAll<HTMLInputElement>("[data-value-to]").forEach((el) => {
    const row = form.rows[Number(el.dataset.valueTo)];
    if (row) row.valueTo = el.value;
  });
  root.querySelectorAll<HTMLSelectElement>("[data-joiner]").forEach((el) => {
    form.joiners[Number(el.dataset.joiner)] = el.value as Joiner;
  });
}

function wireForm(root: HTMLElement, container: HTMLElement): void {
  root.addEventListener("change", (event) => {
    readForm(root);
    const target = event.target as HTMLElement;
    // mode flips and operator changes alter the form's shape
    if (target.matches("input[name=mode]") || target.matches("[data-op], [data-field]")) {
      renderHome(container);
      return;
    }
    const raw = root.querySelector("#raw-query");
    if (raw) raw.textContent = previewQuery();
  });
  root.addEventListener("click", (event) => {
    const target = event.target as HTMLElement;
    if (target.id === "add-row") {
      readForm(root);
      form.rows.push({ field: "any", operator: "is", value: "" });
      form.joiners.push("AND");
      renderHome(container);
    } else if (target.dataset.remove !== undefined) {
      readForm(root);
      const i = Number(target.dataset.remove);
      form.rows.splice(i, 1);
      form.joiners.splice(Math.max(0, i - 1), 1);
      if (!form.rows.length) form.rows.push({ field: "any", operator: "is", value: "" });
      renderHome(container);
    }
  });
  root.addEventListener("submit", (event) => {
    event.preventDefault();
    readForm(root);
    const problems = validateForm(form);
    const box = root.querySelector("#form-problems");
    if (problems.length) {
      if (box) box.textContent = problems.join("; ");
      return;
    }
    const params = new URLSearchParams();
    if (form.mode === "simple") {
      params.set("q", form.keyword);
      params.set("mode", "simple");
    } else {
      params.set("q", buildQueryString(form));
      params.set("mode", "advanced");
    }
    location.hash = `#/search?${params.toString()}`;
  });
}

// --- pages -------------------------------------------------------------------

async function renderHome(container: HTMLElement): Promise<void> {
  container.innerHTML = formHtml() + `<div id="library-list"></div>`;
  const formEl = container.querySelector<HTMLElement>("#search-form");
  if (formEl) wireForm(formEl, container);
  const list = container.querySelector<HTMLElement>("#library-list");
  if (list) {
    const libraries = await api.libraries();
    list.innerHTML = librariesHtml(libraries);
  }
}

async function renderSearch(container: HTMLElement, qs: URLSearchParams): Promise<void> {
  const q = qs.get("q") ?? "";
  const mode = qs.get("mode") === "advanced" ? "advanced" : "simple";
  const library = qs.get("library") ?? "";
  const page = Number(qs.get("page") ?? "1") || 1;
  const withParams = (set: (p: URLSearchParams) => void): string => {
    const next = new URLSearchParams(qs);
    set(next);
    return `#/search?${next.toString()}`;
  };
  const result = await api.search({
    q,
    mode,
    library: library || undefined,
    page,
  });
  container.innerHTML = searchResultsHtml(result, {
    libraryFacet: (slug) =>
      withParams((p) => {
        if (slug && slug !== library) p.set("library", slug);
        else p.delete("library");
        p.delete("page");
      }),
    page: (n) => withParams((p) => p.set("page", String(n))),
  });
}

async function renderRecord(container: HTMLElement, recordId: string): Promise<void> {
  const record = await api.record(recordId);
  container.innerHTML = recordHtml(record, api);
}

async function renderLibrary(container: HTMLElement, slug: string): Promise<void> {
  const lib = await api.library(slug);
  // browsing a collection is a facet query over its slug
  const records = await api.search({ q: `library:${slug}`, mode: "advanced", perPage: 100 });
  container.innerHTML = frag(
    `<h2>${esc(lib.artist_name)}</h2>`,
    `<p class="muted">${esc(lib.holding_site)}; ${esc(lib.provenance)}; `,
    `${lib.record_count} records</p>`,
    lib.description ? `<p>${esc(lib.description)}</p>` : "",
    `<ul class="results">`,
    records.results
      .map(
        (r) =>
          `<li><a href="#/record/${esc(r.record_id)}">${esc(r.title ?? r.record_id)}</a></li>`,
      )
      .join(""),
    `</ul>`,
  );
}

async function renderCompare(container: HTMLElement, qs: URLSearchParams): Promise<void> {
  const libraries = await api.libraries();
  const chosen = (qs.get("libs") ?? "").split(",").filter(Boolean);
  const level = qs.get("level") === "edition" ? "edition" : "work";
  const pickers = libraries
    .map(
      (lib) =>
        `<label><input type="checkbox" name="libs" value="${esc(lib.slug)}"` +
        `${chosen.includes(lib.slug) ? " checked" : ""}> ${esc(lib.artist_name)}</label>`,
    )
    .join(" ");
  container.innerHTML = frag(
    `<form id="compare-form">`,
    `<fieldset><legend>Libraries (pick two or more)</legend>${pickers}</fieldset>`,
    `<label><input type="radio" name="level" value="work"${level === "work" ? " checked" : ""}> works</label> `,
    `<label><input type="radio" name="level" value="edition"${level === "edition" ? " checked" : ""}> editions</label> `,
    `<button type="submit">compare</button>`,
    `</form><div id="compare-result"></div>`,
  );
  container.querySelector("#compare-form")?.addEventListener("submit", (event) => {
    event.preventDefault();
    const picked = Array.from(
      container.querySelectorAll<HTMLInputElement>("input[name=libs]:checked"),
    ).map((el) => el.value);
    const lvl =
      container.querySelector<HTMLInputElement>("input[name=level]:checked")?.value ?? "work";
    location.hash = `#/compare?libs=${picked.join(",")}&level=${lvl}`;
  });
  if (chosen.length >= 2) {
    const target = container.querySelector<HTMLElement>("#compare-result");
    if (!target) return;
    const report = await api.compare(chosen, level);
    const authors = await api.authors(chosen);
    target.innerHTML = compareHtml(compareView(report)) + authorsHtml(authors);
  }
}

async function renderMap(container: HTMLElement): Promise<void> {
  const doc = await api.mapDoc();
  container.innerHTML = frag(
    `<h2>Holding sites</h2>`,
    mapSvg(doc),
    `<div id="popup"></div>`,
    unlocatedHtml(doc),
  );
  const placed = markers(doc);
  container.querySelectorAll<SVGCircleElement>("circle.marker").forEach((dot) => {
    dot.addEventListener("click", () => {
      const marker = placed[Number(dot.dataset.feature)];
      const popup = container.querySelector<HTMLElement>("#popup");
      if (marker && popup) popup.innerHTML = popupHtml(marker.feature);
    });
  });
}

// --- router --------------------------------------------------------------------

async function route(): Promise<void> {
  clearBanner();
  const container = view();
  const hash = location.hash || "#/";
  const [path, query = ""] = hash.slice(1).split("?", 2);
  const qs = new URLSearchParams(query);
  const segments = (path ?? "/").split("/").filter(Boolean);
  try {
    if (!segments.length) await renderHome(container);
    else if (segments[0] === "search") await renderSearch(container, qs);
    else if (segments[0] === "record" && segments[1]) {
      await renderRecord(container, decodeURIComponent(segments[1]));
    } else if (segments[0] === "library" && segments[1]) {
      await renderLibrary(container, decodeURIComponent(segments[1]));
    } else if (segments[0] === "compare") await renderCompare(container, qs);
    else if (segments[0] === "map") await renderMap(container);
    else container.innerHTML = `<p class="muted">page not found</p>`;
  } catch (err) {
    showError(err);
  }
}

window.addEventListener("hashchange", () => void route());
void route();
