/**
 * Page renderers: API payload in, HTML string out.
 *
 * Every figure shown on a page is copied from a response field; nothing
 * is recomputed here. That rule is what the integration tests pin down,
 * so keep arithmetic out of this module (formatting excepted).
 */
import type { ApiClient } from "./api.js";
import type {
  AssetRefDoc,
  AuthorsDoc,
  CompareReport,
  LibraryDoc,
  RecordDoc,
  SearchPage,
  SurrogateDoc,
} from "./types.js";
import { esc, frag } from "./html.js";

const PROVENANCE_LABELS: Record<string, string> = {
  material_fonds: "material fonds",
  reconstituted: "reconstituted",
  inventory: "inventory",
  sales_catalog: "sales catalog",
};

export function provenanceLabel(value: string): string {
  return PROVENANCE_LABELS[value] ?? value;
}

export function bannerHtml(code: string, message: string): string {
  return (
    `<div class="banner banner-error" role="alert">` +
    `<strong>${esc(code)}</strong> ${esc(message)}` +
    `</div>`
  );
}

// --- libraries ------------------------------------------------------------

export function librariesHtml(libraries: LibraryDoc[]): string {
  const items = libraries
    .map(
      (lib) =>
        `<li><a href="#/library/${esc(lib.slug)}">${esc(lib.artist_name)}</a>` +
        ` <span class="muted">${esc(provenanceLabel(lib.provenance))},` +
        ` ${esc(lib.holding_site)}, ${lib.record_count} records</span></li>`,
    )
    .join("");
  return `<h2>Libraries</h2><ul class="library-list">${items}</ul>`;
}

// --- search ---------------------------------------------------------------

export interface SearchLinks {
  /** href for switching the library filter; slug "" clears it. */
  libraryFacet(slug: string): string;
  page(page: number): string;
}

export function searchResultsHtml(page: SearchPage, links: SearchLinks): string {
  const rows = page.results
    .map(
      (r) =>
        `<li><a href="#/record/${esc(r.record_id)}">${esc(r.title ?? r.record_id)}</a>` +
        `<span class="muted"> ${esc(r.creator ?? "")}` +
        `${r.date ? " (" + esc(r.date) + ")" : ""} — ${esc(r.library_slug)}</span></li>`,
    )
    .join("");
  const libraryFacet = Object.entries(page.facets.library)
    .map(
      ([slug, count]) =>
        `<li><a href="${esc(links.libraryFacet(slug))}">${esc(slug)}</a> (${count})</li>`,
    )
    .join("");
  const marktypeFacet = Object.entries(page.facets.marktype)
    .map(([kind, count]) => `<li>${esc(kind)} (${count})</li>`)
    .join("");
  const pager = frag(
    page.page > 1
      ? `<a class="pager-prev" href="${esc(links.page(page.page - 1))}">previous</a> `
      : "",
    `<span>page ${page.page} of ${Math.max(page.pages, 1)}</span>`,
    page.page < page.pages
      ? ` <a class="pager-next" href="${esc(links.page(page.page + 1))}">next</a>`
      : "",
  );
  return frag(
    `<p class="query-echo">query <code>${esc(page.query)}</code> — ${page.total} results</p>`,
    `<div class="search-body"><aside class="facets">`,
    `<h3>Library</h3><ul>${libraryFacet}</ul>`,
    `<h3>Reading marks</h3><ul>${marktypeFacet || "<li class=\"muted\">none</li>"}</ul>`,
    `</aside>`,
    `<ol class="results" start="${(page.page - 1) * page.per_page + 1}">${rows}</ol></div>`,
    `<nav class="pager">${pager}</nav>`,
  );
}

// --- record detail ----------------------------------------------------------

export function surrogateBadge(surrogate: SurrogateDoc): string {
  return surrogate.match_level === "exact_edition" ? "exact edition" : "approximate edition";
}

function surrogatesHtml(surrogates: SurrogateDoc[]): string {
  const items = surrogates
    .map(
      (s) =>
        `<li><a href="${esc(s.access_url)}" rel="external">read online at ${esc(s.provider)}</a>` +
        ` <span class="badge badge-${esc(s.match_level)}">${esc(surrogateBadge(s))}</span></li>`,
    )
    .join("");
  return `<h3>Digital copy</h3><ul class="surrogates">${items}</ul>`;
}

function assetImg(api: ApiClient, asset: AssetRefDoc): string {
  const original = api.assetOriginalUrl(asset);
  return frag(
    `<figure class="asset">`,
    `<img src="${esc(api.assetUrl(asset.asset_id))}" alt="${esc(asset.kind)}">`,
    original ? `<a href="${esc(original)}">view original</a>` : "",
    `</figure>`,
  );
}

function marksHtml(record: RecordDoc, api: ApiClient): string {
  const marks = record.marks ?? [];
  if (!marks.length && !record.assets.length) return "";
  const byId = new Map(record.assets.map((a) => [a.asset_id, a]));
  const used = new Set<string>();
  const items = marks
    .map((mark) => {
      const images = (mark.asset_ids ?? [])
        .map((id) => {
          used.add(id);
          const asset = byId.get(id);
          return asset ? assetImg(api, asset) : "";
        })
        .join("");
      return frag(
        `<li><strong>${esc(mark.kind)}</strong> at ${esc(mark.locus)}`,
        mark.transcription ? `: <q>${esc(mark.transcription)}</q>` : "",
        images,
        `</li>`,
      );
    })
    .join("");
  // photographs registered without a mark pointing at them still show
  const loose = record.assets
    .filter((a) => !used.has(a.asset_id))
    .map((a) => assetImg(api, a))
    .join("");
  return frag(
    `<h3>Reading marks</h3>`,
    items ? `<ul class="marks">${items}</ul>` : "",
    loose ? `<div class="loose-assets">${loose}</div>` : "",
  );
}

export function recordHtml(record: RecordDoc, api: ApiClient): string {
  const title = record.elements.find((e) => e.element === "title")?.value ?? record.record_id;
  const fieldRows = record.elements
    .map(
      (e) =>
        `<tr><th>${esc(e.element)}${e.qualifier ? "." + esc(e.qualifier) : ""}</th>` +
        `<td>${esc(e.value)}${e.lang ? ` <span class="muted">[${esc(e.lang)}]</span>` : ""}</td></tr>`,
    )
    .join("");
  return frag(
    `<h2>${esc(title)}</h2>`,
    `<p class="muted">in <a href="#/library/${esc(record.library_slug)}">${esc(record.library_slug)}</a>`,
    record.shelf_mark ? `, shelf mark ${esc(record.shelf_mark)}` : "",
    `</p>`,
    `<table class="dc-fields"><tbody>${fieldRows}</tbody></table>`,
    record.surrogates?.length ? surrogatesHtml(record.surrogates) : "",
    marksHtml(record, api),
  );
}

// --- comparison ---------------------------------------------------------------

export interface CompareView {
  level: string;
  libraries: string[];
  keyCounts: Array<{ slug: string; count: number }>;
  sharedCount: number;
  shared: Array<{ key: string; libraries: string[]; recordIds: string[] }>;
  pairs: Array<{
    left: string;
    right: string;
    intersection: number;
    union: number;
    jaccard: number;
  }>;
}

/**
 * Flatten the compare payload for rendering. Strictly a reshaping:
 * every number in the view is the payload's own.
 */
export function compareView(report: CompareReport): CompareView {
  return {
    level: report.level,
    libraries: [...report.libraries],
    keyCounts: report.libraries.map((slug) => ({
      slug,
      count: report.key_counts[slug] ?? 0,
    })),
    sharedCount: report.shared.length,
    shared: report.shared.map((g) => ({
      key: g.key,
      libraries: [...g.libraries],
      recordIds: [...g.record_ids],
    })),
    pairs: report.pairs.map((p) => ({ ...p })),
  };
}

export function compareHtml(view: CompareView): string {
  const counts = view.keyCounts
    .map((c) => `<li>${esc(c.slug)}: <strong>${c.count}</strong> distinct ${esc(view.level)} keys</li>`)
    .join("");
  const shared = view.shared
    .map(
      (g) =>
        `<tr><td>${esc(g.key)}</td><td>${g.libraries.map(esc).join(", ")}</td>` +
        `<td>${g.recordIds
          .map((id) => `<a href="#/record/${esc(id)}">${esc(id)}</a>`)
          .join(", ")}</td></tr>`,
    )
    .join("");
  const pairs = view.pairs
    .map(
      (p) =>
        `<tr><td>${esc(p.left)} ~ ${esc(p.right)}</td>` +
        `<td>${p.intersection}</td><td>${p.union}</td>` +
        `<td>${p.jaccard.toFixed(4)}</td></tr>`,
    )
    .join("");
  return frag(
    `<h2>Comparison (${esc(view.level)} level)</h2>`,
    `<ul class="key-counts">${counts}</ul>`,
    `<h3>${view.sharedCount} shared ${esc(view.level)} keys</h3>`,
    `<table class="shared"><thead><tr><th>key</th><th>libraries</th><th>records</th></tr></thead>`,
    `<tbody>${shared || `<tr><td colspan="3" class="muted">no overlap</td></tr>`}</tbody></table>`,
    `<h3>Pairwise overlap</h3>`,
    `<table class="pairs"><thead><tr><th>pair</th><th>intersection</th><th>union</th><th>jaccard</th></tr></thead>`,
    `<tbody>${pairs}</tbody></table>`,
  );
}

// --- authors -------------------------------------------------------------------

export function authorsHtml(doc: AuthorsDoc): string {
  const head = doc.libraries.map((slug) => `<th>${esc(slug)}</th>`).join("");
  const rows = doc.authors
    .map(
      (a) =>
        `<tr><td>${esc(a.creator_surname)}</td><td>${a.total}</td>` +
        doc.libraries.map((slug) => `<td>${a.counts[slug] ?? 0}</td>`).join("") +
        `</tr>`,
    )
    .join("");
  return frag(
    `<h3>Authors in common</h3>`,
    `<table class="authors"><thead><tr><th>author</th><th>total</th>${head}</tr></thead>`,
    `<tbody>${rows}</tbody></table>`,
  );
}
