// Wire types for the catalog API. Every response body carries
// schema_version; errors arrive as { error: { code, message, detail? } }.

export const SCHEMA_VERSION = 1;

export interface ErrorBody {
  code: string;
  message: string;
  detail?: Record<string, unknown>;
}

export interface LibraryDoc {
  slug: string;
  artist_name: string;
  provenance: string;
  holding_site: string;
  birth_year?: number;
  death_year?: number;
  latitude?: number;
  longitude?: number;
  description?: string;
  record_count: number;
}

export interface DcElementDoc {
  element: string;
  value: string;
  qualifier?: string;
  lang?: string;
}

export interface ReadingMarkDoc {
  kind: string;
  locus: string;
  transcription?: string;
  asset_ids?: string[];
}

export interface SurrogateDoc {
  provider: string;
  provider_record_id: string;
  access_url: string;
  match_level: "exact_edition" | "approximate_edition";
  total_score: number;
}

export interface AssetRefDoc {
  asset_id: string;
  kind: string;
  rights: string;
  has_derivative: boolean;
}

export interface RecordDoc {
  record_id: string;
  library_slug: string;
  elements: DcElementDoc[];
  shelf_mark?: string;
  marks?: ReadingMarkDoc[];
  surrogates?: SurrogateDoc[];
  created_at?: string;
  assets: AssetRefDoc[];
}

export interface ResultSummary {
  record_id: string;
  library_slug: string;
  title: string | null;
  creator: string | null;
  date: string | null;
}

export interface SearchPage {
  query: string;
  mode: string;
  page: number;
  per_page: number;
  total: number;
  pages: number;
  results: ResultSummary[];
  facets: {
    library: Record<string, number>;
    marktype: Record<string, number>;
  };
}

export interface SharedGroup {
  key: string;
  libraries: string[];
  record_ids: string[];
}

export interface PairOverlap {
  left: string;
  right: string;
  intersection: number;
  union: number;
  jaccard: number;
}

export interface CompareReport {
  level: "work" | "edition";
  libraries: string[];
  key_counts: Record<string, number>;
  shared: SharedGroup[];
  pairs: PairOverlap[];
}

export interface AuthorRow {
  creator_surname: string;
  counts: Record<string, number>;
  total: number;
}

export interface AuthorsDoc {
  libraries: string[];
  authors: AuthorRow[];
}

export interface LibraryProperties {
  slug: string;
  artist_name: string;
  provenance: string;
}

export interface MapFeature {
  type: "Feature";
  geometry: { type: "Point"; coordinates: [number, number] };
  properties: {
    site_name: string;
    libraries: LibraryProperties[];
  };
}

export interface MapDoc {
  type: "FeatureCollection";
  features: MapFeature[];
  unlocated: LibraryProperties[];
}
