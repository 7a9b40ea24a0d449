/**
 * Typed client for the catalog API.
 *
 * One class per portal page would be overkill; this is a flat set of
 * methods mirroring the endpoint list under /api. All methods throw
 * ApiError on non-2xx responses so pages can surface the error code in
 * a banner without inspecting bodies themselves.
 */
import type {
  AuthorsDoc,
  CompareReport,
  ErrorBody,
  LibraryDoc,
  MapDoc,
  RecordDoc,
  SearchPage,
} from "./types.js";
import { SCHEMA_VERSION } from "./types.js";

export class ApiError extends Error {
  readonly status: number;
  readonly code: string;
  readonly detail: Record<string, unknown>;

  constructor(status: number, body: ErrorBody) {
    super(body.message);
    this.name = "ApiError";
    this.status = status;
    this.code = body.code;
    this.detail = body.detail ?? {};
  }
}

export interface SearchParams {
  q: string;
  mode?: "simple" | "advanced";
  library?: string;
  page?: number;
  perPage?: number;
}

export class ApiClient {
  constructor(private readonly baseUrl: string = "") {}

  private async getJson<T>(path: string): Promise<T> {
    const response = await fetch(this.baseUrl + path, {
      headers: { Accept: "application/json" },
    });
    const body = (await response.json()) as {
      schema_version?: number;
      error?: ErrorBody;
    } & T;
    if (!response.ok || body.error) {
      throw new ApiError(
        response.status,
        body.error ?? { code: "Internal", message: `HTTP ${response.status}` },
      );
    }
    if (body.schema_version !== SCHEMA_VERSION) {
      throw new ApiError(response.status, {
        code: "Internal",
        message: `unsupported schema_version ${String(body.schema_version)}`,
      });
    }
    return body;
  }

  async libraries(): Promise<LibraryDoc[]> {
    const body = await this.getJson<{ libraries: LibraryDoc[] }>("/api/libraries");
    return body.libraries;
  }

  async library(slug: string): Promise<LibraryDoc> {
    const body = await this.getJson<{ library: LibraryDoc }>(
      `/api/libraries/${encodeURIComponent(slug)}`,
    );
    return body.library;
  }

  async record(recordId: string): Promise<RecordDoc> {
    const body = await this.getJson<{ record: RecordDoc }>(
      `/api/records/${encodeURIComponent(recordId)}`,
    );
    return body.record;
  }

  async search(params: SearchParams): Promise<SearchPage> {
    const qs = new URLSearchParams({ q: params.q });
    if (params.mode) qs.set("mode", params.mode);
    if (params.library) qs.set("library", params.library);
    if (params.page) qs.set("page", String(params.page));
    if (params.perPage) qs.set("per_page", String(params.perPage));
    return this.getJson<SearchPage>(`/api/search?${qs.toString()}`);
  }

  async compare(slugs: string[], level: "work" | "edition"): Promise<CompareReport> {
    const qs = new URLSearchParams({ libs: slugs.join(","), level });
    return this.getJson<CompareReport>(`/api/compare?${qs.toString()}`);
  }

  async authors(slugs: string[]): Promise<AuthorsDoc> {
    const qs = slugs.length ? `?libs=${encodeURIComponent(slugs.join(","))}` : "";
    return this.getJson<AuthorsDoc>(`/api/authors${qs}`);
  }

  async mapDoc(): Promise<MapDoc> {
    const response = await fetch(this.baseUrl + "/api/map.geojson");
    if (!response.ok) {
      const body = (await response.json()) as { error?: ErrorBody };
      throw new ApiError(
        response.status,
        body.error ?? { code: "Internal", message: `HTTP ${response.status}` },
      );
    }
    return (await response.json()) as MapDoc;
  }

  /** Display URL for an asset; the server picks the derivative by default. */
  assetUrl(assetId: string): string {
    return `${this.baseUrl}/api/assets/${encodeURIComponent(assetId)}`;
  }

  /**
   * URL for the unredacted photograph, or null when rights forbid it.
   * Pages must never construct an original-variant URL another way.
   */
  assetOriginalUrl(asset: { asset_id: string; rights: string }): string | null {
    if (asset.rights !== "public_domain") return null;
    return `${this.assetUrl(asset.asset_id)}?variant=original`;
  }
}
