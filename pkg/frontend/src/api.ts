/** Typed client for the rating service's /v1 JSON API. */

export interface SchemaEntry {
  name: string;
  kind: "binary" | "numeric";
  monotone: number;
  suggestible: boolean;
}

export type FeatureMap = Record<string, number>;

export interface RateResponse {
  rating: number;
  probabilities: number[];
}

export interface ExplainItem {
  feature: string;
  shap: number;
}

export interface ExplainResponse {
  rating: number;
  responsible_k: number;
  base_value: number;
  items: ExplainItem[];
  probability: number;
  method: string;
}

export interface SuggestItem {
  feature: string;
  increment: number;
}

export interface SuggestResponse {
  current_rating: number;
  items: SuggestItem[];
}

export interface WhatIfResponse {
  before: RateResponse;
  after: RateResponse;
  delta_per_classifier: number[];
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    detail: string,
  ) {
    super(detail);
    this.name = "ApiError";
  }
}

/** The slice of fetch the client relies on; tests substitute a replay fake. */
export interface FetchResponse {
  ok: boolean;
  status: number;
  json(): Promise<unknown>;
}

export type FetchLike = (
  url: string,
  init?: { method: string; headers?: Record<string, string>; body?: string },
) => Promise<FetchResponse>;

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  schema(): Promise<SchemaEntry[]> {
    return this.request("GET", "/v1/schema");
  }

  rate(features: FeatureMap): Promise<RateResponse> {
    return this.request("POST", "/v1/rate", { features });
  }

  explain(features: FeatureMap): Promise<ExplainResponse> {
    return this.request("POST", "/v1/explain", { features });
  }

  suggest(features: FeatureMap): Promise<SuggestResponse> {
    return this.request("POST", "/v1/suggest", { features });
  }

  whatif(features: FeatureMap, flips: string[]): Promise<WhatIfResponse> {
    return this.request("POST", "/v1/whatif", { features, flips });
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: Parameters<FetchLike>[1] = { method };
    if (body !== undefined) {
      init.headers = { "content-type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const resp = await this.fetchFn(this.baseUrl + path, init);
    let payload: unknown = null;
    try {
      payload = await resp.json();
    } catch {
      payload = null;
    }
    if (!resp.ok) {
      const detail =
        payload !== null && typeof payload === "object" && "detail" in payload
          ? String((payload as { detail: unknown }).detail)
          : `request failed with status ${resp.status}`;
      throw new ApiError(resp.status, detail);
    }
    return payload as T;
  }
}
