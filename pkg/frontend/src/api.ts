/** Typed client for the service endpoints.
 *
 * Every failure surfaces as an ApiError: server-reported ones carry the
 * body's code/message/httpStatus verbatim, transport failures get code
 * "network" with httpStatus 0. The base path is relative so the app works
 * wherever the service mounts it.
 */

import type { CategoryInfo, ProductRecord, RestoreResponse, SearchResponse } from "./types.js";

export class ApiError extends Error {
  readonly code: string;
  readonly httpStatus: number;

  constructor(code: string, message: string, httpStatus: number) {
    super(message);
    this.name = "ApiError";
    this.code = code;
    this.httpStatus = httpStatus;
  }
}

export interface SearchParams {
  image: Uint8Array;
  mask?: Uint8Array | null;
  k?: number;
  engine?: string;
}

export interface RestoreParams {
  image: Uint8Array;
  mask: Uint8Array;
  engine?: string;
}

export interface RegisterParams {
  image: Uint8Array;
  name: string;
  category: string; // category id or "auto"
}

export interface ApiClient {
  search(params: SearchParams): Promise<SearchResponse>;
  restore(params: RestoreParams): Promise<RestoreResponse>;
  registerProduct(params: RegisterParams): Promise<ProductRecord>;
  getCategories(): Promise<CategoryInfo[]>;
  getProduct(id: string): Promise<ProductRecord>;
  productImageUrl(id: string): string;
}

type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

function pngPart(bytes: Uint8Array): Blob {
  // the copy guarantees a plain ArrayBuffer-backed view, which Blob requires
  return new Blob([new Uint8Array(bytes)], { type: "image/png" });
}

async function errorFrom(res: Response): Promise<ApiError> {
  try {
    const body = await res.json();
    if (body && typeof body.code === "string" && typeof body.message === "string") {
      return new ApiError(body.code, body.message, res.status);
    }
  } catch {
    // fall through: body was not the documented error shape
  }
  return new ApiError("internal", `unexpected response (HTTP ${res.status})`, res.status);
}

export function createApiClient(fetchFn?: FetchLike, base = ""): ApiClient {
  const doFetch: FetchLike = fetchFn ?? ((url, init) => fetch(url, init));

  async function request<T>(url: string, init?: RequestInit): Promise<T> {
    let res: Response;
    try {
      res = await doFetch(base + url, init);
    } catch (err) {
      throw new ApiError("network", `cannot reach the service: ${String(err)}`, 0);
    }
    if (!res.ok) throw await errorFrom(res);
    return (await res.json()) as T;
  }

  return {
    async search(params: SearchParams): Promise<SearchResponse> {
      const form = new FormData();
      form.append("image", pngPart(params.image), "query.png");
      if (params.mask) form.append("mask", pngPart(params.mask), "mask.png");
      if (params.k !== undefined) form.append("k", String(params.k));
      if (params.engine !== undefined) form.append("engine", params.engine);
      return request<SearchResponse>("/api/v1/search", { method: "POST", body: form });
    },

    async restore(params: RestoreParams): Promise<RestoreResponse> {
      const form = new FormData();
      form.append("image", pngPart(params.image), "query.png");
      form.append("mask", pngPart(params.mask), "mask.png");
      if (params.engine !== undefined) form.append("engine", params.engine);
      return request<RestoreResponse>("/api/v1/restore", { method: "POST", body: form });
    },

    async registerProduct(params: RegisterParams): Promise<ProductRecord> {
      const form = new FormData();
      form.append("image", pngPart(params.image), "product.png");
      form.append("name", params.name);
      form.append("category", params.category);
      return request<ProductRecord>("/api/v1/products", { method: "POST", body: form });
    },

    async getCategories(): Promise<CategoryInfo[]> {
      return request<CategoryInfo[]>("/api/v1/categories");
    },

    async getProduct(id: string): Promise<ProductRecord> {
      return request<ProductRecord>(`/api/v1/products/${encodeURIComponent(id)}`);
    },

    productImageUrl(id: string): string {
      return `${base}/api/v1/products/${encodeURIComponent(id)}/image`;
    },
  };
}
