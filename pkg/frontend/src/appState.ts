/** Client-side state and the actions the views dispatch.
 *
 * The uploaded image is decoded once and kept here; every search, restore,
 * and registration reuses the same bytes, so the refine-mask loop never
 * re-uploads. At most one request is in flight: actions return false while
 * busy and the views disable their controls off the same flag.
 */

import type { ApiClient } from "./api.js";
import { ApiError } from "./api.js";
import {
  MaskCanvasState,
  createMaskState,
  exportMask,
  paintedCount,
} from "./maskCanvas.js";
import type { CategoryInfo, ProductRecord, RestoreResponse, SearchResponse } from "./types.js";

export type View = "mask" | "results" | "register" | "catalog";

export interface UploadedImage {
  readonly name: string;
  readonly bytes: Uint8Array;
  readonly width: number;
  readonly height: number;
}

export interface Banner {
  id: number;
  message: string;
}

export interface AppState {
  view: View;
  image: UploadedImage | null;
  mask: MaskCanvasState | null;
  results: SearchResponse | null;
  restorePreview: RestoreResponse | null;
  categories: CategoryInfo[];
  lastRegistered: ProductRecord | null;
  lookedUp: ProductRecord | null;
  banners: Banner[];
  inflight: boolean;
  k: number;
  engine: string;
}

let bannerSeq = 0;

export function createAppState(): AppState {
  return {
    view: "mask",
    image: null,
    mask: null,
    results: null,
    restorePreview: null,
    categories: [],
    lastRegistered: null,
    lookedUp: null,
    banners: [],
    inflight: false,
    k: 5,
    engine: "diffusion",
  };
}

export function pushBanner(state: AppState, message: string): void {
  state.banners.push({ id: ++bannerSeq, message });
}

export function dismissBanner(state: AppState, id: number): void {
  state.banners = state.banners.filter((b) => b.id !== id);
}

function reportError(state: AppState, err: unknown): void {
  if (err instanceof ApiError) {
    pushBanner(state, `${err.code}: ${err.message}`);
  } else {
    pushBanner(state, String(err));
  }
}

/** Install a freshly decoded upload and a blank mask at its resolution. */
export function loadImage(state: AppState, image: UploadedImage): void {
  state.image = image;
  state.mask = createMaskState(image.width, image.height);
  state.results = null;
  state.restorePreview = null;
  state.view = "mask";
}

/** Back to the canvas with image and painted set untouched. */
export function refineMask(state: AppState): void {
  state.view = "mask";
}

function maskForSearch(state: AppState): Uint8Array | null {
  // an untouched mask means "nothing occluded": omit it rather than send all-255
  if (!state.mask || paintedCount(state.mask) === 0) return null;
  return exportMask(state.mask);
}

/** Run a search with the stored image and current mask. Returns false when busy or nothing loaded. */
export async function runSearch(state: AppState, api: ApiClient): Promise<boolean> {
  if (state.inflight) return false;
  if (!state.image) {
    pushBanner(state, "load an image first");
    return false;
  }
  state.inflight = true;
  try {
    state.results = await api.search({
      image: state.image.bytes,
      mask: maskForSearch(state),
      k: state.k,
      engine: state.engine,
    });
    state.view = "results";
    return true;
  } catch (err) {
    reportError(state, err);
    return false;
  } finally {
    state.inflight = false;
  }
}

/** Preview preprocessing + inpainting without touching the catalog. */
export async function runRestore(state: AppState, api: ApiClient): Promise<boolean> {
  if (state.inflight) return false;
  if (!state.image || !state.mask) {
    pushBanner(state, "load an image first");
    return false;
  }
  state.inflight = true;
  try {
    state.restorePreview = await api.restore({
      image: state.image.bytes,
      mask: exportMask(state.mask),
      engine: state.engine,
    });
    return true;
  } catch (err) {
    reportError(state, err);
    return false;
  } finally {
    state.inflight = false;
  }
}

/** Register the loaded image as a product under a category id or "auto". */
export async function runRegister(
  state: AppState,
  api: ApiClient,
  name: string,
  category: string,
): Promise<boolean> {
  if (state.inflight) return false;
  if (!state.image) {
    pushBanner(state, "load an image first");
    return false;
  }
  state.inflight = true;
  try {
    state.lastRegistered = await api.registerProduct({
      image: state.image.bytes,
      name,
      category,
    });
    pushBanner(
      state,
      `registered "${state.lastRegistered.name}" in ${state.lastRegistered.category}`,
    );
    return true;
  } catch (err) {
    reportError(state, err);
    return false;
  } finally {
    state.inflight = false;
  }
}

export async function loadCategories(state: AppState, api: ApiClient): Promise<boolean> {
  if (state.inflight) return false;
  state.inflight = true;
  try {
    state.categories = await api.getCategories();
    return true;
  } catch (err) {
    reportError(state, err);
    return false;
  } finally {
    state.inflight = false;
  }
}

export async function lookupProduct(state: AppState, api: ApiClient, id: string): Promise<boolean> {
  if (state.inflight) return false;
  state.inflight = true;
  try {
    state.lookedUp = await api.getProduct(id);
    return true;
  } catch (err) {
    reportError(state, err);
    return false;
  } finally {
    state.inflight = false;
  }
}
