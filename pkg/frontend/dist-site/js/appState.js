/** Client-side state and the actions the views dispatch.
 *
 * The uploaded image is decoded once and kept here; every search, restore,
 * and registration reuses the same bytes, so the refine-mask loop never
 * re-uploads. At most one request is in flight: actions return false while
 * busy and the views disable their controls off the same flag.
 */
import { ApiError } from "./api.js";
import { createMaskState, exportMask, paintedCount, } from "./maskCanvas.js";
let bannerSeq = 0;
export function createAppState() {
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
export function pushBanner(state, message) {
    state.banners.push({ id: ++bannerSeq, message });
}
export function dismissBanner(state, id) {
    state.banners = state.banners.filter((b) => b.id !== id);
}
function reportError(state, err) {
    if (err instanceof ApiError) {
        pushBanner(state, `${err.code}: ${err.message}`);
    }
    else {
        pushBanner(state, String(err));
    }
}
/** Install a freshly decoded upload and a blank mask at its resolution. */
export function loadImage(state, image) {
    state.image = image;
    state.mask = createMaskState(image.width, image.height);
    state.results = null;
    state.restorePreview = null;
    state.view = "mask";
}
/** Back to the canvas with image and painted set untouched. */
export function refineMask(state) {
    state.view = "mask";
}
function maskForSearch(state) {
    // an untouched mask means "nothing occluded": omit it rather than send all-255
    if (!state.mask || paintedCount(state.mask) === 0)
        return null;
    return exportMask(state.mask);
}
/** Run a search with the stored image and current mask. Returns false when busy or nothing loaded. */
export async function runSearch(state, api) {
    if (state.inflight)
        return false;
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
    }
    catch (err) {
        reportError(state, err);
        return false;
    }
    finally {
        state.inflight = false;
    }
}
/** Preview preprocessing + inpainting without touching the catalog. */
export async function runRestore(state, api) {
    if (state.inflight)
        return false;
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
    }
    catch (err) {
        reportError(state, err);
        return false;
    }
    finally {
        state.inflight = false;
    }
}
/** Register the loaded image as a product under a category id or "auto". */
export async function runRegister(state, api, name, category) {
    if (state.inflight)
        return false;
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
        pushBanner(state, `registered "${state.lastRegistered.name}" in ${state.lastRegistered.category}`);
        return true;
    }
    catch (err) {
        reportError(state, err);
        return false;
    }
    finally {
        state.inflight = false;
    }
}
export async function loadCategories(state, api) {
    if (state.inflight)
        return false;
    state.inflight = true;
    try {
        state.categories = await api.getCategories();
        return true;
    }
    catch (err) {
        reportError(state, err);
        return false;
    }
    finally {
        state.inflight = false;
    }
}
export async function lookupProduct(state, api, id) {
    if (state.inflight)
        return false;
    state.inflight = true;
    try {
        state.lookedUp = await api.getProduct(id);
        return true;
    }
    catch (err) {
        reportError(state, err);
        return false;
    }
    finally {
        state.inflight = false;
    }
}
