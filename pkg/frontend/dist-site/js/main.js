/** Browser entry point: owns the DOM, delegates everything else.
 *
 * The canvas shows the upload at native resolution (CSS scales it down for
 * display; pointer coordinates are mapped back), so painted holes land on
 * exact image pixels and the exported mask never needs resampling.
 */
import { createApiClient } from "./api.js";
import { createAppState, dismissBanner, loadCategories, loadImage, lookupProduct, pushBanner, refineMask, runRegister, runRestore, runSearch, } from "./appState.js";
import { beginStroke, clearMask, endStroke, holeCoverage, paintLine, paintRect, setBrushSize, setTool, undo, } from "./maskCanvas.js";
import { renderBanners, renderCategories, renderCategoryOptions, renderProduct, renderResults, renderRestorePreview, } from "./views.js";
const state = createAppState();
const api = createApiClient();
function el(id) {
    const node = document.getElementById(id);
    if (!node)
        throw new Error(`missing element #${id}`);
    return node;
}
const canvas = el("mask-canvas");
const ctx = canvas.getContext("2d");
// native-resolution backing layers composited onto the visible canvas
let imageLayer = null;
let overlayLayer = null;
let overlayData = null;
// in-progress rectangle drag, in image coordinates
let rectAnchor = null;
let rectCursor = null;
let stroking = false;
let lastPoint = null;
function refreshOverlay() {
    if (!state.mask || !overlayData || !overlayLayer)
        return;
    const px = new Uint32Array(overlayData.data.buffer);
    const painted = state.mask.painted;
    for (let i = 0; i < painted.length; i++) {
        // little-endian RGBA bytes: translucent red where painted
        px[i] = painted[i] ? 0x903333dd : 0;
    }
    overlayLayer.getContext("2d").putImageData(overlayData, 0, 0);
}
function drawCanvas() {
    if (!state.image || !imageLayer || !overlayLayer)
        return;
    canvas.width = state.image.width;
    canvas.height = state.image.height;
    ctx.imageSmoothingEnabled = false;
    ctx.drawImage(imageLayer, 0, 0);
    ctx.drawImage(overlayLayer, 0, 0);
    if (rectAnchor && rectCursor) {
        ctx.save();
        ctx.strokeStyle = "#dd3333";
        ctx.setLineDash([4, 3]);
        ctx.lineWidth = Math.max(1, canvas.width / 400);
        ctx.strokeRect(Math.min(rectAnchor.x, rectCursor.x), Math.min(rectAnchor.y, rectCursor.y), Math.abs(rectCursor.x - rectAnchor.x) + 1, Math.abs(rectCursor.y - rectAnchor.y) + 1);
        ctx.restore();
    }
}
function canvasPoint(ev) {
    const box = canvas.getBoundingClientRect();
    return {
        x: Math.floor(((ev.clientX - box.left) / box.width) * canvas.width),
        y: Math.floor(((ev.clientY - box.top) / box.height) * canvas.height),
    };
}
function maskChanged() {
    refreshOverlay();
    drawCanvas();
    el("coverage").textContent = state.mask
        ? `${(holeCoverage(state.mask) * 100).toFixed(1)}% hole`
        : "";
}
function showView(view) {
    state.view = view;
    sync();
}
function sync() {
    for (const v of ["mask", "results", "register", "catalog"]) {
        el(`view-${v}`).hidden = state.view !== v;
        el(`tab-${v}`).classList.toggle("active", state.view === v);
    }
    el("banners").innerHTML = renderBanners(state.banners);
    const busy = state.inflight;
    const hasImage = state.image !== null;
    for (const id of ["btn-search", "btn-restore", "btn-register"]) {
        el(id).disabled = busy || !hasImage;
    }
    el("btn-refresh-catalog").disabled = busy;
    el("btn-lookup").disabled = busy;
    el("drop-hint").hidden = hasImage;
    canvas.hidden = !hasImage;
    el("results-root").innerHTML = state.results ? renderResults(state.results) : "";
    el("restore-preview").innerHTML = renderRestorePreview(state);
    el("categories-root").innerHTML = renderCategories(state.categories);
    el("product-root").innerHTML = state.lookedUp
        ? renderProduct(state.lookedUp, api.productImageUrl(state.lookedUp.id))
        : "";
    const select = el("register-category");
    const previous = select.value;
    select.innerHTML = renderCategoryOptions(state.categories);
    if ([...select.options].some((o) => o.value === previous))
        select.value = previous;
    maskChanged();
}
/** Kick off an async action and repaint when it settles; the action itself
 * flips `inflight` synchronously so the immediate sync disables controls. */
function dispatch(action) {
    sync();
    void action.then(sync, sync);
}
async function acceptFile(file) {
    try {
        const bytes = new Uint8Array(await file.arrayBuffer());
        const bitmap = await createImageBitmap(new Blob([bytes]));
        const layer = document.createElement("canvas");
        layer.width = bitmap.width;
        layer.height = bitmap.height;
        layer.getContext("2d").drawImage(bitmap, 0, 0);
        imageLayer = layer;
        overlayLayer = document.createElement("canvas");
        overlayLayer.width = bitmap.width;
        overlayLayer.height = bitmap.height;
        overlayData = new ImageData(bitmap.width, bitmap.height);
        loadImage(state, {
            name: file.name,
            bytes,
            width: bitmap.width,
            height: bitmap.height,
        });
    }
    catch (err) {
        pushBanner(state, `cannot read ${file.name}: ${String(err)}`);
    }
    sync();
}
function wirePointerEvents() {
    canvas.addEventListener("pointerdown", (ev) => {
        if (!state.mask)
            return;
        ev.preventDefault();
        canvas.setPointerCapture(ev.pointerId);
        const p = canvasPoint(ev);
        if (state.mask.tool === "rectangle") {
            rectAnchor = p;
            rectCursor = p;
            drawCanvas();
            return;
        }
        stroking = true;
        lastPoint = p;
        beginStroke(state.mask);
        paintLine(state.mask, p.x, p.y, p.x, p.y);
        maskChanged();
    });
    canvas.addEventListener("pointermove", (ev) => {
        if (!state.mask)
            return;
        const p = canvasPoint(ev);
        if (rectAnchor) {
            rectCursor = p;
            drawCanvas();
            return;
        }
        if (!stroking || !lastPoint)
            return;
        paintLine(state.mask, lastPoint.x, lastPoint.y, p.x, p.y);
        lastPoint = p;
        maskChanged();
    });
    const finish = (ev) => {
        if (!state.mask)
            return;
        if (rectAnchor) {
            const p = canvasPoint(ev);
            paintRect(state.mask, rectAnchor.x, rectAnchor.y, p.x, p.y);
            rectAnchor = null;
            rectCursor = null;
            maskChanged();
            return;
        }
        if (stroking) {
            stroking = false;
            lastPoint = null;
            endStroke(state.mask);
            maskChanged();
        }
    };
    canvas.addEventListener("pointerup", finish);
    canvas.addEventListener("pointercancel", finish);
}
function wireControls() {
    for (const v of ["mask", "results", "register", "catalog"]) {
        el(`tab-${v}`).addEventListener("click", () => showView(v));
    }
    const fileInput = el("file-input");
    fileInput.addEventListener("change", () => {
        const f = fileInput.files?.[0];
        if (f)
            void acceptFile(f);
    });
    const dropzone = el("dropzone");
    dropzone.addEventListener("dragover", (ev) => ev.preventDefault());
    dropzone.addEventListener("drop", (ev) => {
        ev.preventDefault();
        const f = ev.dataTransfer?.files?.[0];
        if (f)
            void acceptFile(f);
    });
    el("tool-select").addEventListener("change", (ev) => {
        if (state.mask)
            setTool(state.mask, ev.target.value);
    });
    const brush = el("brush-size");
    brush.addEventListener("input", () => {
        if (state.mask)
            setBrushSize(state.mask, Math.max(1, Number(brush.value) | 0));
    });
    el("btn-undo").addEventListener("click", () => {
        if (state.mask) {
            undo(state.mask);
            maskChanged();
        }
    });
    el("btn-clear").addEventListener("click", () => {
        if (state.mask) {
            clearMask(state.mask);
            maskChanged();
        }
    });
    document.addEventListener("keydown", (ev) => {
        if ((ev.ctrlKey || ev.metaKey) && ev.key.toLowerCase() === "z" && state.mask) {
            ev.preventDefault();
            undo(state.mask);
            maskChanged();
        }
    });
    const kInput = el("k-input");
    kInput.addEventListener("change", () => {
        state.k = Math.max(1, Number(kInput.value) | 0);
        kInput.value = String(state.k);
    });
    el("engine-select").addEventListener("change", (ev) => {
        state.engine = ev.target.value;
    });
    el("btn-search").addEventListener("click", () => dispatch(runSearch(state, api)));
    el("btn-restore").addEventListener("click", () => dispatch(runRestore(state, api)));
    el("btn-register").addEventListener("click", () => {
        const name = el("register-name").value.trim();
        const category = el("register-category").value;
        if (!name) {
            pushBanner(state, "enter a product name");
            sync();
            return;
        }
        dispatch(runRegister(state, api, name, category));
    });
    el("btn-refresh-catalog").addEventListener("click", () => dispatch(loadCategories(state, api)));
    el("btn-lookup").addEventListener("click", () => {
        const id = el("lookup-id").value.trim();
        if (id)
            dispatch(lookupProduct(state, api, id));
    });
    // rendered markup: banner dismiss buttons and the refine-mask button
    document.addEventListener("click", (ev) => {
        const target = ev.target;
        if (target.classList.contains("dismiss")) {
            dismissBanner(state, Number(target.dataset.bannerId));
            sync();
        }
        else if (target.id === "refine-mask") {
            refineMask(state);
            sync();
        }
    });
}
wirePointerEvents();
wireControls();
dispatch(loadCategories(state, api));
