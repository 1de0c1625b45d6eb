/** Mask drawing model, independent of the DOM.
 *
 * The painted set lives at the image's native resolution; the canvas element
 * only scales it for display. Pixels are addressed as y*width+x in a
 * Uint8Array where 1 marks a painted hole. Undo entries record just the
 * pixels a stroke changed together with their prior values, so undo restores
 * the exact previous set regardless of stroke overlap.
 */
import { encodeGrayPng } from "./png.js";
export const TOOLS = ["brush", "rectangle", "eraser"];
export class NoImageLoadedError extends Error {
    constructor() {
        super("no image loaded");
        this.name = "NoImageLoadedError";
    }
}
export function createMaskState(width, height, brushSize = 12) {
    if (!Number.isInteger(width) || !Number.isInteger(height) || width < 1 || height < 1) {
        throw new RangeError(`invalid mask dimensions ${width}x${height}`);
    }
    if (!Number.isInteger(brushSize) || brushSize < 1) {
        throw new RangeError(`brush size must be a positive integer, got ${brushSize}`);
    }
    return {
        width,
        height,
        brushSize,
        tool: "brush",
        painted: new Uint8Array(width * height),
        undoStack: [],
        pending: null,
    };
}
export function setBrushSize(state, size) {
    if (!Number.isInteger(size) || size < 1) {
        throw new RangeError(`brush size must be a positive integer, got ${size}`);
    }
    state.brushSize = size;
}
export function setTool(state, tool) {
    if (!TOOLS.includes(tool))
        throw new RangeError(`unknown tool ${String(tool)}`);
    state.tool = tool;
}
/** Set one pixel, recording its prior value the first time a stroke touches it. */
function plot(state, diff, x, y, value) {
    if (x < 0 || y < 0 || x >= state.width || y >= state.height)
        return;
    const i = y * state.width + x;
    if (state.painted[i] === value)
        return;
    diff.indices.push(i);
    diff.prior.push(state.painted[i]);
    state.painted[i] = value;
}
function stamp(state, diff, cx, cy, value) {
    const r = state.brushSize;
    const r2 = r * r;
    for (let dy = -r; dy <= r; dy++) {
        for (let dx = -r; dx <= r; dx++) {
            if (dx * dx + dy * dy <= r2)
                plot(state, diff, cx + dx, cy + dy, value);
        }
    }
}
export function beginStroke(state) {
    if (state.pending)
        endStroke(state);
    state.pending = { indices: [], prior: [] };
}
/** Apply the current tool at one point of an in-progress stroke. */
export function paintAt(state, x, y) {
    if (!state.pending)
        beginStroke(state);
    const value = state.tool === "eraser" ? 0 : 1;
    stamp(state, state.pending, Math.round(x), Math.round(y), value);
}
/** Stamp along the segment so fast pointer moves leave no gaps. */
export function paintLine(state, x0, y0, x1, y1) {
    let ax = Math.round(x0);
    let ay = Math.round(y0);
    const bx = Math.round(x1);
    const by = Math.round(y1);
    const dx = Math.abs(bx - ax);
    const dy = -Math.abs(by - ay);
    const sx = ax < bx ? 1 : -1;
    const sy = ay < by ? 1 : -1;
    let err = dx + dy;
    for (;;) {
        paintAt(state, ax, ay);
        if (ax === bx && ay === by)
            break;
        const e2 = 2 * err;
        if (e2 >= dy) {
            err += dy;
            ax += sx;
        }
        if (e2 <= dx) {
            err += dx;
            ay += sy;
        }
    }
}
/** Commit the in-progress stroke to the undo stack; no-op strokes leave no entry. */
export function endStroke(state) {
    const diff = state.pending;
    state.pending = null;
    if (diff && diff.indices.length > 0)
        state.undoStack.push(diff);
}
/** Fill an axis-aligned rectangle (inclusive corners) as a single undoable step. */
export function paintRect(state, x0, y0, x1, y1) {
    if (state.pending)
        endStroke(state);
    const value = state.tool === "eraser" ? 0 : 1;
    const left = Math.max(0, Math.min(Math.round(x0), Math.round(x1)));
    const right = Math.min(state.width - 1, Math.max(Math.round(x0), Math.round(x1)));
    const top = Math.max(0, Math.min(Math.round(y0), Math.round(y1)));
    const bottom = Math.min(state.height - 1, Math.max(Math.round(y0), Math.round(y1)));
    const diff = { indices: [], prior: [] };
    for (let y = top; y <= bottom; y++) {
        for (let x = left; x <= right; x++)
            plot(state, diff, x, y, value);
    }
    if (diff.indices.length > 0)
        state.undoStack.push(diff);
}
/** Clear every painted pixel as a single undoable step. */
export function clearMask(state) {
    if (state.pending)
        endStroke(state);
    const diff = { indices: [], prior: [] };
    for (let i = 0; i < state.painted.length; i++) {
        if (state.painted[i] !== 0) {
            diff.indices.push(i);
            diff.prior.push(state.painted[i]);
            state.painted[i] = 0;
        }
    }
    if (diff.indices.length > 0)
        state.undoStack.push(diff);
}
/** Revert the most recent committed stroke. Returns false when nothing to undo. */
export function undo(state) {
    if (state.pending)
        endStroke(state);
    const diff = state.undoStack.pop();
    if (!diff)
        return false;
    // each index appears at most once per diff, so order does not matter
    for (let k = 0; k < diff.indices.length; k++) {
        state.painted[diff.indices[k]] = diff.prior[k];
    }
    return true;
}
/** Fraction of pixels currently painted as holes, in [0, 1]. */
export function holeCoverage(state) {
    let n = 0;
    for (let i = 0; i < state.painted.length; i++)
        n += state.painted[i];
    return n / state.painted.length;
}
export function paintedCount(state) {
    let n = 0;
    for (let i = 0; i < state.painted.length; i++)
        n += state.painted[i];
    return n;
}
/**
 * Export the mask as a grayscale PNG matching the service convention:
 * painted holes are 0, everything else 255, dimensions equal the image's.
 */
export function exportMask(state) {
    if (!state)
        throw new NoImageLoadedError();
    const samples = new Uint8Array(state.width * state.height);
    for (let i = 0; i < samples.length; i++) {
        samples[i] = state.painted[i] ? 0 : 255;
    }
    return encodeGrayPng(state.width, state.height, samples);
}
