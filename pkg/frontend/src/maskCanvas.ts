/** Mask drawing model, independent of the DOM.
 *
 * The painted set lives at the image's native resolution; the canvas element
 * only scales it for display. Pixels are addressed as y*width+x in a
 * Uint8Array where 1 marks a painted hole. Undo entries record just the
 * pixels a stroke changed together with their prior values, so undo restores
 * the exact previous set regardless of stroke overlap.
 */

import { encodeGrayPng } from "./png.js";

export type Tool = "brush" | "rectangle" | "eraser";

export const TOOLS: readonly Tool[] = ["brush", "rectangle", "eraser"];

export class NoImageLoadedError extends Error {
  constructor() {
    super("no image loaded");
    this.name = "NoImageLoadedError";
  }
}

interface StrokeDiff {
  indices: number[];
  prior: number[];
}

export interface MaskCanvasState {
  readonly width: number;
  readonly height: number;
  brushSize: number;
  tool: Tool;
  painted: Uint8Array; // 1 = hole
  undoStack: StrokeDiff[];
  pending: StrokeDiff | null; // diff of the stroke being drawn
}

export function createMaskState(width: number, height: number, brushSize = 12): MaskCanvasState {
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

export function setBrushSize(state: MaskCanvasState, size: number): void {
  if (!Number.isInteger(size) || size < 1) {
    throw new RangeError(`brush size must be a positive integer, got ${size}`);
  }
  state.brushSize = size;
}

export function setTool(state: MaskCanvasState, tool: Tool): void {
  if (!TOOLS.includes(tool)) throw new RangeError(`unknown tool ${String(tool)}`);
  state.tool = tool;
}

/** Set one pixel, recording its prior value the first time a stroke touches it. */
function plot(state: MaskCanvasState, diff: StrokeDiff, x: number, y: number, value: number): void {
  if (x < 0 || y < 0 || x >= state.width || y >= state.height) return;
  const i = y * state.width + x;
  if (state.painted[i] === value) return;
  diff.indices.push(i);
  diff.prior.push(state.painted[i]);
  state.painted[i] = value;
}

function stamp(state: MaskCanvasState, diff: StrokeDiff, cx: number, cy: number, value: number): void {
  const r = state.brushSize;
  const r2 = r * r;
  for (let dy = -r; dy <= r; dy++) {
    for (let dx = -r; dx <= r; dx++) {
      if (dx * dx + dy * dy <= r2) plot(state, diff, cx + dx, cy + dy, value);
    }
  }
}

export function beginStroke(state: MaskCanvasState): void {
  if (state.pending) endStroke(state);
  state.pending = { indices: [], prior: [] };
}

/** Apply the current tool at one point of an in-progress stroke. */
export function paintAt(state: MaskCanvasState, x: number, y: number): void {
  if (!state.pending) beginStroke(state);
  const value = state.tool === "eraser" ? 0 : 1;
  stamp(state, state.pending as StrokeDiff, Math.round(x), Math.round(y), value);
}

/** Stamp along the segment so fast pointer moves leave no gaps. */
export function paintLine(state: MaskCanvasState, x0: number, y0: number, x1: number, y1: number): void {
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
    if (ax === bx && ay === by) break;
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
export function endStroke(state: MaskCanvasState): void {
  const diff = state.pending;
  state.pending = null;
  if (diff && diff.indices.length > 0) state.undoStack.push(diff);
}

/** Fill an axis-aligned rectangle (inclusive corners) as a single undoable step. */
export function paintRect(state: MaskCanvasState, x0: number, y0: number, x1: number, y1: number): void {
  if (state.pending) endStroke(state);
  const value = state.tool === "eraser" ? 0 : 1;
  const left = Math.max(0, Math.min(Math.round(x0), Math.round(x1)));
  const right = Math.min(state.width - 1, Math.max(Math.round(x0), Math.round(x1)));
  const top = Math.max(0, Math.min(Math.round(y0), Math.round(y1)));
  const bottom = Math.min(state.height - 1, Math.max(Math.round(y0), Math.round(y1)));
  const diff: StrokeDiff = { indices: [], prior: [] };
  for (let y = top; y <= bottom; y++) {
    for (let x = left; x <= right; x++) plot(state, diff, x, y, value);
  }
  if (diff.indices.length > 0) state.undoStack.push(diff);
}

/** Clear every painted pixel as a single undoable step. */
export function clearMask(state: MaskCanvasState): void {
  if (state.pending) endStroke(state);
  const diff: StrokeDiff = { indices: [], prior: [] };
  for (let i = 0; i < state.painted.length; i++) {
    if (state.painted[i] !== 0) {
      diff.indices.push(i);
      diff.prior.push(state.painted[i]);
      state.painted[i] = 0;
    }
  }
  if (diff.indices.length > 0) state.undoStack.push(diff);
}

/** Revert the most recent committed stroke. Returns false when nothing to undo. */
export function undo(state: MaskCanvasState): boolean {
  if (state.pending) endStroke(state);
  const diff = state.undoStack.pop();
  if (!diff) return false;
  // each index appears at most once per diff, so order does not matter
  for (let k = 0; k < diff.indices.length; k++) {
    state.painted[diff.indices[k]] = diff.prior[k];
  }
  return true;
}

/** Fraction of pixels currently painted as holes, in [0, 1]. */
export function holeCoverage(state: MaskCanvasState): number {
  let n = 0;
  for (let i = 0; i < state.painted.length; i++) n += state.painted[i];
  return n / state.painted.length;
}

export function paintedCount(state: MaskCanvasState): number {
  let n = 0;
  for (let i = 0; i < state.painted.length; i++) n += state.painted[i];
  return n;
}

/**
 * Export the mask as a grayscale PNG matching the service convention:
 * painted holes are 0, everything else 255, dimensions equal the image's.
 */
export function exportMask(state: MaskCanvasState | null | undefined): Uint8Array {
  if (!state) throw new NoImageLoadedError();
  const samples = new Uint8Array(state.width * state.height);
  for (let i = 0; i < samples.length; i++) {
    samples[i] = state.painted[i] ? 0 : 255;
  }
  return encodeGrayPng(state.width, state.height, samples);
}
