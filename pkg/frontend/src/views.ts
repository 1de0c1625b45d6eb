/** HTML renderers, all pure string builders so they test without a DOM.
 *
 * main.ts owns the elements and event wiring; everything here just turns
 * state into markup. All interpolated text goes through escapeHtml because
 * product names and error messages are user-controlled.
 */

import type { AppState, Banner } from "./appState.js";
import type { CategoryInfo, MatchCard, ProductRecord, SearchResponse } from "./types.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;")
    .replace(/'/g, "&#39;");
}

/**
 * Cards in descending score order. The API already sorts; the stable sort
 * here preserves its tie order and merely enforces the invariant if a
 * response ever arrives shuffled.
 */
export function orderedMatches(matches: readonly MatchCard[]): MatchCard[] {
  return [...matches].sort((a, b) => b.score - a.score);
}

function pct(x: number): number {
  return Math.max(0, Math.min(100, x * 100));
}

function matchCardHtml(m: MatchCard, rank: number): string {
  return [
    `<article class="card" data-product-id="${escapeHtml(m.productId)}">`,
    `<img class="thumb" src="${escapeHtml(m.imageUrl)}" alt="${escapeHtml(m.name)}">`,
    `<div class="card-body">`,
    `<h3>#${rank} ${escapeHtml(m.name)}</h3>`,
    `<p class="cat">${escapeHtml(m.category)}</p>`,
    `<div class="scorebar"><div class="scorebar-fill" style="width:${pct(m.score).toFixed(1)}%"></div></div>`,
    `<p class="score">score ${m.score.toFixed(4)} &middot; category ${m.categoryScore.toFixed(4)}</p>`,
    `</div>`,
    `</article>`,
  ].join("");
}

export function renderResults(resp: SearchResponse): string {
  const cards = orderedMatches(resp.matches)
    .map((m, i) => matchCardHtml(m, i + 1))
    .join("");
  return [
    `<section class="results">`,
    `<div class="results-head">`,
    `<img class="restored" src="data:image/png;base64,${resp.restoredImage}" alt="restored query">`,
    `<div>`,
    `<p>classified as <strong>${escapeHtml(resp.category)}</strong>` +
      ` (preprocessed as ${escapeHtml(resp.preprocMode)})</p>`,
    `<button id="refine-mask" type="button">refine mask</button>`,
    `</div>`,
    `</div>`,
    `<div class="cards">${cards}</div>`,
    `</section>`,
  ].join("");
}

export function renderBanners(banners: readonly Banner[]): string {
  return banners
    .map(
      (b) =>
        `<div class="banner" data-banner-id="${b.id}">` +
        `<span>${escapeHtml(b.message)}</span>` +
        `<button class="dismiss" data-banner-id="${b.id}" type="button">&times;</button>` +
        `</div>`,
    )
    .join("");
}

export function renderCategories(cats: readonly CategoryInfo[]): string {
  if (cats.length === 0) return `<p class="empty">no categories yet</p>`;
  const rows = cats
    .map(
      (c) =>
        `<tr><td>${escapeHtml(c.id)}</td><td>${escapeHtml(c.name)}</td>` +
        `<td class="num">${c.productCount}</td></tr>`,
    )
    .join("");
  return (
    `<table class="categories"><thead><tr><th>id</th><th>name</th>` +
    `<th class="num">products</th></tr></thead><tbody>${rows}</tbody></table>`
  );
}

export function renderCategoryOptions(cats: readonly CategoryInfo[]): string {
  const opts = cats
    .map((c) => `<option value="${escapeHtml(c.id)}">${escapeHtml(c.name)}</option>`)
    .join("");
  return `<option value="auto">auto (classify)</option>` + opts;
}

export function renderProduct(rec: ProductRecord, imageUrl: string): string {
  return [
    `<div class="product">`,
    `<img class="thumb" src="${escapeHtml(imageUrl)}" alt="${escapeHtml(rec.name)}">`,
    `<dl>`,
    `<dt>id</dt><dd>${escapeHtml(rec.id)}</dd>`,
    `<dt>name</dt><dd>${escapeHtml(rec.name)}</dd>`,
    `<dt>category</dt><dd>${escapeHtml(rec.category)}</dd>`,
    `<dt>size</dt><dd>${rec.metadata.width}&times;${rec.metadata.height}</dd>`,
    `<dt>registered</dt><dd>${escapeHtml(rec.registeredAt)}</dd>`,
    `</dl>`,
    `</div>`,
  ].join("");
}

export function renderRestorePreview(state: AppState): string {
  const r = state.restorePreview;
  if (!r) return "";
  const img = (label: string, b64: string) =>
    `<figure><img src="data:image/png;base64,${b64}" alt="${label}">` +
    `<figcaption>${label}</figcaption></figure>`;
  return [
    `<div class="preview-row">`,
    img("preprocessed", r.preprocessed),
    img("restored", r.restored),
    img("edges", r.edges),
    `</div>`,
    `<p class="hint">preprocessed as ${escapeHtml(r.preprocMode)}</p>`,
  ].join("");
}
