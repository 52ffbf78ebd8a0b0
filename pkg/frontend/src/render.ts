/** DOM rendering for the what-if explorer. Full re-render per change;
 * the page is small enough that diffing would be ceremony. */
import { WhatIfStore } from "./state.js";

const fmtProb = (p: number): string => p.toFixed(4);
const fmtIncrement = (w: number): string => `+${w.toFixed(4)}`;

/** Signed attribution label; negatives are parenthesized accounting-style
 * and additionally struck through via the .neg class. */
const fmtShap = (v: number): string =>
  v < 0 ? `(${Math.abs(v).toFixed(3)})` : `+${v.toFixed(3)}`;

function esc(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function banners(store: WhatIfStore): string {
  let html = "";
  if (store.error) html += `<div class="banner error">${esc(store.error)}</div>`;
  if (store.notice) html += `<div class="banner notice">${esc(store.notice)}</div>`;
  return html;
}

function ratingPanel(store: WhatIfStore): string {
  if (!store.rate) return "";
  const { rating, probabilities } = store.rate;
  const tiles = Array.from(
    { length: 5 },
    (_, i) => `<span class="tile${i < rating ? " filled" : ""}">★</span>`,
  ).join("");
  const probs = probabilities
    .map((p, i) => `<li class="prob" data-k="${i + 1}">${fmtProb(p)}</li>`)
    .join("");
  return `
    <section class="rating-panel">
      <div class="tiles" data-rating="${rating}">${tiles}</div>
      <ul class="probs" title="probability the rating exceeds 1, 2, 3, 4">${probs}</ul>
    </section>`;
}

function explanationPanel(store: WhatIfStore): string {
  if (!store.explain) return "";
  const { items, base_value, responsible_k, method } = store.explain;
  const scale = Math.max(...items.map((it) => Math.abs(it.shap)), 1e-12);
  const bars = items
    .map((it) => {
      const width = ((Math.abs(it.shap) / scale) * 100).toFixed(1);
      const cls = it.shap < 0 ? "neg" : "pos";
      return `
        <li class="bar ${cls}" data-feature="${esc(it.feature)}">
          <span class="fill" style="width:${width}%"></span>
          <span class="label">${esc(it.feature)}</span>
          <span class="num">${fmtShap(it.shap)}</span>
        </li>`;
    })
    .join("");
  return `
    <section class="explanation" title="margin contributions vs. the previous class">
      <div class="base">
        classifier ${responsible_k} · base <span class="num">${base_value.toFixed(4)}</span>
        · ${esc(method)}
      </div>
      <ul class="bars">${bars}</ul>
    </section>`;
}

function suggestionPanel(store: WhatIfStore): string {
  if (!store.suggest) return "";
  const { items } = store.suggest;
  if (items.length === 0) {
    return `<section class="suggestions"><p class="empty">nothing left to suggest</p></section>`;
  }
  const rows = items
    .map(
      (it) => `
      <li><button class="suggestion" data-suggest="${esc(it.feature)}">
        ${esc(it.feature)} <span class="num">${fmtIncrement(it.increment)}</span>
      </button></li>`,
    )
    .join("");
  return `<section class="suggestions"><ol class="suggestion-list">${rows}</ol></section>`;
}

function controlPanel(store: WhatIfStore): string {
  const rows = store.schema
    .filter((entry) => entry.kind === "binary")
    .map((entry) => {
      const checked = store.features[entry.name] ? " checked" : "";
      const disabled = store.pending.has(entry.name) ? " disabled" : "";
      return `
      <label class="control${disabled ? " pending" : ""}">
        <input type="checkbox" data-toggle="${esc(entry.name)}"${checked}${disabled}>
        ${esc(entry.name)}
      </label>`;
    })
    .join("");
  return `<section class="controls">${rows}</section>`;
}

export function render(store: WhatIfStore, root: HTMLElement): void {
  root.innerHTML = `
    <div class="whatif">
      ${banners(store)}
      ${ratingPanel(store)}
      ${explanationPanel(store)}
      ${suggestionPanel(store)}
      ${controlPanel(store)}
    </div>`;
}
