/** Side-panel rendering: ve chips, block sizes, touch rows, suggestions,
 * history.  Pure HTML-string builders, testable without a DOM. */

import type { PlotData, Suggestion } from "./types.js";
import { curveColor } from "./chart.js";

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export function veHtml(ve: number[] | null): string {
  if (!ve) return `<p class="muted">no labeling yet - run infer</p>`;
  const chips = ve
    .map((v, k) => `<span class="chip" style="border-color:${curveColor(k + 1)}">` +
                   `${k + 1}: <b>${v}</b></span>`)
    .join(" ");
  return `<div class="ve-row">ve = ( ${ve.join(", ")} )</div><div>${chips}</div>`;
}

export function blocksHtml(blocks: PlotData["blocks"]): string {
  if (!blocks) return "";
  const sizes = blocks.sizes.join(", ");
  const rows = blocks.labels
    .map((lab, k) => `<li>label ${lab}: curves ${blocks.members[k].join(", ")}</li>`)
    .join("");
  return `<p><b>${blocks.sizes.length}</b> groups, sizes {${sizes}}</p><ul>${rows}</ul>`;
}

export function touchHtml(touch: number[][], badRow?: number): string {
  if (!touch.length) return `<p class="muted">no almost-touch pairs marked</p>`;
  const rows = touch
    .map(([a, b], k) => {
      const bad = badRow === k + 1 ? " bad" : "";
      return `<li class="touch-row${bad}" data-row="${k + 1}">(${a}, ${b}) ` +
             `<button class="undo" data-row="${k + 1}" title="remove this row">×</button></li>`;
    })
    .join("");
  return `<ol>${rows}</ol>`;
}

export function suggestionsHtml(suggs: Suggestion[]): string {
  if (!suggs.length) return `<p class="muted">no candidates</p>`;
  const rows = suggs
    .map((s) => `<li class="sugg" data-i="${s.i}" data-j="${s.j}">` +
                `(${s.i}, ${s.j}) gap ${s.d.toExponential(2)} at t=${s.t.toFixed(3)} ` +
                `score ${s.score.toFixed(2)}</li>`)
    .join("");
  return `<ul>${rows}</ul>`;
}

export function historyHtml(history: PlotData["history"]): string {
  if (!history.length) return `<p class="muted">no prior intervals</p>`;
  const rows = history
    .map((h) => {
      const ve = h.ve ? `ve = (${h.ve.join(", ")})` : "no labeling";
      return `<li>[${h.interval[0]}, ${h.interval[1]}]: ${esc(ve)}</li>`;
    })
    .join("");
  return `<ul>${rows}</ul>`;
}

export function bannerHtml(kind: "error" | "info", text: string): string {
  return `<div class="banner ${kind}">${esc(text)}</div>`;
}
