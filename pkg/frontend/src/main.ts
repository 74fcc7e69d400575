/** Viewer wiring: fetch plot data, render the SVG chart and panels, and
 * drive the mark-touch / extend-interval loops through the server. */

import { ApiClient, TouchRejected } from "./api.js";
import {
  DEFAULT_BOX,
  curveColor,
  curvePath,
  endLabels,
  makeScale,
  markerPositions,
  ticks,
} from "./chart.js";
import {
  ViewState,
  initialState,
  projectionsFor,
  selectedPair,
  setMode,
  toggleCurve,
  touchListWith,
  touchListWithout,
  withBanner,
  withBusy,
  withPlot,
} from "./state.js";
import { bannerHtml, blocksHtml, historyHtml, suggestionsHtml, touchHtml, veHtml } from "./panels.js";
import type { Projection } from "./state.js";

const api = new ApiClient("");
let state: ViewState = initialState();

function $(id: string): HTMLElement {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el;
}

function update(next: ViewState): void {
  state = next;
  render();
}

async function refresh(): Promise<void> {
  const plot = await api.curves();
  update(withPlot(state, plot));
}

function renderChart(): string {
  const plot = state.plot;
  if (!plot) return "";
  const box = DEFAULT_BOX;
  const scale = makeScale(plot, state.mode);
  const parts: string[] = [];
  parts.push(`<svg id="chart" viewBox="0 0 ${box.width} ${box.height}" xmlns="http://www.w3.org/2000/svg">`);
  // axes
  for (const tx of ticks(scale.x0, scale.x1)) {
    const [px] = scale.toPx(tx, scale.y0, box);
    parts.push(`<line x1="${px}" y1="${box.margin.t}" x2="${px}" y2="${box.height - box.margin.b}" class="grid"/>`);
    parts.push(`<text x="${px}" y="${box.height - box.margin.b + 16}" class="tick" text-anchor="middle">${tx}</text>`);
  }
  for (const ty of ticks(scale.y0, scale.y1)) {
    const [, py] = scale.toPx(scale.x0, ty, box);
    parts.push(`<line x1="${box.margin.l}" y1="${py}" x2="${box.width - box.margin.r}" y2="${py}" class="grid"/>`);
    parts.push(`<text x="${box.margin.l - 6}" y="${py + 4}" class="tick" text-anchor="end">${ty}</text>`);
  }
  // curves
  for (const c of plot.curves) {
    const sel = state.selected.includes(c.index);
    const cls = `curve${sel ? " selected" : ""}${c.degenerate ? " degenerate" : ""}`;
    parts.push(`<path d="${curvePath(c, state.mode, scale, box)}" class="${cls}" ` +
               `stroke="${curveColor(c.index)}" data-curve="${c.index}"/>`);
    for (const lab of endLabels(c, state.mode, scale, box)) {
      parts.push(`<text x="${lab.x}" y="${lab.y}" text-anchor="${lab.anchor}" ` +
                 `class="curve-label" fill="${curveColor(c.index)}">${lab.text}</text>`);
    }
  }
  // markers
  for (const m of markerPositions(plot, state.mode, scale, box)) {
    if (m.kind === "crossing") {
      parts.push(`<g class="marker crossing"><title>${m.title}</title>` +
                 `<path d="M${m.x - 4},${m.y - 4} L${m.x + 4},${m.y + 4} M${m.x - 4},${m.y + 4} L${m.x + 4},${m.y - 4}"/></g>`);
    } else {
      parts.push(`<g class="marker near"><title>${m.title}</title>` +
                 `<circle cx="${m.x}" cy="${m.y}" r="5"/></g>`);
    }
  }
  parts.push("</svg>");
  return parts.join("");
}

function render(): void {
  const plot = state.plot;
  $("chart-host").innerHTML = renderChart();
  const modes = projectionsFor(plot);
  $("modes").innerHTML = modes
    .map((m) => `<button class="mode${m === state.mode ? " active" : ""}" data-mode="${m}">${m}</button>`)
    .join("");
  (document.querySelector("#modes") as HTMLElement).style.display =
    modes.length > 1 ? "inline-block" : "none";

  if (plot) {
    $("flow-title").textContent =
      `${plot.flow.name}${plot.flow.seed != null ? ` (seed ${plot.flow.seed})` : ""}` +
      ` on [${plot.interval[0]}, ${plot.interval[1]}] - ${plot.structure}`;
    $("ve-panel").innerHTML = veHtml(plot.ve);
    $("blocks-panel").innerHTML = blocksHtml(plot.blocks);
    $("touch-panel").innerHTML = touchHtml(plot.touch, state.banner?.badRow);
    $("sugg-panel").innerHTML = suggestionsHtml(plot.suggestions);
    $("history-panel").innerHTML = historyHtml(plot.history);
  }
  const pair = selectedPair(state);
  $("pair-label").textContent = pair ? `(${pair[0]}, ${pair[1]})` : "none";
  ($("mark-btn") as HTMLButtonElement).disabled = !pair || state.busy;
  ($("extend-btn") as HTMLButtonElement).disabled = state.busy;
  $("banner-host").innerHTML = state.banner
    ? bannerHtml(state.banner.kind, state.banner.text)
    : "";
  $("busy").style.display = state.busy ? "inline" : "none";
}

async function postTouch(pairs: number[][]): Promise<void> {
  update(withBusy(withBanner(state, null), true));
  try {
    const reply = await api.setTouch(pairs);
    await refresh();
    update(withBusy(withBanner(state, {
      kind: "info",
      text: `labeling updated: ve = (${reply.ve.join(", ")}), sizes {${reply.blocks.sizes.join(", ")}}`,
    }), false));
  } catch (e) {
    if (e instanceof TouchRejected) {
      await refresh();
      update(withBusy(withBanner(state, {
        kind: "error",
        text: `touch row ${e.row} (${e.pair[0]}, ${e.pair[1]}) rejected: ${e.message}`,
        badRow: e.row,
      }), false));
    } else {
      update(withBusy(withBanner(state, { kind: "error", text: String(e) }), false));
    }
  }
}

async function runExtend(t0: number, tf: number): Promise<void> {
  update(withBusy(withBanner(state, null), true));
  const poll = window.setInterval(async () => {
    try {
      const st = await api.status();
      $("busy").textContent =
        st.phase === "idle" ? "working..." : `${st.phase} ${(st.fraction * 100).toFixed(0)}%`;
    } catch { /* server busy; keep last */ }
  }, 300);
  try {
    await api.extend(t0, tf);
    await refresh();
    update(withBusy(withBanner(state, { kind: "info", text: "interval extended" }), false));
  } catch (e) {
    update(withBusy(withBanner(state, { kind: "error", text: String(e) }), false));
  } finally {
    window.clearInterval(poll);
    $("busy").textContent = "working...";
  }
}

function wire(): void {
  $("chart-host").addEventListener("click", (ev) => {
    const target = ev.target as HTMLElement;
    const curve = target.getAttribute("data-curve");
    if (curve) update(toggleCurve(state, Number(curve)));
  });
  $("modes").addEventListener("click", (ev) => {
    const m = (ev.target as HTMLElement).getAttribute("data-mode");
    if (m) update(setMode(state, m as Projection));
  });
  $("mark-btn").addEventListener("click", () => {
    const pair = selectedPair(state);
    if (pair && state.plot) void postTouch(touchListWith(state.plot, pair));
  });
  $("touch-panel").addEventListener("click", (ev) => {
    const row = (ev.target as HTMLElement).getAttribute("data-row");
    if (row && state.plot && (ev.target as HTMLElement).classList.contains("undo")) {
      void postTouch(touchListWithout(state.plot, Number(row)));
    }
  });
  $("sugg-panel").addEventListener("click", (ev) => {
    const li = (ev.target as HTMLElement).closest(".sugg");
    if (li && state.plot) {
      const i = Number(li.getAttribute("data-i"));
      const j = Number(li.getAttribute("data-j"));
      update({ ...state, selected: [i, j] });
    }
  });
  $("extend-btn").addEventListener("click", () => {
    const t0 = Number(($("t0-input") as HTMLInputElement).value);
    const tf = Number(($("tf-input") as HTMLInputElement).value);
    if (!state.plot) return;
    const [c0, c1] = state.plot.interval;
    if (!(t0 <= c0 && tf >= c1)) {
      update(withBanner(state, {
        kind: "error",
        text: `extended interval must contain [${c0}, ${c1}]`,
      }));
      return;
    }
    void runExtend(t0, tf);
  });
}

wire();
void refresh().catch((e) =>
  update(withBanner(state, { kind: "error", text: `cannot reach session server: ${e}` })));
