/** Viewer state and its pure transitions.  The rendered view is a function
 * of (latest server plot data, local selection); nothing here computes
 * labels or crossings. */

import type { PlotData } from "./types.js";

export type Projection = "re-t" | "im-t" | "re-im";

export interface Banner {
  kind: "error" | "info";
  text: string;
  /** 1-based touch row to highlight when the server rejected it */
  badRow?: number;
}

export interface ViewState {
  plot: PlotData | null;
  mode: Projection;
  selected: number[];        // up to two curve indices
  banner: Banner | null;
  busy: boolean;
}

export function initialState(): ViewState {
  return { plot: null, mode: "re-t", selected: [], banner: null, busy: false };
}

export function projectionsFor(plot: PlotData | null): Projection[] {
  if (plot && plot.structure === "general") return ["re-t", "im-t", "re-im"];
  return ["re-t"];
}

export function withPlot(s: ViewState, plot: PlotData): ViewState {
  const mode = projectionsFor(plot).includes(s.mode) ? s.mode : "re-t";
  const selected = s.selected.filter((i) => i >= 1 && i <= plot.curves.length);
  return { ...s, plot, mode, selected };
}

export function setMode(s: ViewState, mode: Projection): ViewState {
  return projectionsFor(s.plot).includes(mode) ? { ...s, mode } : s;
}

/** Click on a curve: build up a pair, clicking a third curve restarts the
 * selection, clicking a selected curve deselects it. */
export function toggleCurve(s: ViewState, index: number): ViewState {
  if (!s.plot || index < 1 || index > s.plot.curves.length) return s;
  let selected: number[];
  if (s.selected.includes(index)) {
    selected = s.selected.filter((i) => i !== index);
  } else if (s.selected.length >= 2) {
    selected = [index];
  } else {
    selected = [...s.selected, index];
  }
  return { ...s, selected };
}

export function selectedPair(s: ViewState): [number, number] | null {
  if (s.selected.length !== 2) return null;
  const [a, b] = [...s.selected].sort((x, y) => x - y);
  return [a, b];
}

export function withBanner(s: ViewState, banner: Banner | null): ViewState {
  return { ...s, banner };
}

export function withBusy(s: ViewState, busy: boolean): ViewState {
  return { ...s, busy };
}

/** The full touch list to POST when marking the selected pair. */
export function touchListWith(plot: PlotData, pair: [number, number]): number[][] {
  const rows = plot.touch.map((r) => [...r]);
  if (!rows.some(([a, b]) => a === pair[0] && b === pair[1])) {
    rows.push([pair[0], pair[1]]);
  }
  return rows;
}

/** The touch list with one row removed -- undo is resending this. */
export function touchListWithout(plot: PlotData, row: number): number[][] {
  return plot.touch.filter((_, k) => k !== row - 1).map((r) => [...r]);
}
