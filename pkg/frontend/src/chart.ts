/** Pure chart geometry: scales, polyline paths, marker placement, colors.
 * Everything returns plain data / SVG path strings so it is testable
 * without a DOM. */

import type { CurveData, PlotData } from "./types.js";
import type { Projection } from "./state.js";

export interface Box {
  width: number;
  height: number;
  margin: { l: number; r: number; t: number; b: number };
}

export const DEFAULT_BOX: Box = {
  width: 860,
  height: 520,
  margin: { l: 54, r: 70, t: 16, b: 36 },
};

/** Deterministic curve color from its 1-based index. */
export function curveColor(index: number): string {
  const hue = ((index - 1) * 137.508) % 360;   // golden-angle spacing
  return `hsl(${hue.toFixed(1)}, 70%, 42%)`;
}

export function axisValues(c: CurveData, mode: Projection): { x: number[]; y: number[] } {
  switch (mode) {
    case "re-t":
      return { x: c.t, y: c.re };
    case "im-t":
      return { x: c.t, y: c.im };
    case "re-im":
      return { x: c.re, y: c.im };
  }
}

export interface Scale {
  x0: number;
  x1: number;
  y0: number;
  y1: number;
  toPx(x: number, y: number, box: Box): [number, number];
}

export function makeScale(plot: PlotData, mode: Projection): Scale {
  let x0 = Infinity, x1 = -Infinity, y0 = Infinity, y1 = -Infinity;
  for (const c of plot.curves) {
    const { x, y } = axisValues(c, mode);
    for (const v of x) { x0 = Math.min(x0, v); x1 = Math.max(x1, v); }
    for (const v of y) { y0 = Math.min(y0, v); y1 = Math.max(y1, v); }
  }
  if (!(x1 > x0)) { x1 = x0 + 1; }
  if (!(y1 > y0)) { y0 -= 1; y1 += 1; }
  const padY = 0.04 * (y1 - y0);
  y0 -= padY;
  y1 += padY;
  return {
    x0, x1, y0, y1,
    toPx(x: number, y: number, box: Box): [number, number] {
      const w = box.width - box.margin.l - box.margin.r;
      const h = box.height - box.margin.t - box.margin.b;
      const px = box.margin.l + ((x - x0) / (x1 - x0)) * w;
      const py = box.margin.t + (1 - (y - y0) / (y1 - y0)) * h;
      return [px, py];
    },
  };
}

export function curvePath(c: CurveData, mode: Projection, scale: Scale, box: Box): string {
  const { x, y } = axisValues(c, mode);
  const parts: string[] = [];
  for (let k = 0; k < x.length; k++) {
    const [px, py] = scale.toPx(x[k], y[k], box);
    parts.push(`${k === 0 ? "M" : "L"}${px.toFixed(2)},${py.toFixed(2)}`);
  }
  return parts.join(" ");
}

export interface EndLabel {
  text: string;
  x: number;
  y: number;
  anchor: "start" | "end";
}

/** Curve labels at both interval ends (only meaningful for t-axis modes). */
export function endLabels(c: CurveData, mode: Projection, scale: Scale, box: Box): EndLabel[] {
  const { x, y } = axisValues(c, mode);
  const last = x.length - 1;
  const [lx, ly] = scale.toPx(x[0], y[0], box);
  const [rx, ry] = scale.toPx(x[last], y[last], box);
  if (mode === "re-im") {
    return [{ text: String(c.index), x: rx + 4, y: ry, anchor: "start" }];
  }
  return [
    { text: String(c.index), x: lx - 4, y: ly, anchor: "end" },
    { text: String(c.index), x: rx + 4, y: ry, anchor: "start" },
  ];
}

export interface MarkerPx {
  kind: "crossing" | "near";
  i: number;
  j: number;
  x: number;
  y: number;
  title: string;
}

export function markerPositions(plot: PlotData, mode: Projection, scale: Scale, box: Box): MarkerPx[] {
  const out: MarkerPx[] = [];
  const place = (t: number, re: number, im: number): [number, number] => {
    switch (mode) {
      case "re-t": return scale.toPx(t, re, box);
      case "im-t": return scale.toPx(t, im, box);
      case "re-im": return scale.toPx(re, im, box);
    }
  };
  for (const m of plot.crossings) {
    const [x, y] = place(m.t, m.re, m.im);
    out.push({ kind: "crossing", i: m.i, j: m.j, x, y,
               title: `curves ${m.i} and ${m.j} cross at t=${m.t.toFixed(4)}` });
  }
  for (const m of plot.near_approaches) {
    const [x, y] = place(m.t, m.re, m.im);
    out.push({ kind: "near", i: m.i, j: m.j, x, y,
               title: `curves ${m.i},${m.j} within ${m.d.toExponential(2)} at t=${m.t.toFixed(4)}` });
  }
  return out;
}

/** Tick positions: about n round-number ticks covering [a, b]. */
export function ticks(a: number, b: number, n = 6): number[] {
  const span = b - a;
  if (!(span > 0)) return [a];
  const rawStep = span / n;
  const mag = Math.pow(10, Math.floor(Math.log10(rawStep)));
  const step = [1, 2, 5, 10].map((m) => m * mag).find((s) => span / s <= n) ?? mag * 10;
  const first = Math.ceil(a / step) * step;
  const out: number[] = [];
  for (let v = first; v <= b + 1e-12; v += step) out.push(Number(v.toFixed(12)));
  return out;
}
