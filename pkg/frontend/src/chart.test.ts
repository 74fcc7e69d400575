import { describe, expect, it } from "vitest";

import {
  DEFAULT_BOX,
  axisValues,
  curveColor,
  curvePath,
  endLabels,
  makeScale,
  markerPositions,
  ticks,
} from "./chart.js";
import type { PlotData } from "./types.js";

function plotFixture(structure: "hermitean" | "general" = "hermitean"): PlotData {
  return {
    flow: { name: "toy", seed: 1 },
    structure,
    interval: [0, 1],
    curves: [
      { index: 1, t: [0, 0.5, 1], re: [1, 2, 3], im: [0, 0.5, 0], degenerate: false },
      { index: 2, t: [0, 0.5, 1], re: [3, 2, 1], im: [0, -0.5, 0], degenerate: false },
    ],
    crossings: [{ kind: "crossing", i: 1, j: 2, t: 0.5, re: 2, im: 0 }],
    near_approaches: [
      { kind: "near", i: 1, j: 2, t: 0.25, d: 0.004, bucket: 0.01, re: 1.5, im: 0.2 },
    ],
    suggestions: [],
    touch: [],
    ve: [1, -1],
    blocks: { sizes: [1, 1], labels: [1, -1], members: [[1], [2]] },
    history: [],
  };
}

describe("curveColor", () => {
  it("is deterministic in the curve index", () => {
    expect(curveColor(3)).toBe(curveColor(3));
    expect(curveColor(1)).not.toBe(curveColor(2));
  });
});

describe("axisValues / projections", () => {
  const c = plotFixture().curves[0];
  it("re-t projects real part over time", () => {
    expect(axisValues(c, "re-t")).toEqual({ x: c.t, y: c.re });
  });
  it("im-t projects imaginary part over time", () => {
    expect(axisValues(c, "im-t")).toEqual({ x: c.t, y: c.im });
  });
  it("re-im projects the complex plane", () => {
    expect(axisValues(c, "re-im")).toEqual({ x: c.re, y: c.im });
  });
});

describe("makeScale + curvePath", () => {
  const plot = plotFixture();
  const scale = makeScale(plot, "re-t");
  it("covers the data range", () => {
    expect(scale.x0).toBe(0);
    expect(scale.x1).toBe(1);
    expect(scale.y0).toBeLessThan(1);
    expect(scale.y1).toBeGreaterThan(3);
  });
  it("maps corners inside the box margins", () => {
    const [px, py] = scale.toPx(0, scale.y1, DEFAULT_BOX);
    expect(px).toBeCloseTo(DEFAULT_BOX.margin.l, 5);
    expect(py).toBeCloseTo(DEFAULT_BOX.margin.t, 5);
  });
  it("builds one segment per sample", () => {
    const d = curvePath(plot.curves[0], "re-t", scale, DEFAULT_BOX);
    expect(d.startsWith("M")).toBe(true);
    expect(d.split("L").length).toBe(3);
  });
});

describe("endLabels", () => {
  const plot = plotFixture();
  const scale = makeScale(plot, "re-t");
  it("labels both interval ends in time projections", () => {
    const labs = endLabels(plot.curves[0], "re-t", scale, DEFAULT_BOX);
    expect(labs).toHaveLength(2);
    expect(labs[0].anchor).toBe("end");
    expect(labs[1].anchor).toBe("start");
    expect(labs[0].text).toBe("1");
  });
  it("labels once in the complex-plane projection", () => {
    const labs = endLabels(plot.curves[0], "re-im", scale, DEFAULT_BOX);
    expect(labs).toHaveLength(1);
  });
});

describe("markerPositions", () => {
  const plot = plotFixture();
  it("places crossing and near markers", () => {
    const scale = makeScale(plot, "re-t");
    const ms = markerPositions(plot, "re-t", scale, DEFAULT_BOX);
    expect(ms.map((m) => m.kind).sort()).toEqual(["crossing", "near"]);
    const cross = ms.find((m) => m.kind === "crossing")!;
    const [ex, ey] = scale.toPx(0.5, 2, DEFAULT_BOX);
    expect(cross.x).toBeCloseTo(ex, 6);
    expect(cross.y).toBeCloseTo(ey, 6);
    expect(cross.title).toContain("1 and 2");
  });
});

describe("ticks", () => {
  it("produces round ticks covering the range", () => {
    const ts = ticks(0, 1, 6);
    expect(ts[0]).toBeGreaterThanOrEqual(0);
    expect(ts[ts.length - 1]).toBeLessThanOrEqual(1);
    expect(ts).toContain(0.4);
  });
  it("handles degenerate ranges", () => {
    expect(ticks(2, 2)).toEqual([2]);
  });
});
