/** JSON shapes served by the session API (schema version 1). */

export interface CurveData {
  index: number;
  t: number[];
  re: number[];
  im: number[];
  degenerate: boolean;
}

export interface CrossingMarker {
  kind: "crossing";
  i: number;
  j: number;
  t: number;
  re: number;
  im: number;
}

export interface NearMarker {
  kind: "near";
  i: number;
  j: number;
  t: number;
  d: number;
  bucket: number;
  re: number;
  im: number;
}

export interface Suggestion {
  i: number;
  j: number;
  d: number;
  t: number;
  score: number;
}

export interface BlocksInfo {
  sizes: number[];
  labels: number[];
  members: number[][];
}

export interface HistoryEntry {
  interval: [number, number];
  ve: number[] | null;
  touch: number[][];
}

export interface PlotData {
  flow: { name: string; seed: number | null };
  structure: "hermitean" | "general";
  interval: [number, number];
  curves: CurveData[];
  crossings: CrossingMarker[];
  near_approaches: NearMarker[];
  suggestions: Suggestion[];
  touch: number[][];
  ve: number[] | null;
  blocks: BlocksInfo | null;
  history: HistoryEntry[];
}

export interface TouchReply {
  ve: number[];
  blocks: { sizes: number[] };
  touch: number[][];
}

export interface TouchConflict {
  error: string;
  row: number;
  pair: [number, number];
}

export interface StatusReply {
  phase: string;
  fraction: number;
}
