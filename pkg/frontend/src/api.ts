/** Typed client for the session HTTP API.  All mutation goes through the
 * server; the viewer never infers labels itself. */

import type { PlotData, StatusReply, TouchConflict, TouchReply } from "./types.js";

export class TouchRejected extends Error {
  row: number;
  pair: [number, number];
  constructor(conflict: TouchConflict) {
    super(conflict.error);
    this.row = conflict.row;
    this.pair = conflict.pair;
  }
}

export class ApiClient {
  constructor(private base: string = "") {}

  private async getJson<T>(route: string): Promise<T> {
    const resp = await fetch(this.base + route);
    if (!resp.ok) throw new Error(`GET ${route} failed: ${resp.status}`);
    return (await resp.json()) as T;
  }

  curves(): Promise<PlotData> {
    return this.getJson<PlotData>("/curves");
  }

  status(): Promise<StatusReply> {
    return this.getJson<StatusReply>("/status");
  }

  suggestions(): Promise<PlotData["suggestions"]> {
    return this.getJson<PlotData["suggestions"]>("/suggestions");
  }

  /** Replace the full touch list.  Resolves with the server's new labeling,
   * rejects with TouchRejected (carrying the offending row) on 409. */
  async setTouch(pairs: number[][]): Promise<TouchReply> {
    const resp = await fetch(this.base + "/touch", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ pairs }),
    });
    if (resp.status === 409) {
      throw new TouchRejected((await resp.json()) as TouchConflict);
    }
    if (!resp.ok) throw new Error(`POST /touch failed: ${resp.status}`);
    return (await resp.json()) as TouchReply;
  }

  async extend(t0: number, tf: number): Promise<void> {
    const resp = await fetch(this.base + "/extend", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ t0, tf }),
    });
    if (!resp.ok) {
      const body = (await resp.json()) as { error?: string };
      throw new Error(body.error ?? `POST /extend failed: ${resp.status}`);
    }
  }
}
