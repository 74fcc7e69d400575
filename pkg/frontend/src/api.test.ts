import { afterEach, describe, expect, it, vi } from "vitest";

import { ApiClient, TouchRejected } from "./api.js";

function jsonResponse(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

afterEach(() => vi.unstubAllGlobals());

describe("ApiClient", () => {
  it("fetches plot data from /curves", async () => {
    const fetchMock = vi.fn(async () => jsonResponse(200, { curves: [] }));
    vi.stubGlobal("fetch", fetchMock);
    const api = new ApiClient("http://x");
    const pd = await api.curves();
    expect(fetchMock).toHaveBeenCalledWith("http://x/curves");
    expect(pd).toEqual({ curves: [] });
  });

  it("posts the full touch list and returns the new labeling", async () => {
    const fetchMock = vi.fn(async (_url: string, init?: RequestInit) => {
      expect(JSON.parse(String(init?.body))).toEqual({ pairs: [[9, 10]] });
      return jsonResponse(200, { ve: [1, -1, 2, 2, -2], blocks: { sizes: [1, 2, 2] }, touch: [[9, 10]] });
    });
    vi.stubGlobal("fetch", fetchMock);
    const reply = await new ApiClient().setTouch([[9, 10]]);
    expect(reply.ve).toEqual([1, -1, 2, 2, -2]);
  });

  it("turns a 409 into TouchRejected with the offending row", async () => {
    vi.stubGlobal("fetch", vi.fn(async () =>
      jsonResponse(409, { error: "pair both crosses and almost-touches", row: 2, pair: [1, 5] })));
    const err = await new ApiClient().setTouch([[3, 4], [1, 5]]).catch((e) => e);
    expect(err).toBeInstanceOf(TouchRejected);
    expect(err.row).toBe(2);
    expect(err.pair).toEqual([1, 5]);
  });

  it("propagates extend rejections with the server message", async () => {
    vi.stubGlobal("fetch", vi.fn(async () =>
      jsonResponse(400, { error: "extended interval must contain the current one" })));
    await expect(new ApiClient().extend(0, 0.5)).rejects.toThrow(/must contain/);
  });
});
