import { afterEach, describe, expect, it, vi } from "vitest";

import { ApiClient, ApiError, buildSearchQuery } from "../src/api.js";

describe("buildSearchQuery", () => {
  it("encodes terms, facets, and pagination", () => {
    const url = buildSearchQuery("benzol ring", { difficulty: ["3", "1"], targetGroup: ["students"] }, 2, 25);
    expect(url).toBe(
      "/api/search?q=benzol+ring&facet.difficulty=1&facet.difficulty=3&facet.targetGroup=students&page=2&size=25",
    );
  });

  it("omits empty query text", () => {
    expect(buildSearchQuery("", {})).toBe("/api/search?page=0&size=10");
  });
});

function jsonResponse(payload: unknown, status = 200): Response {
  return new Response(JSON.stringify(payload), {
    status,
    headers: { "content-type": "application/json" },
  });
}

afterEach(() => {
  vi.unstubAllGlobals();
});

describe("event queue", () => {
  it("never starts an event before the previous one settled", async () => {
    const order: string[] = [];
    let release: (() => void) | null = null;
    const gate = new Promise<void>((resolve) => {
      release = resolve;
    });
    const fetchMock = vi.fn(async (_url: RequestInfo | URL, init?: RequestInit) => {
      const body = JSON.parse(String(init?.body ?? "{}")) as { score?: number };
      order.push(`start-${body.score}`);
      if (body.score === 0.1) await gate;
      order.push(`end-${body.score}`);
      return jsonResponse({ eventCount: 1 });
    });
    vi.stubGlobal("fetch", fetchMock);

    const api = new ApiClient("http://test");
    const first = api.postEvent("s", { kind: "quiz", unitId: "u", score: 0.1 });
    const second = api.postEvent("s", { kind: "quiz", unitId: "u", score: 0.2 });
    await new Promise((resolve) => setTimeout(resolve, 20));
    expect(order).toEqual(["start-0.1"]); // second not started yet
    release!();
    await Promise.all([first, second]);
    expect(order).toEqual(["start-0.1", "end-0.1", "start-0.2", "end-0.2"]);
  });

  it("retries a failed post once, then surfaces the error", async () => {
    let calls = 0;
    vi.stubGlobal(
      "fetch",
      vi.fn(async () => {
        calls += 1;
        throw new TypeError("network down");
      }),
    );
    const api = new ApiClient("http://test");
    await expect(api.postEvent("s", { kind: "reset" })).rejects.toThrow("network down");
    expect(calls).toBe(2);
  });

  it("does not retry a 4xx rejection", async () => {
    let calls = 0;
    vi.stubGlobal(
      "fetch",
      vi.fn(async () => {
        calls += 1;
        return jsonResponse({ code: "bad_event", message: "nope" }, 400);
      }),
    );
    const api = new ApiClient("http://test");
    await expect(api.postEvent("s", { kind: "reset" })).rejects.toBeInstanceOf(ApiError);
    expect(calls).toBe(1);
  });

  it("keeps accepting events after a failure", async () => {
    let calls = 0;
    vi.stubGlobal(
      "fetch",
      vi.fn(async () => {
        calls += 1;
        if (calls <= 2) throw new TypeError("offline");
        return jsonResponse({ eventCount: 7 });
      }),
    );
    const api = new ApiClient("http://test");
    await expect(api.postEvent("s", { kind: "reset" })).rejects.toThrow();
    await expect(api.postEvent("s", { kind: "reset" })).resolves.toEqual({ eventCount: 7 });
  });
});

describe("traffic recording", () => {
  it("records request and response for parity checks", async () => {
    vi.stubGlobal(
      "fetch",
      vi.fn(async () => jsonResponse({ total: 0, hits: [], facets: {} })),
    );
    const api = new ApiClient("http://test");
    await api.search("x", {});
    expect(api.traffic).toHaveLength(1);
    expect(api.traffic[0].method).toBe("GET");
    expect(api.traffic[0].status).toBe(200);
    expect(api.traffic[0].response).toEqual({ total: 0, hits: [], facets: {} });
  });
});
