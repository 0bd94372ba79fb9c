import { describe, expect, it, vi } from "vitest";

import { ApiClient, ApiFailure } from "../src/api.js";

function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "content-type": "application/json" },
  });
}

describe("ApiClient", () => {
  it("uploads CSV with the dataset name in the query", async () => {
    const fetchImpl = vi.fn(async () =>
      jsonResponse({ dataset_id: "abc", import_report: { rows_accepted: 1 } }, 201),
    );
    const client = new ApiClient("/v1", fetchImpl);
    const result = await client.uploadDataset("sample,La\n", "my data.csv");
    expect(result.dataset_id).toBe("abc");
    const [url, init] = fetchImpl.mock.calls[0];
    expect(url).toBe("/v1/datasets?name=my%20data.csv");
    expect(init?.method).toBe("POST");
  });

  it("builds viz urls with only the provided params", async () => {
    const fetchImpl = vi.fn(async () => jsonResponse({ kind: "spider" }));
    const client = new ApiClient("/v1", fetchImpl);
    await client.vizPayload("abc", "spider", { colorBy: "mineralogy" });
    expect(fetchImpl.mock.calls[0][0]).toBe(
      "/v1/datasets/abc/viz/spider?color_by=mineralogy&format=json",
    );
    await client.vizPayload("abc", "scatter2d", { x: 0, y: 2, colorBy: null });
    expect(fetchImpl.mock.calls[1][0]).toBe(
      "/v1/datasets/abc/viz/scatter2d?x=0&y=2&format=json",
    );
  });

  it("maps error bodies to ApiFailure with the machine code", async () => {
    const fetchImpl = vi.fn(async () =>
      jsonResponse({ code: "TooFewPoints", message: "3 points", detail: [] }, 400),
    );
    const client = new ApiClient("/v1", fetchImpl);
    const err = await client
      .inverse({ La: 1 }, 4)
      .then(() => null)
      .catch((e) => e as ApiFailure);
    expect(err).toBeInstanceOf(ApiFailure);
    expect(err?.code).toBe("TooFewPoints");
  });

  it("posts sandbox bodies in the documented shape", async () => {
    const fetchImpl = vi.fn(async () =>
      jsonResponse({ standard: "chondrite", lambdas: [0, 0, 0, 0], pattern: {} }),
    );
    const client = new ApiClient("/v1", fetchImpl);
    await client.forward([1, 2, 3, 4], "MORB");
    const [url, init] = fetchImpl.mock.calls[0];
    expect(url).toBe("/v1/sandbox/forward");
    expect(JSON.parse(String(init?.body))).toEqual({
      lambdas: [1, 2, 3, 4],
      standard: "MORB",
    });
  });

  it("fetches svg as text", async () => {
    const fetchImpl = vi.fn(
      async () => new Response("<svg></svg>", { status: 200 }),
    );
    const client = new ApiClient("/v1", fetchImpl);
    const svg = await client.vizSvg("abc", "density_contour", { marginal: "rug" });
    expect(svg).toBe("<svg></svg>");
    expect(fetchImpl.mock.calls[0][0]).toContain("marginal=rug");
    expect(fetchImpl.mock.calls[0][0]).toContain("format=svg");
  });
});
