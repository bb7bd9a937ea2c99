import { describe, expect, it } from "vitest";

import { ApiClient, ApiError } from "../src/api.js";

function previewResponse(luma: string): Response {
  return new Response(new Blob([new Uint8Array([1, 2, 3])]), {
    status: 200,
    headers: { "content-type": "image/png", "X-Mean-Luminance": luma },
  });
}

describe("ApiClient preview", () => {
  it("cancels the in-flight request when a newer one starts", async () => {
    const aborted: boolean[] = [];
    let call = 0;
    const fetchFn = ((url: RequestInfo | URL, init?: RequestInit) => {
      const idx = call++;
      const signal = init?.signal ?? null;
      return new Promise<Response>((resolve, reject) => {
        const t = setTimeout(() => resolve(previewResponse(`0.${idx + 1}`)), 20);
        signal?.addEventListener("abort", () => {
          clearTimeout(t);
          aborted.push(true);
          reject(new DOMException("aborted", "AbortError"));
        });
      });
    }) as typeof fetch;

    const api = new ApiClient("", fetchFn);
    const first = api.preview("2024-06-21T12:00:00Z");
    const second = api.preview("2024-06-21T13:00:00Z");
    await expect(first).rejects.toThrow();
    const res = await second;
    expect(aborted).toEqual([true]);
    expect(res.meanLuminance).toBeCloseTo(0.2, 9);
  });

  it("surfaces the server's field-level detail on 400", async () => {
    const fetchFn = (async () =>
      new Response(JSON.stringify({ detail: "viewfinder.location: nope" }), {
        status: 400,
        headers: { "content-type": "application/json" },
      })) as typeof fetch;
    const api = new ApiClient("", fetchFn);
    await expect(
      api.putParams({
        viewfinder: { location: [0, 0, 0], yaw_deg: 0, pitch_deg: 0 },
        path: { mode: "static", amplitude: 0 },
        timewarp: { start: "", end: "", interval_s: 1 },
      }),
    ).rejects.toThrowError(ApiError);
  });
});
