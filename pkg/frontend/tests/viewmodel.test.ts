import { describe, expect, it } from "vitest";

import type { ShootingParams } from "../src/types.js";
import { deriveView } from "../src/viewmodel.js";

const PARAMS: ShootingParams = {
  viewfinder: { location: [12.34, -5.6, 8], yaw_deg: 45, pitch_deg: 0 },
  path: { mode: "static", amplitude: 0 },
  timewarp: {
    start: "2024-06-21T06:00:00Z",
    end: "2024-06-21T08:00:00Z",
    interval_s: 30,
  },
};

describe("deriveView", () => {
  it("hides the amplitude slider for static mode", () => {
    expect(deriveView(PARAMS, null, null, null).amplitudeVisible).toBe(false);
    const pan = { ...PARAMS, path: { mode: "pan", amplitude: 25 } };
    expect(deriveView(pan, null, null, null).amplitudeVisible).toBe(true);
  });

  it("duration readout mirrors the server's frame-count formula", () => {
    const v = deriveView(PARAMS, null, null, null);
    // floor(7200/30)+1 = 241 frames; 241/24 s playback
    expect(v.durationText).toBe(`241 frames -> ${(241 / 24).toFixed(1)} s at 24 fps`);
  });

  it("formats the score card without recomputing anything", () => {
    const v = deriveView(
      PARAMS,
      { q_i: 0.5, q_v: 1, q_t: 0.25, total: 0.583333 },
      null,
      null,
    );
    expect(v.scoreText).toEqual({
      qi: "0.500",
      qv: "1.000",
      qt: "0.250",
      total: "0.583",
    });
  });

  it("shows progress only while a job is active", () => {
    const running = deriveView(PARAMS, null, {
      id: "job-1",
      kind: "optimize",
      state: "running",
      progress: 0.4,
    }, null);
    expect(running.progressVisible).toBe(true);
    expect(running.progressValue).toBeCloseTo(0.4, 9);
    const done = deriveView(PARAMS, null, {
      id: "job-1",
      kind: "optimize",
      state: "done",
      progress: 1,
    }, null);
    expect(done.progressVisible).toBe(false);
  });

  it("surfaces errors verbatim", () => {
    const v = deriveView(PARAMS, null, null,
      "viewfinder.location: outside the reachable region");
    expect(v.errorText).toContain("location");
  });
});
