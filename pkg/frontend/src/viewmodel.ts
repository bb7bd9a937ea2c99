/** Pure derivation of what the control panels display. Keeping this free
 * of DOM lets the display rules be tested directly. */

import { frameCount, outputDurationS } from "./geometry.js";
import type { JobInfo, QualityReport, ShootingParams } from "./types.js";

export interface PanelView {
  posText: string;
  amplitudeVisible: boolean;
  durationText: string;
  scoreText: { qi: string; qv: string; qt: string; total: string } | null;
  progressVisible: boolean;
  progressValue: number;
  errorText: string | null;
}

export function deriveView(
  params: ShootingParams | null,
  score: QualityReport | null,
  job: JobInfo | null,
  error: string | null,
  fps = 24,
): PanelView {
  const running =
    job !== null && (job.state === "running" || job.state === "queued");
  if (!params) {
    return {
      posText: "",
      amplitudeVisible: false,
      durationText: "",
      scoreText: null,
      progressVisible: running,
      progressValue: job?.progress ?? 0,
      errorText: error,
    };
  }
  const [x, y, z] = params.viewfinder.location;
  const frames = frameCount(
    params.timewarp.start,
    params.timewarp.end,
    params.timewarp.interval_s,
  );
  const secs = outputDurationS(
    params.timewarp.start,
    params.timewarp.end,
    params.timewarp.interval_s,
    fps,
  );
  return {
    posText: `x ${x.toFixed(1)}  y ${y.toFixed(1)}  z ${z.toFixed(1)}`,
    amplitudeVisible: params.path.mode !== "static",
    durationText: `${frames} frames -> ${secs.toFixed(1)} s at ${fps} fps`,
    scoreText: score
      ? {
          qi: score.q_i.toFixed(3),
          qv: score.q_v.toFixed(3),
          qt: score.q_t.toFixed(3),
          total: score.total.toFixed(3),
        }
      : null,
    progressVisible: running,
    progressValue: job?.progress ?? 0,
    errorText: error,
  };
}
