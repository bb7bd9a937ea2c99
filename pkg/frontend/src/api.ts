/** Thin typed client for the planning service. Every number the UI shows
 * comes back from these calls; the client adds no math of its own. */

import type {
  JobInfo,
  PreviewResult,
  QualityReport,
  SceneSummary,
  ShootingParams,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
  }
}

async function raiseForStatus(res: Response): Promise<void> {
  if (res.ok) {
    return;
  }
  let detail = res.statusText;
  try {
    const body = (await res.json()) as { detail?: string };
    if (body.detail) {
      detail = body.detail;
    }
  } catch {
    /* non-JSON error body */
  }
  throw new ApiError(res.status, detail);
}

export class ApiClient {
  private previewAbort: AbortController | null = null;

  constructor(
    private base: string = "",
    private fetchFn: typeof fetch = fetch.bind(globalThis),
  ) {}

  private async getJson<T>(path: string): Promise<T> {
    const res = await this.fetchFn(this.base + path);
    await raiseForStatus(res);
    return (await res.json()) as T;
  }

  getScene(): Promise<SceneSummary> {
    return this.getJson("/api/scene");
  }

  getParams(): Promise<ShootingParams> {
    return this.getJson("/api/params");
  }

  async putParams(params: ShootingParams): Promise<ShootingParams> {
    const res = await this.fetchFn(this.base + "/api/params", {
      method: "PUT",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(params),
    });
    await raiseForStatus(res);
    return (await res.json()) as ShootingParams;
  }

  /** Fetch a preview frame; a newer request cancels the one in flight. */
  async preview(timeIso: string, w = 320, h = 180): Promise<PreviewResult> {
    if (this.previewAbort) {
      this.previewAbort.abort();
    }
    const ctl = new AbortController();
    this.previewAbort = ctl;
    const q = new URLSearchParams({ time: timeIso, w: String(w), h: String(h) });
    const res = await this.fetchFn(this.base + `/api/preview?${q}`, {
      signal: ctl.signal,
    });
    await raiseForStatus(res);
    const meanLuminance = Number(res.headers.get("X-Mean-Luminance") ?? "NaN");
    const blob = await res.blob();
    if (this.previewAbort === ctl) {
      this.previewAbort = null;
    }
    return { blob, meanLuminance, timeIso };
  }

  async startOptimize(stages: string, seed = 0): Promise<string> {
    const q = new URLSearchParams({ stages, seed: String(seed) });
    const res = await this.fetchFn(this.base + `/api/optimize?${q}`, {
      method: "POST",
    });
    await raiseForStatus(res);
    return ((await res.json()) as { job_id: string }).job_id;
  }

  async startTimelapse(body: Record<string, unknown>): Promise<string> {
    const res = await this.fetchFn(this.base + "/api/timelapse", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
    await raiseForStatus(res);
    return ((await res.json()) as { job_id: string }).job_id;
  }

  getJob(id: string): Promise<JobInfo> {
    return this.getJson(`/api/jobs/${id}`);
  }

  getScore(): Promise<QualityReport> {
    return this.getJson("/api/score");
  }

  async exportRobotPlan(georef?: {
    lat0?: number;
    lon0?: number;
    alt0?: number;
    heading?: number;
  }): Promise<Record<string, unknown>> {
    const q = new URLSearchParams();
    for (const [k, v] of Object.entries(georef ?? {})) {
      if (v !== undefined && Number.isFinite(v)) {
        q.set(k, String(v));
      }
    }
    const suffix = q.size > 0 ? `?${q}` : "";
    return this.getJson(`/api/export/robotplan${suffix}`);
  }
}

/** Poll a job until it settles; reports progress along the way. */
export async function pollJob(
  api: ApiClient,
  jobId: string,
  onProgress?: (j: JobInfo) => void,
  intervalMs = 300,
  sleep: (ms: number) => Promise<void> = (ms) =>
    new Promise((r) => setTimeout(r, ms)),
): Promise<JobInfo> {
  for (;;) {
    const job = await api.getJob(jobId);
    onProgress?.(job);
    if (job.state === "done" || job.state === "failed") {
      return job;
    }
    await sleep(intervalMs);
  }
}
