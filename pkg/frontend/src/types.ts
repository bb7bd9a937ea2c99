/** Wire types mirrored from the planning service. */

export interface RectSpec {
  xmin: number;
  xmax: number;
  ymin: number;
  ymax: number;
}

export interface SceneSummary {
  name: string;
  bounds: RectSpec;
  reachable: { rects: RectSpec[]; height_range: [number, number] };
  landmarks: { xy: [number, number]; weight: number }[];
  solids: { xy: [number, number]; size_xy: [number, number] }[];
  routes: { kind: string; polyline: [number, number][] }[];
  georef: { lat0: number; lon0: number; alt0: number; heading_deg: number };
}

export interface ShootingParams {
  viewfinder: { location: [number, number, number]; yaw_deg: number; pitch_deg: number };
  path: { mode: string; amplitude: number; pivot?: [number, number] };
  timewarp: { start: string; end: string; interval_s: number };
}

export interface QualityReport {
  q_i: number;
  q_v: number;
  q_t: number;
  total: number;
  [extra: string]: unknown;
}

export interface JobInfo {
  id: string;
  kind: string;
  state: "queued" | "running" | "done" | "failed";
  progress: number;
  result?: Record<string, unknown>;
  error?: string;
}

export interface PreviewResult {
  blob: Blob | null;
  meanLuminance: number;
  timeIso: string;
}
