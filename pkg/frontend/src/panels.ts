/** Control panels: orientation sliders, movement mode, time window with
 * live preview scrubbing, optimize/export actions and the score card. */

import { ApiClient } from "./api.js";
import { rateLimit } from "./debounce.js";
import { timeAtProgress } from "./geometry.js";
import type { ParamsStore } from "./state.js";
import type { SceneSummary } from "./types.js";
import { deriveView } from "./viewmodel.js";

const MODES = ["static", "pan", "truck", "orbit"] as const;
const PREVIEW_MIN_INTERVAL_MS = 250; // at most 4 requests per second

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) {
    throw new Error(`missing element #${id}`);
  }
  return node as T;
}

export class ControlPanels {
  private preview = rateLimit(
    (timeIso: string) => void this.loadPreview(timeIso),
    PREVIEW_MIN_INTERVAL_MS,
  );

  constructor(
    private api: ApiClient,
    private store: ParamsStore,
    private scene: SceneSummary,
  ) {
    store.subscribe(() => this.render());
    this.bind();
    this.render();
  }

  private bind(): void {
    el<HTMLInputElement>("height").addEventListener("change", (e) => {
      const v = Number((e.target as HTMLInputElement).value);
      void this.store.commitEdit((d) => {
        d.viewfinder.location[2] = v;
      });
    });
    el<HTMLInputElement>("yaw").addEventListener("change", (e) => {
      const v = Number((e.target as HTMLInputElement).value);
      void this.store.commitEdit((d) => {
        d.viewfinder.yaw_deg = v;
      });
    });
    el<HTMLInputElement>("pitch").addEventListener("change", (e) => {
      const v = Number((e.target as HTMLInputElement).value);
      void this.store.commitEdit((d) => {
        d.viewfinder.pitch_deg = v;
      });
    });

    for (const mode of MODES) {
      el<HTMLInputElement>(`mode-${mode}`).addEventListener("change", () => {
        void this.store.commitEdit((d) => {
          d.path.mode = mode;
          if (mode === "static") {
            d.path.amplitude = 0;
            delete d.path.pivot;
          } else {
            if (d.path.amplitude <= 0) {
              d.path.amplitude = mode === "truck" ? 5 : 25;
            }
            if (mode === "orbit") {
              d.path.pivot = this.scene.landmarks[0]?.xy;
            } else {
              delete d.path.pivot;
            }
          }
        });
      });
    }
    el<HTMLInputElement>("amplitude").addEventListener("change", (e) => {
      const v = Number((e.target as HTMLInputElement).value);
      void this.store.commitEdit((d) => {
        if (d.path.mode !== "static") {
          d.path.amplitude = v;
        }
      });
    });

    for (const field of ["start", "end"] as const) {
      el<HTMLInputElement>(`tw-${field}`).addEventListener("change", (e) => {
        const v = (e.target as HTMLInputElement).value;
        void this.store.commitEdit((d) => {
          d.timewarp[field] = v.endsWith("Z") ? v : `${v}:00Z`;
        });
      });
    }
    el<HTMLInputElement>("interval").addEventListener("change", (e) => {
      const v = Number((e.target as HTMLInputElement).value);
      void this.store.commitEdit((d) => {
        d.timewarp.interval_s = v;
      });
    });

    el<HTMLInputElement>("scrub").addEventListener("input", (e) => {
      const u = Number((e.target as HTMLInputElement).value) / 1000;
      const p = this.store.params;
      if (p) {
        const t = timeAtProgress(p.timewarp.start, p.timewarp.end, u);
        el<HTMLSpanElement>("scrub-time").textContent = t;
        this.preview.call(t);
      }
    });

    el<HTMLButtonElement>("btn-optimize").addEventListener("click", () => {
      const stages = (["i", "v", "t"] as const)
        .filter((s) => el<HTMLInputElement>(`stage-${s}`).checked)
        .join("");
      if (stages) {
        void this.store.optimize(stages);
      }
    });

    el<HTMLButtonElement>("btn-timelapse").addEventListener("click", () => {
      void this.runTimelapse();
    });

    el<HTMLButtonElement>("btn-export").addEventListener("click", () => {
      void this.exportPlan();
    });

    el<HTMLButtonElement>("btn-score").addEventListener("click", () => {
      void this.store.refreshScore();
    });
  }

  private async loadPreview(timeIso: string): Promise<void> {
    try {
      const res = await this.api.preview(timeIso, 320, 180);
      if (res.blob) {
        const img = el<HTMLImageElement>("preview-img");
        const url = URL.createObjectURL(res.blob);
        img.onload = () => URL.revokeObjectURL(url);
        img.src = url;
      }
      this.store.recordLuminance(res.meanLuminance);
      el<HTMLSpanElement>("luminance").textContent =
        res.meanLuminance.toFixed(3);
    } catch {
      /* superseded or failed preview; the next scrub retries */
    }
  }

  private async runTimelapse(): Promise<void> {
    const { pollJob } = await import("./api.js");
    const id = await this.api.startTimelapse({ width: 640, height: 360 });
    const job = await pollJob(this.api, id, (j) => {
      this.store.job = j;
      this.render();
    });
    el<HTMLSpanElement>("job-note").textContent =
      job.state === "done"
        ? `time-lapse written to ${String(job.result?.["directory"])}`
        : `failed: ${job.error}`;
  }

  private async exportPlan(): Promise<void> {
    const read = (id: string) => {
      const v = el<HTMLInputElement>(id).value.trim();
      return v === "" ? undefined : Number(v);
    };
    const plan = await this.api.exportRobotPlan({
      lat0: read("geo-lat"),
      lon0: read("geo-lon"),
      alt0: read("geo-alt"),
      heading: read("geo-heading"),
    });
    const blob = new Blob([JSON.stringify(plan, null, 2)], {
      type: "application/json",
    });
    const a = document.createElement("a");
    a.href = URL.createObjectURL(blob);
    a.download = "robot_plan.json";
    a.click();
    URL.revokeObjectURL(a.href);
  }

  render(): void {
    const p = this.store.params;
    const view = deriveView(p, this.store.score, this.store.job,
      this.store.lastError);

    const err = el<HTMLDivElement>("error-bar");
    err.textContent = view.errorText ?? "";
    err.style.display = view.errorText ? "block" : "none";

    const bar = el<HTMLProgressElement>("job-progress");
    bar.style.display = view.progressVisible ? "block" : "none";
    bar.value = view.progressValue;

    if (view.scoreText) {
      el<HTMLSpanElement>("score-qi").textContent = view.scoreText.qi;
      el<HTMLSpanElement>("score-qv").textContent = view.scoreText.qv;
      el<HTMLSpanElement>("score-qt").textContent = view.scoreText.qt;
      el<HTMLSpanElement>("score-total").textContent = view.scoreText.total;
    }
    if (!p) {
      return;
    }

    this.setValue("height", p.viewfinder.location[2]);
    this.setValue("yaw", p.viewfinder.yaw_deg);
    this.setValue("pitch", p.viewfinder.pitch_deg);
    el<HTMLSpanElement>("pos-readout").textContent = view.posText;

    for (const mode of MODES) {
      el<HTMLInputElement>(`mode-${mode}`).checked = p.path.mode === mode;
    }
    el<HTMLInputElement>("amplitude").value = String(p.path.amplitude);
    el<HTMLDivElement>("amplitude-row").style.display =
      view.amplitudeVisible ? "flex" : "none";

    this.setValue("tw-start", p.timewarp.start.slice(0, 16));
    this.setValue("tw-end", p.timewarp.end.slice(0, 16));
    this.setValue("interval", p.timewarp.interval_s);
    el<HTMLSpanElement>("duration-readout").textContent = view.durationText;
  }

  private setValue(id: string, v: number | string): void {
    const node = el<HTMLInputElement>(id);
    if (document.activeElement !== node) {
      node.value = String(v);
    }
  }
}
