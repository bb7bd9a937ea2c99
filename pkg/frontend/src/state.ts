/** Client-side state: an editable mirror of the server's parameters.
 *
 * The mirror commits only after a successful PUT; a rejected PUT restores
 * the last server-accepted value, so widgets snap back instead of drifting
 * from the single source of truth.
 */

import { ApiClient, ApiError, pollJob } from "./api.js";
import type { JobInfo, QualityReport, ShootingParams } from "./types.js";

export type Listener = () => void;

function deepCopy<T>(v: T): T {
  return JSON.parse(JSON.stringify(v)) as T;
}

export class ParamsStore {
  private accepted: ShootingParams | null = null;
  private listeners = new Set<Listener>();
  lastError: string | null = null;
  score: QualityReport | null = null;
  job: JobInfo | null = null;
  lastLuminance: number | null = null;

  constructor(private api: ApiClient) {}

  get params(): ShootingParams | null {
    return this.accepted ? deepCopy(this.accepted) : null;
  }

  subscribe(fn: Listener): () => void {
    this.listeners.add(fn);
    return () => this.listeners.delete(fn);
  }

  private notify(): void {
    for (const fn of this.listeners) {
      fn();
    }
  }

  async refresh(): Promise<void> {
    this.accepted = await this.api.getParams();
    this.notify();
  }

  /**
   * Try to commit an edited parameter set. Resolves true when the server
   * accepted it; false restores the previous state (and notify fires so
   * the UI re-renders from the accepted values).
   */
  async commit(next: ShootingParams): Promise<boolean> {
    try {
      this.accepted = await this.api.putParams(next);
      this.lastError = null;
      this.notify();
      return true;
    } catch (err) {
      this.lastError = err instanceof ApiError ? err.detail : String(err);
      this.notify(); // rollback: accepted state unchanged
      return false;
    }
  }

  /** Convenience: commit a single-field edit produced by a widget. */
  async commitEdit(edit: (draft: ShootingParams) => void): Promise<boolean> {
    if (!this.accepted) {
      return false;
    }
    const draft = deepCopy(this.accepted);
    edit(draft);
    return this.commit(draft);
  }

  async refreshScore(): Promise<QualityReport> {
    this.score = await this.api.getScore();
    this.notify();
    return this.score;
  }

  /** Run an optimize job, then repopulate the mirror from the server. */
  async optimize(stages: string, seed = 0): Promise<JobInfo> {
    const id = await this.api.startOptimize(stages, seed);
    const job = await pollJob(this.api, id, (j) => {
      this.job = j;
      this.notify();
    });
    if (job.state === "done") {
      await this.refresh();
      await this.refreshScore();
    } else {
      this.lastError = job.error ?? "optimize failed";
      this.notify();
    }
    return job;
  }

  recordLuminance(value: number): void {
    this.lastLuminance = value;
    this.notify();
  }
}
