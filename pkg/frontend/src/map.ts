/** Top-down scene map: draws the reachable region, solids, landmarks and
 * agent routes, and lets the user click-drag the camera position. Drags
 * outside the reachable region clamp to its nearest point. */

import { clampToRects } from "./geometry.js";
import type { ParamsStore } from "./state.js";
import type { SceneSummary } from "./types.js";

export class MapPanel {
  private ctx: CanvasRenderingContext2D;
  private dragging = false;
  private pending: { x: number; y: number } | null = null;

  constructor(
    private canvas: HTMLCanvasElement,
    private scene: SceneSummary,
    private store: ParamsStore,
  ) {
    const ctx = canvas.getContext("2d");
    if (!ctx) {
      throw new Error("canvas 2d context unavailable");
    }
    this.ctx = ctx;
    canvas.addEventListener("pointerdown", (e) => this.onDown(e));
    canvas.addEventListener("pointermove", (e) => this.onMove(e));
    canvas.addEventListener("pointerup", (e) => this.onUp(e));
    store.subscribe(() => this.draw());
    this.draw();
  }

  private toWorld(e: PointerEvent): { x: number; y: number } {
    const r = this.canvas.getBoundingClientRect();
    const b = this.scene.bounds;
    const px = ((e.clientX - r.left) / r.width) * this.canvas.width;
    const py = ((e.clientY - r.top) / r.height) * this.canvas.height;
    const x = b.xmin + (px / this.canvas.width) * (b.xmax - b.xmin);
    const y = b.ymax - (py / this.canvas.height) * (b.ymax - b.ymin);
    return { x, y };
  }

  private toPixel(x: number, y: number): { px: number; py: number } {
    const b = this.scene.bounds;
    return {
      px: ((x - b.xmin) / (b.xmax - b.xmin)) * this.canvas.width,
      py: ((b.ymax - y) / (b.ymax - b.ymin)) * this.canvas.height,
    };
  }

  private onDown(e: PointerEvent): void {
    this.dragging = true;
    this.canvas.setPointerCapture(e.pointerId);
    this.onMove(e);
  }

  private onMove(e: PointerEvent): void {
    if (!this.dragging) {
      return;
    }
    const w = this.toWorld(e);
    this.pending = clampToRects(w.x, w.y, this.scene.reachable.rects);
    this.draw();
  }

  private onUp(e: PointerEvent): void {
    if (!this.dragging) {
      return;
    }
    this.dragging = false;
    this.canvas.releasePointerCapture(e.pointerId);
    const target = this.pending;
    this.pending = null;
    if (target) {
      void this.store.commitEdit((d) => {
        d.viewfinder.location[0] = Number(target.x.toFixed(2));
        d.viewfinder.location[1] = Number(target.y.toFixed(2));
      });
    }
  }

  draw(): void {
    const { ctx, canvas } = this;
    ctx.fillStyle = "#10141c";
    ctx.fillRect(0, 0, canvas.width, canvas.height);

    for (const r of this.scene.reachable.rects) {
      const a = this.toPixel(r.xmin, r.ymax);
      const b = this.toPixel(r.xmax, r.ymin);
      ctx.fillStyle = "rgba(70, 130, 180, 0.25)";
      ctx.fillRect(a.px, a.py, b.px - a.px, b.py - a.py);
      ctx.strokeStyle = "#4682b4";
      ctx.strokeRect(a.px, a.py, b.px - a.px, b.py - a.py);
    }

    for (const route of this.scene.routes) {
      ctx.strokeStyle = route.kind === "vehicle" ? "#995555" : "#557755";
      ctx.beginPath();
      route.polyline.forEach(([x, y], i) => {
        const p = this.toPixel(x, y);
        if (i === 0) {
          ctx.moveTo(p.px, p.py);
        } else {
          ctx.lineTo(p.px, p.py);
        }
      });
      ctx.stroke();
    }

    for (const s of this.scene.solids) {
      const a = this.toPixel(s.xy[0] - s.size_xy[0] / 2, s.xy[1] + s.size_xy[1] / 2);
      const b = this.toPixel(s.xy[0] + s.size_xy[0] / 2, s.xy[1] - s.size_xy[1] / 2);
      ctx.fillStyle = "#394253";
      ctx.fillRect(a.px, a.py, b.px - a.px, b.py - a.py);
    }

    for (const lm of this.scene.landmarks) {
      const p = this.toPixel(lm.xy[0], lm.xy[1]);
      ctx.fillStyle = "#e0b54a";
      ctx.beginPath();
      ctx.arc(p.px, p.py, 4 + 3 * lm.weight, 0, Math.PI * 2);
      ctx.fill();
    }

    const params = this.store.params;
    if (params) {
      const loc = this.pending ?? {
        x: params.viewfinder.location[0],
        y: params.viewfinder.location[1],
      };
      const p = this.toPixel(loc.x, loc.y);
      ctx.strokeStyle = this.pending ? "#9fdcff" : "#49c774";
      ctx.fillStyle = this.pending ? "#9fdcff" : "#49c774";
      ctx.beginPath();
      ctx.arc(p.px, p.py, 6, 0, Math.PI * 2);
      ctx.fill();
      // yaw arrow (scene yaw is counterclockwise from +x; canvas y flips)
      const yaw = (params.viewfinder.yaw_deg * Math.PI) / 180;
      ctx.beginPath();
      ctx.moveTo(p.px, p.py);
      ctx.lineTo(p.px + 22 * Math.cos(yaw), p.py - 22 * Math.sin(yaw));
      ctx.stroke();
    }
  }
}
