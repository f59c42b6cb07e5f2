/**
 * DOM wiring: fetch an artifact, hold the view state, route input events to
 * state transitions, and redraw through requestAnimationFrame.  All numeric
 * content comes from the pure modules; this file only moves pixels and DOM.
 */

import {
  Artifact,
  ArtifactError,
  parseArtifactText,
} from "./artifact.js";
import {
  ChartLayout,
  errorChartLayout,
  nearestStage,
  responseChartLayout,
} from "./charts.js";
import { detailEntries, pointTooltip, runSummary, stageCaption } from "./detail.js";
import { deltaScale, glyphForPoint } from "./glyph.js";
import {
  Brush,
  drawChart,
  drawGlyph,
  drawScatter,
  glyphPxPerUnit,
} from "./render.js";
import {
  Viewport,
  fitViewport,
  nearestPoint,
  pan,
  projectStage,
  zoomAt,
} from "./scales.js";
import {
  ViewState,
  clearSelection,
  initialState,
  setAngleMode,
  setStage,
  sliderStops,
  togglePoint,
} from "./state.js";

const TRANSITION_MS = 300;
const GLYPH_RADIUS_PX = 36;
const PICK_RADIUS_PX = 8;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id} in index.html`);
  return node as T;
}

class App {
  private state: ViewState | null = null;
  private vp: Viewport | null = null;

  private scatter = el<HTMLCanvasElement>("scatter");
  private responseCanvas = el<HTMLCanvasElement>("response-chart");
  private errorCanvas = el<HTMLCanvasElement>("error-chart");
  private slider = el<HTMLInputElement>("stage-slider");
  private stops = el<HTMLDataListElement>("stage-stops");
  private caption = el<HTMLElement>("stage-caption");
  private banner = el<HTMLElement>("banner");
  private summary = el<HTMLElement>("summary");
  private tooltip = el<HTMLElement>("tooltip");
  private glyphPanel = el<HTMLElement>("glyph-panel");
  private detailBody = el<HTMLElement>("detail-body");
  private urlBox = el<HTMLInputElement>("artifact-url");

  // Animated display coordinates: interpolate between stages in data space;
  // the final frame hands back the exact stage array (no residual blend).
  private displayY: Float64Array | null = null;
  private animFrom: Float64Array | null = null;
  private animStart = 0;
  private screen: Float64Array = new Float64Array(0);
  private errorLayout: ChartLayout | null = null;
  private dirty = false;
  private dragging = false;
  private dragMoved = false;
  private lastX = 0;
  private lastY = 0;
  private cachedDeltaScale = 0;
  private deltaScaleStage = -1;

  constructor() {
    this.bindEvents();
    requestAnimationFrame(() => this.frame());
  }

  async load(url: string): Promise<void> {
    this.banner.textContent = "";
    this.banner.className = "banner";
    try {
      const resp = await fetch(url);
      if (!resp.ok) throw new Error(`GET ${url} -> ${resp.status}`);
      const artifact = parseArtifactText(await resp.text());
      this.install(artifact);
    } catch (err) {
      const msg =
        err instanceof ArtifactError
          ? `artifact rejected — ${err.message}`
          : `could not load ${url}: ${(err as Error).message}`;
      this.banner.textContent = msg;
      this.banner.className = "banner error";
    }
  }

  private install(artifact: Artifact): void {
    this.state = initialState(artifact);
    this.displayY = artifact.stages[0].y;
    this.animFrom = null;
    this.summary.textContent = runSummary(artifact);

    const stops = sliderStops(artifact);
    this.slider.min = "0";
    this.slider.max = String(stops.length - 1);
    this.slider.step = "1";
    this.slider.value = "0";
    this.slider.disabled = stops.length === 1;
    this.stops.innerHTML = "";
    stops.forEach((s, i) => {
      const opt = document.createElement("option");
      opt.value = String(i);
      opt.label = `s=${s}`;
      this.stops.appendChild(opt);
    });

    this.fitCanvases();
    this.vp = fitViewport(
      artifact.stages[0].y,
      artifact.n,
      artifact.mPrime,
      this.scatter.width,
      this.scatter.height,
    );
    this.deltaScaleStage = -1;
    if (!artifact.head) {
      this.glyphPanel.classList.add("disabled");
      this.detailBody.innerHTML =
        "<p>This artifact carries no explanation head, so the glyph view " +
        "is disabled. Re-run the embedding to include one.</p>";
    } else {
      this.glyphPanel.classList.remove("disabled");
      this.renderDetail();
    }
    this.errorCanvas.style.display = artifact.metrics ? "" : "none";
    el<HTMLElement>("error-note").style.display = artifact.metrics ? "none" : "";
    this.invalidate();
  }

  private bindEvents(): void {
    el<HTMLButtonElement>("load-btn").addEventListener("click", () => {
      void this.load(this.urlBox.value);
    });
    this.urlBox.addEventListener("keydown", (ev) => {
      if (ev.key === "Enter") void this.load(this.urlBox.value);
    });

    this.slider.addEventListener("input", () => {
      this.scrubTo(Number(this.slider.value));
    });

    el<HTMLButtonElement>("angle-index").addEventListener("click", () =>
      this.setAngle("index"),
    );
    el<HTMLButtonElement>("angle-direction").addEventListener("click", () =>
      this.setAngle("direction"),
    );

    this.errorCanvas.addEventListener("click", (ev) => {
      if (!this.state || !this.errorLayout) return;
      const rect = this.errorCanvas.getBoundingClientRect();
      const idx = nearestStage(this.errorLayout, ev.clientX - rect.left);
      if (idx >= 0) this.scrubTo(idx);
    });

    this.scatter.addEventListener("mousedown", (ev) => {
      this.dragging = true;
      this.dragMoved = false;
      this.lastX = ev.offsetX;
      this.lastY = ev.offsetY;
    });
    this.scatter.addEventListener("mousemove", (ev) => {
      if (this.dragging && this.vp) {
        const dx = ev.offsetX - this.lastX;
        const dy = ev.offsetY - this.lastY;
        if (Math.abs(dx) + Math.abs(dy) > 2) this.dragMoved = true;
        if (this.dragMoved) {
          this.vp = pan(this.vp, dx, dy);
          this.lastX = ev.offsetX;
          this.lastY = ev.offsetY;
          this.invalidate();
        }
      } else {
        this.hover(ev.offsetX, ev.offsetY);
      }
    });
    window.addEventListener("mouseup", (ev) => {
      if (!this.dragging) return;
      this.dragging = false;
      if (!this.dragMoved && ev.target === this.scatter) {
        this.pick(this.lastX, this.lastY);
      }
    });
    this.scatter.addEventListener("wheel", (ev) => {
      if (!this.vp) return;
      ev.preventDefault();
      const factor = Math.pow(1.0015, -ev.deltaY);
      this.vp = zoomAt(this.vp, factor, ev.offsetX, ev.offsetY);
      this.invalidate();
    });
    window.addEventListener("resize", () => {
      if (!this.state || !this.vp) return;
      const prev = { w: this.scatter.width, h: this.scatter.height };
      this.fitCanvases();
      this.vp = {
        ...this.vp,
        width: this.scatter.width,
        height: this.scatter.height,
        scale: this.vp.scale * Math.min(
          this.scatter.width / prev.w,
          this.scatter.height / prev.h,
        ),
      };
      this.invalidate();
    });
  }

  private fitCanvases(): void {
    const box = this.scatter.parentElement!.getBoundingClientRect();
    this.scatter.width = Math.max(Math.floor(box.width), 200);
    this.scatter.height = Math.max(Math.floor(box.height), 200);
    for (const canvas of [this.responseCanvas, this.errorCanvas]) {
      const r = canvas.getBoundingClientRect();
      canvas.width = Math.max(Math.floor(r.width), 100);
      canvas.height = 140;
    }
  }

  private scrubTo(index: number): void {
    if (!this.state || !this.displayY) return;
    const next = setStage(this.state, index);
    if (next === this.state) return;
    this.animFrom = this.displayY.slice();
    this.animStart = performance.now();
    this.state = next;
    this.slider.value = String(next.activeStage);
    this.renderDetail();
    this.invalidate();
  }

  private setAngle(mode: "index" | "direction"): void {
    if (!this.state) return;
    this.state = setAngleMode(this.state, mode);
    el<HTMLButtonElement>("angle-index").classList.toggle(
      "active",
      mode === "index",
    );
    el<HTMLButtonElement>("angle-direction").classList.toggle(
      "active",
      mode === "direction",
    );
    this.renderDetail();
    this.invalidate();
  }

  private pick(sx: number, sy: number): void {
    if (!this.state || !this.vp || !this.displayY) return;
    const pos = projectStage(
      this.vp,
      this.displayY,
      this.state.artifact.n,
      this.state.artifact.mPrime,
      this.screen,
    );
    const id = nearestPoint(pos, this.state.artifact.n, sx, sy, PICK_RADIUS_PX);
    this.state = id >= 0 ? togglePoint(this.state, id) : clearSelection(this.state);
    this.renderDetail();
    this.invalidate();
  }

  private hover(sx: number, sy: number): void {
    if (!this.state || !this.vp || !this.displayY) return;
    const pos = projectStage(
      this.vp,
      this.displayY,
      this.state.artifact.n,
      this.state.artifact.mPrime,
      this.screen,
    );
    const id = nearestPoint(pos, this.state.artifact.n, sx, sy, PICK_RADIUS_PX);
    if (id >= 0) {
      this.tooltip.textContent = pointTooltip(
        this.state.artifact,
        this.state.activeStage,
        id,
      );
      this.tooltip.style.display = "";
      this.tooltip.style.left = `${sx + 14}px`;
      this.tooltip.style.top = `${sy + 14}px`;
    } else {
      this.tooltip.style.display = "none";
    }
  }

  private renderDetail(): void {
    if (!this.state) return;
    const { artifact } = this.state;
    this.caption.textContent = stageCaption(artifact, this.state.activeStage);
    if (!artifact.head) return;
    const first = this.state.selection.values().next();
    if (first.done) {
      this.detailBody.innerHTML =
        "<p>Click a point to inspect its spectral glyph.</p>";
      return;
    }
    const id = first.value;
    const rows = detailEntries(
      artifact,
      this.state.activeStage,
      this.state.glyph,
      id,
    );
    const cells = rows
      .map(
        (r) =>
          `<tr class="${r.inStage ? "" : "outside"}"><td>${r.mode}</td>` +
          `<td>${r.participation}</td><td>${r.contribution}</td>` +
          `<td>${r.delta}</td></tr>`,
      )
      .join("");
    this.detailBody.innerHTML =
      `<p>${pointTooltip(artifact, this.state.activeStage, id)}</p>` +
      `<table><thead><tr><th>mode</th><th>participation</th>` +
      `<th>contribution</th><th>delta</th></tr></thead>` +
      `<tbody>${cells}</tbody></table>`;
  }

  private invalidate(): void {
    this.dirty = true;
  }

  private frame(): void {
    requestAnimationFrame(() => this.frame());
    if (!this.state || !this.vp) return;
    const stage = this.state.artifact.stages[this.state.activeStage];

    if (this.animFrom) {
      const t = Math.min(
        (performance.now() - this.animStart) / TRANSITION_MS,
        1,
      );
      if (t >= 1) {
        this.animFrom = null;
        this.displayY = stage.y; // exact positions once the blend ends
      } else {
        const ease = t * t * (3 - 2 * t);
        const n = this.state.artifact.n * this.state.artifact.mPrime;
        if (!this.displayY || this.displayY === stage.y) {
          this.displayY = new Float64Array(n);
        }
        for (let i = 0; i < n; i++) {
          this.displayY[i] =
            this.animFrom[i] + (stage.y[i] - this.animFrom[i]) * ease;
        }
      }
      this.dirty = true;
    } else if (this.displayY !== stage.y) {
      this.displayY = stage.y;
      this.dirty = true;
    }

    if (!this.dirty || !this.displayY) return;
    this.dirty = false;

    const { artifact } = this.state;
    const ctx = this.scatter.getContext("2d") as unknown as Brush & {
      clearRect(x: number, y: number, w: number, h: number): void;
    };
    ctx.clearRect(0, 0, this.scatter.width, this.scatter.height);
    this.screen = projectStage(
      this.vp,
      this.displayY,
      artifact.n,
      artifact.mPrime,
      this.screen,
    );
    drawScatter(ctx, this.screen, artifact.n, artifact.labels, this.state.selection);

    if (artifact.head && this.state.selection.size > 0) {
      if (this.deltaScaleStage !== this.state.activeStage) {
        this.cachedDeltaScale = deltaScale(
          artifact,
          this.state.activeStage,
          this.state.glyph,
        );
        this.deltaScaleStage = this.state.activeStage;
      }
      for (const id of this.state.selection) {
        const petals = glyphForPoint(
          artifact,
          this.state.activeStage,
          this.state.glyph,
          id,
        );
        drawGlyph(
          ctx,
          this.screen[2 * id],
          this.screen[2 * id + 1],
          petals,
          glyphPxPerUnit(petals, GLYPH_RADIUS_PX),
          this.cachedDeltaScale,
        );
      }
    }

    const rctx = this.responseCanvas.getContext("2d") as unknown as Brush;
    const rlayout = responseChartLayout(
      stage,
      this.responseCanvas.width,
      this.responseCanvas.height,
    );
    drawChart(rctx, rlayout, this.responseCanvas.width, this.responseCanvas.height, {
      line: "#4269d0",
      marker: "#4269d0",
    });

    this.errorLayout = errorChartLayout(
      artifact,
      this.errorCanvas.width,
      this.errorCanvas.height,
    );
    if (this.errorLayout) {
      const ectx = this.errorCanvas.getContext("2d") as unknown as Brush;
      drawChart(ectx, this.errorLayout, this.errorCanvas.width, this.errorCanvas.height, {
        line: "#3ca951",
        marker: "#3ca951",
        cursorIndex: this.state.chartCursor,
      });
    }
  }
}

const app = new App();
const params = new URLSearchParams(window.location.search);
const initial = params.get("artifact") ?? "artifacts/demo.json";
(document.getElementById("artifact-url") as HTMLInputElement).value = initial;
void app.load(initial);
