/**
 * Canvas drawing.  Everything here takes precomputed layout/geometry and a
 * narrow 2-D context interface, so tests can drive it with a recording stub;
 * no numbers are derived here beyond pixel placement.
 */

import { formatExact } from "./artifact.js";
import { ChartLayout } from "./charts.js";
import { Petal, petalColor } from "./glyph.js";

/** The subset of CanvasRenderingContext2D the viewer draws with. */
export interface Brush {
  beginPath(): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  arc(x: number, y: number, r: number, a0: number, a1: number, ccw?: boolean): void;
  closePath(): void;
  fill(): void;
  stroke(): void;
  clearRect(x: number, y: number, w: number, h: number): void;
  setLineDash(segments: number[]): void;
  fillText(text: string, x: number, y: number): void;
  save(): void;
  restore(): void;
  fillStyle: string;
  strokeStyle: string;
  lineWidth: number;
  font: string;
  textAlign: string;
  textBaseline: string;
}

/** Categorical palette for integer labels (cycled). */
export const CATEGORY_COLORS = [
  "#4269d0", "#efb118", "#ff725c", "#6cc5b0", "#3ca951",
  "#ff8ab7", "#a463f2", "#97bbf5", "#9c6b4e", "#9498a0",
] as const;

export const POINT_COLOR = "#4269d0";
export const SELECT_COLOR = "#111111";

export function labelColor(label: number): string {
  const i = ((label % CATEGORY_COLORS.length) + CATEGORY_COLORS.length)
    % CATEGORY_COLORS.length;
  return CATEGORY_COLORS[i];
}

export function drawScatter(
  ctx: Brush,
  positions: Float64Array,
  n: number,
  labels: Int32Array | null,
  selection: ReadonlySet<number>,
  radius = 2.5,
): void {
  // One path per color batch keeps 5k points well inside a frame budget.
  if (labels) {
    for (let c = 0; c < CATEGORY_COLORS.length; c++) {
      ctx.beginPath();
      let used = false;
      for (let i = 0; i < n; i++) {
        if (labelColor(labels[i]) !== CATEGORY_COLORS[c]) continue;
        ctx.moveTo(positions[2 * i] + radius, positions[2 * i + 1]);
        ctx.arc(positions[2 * i], positions[2 * i + 1], radius, 0, 2 * Math.PI);
        used = true;
      }
      if (used) {
        ctx.fillStyle = CATEGORY_COLORS[c];
        ctx.fill();
      }
    }
  } else {
    ctx.beginPath();
    for (let i = 0; i < n; i++) {
      ctx.moveTo(positions[2 * i] + radius, positions[2 * i + 1]);
      ctx.arc(positions[2 * i], positions[2 * i + 1], radius, 0, 2 * Math.PI);
    }
    ctx.fillStyle = POINT_COLOR;
    ctx.fill();
  }
  if (selection.size > 0) {
    ctx.beginPath();
    for (const id of selection) {
      ctx.moveTo(positions[2 * id] + radius + 2, positions[2 * id + 1]);
      ctx.arc(positions[2 * id], positions[2 * id + 1], radius + 2, 0, 2 * Math.PI);
    }
    ctx.strokeStyle = SELECT_COLOR;
    ctx.lineWidth = 1.5;
    ctx.stroke();
  }
}

/**
 * Draw one glyph centered at (cx, cy).  pxPerUnit converts petal lengths to
 * pixels; outline and fill share it, so fill meets outline exactly when the
 * stage response is 1.
 */
export function drawGlyph(
  ctx: Brush,
  cx: number,
  cy: number,
  petals: Petal[],
  pxPerUnit: number,
  scale: number,
): void {
  for (const p of petals) {
    if (p.outline <= 0 && p.fill <= 0) continue; // zero petal: absent
    const a0 = -(p.angle - p.width / 2); // canvas y points down
    const a1 = -(p.angle + p.width / 2);
    if (p.fill > 0) {
      ctx.beginPath();
      ctx.moveTo(cx, cy);
      ctx.arc(cx, cy, p.fill * pxPerUnit, a0, a1, true);
      ctx.closePath();
      ctx.fillStyle = petalColor(p.delta, scale);
      ctx.fill();
    }
    if (p.outline > 0) {
      ctx.beginPath();
      ctx.moveTo(cx, cy);
      ctx.arc(cx, cy, p.outline * pxPerUnit, a0, a1, true);
      ctx.closePath();
      ctx.strokeStyle = "#333333";
      ctx.lineWidth = 1;
      ctx.stroke();
    }
  }
}

/** Pixels per unit so the longest petal of this glyph spans radiusPx. */
export function glyphPxPerUnit(petals: Petal[], radiusPx: number): number {
  let longest = 0;
  for (const p of petals) longest = Math.max(longest, p.outline, p.fill);
  return longest > 0 ? radiusPx / longest : 1;
}

export interface ChartStyle {
  line: string;
  marker: string;
  cursorIndex?: number;
}

export function drawChart(
  ctx: Brush,
  layout: ChartLayout,
  width: number,
  height: number,
  style: ChartStyle,
): void {
  ctx.clearRect(0, 0, width, height);
  const { area } = layout;

  ctx.strokeStyle = "#cccccc";
  ctx.lineWidth = 1;
  ctx.setLineDash([]);
  ctx.beginPath();
  ctx.moveTo(area.left, area.top);
  ctx.lineTo(area.left, area.bottom);
  ctx.lineTo(area.right, area.bottom);
  ctx.stroke();

  ctx.setLineDash([4, 3]);
  ctx.strokeStyle = "#999999";
  for (const g of layout.guides) {
    ctx.beginPath();
    ctx.moveTo(area.left, g.sy);
    ctx.lineTo(area.right, g.sy);
    ctx.stroke();
    ctx.fillStyle = "#777777";
    ctx.font = "10px sans-serif";
    ctx.textAlign = "left";
    ctx.textBaseline = "bottom";
    ctx.fillText(formatExact(g.value), area.left + 2, g.sy - 1);
  }
  ctx.setLineDash([]);

  if (layout.points.length > 0) {
    ctx.strokeStyle = style.line;
    ctx.lineWidth = 1.5;
    ctx.beginPath();
    ctx.moveTo(layout.points[0].sx, layout.points[0].sy);
    for (let i = 1; i < layout.points.length; i++) {
      ctx.lineTo(layout.points[i].sx, layout.points[i].sy);
    }
    ctx.stroke();
    ctx.fillStyle = style.marker;
    for (const p of layout.points) {
      ctx.beginPath();
      ctx.arc(p.sx, p.sy, 3, 0, 2 * Math.PI);
      ctx.fill();
    }
  }

  if (style.cursorIndex !== undefined) {
    const hit = layout.points.find((p) => p.stageIndex === style.cursorIndex);
    if (hit) {
      ctx.strokeStyle = "#e4572e";
      ctx.lineWidth = 1;
      ctx.beginPath();
      ctx.moveTo(hit.sx, area.top);
      ctx.lineTo(hit.sx, area.bottom);
      ctx.stroke();
      ctx.beginPath();
      ctx.arc(hit.sx, hit.sy, 5, 0, 2 * Math.PI);
      ctx.stroke();
    }
  }

  ctx.fillStyle = "#555555";
  ctx.font = "10px sans-serif";
  ctx.textAlign = "center";
  ctx.textBaseline = "top";
  ctx.fillText(layout.xLabel, (area.left + area.right) / 2, area.bottom + 6);
  ctx.textAlign = "left";
  ctx.textBaseline = "top";
  ctx.fillText(layout.yLabel, 4, area.top);

  ctx.textAlign = "right";
  ctx.textBaseline = "middle";
  ctx.fillText(formatShort(layout.yMax), area.left - 4, area.top);
  ctx.fillText(formatShort(layout.yMin), area.left - 4, area.bottom);
  ctx.textAlign = "center";
  ctx.textBaseline = "top";
  ctx.fillText(formatShort(layout.xMin), area.left, area.bottom + 6);
  ctx.fillText(formatShort(layout.xMax), area.right, area.bottom + 6);
}

/** Axis labels get short digits; tooltips use formatExact instead. */
export function formatShort(v: number): string {
  if (Number.isInteger(v)) return String(v);
  return v.toPrecision(3);
}
