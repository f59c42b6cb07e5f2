/**
 * Pure chart layout: data values to screen coordinates, nothing else.
 *
 * Chart 1 plots the active stage's spectral response (row norms of P) over
 * mode index.  Chart 2 plots reconstruction error E_S over subspace size,
 * with dashed guides at 0.2 / 0.1 / 0.05.  Both store the untouched data
 * values next to the derived pixels so tooltips and tests read the former.
 */

import { Artifact, StageEntry } from "./artifact.js";

export interface ChartPoint {
  /** Data coordinates, exactly as stored in the artifact. */
  x: number;
  y: number;
  sx: number;
  sy: number;
  /** Index into artifact.stages (-1 when the chart is not stage-keyed). */
  stageIndex: number;
}

export interface GuideLine {
  value: number;
  sy: number;
}

export interface PlotArea {
  left: number;
  top: number;
  right: number;
  bottom: number;
}

export interface ChartLayout {
  points: ChartPoint[];
  guides: GuideLine[];
  area: PlotArea;
  xMin: number;
  xMax: number;
  yMin: number;
  yMax: number;
  xLabel: string;
  yLabel: string;
}

export const ERROR_GUIDES = [0.2, 0.1, 0.05] as const;

const MARGIN = { left: 44, top: 10, right: 12, bottom: 26 };

function plotArea(width: number, height: number): PlotArea {
  return {
    left: MARGIN.left,
    top: MARGIN.top,
    right: Math.max(width - MARGIN.right, MARGIN.left + 1),
    bottom: Math.max(height - MARGIN.bottom, MARGIN.top + 1),
  };
}

function xScale(area: PlotArea, xMin: number, xMax: number) {
  const span = xMax > xMin ? xMax - xMin : 1;
  return (x: number) =>
    area.left + ((x - xMin) / span) * (area.right - area.left);
}

function yScale(area: PlotArea, yMin: number, yMax: number) {
  const span = yMax > yMin ? yMax - yMin : 1;
  return (y: number) =>
    area.bottom - ((y - yMin) / span) * (area.bottom - area.top);
}

/** Response magnitudes of the active stage over mode index 1..s. */
export function responseChartLayout(
  stage: StageEntry,
  width: number,
  height: number,
): ChartLayout {
  const area = plotArea(width, height);
  const xMin = 1;
  const xMax = Math.max(stage.s, 2);
  let yMax = 0;
  for (const v of stage.response) if (v > yMax) yMax = v;
  if (yMax <= 0) yMax = 1;
  const sx = xScale(area, xMin, xMax);
  const sy = yScale(area, 0, yMax);
  const points: ChartPoint[] = [];
  for (let j = 0; j < stage.s; j++) {
    const v = stage.response[j];
    points.push({ x: j + 1, y: v, sx: sx(j + 1), sy: sy(v), stageIndex: -1 });
  }
  return {
    points,
    guides: [],
    area,
    xMin,
    xMax,
    yMin: 0,
    yMax,
    xLabel: "mode index",
    yLabel: "|p_s|",
  };
}

/**
 * Reconstruction error per stage, or null when no metrics are attached.
 * Stages without a metric row (e.g. the redundant full-spectrum snapshot)
 * are skipped; guides are always present.
 */
export function errorChartLayout(
  artifact: Artifact,
  width: number,
  height: number,
): ChartLayout | null {
  if (!artifact.metrics) return null;
  const rows: Array<{ s: number; e: number; stageIndex: number }> = [];
  artifact.stages.forEach((st, i) => {
    const row = artifact.metrics!.perStage.get(st.s);
    const e = row ? row["recon_error"] : undefined;
    if (typeof e === "number") rows.push({ s: st.s, e, stageIndex: i });
  });
  if (rows.length === 0) return null;

  const area = plotArea(width, height);
  const xMin = rows[0].s;
  const xMax = Math.max(rows[rows.length - 1].s, xMin + 1);
  let yMax = Math.max(...rows.map((r) => r.e), ERROR_GUIDES[0]);
  yMax *= 1.05;
  const sx = xScale(area, xMin, xMax);
  const sy = yScale(area, 0, yMax);
  const points = rows.map((r) => ({
    x: r.s,
    y: r.e,
    sx: sx(r.s),
    sy: sy(r.e),
    stageIndex: r.stageIndex,
  }));
  const guides = ERROR_GUIDES.map((v) => ({ value: v, sy: sy(v) }));
  return {
    points,
    guides,
    area,
    xMin,
    xMax,
    yMin: 0,
    yMax,
    xLabel: "subspace size s",
    yLabel: "E_S",
  };
}

/**
 * Stage index of the chart point nearest to a click x-position; -1 when the
 * chart has no stage-keyed points.  Clicking anywhere on the error chart
 * activates the closest stage (the subspace-size selection loop).
 */
export function nearestStage(layout: ChartLayout, sxClick: number): number {
  let best = -1;
  let bestD = Infinity;
  for (const p of layout.points) {
    if (p.stageIndex < 0) continue;
    const d = Math.abs(p.sx - sxClick);
    if (d < bestD) {
      bestD = d;
      best = p.stageIndex;
    }
  }
  return best;
}
