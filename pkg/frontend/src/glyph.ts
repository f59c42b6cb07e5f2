/**
 * Petal glyph geometry for point-level spectral explanation.
 *
 * Each of the K petals stands for one leading spectral mode.  Outline length
 * encodes participation |u_{n,s}| (how much the point loads on the mode);
 * fill length encodes contribution |u_{n,s}| * |p_s| with the active stage's
 * response (how much of the point's position the mode actually provides).
 * Delta = contribution - participation * reference scale; positive deltas
 * are drawn red (mode amplified above the dataset's typical response),
 * negative blue (suppressed).  Color intensity is normalized to the
 * dataset's 95th-percentile |delta| by default.
 *
 * Rendering conventions (the data does not dimension them): petal angular
 * width is 2*pi/K, and petals sit at math-convention angles starting at 12
 * o'clock running clockwise in index mode.  Angles carry no data; toggling
 * the angle mode never changes lengths.
 */

import { Artifact, StageEntry } from "./artifact.js";
import { AngleMode, GlyphSettings } from "./state.js";

export interface Petal {
  /** Spectral mode index, 0-based. */
  mode: number;
  /** Petal center angle, radians, math convention (x right, y up). */
  angle: number;
  /** Angular width 2*pi/K. */
  width: number;
  /** Participation: |u_{n,mode}|, straight from the artifact head. */
  outline: number;
  /** Contribution: participation * stage response (0 beyond the stage). */
  fill: number;
  /** Contribution minus participation * glyph_ref_scale. */
  delta: number;
}

export function indexAngle(mode: number, k: number): number {
  return Math.PI / 2 - (2 * Math.PI * mode) / k;
}

/**
 * Direction of the mode's projection row in the embedding plane; only
 * defined for 2-D embeddings and modes inside the stage's subspace.
 */
export function directionAngle(
  stage: StageEntry,
  mPrime: number,
  mode: number,
): number | null {
  if (mPrime !== 2 || mode >= stage.s) return null;
  return Math.atan2(stage.p[mode * 2 + 1], stage.p[mode * 2]);
}

function petalAngle(
  stage: StageEntry,
  mPrime: number,
  mode: number,
  k: number,
  angleMode: AngleMode,
): number {
  if (angleMode === "direction") {
    const a = directionAngle(stage, mPrime, mode);
    if (a !== null) return a;
  }
  return indexAngle(mode, k);
}

/** Glyph petals for one selected point at one stage. */
export function glyphForPoint(
  artifact: Artifact,
  stageIndex: number,
  settings: GlyphSettings,
  pointId: number,
): Petal[] {
  const head = artifact.head;
  if (!head) return [];
  const stage = artifact.stages[stageIndex];
  const k = Math.min(settings.k, head.k);
  const width = (2 * Math.PI) / k;
  const petals: Petal[] = [];
  for (let j = 0; j < k; j++) {
    const outline = Math.abs(head.uHead[pointId * head.k + j]);
    const fill = j < stage.s ? outline * stage.response[j] : 0;
    petals.push({
      mode: j,
      angle: petalAngle(stage, artifact.mPrime, j, k, settings.angleMode),
      width,
      outline,
      fill,
      delta: fill - outline * head.glyphRefScale,
    });
  }
  return petals;
}

/** Linear-interpolation percentile of a sorted array (q in [0, 100]). */
export function percentileSorted(sorted: ArrayLike<number>, q: number): number {
  const m = sorted.length;
  if (m === 0) return 0;
  const pos = (q / 100) * (m - 1);
  const lo = Math.floor(pos);
  const hi = Math.min(lo + 1, m - 1);
  const frac = pos - lo;
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

/**
 * Dataset-wide |delta| normalizer for the active stage: the q-th percentile
 * over all (point, mode) deltas.  Rescaling only — the displayed numbers
 * stay the raw deltas.
 */
export function deltaScale(
  artifact: Artifact,
  stageIndex: number,
  settings: GlyphSettings,
): number {
  const head = artifact.head;
  if (!head) return 0;
  const stage = artifact.stages[stageIndex];
  const k = Math.min(settings.k, head.k);
  const all = new Float64Array(artifact.n * k);
  let w = 0;
  for (let i = 0; i < artifact.n; i++) {
    for (let j = 0; j < k; j++) {
      const outline = Math.abs(head.uHead[i * head.k + j]);
      const fill = j < stage.s ? outline * stage.response[j] : 0;
      all[w++] = Math.abs(fill - outline * head.glyphRefScale);
    }
  }
  all.sort();
  return percentileSorted(all, settings.intensityPercentile);
}

/** Red/blue delta color with intensity |delta| / scale, clipped to 1. */
export function petalColor(delta: number, scale: number): string {
  const intensity = scale > 0 ? Math.min(Math.abs(delta) / scale, 1) : 0;
  const alpha = 0.15 + 0.85 * intensity;
  return delta >= 0
    ? `rgba(196, 30, 58, ${alpha.toFixed(3)})`
    : `rgba(35, 87, 195, ${alpha.toFixed(3)})`;
}
