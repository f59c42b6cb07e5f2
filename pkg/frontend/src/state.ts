/**
 * View state and its transitions.
 *
 * State is immutable: every transition returns a fresh object so the render
 * loop can compare references to decide what needs redrawing.  Invariants —
 * the active stage stays within the stage range and the selection only holds
 * valid point ids — are enforced here, not in the DOM handlers.
 */

import { Artifact } from "./artifact.js";

export type AngleMode = "index" | "direction";

export interface GlyphSettings {
  /** Petal count; clamped to the head width when a head is present. */
  k: number;
  angleMode: AngleMode;
  /** Quantile of |delta| that maps to full color intensity. */
  intensityPercentile: number;
}

export interface ViewState {
  artifact: Artifact;
  /** Index into artifact.stages. */
  activeStage: number;
  selection: ReadonlySet<number>;
  glyph: GlyphSettings;
  /** Stage index mirrored by the chart cursors (linked views). */
  chartCursor: number;
}

export const DEFAULT_PETALS = 10;
export const DEFAULT_PERCENTILE = 95;

export function initialState(artifact: Artifact): ViewState {
  const k = artifact.head
    ? Math.min(DEFAULT_PETALS, artifact.head.k)
    : DEFAULT_PETALS;
  return {
    artifact,
    activeStage: 0,
    selection: new Set(),
    glyph: { k, angleMode: "index", intensityPercentile: DEFAULT_PERCENTILE },
    chartCursor: 0,
  };
}

/** Scrub to a stage; the chart cursor follows so the linked views agree. */
export function setStage(state: ViewState, index: number): ViewState {
  const last = state.artifact.stages.length - 1;
  const clamped = Math.min(Math.max(Math.round(index), 0), last);
  if (clamped === state.activeStage) return state;
  // Guard only: ids never go stale for a fixed artifact, but a selection
  // must stay within the point range whatever happens upstream.
  let selection = state.selection;
  for (const id of selection) {
    if (id < 0 || id >= state.artifact.n) {
      selection = new Set(
        [...selection].filter((v) => v >= 0 && v < state.artifact.n),
      );
      break;
    }
  }
  return { ...state, activeStage: clamped, chartCursor: clamped, selection };
}

export function togglePoint(state: ViewState, id: number): ViewState {
  if (!Number.isInteger(id) || id < 0 || id >= state.artifact.n) return state;
  const selection = new Set(state.selection);
  if (selection.has(id)) selection.delete(id);
  else selection.add(id);
  return { ...state, selection };
}

export function clearSelection(state: ViewState): ViewState {
  if (state.selection.size === 0) return state;
  return { ...state, selection: new Set() };
}

/** Swap petal arrangement; lengths are untouched (orthogonal channels). */
export function setAngleMode(state: ViewState, mode: AngleMode): ViewState {
  if (mode === state.glyph.angleMode) return state;
  return { ...state, glyph: { ...state.glyph, angleMode: mode } };
}

/** One slider stop per stage, labeled by subspace size. */
export function sliderStops(artifact: Artifact): number[] {
  return artifact.stages.map((st) => st.s);
}
