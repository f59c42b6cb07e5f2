/**
 * Text builders for the tooltip and the detail panel.
 *
 * Pure functions so fidelity tests can compare the rendered strings against
 * artifact values; every number goes through formatExact, whose output
 * parses back to the identical double.
 */

import { Artifact, formatExact } from "./artifact.js";
import { glyphForPoint, Petal } from "./glyph.js";
import { GlyphSettings } from "./state.js";

/** Hover text: id, label when present, and the exact stage position. */
export function pointTooltip(
  artifact: Artifact,
  stageIndex: number,
  pointId: number,
): string {
  const stage = artifact.stages[stageIndex];
  const coords: string[] = [];
  for (let d = 0; d < artifact.mPrime; d++) {
    coords.push(formatExact(stage.y[pointId * artifact.mPrime + d]));
  }
  const label = artifact.labels ? ` label ${artifact.labels[pointId]}` : "";
  return `point ${pointId}${label} · y = (${coords.join(", ")})`;
}

export interface DetailEntry {
  mode: number; // 1-based for display
  participation: string;
  contribution: string;
  delta: string;
  inStage: boolean;
}

/** Per-mode numeric rows for one selected point (exact text). */
export function detailEntries(
  artifact: Artifact,
  stageIndex: number,
  settings: GlyphSettings,
  pointId: number,
): DetailEntry[] {
  const stage = artifact.stages[stageIndex];
  return glyphForPoint(artifact, stageIndex, settings, pointId).map(
    (p: Petal) => ({
      mode: p.mode + 1,
      participation: formatExact(p.outline),
      contribution: formatExact(p.fill),
      delta: formatExact(p.delta),
      inStage: p.mode < stage.s,
    }),
  );
}

/** One-line run description for the header. */
export function runSummary(artifact: Artifact): string {
  const meta = artifact.meta;
  const sizes = artifact.stages.map((st) => st.s).join(", ");
  const bits = [
    `n=${artifact.n}`,
    `m=${meta.m ?? "?"}`,
    `m'=${artifact.mPrime}`,
    `k=${meta.k ?? "?"}`,
    `seed=${meta.seed ?? "?"}`,
    `stages [${sizes}]`,
  ];
  return bits.join(" · ");
}

/** Slider caption for the active stage. */
export function stageCaption(artifact: Artifact, stageIndex: number): string {
  const stage = artifact.stages[stageIndex];
  const tag = stage.full ? " · full spectrum" : "";
  return `stage ${stageIndex + 1}/${artifact.stages.length} · s=${stage.s}` +
    ` · epochs=${stage.epochsUsed}${tag}`;
}
