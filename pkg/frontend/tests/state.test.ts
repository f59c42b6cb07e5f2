import { describe, expect, test } from "vitest";

import {
  clearSelection,
  initialState,
  setAngleMode,
  setStage,
  sliderStops,
  togglePoint,
} from "../src/state.js";
import { fixtureArtifact } from "./helpers.js";

const tiny = fixtureArtifact("tiny.json");
const ten = fixtureArtifact("ten.json");

describe("initial state", () => {
  test("starts at stage 0 with an empty selection", () => {
    const s = initialState(tiny);
    expect(s.activeStage).toBe(0);
    expect(s.chartCursor).toBe(0);
    expect(s.selection.size).toBe(0);
    expect(s.glyph.angleMode).toBe("index");
    expect(s.glyph.intensityPercentile).toBe(95);
  });

  test("petal count is clamped to the head width", () => {
    expect(initialState(tiny).glyph.k).toBe(10); // head carries 10 modes
  });
});

describe("stage scrubbing", () => {
  test("a 10-stage artifact yields 10 slider stops", () => {
    const stops = sliderStops(ten);
    expect(stops).toHaveLength(10);
    expect(stops).toEqual(ten.stages.map((st) => st.s));
  });

  test("setStage moves the chart cursor with it (linked views)", () => {
    let s = initialState(tiny);
    s = setStage(s, 2);
    expect(s.activeStage).toBe(2);
    expect(s.chartCursor).toBe(2);
  });

  test("out-of-range indices clamp to the stage range", () => {
    let s = initialState(tiny);
    expect(setStage(s, -3).activeStage).toBe(0);
    expect(setStage(s, 99).activeStage).toBe(2);
  });

  test("selection survives stage changes for the same artifact", () => {
    let s = initialState(tiny);
    s = togglePoint(s, 5);
    s = togglePoint(s, 17);
    s = setStage(s, 1);
    expect([...s.selection].sort((a, b) => a - b)).toEqual([5, 17]);
  });
});

describe("selection", () => {
  test("toggle adds and removes; invalid ids are ignored", () => {
    let s = initialState(tiny);
    s = togglePoint(s, 4);
    expect(s.selection.has(4)).toBe(true);
    s = togglePoint(s, 4);
    expect(s.selection.has(4)).toBe(false);
    expect(togglePoint(s, -1)).toBe(s);
    expect(togglePoint(s, tiny.n)).toBe(s);
    expect(togglePoint(s, 2.5)).toBe(s);
  });

  test("clearSelection empties it and is a no-op when already empty", () => {
    let s = initialState(tiny);
    expect(clearSelection(s)).toBe(s);
    s = togglePoint(s, 1);
    expect(clearSelection(s).selection.size).toBe(0);
  });
});

describe("angle mode", () => {
  test("toggle changes only the glyph settings", () => {
    let s = initialState(tiny);
    const swapped = setAngleMode(s, "direction");
    expect(swapped.glyph.angleMode).toBe("direction");
    expect(swapped.activeStage).toBe(s.activeStage);
    expect(swapped.selection).toBe(s.selection);
    expect(setAngleMode(swapped, "direction")).toBe(swapped);
  });
});
