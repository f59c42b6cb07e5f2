import { describe, expect, test } from "vitest";

import {
  dataToScreen,
  fitViewport,
  nearestPoint,
  pan,
  projectStage,
  screenToData,
  zoomAt,
} from "../src/scales.js";
import { fixtureArtifact } from "./helpers.js";

const tiny = fixtureArtifact("tiny.json");
const stage = tiny.stages[0];

describe("fitViewport", () => {
  test("fits all points inside the canvas with the default margin", () => {
    const vp = fitViewport(stage.y, tiny.n, tiny.mPrime, 800, 600);
    const pos = projectStage(vp, stage.y, tiny.n, tiny.mPrime);
    for (let i = 0; i < tiny.n; i++) {
      expect(pos[2 * i]).toBeGreaterThanOrEqual(0);
      expect(pos[2 * i]).toBeLessThanOrEqual(800);
      expect(pos[2 * i + 1]).toBeGreaterThanOrEqual(0);
      expect(pos[2 * i + 1]).toBeLessThanOrEqual(600);
    }
  });

  test("degenerate extent falls back to scale 1", () => {
    const y = new Float64Array([2, 3, 2, 3, 2, 3]);
    const vp = fitViewport(y, 3, 2, 400, 400);
    expect(vp.scale).toBe(1);
    expect(vp.cx).toBe(2);
    expect(vp.cy).toBe(3);
  });
});

describe("pan and zoom", () => {
  const vp = fitViewport(stage.y, tiny.n, tiny.mPrime, 800, 600);

  test("pan moves the view by whole pixels", () => {
    const moved = pan(vp, 50, -20);
    const [sx0, sy0] = dataToScreen(vp, 0.5, 0.5);
    const [sx1, sy1] = dataToScreen(moved, 0.5, 0.5);
    expect(sx1 - sx0).toBeCloseTo(50, 9);
    expect(sy1 - sy0).toBeCloseTo(-20, 9);
  });

  test("zoomAt keeps the point under the cursor fixed", () => {
    const zoomed = zoomAt(vp, 1.7, 200, 450);
    const before = screenToData(vp, 200, 450);
    const after = screenToData(zoomed, 200, 450);
    expect(after[0]).toBeCloseTo(before[0], 9);
    expect(after[1]).toBeCloseTo(before[1], 9);
    expect(zoomed.scale).toBeCloseTo(vp.scale * 1.7, 9);
  });
});

describe("nearestPoint", () => {
  test("finds the point under the cursor within the pick radius", () => {
    const vp = fitViewport(stage.y, tiny.n, tiny.mPrime, 800, 600);
    const pos = projectStage(vp, stage.y, tiny.n, tiny.mPrime);
    const id = 17;
    expect(
      nearestPoint(pos, tiny.n, pos[2 * id] + 1, pos[2 * id + 1] - 1, 8),
    ).toBe(id);
  });

  test("returns -1 when nothing is close enough", () => {
    const pos = new Float64Array([100, 100]);
    expect(nearestPoint(pos, 1, 500, 500, 8)).toBe(-1);
  });
});
