/**
 * Frame-budget proxy for the interactive-rate requirement: transforming and
 * batching a 5,000-point stage must fit far inside a 30 fps budget (33 ms
 * per frame).  The draw side uses a no-op brush so the measurement covers
 * the viewer's own per-frame work rather than the test host's rasterizer.
 */

import { describe, expect, test } from "vitest";

import { Brush, drawScatter } from "../src/render.js";
import { fitViewport, pan, projectStage, zoomAt } from "../src/scales.js";

const N = 5000;
const FRAME_BUDGET_MS = 33;

function syntheticStage(n: number): Float64Array {
  const y = new Float64Array(2 * n);
  let seed = 1234567;
  const next = () => {
    // xorshift: cheap deterministic filler, not a statistics tool
    seed ^= seed << 13;
    seed ^= seed >>> 17;
    seed ^= seed << 5;
    return (seed >>> 0) / 2 ** 32;
  };
  for (let i = 0; i < 2 * n; i++) y[i] = next() * 20 - 10;
  return y;
}

const noopBrush: Brush = {
  beginPath() {},
  moveTo() {},
  lineTo() {},
  arc() {},
  closePath() {},
  fill() {},
  stroke() {},
  clearRect() {},
  setLineDash() {},
  fillText() {},
  save() {},
  restore() {},
  fillStyle: "",
  strokeStyle: "",
  lineWidth: 0,
  font: "",
  textAlign: "",
  textBaseline: "",
};

describe("frame budget at 5,000 points", () => {
  const y = syntheticStage(N);
  const labels = new Int32Array(N).map((_, i) => i % 7);

  test("pan/zoom frames stay within 33 ms", () => {
    let vp = fitViewport(y, N, 2, 1600, 1000);
    const buf = new Float64Array(2 * N);
    // warm-up frame so JIT compilation is not billed to the budget
    projectStage(vp, y, N, 2, buf);

    const frames = 30;
    const start = performance.now();
    for (let f = 0; f < frames; f++) {
      vp = f % 2 === 0 ? pan(vp, 3, -2) : zoomAt(vp, 1.01, 800, 500);
      const pos = projectStage(vp, y, N, 2, buf);
      drawScatter(noopBrush, pos, N, labels, new Set([17, 4711]));
    }
    const perFrame = (performance.now() - start) / frames;
    expect(perFrame).toBeLessThan(FRAME_BUDGET_MS);
  });

  test("a full stage transition (interpolated frames) also fits", () => {
    const yNext = syntheticStage(N);
    const vp = fitViewport(y, N, 2, 1600, 1000);
    const display = new Float64Array(2 * N);
    const buf = new Float64Array(2 * N);
    const frames = 18; // ~300 ms of animation at 60 fps
    const start = performance.now();
    for (let f = 0; f < frames; f++) {
      const t = (f + 1) / frames;
      const ease = t * t * (3 - 2 * t);
      for (let i = 0; i < 2 * N; i++) {
        display[i] = y[i] + (yNext[i] - y[i]) * ease;
      }
      const pos = projectStage(vp, display, N, 2, buf);
      drawScatter(noopBrush, pos, N, null, new Set());
    }
    const perFrame = (performance.now() - start) / frames;
    expect(perFrame).toBeLessThan(FRAME_BUDGET_MS);
  });
});
