/**
 * Viewport: the affine map between embedding coordinates and canvas pixels.
 *
 * This is the only transform ever applied to stage positions — the viewer
 * displays artifact values as-is up to pan/zoom.  Canvas y grows downward,
 * so the map flips the vertical axis.
 */

export interface Viewport {
  /** Pixels per data unit. */
  scale: number;
  /** Data point mapped to the canvas center. */
  cx: number;
  cy: number;
  width: number;
  height: number;
}

/**
 * Pass-through viewport: scale 1, origin-centered, zero canvas size, so
 * dataToScreen(x, y) = (x, -y) exactly (multiply by 1 and add 0 are exact).
 */
export function identityViewport(): Viewport {
  return { scale: 1, cx: 0, cy: 0, width: 0, height: 0 };
}

/** Fit the first two embedding columns into the canvas with a margin. */
export function fitViewport(
  y: Float64Array,
  n: number,
  mPrime: number,
  width: number,
  height: number,
  margin = 0.08,
): Viewport {
  let xMin = Infinity;
  let xMax = -Infinity;
  let yMin = Infinity;
  let yMax = -Infinity;
  for (let i = 0; i < n; i++) {
    const px = y[i * mPrime];
    const py = mPrime > 1 ? y[i * mPrime + 1] : 0;
    if (px < xMin) xMin = px;
    if (px > xMax) xMax = px;
    if (py < yMin) yMin = py;
    if (py > yMax) yMax = py;
  }
  const spanX = xMax - xMin;
  const spanY = yMax - yMin;
  const usableX = width * (1 - 2 * margin);
  const usableY = height * (1 - 2 * margin);
  let scale = Math.min(
    spanX > 0 ? usableX / spanX : Infinity,
    spanY > 0 ? usableY / spanY : Infinity,
  );
  if (!Number.isFinite(scale) || scale <= 0) scale = 1;
  return {
    scale,
    cx: (xMin + xMax) / 2,
    cy: (yMin + yMax) / 2,
    width,
    height,
  };
}

export function dataToScreen(vp: Viewport, x: number, y: number): [number, number] {
  return [
    (x - vp.cx) * vp.scale + vp.width / 2,
    (vp.cy - y) * vp.scale + vp.height / 2,
  ];
}

export function screenToData(vp: Viewport, sx: number, sy: number): [number, number] {
  return [
    (sx - vp.width / 2) / vp.scale + vp.cx,
    vp.cy - (sy - vp.height / 2) / vp.scale,
  ];
}

export function pan(vp: Viewport, dxPx: number, dyPx: number): Viewport {
  return { ...vp, cx: vp.cx - dxPx / vp.scale, cy: vp.cy + dyPx / vp.scale };
}

/** Zoom by a factor keeping the data point under (sx, sy) fixed. */
export function zoomAt(vp: Viewport, factor: number, sx: number, sy: number): Viewport {
  const [dx, dy] = screenToData(vp, sx, sy);
  const scale = vp.scale * factor;
  return {
    ...vp,
    scale,
    cx: dx - (sx - vp.width / 2) / scale,
    cy: dy + (sy - vp.height / 2) / scale,
  };
}

/**
 * Transform a whole stage into interleaved screen coordinates.  This is the
 * per-frame hot loop; it writes into a reusable buffer to avoid allocation.
 */
export function projectStage(
  vp: Viewport,
  y: Float64Array,
  n: number,
  mPrime: number,
  out?: Float64Array,
): Float64Array {
  const buf = out && out.length >= 2 * n ? out : new Float64Array(2 * n);
  const halfW = vp.width / 2;
  const halfH = vp.height / 2;
  const { scale, cx, cy } = vp;
  for (let i = 0; i < n; i++) {
    const px = y[i * mPrime];
    const py = mPrime > 1 ? y[i * mPrime + 1] : 0;
    buf[2 * i] = (px - cx) * scale + halfW;
    buf[2 * i + 1] = (cy - py) * scale + halfH;
  }
  return buf;
}

/** Index of the point whose screen position is nearest (sx, sy), or -1. */
export function nearestPoint(
  positions: Float64Array,
  n: number,
  sx: number,
  sy: number,
  maxDistPx: number,
): number {
  let best = -1;
  let bestD2 = maxDistPx * maxDistPx;
  for (let i = 0; i < n; i++) {
    const dx = positions[2 * i] - sx;
    const dy = positions[2 * i + 1] - sy;
    const d2 = dx * dx + dy * dy;
    if (d2 <= bestD2) {
      bestD2 = d2;
      best = i;
    }
  }
  return best;
}
