/**
 * Cartesian fisheye along x: the focus and both extent endpoints are fixed
 * points, everything between stretches toward the focus. With margin
 * m = distance from focus to the boundary on x's side and d = |x - focus|:
 *
 *   x' = focus ± m * (d * (k + 1) / m) / (k * d / m + 1)
 *
 * k = 0 is the identity; a degenerate side (m = 0) maps to itself.
 */
export function fisheyeX(
  x: number,
  focus: number,
  distortion: number,
  extent: [number, number],
): number {
  const [lo, hi] = extent;
  if (distortion <= 0) return x;
  const m = x >= focus ? hi - focus : focus - lo;
  if (m <= 0) return x;
  const d = Math.abs(x - focus);
  const stretched = (d * (distortion + 1)) / ((distortion * d) / m + 1);
  return x >= focus ? focus + stretched : focus - stretched;
}
