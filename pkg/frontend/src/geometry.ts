/**
 * Pure geometry for the storyline canvas: a function of (layout JSON,
 * view state) and nothing else, so it can be snapshot-tested headlessly.
 */

import { fisheyeX } from "./fisheye.js";
import type { FisheyeState, ViewState } from "./state.js";
import type { StorylineJson } from "./types.js";

export interface LifelineGeometry {
  entity: string;
  color: string;
  width: number;
  opacity: number;
  points: [number, number][];
  path: string;
  labelX: number;
  labelY: number;
}

export interface SceneRectGeometry {
  sceneIndex: number;
  x: number;
  y: number;
  width: number;
  height: number;
  shade: number;
  selected: boolean;
}

export interface StorylineGeometry {
  extent: [number, number];
  height: number;
  lifelines: LifelineGeometry[];
  scenes: SceneRectGeometry[];
  separators: { x: number; title: string }[];
  indicators: { x: number; width: number; shade: number; sceneIndex: number }[];
}

export function xExtent(layout: StorylineJson): [number, number] {
  const xs = [
    ...layout.lifelines.flatMap((l) => l.anchors.map((a) => a[0])),
    ...layout.indicators.map((i) => i.x),
    ...layout.scenes.flatMap((s) => [s.rect[0], s.rect[2]]),
  ];
  if (!xs.length) return [0, 1];
  return [Math.min(...xs), Math.max(...xs)];
}

function warp(fisheye: FisheyeState, extent: [number, number]) {
  if (!fisheye.enabled) return (x: number) => x;
  return (x: number) => fisheyeX(x, fisheye.focusX, fisheye.distortion, extent);
}

/** Fritsch-Carlson monotone cubic through the points, as an SVG path. */
export function monotonePath(points: [number, number][]): string {
  if (points.length === 0) return "";
  if (points.length === 1) {
    const [x, y] = points[0];
    return `M${round(x)},${round(y)}`;
  }
  const n = points.length;
  const dx: number[] = [];
  const slope: number[] = [];
  for (let i = 0; i < n - 1; i++) {
    dx.push(points[i + 1][0] - points[i][0]);
    slope.push((points[i + 1][1] - points[i][1]) / (dx[i] || 1e-9));
  }
  const m: number[] = [slope[0]];
  for (let i = 1; i < n - 1; i++) {
    if (slope[i - 1] * slope[i] <= 0) {
      m.push(0);
    } else {
      const w1 = 2 * dx[i] + dx[i - 1];
      const w2 = dx[i] + 2 * dx[i - 1];
      m.push((w1 + w2) / (w1 / slope[i - 1] + w2 / slope[i]));
    }
  }
  m.push(slope[n - 2]);
  let d = `M${round(points[0][0])},${round(points[0][1])}`;
  for (let i = 0; i < n - 1; i++) {
    const [x0, y0] = points[i];
    const [x1, y1] = points[i + 1];
    const h = dx[i] / 3;
    d += `C${round(x0 + h)},${round(y0 + h * m[i])} ${round(x1 - h)},${round(
      y1 - h * m[i + 1],
    )} ${round(x1)},${round(y1)}`;
  }
  return d;
}

function round(value: number): number {
  return Math.round(value * 100) / 100;
}

export function storylineGeometry(
  layout: StorylineJson,
  state: ViewState,
): StorylineGeometry {
  const extent = xExtent(layout);
  const fx = warp(state.fisheye, extent);
  const hasSelection = state.selectedEntities.size > 0;

  const lifelines: LifelineGeometry[] = layout.lifelines.map((l) => {
    const points = l.anchors.map(([x, y]) => [fx(x), y] as [number, number]);
    const selected = state.selectedEntities.has(l.entity);
    const first = points[0] ?? [0, 0];
    return {
      entity: l.entity,
      color: l.color,
      width: l.width,
      opacity: !hasSelection || selected ? 1.0 : 0.25,
      points,
      path: monotonePath(points),
      labelX: first[0],
      labelY: first[1],
    };
  });

  const scenes: SceneRectGeometry[] = layout.scenes.map((s) => {
    const [x0, y0, x1, y1] = s.rect;
    const left = fx(x0);
    const right = fx(x1);
    return {
      sceneIndex: s.i,
      x: left,
      y: y0,
      width: Math.max(2, right - left),
      height: Math.max(2, y1 - y0),
      shade: s.shade,
      selected: state.selectedScene === s.i,
    };
  });

  const ys = layout.lifelines.flatMap((l) => l.anchors.map((a) => a[1]));
  const height = ys.length ? Math.max(...ys) : 0;

  const step =
    layout.indicators.length > 1
      ? layout.indicators[1].x - layout.indicators[0].x
      : 24;
  return {
    extent,
    height,
    lifelines,
    scenes,
    separators: layout.separators.map((sep) => ({ x: fx(sep.x), title: sep.title })),
    indicators: layout.indicators.map((ind, i) => ({
      x: fx(ind.x),
      width: Math.max(4, step * 0.7),
      shade: ind.shade,
      sceneIndex: layout.scenes[i]?.i ?? i,
    })),
  };
}

/** Grayscale fill for the indicator row; shade 0 stays white. */
export function shadeColor(shade: number): string {
  const level = Math.round(255 - 205 * Math.min(1, Math.max(0, shade)));
  const hex = level.toString(16).padStart(2, "0");
  return `#${hex}${hex}${hex}`;
}
