/**
 * Geometry for the supplementary views: ranked bars, the force-directed
 * co-occurrence graph, and the collection arc diagram. All deterministic.
 */

import type { EvolutionPayload, GraphPayload, RankingRow } from "./types.js";

export interface BarGeometry {
  entity: string;
  label: string;
  x: number;
  y: number;
  width: number;
  height: number;
  count: number;
}

export function barsGeometry(
  ranking: RankingRow[],
  width = 240,
  rowHeight = 18,
): BarGeometry[] {
  const max = ranking.length ? ranking[0].count : 1;
  return ranking.map((row, i) => ({
    entity: row.entity,
    label: `${row.canonical} (${row.count})`,
    x: 0,
    y: i * rowHeight,
    width: Math.max(2, (row.count / max) * width),
    height: rowHeight - 4,
    count: row.count,
  }));
}

export interface ForceNode {
  id: string;
  x: number;
  y: number;
  radius: number;
  community: number;
}

export interface ForceEdge {
  a: string;
  b: string;
  weight: number;
}

export interface ForceGeometry {
  nodes: ForceNode[];
  edges: ForceEdge[];
}

/**
 * Small spring-electric layout with a fixed iteration budget and a circular
 * deterministic start (nodes in sorted order), so two runs always agree.
 */
export function forceLayout(
  graph: GraphPayload,
  width = 480,
  height = 360,
  iterations = 200,
): ForceGeometry {
  const ids = graph.nodes.map((n) => n.id).sort();
  const index = new Map(ids.map((id, i) => [id, i]));
  const n = ids.length;
  const cx = width / 2;
  const cy = height / 2;
  const ring = Math.min(width, height) * 0.35;
  const xs = ids.map((_, i) => cx + ring * Math.cos((2 * Math.PI * i) / Math.max(1, n)));
  const ys = ids.map((_, i) => cy + ring * Math.sin((2 * Math.PI * i) / Math.max(1, n)));

  const springs = graph.edges.map((e) => ({
    i: index.get(e.a)!,
    j: index.get(e.b)!,
    weight: e.weight,
  }));
  const ideal = ring / Math.max(1, Math.sqrt(n));
  for (let step = 0; step < iterations; step++) {
    const temperature = 0.08 * (1 - step / iterations) + 0.01;
    const fxs = new Array<number>(n).fill(0);
    const fys = new Array<number>(n).fill(0);
    for (let i = 0; i < n; i++) {
      for (let j = i + 1; j < n; j++) {
        let dx = xs[i] - xs[j];
        let dy = ys[i] - ys[j];
        const dist = Math.max(4, Math.hypot(dx, dy));
        const push = (ideal * ideal) / dist;
        dx /= dist;
        dy /= dist;
        fxs[i] += dx * push;
        fys[i] += dy * push;
        fxs[j] -= dx * push;
        fys[j] -= dy * push;
      }
    }
    for (const s of springs) {
      let dx = xs[s.i] - xs[s.j];
      let dy = ys[s.i] - ys[s.j];
      const dist = Math.max(4, Math.hypot(dx, dy));
      const pull = ((dist - ideal) * Math.log1p(s.weight)) / 2;
      dx /= dist;
      dy /= dist;
      fxs[s.i] -= dx * pull;
      fys[s.i] -= dy * pull;
      fxs[s.j] += dx * pull;
      fys[s.j] += dy * pull;
    }
    for (let i = 0; i < n; i++) {
      xs[i] += fxs[i] * temperature;
      ys[i] += fys[i] * temperature;
      xs[i] = Math.min(width - 12, Math.max(12, xs[i]));
      ys[i] = Math.min(height - 12, Math.max(12, ys[i]));
    }
  }

  const maxWeight = Math.max(1, ...graph.nodes.map((node) => node.weight));
  const byId = new Map(graph.nodes.map((node) => [node.id, node]));
  return {
    nodes: ids.map((id, i) => {
      const node = byId.get(id)!;
      return {
        id,
        x: Math.round(xs[i] * 100) / 100,
        y: Math.round(ys[i] * 100) / 100,
        radius: 4 + 10 * Math.sqrt(node.weight / maxWeight),
        community: node.community,
      };
    }),
    edges: graph.edges.map((e) => ({ a: e.a, b: e.b, weight: e.weight })),
  };
}

export interface ArcGeometry {
  nodes: {
    entity: string;
    label: string;
    x: number;
    colorIndex: number;
  }[];
  arcs: { path: string; width: number; a: string; b: string }[];
  width: number;
}

/** Date-ordered baseline with semicircular arcs above it. */
export function arcDiagram(evolution: EvolutionPayload, gap = 64): ArcGeometry {
  const positions = new Map(evolution.nodes.map((n) => [n.entity, (n.x + 1) * gap]));
  const maxWeight = Math.max(1, ...evolution.arcs.map((a) => a.weight));
  const arcs = evolution.arcs
    .filter((a) => positions.has(a.a) && positions.has(a.b))
    .map((a) => {
      const x1 = Math.min(positions.get(a.a)!, positions.get(a.b)!);
      const x2 = Math.max(positions.get(a.a)!, positions.get(a.b)!);
      const r = (x2 - x1) / 2;
      return {
        path: `M${x1},0A${r},${r} 0 0 1 ${x2},0`,
        width: 1 + 5 * (a.weight / maxWeight),
        a: a.a,
        b: a.b,
      };
    });
  return {
    nodes: evolution.nodes.map((n) => ({
      entity: n.entity,
      label: n.canonical,
      x: positions.get(n.entity)!,
      colorIndex: n.origin_color_index,
    })),
    arcs,
    width: (evolution.nodes.length + 1) * gap,
  };
}

export const DOC_COLORS = ["#4c78a8", "#f58518", "#54a24b", "#b279a2", "#e45756", "#72b7b2"];

export function docColor(colorIndex: number): string {
  return DOC_COLORS[colorIndex % DOC_COLORS.length];
}

export const COMMUNITY_COLORS = [
  "#4c78a8", "#f58518", "#54a24b", "#e45756", "#b279a2",
  "#72b7b2", "#ff9da6", "#9d755d", "#bab0ac", "#d67195",
];

export function communityColor(community: number): string {
  return COMMUNITY_COLORS[community % COMMUNITY_COLORS.length];
}
