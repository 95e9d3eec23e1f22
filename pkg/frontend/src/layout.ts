/** Vertiport positions for the network view.
 *
 * The bundled seven-vertiport network gets a hand-placed layout; any
 * other network falls back to a deterministic force-directed embedding
 * (fixed circular seed, fixed iteration count, no randomness). */

import { NetworkDoc } from "./types.js";

export interface Point {
  x: number;
  y: number;
}

export const CANVAS = { width: 1000, height: 600 };

const BUNDLED_SIGNATURE = "1,2,3,4,5,6,7";

const BUNDLED_LAYOUT: Record<number, Point> = {
  1: { x: 100, y: 80 },
  2: { x: 250, y: 80 },
  3: { x: 150, y: 320 },
  4: { x: 420, y: 490 },
  5: { x: 660, y: 420 },
  6: { x: 860, y: 240 },
  7: { x: 460, y: 200 },
};

function signature(network: NetworkDoc): string {
  return [...network.vertiports].sort((a, b) => a - b).join(",");
}

function undirectedEdges(network: NetworkDoc): [number, number][] {
  const seen = new Set<string>();
  const edges: [number, number][] = [];
  for (const corridor of network.corridors) {
    const a = Math.min(corridor.from, corridor.to);
    const b = Math.max(corridor.from, corridor.to);
    const key = `${a}-${b}`;
    if (!seen.has(key)) {
      seen.add(key);
      edges.push([a, b]);
    }
  }
  return edges;
}

function forceLayout(network: NetworkDoc): Record<number, Point> {
  const ids = [...network.vertiports].sort((a, b) => a - b);
  const cx = CANVAS.width / 2;
  const cy = CANVAS.height / 2;
  const radius = Math.min(cx, cy) * 0.8;
  const points: Record<number, Point> = {};
  ids.forEach((id, i) => {
    const angle = (2 * Math.PI * i) / ids.length;
    points[id] = {
      x: cx + radius * Math.cos(angle),
      y: cy + radius * Math.sin(angle),
    };
  });
  const edges = undirectedEdges(network);
  const ideal = radius;
  for (let iteration = 0; iteration < 200; iteration++) {
    const forces: Record<number, Point> = {};
    for (const id of ids) {
      forces[id] = { x: 0, y: 0 };
    }
    for (const a of ids) {
      for (const b of ids) {
        if (a >= b) continue;
        const dx = points[b]!.x - points[a]!.x;
        const dy = points[b]!.y - points[a]!.y;
        const dist = Math.max(Math.hypot(dx, dy), 1);
        const repulsion = (ideal * ideal) / dist;
        forces[a]!.x -= (dx / dist) * repulsion;
        forces[a]!.y -= (dy / dist) * repulsion;
        forces[b]!.x += (dx / dist) * repulsion;
        forces[b]!.y += (dy / dist) * repulsion;
      }
    }
    for (const [a, b] of edges) {
      const dx = points[b]!.x - points[a]!.x;
      const dy = points[b]!.y - points[a]!.y;
      const dist = Math.max(Math.hypot(dx, dy), 1);
      const attraction = (dist * dist) / ideal;
      forces[a]!.x += (dx / dist) * attraction;
      forces[a]!.y += (dy / dist) * attraction;
      forces[b]!.x -= (dx / dist) * attraction;
      forces[b]!.y -= (dy / dist) * attraction;
    }
    const step = 0.02;
    for (const id of ids) {
      points[id]!.x += forces[id]!.x * step;
      points[id]!.y += forces[id]!.y * step;
      points[id]!.x = Math.min(Math.max(points[id]!.x, 40), CANVAS.width - 40);
      points[id]!.y = Math.min(Math.max(points[id]!.y, 40), CANVAS.height - 40);
    }
  }
  return points;
}

export function layoutFor(network: NetworkDoc): Record<number, Point> {
  if (signature(network) === BUNDLED_SIGNATURE) {
    const copy: Record<number, Point> = {};
    for (const id of network.vertiports) {
      copy[id] = { ...BUNDLED_LAYOUT[id]! };
    }
    return copy;
  }
  return forceLayout(network);
}

export { undirectedEdges };
