/** Pure view-model construction for the network panel. Everything shown
 * comes from the network document and the latest snapshot; positions are
 * presentation only. */

import { CANVAS, layoutFor, Point, undirectedEdges } from "./layout.js";
import { NetworkDoc, SCHEMA_VERSION, Snapshot } from "./types.js";

export interface NodeView {
  id: number;
  x: number;
  y: number;
  closed: boolean;
}

export interface EdgeView {
  a: number;
  b: number;
  length: number;
}

export interface CoverageRegionView {
  uatm: number;
  vertiports: number[];
  segments: { from: number; to: number; range: [number, number] }[];
  center: Point;
  radius: number;
}

export interface AgentMarkerView {
  id: number;
  corridor: [number, number];
  waypoint: number;
  fraction: number;
  x: number;
  y: number;
  target: number;
}

export interface NetworkView {
  banner: string | null;
  nodes: NodeView[];
  edges: EdgeView[];
  coverage: CoverageRegionView[];
  agents: AgentMarkerView[];
}

function corridorLength(network: NetworkDoc, from: number, to: number): number {
  const corridor = network.corridors.find(
    (c) => c.from === from && c.to === to,
  );
  return corridor ? corridor.length : 1;
}

function boundRange(
  bound: "all" | { max: number } | { min: number },
  length: number,
): [number, number] {
  if (bound === "all") return [1, length];
  if ("max" in bound) return [1, bound.max];
  return [bound.min, length];
}

export function renderNetwork(
  network: NetworkDoc,
  snapshot: Snapshot,
): NetworkView {
  if (network.schema !== SCHEMA_VERSION || snapshot.schema !== SCHEMA_VERSION) {
    return {
      banner:
        `schema mismatch: console speaks v${SCHEMA_VERSION}, service sent ` +
        `v${network.schema !== SCHEMA_VERSION ? network.schema : snapshot.schema}`,
      nodes: [],
      edges: [],
      coverage: [],
      agents: [],
    };
  }
  const layout = layoutFor(network);
  const closed = new Set(
    snapshot.vertiports.filter((v) => v.closed).map((v) => v.id),
  );
  const nodes: NodeView[] = network.vertiports.map((id) => ({
    id,
    x: layout[id]!.x,
    y: layout[id]!.y,
    closed: closed.has(id),
  }));

  const edges: EdgeView[] = undirectedEdges(network).map(([a, b]) => ({
    a,
    b,
    length: corridorLength(network, a, b),
  }));

  const coverage: CoverageRegionView[] = network.uatms.map((uatm) => {
    const segments = network.coverage
      .filter((segment) => segment.uatm === uatm)
      .map((segment) => ({
        from: segment.from,
        to: segment.to,
        range: boundRange(
          segment.bound,
          corridorLength(network, segment.from, segment.to),
        ),
      }));
    const vertiports = network.vertiport_cover[String(uatm)] ?? [];
    const touched = new Set<number>(vertiports);
    for (const segment of segments) {
      touched.add(segment.from);
      touched.add(segment.to);
    }
    const points = [...touched].map((id) => layout[id]!).filter(Boolean);
    const center = points.length
      ? {
          x: points.reduce((s, p) => s + p.x, 0) / points.length,
          y: points.reduce((s, p) => s + p.y, 0) / points.length,
        }
      : { x: CANVAS.width / 2, y: CANVAS.height / 2 };
    const radius = points.length
      ? Math.max(
          60,
          ...points.map((p) => Math.hypot(p.x - center.x, p.y - center.y) + 50),
        )
      : 60;
    return { uatm, vertiports, segments, center, radius };
  });

  const agents: AgentMarkerView[] = snapshot.agents.map((agent) => {
    const [from, to] = agent.corridor;
    const length = corridorLength(network, from, to);
    const fraction = Math.min(Math.max(agent.waypoint / length, 0), 1);
    const start = layout[from]!;
    const end = layout[to]!;
    return {
      id: agent.id,
      corridor: agent.corridor,
      waypoint: agent.waypoint,
      fraction,
      x: start.x + (end.x - start.x) * fraction,
      y: start.y + (end.y - start.y) * fraction,
      target: agent.target,
    };
  });

  return { banner: null, nodes, edges, coverage, agents };
}

/** Lower a view to a static SVG string. */
export function renderSvg(view: NetworkView): string {
  if (view.banner) {
    return (
      `<svg xmlns="http://www.w3.org/2000/svg" width="${CANVAS.width}" ` +
      `height="80"><text x="20" y="45" class="banner">${view.banner}</text></svg>`
    );
  }
  const parts: string[] = [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${CANVAS.width}" ` +
    `height="${CANVAS.height}" viewBox="0 0 ${CANVAS.width} ${CANVAS.height}">`,
  ];
  const byId = new Map(view.nodes.map((n) => [n.id, n]));
  for (const region of view.coverage) {
    parts.push(
      `<circle class="coverage uatm-${region.uatm}" cx="${region.center.x.toFixed(1)}" ` +
      `cy="${region.center.y.toFixed(1)}" r="${region.radius.toFixed(1)}"/>`,
    );
  }
  for (const edge of view.edges) {
    const a = byId.get(edge.a)!;
    const b = byId.get(edge.b)!;
    parts.push(
      `<line class="corridor" x1="${a.x}" y1="${a.y}" x2="${b.x}" y2="${b.y}"/>`,
    );
  }
  for (const node of view.nodes) {
    const cls = node.closed ? "vertiport closed" : "vertiport";
    parts.push(
      `<circle class="${cls}" cx="${node.x}" cy="${node.y}" r="18"/>` +
      `<text x="${node.x}" y="${node.y + 5}" text-anchor="middle">vp${node.id}</text>`,
    );
  }
  for (const agent of view.agents) {
    parts.push(
      `<circle class="agent" cx="${agent.x.toFixed(1)}" ` +
      `cy="${agent.y.toFixed(1)}" r="6"/>` +
      `<text x="${agent.x.toFixed(1)}" y="${(agent.y - 10).toFixed(1)}" ` +
      `text-anchor="middle" class="agent-label">a${agent.id}</text>`,
    );
  }
  parts.push("</svg>");
  return parts.join("\n");
}
