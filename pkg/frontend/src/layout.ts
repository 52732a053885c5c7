/** Deterministic radial layout for an ego graph.
 *
 * The center sits in the middle; neighbor concepts are placed clockwise on a
 * circle in the order their edges appear in the API response (which is
 * already sorted by support).  Parallel edges between the same pair get
 * staggered label anchors so both predicates stay readable.
 */

import type { EgoGraph } from "./api.js";

export interface NodePlacement {
  key: string;
  x: number;
  y: number;
  isCenter: boolean;
}

export interface EdgePlacement {
  id: string;
  from: string;
  to: string;
  predicate: string;
  support: number;
  hasConditions: boolean;
  outgoing: boolean;
  x1: number;
  y1: number;
  x2: number;
  y2: number;
  labelX: number;
  labelY: number;
}

export interface EgoLayout {
  nodes: NodePlacement[];
  edges: EdgePlacement[];
}

export function layoutEgo(
  graph: EgoGraph,
  centerKey: string,
  width: number,
  height: number,
): EgoLayout {
  const cx = width / 2;
  const cy = height / 2;
  const radius = Math.max(80, Math.min(width, height) / 2 - 80);

  const neighborKeys: string[] = [];
  for (const edge of graph.edges) {
    const other = edge.subj_key === centerKey ? edge.obj_key : edge.subj_key;
    if (other !== centerKey && !neighborKeys.includes(other)) {
      neighborKeys.push(other);
    }
  }

  const pos = new Map<string, { x: number; y: number }>();
  pos.set(centerKey, { x: cx, y: cy });
  neighborKeys.forEach((key, i) => {
    const angle = -Math.PI / 2 + (2 * Math.PI * i) / Math.max(neighborKeys.length, 1);
    pos.set(key, {
      x: cx + radius * Math.cos(angle),
      y: cy + radius * Math.sin(angle),
    });
  });

  const nodes: NodePlacement[] = [
    { key: centerKey, x: cx, y: cy, isCenter: true },
    ...neighborKeys.map((key) => {
      const p = pos.get(key)!;
      return { key, x: p.x, y: p.y, isCenter: false };
    }),
  ];

  const parallelSeen = new Map<string, number>();
  const edges: EdgePlacement[] = graph.edges.map((edge) => {
    const outgoing = edge.subj_key === centerKey;
    const otherKey = outgoing ? edge.obj_key : edge.subj_key;
    const other = pos.get(otherKey) ?? { x: cx, y: cy - radius / 2 };
    const from = outgoing ? pos.get(centerKey)! : other;
    const to = outgoing ? other : pos.get(centerKey)!;
    const k = parallelSeen.get(otherKey) ?? 0;
    parallelSeen.set(otherKey, k + 1);
    const t = 0.5 + 0.14 * k;
    return {
      id: edge.id,
      from: outgoing ? centerKey : otherKey,
      to: outgoing ? otherKey : centerKey,
      predicate: edge.pred_lemma,
      support: edge.support,
      hasConditions: edge.conditions.length > 0,
      outgoing,
      x1: from.x,
      y1: from.y,
      x2: to.x,
      y2: to.y,
      labelX: from.x + (to.x - from.x) * t,
      labelY: from.y + (to.y - from.y) * t - 6,
    };
  });

  return { nodes, edges };
}
