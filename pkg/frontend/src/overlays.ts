// Overlay geometry. Pure functions from a graph payload plus the displayed
// image size to pixel-space boxes and lines; the DOM layer just draws what
// these return.

import { displayName } from "./types.js";
import type { EntityPayload, GraphPayload } from "./types.js";

export interface OverlayBox {
  entityId: string;
  label: string;
  left: number;
  top: number;
  width: number;
  height: number;
  questionMentioned: boolean;
}

export interface EdgeLine {
  x1: number;
  y1: number;
  x2: number;
  y2: number;
  kind: "spatial" | "interaction";
  title: string;
}

export interface OverlayToggles {
  spatial: boolean;
  interaction: boolean;
}

export const EDGE_COLORS: Record<"spatial" | "interaction", string> = {
  spatial: "#3d8bd4",
  interaction: "#e0662b",
};

// Bboxes are normalized [x1, y1, x2, y2] with 0,0 at the top left.
export function computeOverlays(
  graph: GraphPayload,
  width: number,
  height: number,
): OverlayBox[] {
  const out: OverlayBox[] = [];
  for (const entity of graph.entities) {
    if (!entity.bbox) continue;
    const [x1, y1, x2, y2] = entity.bbox;
    out.push({
      entityId: entity.id,
      label: displayName(entity),
      left: x1 * width,
      top: y1 * height,
      width: (x2 - x1) * width,
      height: (y2 - y1) * height,
      questionMentioned: entity.question_mentioned,
    });
  }
  return out;
}

function center(e: EntityPayload, width: number, height: number): [number, number] {
  const [x1, y1, x2, y2] = e.bbox as [number, number, number, number];
  return [((x1 + x2) / 2) * width, ((y1 + y2) / 2) * height];
}

export function computeEdgeLines(
  graph: GraphPayload,
  width: number,
  height: number,
  toggles: OverlayToggles,
): EdgeLine[] {
  const byId = new Map(graph.entities.map((e) => [e.id, e]));
  const out: EdgeLine[] = [];
  for (const edge of graph.edges) {
    if (edge.kind === "spatial" && !toggles.spatial) continue;
    if (edge.kind === "interaction" && !toggles.interaction) continue;
    const s = byId.get(edge.subject);
    const o = byId.get(edge.object);
    // Only draw lines with two anchored endpoints.
    if (!s?.bbox || !o?.bbox) continue;
    const [x1, y1] = center(s, width, height);
    const [x2, y2] = center(o, width, height);
    out.push({
      x1,
      y1,
      x2,
      y2,
      kind: edge.kind,
      title: `${displayName(s)} ${edge.predicate} ${displayName(o)}`,
    });
  }
  return out;
}
