import { describe, expect, it } from "vitest";

import { computeEdgeLines, computeOverlays } from "../src/overlays.js";
import { displayName } from "../src/types.js";
import { frisbeeRecord } from "./fixtures.js";

const graph = frisbeeRecord().final_graph;

describe("computeOverlays", () => {
  it("emits one box per grounded entity", () => {
    const boxes = computeOverlays(graph, 500, 400);
    expect(boxes).toHaveLength(2);
    expect(boxes.map((b) => b.entityId)).toEqual(["e1", "e3"]);
  });

  it("scales normalized corners to the displayed size", () => {
    const boxes = computeOverlays(graph, 500, 400);
    const player = boxes[0]!;
    expect(player.left).toBeCloseTo(50, 10);
    expect(player.top).toBeCloseTo(80, 10);
    expect(player.width).toBeCloseTo(100, 10);
    expect(player.height).toBeCloseTo(280, 10);
  });

  it("labels boxes with the qualified display name", () => {
    const boxes = computeOverlays(graph, 100, 100);
    expect(boxes.map((b) => b.label)).toEqual(["player in black", "frisbee"]);
    expect(boxes[1]!.questionMentioned).toBe(true);
  });

  it("returns nothing for a fully ungrounded graph", () => {
    const bare = {
      entities: graph.entities.map((e) => ({ ...e, bbox: null })),
      edges: graph.edges,
    };
    expect(computeOverlays(bare, 500, 400)).toEqual([]);
  });
});

describe("computeEdgeLines", () => {
  const both = { spatial: true, interaction: true };

  it("draws only edges whose two endpoints have boxes", () => {
    const lines = computeEdgeLines(graph, 500, 400, both);
    expect(lines).toHaveLength(1);
    expect(lines[0]!.kind).toBe("interaction");
    expect(lines[0]!.title).toBe("player in black reaches for frisbee");
  });

  it("connects box centers", () => {
    const line = computeEdgeLines(graph, 500, 400, both)[0]!;
    expect(line.x1).toBeCloseTo(100, 10); // (0.1 + 0.3) / 2 * 500
    expect(line.y1).toBeCloseTo(220, 10); // (0.2 + 0.9) / 2 * 400
    expect(line.x2).toBeCloseTo(225, 10);
    expect(line.y2).toBeCloseTo(46, 10);
  });

  it("honors the per-kind toggles", () => {
    expect(
      computeEdgeLines(graph, 500, 400, { spatial: true, interaction: false }),
    ).toHaveLength(0);
    const spatialOnly = computeEdgeLines(graph, 500, 400, {
      spatial: false,
      interaction: true,
    });
    expect(spatialOnly.every((l) => l.kind === "interaction")).toBe(true);
  });
});

describe("displayName", () => {
  it("joins the label with its qualifiers", () => {
    expect(displayName(graph.entities[0]!)).toBe("player in black");
    expect(displayName(graph.entities[1]!)).toBe("grass");
  });
});
