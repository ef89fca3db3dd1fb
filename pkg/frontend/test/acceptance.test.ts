// The two shipped guarantees for the review client, end to end against the
// fixture service: overlay cardinality for grounded entities, and the exact
// decision bytes for each keyboard flow.

import { describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { App } from "../src/app.js";
import { computeEdgeLines, computeOverlays } from "../src/overlays.js";
import { renderOverlays } from "../src/render.js";
import type { RenderDoc, RenderElement } from "../src/render.js";
import { frisbeeRecord, secondRecord } from "./fixtures.js";
import { fixtureService } from "./service.js";

class CountingElement implements RenderElement {
  children: CountingElement[] = [];
  attrs: Record<string, string> = {};
  textContent: string | null = null;
  constructor(public tag: string) {}
  appendChild(child: RenderElement): unknown {
    this.children.push(child as CountingElement);
    return child;
  }
  setAttribute(name: string, value: string): void {
    this.attrs[name] = value;
  }
  replaceChildren(...children: RenderElement[]): void {
    this.children = children as CountingElement[];
  }
}

const doc: RenderDoc = {
  createElement: (tag) => new CountingElement(tag),
  createElementNS: (_ns, tag) => new CountingElement(tag),
};

describe("review client acceptance", () => {
  it("an item with 2 grounded entities renders exactly 2 overlay boxes, labels shown", async () => {
    const service = fixtureService([frisbeeRecord()]);
    const app = new App(new ApiClient("http://fixture.test", service.fetchFn), () => {});
    await app.start();

    const graph = app.state.item!.final_graph;
    expect(graph.entities.filter((e) => e.bbox).length).toBe(2);

    const layer = new CountingElement("div");
    renderOverlays(
      doc,
      layer,
      computeOverlays(graph, 640, 480),
      computeEdgeLines(graph, 640, 480, {
        spatial: app.state.showSpatial,
        interaction: app.state.showInteraction,
      }),
      640,
      480,
    );
    const boxes = layer.children.filter((c) => c.tag === "div");
    expect(boxes).toHaveLength(2);
    expect(boxes.map((b) => b.children[0]!.textContent)).toEqual([
      "player in black",
      "frisbee",
    ]);
  });

  it("keyboard accept, reject, and edit produce the exact service JSON bodies", async () => {
    const service = fixtureService([
      frisbeeRecord(),
      secondRecord(),
      frisbeeRecord({ record_id: "cccc666677778888" }),
    ]);
    const app = new App(new ApiClient("http://fixture.test", service.fetchFn), () => {});
    await app.start();

    await app.handleKey("a");
    await app.handleKey("Enter");
    await app.handleKey("r");
    await app.handleKey("Enter");
    await app.handleKey("e");
    app.setEditText("player in white catches the frisbee.");
    await app.handleKey("Enter");

    expect(service.posts.map((p) => p.body)).toEqual([
      '{"decision":"accept"}',
      '{"decision":"reject"}',
      '{"decision":"edit","edited_answer":"player in white catches the frisbee."}',
    ]);
    expect(app.state.item).toBeNull();
    expect(app.stats).toEqual({
      total: 3,
      unreviewed: 0,
      accepted: 1,
      rejected: 1,
      edited: 1,
    });
  });
});
