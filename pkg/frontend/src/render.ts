// DOM drawing for the overlay layer. The document is passed in through a
// minimal interface so tests can count what gets drawn without a browser.

import { EDGE_COLORS } from "./overlays.js";
import type { EdgeLine, OverlayBox } from "./overlays.js";

// Child parameters are deliberately loose: the real DOM's appendChild is
// generic over Node, which a narrower structural type would reject.
export interface RenderElement {
  textContent: string | null;
  appendChild(child: any): unknown;
  setAttribute(name: string, value: string): void;
  replaceChildren(...children: any[]): void;
}

export interface RenderDoc {
  createElement(tag: string): RenderElement;
  createElementNS(ns: string, tag: string): RenderElement;
}

const SVG_NS = "http://www.w3.org/2000/svg";

function px(n: number): string {
  return `${Math.round(n * 100) / 100}px`;
}

// One absolutely positioned div per box, plus a single svg carrying the
// edge lines. The layer is cleared and rebuilt on every call.
export function renderOverlays(
  doc: RenderDoc,
  layer: RenderElement,
  boxes: OverlayBox[],
  lines: EdgeLine[],
  width: number,
  height: number,
): void {
  const children: RenderElement[] = [];

  if (lines.length) {
    const svg = doc.createElementNS(SVG_NS, "svg");
    svg.setAttribute("class", "edge-layer");
    svg.setAttribute("width", String(width));
    svg.setAttribute("height", String(height));
    for (const line of lines) {
      const el = doc.createElementNS(SVG_NS, "line");
      el.setAttribute("x1", String(line.x1));
      el.setAttribute("y1", String(line.y1));
      el.setAttribute("x2", String(line.x2));
      el.setAttribute("y2", String(line.y2));
      el.setAttribute("stroke", EDGE_COLORS[line.kind]);
      el.setAttribute("data-kind", line.kind);
      const title = doc.createElementNS(SVG_NS, "title");
      title.textContent = line.title;
      el.appendChild(title);
      svg.appendChild(el);
    }
    children.push(svg);
  }

  for (const box of boxes) {
    const div = doc.createElement("div");
    div.setAttribute("class", box.questionMentioned ? "overlay-box question" : "overlay-box");
    div.setAttribute(
      "style",
      `left:${px(box.left)};top:${px(box.top)};width:${px(box.width)};height:${px(box.height)}`,
    );
    const label = doc.createElement("span");
    label.setAttribute("class", "overlay-label");
    label.textContent = box.label;
    div.appendChild(label);
    children.push(div);
  }

  layer.replaceChildren(...children);
}
