// Browser entry point: binds the controller to the static page shell.

import { ApiClient } from "./api.js";
import { App } from "./app.js";
import { computeEdgeLines, computeOverlays } from "./overlays.js";
import { renderOverlays } from "./render.js";
import { displayName } from "./types.js";
import type { EntityPayload, ReviewRecord } from "./types.js";

const params = new URLSearchParams(window.location.search);
const base = params.get("service") ?? "http://127.0.0.1:8765";
const reviewer = params.get("reviewer") ?? undefined;

const api = new ApiClient(base, (input, init) => window.fetch(input, init));

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

const banner = el<HTMLDivElement>("banner");
const statsLine = el<HTMLDivElement>("stats");
const question = el<HTMLDivElement>("question");
const answer = el<HTMLDivElement>("answer");
const editBox = el<HTMLTextAreaElement>("edit-box");
const triples = el<HTMLUListElement>("triples");
const image = el<HTMLImageElement>("image");
const viewport = el<HTMLDivElement>("viewport");
const overlayLayer = el<HTMLDivElement>("overlay-layer");
const emptyNote = el<HTMLDivElement>("empty");
const buttons = {
  accept: el<HTMLButtonElement>("btn-accept"),
  reject: el<HTMLButtonElement>("btn-reject"),
  edit: el<HTMLButtonElement>("btn-edit"),
  save: el<HTMLButtonElement>("btn-save"),
};
const toggles = {
  spatial: el<HTMLInputElement>("toggle-spatial"),
  interaction: el<HTMLInputElement>("toggle-interaction"),
};

let renderedImageFor: string | null = null;

function entityName(item: ReviewRecord, id: string): string {
  const entity = item.final_graph.entities.find((e: EntityPayload) => e.id === id);
  return entity ? displayName(entity) : id;
}

function drawOverlays(app: App): void {
  const item = app.state.item;
  if (!item) {
    overlayLayer.replaceChildren();
    return;
  }
  const width = viewport.clientWidth || 520;
  const height = viewport.clientHeight || 390;
  const boxes = computeOverlays(item.final_graph, width, height);
  const lines = computeEdgeLines(item.final_graph, width, height, {
    spatial: app.state.showSpatial,
    interaction: app.state.showInteraction,
  });
  renderOverlays(document, overlayLayer, boxes, lines, width, height);
}

function render(app: App): void {
  const state = app.state;
  banner.textContent = state.banner ?? "";
  banner.style.display = state.banner ? "block" : "none";

  const server = app.stats
    ? `${app.stats.unreviewed} waiting of ${app.stats.total}`
    : "service stats unavailable";
  const s = state.session;
  statsLine.textContent =
    `${server} | this session: ${s.accepted} accepted, ${s.rejected} rejected, ${s.edited} edited`;

  const item = state.item;
  emptyNote.style.display = item ? "none" : "block";
  if (!item) {
    question.textContent = "";
    answer.textContent = "";
    triples.replaceChildren();
    overlayLayer.replaceChildren();
    image.removeAttribute("src");
    renderedImageFor = null;
    return;
  }

  question.textContent = `Q: ${item.question}`;
  answer.textContent = `A: ${item.answer}`;
  answer.style.display = state.mode === "edit" ? "none" : "block";
  editBox.style.display = state.mode === "edit" ? "block" : "none";
  if (state.mode === "edit" && editBox.value !== state.editBuffer) {
    editBox.value = state.editBuffer;
    editBox.focus();
  }

  const rows: HTMLLIElement[] = [];
  for (const edge of item.final_graph.edges) {
    if (edge.kind === "spatial" && !state.showSpatial) continue;
    if (edge.kind === "interaction" && !state.showInteraction) continue;
    const li = document.createElement("li");
    li.className = `triple ${edge.kind}`;
    li.textContent =
      `${entityName(item, edge.subject)} ${edge.predicate} ${entityName(item, edge.object)}`;
    rows.push(li);
  }
  triples.replaceChildren(...rows);

  buttons.accept.classList.toggle("pending", state.pending === "accept");
  buttons.reject.classList.toggle("pending", state.pending === "reject");
  buttons.edit.classList.toggle("pending", state.pending === "edit");
  buttons.save.disabled = !state.pending;

  if (renderedImageFor !== item.record_id) {
    renderedImageFor = item.record_id;
    image.src = api.imageUrl(item.image_ref);
  }
  drawOverlays(app);
}

const app = new App(api, render, reviewer);

image.addEventListener("load", () => drawOverlays(app));
image.addEventListener("error", () => {
  // No image behind this ref; overlays still render over the blank frame.
  image.removeAttribute("src");
  drawOverlays(app);
});
window.addEventListener("resize", () => drawOverlays(app));

document.addEventListener("keydown", (event) => {
  if (event.target === editBox) {
    if (event.key === "Escape") void app.handleKey("Escape");
    if (event.key === "Enter" && event.ctrlKey) void app.handleKey("Enter");
    return;
  }
  if (["a", "r", "e", "Enter", "Escape"].includes(event.key)) {
    event.preventDefault();
    void app.handleKey(event.key);
  }
});

buttons.accept.addEventListener("click", () => void app.handleKey("a"));
buttons.reject.addEventListener("click", () => void app.handleKey("r"));
buttons.edit.addEventListener("click", () => void app.handleKey("e"));
buttons.save.addEventListener("click", () => void app.handleKey("Enter"));
editBox.addEventListener("input", () => app.setEditText(editBox.value));
toggles.spatial.addEventListener("change", () => app.toggle("spatial"));
toggles.interaction.addEventListener("change", () => app.toggle("interaction"));

void app.start();
