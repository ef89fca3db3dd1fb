// View-state machine. Every transition is a pure function old -> new, so
// the whole keyboard and decision flow is testable without a browser.
//
// Invariant: editBuffer is non-empty only while mode is "edit".

import type { DecisionBody, DecisionKind, ReviewRecord } from "./types.js";

export interface SessionStats {
  accepted: number;
  rejected: number;
  edited: number;
}

export interface ViewState {
  item: ReviewRecord | null;
  mode: "view" | "edit";
  editBuffer: string;
  pending: DecisionKind | null;
  showSpatial: boolean;
  showInteraction: boolean;
  session: SessionStats;
  banner: string | null;
}

export function initialState(): ViewState {
  return {
    item: null,
    mode: "view",
    editBuffer: "",
    pending: null,
    showSpatial: true,
    showInteraction: true,
    session: { accepted: 0, rejected: 0, edited: 0 },
    banner: null,
  };
}

export function itemLoaded(state: ViewState, item: ReviewRecord | null): ViewState {
  return { ...state, item, mode: "view", editBuffer: "", pending: null, banner: null };
}

// a / r mark a decision; e opens the edit buffer seeded with the current
// answer; Escape abandons any pending choice. Enter is handled by the
// caller (it submits, which is not a state transition).
export function keyPressed(state: ViewState, key: string): ViewState {
  if (!state.item) return state;
  switch (key) {
    case "a":
      return { ...state, pending: "accept", mode: "view", editBuffer: "" };
    case "r":
      return { ...state, pending: "reject", mode: "view", editBuffer: "" };
    case "e":
      return { ...state, pending: "edit", mode: "edit", editBuffer: state.item.answer };
    case "Escape":
      return { ...state, pending: null, mode: "view", editBuffer: "", banner: null };
    default:
      return state;
  }
}

export function editChanged(state: ViewState, text: string): ViewState {
  if (state.mode !== "edit") return state;
  return { ...state, editBuffer: text };
}

export function toggleOverlay(state: ViewState, kind: "spatial" | "interaction"): ViewState {
  if (kind === "spatial") return { ...state, showSpatial: !state.showSpatial };
  return { ...state, showInteraction: !state.showInteraction };
}

// The exact POST body for the pending decision, or null when there is
// nothing submittable (no pending choice, or an edit with a blank buffer).
export function decisionBody(state: ViewState, reviewer?: string): DecisionBody | null {
  if (!state.item || !state.pending) return null;
  if (state.pending === "edit") {
    if (!state.editBuffer.trim()) return null;
    const body: DecisionBody = { decision: "edit", edited_answer: state.editBuffer };
    if (reviewer) body.reviewer = reviewer;
    return body;
  }
  const body: DecisionBody = { decision: state.pending };
  if (reviewer) body.reviewer = reviewer;
  return body;
}

export function decisionSaved(state: ViewState): ViewState {
  const session = { ...state.session };
  if (state.pending === "accept") session.accepted += 1;
  if (state.pending === "reject") session.rejected += 1;
  if (state.pending === "edit") session.edited += 1;
  return { ...state, session, pending: null, mode: "view", editBuffer: "", banner: null };
}

// A failed POST keeps the pending decision so retrying is one keypress.
export function requestFailed(state: ViewState, message: string): ViewState {
  return { ...state, banner: message };
}
