// Controller: owns the view state, talks to the service, and notifies the
// rendering layer after every change. No DOM types in here.

import { ApiClient } from "./api.js";
import {
  decisionBody,
  decisionSaved,
  editChanged,
  initialState,
  itemLoaded,
  keyPressed,
  requestFailed,
  toggleOverlay,
} from "./state.js";
import type { ViewState } from "./state.js";
import type { ReviewRecord, StatsPayload } from "./types.js";

export class App {
  state: ViewState = initialState();
  stats: StatsPayload | null = null;
  private submitting = false;

  constructor(
    private readonly api: ApiClient,
    private readonly onChange: (app: App) => void,
    private readonly reviewer?: string,
  ) {}

  private update(next: ViewState): void {
    this.state = next;
    this.onChange(this);
  }

  async start(): Promise<void> {
    await this.refreshStats();
    let first: ReviewRecord | null;
    try {
      first = (await this.api.queue(1))[0] ?? null;
    } catch {
      this.update(requestFailed(this.state, "cannot reach the review service; press Enter to retry"));
      return;
    }
    this.update(itemLoaded(this.state, first));
  }

  async refreshStats(): Promise<void> {
    try {
      this.stats = await this.api.stats();
    } catch {
      this.stats = null;
    }
    this.onChange(this);
  }

  handleKey(key: string): Promise<void> | undefined {
    if (key === "Enter") {
      if (this.state.pending) return this.submit();
      if (!this.state.item) return this.start();
      return undefined;
    }
    this.update(keyPressed(this.state, key));
    return undefined;
  }

  setEditText(text: string): void {
    this.update(editChanged(this.state, text));
  }

  toggle(kind: "spatial" | "interaction"): void {
    this.update(toggleOverlay(this.state, kind));
  }

  // Post the pending decision. The next queue item is fetched while the
  // POST is in flight; a failure keeps the decision so Enter retries it.
  async submit(): Promise<void> {
    const body = decisionBody(this.state, this.reviewer);
    const current = this.state.item;
    if (!body || !current || this.submitting) return;
    this.submitting = true;
    const prefetch = this.api.queue(2).catch(() => null);
    try {
      await this.api.decide(current.record_id, body);
    } catch {
      this.update(requestFailed(this.state, "decision not saved; press Enter to retry"));
      return;
    } finally {
      this.submitting = false;
    }
    this.update(decisionSaved(this.state));

    const fetched = await prefetch;
    let next = fetched?.find((r) => r.record_id !== current.record_id) ?? null;
    if (!next) {
      // The prefetch raced the decision; ask again now that it landed.
      try {
        next = (await this.api.queue(1)).find((r) => r.record_id !== current.record_id) ?? null;
      } catch {
        next = null;
      }
    }
    this.update(itemLoaded(this.state, next));
    await this.refreshStats();
  }
}
