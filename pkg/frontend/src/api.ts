// Thin typed client for the review service. fetch is injected so tests can
// stand in a fixture service.

import type { DecisionBody, ReviewRecord, StatsPayload } from "./types.js";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    public status: number,
    message: string,
  ) {
    super(message);
  }
}

async function expectOk(response: Response): Promise<Response> {
  if (!response.ok) {
    let detail = response.statusText;
    try {
      const body = (await response.json()) as { error?: string };
      if (body.error) detail = body.error;
    } catch {
      // non-JSON error body; keep the status text
    }
    throw new ApiError(response.status, detail);
  }
  return response;
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: FetchLike,
  ) {}

  private url(path: string): string {
    return `${this.baseUrl}${path}`;
  }

  imageUrl(imageRef: string): string {
    return this.url(`/images/${imageRef}`);
  }

  async queue(n: number): Promise<ReviewRecord[]> {
    const r = await expectOk(await this.fetchFn(this.url(`/api/queue?n=${n}`)));
    const payload = (await r.json()) as { items: ReviewRecord[] };
    return payload.items;
  }

  async item(recordId: string): Promise<ReviewRecord> {
    const r = await expectOk(await this.fetchFn(this.url(`/api/item/${recordId}`)));
    return (await r.json()) as ReviewRecord;
  }

  async stats(): Promise<StatsPayload> {
    const r = await expectOk(await this.fetchFn(this.url("/api/stats")));
    return (await r.json()) as StatsPayload;
  }

  async decide(recordId: string, body: DecisionBody): Promise<void> {
    const r = await this.fetchFn(this.url(`/api/item/${recordId}/decision`), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
    await expectOk(r);
  }
}
