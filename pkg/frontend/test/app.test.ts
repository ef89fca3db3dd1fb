import { describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { App } from "../src/app.js";
import { frisbeeRecord, secondRecord } from "./fixtures.js";
import { fixtureService } from "./service.js";

const BASE = "http://fixture.test";

function makeApp(records = [frisbeeRecord(), secondRecord()]) {
  const service = fixtureService(records);
  const app = new App(new ApiClient(BASE, service.fetchFn), () => {});
  return { app, service };
}

describe("App against a fixture service", () => {
  it("start loads the first unreviewed record and the server stats", async () => {
    const { app } = makeApp();
    await app.start();
    expect(app.state.item?.record_id).toBe("aaaa000011112222");
    expect(app.stats).toEqual({
      total: 2,
      unreviewed: 2,
      accepted: 0,
      rejected: 0,
      edited: 0,
    });
  });

  it("r then Enter posts a reject and advances to the next item", async () => {
    const { app, service } = makeApp();
    await app.start();
    await app.handleKey("r");
    await app.handleKey("Enter");
    expect(service.posts).toHaveLength(1);
    expect(service.posts[0]!.url).toBe(`${BASE}/api/item/aaaa000011112222/decision`);
    expect(service.posts[0]!.body).toBe('{"decision":"reject"}');
    expect(app.state.item?.record_id).toBe("bbbb333344445555");
    expect(app.state.session.rejected).toBe(1);
    expect(app.stats?.rejected).toBe(1);
  });

  it("a then Enter posts an accept", async () => {
    const { app, service } = makeApp();
    await app.start();
    await app.handleKey("a");
    await app.handleKey("Enter");
    expect(service.posts[0]!.body).toBe('{"decision":"accept"}');
  });

  it("the edit flow posts the rewritten answer", async () => {
    const { app, service } = makeApp();
    await app.start();
    await app.handleKey("e");
    app.setEditText("player in white catches the frisbee.");
    await app.handleKey("Enter");
    expect(service.posts[0]!.body).toBe(
      '{"decision":"edit","edited_answer":"player in white catches the frisbee."}',
    );
    expect(app.state.session.edited).toBe(1);
  });

  it("Enter without a pending decision posts nothing", async () => {
    const { app, service } = makeApp();
    await app.start();
    await app.handleKey("Enter");
    expect(service.posts).toHaveLength(0);
    expect(app.state.item?.record_id).toBe("aaaa000011112222");
  });

  it("a failed POST raises the banner, keeps the decision, and Enter retries it", async () => {
    const { app, service } = makeApp();
    await app.start();
    service.failNextDecision();
    await app.handleKey("r");
    await app.handleKey("Enter");
    expect(app.state.banner).toBe("decision not saved; press Enter to retry");
    expect(app.state.pending).toBe("reject");
    expect(app.state.item?.record_id).toBe("aaaa000011112222");
    expect(service.posts).toHaveLength(0);

    await app.handleKey("Enter");
    expect(service.posts).toHaveLength(1);
    expect(service.posts[0]!.body).toBe('{"decision":"reject"}');
    expect(app.state.banner).toBeNull();
    expect(app.state.item?.record_id).toBe("bbbb333344445555");
  });

  it("draining the queue lands in the empty state", async () => {
    const { app } = makeApp([frisbeeRecord()]);
    await app.start();
    await app.handleKey("a");
    await app.handleKey("Enter");
    expect(app.state.item).toBeNull();
    expect(app.stats?.unreviewed).toBe(0);
  });

  it("a configured reviewer rides along in every body", async () => {
    const service = fixtureService([frisbeeRecord()]);
    const app = new App(new ApiClient(BASE, service.fetchFn), () => {}, "pat");
    await app.start();
    await app.handleKey("a");
    await app.handleKey("Enter");
    expect(service.posts[0]!.body).toBe('{"decision":"accept","reviewer":"pat"}');
  });
});
