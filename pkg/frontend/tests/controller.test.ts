import { describe, expect, it } from "vitest";

import { SessionController } from "../src/controller.js";
import { Preference, SessionApi, SessionSpec } from "../src/protocol.js";
import { fmt3, render } from "../src/render.js";
import { MockServer } from "./mock_server.js";

const SPEC: SessionSpec = {
  parameters: [
    { name: "milk %", lower: 0, upper: 100 },
    { name: "strength %", lower: 0, upper: 100 },
  ],
  solver: "order_rcd",
  query_budget: 12,
  seed: 3,
};

// a deterministic scripted human: prefers lower first-coordinate values
function scriptedPreference(a: number[], b: number[]): Preference {
  if (a[0]! < b[0]!) return "A";
  if (b[0]! < a[0]!) return "B";
  return "TIE";
}

async function driveRawProtocol(server: MockServer): Promise<string> {
  // reference client: bare fetch loop with no UI code involved
  const api = new SessionApi("", server.fetch);
  const state = await api.createSession(SPEC);
  let id = state.session_id;
  for (;;) {
    const q = await api.nextQuery(id);
    if ("status" in q && q.status === "terminal") break;
    const query = q as Exclude<typeof q, { status: string }>;
    await api.submitAnswer(id, query.query_id,
      scriptedPreference(query.candidate_a.vector, query.candidate_b.vector));
  }
  return id;
}

async function driveThroughController(server: MockServer): Promise<string> {
  // same script, but through the full client code path (controller +
  // optimistic lock + view updates)
  const api = new SessionApi("", server.fetch);
  const controller = await SessionController.create(api, SPEC);
  while (controller.view.status === "awaiting" && controller.view.pending) {
    const q = controller.view.pending;
    await controller.choose(
      scriptedPreference(q.candidate_a.vector, q.candidate_b.vector));
  }
  return controller.view.sessionId;
}

describe("controller against the protocol twin", () => {
  it("produces a journal identical to the raw-protocol answerer", async () => {
    const server = new MockServer();
    const rawId = await driveRawProtocol(server);
    const uiId = await driveThroughController(server);
    expect(server.journalOf(uiId)).toEqual(server.journalOf(rawId));
    expect(server.journalOf(uiId).length).toBe(SPEC.query_budget);
  });

  it("double submit records exactly one journal entry", async () => {
    const server = new MockServer();
    const api = new SessionApi("", server.fetch);
    const controller = await SessionController.create(api, SPEC);
    const id = controller.view.sessionId;
    // two clicks in the same tick: the optimistic lock drops the second
    const first = controller.choose("A");
    const second = controller.choose("B");
    await Promise.all([first, second]);
    expect(server.journalOf(id)).toEqual([{ query_id: "q0", sign: -1 }]);
    expect(controller.view.pending?.query_id).toBe("q1");
  });

  it("a stale submit resyncs instead of double-recording", async () => {
    const server = new MockServer();
    const api = new SessionApi("", server.fetch);
    const controller = await SessionController.create(api, SPEC);
    const id = controller.view.sessionId;
    // someone else answers q0 behind the controller's back
    await api.submitAnswer(id, "q0", "B");
    await controller.choose("A");
    expect(server.journalOf(id)).toEqual([{ query_id: "q0", sign: 1 }]);
    expect(controller.view.pending?.query_id).toBe("q1");
    expect(controller.view.notice).toMatch(/already answered/);
  });

  it("undo restores the previous query and truncates history", async () => {
    const server = new MockServer();
    const api = new SessionApi("", server.fetch);
    const controller = await SessionController.create(api, SPEC);
    await controller.choose("A");
    await controller.choose("TIE");
    const beforeUndo = controller.view.pending?.query_id;
    expect(beforeUndo).toBe("q2");
    await controller.undo();
    expect(controller.view.pending?.query_id).toBe("q1");
    expect(controller.view.history.length).toBe(1);
    expect(server.journalOf(controller.view.sessionId).length).toBe(1);
  });

  it("undo on a fresh session is a no-op", async () => {
    const server = new MockServer();
    const api = new SessionApi("", server.fetch);
    const controller = await SessionController.create(api, SPEC);
    await controller.undo();
    expect(controller.view.pending?.query_id).toBe("q0");
  });

  it("history length tracks the journal across a rejoin", async () => {
    const server = new MockServer();
    const api = new SessionApi("", server.fetch);
    const controller = await SessionController.create(api, SPEC);
    await controller.choose("A");
    await controller.choose("B");
    const rejoined = await SessionController.join(api, controller.view.sessionId);
    expect(rejoined.view.history.length).toBe(2);
    expect(rejoined.view.pending?.query_id).toBe("q2");
  });

  it("chart data equals the server trace verbatim", async () => {
    const server = new MockServer();
    const api = new SessionApi("", server.fetch);
    const controller = await SessionController.create(api, SPEC);
    await controller.choose("A");
    await controller.choose("A");
    const direct = await api.trace(controller.view.sessionId);
    expect(controller.view.trace).toEqual(direct);
  });

  it("runs to terminal and shows the results view", async () => {
    const server = new MockServer();
    const api = new SessionApi("", server.fetch);
    const controller = await SessionController.create(api, { ...SPEC, query_budget: 3 });
    for (let i = 0; i < 3; i++) await controller.choose("TIE");
    expect(controller.view.status).toBe("terminal");
    const html = render(controller.view);
    expect(html).toContain("Session complete");
    expect(html).not.toContain("choose-a");
  });
});

describe("rendering", () => {
  it("shows both candidates with labels and three answer buttons", async () => {
    const server = new MockServer();
    const api = new SessionApi("", server.fetch);
    const controller = await SessionController.create(api, SPEC);
    const html = render(controller.view);
    expect(html).toContain("Candidate A");
    expect(html).toContain("Candidate B");
    expect(html).toContain("milk %");
    for (const id of ["choose-a", "choose-b", "choose-tie", "undo"]) {
      expect(html).toContain(`id="${id}"`);
    }
    // undo disabled before any answer
    expect(html).toMatch(/id="undo"\s+disabled/);
  });

  it("rounds to 3 significant digits and keeps full precision on hover", () => {
    expect(fmt3(0.123456)).toBe("0.123");
    expect(fmt3(98.7654)).toBe("98.8");
    expect(fmt3(100)).toBe("100");
    const view = {
      sessionId: "s", status: "awaiting" as const,
      pending: {
        query_id: "q0",
        candidate_a: { values: { x: 0.123456789 }, vector: [0.123456789] },
        candidate_b: { values: { x: 1 }, vector: [1] },
        issued_at: 0,
      },
      best: null, iteration: 0, queriesUsed: 0, queryBudget: 5,
      history: [], trace: null, busy: false, notice: null,
    };
    const html = render(view);
    expect(html).toContain(">0.123<");
    expect(html).toContain('title="0.123456789"');
  });

  it("locks buttons while a submission is in flight", async () => {
    const server = new MockServer();
    const api = new SessionApi("", server.fetch);
    const controller = await SessionController.create(api, SPEC);
    let sawBusy = false;
    controller.onChange((v) => {
      if (v.busy) sawBusy = render(v).match(/id="choose-a"\s+disabled/) !== null;
    });
    await controller.choose("A");
    expect(sawBusy).toBe(true);
  });
});
