// In-memory twin of the session service's wire protocol, used to drive
// the client code path headlessly. Semantics mirror the server: one
// pending query per session with id `q{n}`, 409 on stale answers and
// empty undo, terminal once the budget is spent. Candidates are an
// arbitrary deterministic function of the answer count: the client
// never computes optimization logic, so the tests don't need a solver.

import { FetchLike, Preference, SessionSpec } from "../src/protocol.js";

const SIGN: Record<Preference, number> = { A: -1, B: 1, TIE: 0 };

export interface JournalEntry {
  query_id: string;
  sign: number;
}

interface MockSession {
  id: string;
  spec: Required<Pick<SessionSpec, "parameters" | "query_budget">> & SessionSpec;
  journal: JournalEntry[];
}

function candidatePair(s: MockSession) {
  const n = s.journal.length;
  const names = s.spec.parameters.map((p) => p.name);
  const mk = (vec: number[]) => ({
    values: Object.fromEntries(names.map((name, i) => [name, vec[i]!])),
    vector: vec,
  });
  const a = s.spec.parameters.map((p, i) => p.lower + ((n * 7 + i * 3) % 11) / 10 * (p.upper - p.lower));
  const b = s.spec.parameters.map((p, i) => p.lower + ((n * 5 + i * 2 + 4) % 11) / 10 * (p.upper - p.lower));
  return { a: mk(a), b: mk(b) };
}

function statePayload(s: MockSession) {
  const terminal = s.journal.length >= s.spec.query_budget;
  const { a, b } = candidatePair(s);
  return {
    session_id: s.id,
    status: terminal ? "terminal" : "awaiting",
    iteration: Math.floor(s.journal.length / 4),
    queries_used: s.journal.length,
    query_budget: s.spec.query_budget,
    best: candidatePair(s).a,
    pending: terminal
      ? null
      : {
          query_id: `q${s.journal.length}`,
          candidate_a: a,
          candidate_b: b,
          issued_at: 0,
        },
  };
}

export class MockServer {
  sessions = new Map<string, MockSession>();
  private counter = 0;

  journalOf(id: string): JournalEntry[] {
    return this.sessions.get(id)!.journal;
  }

  fetch: FetchLike = async (url, init) => {
    const method = init?.method ?? "GET";
    const body = init?.body ? JSON.parse(init.body) : undefined;
    const respond = (status: number, payload: unknown) => ({
      status,
      json: async () => payload,
    });

    if (method === "POST" && url === "/sessions") {
      const spec = body as MockSession["spec"];
      const id = `mock${this.counter++}`;
      const session: MockSession = {
        id,
        spec: { ...spec, query_budget: spec.query_budget ?? 200 },
        journal: [],
      };
      this.sessions.set(id, session);
      return respond(200, statePayload(session));
    }

    const match = url.match(/^\/sessions\/([^/]+)\/(query|answer|undo|trace)$/);
    if (!match) return respond(404, { detail: "no route" });
    const session = this.sessions.get(match[1]!);
    if (!session) return respond(404, { detail: "no session" });
    const kind = match[2];

    if (kind === "query" && method === "GET") {
      const state = statePayload(session);
      return respond(200, state.pending ?? state);
    }
    if (kind === "answer" && method === "POST") {
      const state = statePayload(session);
      if (state.pending === null) return respond(409, { detail: "session is terminal" });
      const expected = `q${session.journal.length}`;
      if (body.query_id !== expected) {
        return respond(409, { detail: `stale query_id ${body.query_id}; pending is ${expected}` });
      }
      session.journal.push({ query_id: expected, sign: SIGN[body.preference as Preference] });
      return respond(200, statePayload(session));
    }
    if (kind === "undo" && method === "POST") {
      if (session.journal.length === 0) return respond(409, { detail: "nothing to undo" });
      session.journal.pop();
      return respond(200, statePayload(session));
    }
    if (kind === "trace" && method === "GET") {
      return respond(200, {
        session_id: session.id,
        iterations: session.journal.map((_, i) => i),
        oracle_calls: session.journal.map((_, i) => i),
        candidates: session.journal.map((_, i) => [i * 1.0, i * 2.0]),
      });
    }
    return respond(404, { detail: "no route" });
  };
}
