// Wire protocol for the session service. The client is a pure protocol
// consumer: it never computes optimization logic, only relays answers.
//
// Preference mapping is bit-exact and must match the server:
//   "A"   -> compare = -1  (candidate A is better)
//   "B"   -> compare = +1
//   "TIE" -> compare =  0

export type Preference = "A" | "B" | "TIE";

export interface Candidate {
  values: Record<string, number>;
  vector: number[];
}

export interface ComparisonQuery {
  query_id: string;
  candidate_a: Candidate;
  candidate_b: Candidate;
  issued_at: number;
}

export interface SessionState {
  session_id: string;
  status: "awaiting" | "terminal";
  iteration: number;
  queries_used: number;
  query_budget: number;
  best: Candidate | null;
  pending: ComparisonQuery | null;
}

export interface TracePayload {
  session_id: string;
  iterations: number[];
  oracle_calls: number[];
  candidates: number[][];
}

export interface SessionSpec {
  parameters: { name: string; lower: number; upper: number }[];
  solver?: string;
  query_budget?: number;
  seed?: number;
  max_iterations?: number;
  ls_tol?: number;
}

export type FetchLike = (url: string, init?: {
  method?: string;
  headers?: Record<string, string>;
  body?: string;
}) => Promise<{ status: number; json(): Promise<unknown> }>;

export class StaleQueryError extends Error {
  constructor(detail: string) {
    super(detail);
    this.name = "StaleQueryError";
  }
}

export class SessionApi {
  constructor(private baseUrl: string, private fetchFn: FetchLike) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const res = await this.fetchFn(this.baseUrl + path, {
      method,
      headers: body === undefined ? undefined : { "content-type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const payload = (await res.json()) as T & { detail?: string };
    if (res.status === 409) {
      throw new StaleQueryError(payload.detail ?? "conflict");
    }
    if (res.status >= 400) {
      throw new Error(`${method} ${path} failed (${res.status}): ${JSON.stringify(payload)}`);
    }
    return payload;
  }

  createSession(spec: SessionSpec): Promise<SessionState> {
    return this.request<SessionState>("POST", "/sessions", spec);
  }

  /** Pending query, or the terminal state when the run is over. */
  nextQuery(id: string): Promise<ComparisonQuery | SessionState> {
    return this.request<ComparisonQuery | SessionState>("GET", `/sessions/${id}/query`);
  }

  submitAnswer(id: string, queryId: string, preference: Preference): Promise<SessionState> {
    return this.request<SessionState>("POST", `/sessions/${id}/answer`, {
      query_id: queryId,
      preference,
    });
  }

  undo(id: string): Promise<SessionState> {
    return this.request<SessionState>("POST", `/sessions/${id}/undo`);
  }

  trace(id: string): Promise<TracePayload> {
    return this.request<TracePayload>("GET", `/sessions/${id}/trace`);
  }
}

export function isTerminal(q: ComparisonQuery | SessionState): q is SessionState {
  return (q as SessionState).status === "terminal";
}
