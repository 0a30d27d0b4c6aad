// View-state machine for one live session. Holds exactly what the
// screen needs (pending pair, history, best, counters, chart data) and
// serializes every mutation behind an optimistic lock so double-clicks
// cannot produce two journal entries.

import {
  ComparisonQuery,
  Preference,
  SessionApi,
  SessionSpec,
  SessionState,
  StaleQueryError,
  TracePayload,
  isTerminal,
} from "./protocol.js";

export interface HistoryEntry {
  queryId: string;
  // null for answers recorded before a reload; the count still matches
  // the server journal
  preference: Preference | null;
}

export interface SessionView {
  sessionId: string;
  status: "awaiting" | "terminal";
  pending: ComparisonQuery | null;
  best: SessionState["best"];
  iteration: number;
  queriesUsed: number;
  queryBudget: number;
  history: HistoryEntry[];
  trace: TracePayload | null;
  busy: boolean;
  notice: string | null;
}

export class SessionController {
  view: SessionView;
  private listeners: ((view: SessionView) => void)[] = [];

  constructor(private api: SessionApi, sessionId: string) {
    this.view = {
      sessionId,
      status: "awaiting",
      pending: null,
      best: null,
      iteration: 0,
      queriesUsed: 0,
      queryBudget: 0,
      history: [],
      trace: null,
      busy: false,
      notice: null,
    };
  }

  static async create(api: SessionApi, spec: SessionSpec): Promise<SessionController> {
    const state = await api.createSession(spec);
    const c = new SessionController(api, state.session_id);
    c.applyState(state);
    await c.refreshTrace();
    return c;
  }

  static async join(api: SessionApi, sessionId: string): Promise<SessionController> {
    const c = new SessionController(api, sessionId);
    await c.resync();
    return c;
  }

  onChange(fn: (view: SessionView) => void): void {
    this.listeners.push(fn);
  }

  private emit(): void {
    for (const fn of this.listeners) fn(this.view);
  }

  private applyState(state: SessionState): void {
    this.view.status = state.status;
    this.view.pending = state.pending;
    this.view.best = state.best;
    this.view.iteration = state.iteration;
    this.view.queriesUsed = state.queries_used;
    this.view.queryBudget = state.query_budget;
    // history length always mirrors the server's journal answer count
    while (this.view.history.length > state.queries_used) this.view.history.pop();
    while (this.view.history.length < state.queries_used) {
      this.view.history.push({ queryId: `q${this.view.history.length}`, preference: null });
    }
  }

  /** Re-pull query + trace; used on join, reload, and after conflicts. */
  async resync(): Promise<void> {
    const q = await this.api.nextQuery(this.view.sessionId);
    if (isTerminal(q)) {
      this.applyState(q);
    } else {
      this.view.status = "awaiting";
      this.view.pending = q;
      const n = parseInt(q.query_id.slice(1), 10);
      if (Number.isFinite(n)) {
        this.view.queriesUsed = n;
        while (this.view.history.length > n) this.view.history.pop();
        while (this.view.history.length < n) {
          this.view.history.push({ queryId: `q${this.view.history.length}`, preference: null });
        }
      }
    }
    await this.refreshTrace();
    this.emit();
  }

  private async refreshTrace(): Promise<void> {
    // stored verbatim: the chart draws exactly what the server sent
    this.view.trace = await this.api.trace(this.view.sessionId);
  }

  /** Submit a choice for the pending query. No-op while a call is in flight. */
  async choose(preference: Preference): Promise<void> {
    if (this.view.busy || this.view.pending === null) return;
    const queryId = this.view.pending.query_id;
    this.view.busy = true;
    this.view.notice = null;
    this.emit();
    try {
      const state = await this.api.submitAnswer(this.view.sessionId, queryId, preference);
      this.view.history.push({ queryId, preference });
      this.applyState(state);
      await this.refreshTrace();
    } catch (err) {
      if (err instanceof StaleQueryError) {
        this.view.notice = "That question was already answered; showing the current one.";
        await this.resync();
      } else {
        throw err;
      }
    } finally {
      this.view.busy = false;
      this.emit();
    }
  }

  async undo(): Promise<void> {
    if (this.view.busy || this.view.history.length === 0) return;
    this.view.busy = true;
    this.emit();
    try {
      const state = await this.api.undo(this.view.sessionId);
      this.view.history.pop();
      this.applyState(state);
      await this.refreshTrace();
    } catch (err) {
      if (err instanceof StaleQueryError) {
        this.view.notice = "Nothing to undo.";
        await this.resync();
      } else {
        throw err;
      }
    } finally {
      this.view.busy = false;
      this.emit();
    }
  }
}
