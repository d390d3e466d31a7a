/** Typed client for the what-if service.
 *
 * Reasoning panels allow at most one in-flight request: a new call on the
 * same panel key aborts the previous one. Every response body is kept as
 * received so the UI can show service numbers byte-for-byte.
 */

import type {
  LimitView,
  Neighborhood,
  ProtectionView,
  Received,
  ScenarioDraft,
  ServiceError,
  SessionInfo,
  TransactionDraft,
  VerdictView,
} from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiServiceError extends Error {
  readonly code: string;
  readonly status: number;

  constructor(status: number, body: ServiceError) {
    super(body.message);
    this.code = body.code;
    this.status = status;
  }
}

export class ApiClient {
  private readonly baseUrl: string;
  private readonly fetchImpl: FetchLike;
  private readonly inflight = new Map<string, AbortController>();

  constructor(baseUrl = "", fetchImpl: FetchLike = (u, i) => fetch(u, i)) {
    this.baseUrl = baseUrl.replace(/\/$/, "");
    this.fetchImpl = fetchImpl;
  }

  /** Abort whatever the panel had in flight and register a new controller. */
  private takeover(panel: string | undefined): AbortSignal | undefined {
    if (!panel) return undefined;
    this.inflight.get(panel)?.abort();
    const controller = new AbortController();
    this.inflight.set(panel, controller);
    return controller.signal;
  }

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
    panel?: string,
  ): Promise<Received<T>> {
    const init: RequestInit = { method, signal: this.takeover(panel) };
    if (body !== undefined) {
      if (body instanceof FormData) {
        init.body = body;
      } else {
        init.headers = { "content-type": "application/json" };
        init.body = JSON.stringify(body);
      }
    }
    const resp = await this.fetchImpl(this.baseUrl + path, init);
    const rawText = await resp.text();
    if (!resp.ok) {
      let err: ServiceError;
      try {
        err = JSON.parse(rawText) as ServiceError;
      } catch {
        err = { code: `http_${resp.status}`, message: rawText || resp.statusText };
      }
      throw new ApiServiceError(resp.status, err);
    }
    return { payload: JSON.parse(rawText) as T, rawText };
  }

  async uploadGraph(nodesCsv: string, edgesCsv: string): Promise<string> {
    const form = new FormData();
    form.append("nodes", new Blob([nodesCsv], { type: "text/csv" }), "nodes.csv");
    form.append("edges", new Blob([edgesCsv], { type: "text/csv" }), "edges.csv");
    const got = await this.request<{ graph_id: string }>("POST", "/graphs", form);
    return got.payload.graph_id;
  }

  async createSession(graphId: string, scenario: ScenarioDraft): Promise<SessionInfo> {
    const got = await this.request<{ session_id: string; session: SessionInfo }>(
      "POST",
      "/sessions",
      { graph_id: graphId, scenario },
    );
    return got.payload.session;
  }

  async stage(sessionId: string, tx: TransactionDraft): Promise<TransactionDraft[]> {
    const got = await this.request<{ staged: TransactionDraft[] }>(
      "POST",
      `/sessions/${sessionId}/stage`,
      tx,
    );
    return got.payload.staged;
  }

  async unstage(sessionId: string, index: number): Promise<TransactionDraft[]> {
    const got = await this.request<{ staged: TransactionDraft[] }>(
      "DELETE",
      `/sessions/${sessionId}/stage/${index}`,
    );
    return got.payload.staged;
  }

  check(sessionId: string, tx: TransactionDraft): Promise<Received<VerdictView>> {
    return this.request("POST", `/sessions/${sessionId}/check`, tx, "composer");
  }

  collude(sessionId: string, tx: TransactionDraft): Promise<Received<VerdictView>> {
    return this.request("POST", `/sessions/${sessionId}/collude`, tx, "composer");
  }

  cautious(sessionId: string, tx: TransactionDraft, f: string): Promise<Received<VerdictView>> {
    return this.request("POST", `/sessions/${sessionId}/cautious`, { ...tx, f }, "composer");
  }

  limit(sessionId: string, buyer: string, target: string): Promise<Received<LimitView>> {
    return this.request("POST", `/sessions/${sessionId}/limit`, { buyer, target }, "limit");
  }

  protect(sessionId: string, withIntermediaries: boolean): Promise<Received<ProtectionView>> {
    return this.request(
      "POST",
      `/sessions/${sessionId}/protect`,
      { with_intermediaries: withIntermediaries },
      "protect",
    );
  }

  neighborhood(graphId: string, entityId: string, radius: number): Promise<Received<Neighborhood>> {
    const path = `/graphs/${graphId}/entities/${encodeURIComponent(entityId)}/neighborhood` +
      `?radius=${radius}&limit=300`;
    return this.request("GET", path, undefined, "neighborhood");
  }
}
