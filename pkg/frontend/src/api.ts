/** Thin typed client for the session service HTTP API.
 *
 * Errors from the service arrive as {"error": {"code", "message"}} with
 * a matching status; they surface here as ApiError so the UI can show
 * the server's message verbatim.
 */

import { SubmissionBody } from "./strokes.js";

export interface RoundInfo {
  round: number;
  interacted: number[];
  wall_ms: Record<string, number>;
}

export interface SessionInfo {
  id: string;
  lifecycle: string;
  num_frames: number;
  num_objects: number;
  height: number;
  width: number;
  current_round: number;
  rounds: RoundInfo[];
  has_gt: boolean;
}

export interface SubmitResult {
  round: number;
  accepted_frames: number[];
}

export interface CommitResult {
  round: number;
  interacted: number[];
  wall_ms: number;
}

export interface RoundMetrics {
  round: number;
  mean_j: number;
  mean_f: number;
  mean_jf: number;
  wall_ms: number;
  over_budget: boolean;
}

export class ApiError extends Error {
  readonly code: string;
  readonly status: number;

  constructor(code: string, message: string, status: number) {
    super(message);
    this.name = "ApiError";
    this.code = code;
    this.status = status;
  }
}

type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class Client {
  readonly baseUrl: string;
  private fetchImpl: FetchLike;

  constructor(baseUrl: string, fetchImpl?: FetchLike) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
    this.fetchImpl = fetchImpl ?? ((url, init) => fetch(url, init));
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method };
    if (body !== undefined) {
      init.headers = { "content-type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const resp = await this.fetchImpl(this.baseUrl + path, init);
    if (!resp.ok) {
      let code = "unknown";
      let message = `request failed with status ${resp.status}`;
      try {
        const payload = (await resp.json()) as { error?: { code?: string; message?: string } };
        if (payload.error) {
          code = payload.error.code ?? code;
          message = payload.error.message ?? message;
        }
      } catch {
        // non-JSON error body, keep the status fallback
      }
      throw new ApiError(code, message, resp.status);
    }
    return (await resp.json()) as T;
  }

  createSession(body: unknown): Promise<SessionInfo> {
    return this.request("POST", "/sessions", body);
  }

  getState(sessionId: string): Promise<SessionInfo> {
    return this.request("GET", `/sessions/${sessionId}/state`);
  }

  submitScribbles(sessionId: string, body: SubmissionBody): Promise<SubmitResult> {
    return this.request("POST", `/sessions/${sessionId}/scribbles`, body);
  }

  commit(sessionId: string): Promise<CommitResult> {
    return this.request("POST", `/sessions/${sessionId}/commit`);
  }

  propagate(sessionId: string): Promise<RoundInfo> {
    return this.request("POST", `/sessions/${sessionId}/propagate`);
  }

  metrics(sessionId: string): Promise<{ rounds: RoundMetrics[] }> {
    return this.request("GET", `/sessions/${sessionId}/metrics`);
  }

  save(sessionId: string, path: string): Promise<{ manifest: unknown }> {
    return this.request("POST", `/sessions/${sessionId}/save`, { path });
  }

  load(path: string): Promise<SessionInfo> {
    return this.request("POST", "/sessions/load", { path });
  }

  frameUrl(sessionId: string, t: number): string {
    return `${this.baseUrl}/sessions/${sessionId}/frames/${t}.png`;
  }

  maskUrl(sessionId: string, t: number, round?: number): string {
    const base = `${this.baseUrl}/sessions/${sessionId}/masks/${t}.png`;
    return round === undefined ? base : `${base}?round=${round}`;
  }

  /** Event-stream URL for a session, ws:// or wss:// as appropriate. */
  wsUrl(sessionId: string): string {
    return `${this.baseUrl.replace(/^http/, "ws")}/sessions/${sessionId}/events`;
  }
}
