/** Typed client for the debugging session HTTP API. */

export type Answer = "yes" | "no";
export type SessionStatus = "awaiting-answer" | "finished";

export interface SessionRequest {
  kb: string;
  strategy?: "split" | "entropy" | "rio";
  n?: number;
  sigma?: number;
  c?: number;
  c_min?: number;
  c_max?: number;
  epsilon?: number;
  stop?: "singleton" | "threshold" | "both";
  oracle_target?: string[];
}

export interface DiagnosisView {
  ids: string[];
  posterior: number;
}

export interface HistoryEntry {
  literals: string[];
  answer: Answer;
}

export interface Snapshot {
  id: string;
  status: SessionStatus;
  round: number;
  query: { literals: string[] } | null;
  diagnoses: DiagnosisView[];
  cautiousness: { c: number; c_min: number; c_max: number };
  history: HistoryEntry[];
  result: string[] | null;
}

export class ServiceError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ServiceError";
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  private readonly fetchFn: FetchLike;

  constructor(
    readonly baseUrl: string,
    fetchFn?: FetchLike,
  ) {
    this.fetchFn = fetchFn ?? ((input, init) => fetch(input, init));
  }

  private async request(path: string, init?: RequestInit): Promise<unknown> {
    const response = await this.fetchFn(this.baseUrl + path, init);
    const body = (await response.json().catch(() => ({}))) as Record<string, unknown>;
    if (!response.ok) {
      throw new ServiceError(
        response.status,
        typeof body.code === "string" ? body.code : "error",
        typeof body.message === "string" ? body.message : `HTTP ${response.status}`,
      );
    }
    return body;
  }

  private post(path: string, payload: unknown): Promise<unknown> {
    return this.request(path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(payload),
    });
  }

  createSession(config: SessionRequest): Promise<Snapshot> {
    return this.post("/sessions", config) as Promise<Snapshot>;
  }

  getSession(id: string): Promise<Snapshot> {
    return this.request(`/sessions/${encodeURIComponent(id)}`) as Promise<Snapshot>;
  }

  /** The round token makes retries and duplicate clicks idempotent. */
  postAnswer(id: string, answer: Answer, round: number): Promise<Snapshot> {
    return this.post(`/sessions/${encodeURIComponent(id)}/answer`, {
      answer,
      round,
    }) as Promise<Snapshot>;
  }

  async deleteSession(id: string): Promise<void> {
    await this.request(`/sessions/${encodeURIComponent(id)}`, { method: "DELETE" });
  }
}
