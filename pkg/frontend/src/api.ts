/**
 * Typed client for the convsearch session service.
 *
 * Mirrors the HTTP contract exactly: JSON bodies in and out, errors as
 * `{"error": message}` with 400 (bad input) or 404 (unknown session).
 * The client performs no retrieval logic; it only moves payloads.
 */

export interface ResultCard {
  doc_id: string;
  score: number;
  snippet: string;
}

export interface AskResponse {
  resolved_query: string;
  category: string;
  weighted_terms: [string, number][];
  results: ResultCard[];
}

export interface SessionTurn {
  raw_utterance: string;
  resolved_query: string;
  category: string;
  results: ResultCard[];
}

export interface SessionHistory {
  session_id: string;
  created_at: number;
  topic_phrase: string;
  turns: SessionTurn[];
}

export interface ServiceConfig {
  weights: { w_current: number; w_first: number; w_previous: number };
  mu: number;
  scorer: string;
  rerank_lambda: number;
  default_k: number;
  doc_count: number;
}

export interface AskOptions {
  k?: number;
  /** Per-ask reranking override; 0 disables the cue bonus. */
  rerankLambda?: number;
}

/** A non-2xx response; `message` is the service's `error` field when present. */
export class ApiError extends Error {
  constructor(
    public readonly status: number,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  private readonly baseUrl: string;
  private readonly fetchImpl: FetchLike;

  constructor(baseUrl: string, fetchImpl?: FetchLike) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
    this.fetchImpl = fetchImpl ?? ((input, init) => fetch(input, init));
  }

  async createSession(): Promise<string> {
    const body = await this.request<{ session_id: string }>("POST", "/sessions");
    return body.session_id;
  }

  async ask(
    sessionId: string,
    utterance: string,
    options: AskOptions = {},
  ): Promise<AskResponse> {
    const payload: Record<string, unknown> = { utterance };
    if (options.k !== undefined) payload.k = options.k;
    if (options.rerankLambda !== undefined) payload.rerank_lambda = options.rerankLambda;
    return this.request<AskResponse>(
      "POST",
      `/sessions/${encodeURIComponent(sessionId)}/ask`,
      payload,
    );
  }

  async history(sessionId: string): Promise<SessionHistory> {
    return this.request<SessionHistory>(
      "GET",
      `/sessions/${encodeURIComponent(sessionId)}`,
    );
  }

  async deleteSession(sessionId: string): Promise<void> {
    await this.request<{ deleted: boolean }>(
      "DELETE",
      `/sessions/${encodeURIComponent(sessionId)}`,
    );
  }

  async config(): Promise<ServiceConfig> {
    return this.request<ServiceConfig>("GET", "/config");
  }

  async health(): Promise<{ status: string }> {
    return this.request<{ status: string }>("GET", "/healthz");
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method };
    if (body !== undefined) {
      init.headers = { "Content-Type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const response = await this.fetchImpl(this.baseUrl + path, init);
    const text = await response.text();
    let data: unknown = null;
    if (text) {
      try {
        data = JSON.parse(text);
      } catch {
        data = null; // non-JSON body; fall back to the status line below
      }
    }
    if (!response.ok) {
      const message =
        data !== null && typeof data === "object" && "error" in data
          ? String((data as { error: unknown }).error)
          : `HTTP ${response.status}`;
      throw new ApiError(response.status, message);
    }
    return data as T;
  }
}
