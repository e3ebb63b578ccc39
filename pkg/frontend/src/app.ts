/**
 * Chat view over the session service.
 *
 * One session per page load; one in-flight ask at a time (the input is
 * disabled while a request is pending). Every rendered value — resolved
 * query, category, doc ids, scores, snippets — is taken verbatim from the
 * service response; the only client-side computation is the word diff used
 * to highlight what the rewriter changed.
 */

import {
  ApiClient,
  ApiError,
  AskOptions,
  AskResponse,
  ResultCard,
  ServiceConfig,
  SessionHistory,
} from "./api.js";
import { diffSpans } from "./highlight.js";

export interface TurnView {
  utterance: string;
  resolved: string;
  category: string;
  results: ResultCard[];
}

export const MIN_K = 1;
export const MAX_K = 1000;

export function turnFromAsk(utterance: string, response: AskResponse): TurnView {
  return {
    utterance,
    resolved: response.resolved_query,
    category: response.category,
    results: response.results,
  };
}

/** Rebuild the transcript view from a GET /sessions/{id} payload. */
export function turnsFromHistory(history: SessionHistory): TurnView[] {
  return history.turns.map((turn) => ({
    utterance: turn.raw_utterance,
    resolved: turn.resolved_query,
    category: turn.category,
    results: turn.results,
  }));
}

export function describeError(err: unknown): string {
  if (err instanceof ApiError) return `request failed (${err.status}): ${err.message}`;
  if (err instanceof Error) return `cannot reach the service: ${err.message}`;
  return String(err);
}

const SKELETON = `
<div class="convsearch-app">
  <header class="masthead">
    <h1>convsearch</h1>
    <div class="session-line">session <code class="session-id">&mdash;</code></div>
  </header>
  <div class="columns">
    <main class="chat">
      <div class="error-banner" hidden></div>
      <div class="notice" hidden></div>
      <ol class="transcript"></ol>
      <form class="ask-form">
        <input class="ask-input" type="text" placeholder="Ask a question&hellip;"
               autocomplete="off" aria-label="question">
        <button class="ask-send" type="submit">Send</button>
      </form>
    </main>
    <aside class="panel">
      <h2>Parameters</h2>
      <label class="k-row">results <input class="k-input" type="number"
             min="1" max="1000" value="10" aria-label="k"></label>
      <label class="rerank-row"><input class="rerank-toggle" type="checkbox" checked>
             answer-cue rerank</label>
      <div class="config-line" title="engine parameters (read-only)">&mdash;</div>
    </aside>
  </div>
</div>
`;

function must<T extends Element>(root: ParentNode, selector: string): T {
  const found = root.querySelector(selector);
  if (found === null) throw new Error(`missing element: ${selector}`);
  return found as T;
}

function child(tag: string, className: string, text?: string): HTMLElement {
  const node = document.createElement(tag);
  node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

/** Deterministic DOM for one turn; scores render as String(score), verbatim. */
export function renderTurn(view: TurnView): HTMLLIElement {
  const item = document.createElement("li");
  item.className = "turn";

  item.appendChild(child("div", "utterance", view.utterance));

  const resolved = child("div", "resolved");
  resolved.appendChild(child("span", "resolved-label", "ran as"));
  const text = child("span", "resolved-text");
  for (const span of diffSpans(view.utterance, view.resolved)) {
    if (span.changed) {
      const mark = document.createElement("mark");
      mark.textContent = span.text;
      text.appendChild(mark);
    } else {
      text.appendChild(document.createTextNode(span.text));
    }
  }
  resolved.appendChild(text);
  const badge = child("span", "badge", view.category);
  badge.dataset.category = view.category;
  resolved.appendChild(badge);
  item.appendChild(resolved);

  if (view.results.length === 0) {
    item.appendChild(child("div", "no-results", "no results"));
    return item;
  }
  const list = document.createElement("ol");
  list.className = "results";
  for (const card of view.results) {
    const row = document.createElement("li");
    row.className = "card";
    row.appendChild(child("span", "doc-id", card.doc_id));
    row.appendChild(child("span", "score", String(card.score)));
    row.appendChild(child("p", "snippet", card.snippet));
    list.appendChild(row);
  }
  item.appendChild(list);
  return item;
}

function formatConfig(cfg: ServiceConfig): string {
  const w = cfg.weights;
  return (
    `${cfg.scorer} · μ=${cfg.mu} · weights ${w.w_current}/${w.w_first}/${w.w_previous}` +
    ` · λ=${cfg.rerank_lambda} · ${cfg.doc_count} docs`
  );
}

export class ChatApp {
  readonly turns: TurnView[] = [];

  private sessionId: string | null = null;
  private pending = false;
  private defaultK = 10;

  private readonly transcriptEl: HTMLOListElement;
  private readonly inputEl: HTMLInputElement;
  private readonly sendEl: HTMLButtonElement;
  private readonly kInput: HTMLInputElement;
  private readonly rerankToggle: HTMLInputElement;
  private readonly sessionEl: HTMLElement;
  private readonly configEl: HTMLElement;
  private readonly errorEl: HTMLElement;
  private readonly noticeEl: HTMLElement;

  constructor(
    root: HTMLElement,
    private readonly client: ApiClient,
  ) {
    root.innerHTML = SKELETON;
    this.transcriptEl = must(root, ".transcript");
    this.inputEl = must(root, ".ask-input");
    this.sendEl = must(root, ".ask-send");
    this.kInput = must(root, ".k-input");
    this.rerankToggle = must(root, ".rerank-toggle");
    this.sessionEl = must(root, ".session-id");
    this.configEl = must(root, ".config-line");
    this.errorEl = must(root, ".error-banner");
    this.noticeEl = must(root, ".notice");

    const form = must<HTMLFormElement>(root, ".ask-form");
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      void this.submit(this.inputEl.value);
    });
    this.kInput.addEventListener("change", () => {
      this.clampK();
    });
  }

  get session(): string | null {
    return this.sessionId;
  }

  /** Fetch display-only parameters and open a session. Safe to call once. */
  async start(): Promise<void> {
    try {
      this.applyConfig(await this.client.config());
    } catch {
      // Panel keeps its defaults; the first submit will surface real errors.
    }
    try {
      this.setSession(await this.client.createSession());
    } catch (err) {
      this.showError(describeError(err));
    }
  }

  /**
   * Send one utterance. Returns true when a turn was appended. Empty input
   * never issues a request; an unknown-session 404 (service restart) opens
   * a fresh session, posts a notice, and retries once.
   */
  async submit(text: string): Promise<boolean> {
    if (this.pending) return false;
    this.clearError();
    this.clearNotice();
    const utterance = text.trim();
    if (utterance === "") {
      this.showNotice("Type a question before sending.");
      return false;
    }
    const options: AskOptions = { k: this.clampK() };
    if (!this.rerankToggle.checked) options.rerankLambda = 0;

    this.setPending(true);
    try {
      let sid = this.sessionId;
      if (sid === null) {
        sid = await this.client.createSession();
        this.setSession(sid);
      }
      let response: AskResponse;
      try {
        response = await this.client.ask(sid, utterance, options);
      } catch (err) {
        if (!(err instanceof ApiError) || err.status !== 404) throw err;
        sid = await this.client.createSession();
        this.setSession(sid);
        this.showNotice("The service restarted; continuing in a new session.");
        response = await this.client.ask(sid, utterance, options);
      }
      this.appendTurn(turnFromAsk(utterance, response));
      this.inputEl.value = "";
      return true;
    } catch (err) {
      this.showError(describeError(err));
      return false;
    } finally {
      this.setPending(false);
    }
  }

  /** Replace the transcript with the view reconstructed from a history payload. */
  loadFromHistory(history: SessionHistory): void {
    this.setSession(history.session_id);
    this.turns.length = 0;
    this.transcriptEl.textContent = "";
    for (const view of turnsFromHistory(history)) this.appendTurn(view);
  }

  private setSession(id: string): void {
    this.sessionId = id;
    this.sessionEl.textContent = id;
  }

  private applyConfig(cfg: ServiceConfig): void {
    this.defaultK = cfg.default_k;
    this.kInput.value = String(cfg.default_k);
    this.configEl.textContent = formatConfig(cfg);
  }

  /** Clamp the k input into [MIN_K, MAX_K], posting a notice when it moved. */
  private clampK(): number {
    const raw = this.kInput.value.trim();
    const parsed = Number.parseInt(raw, 10);
    let k: number;
    if (Number.isNaN(parsed)) {
      k = this.defaultK;
      this.showNotice(`k must be a number; using ${k}`);
    } else if (parsed < MIN_K) {
      k = MIN_K;
      this.showNotice(`k clamped to ${MIN_K}`);
    } else if (parsed > MAX_K) {
      k = MAX_K;
      this.showNotice(`k clamped to ${MAX_K}`);
    } else {
      k = parsed;
    }
    if (this.kInput.value !== String(k)) this.kInput.value = String(k);
    return k;
  }

  private appendTurn(view: TurnView): void {
    this.turns.push(view);
    this.transcriptEl.appendChild(renderTurn(view));
    this.transcriptEl.scrollTop = this.transcriptEl.scrollHeight;
  }

  private setPending(value: boolean): void {
    this.pending = value;
    this.inputEl.disabled = value;
    this.sendEl.disabled = value;
  }

  private showError(text: string): void {
    this.errorEl.textContent = text;
    this.errorEl.hidden = false;
  }

  private clearError(): void {
    this.errorEl.textContent = "";
    this.errorEl.hidden = true;
  }

  private showNotice(text: string): void {
    this.noticeEl.textContent = text;
    this.noticeEl.hidden = false;
  }

  private clearNotice(): void {
    this.noticeEl.textContent = "";
    this.noticeEl.hidden = true;
  }
}
