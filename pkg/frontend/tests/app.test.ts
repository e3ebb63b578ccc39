import { beforeEach, describe, expect, test } from "vitest";

import { ApiClient } from "../src/api.js";
import { ChatApp, turnsFromHistory } from "../src/app.js";
import { FakeService, SCRIPT } from "./fake_service.js";

function makeApp(fake: FakeService): { app: ChatApp; root: HTMLElement } {
  const root = document.createElement("div");
  document.body.appendChild(root);
  const app = new ChatApp(root, new ApiClient("http://svc", fake.fetch));
  return { app, root };
}

function q<T extends Element>(root: ParentNode, selector: string): T {
  const found = root.querySelector(selector);
  if (found === null) throw new Error(`missing element: ${selector}`);
  return found as T;
}

async function startedApp(fake: FakeService): Promise<{ app: ChatApp; root: HTMLElement }> {
  const made = makeApp(fake);
  await made.app.start();
  return made;
}

beforeEach(() => {
  document.body.innerHTML = "";
});

describe("startup", () => {
  test("start opens a session and fills the parameter panel", async () => {
    const fake = new FakeService();
    const { app, root } = await startedApp(fake);
    expect(app.session).toBe("s1");
    expect(q(root, ".session-id").textContent).toBe("s1");
    const config = q(root, ".config-line").textContent ?? "";
    expect(config).toContain("3.25");
    expect(config).toContain("2500");
    expect(q<HTMLInputElement>(root, ".k-input").value).toBe("10");
    expect(q<HTMLInputElement>(root, ".rerank-toggle").checked).toBe(true);
  });

  test("service down at load shows the banner and leaves the input usable", async () => {
    const fake = new FakeService();
    fake.failMode = "network";
    const { app, root } = await startedApp(fake);
    expect(app.session).toBeNull();
    const banner = q<HTMLElement>(root, ".error-banner");
    expect(banner.hidden).toBe(false);
    expect(banner.textContent).toContain("cannot reach");
    expect(q<HTMLInputElement>(root, ".ask-input").disabled).toBe(false);

    // Recovery: the first successful submit opens the session lazily.
    fake.failMode = "none";
    expect(await app.submit(SCRIPT[0].utterance)).toBe(true);
    expect(app.session).not.toBeNull();
    expect(root.querySelectorAll(".turn")).toHaveLength(1);
  });
});

describe("three-turn flow", () => {
  test("each rendered value is verbatim from the response", async () => {
    const fake = new FakeService();
    const { app, root } = await startedApp(fake);

    for (const [index, step] of SCRIPT.entries()) {
      expect(await app.submit(step.utterance)).toBe(true);
      const turns = root.querySelectorAll(".turn");
      expect(turns).toHaveLength(index + 1);

      const turn = turns[index];
      expect(q(turn, ".utterance").textContent).toBe(step.utterance);
      expect(q(turn, ".resolved-text").textContent).toBe(step.response.resolved_query);
      expect(q(turn, ".badge").textContent).toBe(step.response.category);

      const cards = turn.querySelectorAll(".card");
      expect(cards).toHaveLength(step.response.results.length);
      step.response.results.forEach((result, j) => {
        expect(q(cards[j], ".doc-id").textContent).toBe(result.doc_id);
        expect(q(cards[j], ".score").textContent).toBe(String(result.score));
        expect(q(cards[j], ".snippet").textContent).toBe(result.snippet);
      });
    }
    expect(app.turns).toHaveLength(3);
  });

  test("rewritten words are highlighted; untouched queries are not", async () => {
    const fake = new FakeService();
    const { app, root } = await startedApp(fake);
    await app.submit(SCRIPT[0].utterance);
    await app.submit(SCRIPT[1].utterance);

    const turns = root.querySelectorAll(".turn");
    expect(turns[0].querySelectorAll("mark")).toHaveLength(0);
    const marks = turns[1].querySelectorAll("mark");
    expect(marks).toHaveLength(1);
    expect(marks[0].textContent).toBe("maple syrup");
  });

  test("submitting through the form clears the input", async () => {
    const fake = new FakeService();
    const { root } = await startedApp(fake);
    const input = q<HTMLInputElement>(root, ".ask-input");
    input.value = SCRIPT[0].utterance;
    q<HTMLFormElement>(root, ".ask-form").dispatchEvent(new Event("submit"));
    await new Promise((resolve) => setTimeout(resolve, 0));
    expect(root.querySelectorAll(".turn")).toHaveLength(1);
    expect(input.value).toBe("");
  });
});

describe("request parameters", () => {
  test("asks carry the panel's k and default to rerank on", async () => {
    const fake = new FakeService();
    const { app, root } = await startedApp(fake);
    await app.submit(SCRIPT[0].utterance);
    expect(fake.asks[0].body).toEqual({ utterance: SCRIPT[0].utterance, k: 10 });

    q<HTMLInputElement>(root, ".k-input").value = "3";
    await app.submit(SCRIPT[1].utterance);
    expect(fake.asks[1].body.k).toBe(3);
    expect("rerank_lambda" in fake.asks[1].body).toBe(false);
  });

  test("rerank toggled off sends a zero lambda override", async () => {
    const fake = new FakeService();
    const { app, root } = await startedApp(fake);
    q<HTMLInputElement>(root, ".rerank-toggle").checked = false;
    await app.submit(SCRIPT[0].utterance);
    expect(fake.asks[0].body.rerank_lambda).toBe(0);
  });

  test("k=0 is clamped to 1 with a notice", async () => {
    const fake = new FakeService();
    const { app, root } = await startedApp(fake);
    const kInput = q<HTMLInputElement>(root, ".k-input");
    kInput.value = "0";
    await app.submit(SCRIPT[0].utterance);
    expect(kInput.value).toBe("1");
    expect(fake.asks[0].body.k).toBe(1);
    const notice = q<HTMLElement>(root, ".notice");
    expect(notice.hidden).toBe(false);
    expect(notice.textContent).toContain("clamped");
  });

  test("a non-numeric k falls back to the default with a notice", async () => {
    const fake = new FakeService();
    const { app, root } = await startedApp(fake);
    const kInput = q<HTMLInputElement>(root, ".k-input");
    kInput.value = "fifty";
    await app.submit(SCRIPT[0].utterance);
    expect(kInput.value).toBe("10");
    expect(fake.asks[0].body.k).toBe(10);
    expect(q<HTMLElement>(root, ".notice").textContent).toContain("must be a number");
  });

  test("oversized k is clamped on the change event, before any submit", () => {
    const fake = new FakeService();
    const { root } = makeApp(fake);
    const kInput = q<HTMLInputElement>(root, ".k-input");
    kInput.value = "99999";
    kInput.dispatchEvent(new Event("change"));
    expect(kInput.value).toBe("1000");
    expect(q<HTMLElement>(root, ".notice").textContent).toContain("clamped");
  });
});

describe("validation and errors", () => {
  test("blank input never issues a request", async () => {
    const fake = new FakeService();
    const { app, root } = await startedApp(fake);
    expect(await app.submit("   ")).toBe(false);
    expect(fake.asks).toHaveLength(0);
    expect(root.querySelectorAll(".turn")).toHaveLength(0);
    const notice = q<HTMLElement>(root, ".notice");
    expect(notice.hidden).toBe(false);
    expect(notice.textContent).toContain("Type a question");
  });

  test("a 5xx shows the service message and keeps the transcript", async () => {
    const fake = new FakeService();
    const { app, root } = await startedApp(fake);
    await app.submit(SCRIPT[0].utterance);
    await app.submit(SCRIPT[1].utterance);

    fake.failMode = "http500";
    expect(await app.submit(SCRIPT[2].utterance)).toBe(false);
    const banner = q<HTMLElement>(root, ".error-banner");
    expect(banner.hidden).toBe(false);
    expect(banner.textContent).toContain("500");
    expect(banner.textContent).toContain("made-up failure");
    expect(root.querySelectorAll(".turn")).toHaveLength(2);
    expect(q<HTMLInputElement>(root, ".ask-input").disabled).toBe(false);

    // The next successful turn clears the banner.
    fake.failMode = "none";
    expect(await app.submit(SCRIPT[2].utterance)).toBe(true);
    expect(banner.hidden).toBe(true);
    expect(root.querySelectorAll(".turn")).toHaveLength(3);
  });

  test("a network failure reads as unreachable, input stays enabled", async () => {
    const fake = new FakeService();
    const { app, root } = await startedApp(fake);
    fake.failMode = "network";
    expect(await app.submit(SCRIPT[0].utterance)).toBe(false);
    expect(q<HTMLElement>(root, ".error-banner").textContent).toContain("cannot reach");
    expect(q<HTMLInputElement>(root, ".ask-input").disabled).toBe(false);
  });
});

describe("session lifecycle", () => {
  test("an unknown session mid-conversation recovers with a new session notice", async () => {
    const fake = new FakeService();
    const { app, root } = await startedApp(fake);
    await app.submit(SCRIPT[0].utterance);
    await app.submit(SCRIPT[1].utterance);
    expect(app.session).toBe("s1");

    fake.restart();
    expect(await app.submit(SCRIPT[2].utterance)).toBe(true);

    expect(app.session).toBe("s2");
    expect(q(root, ".session-id").textContent).toBe("s2");
    const notice = q<HTMLElement>(root, ".notice");
    expect(notice.hidden).toBe(false);
    expect(notice.textContent).toContain("new session");
    // Transcript is append-only across the recovery.
    expect(root.querySelectorAll(".turn")).toHaveLength(3);
    const last = fake.asks[fake.asks.length - 1];
    expect(last.sessionId).toBe("s2");
    expect(last.body.utterance).toBe(SCRIPT[2].utterance);
  });

  test("only one ask is in flight at a time", async () => {
    const fake = new FakeService();
    const { app, root } = await startedApp(fake);

    let release!: () => void;
    fake.gate = new Promise<void>((resolve) => (release = resolve));
    const first = app.submit(SCRIPT[0].utterance);
    await Promise.resolve();
    expect(q<HTMLInputElement>(root, ".ask-input").disabled).toBe(true);

    expect(await app.submit(SCRIPT[2].utterance)).toBe(false);
    release();
    fake.gate = null;
    expect(await first).toBe(true);
    expect(fake.asks).toHaveLength(1);
    expect(q<HTMLInputElement>(root, ".ask-input").disabled).toBe(false);
  });

  test("reloading from the history endpoint reconstructs the identical view", async () => {
    const fake = new FakeService();
    const { app, root } = await startedApp(fake);
    for (const step of SCRIPT) await app.submit(step.utterance);

    const history = fake.historyOf(app.session ?? "");
    expect(turnsFromHistory(history)).toEqual(app.turns);

    const rebuilt = makeApp(fake);
    rebuilt.app.loadFromHistory(history);
    expect(q(rebuilt.root, ".transcript").innerHTML).toBe(q(root, ".transcript").innerHTML);
    expect(rebuilt.app.turns).toEqual(app.turns);
    expect(q(rebuilt.root, ".session-id").textContent).toBe(app.session);
  });
});
