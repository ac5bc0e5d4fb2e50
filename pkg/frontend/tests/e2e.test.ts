/** End-to-end acceptance: a scripted session against the real HTTP service.
 *
 * The service runs the bundled six-axiom example with a hidden simulated
 * target of {ax2} under the risk-optimized strategy. The script answers each
 * presented query exactly as a user whose intended KB lacks ax2 would, and
 * must reach the result panel listing ax2 after 3 rounds; duplicate answer
 * clicks must not advance the session.
 */

import { spawn, type ChildProcess } from "node:child_process";
import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { SessionController } from "../src/controller.js";
import { renderResultPanel, renderSession } from "../src/view.js";

const HERE = dirname(fileURLToPath(import.meta.url));
const KB = readFileSync(join(HERE, "..", "..", "tests", "fixtures", "university.kb"), "utf8");
const PORT = 8891;
const BASE = `http://127.0.0.1:${PORT}`;

/** What the intended KB (the example minus ax2) entails; answering from this
 * set simulates the user with hidden target {ax2}. */
const INTENDED_ENTAILMENTS = new Set(["PhDStudent", "PhD", "Student", "Researcher"]);

function oracleAnswer(literals: string[]): "yes" | "no" {
  return literals.every((atom) => INTENDED_ENTAILMENTS.has(atom)) ? "yes" : "no";
}

let service: ChildProcess;

async function waitForService(): Promise<void> {
  for (let attempt = 0; attempt < 100; attempt += 1) {
    try {
      const response = await fetch(`${BASE}/sessions/warmup-probe`);
      if (response.status === 404) {
        return;
      }
    } catch {
      // not listening yet
    }
    await new Promise((resolve) => setTimeout(resolve, 100));
  }
  throw new Error("service did not come up");
}

beforeAll(async () => {
  service = spawn(
    "python3",
    ["-m", "kbdebug.cli", "serve", "--port", String(PORT), "--host", "127.0.0.1"],
    { cwd: join(HERE, "..", ".."), stdio: "ignore" },
  );
  await waitForService();
}, 30_000);

afterAll(() => {
  // SIGKILL: the server ignores SIGTERM while handling its accept loop
  service.kill("SIGKILL");
});

const RIO_CONFIG = {
  kb: KB,
  strategy: "rio" as const,
  c: 0.4,
  c_min: 0,
  c_max: 0.5,
  epsilon: 0.25,
  oracle_target: ["ax2"],
};

describe("end-to-end session against the live service", () => {
  it("reaches the result panel listing ax2 in 3 rounds", async () => {
    const controller = new SessionController(new ApiClient(BASE));
    await controller.start(RIO_CONFIG);

    let state = controller.getState();
    expect(state.phase).toBe("session");
    expect(state.snapshot!.query!.literals).toEqual(["Researcher", "Student"]);
    expect(state.snapshot!.cautiousness.c).toBeCloseTo(0.4);

    let rounds = 0;
    while (controller.getState().snapshot!.status === "awaiting-answer") {
      expect(rounds).toBeLessThan(10);
      const literals = controller.getState().snapshot!.query!.literals;
      await controller.answer(oracleAnswer(literals));
      rounds += 1;
    }

    state = controller.getState();
    expect(rounds).toBe(3);
    expect(state.snapshot!.result).toEqual(["ax2"]);
    expect(state.snapshot!.history).toHaveLength(3);
    const html = renderResultPanel(state.snapshot!);
    expect(html).toContain("result-panel");
    expect(html).toContain("<code>ax2</code>");
    expect(renderSession(state)).toContain("remove these axioms");
  }, 20_000);

  it("treats duplicate answer clicks as a single state transition", async () => {
    const api = new ApiClient(BASE);
    const controller = new SessionController(api);
    await controller.start(RIO_CONFIG);
    const sessionId = controller.getState().snapshot!.id;

    // two rapid clicks: the second is guarded while the first is in flight
    const clickA = controller.answer("yes");
    const clickB = controller.answer("yes");
    await Promise.all([clickA, clickB]);
    expect(controller.getState().snapshot!.round).toBe(1);
    expect(controller.getState().snapshot!.history).toHaveLength(1);

    // a raw duplicate POST carrying the stale round token is idempotent too
    const replay = await api.postAnswer(sessionId, "yes", 0);
    expect(replay.round).toBe(1);
    expect(replay.history).toHaveLength(1);

    await api.deleteSession(sessionId);
  }, 20_000);
});
