/**
 * Conformance against a live collection service: the scripted browser
 * environment drives collect() end to end over real HTTP, with and without
 * the blocking script installed first.
 */
import { spawn, ChildProcess } from "node:child_process";
import { mkdtempSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { collect } from "../src/collector.js";
import { blockedAttributeNames } from "../src/registry.js";
import { shield } from "../src/shield.js";
import { CollectorConfig } from "../src/types.js";
import { makeFakeWindow } from "./fake_window.js";

const PORT = 8371;
const ENDPOINT = `http://127.0.0.1:${PORT}`;

let server: ChildProcess | null = null;

async function serverUp(): Promise<boolean> {
  try {
    const resp = await fetch(`${ENDPOINT}/v1/healthz`);
    return resp.status === 200;
  } catch {
    return false;
  }
}

beforeAll(async () => {
  const storage = mkdtempSync(join(tmpdir(), "collector-conformance-"));
  server = spawn(
    "python3",
    ["-m", "adfkit.cli", "serve", "--listen", `127.0.0.1:${PORT}`, "--storage-dir", storage,
     "--out-dir", storage],
    { stdio: "ignore" }
  );
  const deadline = Date.now() + 20_000;
  while (Date.now() < deadline) {
    if (await serverUp()) return;
    await new Promise((resolve) => setTimeout(resolve, 150));
  }
  throw new Error("collection service did not come up");
}, 30_000);

afterAll(() => {
  server?.kill();
});

function liveConfig(): CollectorConfig {
  return {
    endpoint: ENDPOINT,
    channel: "web",
    deviceType: "desktop",
    os: "Linux",
    agent: "Chrome",
    adId: "ad-conformance-1",
    timeoutMs: 5000,
  };
}

function liveWindow() {
  const w = makeFakeWindow();
  (w as any).fetch = (url: string, init?: any) => fetch(url, init);
  return w;
}

describe("collector against a live service", () => {
  it("stores a payload with all 66 keys present", async () => {
    const result = await collect(liveConfig(), liveWindow());
    expect(result.status).toBe("stored");
    expect(Object.keys(result.payload.attributes).length).toBe(66);

    const stats = await (await fetch(`${ENDPOINT}/v1/stats`)).json();
    expect(stats.stored).toBeGreaterThanOrEqual(1);
  });

  it("shielded run fixes the blocked attributes and nothing else", async () => {
    const plain = await collect(liveConfig(), liveWindow());
    const shieldedWindow = liveWindow();
    shield(shieldedWindow);
    const shielded = await collect(liveConfig(), shieldedWindow);

    // both runs are complete and accepted by the server
    expect(plain.status).toBe("stored");
    expect(shielded.status).toBe("stored");

    const blocked = blockedAttributeNames();
    for (const name of Object.keys(plain.payload.attributes)) {
      if (blocked.has(name)) {
        expect(shielded.payload.attributes[name], name).not.toEqual(
          plain.payload.attributes[name]
        );
      } else {
        expect(shielded.payload.attributes[name], name).toEqual(
          plain.payload.attributes[name]
        );
      }
    }
  });

  it("round-trips through the export endpoint", async () => {
    const exportBody = await (await fetch(`${ENDPOINT}/v1/export`)).text();
    const rows = exportBody.trim().split("\n").map((line) => JSON.parse(line));
    expect(rows.length).toBeGreaterThanOrEqual(3);
    for (const row of rows) {
      expect(Object.keys(row.attributes).length).toBe(66);
      expect(row.agent).toBe("Chrome");
      expect(row.sample_id).toMatch(/^srv-/);
    }
  });
});
