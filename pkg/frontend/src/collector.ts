/**
 * Attribute collector.
 *
 * Gathers every attribute scoped to the channel (emitting explicit nulls for
 * unsupported interfaces, so the server can tell "unsupported" from
 * "truncated"), then posts the payload asynchronously. Probing and delivery
 * share one deadline; on timeout the remaining attributes go out as nulls.
 * Nothing here ever throws into the host page.
 */
import { ProbeWindow, defaultWindow } from "./env.js";
import { PROBES, resetProbeCache } from "./probes.js";
import { scopedAttributes } from "./registry.js";
import { CollectorConfig, CollectPayload, CollectResult } from "./types.js";

export const SCHEMA_VERSION = "1";
const DEFAULT_TIMEOUT_MS = 3000;

function deadline<T>(promise: Promise<T>, ms: number): Promise<T | null> {
  return new Promise((resolve) => {
    const timer = setTimeout(() => resolve(null), ms);
    promise.then(
      (value) => {
        clearTimeout(timer);
        resolve(value);
      },
      () => {
        clearTimeout(timer);
        resolve(null);
      }
    );
  });
}

export async function gatherAttributes(
  channel: "web" | "app",
  w: ProbeWindow,
  budgetMs: number
): Promise<Record<string, string | null>> {
  resetProbeCache();
  const attributes: Record<string, string | null> = {};
  const started = Date.now();
  for (const entry of scopedAttributes(channel)) {
    const probe = PROBES[entry.name];
    if (!probe) {
      attributes[entry.name] = null;
      continue;
    }
    const remaining = budgetMs - (Date.now() - started);
    if (remaining <= 0) {
      attributes[entry.name] = null;
      continue;
    }
    try {
      const result = probe(w);
      attributes[entry.name] =
        result instanceof Promise ? await deadline(result, remaining) : result;
    } catch {
      attributes[entry.name] = null;
    }
  }
  return attributes;
}

export async function collect(
  config: CollectorConfig,
  w: ProbeWindow = defaultWindow()
): Promise<CollectResult> {
  const timeoutMs = config.timeoutMs ?? DEFAULT_TIMEOUT_MS;
  const started = Date.now();
  let attributes: Record<string, string | null> = {};
  let dnt = false;
  try {
    attributes = await gatherAttributes(config.channel, w, Math.floor(timeoutMs * 0.8));
    const flag = w.navigator?.doNotTrack;
    dnt = flag === "1" || flag === "yes" || flag === true;
  } catch {
    // keep whatever was gathered; completeness is the server's call
  }
  const payload: CollectPayload = {
    schema_version: SCHEMA_VERSION,
    device_type: config.deviceType,
    os: config.os,
    agent: config.agent,
    channel: config.channel,
    ad_id: config.adId ?? null,
    dnt,
    attributes,
    collection_ms: Date.now() - started,
  };
  let status: CollectResult["status"] = null;
  try {
    const fetchFn = w.fetch ?? (typeof fetch === "undefined" ? undefined : fetch);
    if (fetchFn) {
      const response = await deadline(
        fetchFn(`${config.endpoint}/v1/collect`, {
          method: "POST",
          headers: { "content-type": "application/json" },
          body: JSON.stringify(payload),
          keepalive: true,
        }),
        Math.max(250, timeoutMs - (Date.now() - started))
      );
      if (response) {
        const body = await response.json().catch(() => null);
        status = body?.status ?? null;
      }
    }
  } catch {
    status = null; // network failures are silent: ads must not break the page
  }
  return { status, payload };
}
