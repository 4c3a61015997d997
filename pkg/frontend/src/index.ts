export { collect, gatherAttributes, SCHEMA_VERSION } from "./collector.js";
export { shield, SHIELD_CONSTANTS } from "./shield.js";
export { ATTRIBUTES, BLOCKED_METAS, blockedAttributeNames, scopedAttributes } from "./registry.js";
export type { CollectorConfig, CollectPayload, CollectResult } from "./types.js";
export type { ProbeWindow } from "./env.js";
