export interface CollectorConfig {
  /** base URL of the ingest service, e.g. http://127.0.0.1:8300 */
  endpoint: string;
  registryVersion?: string;
  /** overall budget for probing + delivery; ads are short-lived */
  timeoutMs?: number;
  channel: "web" | "app";
  deviceType: "desktop" | "mobile";
  os: string;
  agent: string;
  adId?: string | null;
}

export interface CollectPayload {
  schema_version: string;
  device_type: string;
  os: string;
  agent: string;
  channel: string;
  ad_id: string | null;
  dnt: boolean;
  attributes: Record<string, string | null>;
  collection_ms: number;
}

export interface CollectResult {
  /** null when delivery failed; failures never surface to the host page */
  status: "stored" | "filtered" | "rejected" | null;
  payload: CollectPayload;
}
