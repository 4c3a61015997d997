/**
 * Attribute catalog mirrored from the collection service's adf-v1 registry.
 *
 * Names are the wire contract: the ingest endpoint rejects payloads carrying
 * unknown attribute names and filters payloads missing any scoped name, so
 * the conformance tests validate this list against a live server.
 */

export interface AttributeEntry {
  name: string;
  /** also collected inside mobile-app webviews */
  app: boolean;
  /** meta-attribute this value folds into for reporting/blocking */
  meta: string;
}

const A = true; // app-and-browser
const W = false; // browser-only

export const ATTRIBUTES: readonly AttributeEntry[] = [
  { name: "ua", app: A, meta: "UserAgent" },
  { name: "timeZoneOffset", app: A, meta: "Time zone offset" },
  { name: "hw Concurrency", app: A, meta: "CPU cores" },
  { name: "device Memory", app: A, meta: "Device memory" },
  { name: "colorDepth", app: W, meta: "Screen: color depth" },
  { name: "orientation.angle", app: A, meta: "Screen: orientation angle" },
  { name: "orientation.type", app: W, meta: "Screen: orientation type" },
  { name: "screenLeft", app: W, meta: "Screen: pixel left" },
  { name: "maxTouchPoints", app: A, meta: "Simultaneous touch points" },
  { name: "languages", app: A, meta: "Languages" },
  { name: "pdfViewerEnabled", app: W, meta: "PDF viewer enabled" },
  { name: "availWidth", app: A, meta: "available width" },
  { name: "availHeight", app: A, meta: "available height" },
  { name: "availLeft", app: W, meta: "available left" },
  { name: "availTop", app: W, meta: "available top" },
  { name: "fullScreenEnabled", app: A, meta: "full screen enabled" },
  { name: "quota", app: A, meta: "Storage: quota" },
  { name: "window.navigator", app: A, meta: "navigator properties" },
  { name: "plugins", app: W, meta: "Plugins" },
  { name: "cookieEnabled", app: W, meta: "Cookie enabled" },
  { name: "mimeType", app: W, meta: "MIME type" },
  { name: "accelerometer", app: W, meta: "User Permissions state" },
  { name: "background-fetch", app: W, meta: "User Permissions state" },
  { name: "background-sync", app: W, meta: "User Permissions state" },
  { name: "camera", app: W, meta: "User Permissions state" },
  { name: "clipboard-read", app: W, meta: "User Permissions state" },
  { name: "clipboard-write", app: W, meta: "User Permissions state" },
  { name: "display-capture", app: W, meta: "User Permissions state" },
  { name: "geolocation", app: W, meta: "User Permissions state" },
  { name: "gyroscope", app: W, meta: "User Permissions state" },
  { name: "magnetometer", app: W, meta: "User Permissions state" },
  { name: "microphone", app: W, meta: "User Permissions state" },
  { name: "midi", app: W, meta: "User Permissions state" },
  { name: "nfc", app: W, meta: "User Permissions state" },
  { name: "notifications", app: W, meta: "User Permissions state" },
  { name: "payment-handler", app: W, meta: "User Permissions state" },
  { name: "persistent-storage", app: W, meta: "User Permissions state" },
  { name: "screen-wake-lock", app: W, meta: "User Permissions state" },
  { name: "mediaDevices", app: A, meta: "Media devices" },
  { name: "canvas", app: A, meta: "Canvas" },
  { name: "fonts", app: A, meta: "Fonts" },
  { name: "bluetoothAvailability", app: W, meta: "Bluetooth availability" },
  { name: "charging", app: W, meta: "Battery status: charging" },
  { name: "baseLatency", app: A, meta: "Audio cxt: base latency" },
  { name: "maxChannelCount", app: W, meta: "Audio cxt: max channel count" },
  { name: "sampleRate", app: A, meta: "Audio cxt: sample rate" },
  { name: "state", app: W, meta: "Audio cxt: state" },
  { name: "webglRenderer", app: A, meta: "WebGL (Rend - Param)" },
  { name: "webglExtensions", app: A, meta: "WebGL Extensions" },
  { name: "powerPreference", app: A, meta: "WebGL (Rend - Param)" },
  { name: "ALIASED_LINE_WIDTH_RANGE", app: A, meta: "WebGL (Rend - Param)" },
  { name: "ALIASED_POINT_SIZE_RANGE", app: A, meta: "WebGL (Rend - Param)" },
  { name: "MAX_COMBINED_TEXTURE_IMAGE_UNITS", app: A, meta: "WebGL (Rend - Param)" },
  { name: "MAX_CUBE_MAP_TEXTURE_SIZE", app: A, meta: "WebGL (Rend - Param)" },
  { name: "MAX_FRAGMENT_UNIFORM_VECTORS", app: A, meta: "WebGL (Rend - Param)" },
  { name: "MAX_RENDERBUFFER_SIZE", app: A, meta: "WebGL (Rend - Param)" },
  { name: "MAX_VARYING_VECTORS", app: A, meta: "WebGL (Rend - Param)" },
  { name: "MAX_VERTEX_ATTRIBS", app: A, meta: "WebGL (Rend - Param)" },
  { name: "MAX_VERTEX_UNIFORM_VECTORS", app: A, meta: "WebGL (Rend - Param)" },
  { name: "MAX_VIEWPORT_DIMS", app: A, meta: "WebGL (Rend - Param)" },
  { name: "SAMPLES", app: A, meta: "WebGL (Rend - Param)" },
  { name: "STENCIL_VALUE_MASK", app: A, meta: "WebGL (Rend - Param)" },
  { name: "SUBPIXEL_BITS", app: A, meta: "WebGL (Rend - Param)" },
  { name: "FR_S_HIGH_INT [.rangeMax]", app: A, meta: "WebGL (Rend - Param)" },
  { name: "acc [.supported]", app: A, meta: "Audio formats: ACC" },
  { name: "aacp [.supported]", app: W, meta: "Audio formats: AACP" },
] as const;

export type Channel = "web" | "app";

export function scopedAttributes(channel: Channel): readonly AttributeEntry[] {
  return channel === "web" ? ATTRIBUTES : ATTRIBUTES.filter((a) => a.app);
}

/** Meta-attributes blocked by the bundled anti-fingerprinting script. */
export const BLOCKED_METAS: readonly string[] = [
  "CPU cores",
  "Device memory",
  "Media devices",
  "Languages",
  "User Permissions state",
  "Storage: quota",
  "navigator properties",
  "Canvas",
  "Fonts",
  "Bluetooth availability",
  "WebGL Extensions",
  "WebGL (Rend - Param)",
];

export function blockedAttributeNames(): Set<string> {
  const metas = new Set(BLOCKED_METAS);
  return new Set(ATTRIBUTES.filter((a) => metas.has(a.meta)).map((a) => a.name));
}
