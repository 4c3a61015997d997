/**
 * One probe per collected attribute.
 *
 * A probe returns a string value or null ("interface unsupported"), and must
 * never throw: anything unexpected degrades to null so the payload stays
 * complete. Long raw values (canvas pixels, extension lists, font masks)
 * are hashed client-side to keep the payload small.
 */
import { ProbeWindow, shortHash } from "./env.js";

export type Probe = (w: ProbeWindow) => Promise<string | null> | (string | null);

function str(value: unknown): string | null {
  if (value === undefined || value === null) return null;
  return String(value);
}

function sync(fn: (w: ProbeWindow) => unknown): Probe {
  return (w) => {
    try {
      return str(fn(w));
    } catch {
      return null;
    }
  };
}

function async_(fn: (w: ProbeWindow) => Promise<unknown>): Probe {
  return async (w) => {
    try {
      return str(await fn(w));
    } catch {
      return null;
    }
  };
}

const PERMISSIONS = [
  "accelerometer",
  "background-fetch",
  "background-sync",
  "camera",
  "clipboard-read",
  "clipboard-write",
  "display-capture",
  "geolocation",
  "gyroscope",
  "magnetometer",
  "microphone",
  "midi",
  "nfc",
  "notifications",
  "payment-handler",
  "persistent-storage",
  "screen-wake-lock",
] as const;

function permissionProbe(name: string): Probe {
  return async_(async (w) => {
    const result = await w.navigator.permissions.query({ name });
    return result.state;
  });
}

const FONT_SAMPLE = [
  "Arial",
  "Courier New",
  "Georgia",
  "Helvetica Neue",
  "Menlo",
  "Monaco",
  "Segoe UI",
  "Tahoma",
  "Times New Roman",
  "Ubuntu",
  "Verdana",
  "Roboto",
];

let glCache: { gl: any } | null = null;

function webgl(w: ProbeWindow): any {
  if (glCache) return glCache.gl;
  const canvas = w.document.createElement("canvas");
  const gl = canvas.getContext("webgl") ?? canvas.getContext("experimental-webgl");
  glCache = { gl };
  return gl;
}

/** Drop the per-window WebGL context cache (each collection run is fresh). */
export function resetProbeCache(): void {
  glCache = null;
}

function glParameter(name: string): Probe {
  return sync((w) => {
    const gl = webgl(w);
    const value = gl.getParameter(gl[name]);
    if (value === undefined || value === null) return null;
    if (typeof value === "object" && typeof value.length === "number") {
      return Array.from(value).join(",");
    }
    return value;
  });
}

function audioContext(w: ProbeWindow): any {
  const Ctor = w.AudioContext ?? w.webkitAudioContext;
  return new Ctor();
}

function mediaSupport(contentType: string): Probe {
  return async_(async (w) => {
    const info = await w.navigator.mediaCapabilities.decodingInfo({
      type: "file",
      audio: { contentType, channels: 2, bitrate: 132700, samplerate: 5200 },
    });
    return info.supported;
  });
}

export const PROBES: Record<string, Probe> = {
  ua: sync((w) => w.navigator.userAgent),
  timeZoneOffset: sync((w) => new (w.Date ?? Date)().getTimezoneOffset()),
  "hw Concurrency": sync((w) => w.navigator.hardwareConcurrency),
  "device Memory": sync((w) => w.navigator.deviceMemory),
  colorDepth: sync((w) => w.screen.colorDepth),
  "orientation.angle": sync((w) => w.screen.orientation.angle),
  "orientation.type": sync((w) => w.screen.orientation.type),
  screenLeft: sync((w) => w.screenLeft),
  maxTouchPoints: sync((w) => w.navigator.maxTouchPoints),
  languages: sync((w) => {
    const langs = w.navigator.languages;
    return langs && langs.length ? Array.from(langs).join(",") : null;
  }),
  pdfViewerEnabled: sync((w) => w.navigator.pdfViewerEnabled),
  availWidth: sync((w) => w.screen.availWidth),
  availHeight: sync((w) => w.screen.availHeight),
  availLeft: sync((w) => w.screen.availLeft),
  availTop: sync((w) => w.screen.availTop),
  fullScreenEnabled: sync((w) => w.document.fullscreenEnabled),
  quota: async_(async (w) => (await w.navigator.storage.estimate()).quota),
  "window.navigator": sync((w) => {
    if (!w.navigator) return null;
    const names: string[] = [];
    let obj = w.navigator;
    while (obj && obj !== Object.prototype) {
      names.push(...Object.getOwnPropertyNames(obj));
      obj = Object.getPrototypeOf(obj);
    }
    const uniq = Array.from(new Set(names)).sort();
    return `${uniq.length}:${shortHash(uniq.join(";"))}`;
  }),
  plugins: sync((w) => {
    const plugins = w.navigator.plugins;
    if (!plugins) return null;
    return Array.from(plugins as ArrayLike<{ name: string }>)
      .map((p) => p.name)
      .join(",");
  }),
  cookieEnabled: sync((w) => w.navigator.cookieEnabled),
  mimeType: sync((w) => {
    const types = w.navigator.mimeTypes;
    if (!types) return null;
    return Array.from(types as ArrayLike<{ type: string }>)
      .map((m) => m.type)
      .join(",");
  }),
  ...Object.fromEntries(PERMISSIONS.map((name) => [name, permissionProbe(name)])),
  mediaDevices: async_(async (w) => {
    const devices = await w.navigator.mediaDevices.enumerateDevices();
    const listing = devices
      .map((d: any) => `${d.kind}:${d.deviceId ?? ""}:${d.label ?? ""}`)
      .join(";");
    return `${devices.length}:${shortHash(listing)}`;
  }),
  canvas: sync((w) => {
    const canvas = w.document.createElement("canvas");
    canvas.width = 240;
    canvas.height = 60;
    const ctx = canvas.getContext("2d");
    ctx.textBaseline = "top";
    ctx.font = "14px Arial";
    ctx.fillStyle = "#f60";
    ctx.fillRect(125, 1, 62, 20);
    ctx.fillStyle = "#069";
    ctx.fillText("fingerprint probe, <canvas> 1.0", 2, 15);
    return shortHash(canvas.toDataURL());
  }),
  fonts: sync((w) => {
    const mask = FONT_SAMPLE.map((f) => (w.document.fonts.check(`12px "${f}"`) ? "1" : "0"));
    return mask.join("");
  }),
  bluetoothAvailability: async_(async (w) => w.navigator.bluetooth.getAvailability()),
  charging: async_(async (w) => (await w.navigator.getBattery()).charging),
  baseLatency: sync((w) => audioContext(w).baseLatency),
  maxChannelCount: sync((w) => audioContext(w).destination.maxChannelCount),
  sampleRate: sync((w) => audioContext(w).sampleRate),
  state: sync((w) => audioContext(w).state),
  webglRenderer: sync((w) => {
    const gl = webgl(w);
    const info = gl.getExtension("WEBGL_debug_renderer_info");
    return gl.getParameter(info ? info.UNMASKED_RENDERER_WEBGL : gl.RENDERER);
  }),
  webglExtensions: sync((w) => {
    const extensions = webgl(w).getSupportedExtensions();
    return extensions ? shortHash(extensions.sort().join(",")) : null;
  }),
  powerPreference: sync((w) => webgl(w).getContextAttributes().powerPreference),
  ...Object.fromEntries(
    [
      "ALIASED_LINE_WIDTH_RANGE",
      "ALIASED_POINT_SIZE_RANGE",
      "MAX_COMBINED_TEXTURE_IMAGE_UNITS",
      "MAX_CUBE_MAP_TEXTURE_SIZE",
      "MAX_FRAGMENT_UNIFORM_VECTORS",
      "MAX_RENDERBUFFER_SIZE",
      "MAX_VARYING_VECTORS",
      "MAX_VERTEX_ATTRIBS",
      "MAX_VERTEX_UNIFORM_VECTORS",
      "MAX_VIEWPORT_DIMS",
      "SAMPLES",
      "STENCIL_VALUE_MASK",
      "SUBPIXEL_BITS",
    ].map((name) => [name, glParameter(name)])
  ),
  "FR_S_HIGH_INT [.rangeMax]": sync((w) => {
    const gl = webgl(w);
    const format = gl.getShaderPrecisionFormat(gl.FRAGMENT_SHADER, gl.HIGH_INT);
    return format ? format.rangeMax : null;
  }),
  "acc [.supported]": mediaSupport("audio/aac"),
  "aacp [.supported]": mediaSupport("audio/aacp"),
};
