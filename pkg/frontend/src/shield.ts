/**
 * Anti-fingerprinting blocking script.
 *
 * Rewrites the interfaces behind the twelve highest-discrimination
 * meta-attributes so they report fixed or empty values; everything else —
 * notably screen geometry, which pages need for layout — is left alone.
 * Designed to run before any page script (content script at document_start),
 * and safe to run twice.
 */
import { ProbeWindow } from "./env.js";

const MARKER = "__attributeShieldInstalled";

/** Fixed values reported once the shield is active. */
export const SHIELD_CONSTANTS = {
  hardwareConcurrency: 4,
  deviceMemory: 8,
  languages: ["en-US"],
  permissionState: "prompt",
  storageQuota: 2147483648,
  storageUsage: 0,
  webglRenderer: "shielded",
  powerPreference: "default",
  canvasDataUrl: "data:image/png;base64,shielded",
  navigatorKeys: [
    "userAgent",
    "language",
    "languages",
    "platform",
    "cookieEnabled",
    "doNotTrack",
    "maxTouchPoints",
    "hardwareConcurrency",
    "deviceMemory",
    "permissions",
    "storage",
    "mediaDevices",
    "bluetooth",
    "mediaCapabilities",
    "plugins",
    "mimeTypes",
    "pdfViewerEnabled",
  ],
} as const;

function defineConstant(obj: any, key: string, value: unknown): void {
  try {
    Object.defineProperty(obj, key, { value, configurable: true, enumerable: true });
  } catch {
    try {
      obj[key] = value;
    } catch {
      // non-writable host object; nothing more an extension could do either
    }
  }
}

/** Existing sub-object, or a fresh one attached if the host allows it. */
function ensure(obj: any, key: string): any {
  if (obj[key]) return obj[key];
  defineConstant(obj, key, {});
  return obj[key] ?? {};
}

function shieldedWebGLContext(): any {
  const zeros: Record<string, number> = {};
  const context = {
    RENDERER: 0x1f01,
    FRAGMENT_SHADER: 0x8b30,
    HIGH_INT: 0x8df5,
    getParameter: (_name: unknown) => 0,
    getSupportedExtensions: () => [],
    getExtension: (_name: string) => null,
    getContextAttributes: () => ({ powerPreference: SHIELD_CONSTANTS.powerPreference }),
    getShaderPrecisionFormat: () => ({ rangeMin: 0, rangeMax: 0, precision: 0 }),
  };
  return Object.assign(context, zeros);
}

export function shield(w: ProbeWindow): void {
  const win = w as any;
  if (win[MARKER]) return;
  win[MARKER] = true;

  let nav = win.navigator;
  if (!nav) {
    defineConstant(win, "navigator", {});
    nav = win.navigator ?? {};
  }

  defineConstant(nav, "hardwareConcurrency", SHIELD_CONSTANTS.hardwareConcurrency);
  defineConstant(nav, "deviceMemory", SHIELD_CONSTANTS.deviceMemory);
  defineConstant(nav, "languages", Object.freeze([...SHIELD_CONSTANTS.languages]));
  defineConstant(nav, "language", SHIELD_CONSTANTS.languages[0]);

  defineConstant(ensure(nav, "mediaDevices"), "enumerateDevices", async () => []);
  defineConstant(ensure(nav, "permissions"), "query", async (_q: unknown) => ({
    state: SHIELD_CONSTANTS.permissionState,
  }));
  defineConstant(ensure(nav, "storage"), "estimate", async () => ({
    quota: SHIELD_CONSTANTS.storageQuota,
    usage: SHIELD_CONSTANTS.storageUsage,
  }));
  defineConstant(ensure(nav, "bluetooth"), "getAvailability", async () => false);

  const doc = win.document;
  if (doc) {
    if (doc.fonts) {
      defineConstant(doc.fonts, "check", (_font: string) => false);
    }
    const createElement = doc.createElement?.bind(doc);
    if (createElement) {
      defineConstant(doc, "createElement", (tag: string, ...rest: unknown[]) => {
        const element = createElement(tag, ...rest);
        if (String(tag).toLowerCase() === "canvas") {
          defineConstant(element, "toDataURL", () => SHIELD_CONSTANTS.canvasDataUrl);
          const getContext = element.getContext?.bind(element);
          defineConstant(element, "getContext", (kind: string, ...args: unknown[]) => {
            if (kind === "webgl" || kind === "experimental-webgl" || kind === "webgl2") {
              return shieldedWebGLContext();
            }
            return getContext ? getContext(kind, ...args) : null;
          });
        }
        return element;
      });
    }
  }

  // A fixed navigator surface: own keys and prototype chain no longer leak
  // which optional interfaces this build exposes.
  try {
    const baseline: string[] = SHIELD_CONSTANTS.navigatorKeys.filter((k) => k in nav);
    const proxied = new Proxy(nav, {
      ownKeys: () => baseline.slice(),
      getOwnPropertyDescriptor: (target, key) => {
        if (typeof key === "string" && baseline.includes(key)) {
          return { configurable: true, enumerable: true, value: (target as any)[key] };
        }
        return undefined;
      },
      getPrototypeOf: () => Object.prototype,
    });
    Object.defineProperty(win, "navigator", { value: proxied, configurable: true });
  } catch {
    // navigator not replaceable on this host; the per-interface overrides
    // above still hold
  }
}
