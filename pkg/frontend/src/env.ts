/**
 * The browser surface the probes read, expressed structurally so tests can
 * inject a scripted window and real pages pass `window` straight through.
 * Everything is optional: absent interfaces probe to null.
 */

export interface ProbeWindow {
  navigator?: any;
  screen?: any;
  document?: any;
  screenLeft?: number;
  AudioContext?: any;
  webkitAudioContext?: any;
  fetch?: (url: string, init?: any) => Promise<{ status: number; json(): Promise<any> }>;
  Date?: any;
}

export function defaultWindow(): ProbeWindow {
  // eslint-disable-next-line no-undef
  return typeof window === "undefined" ? {} : (window as unknown as ProbeWindow);
}

/** djb2 over UTF-16 code units, hex encoded; keeps long values compact. */
export function shortHash(text: string): string {
  let h = 5381;
  for (let i = 0; i < text.length; i++) {
    h = ((h << 5) + h + text.charCodeAt(i)) >>> 0;
  }
  return h.toString(16).padStart(8, "0");
}
