// Keyboard control schemes for player-controlled entities, plus the two
// global simulation keys (pause/resume and reset). Keys are matched on
// KeyboardEvent.key with single letters lowercased, so Shift+W still
// steers.

import { PlayerInput } from "./engine.js";

export type SchemeName = "arrows" | "wasd" | "vi";

export const SCHEME_NAMES: readonly SchemeName[] = ["arrows", "wasd", "vi"];

export const SCHEMES: Record<SchemeName, Readonly<Record<string, PlayerInput>>> = {
  arrows: {
    ArrowUp: "UP",
    ArrowDown: "DOWN",
    ArrowLeft: "LEFT",
    ArrowRight: "RIGHT",
    " ": "SKIP",
  },
  wasd: {
    w: "UP",
    s: "DOWN",
    a: "LEFT",
    d: "RIGHT",
    f: "SKIP",
  },
  vi: {
    k: "UP",
    j: "DOWN",
    h: "LEFT",
    l: "RIGHT",
    ";": "SKIP",
  },
};

export const PAUSE_KEY = "p";
export const RESET_KEY = "r";

function normalize(key: string): string {
  return key.length === 1 ? key.toLowerCase() : key;
}

/** Player input for a key under the given scheme, or null when unmapped. */
export function inputForKey(scheme: SchemeName, key: string): PlayerInput | null {
  return SCHEMES[scheme][normalize(key)] ?? null;
}

export function isPauseKey(key: string): boolean {
  return normalize(key) === PAUSE_KEY;
}

export function isResetKey(key: string): boolean {
  return normalize(key) === RESET_KEY;
}
