import { readFileSync } from "node:fs";
import { fileURLToPath } from "node:url";

export function loadFixture<T>(name: string): T {
  const path = fileURLToPath(new URL(`./fixtures/${name}`, import.meta.url));
  return JSON.parse(readFileSync(path, "utf8")) as T;
}

export interface XrayEntry {
  tick: number;
  state: Record<string, [number, [number, number] | null]>;
}

export interface EngineCase {
  name: string;
  text: string;
  mode: "none" | "script" | "auto";
  max_ticks: number;
  script: Record<string, Record<string, string>>;
  final_tick: number;
  status: string | null;
  events: string[];
  xray: XrayEntry[];
}

export interface GoldenEntry {
  file: string;
  text: string;
  errors: { code: string; line: number; message: string }[];
}

export interface RoundTripEntry {
  name: string;
  input: string;
  canonical: string;
}

export interface RngStream {
  seed: string;
  next_u64: string[];
  mod5: number[];
  mod4: number[];
}
