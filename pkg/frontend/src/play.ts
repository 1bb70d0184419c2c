// State behind the play screen: one live fortress, pacing and display
// settings, the input buffer for player-controlled entities, and the
// X-ray selection. No DOM here; the view draws whatever `renderCells`
// derives from the engine state, so the display at tick t is a pure
// function of that state.

import {
  EntityInstance,
  FLOOR_CHAR,
  Fortress,
  GRID_HEIGHT,
  GRID_WIDTH,
  SimEvent,
  TerminationReason,
  WALL_CHAR,
  eventLine,
  fortressHasPlayer,
  isPlayerControlled,
  isWall,
} from "./model.js";
import { Inputs, PlayerInput, TickReport, autoRandomInputs, init, step } from "./engine.js";
import { parse } from "./dsl.js";
import { SchemeName } from "./keymap.js";

export interface RenderCell {
  ch: string;
  /** Player-controlled entity: drawn with the cyan background. */
  player: boolean;
  /** Instance currently inspected in the X-ray window. */
  xray: boolean;
  instanceId: number | null;
}

/** Grid of display cells from the current engine state. Later instances
 * at a shared cell win, matching the reading order of the event log. */
export function renderCells(fortress: Fortress, xrayId: number | null): RenderCell[][] {
  const rows: RenderCell[][] = [];
  for (let y = 0; y < GRID_HEIGHT; y++) {
    const row: RenderCell[] = [];
    for (let x = 0; x < GRID_WIDTH; x++) {
      row.push({
        ch: isWall(x, y) ? WALL_CHAR : FLOOR_CHAR,
        player: false,
        xray: false,
        instanceId: null,
      });
    }
    rows.push(row);
  }
  for (const inst of fortress.instances) {
    const cell = rows[inst.y]?.[inst.x];
    if (!cell) continue;
    cell.ch = inst.char;
    cell.player = isPlayerControlled(fortress, inst);
    cell.xray = xrayId !== null && inst.id === xrayId;
    cell.instanceId = inst.id;
  }
  return rows;
}

export const FONT_OPTIONS: readonly string[] = [
  "monospace",
  "Courier New",
  "Consolas",
  "Menlo",
  "DejaVu Sans Mono",
  "Fira Mono",
];

export const SPEED_OPTIONS: readonly number[] = [1, 2, 4, 8, 16];

export class PlayController {
  readonly text: string;
  readonly name: string;
  readonly author: string;

  fortress: Fortress;
  playing = false;
  speed = 4; // ticks per second
  fontFamily: string = FONT_OPTIONS[0];
  fontSize = 18;
  scheme: SchemeName = "arrows";
  autoPlayer = false;
  logVisible = true;
  seedOverride: bigint | null = null;
  xrayId: number | null = null;

  logLines: string[] = [];
  private buffered: PlayerInput | null = null;

  constructor(text: string, name = "", author = "") {
    this.text = text;
    this.name = name;
    this.author = author;
    this.fortress = init(parse(text), null);
  }

  get hasPlayer(): boolean {
    return fortressHasPlayer(this.fortress);
  }

  get terminated(): TerminationReason | null {
    return this.fortress.status;
  }

  /** Back to the initial placement; a fixed seed reproduces the exact
   * run that was just displayed. */
  reset(): void {
    this.fortress = init(parse(this.text), this.seedOverride);
    this.logLines = [];
    this.buffered = null;
    this.playing = false;
    if (this.xrayId !== null && !this.fortress.instances.some((i) => i.id === this.xrayId)) {
      this.xrayId = null;
    }
  }

  /** Parses the seed field; empty clears the override. */
  setSeedOverride(text: string): boolean {
    const trimmed = text.trim();
    if (trimmed === "") {
      this.seedOverride = null;
      return true;
    }
    if (!/^[0-9]{1,20}$/.test(trimmed)) return false;
    const value = BigInt(trimmed);
    if (value >= 1n << 64n) return false;
    this.seedOverride = value;
    return true;
  }

  /** Remembers one directional press until the next tick consumes it. */
  bufferInput(input: PlayerInput): void {
    if (!this.autoPlayer) {
      this.buffered = input;
    }
  }

  /** Inputs for the next tick: automated random presses when the toggle
   * is on, otherwise the buffered key applied to every player entity. */
  private nextInputs(): Inputs | null {
    if (this.autoPlayer) {
      return autoRandomInputs(this.fortress);
    }
    if (this.buffered === null) return null;
    const inputs: Inputs = new Map();
    for (const inst of this.fortress.instances) {
      if (isPlayerControlled(this.fortress, inst)) {
        inputs.set(inst.id, this.buffered);
      }
    }
    this.buffered = null;
    return inputs;
  }

  /** One engine tick; no-op once the run has terminated. */
  tick(): TickReport | null {
    if (this.fortress.status !== null) {
      this.playing = false;
      return null;
    }
    const report = step(this.fortress, this.nextInputs());
    for (const event of report.events) {
      this.logLines.push(eventLine(event));
    }
    if (report.status !== null) {
      this.playing = false;
    }
    return report;
  }

  instanceAt(x: number, y: number): EntityInstance | null {
    let found: EntityInstance | null = null;
    for (const inst of this.fortress.instances) {
      if (inst.x === x && inst.y === y) found = inst;
    }
    return found;
  }

  lastEvents(limit: number): SimEvent[] {
    return this.fortress.log.slice(-limit);
  }
}
