// The X-ray window draws whatever xray() reports. This pins that output
// to the server's per-tick trace over the long scripted player run, so
// the active-node highlight can never drift from the engine.

import { describe, expect, it } from "vitest";
import { parse } from "../src/dsl.js";
import { Inputs, PlayerInput, init, step, xray } from "../src/engine.js";
import { EngineCase, loadFixture } from "./helpers.js";

const cases = loadFixture<EngineCase[]>("engine-cases.json");
const players = cases.find((c) => c.name === "players")!;

describe("xray trace", () => {
  it("covers a long scripted run", () => {
    expect(players.final_tick).toBe(200);
    expect(Object.keys(players.script).length).toBeGreaterThan(0);
  });

  it("matches the server state for every instance on every tick", () => {
    const fortress = init(parse(players.text), null);
    for (const entry of players.xray) {
      const inputs: Inputs = new Map();
      const scripted = players.script[String(fortress.tick + 1)] ?? {};
      for (const [id, input] of Object.entries(scripted)) {
        inputs.set(Number(id), input as PlayerInput);
      }
      step(fortress, inputs);
      expect(fortress.tick).toBe(entry.tick);
      const seen: Record<string, [number, [number, number] | null]> = {};
      for (const inst of fortress.instances) {
        const [cls, node, lastEdge] = xray(fortress, inst.id);
        expect(cls.char).toBe(inst.char);
        seen[String(inst.id)] = [node, lastEdge === null ? null : [lastEdge[0], lastEdge[1]]];
      }
      expect(seen).toEqual(entry.state);
    }
  });

  it("rejects unknown instance ids", () => {
    const fortress = init(parse(players.text), null);
    expect(() => xray(fortress, 9999)).toThrow();
  });
});
