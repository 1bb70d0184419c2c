import { describe, expect, it } from "vitest";
import { SCHEME_NAMES, inputForKey, isPauseKey, isResetKey } from "../src/keymap.js";

describe("keyboard schemes", () => {
  it("maps the arrow scheme", () => {
    expect(inputForKey("arrows", "ArrowUp")).toBe("UP");
    expect(inputForKey("arrows", "ArrowDown")).toBe("DOWN");
    expect(inputForKey("arrows", "ArrowLeft")).toBe("LEFT");
    expect(inputForKey("arrows", "ArrowRight")).toBe("RIGHT");
    expect(inputForKey("arrows", " ")).toBe("SKIP");
  });

  it("maps the wasd scheme", () => {
    expect(inputForKey("wasd", "w")).toBe("UP");
    expect(inputForKey("wasd", "s")).toBe("DOWN");
    expect(inputForKey("wasd", "a")).toBe("LEFT");
    expect(inputForKey("wasd", "d")).toBe("RIGHT");
    expect(inputForKey("wasd", "f")).toBe("SKIP");
  });

  it("maps the vi scheme", () => {
    expect(inputForKey("vi", "k")).toBe("UP");
    expect(inputForKey("vi", "j")).toBe("DOWN");
    expect(inputForKey("vi", "h")).toBe("LEFT");
    expect(inputForKey("vi", "l")).toBe("RIGHT");
    expect(inputForKey("vi", ";")).toBe("SKIP");
  });

  it("accepts shifted letters", () => {
    expect(inputForKey("wasd", "W")).toBe("UP");
    expect(inputForKey("vi", "K")).toBe("UP");
  });

  it("ignores keys outside the selected scheme", () => {
    expect(inputForKey("arrows", "w")).toBeNull();
    expect(inputForKey("wasd", "ArrowUp")).toBeNull();
    expect(inputForKey("vi", " ")).toBeNull();
    expect(inputForKey("arrows", "Enter")).toBeNull();
    for (const scheme of SCHEME_NAMES) {
      expect(inputForKey(scheme, "q")).toBeNull();
    }
  });

  it("reserves p for pause and r for reset in every scheme", () => {
    expect(isPauseKey("p")).toBe(true);
    expect(isPauseKey("P")).toBe(true);
    expect(isResetKey("r")).toBe(true);
    expect(isResetKey("R")).toBe(true);
    expect(isPauseKey("r")).toBe(false);
    expect(isResetKey("p")).toBe(false);
    for (const scheme of SCHEME_NAMES) {
      expect(inputForKey(scheme, "p")).toBeNull();
      expect(inputForKey(scheme, "r")).toBeNull();
    }
  });
});
