// Fortress editor: the 14x6 interior placement grid with a character
// palette brush, display font picker, name/notes/seed fields (the seed
// accepts a 64-bit integer or the literal __RANDOM__), and submission
// to the gallery with the parent id attached when remixing.

import { ApiError } from "../api.js";
import {
  GRID_HEIGHT,
  GRID_WIDTH,
} from "../model.js";
import { FONT_OPTIONS } from "../play.js";
import { AppContext, ViewCleanup } from "./context.js";
import { button, el, labeled, messageArea, select } from "./dom.js";
import { editorTabs } from "./tabs.js";

export function renderFortressEditor(ctx: AppContext, root: HTMLElement): ViewCleanup {
  const session = ctx.session;
  const msg = messageArea();
  let brush: string | null = session.charOptions()[0] ?? null;
  let font = FONT_OPTIONS[0];

  const paletteBox = el("div", { class: "palette" });
  const gridBox = el("div", { class: "place-grid" });

  const drawPalette = () => {
    paletteBox.replaceChildren();
    for (const char of session.charOptions()) {
      const chip = el(
        "div",
        { class: brush === char ? "pal-chip pal-on" : "pal-chip" },
        char,
      );
      chip.addEventListener("click", () => {
        brush = char;
        drawPalette();
      });
      paletteBox.append(chip);
    }
    const eraser = el(
      "div",
      { class: brush === null ? "pal-chip pal-on" : "pal-chip" },
      "erase",
    );
    eraser.addEventListener("click", () => {
      brush = null;
      drawPalette();
    });
    paletteBox.append(eraser);
    if (session.charOptions().length === 0) {
      paletteBox.append(el("span", { class: "hint" }, "define entities first"));
    }
  };

  const drawGrid = () => {
    gridBox.replaceChildren();
    gridBox.style.fontFamily = font;
    for (let y = 1; y < GRID_HEIGHT - 1; y++) {
      const row = el("div", { class: "place-row" });
      for (let x = 1; x < GRID_WIDTH - 1; x++) {
        const char = session.placementAt(x, y);
        const cell = el("div", { class: "place-cell" }, char ?? ".");
        const cx = x;
        const cy = y;
        cell.addEventListener("click", () => {
          const result =
            brush !== null ? session.place(brush, cx, cy) : session.erase(cx, cy);
          if (!result.ok && brush !== null) msg.show(result.message ?? "", true);
          else msg.clear();
          drawGrid();
        });
        cell.addEventListener("contextmenu", (e) => {
          e.preventDefault();
          session.erase(cx, cy);
          drawGrid();
        });
        row.append(cell);
      }
      gridBox.append(row);
    }
  };

  const nameInput = el("input", { value: session.def.name, class: "name-input" });
  nameInput.addEventListener("change", () => session.setName(nameInput.value));

  const notesInput = el("textarea", { rows: "2", class: "notes-input" }, session.def.notes);
  notesInput.addEventListener("change", () => session.setNotes(notesInput.value));

  const seedInput = el("input", { value: session.seedText(), class: "seed-input" });
  const applySeed = () => {
    const result = session.setSeed(seedInput.value);
    if (result.ok) {
      seedInput.value = session.seedText();
      msg.show(`seed set to ${session.seedText()}`, false);
    } else {
      msg.show(result.message ?? "", true);
    }
  };

  const fontPicker = select(FONT_OPTIONS, font, (value) => {
    font = value;
    drawGrid();
  });

  const submit = button("Submit to gallery", async () => {
    const errors = session.validate();
    if (errors.length > 0) {
      msg.show(
        `${errors.length} validation error${errors.length === 1 ? "" : "s"}; ` +
          "open the text editor to see the console",
        true,
      );
      return;
    }
    try {
      const text = session.toText();
      const record = await ctx.api.submit(text, session.parentId);
      ctx.saveLayout(record.text, session.layoutToJson());
      session.dirty = false;
      ctx.toast(`submitted as #${record.id}`);
      ctx.goto(`#/fortress/${record.id}`);
    } catch (err) {
      msg.show(err instanceof ApiError ? `${err.code}: ${err.message}` : String(err), true);
    }
  });

  root.append(
    editorTabs(ctx, "map"),
    msg.node,
    el(
      "div",
      { class: "meta-row" },
      labeled("name", nameInput),
      labeled("seed", seedInput),
      button("Apply seed", applySeed),
      button("Random seed", () => {
        seedInput.value = "__RANDOM__";
        applySeed();
      }),
      labeled("font", fontPicker),
    ),
    labeled("notes", notesInput),
    el("p", { class: "hint" }, "pick a brush, then paint the interior; right-click erases"),
    paletteBox,
    gridBox,
    el("div", { class: "submit-row" }, submit),
  );
  drawPalette();
  drawGrid();
}
