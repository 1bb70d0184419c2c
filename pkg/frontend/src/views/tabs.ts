// Tab strip shared by the three editor surfaces, with quick links back
// to the gallery and into a local playtest.

import { AppContext } from "./context.js";
import { button, el } from "./dom.js";

export type EditorTab = "entity" | "map" | "text";

export function editorTabs(ctx: AppContext, active: EditorTab): HTMLElement {
  const tab = (name: EditorTab, label: string, hash: string) => {
    const node = button(label, () => ctx.goto(hash), active === name ? "tab tab-on" : "tab");
    return node;
  };
  return el(
    "div",
    { class: "tabs" },
    button("← gallery", () => ctx.goto("#/")),
    tab("entity", "Entities", "#/edit/entity"),
    tab("map", "Fortress", "#/edit/map"),
    tab("text", "Text", "#/edit/text"),
    button("Playtest", () => ctx.openPlayLocal()),
    el(
      "span",
      { class: "tab-note" },
      ctx.session.parentId !== null ? `remix of #${ctx.session.parentId}` : "",
    ),
  );
}
