// Text editor: full-text DSL editing with a Validate button, a compiler
// console listing (code, line, message) per diagnostic, and Save/handoff
// actions that stay disabled until the current text validates clean.

import { ApiError } from "../api.js";
import { errorString } from "../dsl.js";
import { AppContext, ViewCleanup } from "./context.js";
import { button, el, messageArea } from "./dom.js";
import { editorTabs } from "./tabs.js";

export function renderTextEditor(ctx: AppContext, root: HTMLElement): ViewCleanup {
  const state = ctx.textState;
  const msg = messageArea();

  const area = el("textarea", {
    class: "text-area",
    rows: "24",
    spellcheck: "false",
    placeholder: "paste or write a fortress definition here",
  });
  area.value = state.text;

  const console_ = el("div", { class: "console" });
  const saveBtn = el("button", {}, "Save to gallery");
  const handoffBtn = el("button", {}, "Load into editors");

  const syncGate = () => {
    saveBtn.disabled = !state.canSave;
    handoffBtn.disabled = !state.canSave;
  };

  const drawConsole = () => {
    console_.replaceChildren();
    const errors = state.errors;
    if (errors === null) {
      console_.append(el("div", { class: "console-line" }, "not validated yet"));
      return;
    }
    if (errors.length === 0) {
      console_.append(el("div", { class: "console-line console-ok" }, "no errors"));
      return;
    }
    for (const error of errors) {
      console_.append(el("div", { class: "console-line console-err" }, errorString(error)));
    }
  };

  area.addEventListener("input", () => {
    state.setText(area.value);
    syncGate();
    drawConsole();
  });

  const validateBtn = button("Validate", () => {
    state.setText(area.value);
    const errors = state.validate();
    syncGate();
    drawConsole();
    msg.show(
      errors.length === 0
        ? "valid; Save and Load are now enabled"
        : `${errors.length} error${errors.length === 1 ? "" : "s"} found`,
      errors.length > 0,
    );
  });

  saveBtn.addEventListener("click", async () => {
    if (!state.canSave) return;
    try {
      const record = await ctx.api.submit(state.text, ctx.session.parentId);
      ctx.toast(`submitted as #${record.id}`);
      ctx.goto(`#/fortress/${record.id}`);
    } catch (err) {
      msg.show(err instanceof ApiError ? `${err.code}: ${err.message}` : String(err), true);
    }
  });

  handoffBtn.addEventListener("click", () => {
    if (!state.canSave) return;
    const result = ctx.session.loadText(state.text);
    if (result.ok) {
      ctx.goto("#/edit/entity");
    } else {
      msg.show(result.message ?? "", true);
    }
  });

  root.append(
    editorTabs(ctx, "text"),
    msg.node,
    el(
      "div",
      { class: "text-tools" },
      validateBtn,
      saveBtn,
      handoffBtn,
      button("From editors", () => {
        area.value = ctx.session.toText();
        state.setText(area.value);
        syncGate();
        drawConsole();
      }),
    ),
    area,
    console_,
  );
  syncGate();
  drawConsole();
}
