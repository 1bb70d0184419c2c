// Entity editor: FSM canvas with a drag-and-drop action palette,
// click-click edge creation, right-click edit/delete menus, and a
// list-based fallback editor below the canvas. Every mutation goes
// through the EditorSession, which reports rule violations (signature
// uniqueness, one edge per direction, target must be defined) as inline
// messages.

import {
  ACTION_KINDS,
  Action,
  ActionKind,
  Condition,
  ConditionKind,
  CONDITION_KINDS,
  EntityClass,
  TARGETED_ACTIONS,
  actionText,
  conditionNeedsCount,
  conditionNeedsTarget,
  conditionText,
} from "../model.js";
import { EditorSession, NodePosition } from "../session.js";
import { AppContext, ViewCleanup } from "./context.js";
import { button, el, labeled, messageArea, option, select, svgEl } from "./dom.js";
import { editorTabs } from "./tabs.js";

const CANVAS_W = 680;
const CANVAS_H = 440;
const NODE_W = 120;
const NODE_H = 34;

function autoPosition(index: number): NodePosition {
  return { x: 90 + (index % 4) * 160, y: 60 + Math.floor(index / 4) * 110 };
}

function nodePosition(session: EditorSession, char: string, index: number): NodePosition {
  return session.layout.get(char)?.get(index) ?? autoPosition(index);
}

/** Target dropdown; its options are exactly the defined characters. */
function targetSelect(session: EditorSession, current: string | null): HTMLSelectElement {
  const node = el("select", { class: "target-select" });
  for (const char of session.charOptions()) {
    node.append(option(char));
  }
  if (current !== null) node.value = current;
  return node;
}

function actionFromForm(kind: ActionKind, target: HTMLSelectElement): Action {
  return {
    kind,
    target: TARGETED_ACTIONS.has(kind) ? (target.value || null) : null,
  };
}

function conditionFromForm(
  kind: ConditionKind,
  target: HTMLSelectElement,
  count: HTMLInputElement,
): Condition {
  return {
    kind,
    target: conditionNeedsTarget(kind) ? (target.value || null) : null,
    count: conditionNeedsCount(kind) ? Number(count.value) : null,
  };
}

interface EditorUi {
  session: EditorSession;
  rerender(): void;
  report(ok: boolean, message: string | null): void;
  /** Pending edge source node while click-click creation is underway. */
  edgeSrc: number | null;
}

function closeMenus(): void {
  document.querySelectorAll(".ctx-menu").forEach((m) => m.remove());
}

function contextMenu(x: number, y: number, entries: [string, () => void][]): void {
  closeMenus();
  const menu = el("div", { class: "ctx-menu" });
  menu.style.left = `${x}px`;
  menu.style.top = `${y}px`;
  for (const [label, action] of entries) {
    menu.append(
      button(label, () => {
        closeMenus();
        action();
      }),
    );
  }
  document.body.append(menu);
}

/** Form for one node's action; submits through updateNode/addNode. */
function nodeForm(
  ui: EditorUi,
  char: string,
  existing: { index: number; action: Action } | null,
  anchor: { x: number; y: number },
): void {
  closeMenus();
  const menu = el("div", { class: "ctx-menu ctx-form" });
  menu.style.left = `${anchor.x}px`;
  menu.style.top = `${anchor.y}px`;
  const kindSel = el("select", {});
  for (const kind of ACTION_KINDS) kindSel.append(option(kind));
  if (existing) kindSel.value = existing.action.kind;
  const target = targetSelect(ui.session, existing?.action.target ?? null);
  const syncTarget = () => {
    target.disabled = !TARGETED_ACTIONS.has(kindSel.value as ActionKind);
  };
  kindSel.addEventListener("change", syncTarget);
  syncTarget();
  menu.append(
    labeled("action", kindSel),
    labeled("target", target),
    button("Apply", () => {
      const action = actionFromForm(kindSel.value as ActionKind, target);
      const result = existing
        ? ui.session.updateNode(char, existing.index, action)
        : ui.session.addNode(char, action);
      ui.report(result.ok, result.message);
      if (result.ok) {
        closeMenus();
        ui.rerender();
      }
    }),
    button("Cancel", closeMenus),
  );
  document.body.append(menu);
}

/** Form for one edge's condition. */
function edgeForm(
  ui: EditorUi,
  char: string,
  src: number,
  dst: number,
  existing: Condition | null,
  anchor: { x: number; y: number },
): void {
  closeMenus();
  const menu = el("div", { class: "ctx-menu ctx-form" });
  menu.style.left = `${anchor.x}px`;
  menu.style.top = `${anchor.y}px`;
  const kindSel = el("select", {});
  for (const kind of CONDITION_KINDS) kindSel.append(option(kind));
  if (existing) kindSel.value = existing.kind;
  const target = targetSelect(ui.session, existing?.target ?? null);
  const count = el("input", { type: "number", min: "1", value: String(existing?.count ?? 1) });
  const sync = () => {
    const kind = kindSel.value as ConditionKind;
    target.disabled = !conditionNeedsTarget(kind);
    count.disabled = !conditionNeedsCount(kind);
  };
  kindSel.addEventListener("change", sync);
  sync();
  menu.append(
    el("div", { class: "ctx-title" }, `edge ${src}→${dst}`),
    labeled("condition", kindSel),
    labeled("target", target),
    labeled("count", count),
    button("Apply", () => {
      const cond = conditionFromForm(kindSel.value as ConditionKind, target, count);
      const result = existing
        ? ui.session.updateEdge(char, src, dst, cond)
        : ui.session.addEdge(char, src, dst, cond);
      ui.report(result.ok, result.message);
      if (result.ok) {
        closeMenus();
        ui.rerender();
      }
    }),
    button("Cancel", closeMenus),
  );
  document.body.append(menu);
}

function palette(): HTMLElement {
  const bar = el("div", { class: "palette" });
  for (const kind of ACTION_KINDS) {
    const chip = el("div", { class: "pal-chip", draggable: "true" }, kind);
    chip.addEventListener("dragstart", (e) => {
      e.dataTransfer?.setData("text/plain", kind);
    });
    bar.append(chip);
  }
  return bar;
}

function drawEdge(
  ui: EditorUi,
  svg: SVGSVGElement,
  char: string,
  src: number,
  dst: number,
  condition: Condition,
): void {
  const a = nodePosition(ui.session, char, src);
  const b = nodePosition(ui.session, char, dst);
  const group = svgEl("g", { class: "fsm-edge" });
  let labelX: number;
  let labelY: number;
  if (src === dst) {
    group.append(
      svgEl("circle", {
        cx: String(a.x),
        cy: String(a.y - NODE_H),
        r: "16",
        class: "edge-line",
      }),
    );
    labelX = a.x;
    labelY = a.y - NODE_H - 22;
  } else {
    const dx = b.x - a.x;
    const dy = b.y - a.y;
    const len = Math.hypot(dx, dy) || 1;
    // opposite directions bend apart so both labels stay readable
    const nx = (-dy / len) * 14;
    const ny = (dx / len) * 14;
    const mx = (a.x + b.x) / 2 + nx;
    const my = (a.y + b.y) / 2 + ny;
    group.append(
      svgEl("path", {
        d: `M ${a.x} ${a.y} Q ${mx} ${my} ${b.x} ${b.y}`,
        class: "edge-line",
        "marker-end": "url(#arrow)",
      }),
    );
    labelX = mx;
    labelY = my - 6;
  }
  const label = svgEl(
    "text",
    { x: String(labelX), y: String(labelY), class: "edge-label" },
    `${src}-${dst}: ${conditionText(condition)}`,
  );
  group.append(label);
  group.addEventListener("contextmenu", (e) => {
    e.preventDefault();
    contextMenu(e.clientX, e.clientY, [
      [
        "Edit edge",
        () => edgeForm(ui, char, src, dst, condition, { x: e.clientX, y: e.clientY }),
      ],
      [
        "Delete edge",
        () => {
          const result = ui.session.deleteEdge(char, src, dst);
          ui.report(result.ok, result.message);
          ui.rerender();
        },
      ],
    ]);
  });
  svg.append(group);
}

function drawNode(
  ui: EditorUi,
  svg: SVGSVGElement,
  char: string,
  index: number,
  action: Action,
): void {
  const pos = nodePosition(ui.session, char, index);
  const group = svgEl("g", {
    class: ui.edgeSrc === index ? "fsm-node edge-src" : "fsm-node",
    transform: `translate(${pos.x - NODE_W / 2}, ${pos.y - NODE_H / 2})`,
  });
  group.append(
    svgEl("rect", { width: String(NODE_W), height: String(NODE_H), rx: "6" }),
    svgEl(
      "text",
      { x: String(NODE_W / 2), y: String(NODE_H / 2 + 4), class: "node-label" },
      `${index}: ${actionText(action)}`,
    ),
  );

  let moved = false;
  let start: { mx: number; my: number; px: number; py: number } | null = null;
  group.addEventListener("mousedown", (e) => {
    if (e.button !== 0) return;
    e.preventDefault();
    moved = false;
    start = { mx: e.clientX, my: e.clientY, px: pos.x, py: pos.y };
    const onMove = (ev: MouseEvent) => {
      if (!start) return;
      const dx = ev.clientX - start.mx;
      const dy = ev.clientY - start.my;
      if (Math.abs(dx) + Math.abs(dy) > 4) moved = true;
      if (moved) {
        const x = Math.min(CANVAS_W - 40, Math.max(40, start.px + dx));
        const y = Math.min(CANVAS_H - 30, Math.max(30, start.py + dy));
        group.setAttribute(
          "transform",
          `translate(${x - NODE_W / 2}, ${y - NODE_H / 2})`,
        );
        ui.session.moveNode(char, index, { x, y });
      }
    };
    const onUp = () => {
      window.removeEventListener("mousemove", onMove);
      window.removeEventListener("mouseup", onUp);
      if (moved) {
        ui.rerender();
      } else {
        // plain click: first pick marks the source, second completes the edge
        if (ui.edgeSrc === null) {
          ui.edgeSrc = index;
          ui.rerender();
        } else {
          const src = ui.edgeSrc;
          ui.edgeSrc = null;
          const result = ui.session.addEdge(char, src, index, {
            kind: "none",
            target: null,
            count: null,
          });
          ui.report(
            result.ok,
            result.ok ? `edge ${src}→${index} added; right-click it to set the condition` : result.message,
          );
          ui.rerender();
        }
      }
      start = null;
    };
    window.addEventListener("mousemove", onMove);
    window.addEventListener("mouseup", onUp);
  });

  group.addEventListener("contextmenu", (e) => {
    e.preventDefault();
    contextMenu(e.clientX, e.clientY, [
      [
        "Edit node",
        () => nodeForm(ui, char, { index, action }, { x: e.clientX, y: e.clientY }),
      ],
      [
        "Delete node",
        () => {
          const result = ui.session.deleteNode(char, index);
          ui.report(result.ok, result.message);
          ui.rerender();
        },
      ],
    ]);
  });
  svg.append(group);
}

function canvas(ui: EditorUi, cls: EntityClass): HTMLElement {
  const wrap = el("div", { class: "canvas-wrap" });
  const svg = svgEl("svg", {
    width: String(CANVAS_W),
    height: String(CANVAS_H),
    class: "fsm-canvas",
  });
  svg.append(
    svgEl(
      "defs",
      {},
      svgEl(
        "marker",
        {
          id: "arrow",
          markerWidth: "10",
          markerHeight: "10",
          refX: "8",
          refY: "3",
          orient: "auto",
        },
        svgEl("path", { d: "M0,0 L8,3 L0,6 Z", class: "arrow-head" }),
      ),
    ),
  );
  for (const edge of cls.edges) {
    drawEdge(ui, svg, cls.char, edge.src, edge.dst, edge.condition);
  }
  for (const node of cls.nodes) {
    drawNode(ui, svg, cls.char, node.index, node.action);
  }
  svg.addEventListener("dragover", (e) => e.preventDefault());
  svg.addEventListener("drop", (e) => {
    e.preventDefault();
    const kind = e.dataTransfer?.getData("text/plain") as ActionKind | "";
    if (!kind || !ACTION_KINDS.includes(kind)) return;
    const rect = svg.getBoundingClientRect();
    const pos = { x: e.clientX - rect.left, y: e.clientY - rect.top };
    const target = TARGETED_ACTIONS.has(kind) ? ui.session.charOptions()[0] ?? null : null;
    if (TARGETED_ACTIONS.has(kind) && target === null) {
      ui.report(false, `${kind} needs a target; define an entity first`);
      return;
    }
    const result = ui.session.addNode(cls.char, { kind, target }, pos);
    ui.report(
      result.ok,
      result.ok && TARGETED_ACTIONS.has(kind)
        ? `node added targeting '${target}'; right-click to change`
        : result.message,
    );
    if (result.ok) ui.rerender();
  });
  svg.addEventListener("contextmenu", (e) => e.preventDefault());
  wrap.append(svg);
  return wrap;
}

function entityBar(ui: EditorUi): HTMLElement {
  const session = ui.session;
  const bar = el("div", { class: "entity-bar" });
  const chars = session.charOptions();
  if (chars.length > 0) {
    const picker = select(chars, session.selected ?? chars[0], (value) => {
      session.selected = value;
      ui.edgeSrc = null;
      ui.rerender();
    });
    bar.append(labeled("entity", picker));
    const cls = session.selectedClass();
    if (cls) {
      const nameInput = el("input", { value: cls.name, class: "name-input" });
      nameInput.addEventListener("change", () => {
        const result = session.renameEntity(cls.char, nameInput.value);
        ui.report(result.ok, result.message);
      });
      const charInput = el("input", { value: cls.char, class: "char-input", maxlength: "1" });
      charInput.addEventListener("change", () => {
        const result = session.changeChar(cls.char, charInput.value);
        ui.report(result.ok, result.message);
        ui.rerender();
      });
      bar.append(
        labeled("name", nameInput),
        labeled("char", charInput),
        button("Delete entity", () => {
          const result = session.deleteEntity(cls.char);
          ui.report(result.ok, result.message);
          ui.rerender();
        }),
      );
    }
  }
  const newChar = el("input", { placeholder: "char", class: "char-input", maxlength: "1" });
  const newName = el("input", { placeholder: "name", class: "name-input" });
  bar.append(
    el(
      "span",
      { class: "add-entity" },
      newChar,
      newName,
      button("Add entity", () => {
        const result = session.addEntity(newChar.value, newName.value);
        ui.report(result.ok, result.message);
        ui.rerender();
      }),
    ),
  );
  return bar;
}

/** Table-based fallback covering the same mutations as the canvas. */
function listEditor(ui: EditorUi, cls: EntityClass): HTMLElement {
  const session = ui.session;
  const char = cls.char;
  const box = el("div", { class: "list-editor" });

  const nodeTable = el("table", { class: "node-table" });
  nodeTable.append(
    el("tr", {}, el("th", {}, "node"), el("th", {}, "action"), el("th", {}, "")),
  );
  for (const node of cls.nodes) {
    const row = el("tr", {});
    row.append(
      el("td", {}, String(node.index)),
      el("td", {}, actionText(node.action)),
      el(
        "td",
        {},
        button("edit", () =>
          nodeForm(ui, char, { index: node.index, action: node.action }, menuAnchor(row)),
        ),
        button("delete", () => {
          const result = session.deleteNode(char, node.index);
          ui.report(result.ok, result.message);
          ui.rerender();
        }),
      ),
    );
    nodeTable.append(row);
  }
  const addNodeBtn = button("add node", () =>
    nodeForm(ui, char, null, menuAnchor(nodeTable)),
  );

  const edgeTable = el("table", { class: "edge-table" });
  edgeTable.append(
    el("tr", {}, el("th", {}, "edge"), el("th", {}, "condition"), el("th", {}, "")),
  );
  for (const edge of cls.edges) {
    const row = el("tr", {});
    row.append(
      el("td", {}, `${edge.src}-${edge.dst}`),
      el("td", {}, conditionText(edge.condition)),
      el(
        "td",
        {},
        button("edit", () =>
          edgeForm(ui, char, edge.src, edge.dst, edge.condition, menuAnchor(row)),
        ),
        button("delete", () => {
          const result = session.deleteEdge(char, edge.src, edge.dst);
          ui.report(result.ok, result.message);
          ui.rerender();
        }),
      ),
    );
    edgeTable.append(row);
  }
  const srcInput = el("input", { type: "number", min: "0", value: "0", class: "idx-input" });
  const dstInput = el("input", { type: "number", min: "0", value: "0", class: "idx-input" });
  const addEdgeBtn = button("add edge", () => {
    const src = Number(srcInput.value);
    const dst = Number(dstInput.value);
    const result = session.addEdge(char, src, dst, { kind: "none", target: null, count: null });
    ui.report(
      result.ok,
      result.ok ? `edge ${src}→${dst} added with condition none` : result.message,
    );
    ui.rerender();
  });

  box.append(
    el("h3", {}, "nodes"),
    nodeTable,
    addNodeBtn,
    el("h3", {}, "edges"),
    edgeTable,
    el("div", { class: "add-edge" }, srcInput, el("span", {}, "→"), dstInput, addEdgeBtn),
  );
  return box;
}

function menuAnchor(node: HTMLElement): { x: number; y: number } {
  const rect = node.getBoundingClientRect();
  return { x: rect.left + 40, y: rect.bottom + 4 };
}

export function renderEntityEditor(ctx: AppContext, root: HTMLElement): ViewCleanup {
  const msg = messageArea();
  const body = el("div", { class: "editor-body" });

  const ui: EditorUi = {
    session: ctx.session,
    edgeSrc: null,
    rerender: () => {
      ctx.saveLayout(ctx.session.toText(), ctx.session.layoutToJson());
      draw();
    },
    report: (ok, message) => {
      if (message) msg.show(message, !ok);
      else if (ok) msg.clear();
    },
  };

  const draw = () => {
    body.replaceChildren(entityBar(ui));
    const cls = ctx.session.selectedClass();
    if (!cls) {
      body.append(el("p", {}, "no entities yet; add one above"));
      return;
    }
    body.append(
      el("p", { class: "hint" },
        "drag actions onto the canvas; click two nodes to connect them; right-click to edit or delete"),
      palette(),
      canvas(ui, cls),
      listEditor(ui, cls),
    );
  };

  root.append(editorTabs(ctx, "entity"), msg.node, body);
  draw();
  return () => closeMenus();
}
