// Main page: gallery of recent fortresses, search by author or by name,
// login/register, the backpack pop-up, and the per-fortress detail view
// with Play, Remix, and save-to-backpack actions.

import { ApiError, BackpackClass, FortressRecord } from "../api.js";
import { parse } from "../dsl.js";
import { Fortress, actionText, conditionText, fortressHasPlayer } from "../model.js";
import { renderCells } from "../play.js";
import { AppContext, ViewCleanup } from "./context.js";
import { button, el, messageArea } from "./dom.js";

const CONTROLLER_ICON = "\u{1F3AE}";

function mapPreview(def: Fortress, cls: string): HTMLElement {
  const pre = el("pre", { class: cls });
  pre.textContent = renderCells(def, null)
    .map((row) => row.map((cell) => cell.ch).join(""))
    .join("\n");
  return pre;
}

function authBox(ctx: AppContext): HTMLElement {
  const box = el("div", { class: "auth" });
  if (ctx.username) {
    box.append(
      el("span", { class: "auth-user" }, `signed in as ${ctx.username}`),
      button("Backpack", () => openBackpack(ctx)),
      button("Log out", () => {
        ctx.api.logout();
        ctx.setUser(null, null);
      }),
    );
    return box;
  }
  const user = el("input", { placeholder: "username", autocomplete: "username" });
  const pass = el("input", { placeholder: "password", type: "password" });
  const doLogin = async () => {
    try {
      const token = await ctx.api.login(user.value, pass.value);
      ctx.setUser(user.value, token);
    } catch (err) {
      ctx.toast(err instanceof ApiError ? err.message : String(err));
    }
  };
  const doRegister = async () => {
    try {
      await ctx.api.register(user.value, pass.value);
      await doLogin();
    } catch (err) {
      ctx.toast(err instanceof ApiError ? err.message : String(err));
    }
  };
  box.append(user, pass, button("Log in", doLogin), button("Register", doRegister));
  return box;
}

function backpackCard(cls: BackpackClass): HTMLElement {
  const lines = cls.nodes.map((n) => {
    const target = n.target !== null ? ` ${n.target}` : "";
    return el("li", {}, `${n.index}: ${n.kind}${target}`);
  });
  return el(
    "div",
    { class: "bp-card" },
    el("div", { class: "bp-head" }, `${cls.char} ${cls.name}`),
    el("ul", {}, ...lines),
  );
}

async function openBackpack(ctx: AppContext): Promise<void> {
  document.querySelector(".popup")?.remove();
  const popup = el("div", { class: "popup" });
  const body = el("div", { class: "popup-body" });
  popup.append(
    el(
      "div",
      { class: "popup-head" },
      el("span", {}, "Backpack"),
      button("×", () => popup.remove(), "popup-close"),
    ),
    body,
  );
  document.body.append(popup);
  try {
    const classes = await ctx.api.backpack();
    if (classes.length === 0) {
      body.append(el("p", {}, "empty; save entities from a fortress detail page"));
    }
    for (const cls of classes) {
      body.append(backpackCard(cls));
    }
    body.append(el("p", { class: "bp-count" }, `${classes.length} of 10 slots used`));
  } catch (err) {
    body.append(
      el("p", { class: "msg-err" }, err instanceof ApiError ? err.message : String(err)),
    );
  }
}

function galleryTile(ctx: AppContext, record: FortressRecord): HTMLElement {
  const def = parse(record.text);
  const names = [...def.classes.values()].map((c) =>
    el("li", {}, `${c.char} ${c.name}`),
  );
  const tile = el(
    "div",
    { class: "tile" },
    mapPreview(def, "tile-map"),
    el(
      "div",
      { class: "tile-meta" },
      el("span", { class: "tile-name" }, record.name),
      record.has_player ? el("span", { class: "tile-pad" }, CONTROLLER_ICON) : "",
      el("span", { class: "tile-author" }, `by ${record.author}`),
      el("span", { class: "tile-plays" }, `${record.play_count} plays`),
    ),
    el("ul", { class: "tile-hover" }, ...names),
  );
  tile.addEventListener("click", () => ctx.goto(`#/fortress/${record.id}`));
  return tile;
}

export function renderMainPage(ctx: AppContext, root: HTMLElement): ViewCleanup {
  const gallery = el("div", { class: "gallery" });
  const msg = messageArea();

  const fill = async (records: Promise<FortressRecord[]>, label: string) => {
    gallery.replaceChildren(el("p", {}, "loading…"));
    try {
      const list = await records;
      gallery.replaceChildren();
      if (list.length === 0) {
        gallery.append(el("p", {}, `no fortresses ${label}`));
      }
      for (const record of list) {
        gallery.append(galleryTile(ctx, record));
      }
    } catch (err) {
      gallery.replaceChildren();
      msg.show(err instanceof ApiError ? err.message : String(err), true);
    }
  };

  const byUser = el("input", { placeholder: "author" });
  const byName = el("input", { placeholder: "fortress name" });
  const searchRow = el(
    "div",
    { class: "search-row" },
    byUser,
    button("Search by author", () => fill(ctx.api.search(byUser.value, null), "by that author")),
    byName,
    button("Search by name", () => fill(ctx.api.search(null, byName.value), "with that name")),
    button("Recent", () => fill(ctx.api.recent(), "yet")),
  );

  root.append(
    el(
      "header",
      {},
      el("h1", {}, "fortress"),
      el(
        "nav",
        {},
        button("New fortress", () => ctx.openNew()),
        button("Editors", () => ctx.goto("#/edit/entity")),
      ),
      authBox(ctx),
    ),
    searchRow,
    msg.node,
    gallery,
  );
  void fill(ctx.api.recent(), "yet");
}

function entityCard(
  ctx: AppContext,
  record: FortressRecord,
  def: Fortress,
  char: string,
): HTMLElement {
  const cls = def.classes.get(char)!;
  const nodes = cls.nodes.map((n) => el("li", {}, `${n.index}: ${actionText(n.action)}`));
  const edges = cls.edges.map((e) =>
    el("li", {}, `${e.src}-${e.dst}: ${conditionText(e.condition)}`),
  );
  const save = button("Save to backpack", async () => {
    try {
      const classes = await ctx.api.backpackAdd(record.id, char);
      ctx.toast(`'${char}' saved; ${classes.length} of 10 slots used`);
    } catch (err) {
      ctx.toast(err instanceof ApiError ? err.message : String(err));
    }
  });
  return el(
    "div",
    { class: "entity-card" },
    el("div", { class: "entity-head" }, `${cls.char} ${cls.name}`, save),
    el("ul", {}, ...nodes),
    edges.length ? el("ul", { class: "edge-list" }, ...edges) : "",
  );
}

export function renderDetailPage(
  ctx: AppContext,
  root: HTMLElement,
  id: number,
): ViewCleanup {
  root.append(el("p", {}, "loading…"));
  void (async () => {
    let record: FortressRecord;
    try {
      record = await ctx.api.get(id);
    } catch (err) {
      root.replaceChildren(
        el("p", { class: "msg-err" }, err instanceof ApiError ? err.message : String(err)),
        button("back to gallery", () => ctx.goto("#/")),
      );
      return;
    }
    const def = parse(record.text);
    const head = el(
      "div",
      { class: "detail-head" },
      button("← gallery", () => ctx.goto("#/")),
      el("h2", {}, record.name, fortressHasPlayer(def) ? ` ${CONTROLLER_ICON}` : ""),
      el(
        "span",
        { class: "detail-meta" },
        `by ${record.author} · ${record.play_count} plays · ` +
          new Date(record.created_at * 1000).toLocaleString(),
      ),
      button("Play", () => ctx.openPlayRecord(record)),
      button("Remix", () => ctx.openRemix(record)),
    );
    const cards = [...def.classes.keys()]
      .sort()
      .map((char) => entityCard(ctx, record, def, char));
    root.replaceChildren(
      head,
      mapPreview(def, "detail-map"),
      record.notes ? el("p", { class: "detail-notes" }, record.notes) : "",
      el("div", { class: "entity-cards" }, ...cards),
    );
    if (record.parent_id !== null) {
      const parentLink = button(`remixed from #${record.parent_id}`, () =>
        ctx.goto(`#/fortress/${record.parent_id}`),
      );
      const lineageRow = el("div", { class: "lineage" }, parentLink);
      root.append(lineageRow);
      try {
        const chain = await ctx.api.lineage(record.id);
        lineageRow.append(el("span", {}, ` lineage: ${chain.map((n) => `#${n}`).join(" → ")}`));
      } catch {
        // lineage display is cosmetic; the parent link above still works
      }
    }
  })();
}
