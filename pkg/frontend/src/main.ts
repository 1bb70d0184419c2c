// Application shell: owns the API client, the editor session, the text
// editor state, and the active play controller, and routes between the
// five surfaces on location.hash changes.

import { ApiClient, FortressRecord } from "./api.js";
import { EditorSession } from "./session.js";
import { TextEditorState } from "./text-editor.js";
import { PlayController } from "./play.js";
import { AppContext, ViewCleanup } from "./views/context.js";
import { el } from "./views/dom.js";
import { renderDetailPage, renderMainPage } from "./views/main-view.js";
import { renderEntityEditor } from "./views/entity-view.js";
import { renderFortressEditor } from "./views/fortress-view.js";
import { renderTextEditor } from "./views/text-view.js";
import { renderPlayScreen } from "./views/play-view.js";

const TOKEN_KEY = "fortress.token";
const USER_KEY = "fortress.user";
const LAYOUT_PREFIX = "fortress.layout.";

function textKey(text: string): string {
  let hash = 5381;
  for (let i = 0; i < text.length; i++) {
    hash = ((hash * 33) ^ text.charCodeAt(i)) >>> 0;
  }
  return LAYOUT_PREFIX + hash.toString(16) + "." + text.length.toString(16);
}

class App implements AppContext {
  api = new ApiClient();
  session = new EditorSession();
  textState = new TextEditorState();
  play: PlayController | null = null;
  username: string | null = null;

  private cleanup: ViewCleanup = undefined;
  private readonly root: HTMLElement;
  private readonly toastBox: HTMLElement;

  constructor(root: HTMLElement) {
    this.root = root;
    this.toastBox = el("div", { class: "toast" });
    document.body.append(this.toastBox);
    const token = localStorage.getItem(TOKEN_KEY);
    const user = localStorage.getItem(USER_KEY);
    if (token && user) {
      this.api.token = token;
      this.username = user;
    }
    window.addEventListener("hashchange", () => this.route());
  }

  goto(hash: string): void {
    if (location.hash === hash) {
      this.route();
    } else {
      location.hash = hash;
    }
  }

  openPlayRecord(record: FortressRecord): void {
    void this.api.recordPlay(record.id).catch(() => {
      // count bumps are best-effort; playing still works offline
    });
    this.play = new PlayController(record.text, record.name, record.author);
    this.goto("#/play");
  }

  openPlayLocal(): void {
    const errors = this.session.validate();
    if (errors.length > 0) {
      this.toast(`${errors.length} validation error${errors.length === 1 ? "" : "s"}; see the text editor console`);
      this.goto("#/edit/text");
      return;
    }
    this.play = new PlayController(
      this.session.toText(),
      this.session.def.name,
      this.session.def.author,
    );
    this.goto("#/play");
  }

  openRemix(record: FortressRecord): void {
    const result = this.session.loadText(record.text);
    if (!result.ok) {
      this.toast(result.message ?? "could not load that fortress");
      return;
    }
    this.session.parentId = record.id;
    const layout = this.loadLayout(record.text);
    if (layout) {
      try {
        this.session.layoutFromJson(layout);
      } catch {
        this.session.layout = new Map();
      }
    } else {
      this.session.layout = new Map();
    }
    this.goto("#/edit/entity");
  }

  openNew(): void {
    this.session = new EditorSession();
    this.goto("#/edit/entity");
  }

  setUser(name: string | null, token: string | null): void {
    this.username = name;
    if (name && token) {
      localStorage.setItem(USER_KEY, name);
      localStorage.setItem(TOKEN_KEY, token);
    } else {
      localStorage.removeItem(USER_KEY);
      localStorage.removeItem(TOKEN_KEY);
    }
    this.route();
  }

  toast(message: string): void {
    const note = el("div", { class: "toast-note" }, message);
    this.toastBox.append(note);
    window.setTimeout(() => note.remove(), 4000);
  }

  saveLayout(text: string, json: string): void {
    try {
      localStorage.setItem(textKey(text), json);
    } catch {
      // storage full or unavailable; layout then falls back to automatic
    }
  }

  loadLayout(text: string): string | null {
    return localStorage.getItem(textKey(text));
  }

  route(): void {
    if (this.cleanup) this.cleanup();
    this.cleanup = undefined;
    this.root.replaceChildren();
    const hash = location.hash || "#/";
    const detail = hash.match(/^#\/fortress\/(\d+)$/);
    if (detail) {
      this.cleanup = renderDetailPage(this, this.root, Number(detail[1]));
    } else if (hash === "#/edit/entity" || hash === "#/edit") {
      this.cleanup = renderEntityEditor(this, this.root);
    } else if (hash === "#/edit/map") {
      this.cleanup = renderFortressEditor(this, this.root);
    } else if (hash === "#/edit/text") {
      this.cleanup = renderTextEditor(this, this.root);
    } else if (hash === "#/play") {
      this.cleanup = renderPlayScreen(this, this.root);
    } else {
      this.cleanup = renderMainPage(this, this.root);
    }
  }
}

const rootNode = document.getElementById("app");
if (rootNode) {
  new App(rootNode).route();
}
