// Shared application state handed to every view. The App object in
// main.ts implements this; views stay free of routing details.

import { ApiClient, FortressRecord } from "../api.js";
import { EditorSession } from "../session.js";
import { TextEditorState } from "../text-editor.js";
import { PlayController } from "../play.js";

export interface AppContext {
  api: ApiClient;
  session: EditorSession;
  textState: TextEditorState;
  play: PlayController | null;
  username: string | null;

  goto(hash: string): void;
  openPlayRecord(record: FortressRecord): void;
  openPlayLocal(): void;
  openRemix(record: FortressRecord): void;
  openNew(): void;
  setUser(name: string | null, token: string | null): void;
  toast(message: string): void;

  /** Canvas layout persistence, keyed by definition text. */
  saveLayout(text: string, json: string): void;
  loadLayout(text: string): string | null;
}

/** Views may hand back a cleanup hook; the router runs it on route change. */
export type ViewCleanup = (() => void) | void;
