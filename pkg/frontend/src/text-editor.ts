// State behind the text editor surface. Saving is gated: the Save action
// stays disabled until the current text has been validated clean, and any
// edit invalidates the previous validation.

import { CompileError, validateText } from "./dsl.js";

export class TextEditorState {
  private current: string;
  /** null means the text has not been validated since the last edit. */
  private lastResult: CompileError[] | null = null;

  constructor(text = "") {
    this.current = text;
  }

  get text(): string {
    return this.current;
  }

  setText(text: string): void {
    if (text !== this.current) {
      this.current = text;
      this.lastResult = null;
    }
  }

  /** Runs the compiler and remembers the outcome for the Save gate. */
  validate(): CompileError[] {
    this.lastResult = validateText(this.current);
    return this.lastResult;
  }

  /** Diagnostics from the most recent validation, or null when stale. */
  get errors(): CompileError[] | null {
    return this.lastResult;
  }

  get validated(): boolean {
    return this.lastResult !== null;
  }

  /** True only after the current text validated with zero errors. */
  get canSave(): boolean {
    return this.lastResult !== null && this.lastResult.length === 0;
  }
}
