// Working state behind the entity and fortress editors: one definition
// being edited, the selected entity, per-node canvas coordinates for the
// FSM diagrams, and a dirty flag. Every mutation goes through a method
// that enforces the interaction-time rules (action signatures unique per
// entity, at most one edge per direction between two nodes, targets only
// from defined characters) and reports violations as inline messages;
// nothing is ever rejected silently.
//
// Dropdown option sets are always derived from the live class table, so
// they equal the defined character set after every mutation by
// construction. Tests still exercise the equality across randomized
// mutation sequences.

import {
  Action,
  Condition,
  EntityClass,
  Fortress,
  FsmEdge,
  GRID_HEIGHT,
  GRID_WIDTH,
  TARGETED_ACTIONS,
  actionSignature,
  actionText,
  conditionNeedsCount,
  conditionNeedsTarget,
  isWall,
  makeFortress,
  makeInstance,
} from "./model.js";
import { CompileError, parse, serialize, validateText } from "./dsl.js";

export interface MutationResult {
  ok: boolean;
  message: string | null;
}

const OK: MutationResult = { ok: true, message: null };

function fail(message: string): MutationResult {
  return { ok: false, message };
}

export interface NodePosition {
  x: number;
  y: number;
}

/** char -> node index -> canvas coordinates. */
export type CanvasLayout = Map<string, Map<number, NodePosition>>;

const SEED_TOKEN = /^[0-9]{1,20}$/;
const MAX_SEED = 1n << 64n;

function reservedChar(char: string): boolean {
  const points = [...char];
  if (points.length !== 1) return true;
  if (char === "#" || char === ".") return true;
  const cp = points[0].codePointAt(0)!;
  return !(cp >= 0x21 && cp <= 0x7e);
}

export class EditorSession {
  def: Fortress;
  selected: string | null = null;
  layout: CanvasLayout = new Map();
  dirty = false;
  parentId: number | null = null;

  constructor(def?: Fortress) {
    this.def = def ?? makeFortress({ name: "untitled", seedSpec: { value: 1n } });
    const first = this.charOptions()[0];
    this.selected = first ?? null;
  }

  /**
   * The one source of truth for every target dropdown in the editors:
   * exactly the characters currently defined, sorted.
   */
  charOptions(): string[] {
    return [...this.def.classes.keys()].sort();
  }

  selectedClass(): EntityClass | null {
    return this.selected !== null ? this.def.classes.get(this.selected) ?? null : null;
  }

  private touch(): void {
    this.dirty = true;
  }

  // -- entities -------------------------------------------------------------

  addEntity(char: string, name: string): MutationResult {
    if (reservedChar(char)) {
      return fail(`'${char}' is reserved or unprintable; pick a printable ASCII character`);
    }
    if (this.def.classes.has(char)) {
      return fail(`'${char}' is already defined`);
    }
    this.def.classes.set(char, {
      char,
      name,
      nodes: [{ index: 0, action: { kind: "idle", target: null } }],
      edges: [],
    });
    this.selected = char;
    this.touch();
    return OK;
  }

  deleteEntity(char: string): MutationResult {
    if (!this.def.classes.delete(char)) {
      return fail(`'${char}' is not defined`);
    }
    this.def.instances = this.def.instances.filter((i) => i.char !== char);
    this.layout.delete(char);
    if (this.selected === char) {
      this.selected = this.charOptions()[0] ?? null;
    }
    this.touch();
    return OK;
  }

  renameEntity(char: string, name: string): MutationResult {
    const cls = this.def.classes.get(char);
    if (!cls) return fail(`'${char}' is not defined`);
    cls.name = name;
    this.touch();
    return OK;
  }

  /** Re-keys a class and follows every reference to it: placements,
   * action targets, condition targets, canvas layout, selection. */
  changeChar(oldChar: string, newChar: string): MutationResult {
    const cls = this.def.classes.get(oldChar);
    if (!cls) return fail(`'${oldChar}' is not defined`);
    if (newChar === oldChar) return OK;
    if (reservedChar(newChar)) {
      return fail(`'${newChar}' is reserved or unprintable`);
    }
    if (this.def.classes.has(newChar)) {
      return fail(`'${newChar}' is already defined`);
    }
    this.def.classes.delete(oldChar);
    cls.char = newChar;
    this.def.classes.set(newChar, cls);
    for (const other of this.def.classes.values()) {
      for (const node of other.nodes) {
        if (node.action.target === oldChar) {
          node.action = { ...node.action, target: newChar };
        }
      }
      for (const edge of other.edges) {
        if (edge.condition.target === oldChar) {
          edge.condition = { ...edge.condition, target: newChar };
        }
      }
    }
    for (const inst of this.def.instances) {
      if (inst.char === oldChar) inst.char = newChar;
    }
    const positions = this.layout.get(oldChar);
    if (positions) {
      this.layout.delete(oldChar);
      this.layout.set(newChar, positions);
    }
    if (this.selected === oldChar) this.selected = newChar;
    this.touch();
    return OK;
  }

  // -- nodes ------------------------------------------------------------------

  private checkAction(action: Action): string | null {
    if (TARGETED_ACTIONS.has(action.kind)) {
      if (action.target === null) {
        return `${action.kind} needs a target character`;
      }
      if (!this.def.classes.has(action.target)) {
        return `target '${action.target}' is not a defined entity`;
      }
    } else if (action.target !== null) {
      return `${action.kind} takes no target`;
    }
    return null;
  }

  addNode(char: string, action: Action, pos?: NodePosition): MutationResult {
    const cls = this.def.classes.get(char);
    if (!cls) return fail(`'${char}' is not defined`);
    const bad = this.checkAction(action);
    if (bad) return fail(bad);
    const sig = actionSignature(action);
    const clash = cls.nodes.find((n) => actionSignature(n.action) === sig);
    if (clash) {
      return fail(
        `'${actionText(action)}' is already used by node ${clash.index}; ` +
          "each action can appear once per entity",
      );
    }
    const index = cls.nodes.length;
    cls.nodes.push({ index, action });
    if (pos) {
      let positions = this.layout.get(char);
      if (!positions) {
        positions = new Map();
        this.layout.set(char, positions);
      }
      positions.set(index, pos);
    }
    this.touch();
    return OK;
  }

  updateNode(char: string, index: number, action: Action): MutationResult {
    const cls = this.def.classes.get(char);
    if (!cls) return fail(`'${char}' is not defined`);
    const node = cls.nodes.find((n) => n.index === index);
    if (!node) return fail(`node ${index} does not exist`);
    const bad = this.checkAction(action);
    if (bad) return fail(bad);
    const sig = actionSignature(action);
    const clash = cls.nodes.find(
      (n) => n.index !== index && actionSignature(n.action) === sig,
    );
    if (clash) {
      return fail(
        `'${actionText(action)}' is already used by node ${clash.index}; ` +
          "each action can appear once per entity",
      );
    }
    node.action = action;
    this.touch();
    return OK;
  }

  /**
   * Removes a node; the remaining nodes renumber densely, edges touching
   * the removed node are dropped, the rest are remapped, and canvas
   * positions follow their nodes.
   */
  deleteNode(char: string, index: number): MutationResult {
    const cls = this.def.classes.get(char);
    if (!cls) return fail(`'${char}' is not defined`);
    if (!cls.nodes.some((n) => n.index === index)) {
      return fail(`node ${index} does not exist`);
    }
    if (cls.nodes.length === 1) {
      return fail("an entity needs at least one node; delete the entity instead");
    }
    const renumber = (i: number) => (i > index ? i - 1 : i);
    cls.nodes = cls.nodes
      .filter((n) => n.index !== index)
      .map((n) => ({ index: renumber(n.index), action: n.action }));
    cls.edges = cls.edges
      .filter((e) => e.src !== index && e.dst !== index)
      .map((e) => ({ src: renumber(e.src), dst: renumber(e.dst), condition: e.condition }));
    const positions = this.layout.get(char);
    if (positions) {
      const moved = new Map<number, NodePosition>();
      for (const [i, pos] of positions) {
        if (i !== index) moved.set(renumber(i), pos);
      }
      this.layout.set(char, moved);
    }
    this.touch();
    return OK;
  }

  moveNode(char: string, index: number, pos: NodePosition): MutationResult {
    const cls = this.def.classes.get(char);
    if (!cls) return fail(`'${char}' is not defined`);
    if (!cls.nodes.some((n) => n.index === index)) {
      return fail(`node ${index} does not exist`);
    }
    let positions = this.layout.get(char);
    if (!positions) {
      positions = new Map();
      this.layout.set(char, positions);
    }
    positions.set(index, pos);
    this.touch();
    return OK;
  }

  // -- edges ------------------------------------------------------------------

  private checkCondition(cond: Condition): string | null {
    if (conditionNeedsTarget(cond.kind)) {
      if (cond.target === null) {
        return `${cond.kind} needs a target character`;
      }
      if (!this.def.classes.has(cond.target)) {
        return `target '${cond.target}' is not a defined entity`;
      }
    } else if (cond.target !== null) {
      return `${cond.kind} takes no target`;
    }
    if (conditionNeedsCount(cond.kind)) {
      if (cond.count === null || cond.count < 1 || !Number.isInteger(cond.count)) {
        return `${cond.kind} needs a count of at least 1`;
      }
    } else if (cond.count !== null) {
      return `${cond.kind} takes no count`;
    }
    return null;
  }

  addEdge(char: string, src: number, dst: number, condition: Condition): MutationResult {
    const cls = this.def.classes.get(char);
    if (!cls) return fail(`'${char}' is not defined`);
    const indices = new Set(cls.nodes.map((n) => n.index));
    if (!indices.has(src) || !indices.has(dst)) {
      return fail(`edge ${src}-${dst} references a missing node`);
    }
    const bad = this.checkCondition(condition);
    if (bad) return fail(bad);
    if (cls.edges.some((e) => e.src === src && e.dst === dst)) {
      return fail(
        `an edge ${src}->${dst} already exists; two nodes allow one edge per direction`,
      );
    }
    cls.edges.push({ src, dst, condition });
    this.touch();
    return OK;
  }

  updateEdge(
    char: string,
    src: number,
    dst: number,
    condition: Condition,
  ): MutationResult {
    const cls = this.def.classes.get(char);
    if (!cls) return fail(`'${char}' is not defined`);
    const edge = cls.edges.find((e) => e.src === src && e.dst === dst);
    if (!edge) return fail(`edge ${src}-${dst} does not exist`);
    const bad = this.checkCondition(condition);
    if (bad) return fail(bad);
    edge.condition = condition;
    this.touch();
    return OK;
  }

  deleteEdge(char: string, src: number, dst: number): MutationResult {
    const cls = this.def.classes.get(char);
    if (!cls) return fail(`'${char}' is not defined`);
    const before = cls.edges.length;
    cls.edges = cls.edges.filter((e) => !(e.src === src && e.dst === dst));
    if (cls.edges.length === before) {
      return fail(`edge ${src}-${dst} does not exist`);
    }
    this.touch();
    return OK;
  }

  edgesOf(char: string): FsmEdge[] {
    return this.def.classes.get(char)?.edges ?? [];
  }

  // -- placements ----------------------------------------------------------------

  /** Paints a cell of the interior placement grid; repainting replaces. */
  place(char: string, x: number, y: number): MutationResult {
    if (!this.def.classes.has(char)) {
      return fail(`'${char}' is not defined`);
    }
    if (isWall(x, y) || x >= GRID_WIDTH || y >= GRID_HEIGHT || x < 0 || y < 0) {
      return fail(`(${x},${y}) is outside the placement area`);
    }
    this.def.instances = this.def.instances.filter((i) => i.x !== x || i.y !== y);
    this.def.instances.push(makeInstance(this.def.instances.length, char, x, y));
    this.touch();
    return OK;
  }

  erase(x: number, y: number): MutationResult {
    const before = this.def.instances.length;
    this.def.instances = this.def.instances.filter((i) => i.x !== x || i.y !== y);
    if (this.def.instances.length === before) {
      return fail(`nothing is placed at (${x},${y})`);
    }
    this.touch();
    return OK;
  }

  placementAt(x: number, y: number): string | null {
    return this.def.instances.find((i) => i.x === x && i.y === y)?.char ?? null;
  }

  // -- metadata -------------------------------------------------------------------

  setName(name: string): void {
    this.def.name = name;
    this.touch();
  }

  setNotes(notes: string): void {
    this.def.notes = notes;
    this.touch();
  }

  setAuthor(author: string): void {
    this.def.author = author;
    this.touch();
  }

  /** Accepts a decimal 64-bit seed or the literal __RANDOM__. */
  setSeed(text: string): MutationResult {
    const trimmed = text.trim();
    if (trimmed === "__RANDOM__") {
      this.def.seedSpec = { value: null };
      this.touch();
      return OK;
    }
    if (!SEED_TOKEN.test(trimmed)) {
      return fail("seed must be an unsigned 64-bit integer or __RANDOM__");
    }
    const value = BigInt(trimmed);
    if (value >= MAX_SEED) {
      return fail("seed must fit in 64 bits");
    }
    this.def.seedSpec = { value };
    this.touch();
    return OK;
  }

  seedText(): string {
    const value = this.def.seedSpec.value;
    return value === null ? "__RANDOM__" : value.toString();
  }

  // -- round trips -------------------------------------------------------------------

  toText(): string {
    return serialize(this.def);
  }

  /** Full diagnostics for the current working definition. */
  validate(): CompileError[] {
    return validateText(this.toText());
  }

  /** Replaces the working definition from definition text (paste-in,
   * remix, or the text editor handing back to the GUI editors). */
  loadText(text: string): MutationResult {
    try {
      this.def = parse(text);
    } catch (err) {
      return fail(err instanceof Error ? err.message : String(err));
    }
    if (this.selected === null || !this.def.classes.has(this.selected)) {
      this.selected = this.charOptions()[0] ?? null;
    }
    this.dirty = false;
    return OK;
  }

  // -- layout persistence ----------------------------------------------------------

  layoutToJson(): string {
    const obj: Record<string, Record<string, NodePosition>> = {};
    for (const [char, positions] of this.layout) {
      const inner: Record<string, NodePosition> = {};
      for (const [index, pos] of positions) {
        inner[String(index)] = pos;
      }
      obj[char] = inner;
    }
    return JSON.stringify(obj);
  }

  layoutFromJson(json: string): void {
    const layout: CanvasLayout = new Map();
    const obj = JSON.parse(json) as Record<string, Record<string, NodePosition>>;
    for (const [char, inner] of Object.entries(obj)) {
      const positions = new Map<number, NodePosition>();
      for (const [index, pos] of Object.entries(inner)) {
        positions.set(Number(index), { x: pos.x, y: pos.y });
      }
      layout.set(char, positions);
    }
    this.layout = layout;
  }
}
