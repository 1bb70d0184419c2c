// Fortress definition language: parser, validator, serializer.
//
// Line oriented, UTF-8 with LF endings. Full-line comments start with '#'
// and are ignored everywhere except inside the MAP block, where '#' is the
// wall glyph. Quoted strings allow backslash escapes for the quote and the
// backslash only.
//
// Compilation never throws on malformed input and never stops at the first
// problem: every diagnostic carries a 1-based line number and one of the
// fifteen stable error codes, and independent defects yield independent
// errors. The server runs the same rules; codes and line numbers must not
// drift between the two or the console and the service would disagree.

import {
  Action,
  ActionKind,
  ACTION_KINDS,
  actionSignature,
  actionText,
  Condition,
  ConditionKind,
  CONDITION_KINDS,
  conditionText,
  EntityClass,
  EntityInstance,
  FLOOR_CHAR,
  Fortress,
  FsmEdge,
  FsmNode,
  GRID_HEIGHT,
  GRID_WIDTH,
  isWall,
  makeFortress,
  makeInstance,
  OVERPOPULATION_LIMIT,
  SeedSpec,
  TARGETED_ACTIONS,
  validateClass,
  WALL_CHAR,
} from "./model.js";

export type ErrorCode =
  | "E001" // unknown action
  | "E002" // unknown condition
  | "E003" // duplicate action signature
  | "E004" // undefined target character
  | "E005" // bad node index
  | "E006" // duplicate directed edge
  | "E007" // map dimension mismatch
  | "E008" // unknown map character
  | "E009" // bad border
  | "E010" // bad count
  | "E011" // reserved character
  | "E012" // too many initial entities
  | "E013" // syntax error
  | "E014" // duplicate entity character
  | "E015"; // missing section

export interface CompileError {
  code: ErrorCode;
  line: number;
  message: string;
}

export function errorString(e: CompileError): string {
  return `line ${e.line}: ${e.code} ${e.message}`;
}

export class CompileFailure extends Error {
  errors: CompileError[];

  constructor(errors: CompileError[]) {
    super(errors.map(errorString).join("; "));
    this.errors = errors;
  }
}

const ACTION_BY_WORD = new Map<string, ActionKind>(ACTION_KINDS.map((k) => [k, k]));
const CONDITION_BY_WORD = new Map<string, ConditionKind>(
  CONDITION_KINDS.map((k) => [k, k]),
);

const EDGE_SPEC = /^([0-9]+)-([0-9]+)$/;
const UINT = /^[0-9]+$/;

const MAX_SEED = 1n << 64n;
const MAX_COUNT = 1n << 31n;
const MAX_NODE_INDEX = 1_000_000n;

/** Plain ASCII decimal within [0, limit); null otherwise. */
function parseUint(token: string, limit: bigint): bigint | null {
  if (token.length > 20 || !UINT.test(token)) return null;
  const value = BigInt(token);
  return value < limit ? value : null;
}

/** Quoted string with \" and \\ escapes; null when malformed. */
function parseQuoted(rest: string): string | null {
  rest = rest.trim();
  if (rest.length < 2 || rest[0] !== '"') return null;
  const out: string[] = [];
  let i = 1;
  while (i < rest.length) {
    const ch = rest[i];
    if (ch === "\\") {
      if (i + 1 >= rest.length || (rest[i + 1] !== '"' && rest[i + 1] !== "\\")) {
        return null;
      }
      out.push(rest[i + 1]);
      i += 2;
    } else if (ch === '"') {
      return rest.slice(i + 1).trim() === "" ? out.join("") : null;
    } else {
      out.push(ch);
      i += 1;
    }
  }
  return null;
}

function reserved(char: string): boolean {
  if (char === WALL_CHAR || char === FLOOR_CHAR) return true;
  const cp = char.codePointAt(0)!;
  return !(cp >= 0x21 && cp <= 0x7e);
}

/** Code points, not UTF-16 units: an astral glyph is one character. */
function charLength(s: string): number {
  return [...s].length;
}

function splitTokens(s: string): string[] {
  const t = s.trim();
  return t === "" ? [] : t.split(/\s+/);
}

interface BlockNode {
  line: number;
  action: Action | null; // null placeholder for unparseable actions
}

interface BlockEdge {
  line: number;
  src: number;
  dst: number;
  condition: Condition | null;
}

interface Block {
  line: number;
  char: string | null;
  name: string;
  nodes: Map<number, BlockNode>;
  edges: BlockEdge[];
  pairs: Set<string>;
}

class Compiler {
  lines: string[];
  errors: CompileError[] = [];
  name: string | null = null;
  author: string | null = null;
  notes: string | null = null;
  seed: SeedSpec | null = null;
  blocks: Block[] = [];
  current: Block | null = null;
  mapLine: number | null = null;
  mapRows: Array<[number, string]> = [];
  inMap = false;

  constructor(text: string) {
    this.lines = text.split("\n");
  }

  err(code: ErrorCode, line: number, message: string): void {
    this.errors.push({ code, line, message });
  }

  get lastLine(): number {
    let count = this.lines.length;
    if (count && this.lines[count - 1] === "") {
      count -= 1; // trailing newline is not a line of its own
    }
    return Math.max(1, count);
  }

  compile(): [Fortress | null, CompileError[]] {
    for (let i = 0; i < this.lines.length; i++) {
      const lineno = i + 1;
      const raw = this.lines[i];
      if (this.inMap) {
        this.mapRow(lineno, raw.replace(/\r+$/, ""));
        continue;
      }
      const stripped = raw.trim();
      if (stripped === "" || stripped.startsWith("#")) continue;
      const space = stripped.search(/\s/);
      const keyword = space < 0 ? stripped : stripped.slice(0, space);
      const rest = space < 0 ? "" : stripped.slice(space + 1).trim();
      this.directive(lineno, keyword, rest);
    }

    if (this.current !== null) {
      this.err("E013", this.lastLine, "entity block is not closed with END");
      this.closeBlock();
    }
    if (this.inMap) {
      this.err("E013", this.lastLine, "map block is not closed with END");
    }

    this.checkSections();
    const classes = this.resolveClasses();
    const instances = this.resolveMap(classes);

    if (this.errors.length > 0) {
      this.errors.sort(
        (a, b) => a.line - b.line || (a.code < b.code ? -1 : a.code > b.code ? 1 : 0),
      );
      return [null, this.errors];
    }

    const fortress = makeFortress({
      name: this.name ?? "",
      author: this.author ?? "",
      notes: this.notes ?? "",
      seedSpec: this.seed ?? { value: null },
      classes,
      instances,
      nextId: instances.length,
    });
    return [fortress, []];
  }

  directive(lineno: number, keyword: string, rest: string): void {
    if (
      ["FORTRESS", "AUTHOR", "SEED", "NOTES", "MAP"].includes(keyword) &&
      this.current !== null
    ) {
      this.err("E013", lineno, `${keyword} is not allowed inside an entity block`);
      return;
    }

    switch (keyword) {
      case "FORTRESS":
        this.quotedDirective(lineno, "FORTRESS", rest, "name");
        break;
      case "AUTHOR":
        this.quotedDirective(lineno, "AUTHOR", rest, "author");
        break;
      case "NOTES":
        this.quotedDirective(lineno, "NOTES", rest, "notes");
        break;
      case "SEED":
        this.seedDirective(lineno, rest);
        break;
      case "ENTITY":
        this.beginEntity(lineno, rest);
        break;
      case "NODE":
        if (this.current === null) {
          this.err("E013", lineno, "NODE outside ENTITY block");
        } else {
          this.nodeLine(lineno, rest);
        }
        break;
      case "EDGE":
        if (this.current === null) {
          this.err("E013", lineno, "EDGE outside ENTITY block");
        } else {
          this.edgeLine(lineno, rest);
        }
        break;
      case "END":
        if (rest !== "") {
          this.err("E013", lineno, "END takes no arguments");
        }
        if (this.current !== null) {
          this.closeBlock();
        } else {
          this.err("E013", lineno, "END without an open block");
        }
        break;
      case "MAP":
        if (rest !== "") {
          this.err("E013", lineno, "MAP takes no arguments");
        }
        if (this.mapLine !== null) {
          this.err("E013", lineno, "duplicate MAP section");
          return;
        }
        this.mapLine = lineno;
        this.inMap = true;
        break;
      default:
        this.err("E013", lineno, `unknown keyword '${keyword}'`);
    }
  }

  quotedDirective(
    lineno: number,
    keyword: string,
    rest: string,
    slot: "name" | "author" | "notes",
  ): void {
    const value = parseQuoted(rest);
    if (value === null) {
      this.err("E013", lineno, `${keyword} needs one quoted string`);
      return;
    }
    if (this[slot] !== null) {
      this.err("E013", lineno, `duplicate ${keyword} line`);
      return;
    }
    this[slot] = value;
  }

  seedDirective(lineno: number, rest: string): void {
    if (this.seed !== null) {
      this.err("E013", lineno, "duplicate SEED line");
      return;
    }
    const tokens = splitTokens(rest);
    if (tokens.length !== 1) {
      this.err("E013", lineno, "SEED needs exactly one value");
      return;
    }
    if (tokens[0] === "__RANDOM__") {
      this.seed = { value: null };
      return;
    }
    const value = parseUint(tokens[0], MAX_SEED);
    if (value === null) {
      this.err("E013", lineno, "SEED must be an unsigned 64-bit integer or __RANDOM__");
      return;
    }
    this.seed = { value };
  }

  beginEntity(lineno: number, rest: string): void {
    if (this.current !== null) {
      this.err("E013", lineno, "ENTITY before the previous block's END");
      this.closeBlock();
    }
    const block: Block = {
      line: lineno,
      char: null,
      name: "",
      nodes: new Map(),
      edges: [],
      pairs: new Set(),
    };
    this.current = block;
    this.blocks.push(block);

    const space = rest.search(/\s/);
    const charToken = space < 0 ? rest : rest.slice(0, space);
    const namePart = space < 0 ? "" : rest.slice(space + 1);
    if (charLength(charToken) !== 1) {
      this.err("E013", lineno, "ENTITY needs a single character and a quoted name");
      return;
    }
    if (reserved(charToken)) {
      this.err("E011", lineno, `character '${charToken}' is reserved or unprintable`);
      return;
    }
    const name = parseQuoted(namePart);
    if (name === null) {
      this.err("E013", lineno, "ENTITY name must be quoted");
      return;
    }
    block.char = charToken;
    block.name = name;
  }

  nodeLine(lineno: number, rest: string): void {
    const block = this.current!;
    const tokens = splitTokens(rest);
    if (tokens.length < 2) {
      this.err("E013", lineno, "NODE needs an index and an action");
      return;
    }
    const indexValue = parseUint(tokens[0], MAX_NODE_INDEX);
    if (indexValue === null) {
      this.err("E013", lineno, "node index must be a non-negative integer");
      return;
    }
    const index = Number(indexValue);
    if (block.nodes.has(index)) {
      this.err("E005", lineno, `node index ${index} is already declared`);
      return;
    }

    let action: Action | null = null;
    const kind = ACTION_BY_WORD.get(tokens[1]);
    if (kind === undefined) {
      this.err("E001", lineno, `unknown action '${tokens[1]}'`);
    } else if (TARGETED_ACTIONS.has(kind)) {
      if (tokens.length !== 3 || charLength(tokens[2]) !== 1) {
        this.err("E013", lineno, `action ${kind} needs exactly one target character`);
      } else {
        action = { kind, target: tokens[2] };
      }
    } else {
      if (tokens.length !== 2) {
        this.err("E013", lineno, `action ${kind} takes no target`);
      } else {
        action = { kind, target: null };
      }
    }
    // Record the index even for broken actions so that edges and the
    // contiguity check do not cascade extra errors.
    block.nodes.set(index, { line: lineno, action });
  }

  edgeLine(lineno: number, rest: string): void {
    const block = this.current!;
    const tokens = splitTokens(rest);
    const spec = tokens.length > 0 ? EDGE_SPEC.exec(tokens[0]) : null;
    if (!spec) {
      this.err("E013", lineno, "EDGE needs endpoints in the form <from>-<to>");
      return;
    }
    const [, srcToken, dstToken] = spec;
    if (srcToken.length > 9 || dstToken.length > 9) {
      this.err("E013", lineno, "edge endpoint out of range");
      return;
    }
    const src = parseInt(srcToken, 10);
    const dst = parseInt(dstToken, 10);

    if (tokens.length < 2) {
      this.err("E013", lineno, "EDGE needs a condition");
      return;
    }

    let condition: Condition | null = null;
    const kind = CONDITION_BY_WORD.get(tokens[1]);
    if (kind === undefined) {
      this.err("E002", lineno, `unknown condition '${tokens[1]}'`);
    } else {
      condition = this.parseCondition(lineno, kind, tokens.slice(2));
    }

    const pair = `${src}-${dst}`;
    if (block.pairs.has(pair)) {
      this.err("E006", lineno, `edge ${src}-${dst} is already declared`);
      return;
    }
    block.pairs.add(pair);
    block.edges.push({ line: lineno, src, dst, condition });
  }

  parseCondition(lineno: number, kind: ConditionKind, args: string[]): Condition | null {
    const badArity = (expect: string) => {
      this.err("E013", lineno, `condition ${kind} needs ${expect}`);
    };

    switch (kind) {
      case "none":
        if (args.length > 0) {
          badArity("no arguments");
          return null;
        }
        return { kind, target: null, count: null };
      case "step": {
        if (args.length !== 1) {
          badArity("one count");
          return null;
        }
        const count = parseUint(args[0], MAX_COUNT);
        if (count === null || count < 1n) {
          this.err("E010", lineno, "count must be an integer of at least 1");
          return null;
        }
        return { kind, target: null, count: Number(count) };
      }
      case "within": {
        if (args.length !== 2 || charLength(args[0]) !== 1) {
          badArity("a target character and a count");
          return null;
        }
        const count = parseUint(args[1], MAX_COUNT);
        if (count === null || count < 1n) {
          this.err("E010", lineno, "count must be an integer of at least 1");
          return null;
        }
        return { kind, target: args[0], count: Number(count) };
      }
      default:
        if (args.length !== 1 || charLength(args[0]) !== 1) {
          badArity("one target character");
          return null;
        }
        return { kind, target: args[0], count: null };
    }
  }

  closeBlock(): void {
    const block = this.current!;
    this.current = null;

    if (block.nodes.size === 0) {
      this.err("E005", block.line, "entity must declare at least node 0");
      return;
    }
    const indices = [...block.nodes.keys()].sort((a, b) => a - b);
    if (!indices.every((v, i) => v === i)) {
      this.err(
        "E005",
        block.line,
        `node indices [${indices.join(", ")}] must be exactly 0..${indices.length - 1}`,
      );
    }

    const signatures = new Map<string, number>();
    for (const index of indices) {
      const { line, action } = block.nodes.get(index)!;
      if (action === null) continue;
      const sig = actionSignature(action);
      const first = signatures.get(sig);
      if (first !== undefined) {
        this.err("E003", line, `node ${index} repeats the action of node ${first}`);
      } else {
        signatures.set(sig, index);
      }
    }

    const nodeSet = new Set(block.nodes.keys());
    for (const edge of block.edges) {
      if (!nodeSet.has(edge.src) || !nodeSet.has(edge.dst)) {
        this.err(
          "E005",
          edge.line,
          `edge ${edge.src}-${edge.dst} references a missing node`,
        );
      }
    }
  }

  mapRow(lineno: number, raw: string): void {
    if (raw.trim() === "END") {
      this.inMap = false;
      return;
    }
    this.mapRows.push([lineno, raw]);
  }

  checkSections(): void {
    if (this.name === null) {
      this.err("E015", this.lastLine, "missing FORTRESS line");
    }
    if (this.seed === null) {
      this.err("E015", this.lastLine, "missing SEED line");
    }
    if (this.blocks.length === 0) {
      this.err("E015", this.lastLine, "at least one ENTITY block is required");
    }
    if (this.mapLine === null) {
      this.err("E015", this.lastLine, "missing MAP section");
    }
  }

  resolveClasses(): Map<string, EntityClass> {
    const classes = new Map<string, EntityClass>();
    const registered: Block[] = [];
    for (const block of this.blocks) {
      if (block.char === null) continue;
      if (classes.has(block.char)) {
        this.err(
          "E014",
          block.line,
          `entity character '${block.char}' is already defined`,
        );
        continue;
      }
      const indices = [...block.nodes.keys()].sort((a, b) => a - b);
      const nodes: FsmNode[] = [];
      for (const index of indices) {
        const { action } = block.nodes.get(index)!;
        if (action !== null) nodes.push({ index, action });
      }
      const edges: FsmEdge[] = [];
      for (const edge of block.edges) {
        if (edge.condition !== null) {
          edges.push({ src: edge.src, dst: edge.dst, condition: edge.condition });
        }
      }
      classes.set(block.char, { char: block.char, name: block.name, nodes, edges });
      registered.push(block);
    }

    const defined = new Set(classes.keys());
    for (const block of registered) {
      const indices = [...block.nodes.keys()].sort((a, b) => a - b);
      for (const index of indices) {
        const { line, action } = block.nodes.get(index)!;
        if (action !== null && action.target !== null && !defined.has(action.target)) {
          this.err("E004", line, `target character '${action.target}' is not defined`);
        }
      }
      for (const edge of block.edges) {
        const target = edge.condition?.target ?? null;
        if (target !== null && !defined.has(target)) {
          this.err("E004", edge.line, `target character '${target}' is not defined`);
        }
      }
    }
    return classes;
  }

  resolveMap(classes: Map<string, EntityClass>): EntityInstance[] {
    if (this.mapLine === null) return [];
    const rows = this.mapRows;
    let wellFormed = true;
    if (rows.length !== GRID_HEIGHT) {
      this.err(
        "E007",
        this.mapLine,
        `map has ${rows.length} rows, expected ${GRID_HEIGHT}`,
      );
      wellFormed = false;
    }
    const cells = rows.map(([line, row]) => [line, [...row]] as [number, string[]]);
    for (const [line, row] of cells) {
      if (row.length !== GRID_WIDTH) {
        this.err(
          "E007",
          line,
          `map row has ${row.length} characters, expected ${GRID_WIDTH}`,
        );
        wellFormed = false;
      }
    }

    let glyphs = 0;
    for (const [, row] of cells) {
      for (const ch of row) {
        if (classes.has(ch)) glyphs += 1;
      }
    }
    if (glyphs > OVERPOPULATION_LIMIT) {
      this.err(
        "E012",
        this.mapLine,
        `${glyphs} initial entities exceed the limit of ${OVERPOPULATION_LIMIT}`,
      );
    }

    if (!wellFormed) return [];

    const instances: EntityInstance[] = [];
    for (let y = 0; y < cells.length; y++) {
      const [line, row] = cells[y];
      for (let x = 0; x < row.length; x++) {
        const ch = row[x];
        if (isWall(x, y)) {
          if (ch !== WALL_CHAR) {
            this.err("E009", line, `border cell (${x},${y}) must be '${WALL_CHAR}'`);
          }
          continue;
        }
        if (ch === WALL_CHAR) {
          this.err(
            "E009",
            line,
            `walls are only allowed on the border, found one at (${x},${y})`,
          );
        } else if (ch === FLOOR_CHAR) {
          continue;
        } else if (classes.has(ch)) {
          instances.push(makeInstance(instances.length, ch, x, y));
        } else {
          this.err("E008", line, `map character '${ch}' is not a defined entity`);
        }
      }
    }
    return instances;
  }
}

// -- Public API -----------------------------------------------------------------

/** All diagnostics for a definition text; empty list means it compiles. */
export function validateText(text: string): CompileError[] {
  return new Compiler(text).compile()[1];
}

/** Compile a definition; throws CompileFailure listing every error. */
export function parse(text: string): Fortress {
  const [fortress, errors] = new Compiler(text).compile();
  if (fortress === null) {
    throw new CompileFailure(errors);
  }
  return fortress;
}

function quote(value: string): string {
  return '"' + value.replace(/\\/g, "\\\\").replace(/"/g, '\\"') + '"';
}

/**
 * Canonical text for a fortress definition. Sections in fixed order,
 * entities sorted by character, nodes by index, edges by endpoint pair,
 * so parse(serialize(f)) equals f and equal definitions serialize to
 * identical bytes.
 */
export function serialize(fortress: Fortress): string {
  for (const cls of fortress.classes.values()) {
    const bad = validateClass(cls);
    if (bad.length > 0) {
      throw new Error(
        `class '${cls.char}' is not serializable: ${bad[0].code}: ${bad[0].message}`,
      );
    }
  }

  const grid: string[][] = [];
  for (let y = 0; y < GRID_HEIGHT; y++) {
    const row: string[] = [];
    for (let x = 0; x < GRID_WIDTH; x++) {
      row.push(isWall(x, y) ? WALL_CHAR : FLOOR_CHAR);
    }
    grid.push(row);
  }
  const seen = new Set<string>();
  for (const inst of fortress.instances) {
    if (isWall(inst.x, inst.y)) {
      throw new Error(`instance at (${inst.x},${inst.y}) is not on the floor`);
    }
    if (!fortress.classes.has(inst.char)) {
      throw new Error(`instance character '${inst.char}' has no class`);
    }
    const cell = `${inst.x},${inst.y}`;
    if (seen.has(cell)) {
      throw new Error(`two instances share cell (${inst.x},${inst.y})`);
    }
    seen.add(cell);
    grid[inst.y][inst.x] = inst.char;
  }

  const lines = [`FORTRESS ${quote(fortress.name)}`];
  if (fortress.author) {
    lines.push(`AUTHOR ${quote(fortress.author)}`);
  }
  const seed = fortress.seedSpec;
  lines.push(`SEED ${seed.value === null ? "__RANDOM__" : seed.value.toString()}`);
  if (fortress.notes) {
    lines.push(`NOTES ${quote(fortress.notes)}`);
  }

  for (const char of [...fortress.classes.keys()].sort()) {
    const cls = fortress.classes.get(char)!;
    lines.push("");
    lines.push(`ENTITY ${cls.char} ${quote(cls.name)}`);
    for (const node of [...cls.nodes].sort((a, b) => a.index - b.index)) {
      lines.push(`  NODE ${node.index} ${actionText(node.action)}`);
    }
    const edges = [...cls.edges].sort((a, b) => a.src - b.src || a.dst - b.dst);
    for (const edge of edges) {
      lines.push(`  EDGE ${edge.src}-${edge.dst} ${conditionText(edge.condition)}`);
    }
    lines.push("END");
  }

  lines.push("");
  lines.push("MAP");
  for (const row of grid) {
    lines.push(row.join(""));
  }
  lines.push("END");
  return lines.join("\n") + "\n";
}
