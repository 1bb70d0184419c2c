// Domain vocabulary shared by the compiler, the in-browser engine, and the
// editors. Mirrors the server's model so definitions and event logs mean
// the same thing on both sides of the wire.

import { Rng } from "./rng.js";

// -- Grid geometry ------------------------------------------------------------

export const GRID_WIDTH = 16;
export const GRID_HEIGHT = 8;
export const INTERIOR_WIDTH = GRID_WIDTH - 2;
export const INTERIOR_HEIGHT = GRID_HEIGHT - 2;
export const INTERIOR_CELLS = INTERIOR_WIDTH * INTERIOR_HEIGHT;

export const OVERPOPULATION_LIMIT = 2 * INTERIOR_CELLS;
export const INACTIVITY_LIMIT = 100;

export const WALL_CHAR = "#";
export const FLOOR_CHAR = ".";

export function inBounds(x: number, y: number): boolean {
  return x >= 0 && x < GRID_WIDTH && y >= 0 && y < GRID_HEIGHT;
}

export function isWall(x: number, y: number): boolean {
  return x <= 0 || y <= 0 || x >= GRID_WIDTH - 1 || y >= GRID_HEIGHT - 1;
}

export function manhattan(ax: number, ay: number, bx: number, by: number): number {
  return Math.abs(ax - bx) + Math.abs(ay - by);
}

// -- Action vocabulary ----------------------------------------------------------

export type ActionKind =
  | "idle"
  | "move"
  | "die"
  | "clone"
  | "push"
  | "take"
  | "chase"
  | "add"
  | "transform"
  | "move_wall"
  | "player_move"
  | "player_push"
  | "player_move_wall";

export const ACTION_KINDS: readonly ActionKind[] = [
  "idle",
  "move",
  "die",
  "clone",
  "push",
  "take",
  "chase",
  "add",
  "transform",
  "move_wall",
  "player_move",
  "player_push",
  "player_move_wall",
];

export const TARGETED_ACTIONS: ReadonlySet<ActionKind> = new Set([
  "push",
  "take",
  "chase",
  "add",
  "transform",
  "move_wall",
  "player_push",
  "player_move_wall",
]);

export const PLAYER_ACTIONS: ReadonlySet<ActionKind> = new Set([
  "player_move",
  "player_push",
  "player_move_wall",
]);

export interface Action {
  kind: ActionKind;
  target: string | null;
}

export function actionSignature(action: Action): string {
  return `${action.kind}\u0000${action.target ?? ""}`;
}

export function actionText(action: Action): string {
  return action.target !== null ? `${action.kind} ${action.target}` : action.kind;
}

// -- Condition vocabulary --------------------------------------------------------

// Array order is the priority order, lowest first.
export type ConditionKind = "none" | "step" | "within" | "nextTo" | "touch";

export const CONDITION_KINDS: readonly ConditionKind[] = [
  "none",
  "step",
  "within",
  "nextTo",
  "touch",
];

const PRIORITY = new Map(CONDITION_KINDS.map((kind, rank) => [kind, rank]));

export interface Condition {
  kind: ConditionKind;
  target: string | null;
  count: number | null;
}

export function conditionPriority(cond: Condition): number {
  return PRIORITY.get(cond.kind)!;
}

export function conditionNeedsTarget(kind: ConditionKind): boolean {
  return kind === "within" || kind === "nextTo" || kind === "touch";
}

export function conditionNeedsCount(kind: ConditionKind): boolean {
  return kind === "step" || kind === "within";
}

export function conditionText(cond: Condition): string {
  switch (cond.kind) {
    case "none":
      return "none";
    case "step":
      return `step ${cond.count}`;
    case "within":
      return `within ${cond.target} ${cond.count}`;
    default:
      return `${cond.kind} ${cond.target}`;
  }
}

// -- FSM structure ----------------------------------------------------------------

export interface FsmNode {
  index: number;
  action: Action;
}

export interface FsmEdge {
  src: number;
  dst: number;
  condition: Condition;
}

export interface EntityClass {
  char: string;
  name: string;
  nodes: FsmNode[];
  edges: FsmEdge[];
}

export function classHasPlayer(cls: EntityClass): boolean {
  return cls.nodes.some((n) => PLAYER_ACTIONS.has(n.action.kind));
}

export function actionAt(cls: EntityClass, index: number): Action {
  const node = cls.nodes.find((n) => n.index === index);
  if (!node) {
    throw new Error(`class ${cls.char} has no node ${index}`);
  }
  return node.action;
}

export interface EntityInstance {
  id: number;
  char: string;
  x: number;
  y: number;
  node: number;
  dwell: number;
  lastEdge: [number, number] | null;
}

export function makeInstance(id: number, char: string, x: number, y: number): EntityInstance {
  return { id, char, x, y, node: 0, dwell: 0, lastEdge: null };
}

// -- Seeds, events, termination ------------------------------------------------------

/** Fixed seed when value is set; fresh random seed per reset otherwise. */
export interface SeedSpec {
  value: bigint | null;
}

export type Verb =
  | "moved"
  | "blocked"
  | "spawned"
  | "removed"
  | "transformed"
  | "pushed"
  | "took"
  | "transitioned"
  | "idled"
  | "input";

export const ACTIVITY_VERBS: ReadonlySet<Verb> = new Set([
  "moved",
  "spawned",
  "removed",
  "transformed",
  "pushed",
  "took",
]);

export interface SimEvent {
  tick: number;
  actorId: number;
  actorChar: string;
  verb: Verb;
  detail: string;
  x: number;
  y: number;
}

/** Wire format, stable byte for byte so logs can be compared across runtimes. */
export function eventLine(e: SimEvent): string {
  return `T${e.tick} #${e.actorId}:${e.actorChar} ${e.verb} ${e.detail} @(${e.x},${e.y})`;
}

export type TerminationReason = "extinction" | "overpopulation" | "inactivity";

// -- Fortress -------------------------------------------------------------------------

export interface Fortress {
  name: string;
  author: string;
  notes: string;
  seedSpec: SeedSpec;
  classes: Map<string, EntityClass>;
  instances: EntityInstance[];
  tick: number;
  rng: Rng;
  lastActivityTick: number;
  status: TerminationReason | null;
  log: SimEvent[];
  nextId: number;
}

export function makeFortress(partial: {
  name: string;
  author?: string;
  notes?: string;
  seedSpec?: SeedSpec;
  classes?: Map<string, EntityClass>;
  instances?: EntityInstance[];
  nextId?: number;
}): Fortress {
  const instances = partial.instances ?? [];
  return {
    name: partial.name,
    author: partial.author ?? "",
    notes: partial.notes ?? "",
    seedSpec: partial.seedSpec ?? { value: null },
    classes: partial.classes ?? new Map(),
    instances,
    tick: 0,
    rng: new Rng(0n),
    lastActivityTick: 0,
    status: null,
    log: [],
    nextId: partial.nextId ?? instances.length,
  };
}

export function findInstance(fortress: Fortress, id: number): EntityInstance | null {
  return fortress.instances.find((i) => i.id === id) ?? null;
}

export function isPlayerControlled(fortress: Fortress, inst: EntityInstance): boolean {
  const cls = fortress.classes.get(inst.char);
  return cls !== undefined && classHasPlayer(cls);
}

export function fortressHasPlayer(fortress: Fortress): boolean {
  for (const cls of fortress.classes.values()) {
    if (classHasPlayer(cls)) return true;
  }
  return false;
}

// -- Structural validation ---------------------------------------------------------------

export interface StructuralError {
  code: string;
  message: string;
}

function reservedChar(char: string): boolean {
  const points = [...char];
  if (points.length !== 1) return true;
  if (char === WALL_CHAR || char === FLOOR_CHAR) return true;
  const cp = points[0].codePointAt(0)!;
  // Printable ASCII only; rules out whitespace and control characters.
  return !(cp >= 0x21 && cp <= 0x7e);
}

function checkAction(action: Action, where: string): StructuralError[] {
  const errors: StructuralError[] = [];
  if (TARGETED_ACTIONS.has(action.kind)) {
    if (action.target === null || [...action.target].length !== 1) {
      errors.push({
        code: "MissingTarget",
        message: `${where}: action ${action.kind} needs a target character`,
      });
    }
  } else if (action.target !== null) {
    errors.push({
      code: "UnexpectedTarget",
      message: `${where}: action ${action.kind} takes no target`,
    });
  }
  return errors;
}

function checkCondition(cond: Condition, where: string): StructuralError[] {
  const errors: StructuralError[] = [];
  const needsTarget = conditionNeedsTarget(cond.kind);
  const needsCount = conditionNeedsCount(cond.kind);
  if (needsTarget && (cond.target === null || [...cond.target].length !== 1)) {
    errors.push({
      code: "MissingTarget",
      message: `${where}: condition ${cond.kind} needs a target character`,
    });
  }
  if (!needsTarget && cond.target !== null) {
    errors.push({
      code: "UnexpectedTarget",
      message: `${where}: condition ${cond.kind} takes no target`,
    });
  }
  if (needsCount) {
    if (cond.count === null || cond.count < 1) {
      errors.push({
        code: "BadCount",
        message: `${where}: condition ${cond.kind} needs a count of at least 1`,
      });
    }
  } else if (cond.count !== null) {
    errors.push({
      code: "BadCount",
      message: `${where}: condition ${cond.kind} takes no count`,
    });
  }
  return errors;
}

/** All structural rules for one entity class; empty list means valid. */
export function validateClass(cls: EntityClass): StructuralError[] {
  const errors: StructuralError[] = [];
  if (reservedChar(cls.char)) {
    errors.push({
      code: "ReservedCharacter",
      message: `character '${cls.char}' is reserved or unprintable`,
    });
  }

  if (cls.nodes.length === 0) {
    errors.push({ code: "NoNodes", message: "entity declares no nodes" });
    return errors;
  }

  const indices = cls.nodes.map((n) => n.index);
  const sorted = [...indices].sort((a, b) => a - b);
  if (!sorted.every((v, i) => v === i)) {
    errors.push({
      code: "BadNodeIndex",
      message: `node indices [${sorted.join(", ")}] must be exactly 0..${indices.length - 1}`,
    });
  }

  const seenSignatures = new Map<string, number>();
  for (const node of cls.nodes) {
    errors.push(...checkAction(node.action, `node ${node.index}`));
    const sig = actionSignature(node.action);
    const first = seenSignatures.get(sig);
    if (first !== undefined) {
      errors.push({
        code: "DuplicateActionSignature",
        message: `node ${node.index} repeats action of node ${first}`,
      });
    } else {
      seenSignatures.set(sig, node.index);
    }
  }

  const validIndices = new Set(indices);
  const seenPairs = new Set<string>();
  for (const edge of cls.edges) {
    errors.push(...checkCondition(edge.condition, `edge ${edge.src}-${edge.dst}`));
    if (!validIndices.has(edge.src) || !validIndices.has(edge.dst)) {
      errors.push({
        code: "BadNodeIndex",
        message: `edge ${edge.src}-${edge.dst} references a missing node`,
      });
    }
    const pair = `${edge.src}-${edge.dst}`;
    if (seenPairs.has(pair)) {
      errors.push({
        code: "DuplicateDirectedEdge",
        message: `edge ${edge.src}-${edge.dst} appears more than once`,
      });
    }
    seenPairs.add(pair);
  }
  return errors;
}

/** Class rules plus cross-class and placement rules. */
export function validateFortress(fortress: Fortress): StructuralError[] {
  const errors: StructuralError[] = [];
  const defined = new Set(fortress.classes.keys());

  for (const [char, cls] of fortress.classes) {
    if (char !== cls.char) {
      errors.push({
        code: "UnknownClass",
        message: `class map key '${char}' does not match class char '${cls.char}'`,
      });
    }
    errors.push(...validateClass(cls));
    for (const node of cls.nodes) {
      const target = node.action.target;
      if (target !== null && !defined.has(target)) {
        errors.push({
          code: "UndefinedTarget",
          message: `class '${cls.char}' node ${node.index} targets undefined character '${target}'`,
        });
      }
    }
    for (const edge of cls.edges) {
      const target = edge.condition.target;
      if (target !== null && !defined.has(target)) {
        errors.push({
          code: "UndefinedTarget",
          message: `class '${cls.char}' edge ${edge.src}-${edge.dst} targets undefined character '${target}'`,
        });
      }
    }
  }

  for (const inst of fortress.instances) {
    if (!defined.has(inst.char)) {
      errors.push({
        code: "UnknownClass",
        message: `instance at (${inst.x},${inst.y}) uses undefined character '${inst.char}'`,
      });
    }
    if (isWall(inst.x, inst.y) || !inBounds(inst.x, inst.y)) {
      errors.push({
        code: "BadPosition",
        message: `instance at (${inst.x},${inst.y}) is outside the interior`,
      });
    }
  }

  if (fortress.instances.length > OVERPOPULATION_LIMIT) {
    errors.push({
      code: "TooManyInstances",
      message: `${fortress.instances.length} initial instances exceed the limit of ${OVERPOPULATION_LIMIT}`,
    });
  }
  return errors;
}
