// Tick engine: runs entity state machines on a fortress grid, in the
// browser. The server steps fortresses with identical rules, so the
// ordering contract is load-bearing and must not drift:
//
// 1. The tick counter advances.
// 2. Instances act in ascending id order, using a snapshot of the ids
//    alive when the tick began. Instances spawned during the tick wait
//    until the next one; instances removed mid-tick are skipped.
// 3. Each instance first evaluates the outgoing edges of its active node.
//    Among satisfied edges the highest-priority condition wins; ties break
//    toward the lowest destination node index. At most one transition per
//    tick, and a transition resets the dwell counter.
// 4. The action of the (possibly new) active node executes.
// 5. The dwell counter increments.
// 6. After every instance acted, termination is checked once, in fixed
//    order: extinction, overpopulation, inactivity.
//
// All randomness flows through fortress.rng and instances are visited in
// id order, so a fixed seed plus a fixed input script reproduces the
// event log byte for byte, here and on the server.

import {
  ACTIVITY_VERBS,
  Action,
  Condition,
  EntityClass,
  EntityInstance,
  Fortress,
  FsmEdge,
  INACTIVITY_LIMIT,
  OVERPOPULATION_LIMIT,
  PLAYER_ACTIONS,
  SimEvent,
  TerminationReason,
  Verb,
  actionAt,
  conditionPriority,
  isPlayerControlled,
  isWall,
  makeFortress,
  makeInstance,
  manhattan,
  validateFortress,
} from "./model.js";
import { Rng, randomSeed } from "./rng.js";

export class EngineError extends Error {}

export class InvalidDefinition extends EngineError {
  errors: Array<{ code: string; message: string }>;

  constructor(errors: Array<{ code: string; message: string }>) {
    super(errors.map((e) => `${e.code}: ${e.message}`).join("; "));
    this.errors = errors;
  }
}

export class AlreadyTerminated extends EngineError {}

export class UnknownInstance extends EngineError {}

export type PlayerInput = "UP" | "DOWN" | "LEFT" | "RIGHT" | "SKIP";

type Direction = [string, number, number];

// RNG direction draws map mod-4 onto this ring; mod-5 adds SKIP for inputs.
const DIRECTIONS: readonly Direction[] = [
  ["N", 0, -1],
  ["E", 1, 0],
  ["S", 0, 1],
  ["W", -1, 0],
];

const INPUT_ORDER: readonly PlayerInput[] = ["UP", "DOWN", "LEFT", "RIGHT", "SKIP"];

const INPUT_DELTAS: Record<Exclude<PlayerInput, "SKIP">, Direction> = {
  UP: ["N", 0, -1],
  DOWN: ["S", 0, 1],
  LEFT: ["W", -1, 0],
  RIGHT: ["E", 1, 0],
};

export type Inputs = Map<number, PlayerInput>;

export interface TickReport {
  tick: number;
  events: SimEvent[];
  status: TerminationReason | null;
  xray: Map<number, [number, [number, number] | null]>;
}

// -- Setup --------------------------------------------------------------------

/**
 * Fresh runnable fortress from a definition. Instance ids are assigned
 * 0..k-1 in map reading order (top-left to bottom-right, row by row).
 * Everything starts at node 0 with dwell 0 at tick 0. Seed resolution:
 * explicit override, then a fixed seed spec, then a fresh random seed.
 */
export function init(definition: Fortress, seedOverride: bigint | null = null): Fortress {
  const errors = validateFortress(definition);
  if (errors.length > 0) {
    throw new InvalidDefinition(errors);
  }

  let seed: bigint;
  if (seedOverride !== null) {
    seed = seedOverride;
  } else if (definition.seedSpec.value !== null) {
    seed = definition.seedSpec.value;
  } else {
    seed = randomSeed();
  }

  const ordered = [...definition.instances].sort(
    (a, b) => a.y - b.y || a.x - b.x || a.id - b.id,
  );
  const instances = ordered.map((inst, n) => makeInstance(n, inst.char, inst.x, inst.y));
  const fortress = makeFortress({
    name: definition.name,
    author: definition.author,
    notes: definition.notes,
    seedSpec: definition.seedSpec,
    classes: new Map(definition.classes),
    instances,
    nextId: instances.length,
  });
  fortress.rng = new Rng(seed);
  return fortress;
}

/**
 * One uniformly random input per player-controlled instance. Draws come
 * from the fortress RNG in instance id order, so automated play is
 * reproducible from the seed alone.
 */
export function autoRandomInputs(fortress: Fortress): Inputs {
  const inputs: Inputs = new Map();
  for (const inst of fortress.instances) {
    if (isPlayerControlled(fortress, inst)) {
      inputs.set(inst.id, INPUT_ORDER[fortress.rng.below(5)]);
    }
  }
  return inputs;
}

// -- Conditions ---------------------------------------------------------------

/**
 * Truth of one edge condition for `actor` against the current state.
 * The actor never matches a character search against itself; distinct
 * instances of its own class still do.
 */
export function evalCondition(
  condition: Condition,
  actor: EntityInstance,
  fortress: Fortress,
): boolean {
  const kind = condition.kind;
  if (kind === "none") return true;
  if (kind === "step") return actor.dwell >= (condition.count ?? 0);

  const limit = kind === "within" ? condition.count ?? 0 : kind === "nextTo" ? 1 : 0;
  const exact = kind !== "within";
  for (const other of fortress.instances) {
    if (other === actor || other.char !== condition.target) continue;
    const dist = manhattan(actor.x, actor.y, other.x, other.y);
    if (exact ? dist === limit : dist <= limit) return true;
  }
  return false;
}

function pickEdge(
  cls: EntityClass,
  actor: EntityInstance,
  fortress: Fortress,
): FsmEdge | null {
  let best: FsmEdge | null = null;
  for (const edge of cls.edges) {
    if (edge.src !== actor.node) continue;
    if (!evalCondition(edge.condition, actor, fortress)) continue;
    if (best === null) {
      best = edge;
      continue;
    }
    const p = conditionPriority(edge.condition);
    const bp = conditionPriority(best.condition);
    if (p > bp || (p === bp && edge.dst < best.dst)) {
      best = edge;
    }
  }
  return best;
}

// -- Actions ------------------------------------------------------------------

function emit(
  fortress: Fortress,
  actor: EntityInstance,
  verb: Verb,
  detail: string,
  pos: [number, number] | null = null,
): void {
  const [x, y] = pos ?? [actor.x, actor.y];
  const event: SimEvent = {
    tick: fortress.tick,
    actorId: actor.id,
    actorChar: actor.char,
    verb,
    detail,
    x,
    y,
  };
  fortress.log.push(event);
  if (ACTIVITY_VERBS.has(verb)) {
    fortress.lastActivityTick = fortress.tick;
  }
}

function othersOf(
  fortress: Fortress,
  actor: EntityInstance,
  char: string,
): EntityInstance[] {
  return fortress.instances.filter((o) => o !== actor && o.char === char);
}

function nearest(
  fortress: Fortress,
  actor: EntityInstance,
  char: string,
): EntityInstance | null {
  let best: EntityInstance | null = null;
  let bestDist = 0;
  for (const o of othersOf(fortress, actor, char)) {
    const dist = manhattan(actor.x, actor.y, o.x, o.y);
    if (best === null || dist < bestDist || (dist === bestDist && o.id < best.id)) {
      best = o;
      bestDist = dist;
    }
  }
  return best;
}

function spawn(fortress: Fortress, actor: EntityInstance, char: string): void {
  const created = makeInstance(fortress.nextId, char, actor.x, actor.y);
  fortress.nextId += 1;
  fortress.instances.push(created);
  emit(fortress, actor, "spawned", `#${created.id}:${created.char}`, [
    created.x,
    created.y,
  ]);
}

function removeInstance(fortress: Fortress, inst: EntityInstance): void {
  const at = fortress.instances.indexOf(inst);
  if (at >= 0) fortress.instances.splice(at, 1);
}

/** Shared movement core for move and move_wall. */
function walk(
  fortress: Fortress,
  actor: EntityInstance,
  direction: Direction,
  blockedBy: string | null = null,
): void {
  const [label, dx, dy] = direction;
  const nx = actor.x + dx;
  const ny = actor.y + dy;
  let blocked = isWall(nx, ny);
  if (!blocked && blockedBy !== null) {
    blocked = fortress.instances.some(
      (o) => o !== actor && o.char === blockedBy && o.x === nx && o.y === ny,
    );
  }
  if (blocked) {
    emit(fortress, actor, "blocked", label);
    return;
  }
  actor.x = nx;
  actor.y = ny;
  emit(fortress, actor, "moved", label);
}

function actPush(
  fortress: Fortress,
  actor: EntityInstance,
  target: string,
  direction: Direction,
): void {
  const [label, dx, dy] = direction;
  const destX = actor.x + dx;
  const destY = actor.y + dy;
  const beyondX = actor.x + 2 * dx;
  const beyondY = actor.y + 2 * dy;
  const pushees = othersOf(fortress, actor, target).filter(
    (o) => o.x === destX && o.y === destY,
  );
  if (pushees.length === 0) {
    walk(fortress, actor, direction);
    return;
  }
  if (isWall(beyondX, beyondY)) {
    emit(fortress, actor, "blocked", label);
    return;
  }
  for (const o of [...pushees].sort((a, b) => a.id - b.id)) {
    o.x = beyondX;
    o.y = beyondY;
    emit(fortress, actor, "pushed", `#${o.id}:${o.char} ${label}`, [beyondX, beyondY]);
  }
  actor.x = destX;
  actor.y = destY;
  emit(fortress, actor, "moved", label);
}

function actTake(fortress: Fortress, actor: EntityInstance, target: string): void {
  const victim = nearest(fortress, actor, target);
  if (victim === null) {
    emit(fortress, actor, "idled", "-");
    return;
  }
  emit(fortress, actor, "took", `#${victim.id}:${victim.char}`);
  removeInstance(fortress, victim);
  emit(fortress, victim, "removed", `by #${actor.id}`, [victim.x, victim.y]);
}

function actChase(fortress: Fortress, actor: EntityInstance, target: string): void {
  const prey = nearest(fortress, actor, target);
  if (prey === null || (prey.x === actor.x && prey.y === actor.y)) {
    emit(fortress, actor, "idled", "-");
    return;
  }
  const dx = prey.x - actor.x;
  const dy = prey.y - actor.y;
  const horizontal: Direction = dx > 0 ? ["E", 1, 0] : ["W", -1, 0];
  const vertical: Direction = dy > 0 ? ["S", 0, 1] : ["N", 0, -1];
  // Larger displacement first; ties prefer the horizontal axis.
  const order =
    Math.abs(dx) >= Math.abs(dy) ? [horizontal, vertical] : [vertical, horizontal];
  const axisDelta = new Map<string, number>([
    [horizontal[0], dx],
    [vertical[0], dy],
  ]);
  for (const [label, sx, sy] of order) {
    if (axisDelta.get(label) === 0) continue;
    const nx = actor.x + sx;
    const ny = actor.y + sy;
    if (isWall(nx, ny)) continue;
    actor.x = nx;
    actor.y = ny;
    emit(fortress, actor, "moved", label);
    return;
  }
  emit(fortress, actor, "idled", "-");
}

function actTransform(fortress: Fortress, actor: EntityInstance, target: string): void {
  const old = actor.char;
  actor.char = target;
  actor.node = 0;
  actor.dwell = 0;
  actor.lastEdge = null;
  emit(fortress, actor, "transformed", `${old}->${target}`);
}

function randomDirection(fortress: Fortress): Direction {
  return DIRECTIONS[fortress.rng.below(4)];
}

function execute(
  fortress: Fortress,
  actor: EntityInstance,
  action: Action,
  inputs: Inputs,
): void {
  const kind = action.kind;

  if (PLAYER_ACTIONS.has(kind)) {
    const pressed = inputs.get(actor.id) ?? "SKIP";
    emit(fortress, actor, "input", pressed);
    if (pressed === "SKIP") {
      emit(fortress, actor, "idled", "-");
      return;
    }
    const direction = INPUT_DELTAS[pressed];
    if (kind === "player_move") {
      walk(fortress, actor, direction);
    } else if (kind === "player_push") {
      actPush(fortress, actor, action.target ?? "", direction);
    } else {
      walk(fortress, actor, direction, action.target);
    }
    return;
  }

  switch (kind) {
    case "idle":
      emit(fortress, actor, "idled", "-");
      break;
    case "move":
      walk(fortress, actor, randomDirection(fortress));
      break;
    case "die":
      removeInstance(fortress, actor);
      emit(fortress, actor, "removed", "die", [actor.x, actor.y]);
      break;
    case "clone":
      spawn(fortress, actor, actor.char);
      break;
    case "push":
      actPush(fortress, actor, action.target ?? "", randomDirection(fortress));
      break;
    case "take":
      actTake(fortress, actor, action.target ?? "");
      break;
    case "chase":
      actChase(fortress, actor, action.target ?? "");
      break;
    case "add":
      spawn(fortress, actor, action.target ?? "");
      break;
    case "transform":
      actTransform(fortress, actor, action.target ?? "");
      break;
    case "move_wall":
      walk(fortress, actor, randomDirection(fortress), action.target);
      break;
    default:
      throw new EngineError(`unhandled action kind '${kind}'`);
  }
}

// -- Tick loop ----------------------------------------------------------------

export function checkTermination(fortress: Fortress): TerminationReason | null {
  if (fortress.instances.length === 0) return "extinction";
  if (fortress.instances.length > OVERPOPULATION_LIMIT) return "overpopulation";
  if (fortress.tick - fortress.lastActivityTick >= INACTIVITY_LIMIT) return "inactivity";
  return null;
}

/** Advance the fortress one tick; see module comment for ordering. */
export function step(fortress: Fortress, inputs: Inputs | null = null): TickReport {
  if (fortress.status !== null) {
    throw new AlreadyTerminated(`fortress already ended: ${fortress.status}`);
  }
  const resolved = inputs ?? new Map();

  fortress.tick += 1;
  const firstEvent = fortress.log.length;
  const snapshot = fortress.instances.map((i) => i.id);
  const alive = new Map(fortress.instances.map((i) => [i.id, i]));

  for (const instanceId of snapshot) {
    const actor = alive.get(instanceId);
    if (actor === undefined || !fortress.instances.includes(actor)) continue;
    const cls = fortress.classes.get(actor.char)!;

    const edge = pickEdge(cls, actor, fortress);
    if (edge !== null) {
      actor.node = edge.dst;
      actor.dwell = 0;
      actor.lastEdge = [edge.src, edge.dst];
      emit(fortress, actor, "transitioned", `${edge.src}->${edge.dst}`);
    }

    execute(fortress, actor, actionAt(cls, actor.node), resolved);

    if (fortress.instances.includes(actor)) {
      actor.dwell += 1;
    }
  }

  fortress.status = checkTermination(fortress);
  return {
    tick: fortress.tick,
    events: fortress.log.slice(firstEvent),
    status: fortress.status,
    xray: new Map(
      fortress.instances.map((inst) => [inst.id, [inst.node, inst.lastEdge]]),
    ),
  };
}

/**
 * Step until termination or the tick budget runs out. `inputSource` maps
 * the fortress to this tick's inputs (see autoRandomInputs). Returns the
 * termination reason, or null when the budget was exhausted first.
 */
export function run(
  fortress: Fortress,
  maxTicks: number,
  inputSource: ((fortress: Fortress) => Inputs) | null = null,
): TerminationReason | null {
  while (fortress.status === null && fortress.tick < maxTicks) {
    const inputs = inputSource !== null ? inputSource(fortress) : null;
    step(fortress, inputs);
  }
  return fortress.status;
}

/** Class definition, active node, and last edge taken for one instance. */
export function xray(
  fortress: Fortress,
  instanceId: number,
): [EntityClass, number, [number, number] | null] {
  const inst = fortress.instances.find((i) => i.id === instanceId);
  if (!inst) {
    throw new UnknownInstance(`no instance with id ${instanceId}`);
  }
  return [fortress.classes.get(inst.char)!, inst.node, inst.lastEdge];
}
