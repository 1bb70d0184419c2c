"""Tick engine: runs entity state machines on a fortress grid.

Update order inside one call to `step`:

1. The tick counter advances.
2. Instances act in ascending id order, using a snapshot of the ids that
   were alive when the tick began.  Instances spawned during the tick
   wait until the next one; instances removed mid-tick are skipped.
3. Each instance first evaluates the outgoing edges of its active node.
   Among satisfied edges the highest-priority condition wins; ties break
   toward the lowest destination node index.  At most one transition per
   tick, and a transition resets the dwell counter.
4. The action of the (possibly new) active node executes.
5. The dwell counter increments.
6. After every instance acted, termination is checked once, in fixed
   order: extinction, overpopulation, inactivity.

All randomness flows through `fortress.rng`, and instances are visited
in id order, so a fixed seed plus a fixed input script reproduces the
event log byte for byte.
"""

from __future__ import annotations

import enum
import secrets
from dataclasses import dataclass, replace

from .model import (
    ACTIVITY_VERBS,
    INACTIVITY_LIMIT,
    OVERPOPULATION_LIMIT,
    PLAYER_ACTIONS,
    Action,
    ActionKind,
    Condition,
    ConditionKind,
    EntityClass,
    EntityInstance,
    Fortress,
    FsmEdge,
    SimEvent,
    TerminationReason,
    Verb,
    is_wall,
    manhattan,
    validate_fortress,
)
from .rng import Rng


class EngineError(Exception):
    pass


class InvalidDefinition(EngineError):
    def __init__(self, errors):
        super().__init__("; ".join(str(e) for e in errors))
        self.errors = list(errors)


class AlreadyTerminated(EngineError):
    pass


class UnknownInstance(EngineError):
    pass


class PlayerInput(enum.Enum):
    UP = "UP"
    DOWN = "DOWN"
    LEFT = "LEFT"
    RIGHT = "RIGHT"
    SKIP = "SKIP"


# RNG direction draws map mod-4 onto this ring; mod-5 adds SKIP for inputs.
DIRECTIONS: tuple[tuple[str, int, int], ...] = (
    ("N", 0, -1),
    ("E", 1, 0),
    ("S", 0, 1),
    ("W", -1, 0),
)

_INPUT_ORDER = (
    PlayerInput.UP,
    PlayerInput.DOWN,
    PlayerInput.LEFT,
    PlayerInput.RIGHT,
    PlayerInput.SKIP,
)

_INPUT_DELTAS = {
    PlayerInput.UP: ("N", 0, -1),
    PlayerInput.DOWN: ("S", 0, 1),
    PlayerInput.LEFT: ("W", -1, 0),
    PlayerInput.RIGHT: ("E", 1, 0),
}

Inputs = dict[int, PlayerInput]


@dataclass(frozen=True)
class TickReport:
    tick: int
    events: tuple[SimEvent, ...]
    status: TerminationReason | None
    xray: dict[int, tuple[int, tuple[int, int] | None]]


# -- Setup --------------------------------------------------------------------


def init(definition: Fortress, seed_override: int | None = None) -> Fortress:
    """Fresh runnable fortress from a definition.

    Instance ids are assigned 0..k-1 in map reading order (top-left to
    bottom-right, row by row).  Everything starts at node 0 with dwell 0
    at tick 0.  Seed resolution: explicit override, then a fixed seed
    spec, then a fresh random seed.
    """
    errors = validate_fortress(definition)
    if errors:
        raise InvalidDefinition(errors)

    if seed_override is not None:
        seed = seed_override
    elif definition.seed_spec.value is not None:
        seed = definition.seed_spec.value
    else:
        seed = secrets.randbits(64)

    ordered = sorted(definition.instances, key=lambda i: (i.y, i.x, i.id))
    instances = [
        EntityInstance(id=n, char=inst.char, x=inst.x, y=inst.y)
        for n, inst in enumerate(ordered)
    ]
    return Fortress(
        name=definition.name,
        author=definition.author,
        notes=definition.notes,
        seed_spec=definition.seed_spec,
        classes=dict(definition.classes),
        instances=instances,
        tick=0,
        rng=Rng(seed),
        last_activity_tick=0,
        status=None,
        log=[],
        next_id=len(instances),
    )


def auto_random_inputs(fortress: Fortress) -> Inputs:
    """One uniformly random input per player-controlled instance.

    Draws come from the fortress RNG in instance id order, so automated
    play is reproducible from the seed alone.
    """
    inputs: Inputs = {}
    for inst in fortress.instances:
        if fortress.is_player_controlled(inst):
            inputs[inst.id] = _INPUT_ORDER[fortress.rng.below(5)]
    return inputs


# -- Conditions ---------------------------------------------------------------


def eval_condition(
    condition: Condition, actor: EntityInstance, fortress: Fortress
) -> bool:
    """Truth of one edge condition for `actor` against the current state.

    The actor never matches a character search against itself; distinct
    instances of its own class still do.
    """
    kind = condition.kind
    if kind is ConditionKind.NONE:
        return True
    if kind is ConditionKind.STEP:
        return actor.dwell >= (condition.count or 0)

    limit = {
        ConditionKind.WITHIN: condition.count or 0,
        ConditionKind.NEXT_TO: 1,
        ConditionKind.TOUCH: 0,
    }[kind]
    exact = kind is not ConditionKind.WITHIN
    for other in fortress.instances:
        if other is actor or other.char != condition.target:
            continue
        dist = manhattan(actor.pos, other.pos)
        if (dist == limit) if exact else (dist <= limit):
            return True
    return False


def _pick_edge(
    cls: EntityClass, actor: EntityInstance, fortress: Fortress
) -> FsmEdge | None:
    best: FsmEdge | None = None
    for edge in cls.edges:
        if edge.src != actor.node:
            continue
        if not eval_condition(edge.condition, actor, fortress):
            continue
        if best is None:
            best = edge
            continue
        if edge.condition.priority > best.condition.priority or (
            edge.condition.priority == best.condition.priority
            and edge.dst < best.dst
        ):
            best = edge
    return best


# -- Actions ------------------------------------------------------------------


def _emit(
    fortress: Fortress,
    actor: EntityInstance,
    verb: Verb,
    detail: str,
    pos: tuple[int, int] | None = None,
) -> None:
    x, y = pos if pos is not None else actor.pos
    fortress.log.append(
        SimEvent(fortress.tick, actor.id, actor.char, verb, detail, x, y)
    )
    if verb in ACTIVITY_VERBS:
        fortress.last_activity_tick = fortress.tick


def _others_of(fortress: Fortress, actor: EntityInstance, char: str):
    return [o for o in fortress.instances if o is not actor and o.char == char]


def _nearest(fortress: Fortress, actor: EntityInstance, char: str):
    candidates = _others_of(fortress, actor, char)
    if not candidates:
        return None
    return min(candidates, key=lambda o: (manhattan(actor.pos, o.pos), o.id))


def _spawn(fortress: Fortress, actor: EntityInstance, char: str) -> None:
    new = EntityInstance(id=fortress.next_id, char=char, x=actor.x, y=actor.y)
    fortress.next_id += 1
    fortress.instances.append(new)
    _emit(fortress, actor, Verb.SPAWNED, f"#{new.id}:{new.char}", new.pos)


def _remove(fortress: Fortress, inst: EntityInstance) -> None:
    fortress.instances.remove(inst)


def _walk(
    fortress: Fortress,
    actor: EntityInstance,
    direction: tuple[str, int, int],
    blocked_by: str | None = None,
) -> None:
    """Shared movement core for move and move_wall."""
    label, dx, dy = direction
    nx, ny = actor.x + dx, actor.y + dy
    blocked = is_wall(nx, ny)
    if not blocked and blocked_by is not None:
        blocked = any(
            o.char == blocked_by and o.pos == (nx, ny)
            for o in fortress.instances
            if o is not actor
        )
    if blocked:
        _emit(fortress, actor, Verb.BLOCKED, label)
        return
    actor.x, actor.y = nx, ny
    _emit(fortress, actor, Verb.MOVED, label)


def _act_push(
    fortress: Fortress,
    actor: EntityInstance,
    target: str,
    direction: tuple[str, int, int],
) -> None:
    label, dx, dy = direction
    dest = (actor.x + dx, actor.y + dy)
    beyond = (actor.x + 2 * dx, actor.y + 2 * dy)
    pushees = [
        o for o in _others_of(fortress, actor, target) if o.pos == dest
    ]
    if not pushees:
        _walk(fortress, actor, direction)
        return
    if is_wall(*beyond):
        _emit(fortress, actor, Verb.BLOCKED, label)
        return
    for o in sorted(pushees, key=lambda o: o.id):
        o.x, o.y = beyond
        _emit(fortress, actor, Verb.PUSHED, f"#{o.id}:{o.char} {label}", beyond)
    actor.x, actor.y = dest
    _emit(fortress, actor, Verb.MOVED, label)


def _act_take(fortress: Fortress, actor: EntityInstance, target: str) -> None:
    victim = _nearest(fortress, actor, target)
    if victim is None:
        _emit(fortress, actor, Verb.IDLED, "-")
        return
    _emit(fortress, actor, Verb.TOOK, f"#{victim.id}:{victim.char}")
    _remove(fortress, victim)
    _emit(fortress, victim, Verb.REMOVED, f"by #{actor.id}", victim.pos)


def _act_chase(fortress: Fortress, actor: EntityInstance, target: str) -> None:
    prey = _nearest(fortress, actor, target)
    if prey is None or prey.pos == actor.pos:
        _emit(fortress, actor, Verb.IDLED, "-")
        return
    dx = prey.x - actor.x
    dy = prey.y - actor.y
    horizontal = ("E", 1, 0) if dx > 0 else ("W", -1, 0)
    vertical = ("S", 0, 1) if dy > 0 else ("N", 0, -1)
    # Larger displacement first; ties prefer the horizontal axis.
    order = [horizontal, vertical] if abs(dx) >= abs(dy) else [vertical, horizontal]
    axis_delta = {horizontal[0]: dx, vertical[0]: dy}
    for label, sx, sy in order:
        if axis_delta[label] == 0:
            continue
        nx, ny = actor.x + sx, actor.y + sy
        if is_wall(nx, ny):
            continue
        actor.x, actor.y = nx, ny
        _emit(fortress, actor, Verb.MOVED, label)
        return
    _emit(fortress, actor, Verb.IDLED, "-")


def _act_transform(fortress: Fortress, actor: EntityInstance, target: str) -> None:
    old = actor.char
    actor.char = target
    actor.node = 0
    actor.dwell = 0
    actor.last_edge = None
    _emit(fortress, actor, Verb.TRANSFORMED, f"{old}->{target}")


def _random_direction(fortress: Fortress) -> tuple[str, int, int]:
    return DIRECTIONS[fortress.rng.below(4)]


def _execute(
    fortress: Fortress,
    actor: EntityInstance,
    action: Action,
    inputs: Inputs,
) -> None:
    kind = action.kind

    if kind in PLAYER_ACTIONS:
        pressed = inputs.get(actor.id, PlayerInput.SKIP)
        _emit(fortress, actor, Verb.INPUT, pressed.value)
        if pressed is PlayerInput.SKIP:
            _emit(fortress, actor, Verb.IDLED, "-")
            return
        direction = _INPUT_DELTAS[pressed]
        if kind is ActionKind.PLAYER_MOVE:
            _walk(fortress, actor, direction)
        elif kind is ActionKind.PLAYER_PUSH:
            _act_push(fortress, actor, action.target or "", direction)
        else:
            _walk(fortress, actor, direction, blocked_by=action.target)
        return

    match kind:
        case ActionKind.IDLE:
            _emit(fortress, actor, Verb.IDLED, "-")
        case ActionKind.MOVE:
            _walk(fortress, actor, _random_direction(fortress))
        case ActionKind.DIE:
            _remove(fortress, actor)
            _emit(fortress, actor, Verb.REMOVED, "die", actor.pos)
        case ActionKind.CLONE:
            _spawn(fortress, actor, actor.char)
        case ActionKind.PUSH:
            _act_push(fortress, actor, action.target or "", _random_direction(fortress))
        case ActionKind.TAKE:
            _act_take(fortress, actor, action.target or "")
        case ActionKind.CHASE:
            _act_chase(fortress, actor, action.target or "")
        case ActionKind.ADD:
            _spawn(fortress, actor, action.target or "")
        case ActionKind.TRANSFORM:
            _act_transform(fortress, actor, action.target or "")
        case ActionKind.MOVE_WALL:
            _walk(
                fortress,
                actor,
                _random_direction(fortress),
                blocked_by=action.target,
            )
        case _:
            raise EngineError(f"unhandled action kind {kind!r}")


# -- Tick loop ----------------------------------------------------------------


def check_termination(fortress: Fortress) -> TerminationReason | None:
    if not fortress.instances:
        return TerminationReason.EXTINCTION
    if len(fortress.instances) > OVERPOPULATION_LIMIT:
        return TerminationReason.OVERPOPULATION
    if fortress.tick - fortress.last_activity_tick >= INACTIVITY_LIMIT:
        return TerminationReason.INACTIVITY
    return None


def step(fortress: Fortress, inputs: Inputs | None = None) -> TickReport:
    """Advance the fortress one tick; see module docstring for ordering."""
    if fortress.status is not None:
        raise AlreadyTerminated(f"fortress already ended: {fortress.status.value}")
    inputs = inputs or {}

    fortress.tick += 1
    first_event = len(fortress.log)
    snapshot = [inst.id for inst in fortress.instances]
    alive = {inst.id: inst for inst in fortress.instances}

    for instance_id in snapshot:
        actor = alive.get(instance_id)
        if actor is None or actor not in fortress.instances:
            continue
        cls = fortress.classes[actor.char]

        edge = _pick_edge(cls, actor, fortress)
        if edge is not None:
            actor.node = edge.dst
            actor.dwell = 0
            actor.last_edge = (edge.src, edge.dst)
            _emit(fortress, actor, Verb.TRANSITIONED, f"{edge.src}->{edge.dst}")

        _execute(fortress, actor, cls.action_at(actor.node), inputs)

        if actor in fortress.instances:
            actor.dwell += 1

    fortress.status = check_termination(fortress)
    return TickReport(
        tick=fortress.tick,
        events=tuple(fortress.log[first_event:]),
        status=fortress.status,
        xray={inst.id: (inst.node, inst.last_edge) for inst in fortress.instances},
    )


def run(
    fortress: Fortress,
    max_ticks: int,
    input_source=None,
) -> tuple[Fortress, TerminationReason | None]:
    """Step until termination or the tick budget runs out.

    `input_source` is a callable mapping the fortress to this tick's
    inputs (see `auto_random_inputs`).  Returns the final fortress and
    the termination reason, or None when the budget was exhausted first.
    """
    while fortress.status is None and fortress.tick < max_ticks:
        inputs = input_source(fortress) if input_source is not None else None
        step(fortress, inputs)
    return fortress, fortress.status


def xray(
    fortress: Fortress, instance_id: int
) -> tuple[EntityClass, int, tuple[int, int] | None]:
    """Class definition, active node, and last edge taken for one instance."""
    inst = fortress.instance(instance_id)
    if inst is None:
        raise UnknownInstance(f"no instance with id {instance_id}")
    return (fortress.classes[inst.char], inst.node, inst.last_edge)
