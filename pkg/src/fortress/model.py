"""Core domain types for fortress worlds.

A fortress is a fixed 16x8 grid: a one-cell wall ring around a 14x6
interior.  Entity classes carry a finite-state machine whose nodes hold
actions and whose edges hold trigger conditions.  Instances reference a
class by character and track only runtime state (position, active node,
dwell counter).

This module owns the vocabulary (action kinds, condition kinds, event
verbs, termination reasons) and the structural validation rules.  It has
no opinion about time; the tick loop lives in `fortress.engine`.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .rng import Rng

# -- Grid geometry ----------------------------------------------------------

GRID_WIDTH = 16
GRID_HEIGHT = 8
INTERIOR_WIDTH = GRID_WIDTH - 2
INTERIOR_HEIGHT = GRID_HEIGHT - 2
INTERIOR_CELLS = INTERIOR_WIDTH * INTERIOR_HEIGHT

# Population above twice the interior capacity ends the run.
OVERPOPULATION_LIMIT = 2 * INTERIOR_CELLS

# Ticks without any world-changing event before the run is called stale.
INACTIVITY_LIMIT = 100

WALL_CHAR = "#"
FLOOR_CHAR = "."


def in_bounds(x: int, y: int) -> bool:
    return 0 <= x < GRID_WIDTH and 0 <= y < GRID_HEIGHT


def is_wall(x: int, y: int) -> bool:
    """Border ring cells; interiors never contain walls."""
    return x <= 0 or y <= 0 or x >= GRID_WIDTH - 1 or y >= GRID_HEIGHT - 1


def interior_cells() -> list[tuple[int, int]]:
    return [
        (x, y)
        for y in range(1, GRID_HEIGHT - 1)
        for x in range(1, GRID_WIDTH - 1)
    ]


def manhattan(a: tuple[int, int], b: tuple[int, int]) -> int:
    return abs(a[0] - b[0]) + abs(a[1] - b[1])


# -- Action vocabulary ------------------------------------------------------


class ActionKind(enum.Enum):
    IDLE = "idle"
    MOVE = "move"
    DIE = "die"
    CLONE = "clone"
    PUSH = "push"
    TAKE = "take"
    CHASE = "chase"
    ADD = "add"
    TRANSFORM = "transform"
    MOVE_WALL = "move_wall"
    PLAYER_MOVE = "player_move"
    PLAYER_PUSH = "player_push"
    PLAYER_MOVE_WALL = "player_move_wall"


# Kinds that carry exactly one target character.
TARGETED_ACTIONS = frozenset(
    {
        ActionKind.PUSH,
        ActionKind.TAKE,
        ActionKind.CHASE,
        ActionKind.ADD,
        ActionKind.TRANSFORM,
        ActionKind.MOVE_WALL,
        ActionKind.PLAYER_PUSH,
        ActionKind.PLAYER_MOVE_WALL,
    }
)

# Kinds driven by keyboard input instead of the world RNG.
PLAYER_ACTIONS = frozenset(
    {
        ActionKind.PLAYER_MOVE,
        ActionKind.PLAYER_PUSH,
        ActionKind.PLAYER_MOVE_WALL,
    }
)


@dataclass(frozen=True)
class Action:
    kind: ActionKind
    target: str | None = None

    @property
    def signature(self) -> tuple[ActionKind, str | None]:
        return (self.kind, self.target)


# -- Condition vocabulary ---------------------------------------------------


class ConditionKind(enum.Enum):
    # Declaration order is the priority order, lowest first.
    NONE = "none"
    STEP = "step"
    WITHIN = "within"
    NEXT_TO = "nextTo"
    TOUCH = "touch"


_PRIORITY = {kind: rank for rank, kind in enumerate(ConditionKind)}


@dataclass(frozen=True)
class Condition:
    kind: ConditionKind
    target: str | None = None
    count: int | None = None

    @property
    def priority(self) -> int:
        return _PRIORITY[self.kind]


# -- FSM structure ----------------------------------------------------------


@dataclass(frozen=True)
class FsmNode:
    index: int
    action: Action


@dataclass(frozen=True)
class FsmEdge:
    src: int
    dst: int
    condition: Condition


@dataclass
class EntityClass:
    char: str
    name: str
    nodes: list[FsmNode] = field(default_factory=list)
    edges: list[FsmEdge] = field(default_factory=list)

    @property
    def has_player(self) -> bool:
        return any(n.action.kind in PLAYER_ACTIONS for n in self.nodes)

    def action_at(self, index: int) -> Action:
        for node in self.nodes:
            if node.index == index:
                return node.action
        raise KeyError(index)

    def edges_from(self, index: int) -> list[FsmEdge]:
        return [e for e in self.edges if e.src == index]


@dataclass
class EntityInstance:
    id: int
    char: str
    x: int
    y: int
    node: int = 0
    dwell: int = 0
    last_edge: tuple[int, int] | None = None

    @property
    def pos(self) -> tuple[int, int]:
        return (self.x, self.y)


# -- Seeds, events, termination ---------------------------------------------


@dataclass(frozen=True)
class SeedSpec:
    """Fixed seed when `value` is set; fresh random seed per reset otherwise."""

    value: int | None = None

    @property
    def is_random(self) -> bool:
        return self.value is None


class Verb(enum.Enum):
    MOVED = "moved"
    BLOCKED = "blocked"
    SPAWNED = "spawned"
    REMOVED = "removed"
    TRANSFORMED = "transformed"
    PUSHED = "pushed"
    TOOK = "took"
    TRANSITIONED = "transitioned"
    IDLED = "idled"
    INPUT = "input"


# Verbs that count as world activity and reset the inactivity clock.
ACTIVITY_VERBS = frozenset(
    {Verb.MOVED, Verb.SPAWNED, Verb.REMOVED, Verb.TRANSFORMED, Verb.PUSHED, Verb.TOOK}
)


@dataclass(frozen=True)
class SimEvent:
    tick: int
    actor_id: int
    actor_char: str
    verb: Verb
    detail: str
    x: int
    y: int

    def line(self) -> str:
        """Wire format, stable byte for byte so logs can be hashed."""
        return (
            f"T{self.tick} #{self.actor_id}:{self.actor_char} "
            f"{self.verb.value} {self.detail} @({self.x},{self.y})"
        )


class TerminationReason(enum.Enum):
    EXTINCTION = "extinction"
    OVERPOPULATION = "overpopulation"
    INACTIVITY = "inactivity"


# -- Fortress ----------------------------------------------------------------


@dataclass
class Fortress:
    name: str
    author: str = ""
    notes: str = ""
    seed_spec: SeedSpec = SeedSpec(None)
    classes: dict[str, EntityClass] = field(default_factory=dict)
    instances: list[EntityInstance] = field(default_factory=list)
    tick: int = 0
    rng: Rng = field(default_factory=Rng)
    last_activity_tick: int = 0
    status: TerminationReason | None = None
    log: list[SimEvent] = field(default_factory=list)
    next_id: int = 0

    @property
    def running(self) -> bool:
        return self.status is None

    def instance(self, instance_id: int) -> EntityInstance | None:
        for inst in self.instances:
            if inst.id == instance_id:
                return inst
        return None

    def is_player_controlled(self, inst: EntityInstance) -> bool:
        cls = self.classes.get(inst.char)
        return cls is not None and cls.has_player

    @property
    def has_player(self) -> bool:
        return any(cls.has_player for cls in self.classes.values())


# -- Structural validation ---------------------------------------------------


@dataclass(frozen=True)
class StructuralError:
    code: str
    message: str
    node: int | None = None
    edge: int | None = None
    instance: int | None = None

    def __str__(self) -> str:
        return f"{self.code}: {self.message}"


def _reserved_char(char: str) -> bool:
    if len(char) != 1:
        return True
    if char in (WALL_CHAR, FLOOR_CHAR):
        return True
    # Printable ASCII only; rules out whitespace and control characters.
    return not (0x21 <= ord(char) <= 0x7E)


def _check_action(action: Action, where: str, node: int) -> list[StructuralError]:
    errors = []
    if action.kind in TARGETED_ACTIONS:
        if action.target is None or len(action.target) != 1:
            errors.append(
                StructuralError(
                    "MissingTarget",
                    f"{where}: action {action.kind.value} needs a target character",
                    node=node,
                )
            )
    elif action.target is not None:
        errors.append(
            StructuralError(
                "UnexpectedTarget",
                f"{where}: action {action.kind.value} takes no target",
                node=node,
            )
        )
    return errors


def _check_condition(cond: Condition, where: str, edge: int) -> list[StructuralError]:
    errors = []
    needs_target = cond.kind in (
        ConditionKind.WITHIN,
        ConditionKind.NEXT_TO,
        ConditionKind.TOUCH,
    )
    needs_count = cond.kind in (ConditionKind.STEP, ConditionKind.WITHIN)
    if needs_target and (cond.target is None or len(cond.target) != 1):
        errors.append(
            StructuralError(
                "MissingTarget",
                f"{where}: condition {cond.kind.value} needs a target character",
                edge=edge,
            )
        )
    if not needs_target and cond.target is not None:
        errors.append(
            StructuralError(
                "UnexpectedTarget",
                f"{where}: condition {cond.kind.value} takes no target",
                edge=edge,
            )
        )
    if needs_count:
        if cond.count is None or cond.count < 1:
            errors.append(
                StructuralError(
                    "BadCount",
                    f"{where}: condition {cond.kind.value} needs a count of at least 1",
                    edge=edge,
                )
            )
    elif cond.count is not None:
        errors.append(
            StructuralError(
                "BadCount",
                f"{where}: condition {cond.kind.value} takes no count",
                edge=edge,
            )
        )
    return errors


def validate_class(cls: EntityClass) -> list[StructuralError]:
    """All structural rules for one entity class; empty list means valid."""
    errors: list[StructuralError] = []
    if _reserved_char(cls.char):
        errors.append(
            StructuralError(
                "ReservedCharacter",
                f"character {cls.char!r} is reserved or unprintable",
            )
        )

    if not cls.nodes:
        errors.append(StructuralError("NoNodes", "entity declares no nodes"))
        return errors

    indices = [n.index for n in cls.nodes]
    if sorted(indices) != list(range(len(indices))):
        errors.append(
            StructuralError(
                "BadNodeIndex",
                f"node indices {sorted(indices)} must be exactly 0..{len(indices) - 1}",
            )
        )

    seen_signatures: dict[tuple, int] = {}
    for node in cls.nodes:
        errors.extend(_check_action(node.action, f"node {node.index}", node.index))
        sig = node.action.signature
        if sig in seen_signatures:
            errors.append(
                StructuralError(
                    "DuplicateActionSignature",
                    f"node {node.index} repeats action of node {seen_signatures[sig]}",
                    node=node.index,
                )
            )
        else:
            seen_signatures[sig] = node.index

    valid_indices = set(indices)
    seen_pairs: set[tuple[int, int]] = set()
    for i, edge in enumerate(cls.edges):
        errors.extend(_check_condition(edge.condition, f"edge {edge.src}-{edge.dst}", i))
        if edge.src not in valid_indices or edge.dst not in valid_indices:
            errors.append(
                StructuralError(
                    "BadNodeIndex",
                    f"edge {edge.src}-{edge.dst} references a missing node",
                    edge=i,
                )
            )
        pair = (edge.src, edge.dst)
        if pair in seen_pairs:
            errors.append(
                StructuralError(
                    "DuplicateDirectedEdge",
                    f"edge {edge.src}-{edge.dst} appears more than once",
                    edge=i,
                )
            )
        seen_pairs.add(pair)
    return errors


def validate_fortress(fortress: Fortress) -> list[StructuralError]:
    """Class rules plus cross-class and placement rules."""
    errors: list[StructuralError] = []
    defined = set(fortress.classes)

    for char, cls in fortress.classes.items():
        if char != cls.char:
            errors.append(
                StructuralError(
                    "UnknownClass",
                    f"class map key {char!r} does not match class char {cls.char!r}",
                )
            )
        errors.extend(validate_class(cls))
        for node in cls.nodes:
            target = node.action.target
            if target is not None and target not in defined:
                errors.append(
                    StructuralError(
                        "UndefinedTarget",
                        f"class {cls.char!r} node {node.index} targets "
                        f"undefined character {target!r}",
                        node=node.index,
                    )
                )
        for i, edge in enumerate(cls.edges):
            target = edge.condition.target
            if target is not None and target not in defined:
                errors.append(
                    StructuralError(
                        "UndefinedTarget",
                        f"class {cls.char!r} edge {edge.src}-{edge.dst} targets "
                        f"undefined character {target!r}",
                        edge=i,
                    )
                )

    for inst in fortress.instances:
        if inst.char not in defined:
            errors.append(
                StructuralError(
                    "UnknownClass",
                    f"instance at ({inst.x},{inst.y}) uses undefined "
                    f"character {inst.char!r}",
                    instance=inst.id,
                )
            )
        if is_wall(inst.x, inst.y) or not in_bounds(inst.x, inst.y):
            errors.append(
                StructuralError(
                    "BadPosition",
                    f"instance at ({inst.x},{inst.y}) is outside the interior",
                    instance=inst.id,
                )
            )

    if len(fortress.instances) > OVERPOPULATION_LIMIT:
        errors.append(
            StructuralError(
                "TooManyInstances",
                f"{len(fortress.instances)} initial instances exceed "
                f"the limit of {OVERPOPULATION_LIMIT}",
            )
        )
    return errors
