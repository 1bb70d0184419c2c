"""Tick loop semantics, checked against independent oracles.

Movement oracles reimplement the RNG consumption by hand so that a
regression in draw order or direction mapping cannot hide.
"""

from __future__ import annotations

import random

import pytest

from conftest import definition, make_class, random_definition
from fortress.engine import (
    AlreadyTerminated,
    InvalidDefinition,
    PlayerInput,
    UnknownInstance,
    auto_random_inputs,
    check_termination,
    eval_condition,
    init,
    run,
    step,
    xray,
)
from fortress.model import (
    Action,
    ActionKind,
    Condition,
    ConditionKind,
    TerminationReason,
    Verb,
    manhattan,
)

IDLE = Action(ActionKind.IDLE)
MOVE = Action(ActionKind.MOVE)
NONE_COND = Condition(ConditionKind.NONE)


def events_of(fortress, verb, actor_id=None):
    return [
        e
        for e in fortress.log
        if e.verb is verb and (actor_id is None or e.actor_id == actor_id)
    ]


# -- init -----------------------------------------------------------------------


def test_init_assigns_ids_in_reading_order():
    cls = make_class("A", [IDLE])
    cls_b = make_class("B", [IDLE])
    fortress = init(
        definition(
            [cls, cls_b],
            [("B", 5, 4), ("A", 2, 1), ("A", 9, 4), ("B", 1, 2)],
        )
    )
    got = [(inst.char, inst.x, inst.y) for inst in fortress.instances]
    assert got == [("A", 2, 1), ("B", 1, 2), ("B", 5, 4), ("A", 9, 4)]
    assert [inst.id for inst in fortress.instances] == [0, 1, 2, 3]
    assert all(inst.node == 0 and inst.dwell == 0 for inst in fortress.instances)
    assert fortress.tick == 0 and fortress.status is None


def test_init_rejects_invalid_definitions():
    bad = definition([make_class("A", [Action(ActionKind.TAKE, "Z")])], [("A", 3, 3)])
    with pytest.raises(InvalidDefinition):
        init(bad)


def test_init_seed_resolution():
    fortress = definition([make_class("A", [IDLE])], [("A", 3, 3)], seed=42)
    assert init(fortress).rng.state == 42
    assert init(fortress, seed_override=7).rng.state == 7
    fortress.seed_spec = type(fortress.seed_spec)(None)
    seeds = {init(fortress).rng.state for _ in range(4)}
    assert len(seeds) > 1  # fresh random seed per reset


def test_empty_interior_goes_extinct_on_first_step():
    fortress = init(definition([make_class("A", [IDLE])], []))
    assert fortress.status is None
    report = step(fortress)
    assert report.status is TerminationReason.EXTINCTION
    assert fortress.tick == 1


# -- conditions -------------------------------------------------------------------


def _pair(cond, positions):
    """Fortress with actor A at positions[0] and targets T elsewhere;
    returns (fortress, actor)."""
    a = make_class("A", [IDLE], [(0, 0, cond)])
    t = make_class("T", [IDLE])
    placements = [("A", *positions[0])] + [("T", x, y) for x, y in positions[1:]]
    fortress = init(definition([a, t], placements))
    return fortress, next(i for i in fortress.instances if i.char == "A")


def test_condition_none_and_step():
    fortress, actor = _pair(NONE_COND, [(3, 3)])
    assert eval_condition(NONE_COND, actor, fortress)
    actor.dwell = 2
    assert not eval_condition(Condition(ConditionKind.STEP, count=3), actor, fortress)
    actor.dwell = 3
    assert eval_condition(Condition(ConditionKind.STEP, count=3), actor, fortress)


def test_within_counts_distance_inclusively():
    cond = Condition(ConditionKind.WITHIN, "T", 3)
    fortress, actor = _pair(cond, [(3, 3), (6, 3)])
    assert eval_condition(cond, actor, fortress)
    fortress, actor = _pair(cond, [(3, 3), (7, 3)])
    assert not eval_condition(cond, actor, fortress)
    fortress, actor = _pair(cond, [(3, 3), (3, 3)])
    assert eval_condition(cond, actor, fortress)


def test_next_to_is_exactly_orthogonal_distance_one():
    cond = Condition(ConditionKind.NEXT_TO, "T")
    # Brute force all 8 neighbours: only the 4 orthogonal ones count.
    for dx in (-1, 0, 1):
        for dy in (-1, 0, 1):
            if dx == 0 and dy == 0:
                continue
            fortress, actor = _pair(cond, [(5, 3), (5 + dx, 3 + dy)])
            expected = abs(dx) + abs(dy) == 1
            assert eval_condition(cond, actor, fortress) == expected
    fortress, actor = _pair(cond, [(5, 3), (5, 3)])
    assert not eval_condition(cond, actor, fortress)


def test_touch_requires_same_cell():
    cond = Condition(ConditionKind.TOUCH, "T")
    fortress, actor = _pair(cond, [(5, 3), (5, 3)])
    assert eval_condition(cond, actor, fortress)
    fortress, actor = _pair(cond, [(5, 3), (6, 3)])
    assert not eval_condition(cond, actor, fortress)


def test_character_searches_exclude_self_but_not_twins():
    cond = Condition(ConditionKind.TOUCH, "A")
    alone = init(
        definition([make_class("A", [IDLE], [(0, 0, cond)])], [("A", 3, 3)])
    )
    assert not eval_condition(cond, alone.instances[0], alone)
    twins = init(
        definition(
            [make_class("A", [IDLE], [(0, 0, cond)])],
            [("A", 3, 3), ("A", 3, 3)],
        )
    )
    assert eval_condition(cond, twins.instances[0], twins)


# -- transitions --------------------------------------------------------------------


def test_priority_order_touch_beats_everything():
    edges = [
        (0, 1, NONE_COND),
        (0, 2, Condition(ConditionKind.WITHIN, "T", 5)),
        (0, 3, Condition(ConditionKind.NEXT_TO, "T")),
        (0, 4, Condition(ConditionKind.TOUCH, "T")),
    ]
    actions = [
        IDLE,
        MOVE,
        Action(ActionKind.CHASE, "T"),
        Action(ActionKind.TAKE, "T"),
        Action(ActionKind.PUSH, "T"),
    ]
    a = make_class("A", actions, edges)
    t = make_class("T", [IDLE])
    fortress = init(definition([a, t], [("A", 3, 3), ("T", 3, 3), ("T", 4, 3)]))
    step(fortress)
    taken = events_of(fortress, Verb.TRANSITIONED, actor_id=0)
    assert [e.detail for e in taken] == ["0->4"]


def test_priority_tie_breaks_to_lowest_target_index():
    edges = [
        (0, 2, Condition(ConditionKind.TOUCH, "T")),
        (0, 1, Condition(ConditionKind.TOUCH, "U")),
    ]
    a = make_class("A", [IDLE, Action(ActionKind.TAKE, "T"), Action(ActionKind.TAKE, "U")], edges)
    t = make_class("T", [IDLE])
    u = make_class("U", [IDLE])
    fortress = init(
        definition([a, t, u], [("A", 3, 3), ("T", 3, 3), ("U", 3, 3)])
    )
    step(fortress)
    assert events_of(fortress, Verb.TRANSITIONED, 0)[0].detail == "0->1"


def test_at_most_one_transition_per_tick():
    # 0 -> 1 -> 2 via always-true edges: two ticks, not one.
    a = make_class(
        "A",
        [IDLE, Action(ActionKind.TAKE, "A"), Action(ActionKind.CHASE, "A")],
        [(0, 1, NONE_COND), (1, 2, NONE_COND)],
    )
    fortress = init(definition([a], [("A", 3, 3)]))
    step(fortress)
    assert fortress.instances[0].node == 1
    step(fortress)
    assert fortress.instances[0].node == 2


def test_step_condition_uses_dwell_not_tick_parity():
    # Self-loop with period 3: fires first at tick 4, then every 3 ticks.
    n = 3
    a = make_class("A", [IDLE], [(0, 0, Condition(ConditionKind.STEP, count=n))])
    fortress = init(definition([a], [("A", 3, 3)]))
    for _ in range(11 * n):
        if fortress.status is None:
            step(fortress)
    fire_ticks = [e.tick for e in events_of(fortress, Verb.TRANSITIONED, 0)]
    assert fire_ticks[0] == n + 1
    assert all(b - a == n for a, b in zip(fire_ticks, fire_ticks[1:]))
    in_window = [t for t in fire_ticks if n + 1 <= t <= 11 * n]
    assert len(in_window) == 10


def test_transition_resets_dwell():
    a = make_class(
        "A",
        [IDLE, Action(ActionKind.TAKE, "A")],
        [(0, 1, Condition(ConditionKind.STEP, count=2)), (1, 0, NONE_COND)],
    )
    fortress = init(definition([a], [("A", 3, 3)]))
    inst = fortress.instances[0]
    step(fortress)  # tick 1: no fire (dwell 0), dwell -> 1
    step(fortress)  # tick 2: no fire (dwell 1), dwell -> 2
    assert inst.node == 0
    step(fortress)  # tick 3: fire, dwell resets then increments
    assert inst.node == 1 and inst.dwell == 1


# -- actions ---------------------------------------------------------------------


class OracleRng:
    """Test-side reimplementation of the engine's draw discipline."""

    def __init__(self, seed):
        self.state = seed

    def next(self):
        self.state = (self.state + 0x9E3779B97F4A7C15) % 2**64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) % 2**64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) % 2**64
        return z ^ (z >> 31)

    def direction(self):
        return [(0, -1), (1, 0), (0, 1), (-1, 0)][self.next() % 4]


def test_move_follows_rng_and_walls_block():
    a = make_class("A", [MOVE])
    fortress = init(definition([a], [("A", 1, 1)]), seed_override=99)
    oracle = OracleRng(99)
    x, y = 1, 1
    for _ in range(60):
        step(fortress)
        dx, dy = oracle.direction()
        nx, ny = x + dx, y + dy
        if 1 <= nx <= 14 and 1 <= ny <= 6:
            x, y = nx, ny
    assert fortress.instances[0].pos == (x, y)
    # Blocked attempts leave the mover where it stood, inside the walls.
    for event in events_of(fortress, Verb.BLOCKED, 0):
        assert 1 <= event.x <= 14 and 1 <= event.y <= 6


def test_blocked_move_is_not_activity():
    # Two idlers plus one wall-hugger that always tries to move north.
    fortress = init(
        definition([make_class("A", [MOVE])], [("A", 3, 1)]), seed_override=0
    )
    # Replace RNG draws with a stub that always points north into the wall.
    class NorthRng:
        state = 0

        def below(self, n):
            return 0

    fortress.rng = NorthRng()
    for _ in range(100):
        step(fortress)
    assert fortress.status is TerminationReason.INACTIVITY
    assert fortress.tick == 100
    assert len(events_of(fortress, Verb.BLOCKED, 0)) == 100


def test_entities_do_not_block_movement():
    class EastRng:
        def below(self, n):
            return 1  # always east

    a = make_class("A", [MOVE])
    b = make_class("B", [IDLE])
    fortress = init(definition([a, b], [("A", 3, 3), ("B", 4, 3)]))
    fortress.rng = EastRng()
    step(fortress)
    assert fortress.instances[0].pos == (4, 3)  # walked onto B's cell


def test_die_removes_and_counts_as_activity():
    a = make_class("A", [Action(ActionKind.DIE)])
    b = make_class("B", [IDLE])
    fortress = init(definition([a, b], [("A", 3, 3), ("B", 5, 5)]))
    report = step(fortress)
    assert [e.verb for e in report.events if e.actor_id == 0] == [Verb.REMOVED]
    assert len(fortress.instances) == 1
    assert fortress.last_activity_tick == 1


def test_clone_spawns_fresh_id_at_same_cell_and_waits_a_tick():
    a = make_class("A", [Action(ActionKind.CLONE)])
    fortress = init(definition([a], [("A", 4, 4)]))
    report = step(fortress)
    spawned = [e for e in report.events if e.verb is Verb.SPAWNED]
    assert [e.detail for e in spawned] == ["#1:A"]
    assert (spawned[0].x, spawned[0].y) == (4, 4)
    # The newborn did not act on its spawn tick.
    assert not [e for e in report.events if e.actor_id == 1 and e.verb is not Verb.SPAWNED]
    report2 = step(fortress)
    assert [e.detail for e in report2.events if e.verb is Verb.SPAWNED] == [
        "#2:A",
        "#3:A",
    ]


def test_add_spawns_target_class():
    a = make_class("A", [Action(ActionKind.ADD, "B")])
    b = make_class("B", [IDLE])
    fortress = init(definition([a, b], [("A", 4, 4)]))
    step(fortress)
    chars = sorted(inst.char for inst in fortress.instances)
    assert chars == ["A", "B"]
    newborn = fortress.instances[1]
    assert newborn.pos == (4, 4) and newborn.node == 0


def test_transform_keeps_id_and_position_resets_fsm():
    a = make_class(
        "A",
        [IDLE, Action(ActionKind.TRANSFORM, "B")],
        [(0, 1, NONE_COND)],
    )
    b = make_class("B", [IDLE])
    fortress = init(definition([a, b], [("A", 6, 2)]))
    inst = fortress.instances[0]
    step(fortress)
    assert inst.char == "B" and inst.id == 0 and inst.pos == (6, 2)
    assert inst.node == 0 and inst.last_edge is None
    transformed = events_of(fortress, Verb.TRANSFORMED, 0)
    assert [e.detail for e in transformed] == ["A->B"]
    # Next tick it runs B's machine (idle, no transform available).
    step(fortress)
    assert inst.char == "B"


def test_take_removes_nearest_with_lowest_id_tiebreak():
    a = make_class("A", [Action(ActionKind.TAKE, "T")])
    t = make_class("T", [IDLE])
    # Targets at distance 2 on both sides; the earlier reading-order id wins.
    fortress = init(
        definition([a, t], [("T", 3, 2), ("A", 5, 2), ("T", 7, 2), ("T", 9, 2)])
    )
    step(fortress)
    took = events_of(fortress, Verb.TOOK, 1)
    assert [e.detail for e in took] == ["#0:T"]
    removed = events_of(fortress, Verb.REMOVED)
    assert [(e.actor_id, e.detail) for e in removed] == [(0, "by #1")]
    assert {inst.id for inst in fortress.instances} == {1, 2, 3}


def test_take_works_at_any_distance_and_idles_without_targets():
    a = make_class("A", [Action(ActionKind.TAKE, "T")])
    t = make_class("T", [IDLE])
    fortress = init(definition([a, t], [("A", 1, 1), ("T", 14, 6)]))
    step(fortress)
    assert events_of(fortress, Verb.TOOK, 0)
    step(fortress)
    assert events_of(fortress, Verb.IDLED, 0)


def test_chase_prefers_larger_axis_then_horizontal():
    cases = [
        ((3, 3), (6, 4), (4, 3)),  # |dx|>|dy| -> east
        ((3, 3), (4, 6), (3, 4)),  # |dy|>|dx| -> south
        ((3, 3), (5, 5), (4, 3)),  # tie -> horizontal
        ((6, 4), (2, 4), (5, 4)),  # pure west
        ((5, 5), (5, 2), (5, 4)),  # pure north
    ]
    for start, prey_at, expected in cases:
        a = make_class("A", [Action(ActionKind.CHASE, "T")])
        t = make_class("T", [IDLE])
        fortress = init(definition([a, t], [("A", *start), ("T", *prey_at)]))
        actor = next(i for i in fortress.instances if i.char == "A")
        before = manhattan(actor.pos, prey_at)
        step(fortress)
        assert actor.pos == expected, (start, prey_at)
        assert manhattan(actor.pos, prey_at) == before - 1


def test_chase_co_located_idles():
    a = make_class("A", [Action(ActionKind.CHASE, "T")])
    t = make_class("T", [IDLE])
    fortress = init(definition([a, t], [("A", 3, 3), ("T", 3, 3)]))
    step(fortress)
    assert events_of(fortress, Verb.IDLED, 0)
    assert fortress.instances[0].pos == (3, 3)


def test_push_moves_occupants_beyond():
    class EastRng:
        def below(self, n):
            return 1

    a = make_class("A", [Action(ActionKind.PUSH, "T")])
    t = make_class("T", [IDLE])
    fortress = init(
        definition([a, t], [("A", 4, 3), ("T", 5, 3), ("T", 5, 3)])
    )
    fortress.rng = EastRng()
    report = step(fortress)
    pusher = next(i for i in fortress.instances if i.char == "A")
    assert pusher.pos == (5, 3)
    assert all(
        inst.pos == (6, 3) for inst in fortress.instances if inst.char == "T"
    )
    verbs = [e.verb for e in report.events if e.actor_id == pusher.id]
    assert verbs == [Verb.PUSHED, Verb.PUSHED, Verb.MOVED]


def test_push_against_wall_blocks_everything():
    class EastRng:
        def below(self, n):
            return 1

    a = make_class("A", [Action(ActionKind.PUSH, "T")])
    t = make_class("T", [IDLE])
    fortress = init(definition([a, t], [("A", 13, 3), ("T", 14, 3)]))
    fortress.rng = EastRng()
    step(fortress)
    assert fortress.instances[0].pos == (13, 3)
    assert fortress.instances[1].pos == (14, 3)
    assert events_of(fortress, Verb.BLOCKED, 0)


def test_push_without_target_in_dest_behaves_as_move():
    class EastRng:
        def below(self, n):
            return 1

    a = make_class("A", [Action(ActionKind.PUSH, "T")])
    t = make_class("T", [IDLE])
    u = make_class("U", [IDLE])
    fortress = init(
        definition([a, t, u], [("A", 4, 3), ("U", 5, 3), ("T", 9, 6)])
    )
    fortress.rng = EastRng()
    step(fortress)
    pusher = next(i for i in fortress.instances if i.char == "A")
    assert pusher.pos == (5, 3)  # walked straight onto U's cell
    bystander = next(i for i in fortress.instances if i.char == "U")
    assert bystander.pos == (5, 3)


def test_move_wall_blocked_by_target_class_only():
    class EastRng:
        def below(self, n):
            return 1

    a = make_class("A", [Action(ActionKind.MOVE_WALL, "T")])
    t = make_class("T", [IDLE])
    u = make_class("U", [IDLE])
    blocked = init(definition([a, t, u], [("A", 4, 3), ("T", 5, 3)]))
    blocked.rng = EastRng()
    step(blocked)
    assert blocked.instances[0].pos == (4, 3)
    assert events_of(blocked, Verb.BLOCKED, 0)

    free = init(definition([a, t, u], [("A", 4, 3), ("U", 5, 3), ("T", 9, 5)]))
    free.rng = EastRng()
    step(free)
    mover = next(i for i in free.instances if i.char == "A")
    assert mover.pos == (5, 3)


# -- player input ------------------------------------------------------------------


def test_player_move_consumes_input_and_logs_it():
    p = make_class("P", [Action(ActionKind.PLAYER_MOVE)])
    fortress = init(definition([p], [("P", 3, 3)]))
    report = step(fortress, inputs={0: PlayerInput.RIGHT})
    assert fortress.instances[0].pos == (4, 3)
    verbs = [(e.verb, e.detail) for e in report.events]
    assert (Verb.INPUT, "RIGHT") in verbs and (Verb.MOVED, "E") in verbs


def test_player_skip_and_missing_input_idle():
    p = make_class("P", [Action(ActionKind.PLAYER_MOVE)])
    fortress = init(definition([p], [("P", 3, 3)]))
    step(fortress, inputs={0: PlayerInput.SKIP})
    step(fortress)  # no input at all
    assert fortress.instances[0].pos == (3, 3)
    assert len(events_of(fortress, Verb.IDLED, 0)) == 2


def test_player_blocked_move_consumes_turn():
    p = make_class("P", [Action(ActionKind.PLAYER_MOVE)])
    fortress = init(definition([p], [("P", 1, 1)]))
    report = step(fortress, inputs={0: PlayerInput.LEFT})
    assert [e.verb for e in report.events if e.actor_id == 0] == [
        Verb.INPUT,
        Verb.BLOCKED,
    ]
    assert fortress.instances[0].pos == (1, 1)


def test_player_push_uses_given_direction():
    p = make_class("P", [Action(ActionKind.PLAYER_PUSH, "T")])
    t = make_class("T", [IDLE])
    fortress = init(definition([p, t], [("P", 4, 3), ("T", 4, 4)]))
    step(fortress, inputs={0: PlayerInput.DOWN})
    pusher = next(i for i in fortress.instances if i.char == "P")
    pushee = next(i for i in fortress.instances if i.char == "T")
    assert pusher.pos == (4, 4) and pushee.pos == (4, 5)


def test_auto_random_inputs_draw_from_world_rng():
    p = make_class("P", [Action(ActionKind.PLAYER_MOVE)])
    fortress = init(definition([p], [("P", 5, 3), ("P", 8, 3)]), seed_override=11)
    oracle = OracleRng(11)
    inputs = auto_random_inputs(fortress)
    order = [
        PlayerInput.UP,
        PlayerInput.DOWN,
        PlayerInput.LEFT,
        PlayerInput.RIGHT,
        PlayerInput.SKIP,
    ]
    assert inputs == {0: order[oracle.next() % 5], 1: order[oracle.next() % 5]}
    assert fortress.rng.state == oracle.state


def test_autonomous_nodes_ignore_inputs():
    a = make_class("A", [MOVE])
    fortress = init(definition([a], [("A", 3, 3)]), seed_override=5)
    twin = init(definition([a], [("A", 3, 3)]), seed_override=5)
    step(fortress, inputs={0: PlayerInput.LEFT})
    step(twin)
    assert fortress.instances[0].pos == twin.instances[0].pos
    assert not events_of(fortress, Verb.INPUT)


# -- update order -----------------------------------------------------------------


def test_entities_act_in_ascending_id_order():
    a = make_class("A", [Action(ActionKind.DIE)])
    b = make_class("B", [MOVE])
    # A (id 0) dies first, then B (id 1) moves; log order shows it.
    fortress = init(definition([a, b], [("A", 2, 1), ("B", 5, 5)]))
    report = step(fortress)
    actor_order = [e.actor_id for e in report.events]
    assert actor_order == sorted(actor_order)


def test_removed_entity_does_not_act_this_tick():
    taker = make_class("A", [Action(ActionKind.TAKE, "B")])
    victim = make_class("B", [MOVE])
    # Taker id 0 (earlier reading order) removes B before B's turn.
    fortress = init(definition([taker, victim], [("A", 2, 1), ("B", 2, 2)]))
    report = step(fortress)
    b_events = [
        e for e in report.events if e.actor_id == 1 and e.verb is not Verb.REMOVED
    ]
    assert b_events == []


# -- termination --------------------------------------------------------------------


def test_all_idle_terminates_inactivity_at_exactly_100():
    fortress = init(definition([make_class("A", [IDLE])], [("A", 3, 3)]))
    fortress, reason = run(fortress, max_ticks=10_000)
    assert reason is TerminationReason.INACTIVITY
    assert fortress.tick == 100


def test_die_at_node_zero_terminates_extinction_at_tick_1():
    fortress = init(definition([make_class("A", [Action(ActionKind.DIE)])], [("A", 3, 3)]))
    fortress, reason = run(fortress, max_ticks=10)
    assert reason is TerminationReason.EXTINCTION
    assert fortress.tick == 1


def test_cloner_population_doubles_until_overpopulation():
    cloner = make_class(
        "A", [Action(ActionKind.CLONE)], [(0, 0, NONE_COND)]
    )
    fortress = init(definition([cloner], [("A", 3, 3)]))
    # Oracle: population doubles per tick from 1; first count over the
    # limit is 256 at tick 8.
    expected_final_tick = 0
    population = 1
    while population <= 168:
        population *= 2
        expected_final_tick += 1
    populations = []
    while fortress.status is None:
        step(fortress)
        populations.append(len(fortress.instances))
    assert fortress.status is TerminationReason.OVERPOPULATION
    assert fortress.tick == expected_final_tick == 8
    assert populations == [2**t for t in range(1, 9)]
    assert populations[-1] == 256 > 168


def test_activity_resets_inactivity_clock():
    # A mover that dies at tick 150 keeps the world busy; the idler then
    # times out 100 ticks later, at 250 rather than 100.
    mover = make_class(
        "M",
        [MOVE, Action(ActionKind.DIE)],
        [(0, 1, Condition(ConditionKind.STEP, count=149))],
    )
    idler = make_class("I", [IDLE])
    fortress = init(
        definition([mover, idler], [("M", 7, 3), ("I", 3, 3)]), seed_override=1234
    )
    fortress, reason = run(fortress, max_ticks=10_000)
    removed = events_of(fortress, Verb.REMOVED)
    assert [e.tick for e in removed] == [150]
    assert reason is TerminationReason.INACTIVITY
    assert fortress.tick == 250


def test_termination_check_order_prefers_extinction():
    fortress = init(definition([make_class("A", [IDLE])], [("A", 3, 3)]))
    fortress.instances.clear()
    fortress.tick = 500  # stale too; extinction must win
    assert check_termination(fortress) is TerminationReason.EXTINCTION


def test_step_after_termination_raises():
    fortress = init(definition([make_class("A", [Action(ActionKind.DIE)])], [("A", 3, 3)]))
    step(fortress)
    with pytest.raises(AlreadyTerminated):
        step(fortress)


# -- xray and reports -----------------------------------------------------------------


def test_xray_reports_class_node_and_sticky_last_edge():
    a = make_class(
        "A",
        [IDLE, Action(ActionKind.TAKE, "A")],
        [(0, 1, Condition(ConditionKind.STEP, count=1))],
    )
    fortress = init(definition([a], [("A", 3, 3)]))
    cls, node, last_edge = xray(fortress, 0)
    assert (cls.char, node, last_edge) == ("A", 0, None)
    step(fortress)  # dwell 0: no fire
    step(fortress)  # dwell 1: fires 0->1
    cls, node, last_edge = xray(fortress, 0)
    assert (node, last_edge) == (1, (0, 1))
    step(fortress)  # no outgoing edges from 1: edge stays sticky
    assert xray(fortress, 0)[1:] == (1, (0, 1))
    with pytest.raises(UnknownInstance):
        xray(fortress, 404)


def test_tick_report_covers_all_live_instances():
    a = make_class("A", [Action(ActionKind.CLONE)])
    fortress = init(definition([a], [("A", 3, 3), ("A", 5, 5)]))
    report = step(fortress)
    assert set(report.xray) == {inst.id for inst in fortress.instances}
    assert report.tick == 1
    assert all(node == 0 for node, _edge in report.xray.values())


# -- run and determinism ---------------------------------------------------------------


def test_run_honours_max_ticks():
    fortress = init(definition([make_class("A", [MOVE])], [("A", 3, 3)]))
    fortress, reason = run(fortress, max_ticks=17)
    assert reason is None and fortress.tick == 17


def test_same_seed_same_log_random_fortresses():
    for case in range(10):
        definition_ = random_definition(random.Random(case), allow_player=True)
        logs = []
        for _ in range(2):
            fortress = init(definition_, seed_override=1000 + case)
            run(fortress, max_ticks=60, input_source=auto_random_inputs)
            logs.append("\n".join(e.line() for e in fortress.log))
        assert logs[0] == logs[1]


def test_positions_stay_on_the_floor_for_random_fortresses():
    for case in range(12):
        definition_ = random_definition(random.Random(1000 + case))
        fortress = init(definition_, seed_override=case)
        while fortress.status is None and fortress.tick < 300:
            step(fortress, {})
        for inst in fortress.instances:
            assert 1 <= inst.x <= 14 and 1 <= inst.y <= 6
