"""Core type invariants and structural validation."""

from __future__ import annotations

import random

import pytest
from hypothesis import given, strategies as st

from conftest import definition, make_class, random_definition
from fortress.model import (
    Action,
    ActionKind,
    Condition,
    ConditionKind,
    EntityClass,
    EntityInstance,
    FsmEdge,
    FsmNode,
    OVERPOPULATION_LIMIT,
    SimEvent,
    Verb,
    interior_cells,
    is_wall,
    manhattan,
    validate_class,
    validate_fortress,
)

# -- Geometry -------------------------------------------------------------------


def test_grid_constants():
    assert len(interior_cells()) == 84
    assert OVERPOPULATION_LIMIT == 168


def test_wall_ring():
    for x in range(16):
        assert is_wall(x, 0) and is_wall(x, 7)
    for y in range(8):
        assert is_wall(0, y) and is_wall(15, y)
    for x, y in interior_cells():
        assert not is_wall(x, y)


@given(
    st.tuples(st.integers(-20, 20), st.integers(-20, 20)),
    st.tuples(st.integers(-20, 20), st.integers(-20, 20)),
)
def test_manhattan_is_a_metric(a, b):
    assert manhattan(a, b) == manhattan(b, a) >= 0
    assert manhattan(a, a) == 0
    assert manhattan(a, b) == abs(a[0] - b[0]) + abs(a[1] - b[1])


# -- Condition priority ------------------------------------------------------------


def test_priority_total_order():
    ranked = sorted(ConditionKind, key=lambda k: Condition(k).priority)
    assert ranked == [
        ConditionKind.NONE,
        ConditionKind.STEP,
        ConditionKind.WITHIN,
        ConditionKind.NEXT_TO,
        ConditionKind.TOUCH,
    ]
    priorities = {Condition(k).priority for k in ConditionKind}
    assert len(priorities) == len(list(ConditionKind))


# -- Event wire format ---------------------------------------------------------------


def test_event_line_format():
    event = SimEvent(3, 7, "L", Verb.MOVED, "E", 4, 5)
    assert event.line() == "T3 #7:L moved E @(4,5)"


# -- validate_class -------------------------------------------------------------------


def _valid_class() -> EntityClass:
    return make_class(
        "A",
        [Action(ActionKind.IDLE), Action(ActionKind.MOVE)],
        [(0, 1, Condition(ConditionKind.STEP, count=2))],
    )


def test_valid_class_passes():
    assert validate_class(_valid_class()) == []


@pytest.mark.parametrize("char", ["#", ".", " ", "\t", "é", "ab", ""])
def test_reserved_characters(char):
    cls = _valid_class()
    cls.char = char
    codes = [e.code for e in validate_class(cls)]
    assert "ReservedCharacter" in codes


def test_no_nodes():
    cls = EntityClass("A", "empty")
    assert [e.code for e in validate_class(cls)] == ["NoNodes"]


def test_node_indices_must_be_dense_from_zero():
    cls = EntityClass(
        "A", "gap", nodes=[FsmNode(0, Action(ActionKind.IDLE)), FsmNode(2, Action(ActionKind.MOVE))]
    )
    assert any(e.code == "BadNodeIndex" for e in validate_class(cls))
    dup = EntityClass(
        "A", "dup", nodes=[FsmNode(0, Action(ActionKind.IDLE)), FsmNode(0, Action(ActionKind.MOVE))]
    )
    assert any(e.code == "BadNodeIndex" for e in validate_class(dup))


def test_duplicate_action_signature_flags_second_node():
    cls = make_class(
        "A",
        [Action(ActionKind.PUSH, "A"), Action(ActionKind.PUSH, "A")],
    )
    errors = [e for e in validate_class(cls) if e.code == "DuplicateActionSignature"]
    assert len(errors) == 1 and errors[0].node == 1


def test_same_kind_different_target_is_allowed():
    cls = make_class("A", [Action(ActionKind.PUSH, "A"), Action(ActionKind.PUSH, "B")])
    assert validate_class(cls) == []


def test_edge_endpoints_must_exist():
    cls = make_class(
        "A",
        [Action(ActionKind.IDLE)],
        [(0, 3, Condition(ConditionKind.NONE))],
    )
    assert any(e.code == "BadNodeIndex" and e.edge == 0 for e in validate_class(cls))


def test_duplicate_directed_edge_rejected_but_reverse_ok():
    cls = make_class(
        "A",
        [Action(ActionKind.IDLE), Action(ActionKind.MOVE)],
        [
            (0, 1, Condition(ConditionKind.NONE)),
            (1, 0, Condition(ConditionKind.STEP, count=1)),
        ],
    )
    assert validate_class(cls) == []
    cls.edges.append(FsmEdge(0, 1, Condition(ConditionKind.STEP, count=3)))
    assert any(e.code == "DuplicateDirectedEdge" for e in validate_class(cls))


def test_self_loop_is_legal():
    cls = make_class(
        "A",
        [Action(ActionKind.CLONE)],
        [(0, 0, Condition(ConditionKind.NONE))],
    )
    assert validate_class(cls) == []


def test_action_target_arity():
    missing = make_class("A", [Action(ActionKind.PUSH)])
    assert any(e.code == "MissingTarget" for e in validate_class(missing))
    extra = make_class("A", [Action(ActionKind.MOVE, "B")])
    assert any(e.code == "UnexpectedTarget" for e in validate_class(extra))


def test_condition_arity():
    bad_count = make_class(
        "A",
        [Action(ActionKind.IDLE)],
        [(0, 0, Condition(ConditionKind.STEP, count=0))],
    )
    assert any(e.code == "BadCount" for e in validate_class(bad_count))
    bad_target = make_class(
        "A",
        [Action(ActionKind.IDLE)],
        [(0, 0, Condition(ConditionKind.TOUCH))],
    )
    assert any(e.code == "MissingTarget" for e in validate_class(bad_target))
    stray_count = make_class(
        "A",
        [Action(ActionKind.IDLE)],
        [(0, 0, Condition(ConditionKind.TOUCH, target="A", count=2))],
    )
    assert any(e.code == "BadCount" for e in validate_class(stray_count))


# -- validate_fortress ------------------------------------------------------------------


def test_undefined_target_is_a_fortress_level_error():
    cls = make_class("A", [Action(ActionKind.TAKE, "Z")])
    assert validate_class(cls) == []
    fortress = definition([cls], [("A", 3, 3)])
    assert any(e.code == "UndefinedTarget" for e in validate_fortress(fortress))


def test_own_char_target_is_legal():
    cls = make_class(
        "A",
        [Action(ActionKind.CHASE, "A")],
        [(0, 0, Condition(ConditionKind.TOUCH, target="A"))],
    )
    assert validate_fortress(definition([cls], [("A", 2, 2)])) == []


def test_instance_checks():
    cls = make_class("A", [Action(ActionKind.IDLE)])
    ghost = definition([cls], [("B", 3, 3)])
    assert any(e.code == "UnknownClass" for e in validate_fortress(ghost))
    walled = definition([cls], [("A", 0, 3)])
    assert any(e.code == "BadPosition" for e in validate_fortress(walled))


def test_too_many_instances():
    cls = make_class("A", [Action(ActionKind.IDLE)])
    fortress = definition([cls], [])
    fortress.instances = [
        EntityInstance(id=i, char="A", x=1 + i % 14, y=1 + (i // 14) % 6)
        for i in range(OVERPOPULATION_LIMIT + 1)
    ]
    assert any(e.code == "TooManyInstances" for e in validate_fortress(fortress))


def test_random_definitions_validate():
    for seed in range(30):
        fortress = random_definition(random.Random(seed))
        assert validate_fortress(fortress) == []


def test_has_player_derivation():
    autonomous = make_class("A", [Action(ActionKind.MOVE)])
    driven = make_class("P", [Action(ActionKind.PLAYER_MOVE)])
    fortress = definition([autonomous, driven], [("A", 2, 2), ("P", 3, 3)])
    assert fortress.has_player
    assert not definition([autonomous], [("A", 2, 2)]).has_player
    inst = fortress.instances[1]
    assert fortress.is_player_controlled(inst)
    assert not fortress.is_player_controlled(fortress.instances[0])
