"""Deterministic multi-agent FSM simulator on a walled 16x8 grid.

Subpackages: `model` (types and validation), `engine` (tick loop),
`dsl` (text format), `store` (sharing service state), `service` (HTTP
API), `cli` (command line).
"""

from .model import (
    Action,
    ActionKind,
    Condition,
    ConditionKind,
    EntityClass,
    EntityInstance,
    Fortress,
    FsmEdge,
    FsmNode,
    SeedSpec,
    SimEvent,
    TerminationReason,
    Verb,
)

__all__ = [
    "Action",
    "ActionKind",
    "Condition",
    "ConditionKind",
    "EntityClass",
    "EntityInstance",
    "Fortress",
    "FsmEdge",
    "FsmNode",
    "SeedSpec",
    "SimEvent",
    "TerminationReason",
    "Verb",
]
