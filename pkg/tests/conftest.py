"""Shared builders for tests plus the acceptance summary hook.

`random_definition` produces structurally valid fortress definitions
from a seeded `random.Random`, so large randomized suites are themselves
reproducible.
"""

from __future__ import annotations

import random

import pytest

from fortress.model import (
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
    TARGETED_ACTIONS,
    interior_cells,
)

# -- Builders -----------------------------------------------------------------


def make_class(
    char: str,
    actions: list[Action],
    edges: list[tuple[int, int, Condition]] = (),
    name: str | None = None,
) -> EntityClass:
    return EntityClass(
        char=char,
        name=name if name is not None else f"class {char}",
        nodes=[FsmNode(i, action) for i, action in enumerate(actions)],
        edges=[FsmEdge(src, dst, cond) for src, dst, cond in edges],
    )


def definition(
    classes: list[EntityClass],
    placements: list[tuple[str, int, int]],
    name: str = "test",
    seed: int | None = 1,
) -> Fortress:
    instances = [
        EntityInstance(id=i, char=char, x=x, y=y)
        for i, (char, x, y) in enumerate(placements)
    ]
    return Fortress(
        name=name,
        seed_spec=SeedSpec(seed),
        classes={cls.char: cls for cls in classes},
        instances=instances,
        next_id=len(instances),
    )


# -- Random definitions --------------------------------------------------------

_CHAR_POOL = (
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789"
    "$&+*@!%^?<>=~:"
)

_COUNT_CONDITIONS = {ConditionKind.STEP, ConditionKind.WITHIN}
_TARGET_CONDITIONS = {
    ConditionKind.WITHIN,
    ConditionKind.NEXT_TO,
    ConditionKind.TOUCH,
}


def _random_action(rnd: random.Random, chars: list[str], kinds) -> Action:
    kind = rnd.choice(kinds)
    if kind in TARGETED_ACTIONS:
        return Action(kind, rnd.choice(chars))
    return Action(kind)


def _random_condition(rnd: random.Random, chars: list[str]) -> Condition:
    kind = rnd.choice(list(ConditionKind))
    target = rnd.choice(chars) if kind in _TARGET_CONDITIONS else None
    count = rnd.randint(1, 6) if kind in _COUNT_CONDITIONS else None
    return Condition(kind, target, count)


def random_definition(
    rnd: random.Random,
    allow_player: bool = True,
    max_instances: int = 12,
    fancy_strings: bool = False,
) -> Fortress:
    kinds = list(ActionKind)
    if not allow_player:
        kinds = [k for k in kinds if not k.value.startswith("player")]

    chars = rnd.sample(_CHAR_POOL, rnd.randint(1, 4))
    classes = []
    for char in chars:
        signatures: set = set()
        actions: list[Action] = []
        for _ in range(rnd.randint(1, 5)):
            for _attempt in range(40):
                action = _random_action(rnd, chars, kinds)
                if action.signature not in signatures:
                    signatures.add(action.signature)
                    actions.append(action)
                    break
        n = len(actions)
        pairs = [(i, j) for i in range(n) for j in range(n)]
        rnd.shuffle(pairs)
        # canonical edge order so serialize round-trips to an equal value
        chosen = sorted(pairs[: rnd.randint(0, min(6, len(pairs)))])
        edges = [(src, dst, _random_condition(rnd, chars)) for src, dst in chosen]
        classes.append(make_class(char, actions, edges))

    # reading order so ids match what parse() would assign
    cells = sorted(
        rnd.sample(interior_cells(), rnd.randint(1, max_instances)),
        key=lambda cell: (cell[1], cell[0]),
    )
    placements = [(rnd.choice(chars), x, y) for x, y in cells]

    def text(base: str) -> str:
        if fancy_strings and rnd.random() < 0.5:
            return base + rnd.choice(['"quoted"', "back\\slash", "bl ank", "#hash"])
        return base

    fortress = definition(
        classes,
        placements,
        name=text(f"random-{rnd.randrange(10_000)}"),
        seed=rnd.randrange(1 << 64) if rnd.random() < 0.8 else None,
    )
    fortress.author = text("someone") if rnd.random() < 0.5 else ""
    fortress.notes = text("notes") if rnd.random() < 0.5 else ""
    return fortress


# -- Acceptance summary ----------------------------------------------------------

_acceptance: dict[str, str] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    if report.when == "call":
        _acceptance[name] = report.outcome
    elif report.when == "setup" and report.outcome != "passed":
        _acceptance[name] = report.outcome


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _acceptance:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for name, outcome in _acceptance.items():
        flag = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{flag}  {name}")
