#!/usr/bin/env python3
"""Regenerates the golden fixtures under tests/fixtures/.

The web client re-implements the fortress engine, compiler, and RNG so it
can simulate in the browser. These fixtures pin the server's observable
behavior (event logs, per-tick FSM state, compiler diagnostics, canonical
serialization, raw RNG streams) so the test suite can prove the two
runtimes never drift. Run from the frontend directory:

    python3 tools/make_fixtures.py
"""

import json
import random
import sys
from pathlib import Path

from fortress import dsl, engine
from fortress.rng import Rng

HERE = Path(__file__).resolve().parent
FIXTURES = HERE.parent / "tests" / "fixtures"
GOLDEN_DIR = HERE.parent.parent / "tests" / "golden"

COLLECT = """\
FORTRESS "meadow walk"
SEED 11

ENTITY L "walker"
  NODE 0 idle
  NODE 1 move
  NODE 2 take $
  EDGE 0-1 step 2
  EDGE 1-2 touch $
  EDGE 2-1 none
END

ENTITY k "sprout"
  NODE 0 idle
  NODE 1 transform $
  EDGE 0-1 nextTo L
END

ENTITY $ "seed"
  NODE 0 idle
END

MAP
################
#..............#
#..............#
#....L...k.....#
#..k.......k...#
#..............#
#..............#
################
END
"""

PURSUIT = """\
FORTRESS "hunt"
SEED 5

ENTITY L "runner"
  NODE 0 move
  NODE 1 die
  EDGE 0-1 touch B
END

ENTITY B "hunter"
  NODE 0 move
  NODE 1 chase L
  EDGE 0-1 within L 5
  EDGE 1-0 none
END

MAP
################
#..............#
#..L...........#
#..............#
#..............#
#............B.#
#..............#
################
END
"""

KINDS = """\
FORTRESS "workout"
SEED 77

ENTITY c "splitter"
  NODE 0 idle
  NODE 1 clone
  EDGE 0-1 step 5
  EDGE 1-0 none
END

ENTITY t "eater"
  NODE 0 take c
END

ENTITY p "shover"
  NODE 0 push b
END

ENTITY b "crate"
  NODE 0 move_wall w
END

ENTITY w "post"
  NODE 0 idle
END

ENTITY h "tracker"
  NODE 0 chase p
END

ENTITY d "mayfly"
  NODE 0 idle
  NODE 1 die
  EDGE 0-1 step 10
END

ENTITY a "planter"
  NODE 0 add w
  NODE 1 idle
  EDGE 0-1 step 1
END

MAP
################
#c.....t......h#
#..............#
#...p.b....w...#
#..............#
#....d....a....#
#..............#
################
END
"""

PLAYERS = """\
FORTRESS "controls"
SEED 31

ENTITY P "pilot"
  NODE 0 player_move
  NODE 1 idle
  EDGE 0-1 step 7
  EDGE 1-0 step 2
END

ENTITY Q "shover"
  NODE 0 player_push B
END

ENTITY R "mason"
  NODE 0 player_move_wall B
END

ENTITY B "crate"
  NODE 0 idle
END

ENTITY m "drifter"
  NODE 0 move
END

MAP
################
#P.........m...#
#....B.........#
#..Q.B.........#
#..............#
#......R.B.....#
#..............#
################
END
"""

AUTO = """\
FORTRESS "autopilot"
SEED 99

ENTITY P "pilot"
  NODE 0 player_move
END

ENTITY k "shadow"
  NODE 0 idle
  NODE 1 chase P
  EDGE 0-1 within P 4
  EDGE 1-0 none
END

MAP
################
#P.............#
#..............#
#..............#
#..............#
#..............#
#.............k#
################
END
"""

EXTINCT = """\
FORTRESS "brief"
SEED 1

ENTITY d "mayfly"
  NODE 0 move
  NODE 1 die
  EDGE 0-1 step 3
END

MAP
################
#d.............#
#..............#
#.......d......#
#..............#
#............d.#
#..............#
################
END
"""

OVERPOP = """\
FORTRESS "bloom"
SEED 2

ENTITY c "spore"
  NODE 0 clone
END

MAP
################
#c.............#
#..............#
#..............#
#..............#
#..............#
#..............#
################
END
"""

INACTIVE = """\
FORTRESS "still"
SEED 3

ENTITY w "statue"
  NODE 0 idle
END

MAP
################
#..............#
#..............#
#......w.......#
#..............#
#..............#
#..............#
################
END
"""

VALID_DOC = """\
FORTRESS "Meadow"
AUTHOR "zelda"
SEED 99
NOTES "grass grows"

# sprouts turn into seeds when the walker comes close
ENTITY L "walker"
  NODE 0 move
  NODE 1 take $
  EDGE 0-1 touch $
  EDGE 1-0 none
END

ENTITY k "sprout"
  NODE 0 idle
  NODE 1 transform $
  EDGE 0-1 nextTo L
END

ENTITY $ "seed"
  NODE 0 idle
END

MAP
################
#L.............#
#....k.........#
#..........k...#
#..$...........#
#..............#
#.........$...$#
################
END
"""


def xray_state(fortress):
    return {
        str(inst.id): [inst.node, list(inst.last_edge) if inst.last_edge else None]
        for inst in fortress.instances
    }


def run_case(name, text, ticks, mode):
    fortress = engine.init(dsl.parse(text))
    script = {}
    rnd = random.Random(4242)
    trace = []
    for _ in range(ticks):
        if fortress.status is not None:
            break
        if mode == "auto":
            inputs = engine.auto_random_inputs(fortress)
        elif mode == "script":
            tick_inputs = {}
            for inst in fortress.instances:
                if fortress.is_player_controlled(inst):
                    tick_inputs[inst.id] = rnd.choice(
                        ["UP", "DOWN", "LEFT", "RIGHT", "SKIP"]
                    )
            if tick_inputs:
                script[str(fortress.tick + 1)] = {
                    str(k): v for k, v in tick_inputs.items()
                }
            inputs = {
                k: engine.PlayerInput(v) for k, v in tick_inputs.items()
            }
        else:
            inputs = None
        report = engine.step(fortress, inputs)
        trace.append({"tick": report.tick, "state": xray_state(fortress)})
    return {
        "name": name,
        "text": dsl.serialize(dsl.parse(text)),
        "mode": mode,
        "max_ticks": ticks,
        "script": script,
        "final_tick": fortress.tick,
        "status": fortress.status.value if fortress.status else None,
        "events": [e.line() for e in fortress.log],
        "xray": trace,
    }


def engine_cases():
    cases = [
        run_case("collect", COLLECT, 300, "none"),
        run_case("pursuit", PURSUIT, 300, "none"),
        run_case("kinds", KINDS, 200, "none"),
        run_case("players", PLAYERS, 200, "script"),
        run_case("auto", AUTO, 150, "auto"),
        run_case("extinct", EXTINCT, 50, "none"),
        run_case("overpop", OVERPOP, 50, "none"),
        run_case("inactive", INACTIVE, 150, "none"),
    ]
    (FIXTURES / "engine-cases.json").write_text(
        json.dumps(cases, indent=1, sort_keys=True) + "\n"
    )
    for case in cases:
        print(
            f"  {case['name']}: {case['final_tick']} ticks, "
            f"{len(case['events'])} events, status={case['status']}"
        )


def golden_errors():
    entries = []
    for path in sorted(GOLDEN_DIR.glob("*.fort")):
        text = path.read_text()
        errors = dsl.validate_text(text)
        entries.append(
            {
                "file": path.name,
                "text": text,
                "errors": [
                    {"code": e.code.value, "line": e.line, "message": e.message}
                    for e in errors
                ],
            }
        )
    (FIXTURES / "golden-errors.json").write_text(
        json.dumps(entries, indent=1, sort_keys=True) + "\n"
    )
    print(f"  {len(entries)} golden error files")


def roundtrips():
    entries = []
    for name, text in [
        ("collect", COLLECT),
        ("pursuit", PURSUIT),
        ("kinds", KINDS),
        ("players", PLAYERS),
        ("auto", AUTO),
        ("valid-doc", VALID_DOC),
    ]:
        entries.append(
            {
                "name": name,
                "input": text,
                "canonical": dsl.serialize(dsl.parse(text)),
            }
        )
    (FIXTURES / "roundtrip.json").write_text(
        json.dumps(entries, indent=1, sort_keys=True) + "\n"
    )
    print(f"  {len(entries)} round-trip documents")


def rng_streams():
    entries = []
    for seed in [0, 1, 12345, (1 << 64) - 1]:
        rng = Rng(seed)
        raw = [str(rng.next_u64()) for _ in range(8)]
        rng = Rng(seed)
        mod5 = [rng.below(5) for _ in range(16)]
        rng = Rng(seed)
        mod4 = [rng.below(4) for _ in range(16)]
        entries.append({"seed": str(seed), "next_u64": raw, "mod5": mod5, "mod4": mod4})
    (FIXTURES / "rng-streams.json").write_text(
        json.dumps(entries, indent=1, sort_keys=True) + "\n"
    )
    print(f"  {len(entries)} rng streams")


def main():
    FIXTURES.mkdir(parents=True, exist_ok=True)
    print("engine cases:")
    engine_cases()
    print("compiler goldens:")
    golden_errors()
    print("round trips:")
    roundtrips()
    print("rng streams:")
    rng_streams()


if __name__ == "__main__":
    sys.exit(main())
