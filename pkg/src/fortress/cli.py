"""Command line interface.

    fortress validate PATH
    fortress run PATH [--seed S] [--ticks N] [--log FILE] [--auto-player] [--tps X]
    fortress play PATH --inputs SCRIPT [options]
    fortress play PATH --interactive [--scheme arrows|wasd|vi] [options]
    fortress stats JOURNAL
    fortress serve [--port P] [--store JOURNAL] [--ui DIR]

Exit codes: 0 success, 1 domain error (bad definition or script),
2 environment error (unreadable file, port already bound).

Input scripts are plain text, one press per line:

    T3 0 UP
    T3 1 SKIP
    T5 0 RIGHT

Ticks must be non-decreasing and every id must exist in the starting
fortress.  Unscripted player entities skip their turn.
"""

from __future__ import annotations

import argparse
import re
import sys
import time

from . import dsl, engine
from .engine import PlayerInput
from .model import FLOOR_CHAR, Fortress, GRID_HEIGHT, GRID_WIDTH, is_wall
from .store import FortressStore

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_ENVIRONMENT = 2

# Keyboard bindings per control scheme (plus the scheme-independent
# P = pause/resume and R = reset).  Arrow keys arrive as ANSI sequences.
SCHEMES: dict[str, dict[str, PlayerInput]] = {
    "arrows": {
        "\x1b[A": PlayerInput.UP,
        "\x1b[B": PlayerInput.DOWN,
        "\x1b[D": PlayerInput.LEFT,
        "\x1b[C": PlayerInput.RIGHT,
        " ": PlayerInput.SKIP,
    },
    "wasd": {
        "w": PlayerInput.UP,
        "s": PlayerInput.DOWN,
        "a": PlayerInput.LEFT,
        "d": PlayerInput.RIGHT,
        "f": PlayerInput.SKIP,
    },
    "vi": {
        "k": PlayerInput.UP,
        "j": PlayerInput.DOWN,
        "h": PlayerInput.LEFT,
        "l": PlayerInput.RIGHT,
        ";": PlayerInput.SKIP,
    },
}

PAUSE_KEY = "p"
RESET_KEY = "r"


def scheme_bindings(name: str) -> dict[str, PlayerInput]:
    return dict(SCHEMES[name])


# -- Rendering ----------------------------------------------------------------


def render(fortress: Fortress, mark_players: bool = False) -> str:
    """ASCII map; with `mark_players` every cell is three wide and
    player-controlled entities get surrounding brackets."""
    grid = [
        [("#" if is_wall(x, y) else FLOOR_CHAR) for x in range(GRID_WIDTH)]
        for y in range(GRID_HEIGHT)
    ]
    marked: set[tuple[int, int]] = set()
    for inst in sorted(fortress.instances, key=lambda i: i.id):
        grid[inst.y][inst.x] = inst.char
        if fortress.is_player_controlled(inst):
            marked.add((inst.x, inst.y))
        else:
            marked.discard((inst.x, inst.y))
    if not mark_players:
        return "\n".join("".join(row) for row in grid)
    return "\n".join(
        "".join(
            f"[{ch}]" if (x, y) in marked else f" {ch} "
            for x, ch in enumerate(row)
        )
        for y, row in enumerate(grid)
    )


# -- Input scripts --------------------------------------------------------------


class ScriptError(Exception):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


_SCRIPT_LINE = re.compile(r"T([0-9]+)\s+([0-9]+)\s+(UP|DOWN|LEFT|RIGHT|SKIP)\Z")


def load_input_script(text: str, valid_ids: set[int]) -> dict[int, engine.Inputs]:
    """Parse a script into tick -> {instance id -> input}."""
    script: dict[int, engine.Inputs] = {}
    last_tick = 0
    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        match = _SCRIPT_LINE.match(line)
        if match is None:
            raise ScriptError(lineno, f"malformed input line {line!r}")
        tick, instance_id = int(match.group(1)), int(match.group(2))
        if tick < last_tick:
            raise ScriptError(lineno, "ticks must be non-decreasing")
        last_tick = tick
        if instance_id not in valid_ids:
            raise ScriptError(lineno, f"unknown instance id {instance_id}")
        script.setdefault(tick, {})[instance_id] = PlayerInput(match.group(3))
    return script


class ScriptInputs:
    def __init__(self, script: dict[int, engine.Inputs]):
        self.script = script
        self.last_tick = max(script, default=0)

    def __call__(self, fortress: Fortress) -> engine.Inputs:
        return self.script.get(fortress.tick + 1, {})


# -- Commands --------------------------------------------------------------------


def _read_file(path: str) -> str | None:
    try:
        with open(path, encoding="utf-8") as handle:
            return handle.read()
    except OSError as exc:
        print(f"cannot read {path}: {exc}", file=sys.stderr)
        return None


def cmd_validate(args: argparse.Namespace) -> int:
    text = _read_file(args.path)
    if text is None:
        return EXIT_ENVIRONMENT
    errors = dsl.validate_text(text)
    for error in errors:
        print(f"{args.path}:{error.line}: {error.code.value} {error.message}")
    return EXIT_OK if not errors else EXIT_DOMAIN


def _load_fortress(path: str) -> Fortress | int:
    text = _read_file(path)
    if text is None:
        return EXIT_ENVIRONMENT
    try:
        return dsl.parse(text)
    except dsl.CompileFailure as failure:
        for error in failure.errors:
            print(f"{path}:{error.line}: {error.code.value} {error.message}")
        return EXIT_DOMAIN


def _finish(fortress: Fortress, reason, log_path: str | None, mark: bool) -> int:
    print(render(fortress, mark_players=mark))
    if reason is not None:
        print(f"terminated: {reason.value}")
    else:
        print("max ticks reached")
    print(f"ticks: {fortress.tick}")
    if log_path is not None:
        try:
            with open(log_path, "w", encoding="utf-8") as handle:
                for event in fortress.log:
                    handle.write(event.line() + "\n")
        except OSError as exc:
            print(f"cannot write {log_path}: {exc}", file=sys.stderr)
            return EXIT_ENVIRONMENT
    return EXIT_OK


def _paced_run(fortress: Fortress, max_ticks: int, source, tps: float | None):
    if not tps:
        return engine.run(fortress, max_ticks, source)
    while fortress.status is None and fortress.tick < max_ticks:
        inputs = source(fortress) if source is not None else None
        engine.step(fortress, inputs)
        time.sleep(1.0 / tps)
    return fortress, fortress.status


def cmd_run(args: argparse.Namespace) -> int:
    definition = _load_fortress(args.path)
    if isinstance(definition, int):
        return definition
    fortress = engine.init(definition, seed_override=args.seed)
    source = None
    if args.auto_player and fortress.has_player:
        source = engine.auto_random_inputs
    fortress, reason = _paced_run(fortress, args.ticks, source, args.tps)
    return _finish(fortress, reason, args.log, mark=False)


def cmd_play(args: argparse.Namespace) -> int:
    definition = _load_fortress(args.path)
    if isinstance(definition, int):
        return definition
    fortress = engine.init(definition, seed_override=args.seed)

    if not fortress.has_player:
        print(
            "warning: no player-controlled entity, running autonomously",
            file=sys.stderr,
        )
        fortress, reason = _paced_run(fortress, args.ticks, None, args.tps)
        return _finish(fortress, reason, args.log, mark=False)

    if args.interactive:
        return _interactive(definition, fortress, args)

    text = _read_file(args.inputs)
    if text is None:
        return EXIT_ENVIRONMENT
    try:
        script = load_input_script(text, {inst.id for inst in fortress.instances})
    except ScriptError as exc:
        print(f"{args.inputs}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    source = ScriptInputs(script)
    max_ticks = max(args.ticks, source.last_tick)
    fortress, reason = _paced_run(fortress, max_ticks, source, args.tps)
    return _finish(fortress, reason, args.log, mark=True)


def _interactive(definition: Fortress, fortress: Fortress, args) -> int:
    try:
        import termios  # noqa: F401
        import tty  # noqa: F401
    except ImportError:
        print("interactive mode needs a POSIX terminal", file=sys.stderr)
        return EXIT_ENVIRONMENT
    if not sys.stdin.isatty():
        print("interactive mode needs a terminal; use --inputs", file=sys.stderr)
        return EXIT_ENVIRONMENT
    bindings = scheme_bindings(args.scheme)
    paused = False
    print("\x1b[2J", end="")
    while fortress.status is None and fortress.tick < args.ticks:
        print("\x1b[H", end="")
        print(render(fortress, mark_players=True))
        print(f"tick {fortress.tick}  [{args.scheme}] P pause R reset Q quit")
        key = _read_key()
        if key is None or key.lower() == "q":
            break
        if key.lower() == PAUSE_KEY:
            paused = not paused
            continue
        if key.lower() == RESET_KEY:
            fortress = engine.init(definition, seed_override=args.seed)
            continue
        if paused:
            continue
        pressed = bindings.get(key, bindings.get(key.lower(), PlayerInput.SKIP))
        inputs = {
            inst.id: pressed
            for inst in fortress.instances
            if fortress.is_player_controlled(inst)
        }
        engine.step(fortress, inputs)
    return _finish(fortress, fortress.status, args.log, mark=True)


def _read_key() -> str | None:
    import termios
    import tty

    fd = sys.stdin.fileno()
    old = termios.tcgetattr(fd)
    try:
        tty.setraw(fd)
        ch = sys.stdin.read(1)
        if ch == "\x1b":
            ch += sys.stdin.read(2)
        return ch
    except (OSError, EOFError):
        return None
    finally:
        termios.tcsetattr(fd, termios.TCSADRAIN, old)


def cmd_stats(args: argparse.Namespace) -> int:
    try:
        store = FortressStore(args.journal)
    except OSError as exc:
        print(f"cannot read {args.journal}: {exc}", file=sys.stderr)
        return EXIT_ENVIRONMENT
    counts = store.node_stats()
    print(f"{'action':<18}{'count':>6}")
    for kind, count in sorted(counts.items(), key=lambda kv: (-kv[1], kv[0])):
        print(f"{kind:<18}{count:>6}")
    return EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    import socket

    import uvicorn

    from .service import create_app, serve_app

    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    try:
        probe.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        probe.bind((args.host, args.port))
    except OSError as exc:
        print(f"cannot bind {args.host}:{args.port}: {exc}", file=sys.stderr)
        return EXIT_ENVIRONMENT
    finally:
        probe.close()

    app = serve_app(create_app(FortressStore(args.store)), args.ui)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


# -- Entry point -------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fortress", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_validate = sub.add_parser("validate", help="check a definition file")
    p_validate.add_argument("path")
    p_validate.set_defaults(func=cmd_validate)

    def sim_options(p):
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--ticks", type=int, default=1000)
        p.add_argument("--log", default=None, help="write the event log here")
        p.add_argument("--tps", type=float, default=None, help="pacing only")

    p_run = sub.add_parser("run", help="run a fortress autonomously")
    p_run.add_argument("path")
    sim_options(p_run)
    p_run.add_argument(
        "--auto-player",
        action="store_true",
        help="feed player entities uniformly random inputs",
    )
    p_run.set_defaults(func=cmd_run)

    p_play = sub.add_parser("play", help="drive player entities")
    p_play.add_argument("path")
    sim_options(p_play)
    mode = p_play.add_mutually_exclusive_group(required=True)
    mode.add_argument("--inputs", help="input script file")
    mode.add_argument("--interactive", action="store_true")
    p_play.add_argument("--scheme", choices=sorted(SCHEMES), default="arrows")
    p_play.set_defaults(func=cmd_play)

    p_stats = sub.add_parser("stats", help="action-kind frequency table")
    p_stats.add_argument("journal")
    p_stats.set_defaults(func=cmd_stats)

    p_serve = sub.add_parser("serve", help="run the sharing service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.add_argument("--store", default="fortress.journal")
    p_serve.add_argument("--ui", default=None, help="static web UI directory")
    p_serve.set_defaults(func=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
