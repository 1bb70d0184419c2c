"""Fortress definition language: parser, validator, serializer.

The format is line oriented, UTF-8 with LF endings:

    FORTRESS "name"
    AUTHOR "who"            (optional)
    SEED 42                 (or __RANDOM__)
    NOTES "free text"       (optional)

    ENTITY L "Link"
      NODE 0 idle
      NODE 1 move
      EDGE 0-1 step 2
    END

    MAP
    ################
    #..............#   (8 rows of exactly 16 characters)
    ################
    END

Full-line comments start with '#' and are ignored everywhere except
inside the MAP block, where '#' is the wall glyph.  Quoted strings allow
backslash escapes for the quote and the backslash only.

Compilation never raises on malformed input and never stops at the
first problem: every diagnostic carries a 1-based line number and one of
the fifteen stable error codes below, and independent defects yield
independent errors.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field

from .model import (
    GRID_HEIGHT,
    GRID_WIDTH,
    OVERPOPULATION_LIMIT,
    Action,
    ActionKind,
    Condition,
    ConditionKind,
    EntityClass,
    EntityInstance,
    FLOOR_CHAR,
    Fortress,
    FsmEdge,
    FsmNode,
    SeedSpec,
    WALL_CHAR,
    is_wall,
    validate_class,
)


class ErrorCode(enum.Enum):
    UNKNOWN_ACTION = "E001"
    UNKNOWN_CONDITION = "E002"
    DUPLICATE_ACTION_SIGNATURE = "E003"
    UNDEFINED_TARGET_CHARACTER = "E004"
    BAD_NODE_INDEX = "E005"
    DUPLICATE_DIRECTED_EDGE = "E006"
    MAP_DIMENSION_MISMATCH = "E007"
    UNKNOWN_MAP_CHARACTER = "E008"
    BAD_BORDER = "E009"
    BAD_COUNT = "E010"
    RESERVED_CHARACTER = "E011"
    TOO_MANY_INITIAL_ENTITIES = "E012"
    SYNTAX_ERROR = "E013"
    DUPLICATE_ENTITY_CHARACTER = "E014"
    MISSING_SECTION = "E015"


@dataclass(frozen=True)
class CompileError:
    code: ErrorCode
    line: int
    message: str

    def __str__(self) -> str:
        return f"line {self.line}: {self.code.value} {self.message}"


class CompileFailure(Exception):
    def __init__(self, errors: list[CompileError]):
        super().__init__("; ".join(str(e) for e in errors))
        self.errors = errors


_ACTIONS = {kind.value: kind for kind in ActionKind}
_CONDITIONS = {kind.value: kind for kind in ConditionKind}

# Action kinds that take one target character in the text form.
_TARGETED = {
    ActionKind.PUSH,
    ActionKind.TAKE,
    ActionKind.CHASE,
    ActionKind.ADD,
    ActionKind.TRANSFORM,
    ActionKind.MOVE_WALL,
    ActionKind.PLAYER_PUSH,
    ActionKind.PLAYER_MOVE_WALL,
}

_EDGE_SPEC = re.compile(r"([0-9]+)-([0-9]+)\Z")
_INT = re.compile(r"[0-9]+\Z")

_MAX_SEED = 1 << 64


def _parse_int(token: str, limit: int) -> int | None:
    """Plain ASCII decimal within [0, limit); None otherwise."""
    if len(token) > 20 or not _INT.match(token):
        return None
    value = int(token)
    return value if value < limit else None


def _parse_quoted(rest: str) -> str | None:
    """Quoted string with \\" and \\\\ escapes; None when malformed."""
    rest = rest.strip()
    if len(rest) < 2 or rest[0] != '"':
        return None
    out: list[str] = []
    i = 1
    while i < len(rest):
        ch = rest[i]
        if ch == "\\":
            if i + 1 >= len(rest) or rest[i + 1] not in ('"', "\\"):
                return None
            out.append(rest[i + 1])
            i += 2
        elif ch == '"':
            return "".join(out) if rest[i + 1 :].strip() == "" else None
        else:
            out.append(ch)
            i += 1
    return None


def _reserved(char: str) -> bool:
    if char in (WALL_CHAR, FLOOR_CHAR):
        return True
    return not (0x21 <= ord(char) <= 0x7E)


@dataclass
class _Block:
    line: int
    char: str | None = None
    name: str = ""
    # index -> (line, Action or None placeholder for unparseable actions)
    nodes: dict[int, tuple[int, Action | None]] = field(default_factory=dict)
    # (line, src, dst, Condition or None placeholder)
    edges: list[tuple[int, int, int, Condition | None]] = field(default_factory=list)
    pairs: set[tuple[int, int]] = field(default_factory=set)


class _Compiler:
    def __init__(self, text: str):
        self.lines = text.split("\n")
        self.errors: list[CompileError] = []
        self.name: str | None = None
        self.author: str | None = None
        self.notes: str | None = None
        self.seed: SeedSpec | None = None
        self.blocks: list[_Block] = []
        self.current: _Block | None = None
        self.map_line: int | None = None
        self.map_rows: list[tuple[int, str]] = []
        self.in_map = False
        self.map_closed = False

    # -- error helpers --------------------------------------------------

    def err(self, code: ErrorCode, line: int, message: str) -> None:
        self.errors.append(CompileError(code, line, message))

    @property
    def last_line(self) -> int:
        count = len(self.lines)
        if count and self.lines[-1] == "":
            count -= 1  # trailing newline is not a line of its own
        return max(1, count)

    # -- line dispatch --------------------------------------------------

    def compile(self) -> tuple[Fortress | None, list[CompileError]]:
        for lineno, raw in enumerate(self.lines, start=1):
            if self.in_map:
                self.map_row(lineno, raw.rstrip("\r"))
                continue
            stripped = raw.strip()
            if not stripped or stripped.startswith("#"):
                continue
            parts = stripped.split(None, 1)
            keyword = parts[0]
            rest = parts[1].strip() if len(parts) > 1 else ""
            self.directive(lineno, keyword, rest)

        if self.current is not None:
            self.err(
                ErrorCode.SYNTAX_ERROR,
                self.last_line,
                "entity block is not closed with END",
            )
            self.close_block()
        if self.in_map:
            self.err(
                ErrorCode.SYNTAX_ERROR,
                self.last_line,
                "map block is not closed with END",
            )

        self.check_sections()
        classes = self.resolve_classes()
        instances = self.resolve_map(classes)

        if self.errors:
            self.errors.sort(key=lambda e: (e.line, e.code.value))
            return None, self.errors

        fortress = Fortress(
            name=self.name or "",
            author=self.author or "",
            notes=self.notes or "",
            seed_spec=self.seed or SeedSpec(None),
            classes=classes,
            instances=instances,
            next_id=len(instances),
        )
        return fortress, []

    def directive(self, lineno: int, keyword: str, rest: str) -> None:
        if keyword in ("FORTRESS", "AUTHOR", "SEED", "NOTES", "MAP") and (
            self.current is not None
        ):
            self.err(
                ErrorCode.SYNTAX_ERROR,
                lineno,
                f"{keyword} is not allowed inside an entity block",
            )
            return

        match keyword:
            case "FORTRESS":
                self.quoted_directive(lineno, "FORTRESS", rest, "name")
            case "AUTHOR":
                self.quoted_directive(lineno, "AUTHOR", rest, "author")
            case "NOTES":
                self.quoted_directive(lineno, "NOTES", rest, "notes")
            case "SEED":
                self.seed_directive(lineno, rest)
            case "ENTITY":
                self.begin_entity(lineno, rest)
            case "NODE":
                if self.current is None:
                    self.err(ErrorCode.SYNTAX_ERROR, lineno, "NODE outside ENTITY block")
                else:
                    self.node_line(lineno, rest)
            case "EDGE":
                if self.current is None:
                    self.err(ErrorCode.SYNTAX_ERROR, lineno, "EDGE outside ENTITY block")
                else:
                    self.edge_line(lineno, rest)
            case "END":
                if rest:
                    self.err(ErrorCode.SYNTAX_ERROR, lineno, "END takes no arguments")
                if self.current is not None:
                    self.close_block()
                else:
                    self.err(ErrorCode.SYNTAX_ERROR, lineno, "END without an open block")
            case "MAP":
                if rest:
                    self.err(ErrorCode.SYNTAX_ERROR, lineno, "MAP takes no arguments")
                if self.map_line is not None:
                    self.err(ErrorCode.SYNTAX_ERROR, lineno, "duplicate MAP section")
                    return
                self.map_line = lineno
                self.in_map = True
            case _:
                self.err(
                    ErrorCode.SYNTAX_ERROR, lineno, f"unknown keyword {keyword!r}"
                )

    def quoted_directive(self, lineno: int, keyword: str, rest: str, slot: str) -> None:
        value = _parse_quoted(rest)
        if value is None:
            self.err(
                ErrorCode.SYNTAX_ERROR,
                lineno,
                f"{keyword} needs one quoted string",
            )
            return
        if getattr(self, slot) is not None:
            self.err(ErrorCode.SYNTAX_ERROR, lineno, f"duplicate {keyword} line")
            return
        setattr(self, slot, value)

    def seed_directive(self, lineno: int, rest: str) -> None:
        if self.seed is not None:
            self.err(ErrorCode.SYNTAX_ERROR, lineno, "duplicate SEED line")
            return
        tokens = rest.split()
        if len(tokens) != 1:
            self.err(ErrorCode.SYNTAX_ERROR, lineno, "SEED needs exactly one value")
            return
        if tokens[0] == "__RANDOM__":
            self.seed = SeedSpec(None)
            return
        value = _parse_int(tokens[0], _MAX_SEED)
        if value is None:
            self.err(
                ErrorCode.SYNTAX_ERROR,
                lineno,
                "SEED must be an unsigned 64-bit integer or __RANDOM__",
            )
            return
        self.seed = SeedSpec(value)

    # -- entity blocks ----------------------------------------------------

    def begin_entity(self, lineno: int, rest: str) -> None:
        if self.current is not None:
            self.err(
                ErrorCode.SYNTAX_ERROR,
                lineno,
                "ENTITY before the previous block's END",
            )
            self.close_block()
        block = _Block(line=lineno)
        self.current = block
        self.blocks.append(block)

        parts = rest.split(None, 1)
        char_token = parts[0] if parts else ""
        name_part = parts[1] if len(parts) > 1 else ""
        if len(char_token) != 1:
            self.err(
                ErrorCode.SYNTAX_ERROR,
                lineno,
                "ENTITY needs a single character and a quoted name",
            )
            return
        if _reserved(char_token):
            self.err(
                ErrorCode.RESERVED_CHARACTER,
                lineno,
                f"character {char_token!r} is reserved or unprintable",
            )
            return
        name = _parse_quoted(name_part)
        if name is None:
            self.err(ErrorCode.SYNTAX_ERROR, lineno, "ENTITY name must be quoted")
            return
        block.char = char_token
        block.name = name

    def node_line(self, lineno: int, rest: str) -> None:
        block = self.current
        assert block is not None
        tokens = rest.split()
        if len(tokens) < 2:
            self.err(ErrorCode.SYNTAX_ERROR, lineno, "NODE needs an index and an action")
            return
        index = _parse_int(tokens[0], 1_000_000)
        if index is None:
            self.err(
                ErrorCode.SYNTAX_ERROR,
                lineno,
                "node index must be a non-negative integer",
            )
            return
        if index in block.nodes:
            self.err(
                ErrorCode.BAD_NODE_INDEX,
                lineno,
                f"node index {index} is already declared",
            )
            return

        action: Action | None = None
        kind = _ACTIONS.get(tokens[1])
        if kind is None:
            self.err(ErrorCode.UNKNOWN_ACTION, lineno, f"unknown action {tokens[1]!r}")
        elif kind in _TARGETED:
            if len(tokens) != 3 or len(tokens[2]) != 1:
                self.err(
                    ErrorCode.SYNTAX_ERROR,
                    lineno,
                    f"action {kind.value} needs exactly one target character",
                )
            else:
                action = Action(kind, tokens[2])
        else:
            if len(tokens) != 2:
                self.err(
                    ErrorCode.SYNTAX_ERROR,
                    lineno,
                    f"action {kind.value} takes no target",
                )
            else:
                action = Action(kind)
        # Record the index even for broken actions so that edges and the
        # contiguity check do not cascade extra errors.
        block.nodes[index] = (lineno, action)

    def edge_line(self, lineno: int, rest: str) -> None:
        block = self.current
        assert block is not None
        tokens = rest.split()
        if not tokens or not _EDGE_SPEC.match(tokens[0]):
            self.err(
                ErrorCode.SYNTAX_ERROR,
                lineno,
                "EDGE needs endpoints in the form <from>-<to>",
            )
            return
        src_s, dst_s = tokens[0].split("-")
        if len(src_s) > 9 or len(dst_s) > 9:
            self.err(ErrorCode.SYNTAX_ERROR, lineno, "edge endpoint out of range")
            return
        src, dst = int(src_s), int(dst_s)

        if len(tokens) < 2:
            self.err(ErrorCode.SYNTAX_ERROR, lineno, "EDGE needs a condition")
            return

        condition: Condition | None = None
        kind = _CONDITIONS.get(tokens[1])
        if kind is None:
            self.err(
                ErrorCode.UNKNOWN_CONDITION, lineno, f"unknown condition {tokens[1]!r}"
            )
        else:
            condition = self.parse_condition(lineno, kind, tokens[2:])

        if (src, dst) in block.pairs:
            self.err(
                ErrorCode.DUPLICATE_DIRECTED_EDGE,
                lineno,
                f"edge {src}-{dst} is already declared",
            )
            return
        block.pairs.add((src, dst))
        block.edges.append((lineno, src, dst, condition))

    def parse_condition(
        self, lineno: int, kind: ConditionKind, args: list[str]
    ) -> Condition | None:
        def bad_arity(expect: str) -> None:
            self.err(
                ErrorCode.SYNTAX_ERROR,
                lineno,
                f"condition {kind.value} needs {expect}",
            )

        match kind:
            case ConditionKind.NONE:
                if args:
                    bad_arity("no arguments")
                    return None
                return Condition(kind)
            case ConditionKind.STEP:
                if len(args) != 1:
                    bad_arity("one count")
                    return None
                count = _parse_int(args[0], 1 << 31)
                if count is None or count < 1:
                    self.err(
                        ErrorCode.BAD_COUNT,
                        lineno,
                        "count must be an integer of at least 1",
                    )
                    return None
                return Condition(kind, count=count)
            case ConditionKind.WITHIN:
                if len(args) != 2 or len(args[0]) != 1:
                    bad_arity("a target character and a count")
                    return None
                count = _parse_int(args[1], 1 << 31)
                if count is None or count < 1:
                    self.err(
                        ErrorCode.BAD_COUNT,
                        lineno,
                        "count must be an integer of at least 1",
                    )
                    return None
                return Condition(kind, target=args[0], count=count)
            case _:
                if len(args) != 1 or len(args[0]) != 1:
                    bad_arity("one target character")
                    return None
                return Condition(kind, target=args[0])

    def close_block(self) -> None:
        block = self.current
        assert block is not None
        self.current = None

        if not block.nodes:
            self.err(
                ErrorCode.BAD_NODE_INDEX,
                block.line,
                "entity must declare at least node 0",
            )
            return
        indices = sorted(block.nodes)
        if indices != list(range(len(indices))):
            self.err(
                ErrorCode.BAD_NODE_INDEX,
                block.line,
                f"node indices {indices} must be exactly 0..{len(indices) - 1}",
            )

        signatures: dict[tuple, int] = {}
        for index in indices:
            lineno, action = block.nodes[index]
            if action is None:
                continue
            sig = action.signature
            if sig in signatures:
                self.err(
                    ErrorCode.DUPLICATE_ACTION_SIGNATURE,
                    lineno,
                    f"node {index} repeats the action of node {signatures[sig]}",
                )
            else:
                signatures[sig] = index

        node_set = set(block.nodes)
        for lineno, src, dst, _cond in block.edges:
            if src not in node_set or dst not in node_set:
                self.err(
                    ErrorCode.BAD_NODE_INDEX,
                    lineno,
                    f"edge {src}-{dst} references a missing node",
                )

    # -- map --------------------------------------------------------------

    def map_row(self, lineno: int, raw: str) -> None:
        if raw.strip() == "END":
            self.in_map = False
            self.map_closed = True
            return
        self.map_rows.append((lineno, raw))

    # -- resolution ---------------------------------------------------------

    def check_sections(self) -> None:
        if self.name is None:
            self.err(ErrorCode.MISSING_SECTION, self.last_line, "missing FORTRESS line")
        if self.seed is None:
            self.err(ErrorCode.MISSING_SECTION, self.last_line, "missing SEED line")
        if not self.blocks:
            self.err(
                ErrorCode.MISSING_SECTION,
                self.last_line,
                "at least one ENTITY block is required",
            )
        if self.map_line is None:
            self.err(ErrorCode.MISSING_SECTION, self.last_line, "missing MAP section")

    def resolve_classes(self) -> dict[str, EntityClass]:
        classes: dict[str, EntityClass] = {}
        registered: list[_Block] = []
        for block in self.blocks:
            if block.char is None:
                continue
            if block.char in classes:
                self.err(
                    ErrorCode.DUPLICATE_ENTITY_CHARACTER,
                    block.line,
                    f"entity character {block.char!r} is already defined",
                )
                continue
            nodes = [
                FsmNode(index, action)
                for index, (_line, action) in sorted(block.nodes.items())
                if action is not None
            ]
            edges = [
                FsmEdge(src, dst, cond)
                for _line, src, dst, cond in block.edges
                if cond is not None
            ]
            classes[block.char] = EntityClass(block.char, block.name, nodes, edges)
            registered.append(block)

        defined = set(classes)
        for block in registered:
            for _index, (lineno, action) in sorted(block.nodes.items()):
                if action is not None and action.target is not None:
                    if action.target not in defined:
                        self.err(
                            ErrorCode.UNDEFINED_TARGET_CHARACTER,
                            lineno,
                            f"target character {action.target!r} is not defined",
                        )
            for lineno, _src, _dst, cond in block.edges:
                if cond is not None and cond.target is not None:
                    if cond.target not in defined:
                        self.err(
                            ErrorCode.UNDEFINED_TARGET_CHARACTER,
                            lineno,
                            f"target character {cond.target!r} is not defined",
                        )
        return classes

    def resolve_map(self, classes: dict[str, EntityClass]) -> list[EntityInstance]:
        if self.map_line is None:
            return []
        rows = self.map_rows
        well_formed = True
        if len(rows) != GRID_HEIGHT:
            self.err(
                ErrorCode.MAP_DIMENSION_MISMATCH,
                self.map_line,
                f"map has {len(rows)} rows, expected {GRID_HEIGHT}",
            )
            well_formed = False
        for lineno, row in rows:
            if len(row) != GRID_WIDTH:
                self.err(
                    ErrorCode.MAP_DIMENSION_MISMATCH,
                    lineno,
                    f"map row has {len(row)} characters, expected {GRID_WIDTH}",
                )
                well_formed = False

        glyphs = sum(
            1 for _lineno, row in rows for ch in row if ch in classes
        )
        if glyphs > OVERPOPULATION_LIMIT:
            self.err(
                ErrorCode.TOO_MANY_INITIAL_ENTITIES,
                self.map_line,
                f"{glyphs} initial entities exceed the limit of {OVERPOPULATION_LIMIT}",
            )

        if not well_formed:
            return []

        instances: list[EntityInstance] = []
        for y, (lineno, row) in enumerate(rows):
            for x, ch in enumerate(row):
                if is_wall(x, y):
                    if ch != WALL_CHAR:
                        self.err(
                            ErrorCode.BAD_BORDER,
                            lineno,
                            f"border cell ({x},{y}) must be {WALL_CHAR!r}",
                        )
                    continue
                if ch == WALL_CHAR:
                    self.err(
                        ErrorCode.BAD_BORDER,
                        lineno,
                        f"walls are only allowed on the border, found one at ({x},{y})",
                    )
                elif ch == FLOOR_CHAR:
                    continue
                elif ch in classes:
                    instances.append(
                        EntityInstance(id=len(instances), char=ch, x=x, y=y)
                    )
                else:
                    self.err(
                        ErrorCode.UNKNOWN_MAP_CHARACTER,
                        lineno,
                        f"map character {ch!r} is not a defined entity",
                    )
        return instances


# -- Public API ---------------------------------------------------------------


def validate_text(text: str) -> list[CompileError]:
    """All diagnostics for a definition text; empty list means it compiles."""
    _fortress, errors = _Compiler(text).compile()
    return errors


def parse(text: str) -> Fortress:
    """Compile a definition; raises CompileFailure listing every error."""
    fortress, errors = _Compiler(text).compile()
    if fortress is None:
        raise CompileFailure(errors)
    return fortress


def _quote(value: str) -> str:
    return '"' + value.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _action_text(action: Action) -> str:
    if action.target is not None:
        return f"{action.kind.value} {action.target}"
    return action.kind.value


def _condition_text(cond: Condition) -> str:
    match cond.kind:
        case ConditionKind.NONE:
            return "none"
        case ConditionKind.STEP:
            return f"step {cond.count}"
        case ConditionKind.WITHIN:
            return f"within {cond.target} {cond.count}"
        case _:
            return f"{cond.kind.value} {cond.target}"


def serialize(fortress: Fortress) -> str:
    """Canonical text for a fortress definition.

    Sections are emitted in a fixed order, entities sorted by character,
    nodes by index, edges by endpoint pair, so `parse(serialize(f)) == f`
    and equal definitions always serialize to identical bytes.
    """
    for cls in fortress.classes.values():
        bad = validate_class(cls)
        if bad:
            raise ValueError(f"class {cls.char!r} is not serializable: {bad[0]}")

    grid = [
        [WALL_CHAR if is_wall(x, y) else FLOOR_CHAR for x in range(GRID_WIDTH)]
        for y in range(GRID_HEIGHT)
    ]
    seen_cells: set[tuple[int, int]] = set()
    for inst in fortress.instances:
        if is_wall(inst.x, inst.y):
            raise ValueError(f"instance at ({inst.x},{inst.y}) is not on the floor")
        if inst.char not in fortress.classes:
            raise ValueError(f"instance character {inst.char!r} has no class")
        if (inst.x, inst.y) in seen_cells:
            raise ValueError(f"two instances share cell ({inst.x},{inst.y})")
        seen_cells.add((inst.x, inst.y))
        grid[inst.y][inst.x] = inst.char

    lines = [f"FORTRESS {_quote(fortress.name)}"]
    if fortress.author:
        lines.append(f"AUTHOR {_quote(fortress.author)}")
    seed = fortress.seed_spec
    lines.append(f"SEED {'__RANDOM__' if seed.value is None else seed.value}")
    if fortress.notes:
        lines.append(f"NOTES {_quote(fortress.notes)}")

    for char in sorted(fortress.classes):
        cls = fortress.classes[char]
        lines.append("")
        lines.append(f"ENTITY {cls.char} {_quote(cls.name)}")
        for node in sorted(cls.nodes, key=lambda n: n.index):
            lines.append(f"  NODE {node.index} {_action_text(node.action)}")
        for edge in sorted(cls.edges, key=lambda e: (e.src, e.dst)):
            lines.append(
                f"  EDGE {edge.src}-{edge.dst} {_condition_text(edge.condition)}"
            )
        lines.append("END")

    lines.append("")
    lines.append("MAP")
    lines.extend("".join(row) for row in grid)
    lines.append("END")
    return "\n".join(lines) + "\n"
