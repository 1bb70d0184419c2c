"""Compiler tests: one scenario per error code, recovery, round-trips."""
from __future__ import annotations

import random
from pathlib import Path

import pytest

from fortress import dsl
from fortress.dsl import CompileFailure, ErrorCode
from fortress.model import (
    Action,
    ActionKind,
    Condition,
    ConditionKind,
    EntityInstance,
    SeedSpec,
)

from conftest import definition, make_class, random_definition

GOLDEN_DIR = Path(__file__).parent / "golden"

GRID = (
    "################\n"
    "#..............#\n"
    "#......L.......#\n"
    "#..............#\n"
    "#..............#\n"
    "#..............#\n"
    "#..............#\n"
    "################\n"
)


def doc(entity_block: str, grid: str = GRID) -> str:
    return 'FORTRESS "t"\nSEED 7\n\n' + entity_block + "\nMAP\n" + grid + "END\n"


def codes_at(text: str) -> list[tuple[str, int]]:
    return [(e.code.value, e.line) for e in dsl.validate_text(text)]


# -- Golden catalog ----------------------------------------------------------

# file -> (line the named code must appear at, whether it is the sole error)
GOLDEN_EXPECTED = {
    "E001": (6, True),
    "E002": (7, True),
    "E003": (6, True),
    "E004": (6, True),
    "E005": (7, True),
    "E006": (8, True),
    "E007": (14, True),
    "E008": (13, True),
    "E009": (11, True),
    "E010": (7, True),
    "E011": (4, True),
    "E012": (10, False),  # the 13-row grid also trips the row-count check
    "E013": (3, True),
    "E014": (8, True),
    "E015": (18, True),
}


@pytest.mark.parametrize("code", sorted(GOLDEN_EXPECTED))
def test_golden_file(code):
    line, sole = GOLDEN_EXPECTED[code]
    text = (GOLDEN_DIR / f"{code}.fort").read_text()
    found = codes_at(text)
    assert (code, line) in found
    if sole:
        assert found == [(code, line)]


def test_golden_catalog_is_complete():
    files = sorted(p.stem for p in GOLDEN_DIR.glob("*.fort"))
    assert files == [f"E{i:03d}" for i in range(1, 16)]


# -- Happy path --------------------------------------------------------------

VALID = (
    'FORTRESS "Meadow"\n'
    'AUTHOR "zelda"\n'
    "SEED 99\n"
    'NOTES "grass grows"\n'
    "\n"
    "# koroks turn into grass when Link comes close\n"
    'ENTITY L "Link"\n'
    "  NODE 0 move\n"
    "  NODE 1 take $\n"
    "  EDGE 0-1 touch $\n"
    "  EDGE 1-0 none\n"
    "END\n"
    "\n"
    'ENTITY k "Korok"\n'
    "  NODE 0 idle\n"
    "  NODE 1 transform $\n"
    "  EDGE 0-1 nextTo L\n"
    "END\n"
    "\n"
    'ENTITY $ "Grass"\n'
    "  NODE 0 idle\n"
    "END\n"
    "\n"
    "MAP\n"
    "################\n"
    "#L.............#\n"
    "#....k.........#\n"
    "#..........k...#\n"
    "#..$...........#\n"
    "#..............#\n"
    "#.........$...$#\n"
    "################\n"
    "END\n"
)


def test_valid_document_compiles_clean():
    assert dsl.validate_text(VALID) == []


def test_valid_document_structure():
    f = dsl.parse(VALID)
    assert f.name == "Meadow"
    assert f.author == "zelda"
    assert f.notes == "grass grows"
    assert f.seed_spec == SeedSpec(99)
    assert sorted(f.classes) == ["$", "L", "k"]

    link = f.classes["L"]
    assert [n.action.kind for n in link.nodes] == [ActionKind.MOVE, ActionKind.TAKE]
    assert link.nodes[1].action.target == "$"
    assert [(e.src, e.dst, e.condition.kind) for e in link.edges] == [
        (0, 1, ConditionKind.TOUCH),
        (1, 0, ConditionKind.NONE),
    ]

    korok = f.classes["k"]
    assert korok.edges[0].condition.kind == ConditionKind.NEXT_TO
    assert korok.edges[0].condition.target == "L"

    # placements come out in reading order with sequential ids
    assert [(i.id, i.char, i.x, i.y) for i in f.instances] == [
        (0, "L", 1, 1),
        (1, "k", 5, 2),
        (2, "k", 11, 3),
        (3, "$", 3, 4),
        (4, "$", 10, 6),
        (5, "$", 14, 6),
    ]
    assert f.next_id == 6


def test_within_condition_takes_target_and_count():
    text = doc(
        'ENTITY L "Link"\n'
        "  NODE 0 idle\n"
        "  NODE 1 move\n"
        "  EDGE 0-1 within L 3\n"
        "END\n"
    )
    f = dsl.parse(text)
    cond = f.classes["L"].edges[0].condition
    assert (cond.kind, cond.target, cond.count) == (ConditionKind.WITHIN, "L", 3)


def test_random_seed_sentinel():
    text = VALID.replace("SEED 99", "SEED __RANDOM__")
    assert dsl.parse(text).seed_spec == SeedSpec(None)


def test_crlf_is_tolerated():
    assert dsl.parse(VALID.replace("\n", "\r\n")) == dsl.parse(VALID)


def test_comments_and_blanks_ignored_outside_map():
    text = VALID.replace("ENTITY L", "# noise\n\nENTITY L")
    assert dsl.validate_text(text) == []


def test_comment_inside_map_is_a_bad_row():
    text = VALID.replace("#L.............#", "# not a comment here\n#L.............#")
    found = codes_at(text)
    # the comment line is consumed as a map row: wrong width, then a row too many
    assert ("E007", 26) in found


def test_parse_raises_with_error_list():
    with pytest.raises(CompileFailure) as exc:
        dsl.parse(VALID.replace("NODE 0 move", "NODE 0 fly"))
    assert [e.code for e in exc.value.errors] == [ErrorCode.UNKNOWN_ACTION]


# -- Per-code unit scenarios -------------------------------------------------


def entity(lines: str) -> str:
    return doc('ENTITY L "Link"\n' + lines + "END\n")


def test_duplicate_signature_same_target():
    text = entity("  NODE 0 push L\n  NODE 1 push L\n  EDGE 0-1 none\n")
    assert codes_at(text) == [("E003", 6)]


def test_same_action_different_target_is_fine():
    text = doc(
        'ENTITY L "Link"\n'
        "  NODE 0 push L\n"
        "  NODE 1 push $\n"
        "  EDGE 0-1 none\n"
        "END\n"
        'ENTITY $ "Grass"\n'
        "  NODE 0 idle\n"
        "END\n"
    )
    assert codes_at(text) == []


def test_undefined_edge_target():
    text = entity("  NODE 0 idle\n  NODE 1 move\n  EDGE 0-1 touch Z\n")
    assert codes_at(text) == [("E004", 7)]


def test_duplicate_node_index():
    text = entity("  NODE 0 idle\n  NODE 0 move\n")
    assert ("E005", 6) in codes_at(text)


def test_noncontiguous_node_indices():
    text = entity("  NODE 0 idle\n  NODE 2 move\n")
    assert ("E005", 4) in codes_at(text)


def test_empty_entity_block():
    text = doc('ENTITY L "Link"\nEND\n', grid=GRID.replace("L", "."))
    assert codes_at(text) == [("E005", 4)]


def test_edge_endpoint_out_of_range():
    text = entity("  NODE 0 idle\n  NODE 1 move\n  EDGE 1-2 none\n")
    assert codes_at(text) == [("E005", 7)]


def test_reversed_edge_is_not_a_duplicate():
    text = entity("  NODE 0 idle\n  NODE 1 move\n  EDGE 0-1 none\n  EDGE 1-0 none\n")
    assert codes_at(text) == []


def test_self_loop_allowed():
    text = entity("  NODE 0 idle\n  EDGE 0-0 step 5\n")
    assert codes_at(text) == []


def test_map_row_count_checked_at_map_line():
    nine_rows = GRID + "#..............#\n"
    text = doc('ENTITY L "Link"\n  NODE 0 idle\nEND\n', grid=nine_rows)
    assert ("E007", 8) in codes_at(text)


def test_interior_wall_is_bad_border():
    grid = GRID.replace("#......L.......#", "#......L...#...#")
    text = doc('ENTITY L "Link"\n  NODE 0 idle\nEND\n', grid=grid)
    assert codes_at(text) == [("E009", 11)]


def test_population_cap_boundary():
    # a legal grid holds at most 84 glyphs, so the cap only trips on
    # malformed maps; the glyph census must still run on those
    base = "#LLLLLLLLLLLLLL#\n" * 12  # 168 glyphs
    block = 'ENTITY L "Link"\n  NODE 0 idle\nEND\n'

    at_cap = doc(block, grid=base + "#..............#\n")
    assert not any(c == "E012" for c, _ in codes_at(at_cap))

    over = doc(block, grid=base + "#L.............#\n")
    assert ("E012", 8) in codes_at(over)


def test_step_count_must_be_positive():
    text = entity("  NODE 0 idle\n  NODE 1 move\n  EDGE 0-1 step 0\n")
    assert codes_at(text) == [("E010", 7)]


def test_within_count_zero_rejected():
    text = entity("  NODE 0 idle\n  NODE 1 move\n  EDGE 0-1 within L 0\n")
    assert codes_at(text) == [("E010", 7)]


def test_oversized_count_rejected():
    text = entity("  NODE 0 idle\n  NODE 1 move\n  EDGE 0-1 step 99999999999\n")
    assert codes_at(text) == [("E010", 7)]


def test_reserved_entity_characters():
    for ch in ("#", "."):
        text = doc(f'ENTITY {ch} "bad"\n  NODE 0 idle\nEND\n', grid=GRID.replace("L", "."))
        assert ("E011", 4) in codes_at(text)


def test_syntax_unquoted_name():
    text = VALID.replace('FORTRESS "Meadow"', "FORTRESS Meadow")
    assert ("E013", 1) in codes_at(text)


def test_syntax_bad_seed():
    for bad in ("SEED x", "SEED -1", "SEED 18446744073709551616", "SEED"):
        text = VALID.replace("SEED 99", bad)
        assert ("E013", 3) in codes_at(text), bad


def test_seed_max_is_accepted():
    text = VALID.replace("SEED 99", "SEED 18446744073709551615")
    f = dsl.parse(text)
    assert f.seed_spec == SeedSpec(2**64 - 1)


def test_syntax_node_arity():
    for bad in ("  NODE 0\n", "  NODE 0 push\n", "  NODE 0 idle x\n", "  NODE x idle\n"):
        text = entity(bad)
        assert any(c == "E013" for c, _ in codes_at(text)), bad


def test_syntax_edge_shape():
    for bad in ("  EDGE 0_1 none\n", "  EDGE 0-1-2 none\n", "  EDGE 0- none\n", "  EDGE none\n"):
        text = entity("  NODE 0 idle\n  NODE 1 move\n" + bad)
        assert any(c == "E013" for c, _ in codes_at(text)), bad


def test_syntax_within_arity():
    text = entity("  NODE 0 idle\n  NODE 1 move\n  EDGE 0-1 within L\n")
    assert ("E013", 7) in codes_at(text)


def test_syntax_stray_end():
    text = VALID + "END\n"
    assert ("E013", len(VALID.splitlines()) + 1) in codes_at(text)


def test_syntax_unterminated_entity():
    text = 'FORTRESS "t"\nSEED 7\nENTITY L "Link"\n  NODE 0 idle\n'
    assert any(c == "E013" for c, _ in codes_at(text))


def test_syntax_duplicate_directive():
    text = VALID.replace("SEED 99", "SEED 99\nSEED 100")
    assert ("E013", 4) in codes_at(text)


def test_syntax_multichar_glyph():
    text = doc('ENTITY LL "Link"\n  NODE 0 idle\nEND\n', grid=GRID.replace("L", "."))
    assert ("E013", 4) in codes_at(text)


def test_duplicate_entity_reported_at_second_block():
    text = (
        'FORTRESS "t"\nSEED 7\n'
        'ENTITY L "a"\n  NODE 0 idle\nEND\n'
        'ENTITY L "b"\n  NODE 0 move\nEND\n'
        "MAP\n" + GRID + "END\n"
    )
    assert codes_at(text) == [("E014", 6)]


def test_missing_sections_each_reported():
    no_name = VALID.replace('FORTRESS "Meadow"\n', "")
    assert any(c == "E015" for c, _ in codes_at(no_name))

    no_entities = 'FORTRESS "t"\nSEED 7\nMAP\n' + GRID.replace("L", ".").replace("k", ".").replace("$", ".") + "END\n"
    assert any(c == "E015" for c, _ in codes_at(no_entities))

    no_map = 'FORTRESS "t"\nSEED 7\nENTITY L "Link"\n  NODE 0 idle\nEND\n'
    assert any(c == "E015" for c, _ in codes_at(no_map))


def test_missing_section_points_at_last_line():
    no_map = 'FORTRESS "t"\nSEED 7\nENTITY L "Link"\n  NODE 0 idle\nEND\n'
    found = codes_at(no_map)
    assert found == [("E015", 5)]


# -- Error recovery ----------------------------------------------------------


def test_independent_defects_all_reported():
    text = (
        'FORTRESS "t"\n'
        "SEED 7\n"
        'ENTITY L "Link"\n'
        "  NODE 0 fly\n"          # E001
        "  NODE 1 move\n"
        "  EDGE 0-1 step 0\n"     # E010
        "END\n"
        "MAP\n"
        + GRID.replace("#......L.......#", "#......L..Z....#")  # E008
        + "END\n"
    )
    found = codes_at(text)
    assert ("E001", 4) in found
    assert ("E010", 6) in found
    assert ("E008", 11) in found
    assert len(found) == 3


def test_errors_sorted_by_line():
    text = (
        'FORTRESS "t"\n'
        "SEED 7\n"
        'ENTITY L "Link"\n'
        "  NODE 0 fly\n"
        "  NODE 1 warp\n"
        "END\n"
        "MAP\n" + GRID + "END\n"
    )
    lines = [e.line for e in dsl.validate_text(text)]
    assert lines == sorted(lines)


def test_compiler_never_raises_on_junk():
    rnd = random.Random(5)
    alphabet = "FORTRESSENTITYNODEEDGEMAPEND \n\"#.0123456789LMk$-"
    for _ in range(300):
        text = "".join(rnd.choice(alphabet) for _ in range(rnd.randrange(0, 400)))
        dsl.validate_text(text)  # must not raise


# -- Round trips -------------------------------------------------------------


def test_serialize_shape():
    f = definition(
        [
            make_class(
                "L",
                [Action(ActionKind.MOVE)],
                [(0, 0, Condition(ConditionKind.STEP, count=3))],
                name="L",
            )
        ],
        [("L", 3, 3)],
        name="shape",
        seed=5,
    )
    assert dsl.serialize(f) == (
        'FORTRESS "shape"\n'
        "SEED 5\n"
        "\n"
        'ENTITY L "L"\n'
        "  NODE 0 move\n"
        "  EDGE 0-0 step 3\n"
        "END\n"
        "\n"
        "MAP\n"
        "################\n"
        "#..............#\n"
        "#..............#\n"
        "#..L...........#\n"
        "#..............#\n"
        "#..............#\n"
        "#..............#\n"
        "################\n"
        "END\n"
    )


def test_author_and_notes_omitted_when_blank():
    f = definition([make_class("L", [Action(ActionKind.IDLE)])], [("L", 1, 1)])
    text = dsl.serialize(f)
    assert "AUTHOR" not in text and "NOTES" not in text


def test_escaped_strings_round_trip():
    f = definition(
        [make_class("L", [Action(ActionKind.IDLE)], name='say "hi" \\ there')],
        [("L", 1, 1)],
        name='a "quoted" \\ name',
    )
    g = dsl.parse(dsl.serialize(f))
    assert g.name == 'a "quoted" \\ name'
    assert g.classes["L"].name == 'say "hi" \\ there'


def test_round_trip_handcrafted():
    f = dsl.parse(VALID)
    assert dsl.parse(dsl.serialize(f)) == f


def test_round_trip_random_definitions():
    rnd = random.Random(2024)
    for _ in range(60):
        f = random_definition(rnd, fancy_strings=True)
        assert dsl.parse(dsl.serialize(f)) == f


def test_serialize_is_a_fixpoint():
    rnd = random.Random(77)
    for _ in range(30):
        f = random_definition(rnd)
        once = dsl.serialize(f)
        assert dsl.serialize(dsl.parse(once)) == once


def test_serialize_rejects_overlapping_instances():
    f = definition(
        [make_class("L", [Action(ActionKind.IDLE)])], [("L", 2, 2), ("L", 2, 2)]
    )
    with pytest.raises(ValueError):
        dsl.serialize(f)


def test_serialize_rejects_undefined_instance_char():
    f = definition([make_class("L", [Action(ActionKind.IDLE)])], [("L", 2, 2)])
    f.instances[0] = EntityInstance(id=0, char="Z", x=2, y=2)
    with pytest.raises(ValueError):
        dsl.serialize(f)
