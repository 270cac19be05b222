import itertools

import pytest

from topopuzzles.core import PayloadError, PuzzleInstance, rng_stream
from topopuzzles.families import pattern


@pytest.fixture
def pattern_example():
    payload = {
        "row_clues": [[3], [3], [1, 1], [1, 1, 1], [2]],
        "col_clues": [[2], [1], [4], [2], [4]],
    }
    return PuzzleInstance(family="pattern", width=5, height=5, payload=payload)


EXAMPLE_GRID = [
    [0, 0, 1, 1, 1],
    [0, 0, 1, 1, 1],
    [0, 0, 1, 0, 1],
    [1, 0, 1, 0, 1],
    [1, 1, 0, 0, 0],
]


def brute_force(instance, limit=10):
    """Enumerate all 0/1 grids; independent oracle for small boards."""
    w, h = instance.width, instance.height
    found = []
    for bits in itertools.product((0, 1), repeat=w * h):
        grid = [list(bits[r * w : (r + 1) * w]) for r in range(h)]
        if pattern.verify(instance, {"filled": grid}):
            found.append(grid)
            if len(found) >= limit:
                break
    return found


def test_worked_example_accepted(pattern_example):
    assert pattern.verify(pattern_example, {"filled": EXAMPLE_GRID}).ok


def test_all_empty_rejected(pattern_example):
    grid = [[0] * 5 for _ in range(5)]
    verdict = pattern.verify(pattern_example, {"filled": grid})
    assert not verdict.ok and verdict.reason == "clue"


def test_cleared_cell_rejected(pattern_example):
    grid = [list(row) for row in EXAMPLE_GRID]
    grid[0][2] = 0  # row 0 run 3 -> 2, col 2 run 4 broken
    verdict = pattern.verify(pattern_example, {"filled": grid})
    assert verdict.reason == "clue"


def test_bad_shape_rejected(pattern_example):
    assert pattern.verify(pattern_example, {"filled": [[0, 1]]}).reason == "structure"
    grid = [list(row) for row in EXAMPLE_GRID]
    grid[1][1] = 7
    assert pattern.verify(pattern_example, {"filled": grid}).reason == "structure"


def test_worked_example_unique(pattern_example):
    result = pattern.solve(pattern_example, limit=2)
    assert result.complete
    assert [s["filled"] for s in result.solutions] == [EXAMPLE_GRID]


def test_solver_matches_brute_force_small():
    # clue extraction o verify round-trips and solver equals enumeration
    rng = rng_stream(7, "pattern-oracle")
    for _ in range(15):
        grid = [[int(rng.random() < 0.5) for _ in range(4)] for _ in range(4)]
        payload = pattern.clues_from_grid(grid)
        inst = PuzzleInstance(family="pattern", width=4, height=4, payload=payload)
        assert pattern.verify(inst, {"filled": grid}).ok
        expect = brute_force(inst)
        got = [s["filled"] for s in pattern.solve(inst, limit=10).solutions]
        assert sorted(map(str, expect)) == sorted(map(str, got))


def test_line_intersection_sound():
    # any cell fixed by intersection agrees with every accepted solution
    cells = (pattern.UNKNOWN,) * 5
    merged = pattern.line_intersection((4,), cells)
    # runs of 4 in 5 cells overlap in the middle three
    assert merged == [pattern.UNKNOWN, 1, 1, 1, pattern.UNKNOWN]
    assert pattern.line_intersection((3, 3), (pattern.UNKNOWN,) * 5) is None


def test_generation_deterministic_and_unique():
    a, gold_a = pattern.generate("5x5", rng_stream(2, "gen"))
    b, gold_b = pattern.generate("5x5", rng_stream(2, "gen"))
    assert a.payload == b.payload and gold_a == gold_b
    result = pattern.solve(a, limit=2)
    assert len(result.solutions) == 1
    # gold path replays to the unique solution
    state = pattern.empty_state(a.width, a.height, a.payload)
    for mv in gold_a:
        state = pattern.apply_move(a.width, a.height, a.payload, state, mv)
    assert pattern.state_solution(state) == result.solutions[0]


def test_params():
    assert pattern.parse_params("10x10") == (10, 10)
    with pytest.raises(PayloadError):
        pattern.parse_params("5x5d0")
