import itertools

import pytest

from topopuzzles.core import PuzzleInstance, rng_stream
from topopuzzles.families import loopy


@pytest.fixture
def loopy_example():
    clues = sorted([
        [0, 0, 2], [0, 1, 1], [0, 3, 3],
        [1, 0, 2], [1, 2, 1], [1, 4, 2],
        [2, 0, 3],
        [3, 1, 0], [3, 3, 1], [3, 4, 3],
        [4, 1, 3],
    ])
    return PuzzleInstance(family="loopy", width=5, height=5,
                          payload={"clues": clues})


# worked 5x5 solution: h_edges (6 rows x 5) and v_edges (5 rows x 6)
EXAMPLE_H = [
    [1, 1, 1, 0, 1],
    [0, 0, 0, 1, 0],
    [1, 0, 1, 1, 1],
    [1, 0, 1, 1, 1],
    [1, 0, 1, 0, 1],
    [0, 1, 0, 1, 0],
]
EXAMPLE_V = [
    [1, 0, 0, 1, 1, 1],
    [1, 0, 0, 0, 0, 1],
    [0, 1, 1, 0, 0, 0],
    [1, 0, 0, 0, 0, 1],
    [0, 1, 1, 1, 1, 0],
]


@pytest.fixture
def loopy_example_solution():
    return {"h_edges": EXAMPLE_H, "v_edges": EXAMPLE_V}


def brute_force(instance, limit=10):
    """Recursive enumeration of edge assignments with only local feasibility
    pruning (decided vertices and cells); independent of the solver's
    deduction machinery.  Every complete assignment goes through verify."""
    W, H = instance.width, instance.height
    slots = loopy.edge_slots(W, H)
    clue_map = {(r, c): v for r, c, v in instance.payload["clues"]}
    found = []

    vertex_slots = {
        (r, c): loopy.vertex_edges(r, c, W, H)
        for r in range(H + 1) for c in range(W + 1)
    }
    cell_slots = {pos: loopy.cell_edges(*pos) for pos in clue_map}

    def feasible(state):
        for vtx, edges in vertex_slots.items():
            vals = [state.get(e) for e in edges]
            on = sum(1 for v in vals if v == 1)
            unknown = sum(1 for v in vals if v is None)
            if on > 2 or (unknown == 0 and on not in (0, 2)):
                return False
            if unknown == 0 and on == 1:
                return False
        for pos, edges in cell_slots.items():
            vals = [state.get(e) for e in edges]
            on = sum(1 for v in vals if v == 1)
            unknown = sum(1 for v in vals if v is None)
            if on > clue_map[pos] or on + unknown < clue_map[pos]:
                return False
        return True

    def rec(idx, state):
        if len(found) >= limit:
            return
        if idx == len(slots):
            sol = {
                "h_edges": [
                    [state[("h", r, c)] for c in range(W)] for r in range(H + 1)
                ],
                "v_edges": [
                    [state[("v", r, c)] for c in range(W + 1)] for r in range(H)
                ],
            }
            if loopy.verify(instance, sol):
                found.append(sol)
            return
        for value in (0, 1):
            state[slots[idx]] = value
            if feasible(state):
                rec(idx + 1, state)
            del state[slots[idx]]

    rec(0, {})
    return found


def test_worked_example_accepted(loopy_example, loopy_example_solution):
    assert loopy.verify(loopy_example, loopy_example_solution).ok
    assert loopy.jordan_parity_ok(loopy_example, loopy_example_solution)


def test_all_off_rejected(loopy_example):
    sol = {
        "h_edges": [[0] * 5 for _ in range(6)],
        "v_edges": [[0] * 6 for _ in range(5)],
    }
    verdict = loopy.verify(loopy_example, sol)
    assert verdict.reason == "clue"
    # with no clues at all, an empty board still needs a loop
    empty = PuzzleInstance(family="loopy", width=2, height=2,
                           payload={"clues": []})
    sol2 = {"h_edges": [[0, 0]] * 3, "v_edges": [[0, 0, 0]] * 2}
    assert loopy.verify(empty, sol2).reason == "loop"


def test_toggled_edge_rejected_degree(loopy_example, loopy_example_solution):
    sol = {
        "h_edges": [list(r) for r in EXAMPLE_H],
        "v_edges": [list(r) for r in EXAMPLE_V],
    }
    sol["h_edges"][0][0] = 0
    verdict = loopy.verify(loopy_example, sol)
    assert verdict.reason in ("degree", "clue")
    # pick an edge that breaks degree before any clue: clueless cells border
    sol2 = {
        "h_edges": [list(r) for r in EXAMPLE_H],
        "v_edges": [list(r) for r in EXAMPLE_V],
    }
    sol2["v_edges"][1][5] = 0  # right border edge next to unclued cell (1,4)?
    verdict2 = loopy.verify(loopy_example, sol2)
    assert not verdict2.ok


def test_two_loops_rejected():
    inst = PuzzleInstance(family="loopy", width=3, height=1,
                          payload={"clues": []})
    sol = {
        "h_edges": [[1, 0, 1], [1, 0, 1]],
        "v_edges": [[1, 1, 1, 1]],
    }
    assert loopy.verify(inst, sol).reason == "loop"


def test_worked_example_unique(loopy_example, loopy_example_solution):
    result = loopy.solve(loopy_example, limit=2)
    assert result.complete
    assert len(result.solutions) == 1
    assert result.solutions[0] == loopy_example_solution


def test_solver_matches_brute_force():
    rng = rng_stream(13, "loopy-oracle")
    for _ in range(5):
        inst, _ = loopy.generate("3x3t0de", rng)
        expect = brute_force(inst)
        got = loopy.solve(inst, limit=10).solutions
        assert sorted(map(str, expect)) == sorted(map(str, got))


def test_generation_deterministic_and_replayable():
    a, gold_a = loopy.generate("5x5t0de", rng_stream(4, "gen"))
    b, gold_b = loopy.generate("5x5t0de", rng_stream(4, "gen"))
    assert a.payload == b.payload and gold_a == gold_b
    result = loopy.solve(a, limit=2)
    assert len(result.solutions) == 1
    state = loopy.empty_state(a.width, a.height, a.payload)
    for mv in gold_a:
        state = loopy.apply_move(a.width, a.height, a.payload, state, mv)
    assert loopy.state_solution(state) == result.solutions[0]
    assert loopy.deduction_solves(a)


def test_params():
    assert loopy.parse_params("10x10t0dh") == (10, 10, 2)
    assert loopy.parse_params("7x7t0dt") == (7, 7, 1)
    with pytest.raises(Exception):
        loopy.parse_params("7x7dh")
