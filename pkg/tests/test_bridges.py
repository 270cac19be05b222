import itertools

import pytest

from topopuzzles.core import PayloadError, PuzzleInstance, rng_stream
from topopuzzles.families import bridges


def brute_force(instance, limit=10):
    """Enumerate every legal edge assignment directly; independent oracle."""
    payload = instance.payload
    pairs = bridges.candidate_pairs(payload)
    values = bridges.island_values(payload)
    solutions = []
    for assignment in itertools.product((0, 1, 2), repeat=len(pairs)):
        edges = {
            (p.a, p.b): m for p, m in zip(pairs, assignment) if m > 0
        }
        sol = {"edges": sorted([a, b, m] for (a, b), m in edges.items())}
        if bridges.verify(instance, sol):
            solutions.append(sol)
            if len(solutions) >= limit:
                break
    return solutions


def test_worked_example_accepted(bridges_example, bridges_example_solution):
    assert bridges.verify(bridges_example, bridges_example_solution).ok


def test_empty_solution_rejected_count(bridges_example):
    verdict = bridges.verify(bridges_example, {"edges": []})
    assert not verdict.ok
    assert verdict.reason == "count"


def test_downgraded_double_rejected_count(bridges_example, bridges_example_solution):
    mutated = {"edges": [list(e) for e in bridges_example_solution["edges"]]}
    # (1,2)-(1,4) double edge becomes single: both endpoints short one bridge
    assert mutated["edges"][2] == [2, 3, 2]
    mutated["edges"][2][2] = 1
    verdict = bridges.verify(bridges_example, mutated)
    assert verdict.reason == "count"


def test_malformed_solutions_are_structure_rejects(bridges_example):
    cases = [
        {"edges": [[0, 99, 1]]},
        {"edges": [[0, 1, 3]]},
        {"edges": [[1, 0, 1]]},
        {"edges": [[0, 1, 1], [0, 1, 1]]},
        {"edges": [[0, 6, 1]]},  # (0,0) and (4,4) not aligned
        {"wrong": True},
    ]
    for sol in cases:
        verdict = bridges.verify(bridges_example, sol)
        assert verdict.reason == "structure", sol


def test_crossing_rejected():
    # vertical 1-1 crossing a horizontal 1-1
    islands = [[0, 1, 1], [1, 0, 1], [1, 3, 1], [3, 1, 1]]
    inst = PuzzleInstance(family="bridges", width=4, height=4,
                          payload={"islands": islands})
    sol = {"edges": [[0, 3, 1], [1, 2, 1]]}
    verdict = bridges.verify(inst, sol)
    assert verdict.reason == "crossing"


def test_disconnected_rejected():
    islands = [[0, 0, 1], [0, 2, 1], [2, 0, 1], [2, 2, 1]]
    inst = PuzzleInstance(family="bridges", width=3, height=3,
                          payload={"islands": islands})
    sol = {"edges": [[0, 1, 1], [2, 3, 1]]}
    verdict = bridges.verify(inst, sol)
    assert verdict.reason == "connectivity"


def test_worked_example_unique(bridges_example, bridges_example_solution):
    result = bridges.solve(bridges_example, limit=2)
    assert result.complete
    assert len(result.solutions) == 1
    assert result.solutions[0] == {
        "edges": sorted(bridges_example_solution["edges"])
    }


def test_forced_single_edge():
    islands = [[0, 0, 1], [0, 2, 1]]
    inst = PuzzleInstance(family="bridges", width=3, height=1,
                          payload={"islands": islands})
    result = bridges.solve(inst)
    assert [s["edges"] for s in result.solutions] == [[[0, 1, 1]]]
    edges, moves, solved = bridges.forced_closure(inst)
    assert solved and moves == [{"a": 0, "b": 1, "m": 1}]


def test_infeasible_returns_empty():
    islands = [[0, 0, 8], [0, 2, 1], [2, 0, 1], [4, 0, 1]]
    inst = PuzzleInstance(family="bridges", width=3, height=5,
                          payload={"islands": islands})
    assert bridges.solve(inst).solutions == []


def test_solver_matches_brute_force_on_small_boards():
    rng = rng_stream(11, "bridges-oracle")
    for _ in range(25):
        inst, _ = bridges.generate("5x5d0", rng)
        expect = brute_force(inst)
        got = bridges.solve(inst, limit=10).solutions
        assert sorted(map(str, expect)) == sorted(map(str, got))


def test_generation_deterministic():
    a, gold_a = bridges.generate("5x5d0", rng_stream(1, "gen"))
    b, gold_b = bridges.generate("5x5d0", rng_stream(1, "gen"))
    assert a.payload == b.payload and a.id == b.id
    assert gold_a == gold_b
    c, _ = bridges.generate("5x5d0", rng_stream(2, "gen"))
    assert c.payload != a.payload


def test_generated_instances_unique_and_verified():
    rng = rng_stream(3, "bridges-batch")
    for _ in range(20):
        inst, gold = bridges.generate("5x5d0", rng)
        result = bridges.solve(inst, limit=2)
        assert len(result.solutions) == 1
        assert bridges.verify(inst, result.solutions[0]).ok
        # gold path replays to the unique solution
        state = bridges.empty_state(inst.width, inst.height, inst.payload)
        for mv in gold:
            state = bridges.apply_move(inst.width, inst.height, inst.payload,
                                       state, mv)
        assert bridges.state_solution(state) == result.solutions[0]


def test_d0_closure_solves_easy():
    rng = rng_stream(5, "bridges-d0")
    for _ in range(10):
        inst, _ = bridges.generate("5x5d0", rng)
        _, _, solved = bridges.forced_closure(inst)
        assert solved


def test_dimension_parsing():
    assert bridges.parse_params("7x7d1") == (7, 7, 1)
    assert bridges.parse_params("10x10d2") == (10, 10, 2)
    with pytest.raises(PayloadError):
        bridges.parse_params("5x5")


def test_partial_verify_classes(bridges_example):
    inst = bridges_example
    # clean prefix of the gold solution has no violation
    assert bridges.partial_verify(inst, {(0, 1): 1}) is None
    # island 1 requires 1: two bridges overflow it
    assert bridges.partial_verify(inst, {(0, 1): 2})[0] == "count"
    # fixed island value tampered with
    assert bridges.partial_verify(inst, {}, {0: 4})[0] == "structure"
    # crossing bridges
    crossing = {(0, 1): 1, (2, 5): 2}
    # (0,0)-(0,3) runs along row 0; (1,2)-(4,2) crosses column 2 rows 2..3;
    # they do not intersect, so build a genuine crossing instead
    assert bridges.partial_verify(inst, crossing) is None
    islands = [[0, 1, 1], [1, 0, 1], [1, 3, 1], [3, 1, 1]]
    inst2 = PuzzleInstance(family="bridges", width=4, height=4,
                           payload={"islands": islands})
    assert bridges.partial_verify(inst2, {(0, 3): 1, (1, 2): 1})[0] == "crossing"
