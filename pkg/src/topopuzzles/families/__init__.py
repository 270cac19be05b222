"""Per-family puzzle models: generator, solver, verifier.

Every family module exposes the same surface:

    validate_payload(width, height, payload)
    verify(instance, solution) -> Verdict
    solve(instance, limit=2, node_budget=...) -> SolveResult
    generate(params, rng) -> (PuzzleInstance, gold_moves)
    apply_move(width, height, payload, state, move) / empty_state(...)
    state_solution(state) / solution_state(solution)
    move_text(payload, move)
"""

import importlib

from topopuzzles.core import FAMILIES


def get(family: str):
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}")
    return importlib.import_module(f"topopuzzles.families.{family}")
