"""Nonogram: reconstruct a binary grid from row/column run-length clues.

An empty line carries the empty clue list, never a zero.  The classic
per-line feasible-placement intersection runs to fixpoint before any
backtracking; difficulty tiers differ only in board size.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

from topopuzzles.core import (
    GenerationError,
    PayloadError,
    PuzzleInstance,
    Verdict,
    parse_dims,
)

R_STRUCTURE = "structure"
R_CLUE = "clue"

UNKNOWN, EMPTY, FILLED = -1, 0, 1


def validate_payload(width: int, height: int, payload: dict) -> None:
    rows = payload.get("row_clues")
    cols = payload.get("col_clues")
    if not isinstance(rows, list) or len(rows) != height:
        raise PayloadError("row_clues must list one clue list per row")
    if not isinstance(cols, list) or len(cols) != width:
        raise PayloadError("col_clues must list one clue list per column")
    for clues, length, what in (
        [(r, width, "row") for r in rows] + [(c, height, "col") for c in cols]
    ):
        if any((not isinstance(v, int)) or v < 1 for v in clues):
            raise PayloadError(f"non-positive run in a {what} clue")
        if clues and sum(clues) + len(clues) - 1 > length:
            raise PayloadError(f"{what} clue {clues} cannot fit in {length} cells")
    if sum(map(sum, rows)) != sum(map(sum, cols)):
        raise PayloadError("row and column clue sums disagree")


def runs_of(line: list[int]) -> list[int]:
    runs, current = [], 0
    for v in line:
        if v == FILLED:
            current += 1
        elif current:
            runs.append(current)
            current = 0
    if current:
        runs.append(current)
    return runs


def clues_from_grid(grid: list[list[int]]) -> dict:
    height, width = len(grid), len(grid[0])
    return {
        "row_clues": [runs_of(row) for row in grid],
        "col_clues": [runs_of([grid[r][c] for r in range(height)]) for c in range(width)],
    }


def verify(instance: PuzzleInstance, solution: dict) -> Verdict:
    payload = instance.payload
    grid = solution.get("filled")
    if (
        not isinstance(grid, list)
        or len(grid) != instance.height
        or any(len(row) != instance.width for row in grid)
        or any(v not in (0, 1) for row in grid for v in row)
    ):
        return Verdict.reject(R_STRUCTURE, "grid is not a full 0/1 matrix")
    for r, row in enumerate(grid):
        if runs_of(row) != payload["row_clues"][r]:
            return Verdict.reject(R_CLUE, f"row {r} runs {runs_of(row)}")
    for c in range(instance.width):
        col = [grid[r][c] for r in range(instance.height)]
        if runs_of(col) != payload["col_clues"][c]:
            return Verdict.reject(R_CLUE, f"col {c} runs {runs_of(col)}")
    return Verdict.accept()


# -- line solver -------------------------------------------------------------


def line_placements(clues: tuple[int, ...], cells: tuple[int, ...]):
    """All complete lines consistent with the clue and the partial cells."""
    n = len(cells)

    @lru_cache(maxsize=None)
    def rec(ci: int, pos: int) -> list[tuple[int, ...]]:
        if ci == len(clues):
            tail = cells[pos:]
            if FILLED in tail:
                return []
            return [(EMPTY,) * (n - pos)]
        run = clues[ci]
        out = []
        # leave a gap of `lead` empties then place the run
        max_lead = n - pos - (sum(clues[ci:]) + len(clues) - ci - 1)
        for lead in range(0, max_lead + 1):
            if FILLED in cells[pos : pos + lead]:
                break  # the run cannot start past a filled cell we skipped
            start = pos + lead
            seg = cells[start : start + run]
            if len(seg) < run or EMPTY in seg:
                continue
            after = start + run
            sep = ()
            if ci + 1 < len(clues):
                if after >= n or cells[after] == FILLED:
                    continue
                sep = (EMPTY,)
                after += 1
            for rest in rec(ci + 1, after):
                out.append((EMPTY,) * lead + (FILLED,) * run + sep + rest)
        return out

    result = rec(0, 0)
    rec.cache_clear()
    return result


def line_intersection(clues: tuple[int, ...], cells: tuple[int, ...]):
    """Cells common to every feasible placement; None when infeasible."""
    merged: list[int] | None = None
    for cand in line_placements(clues, cells):
        if merged is None:
            merged = list(cand)
        else:
            for i, v in enumerate(cand):
                if merged[i] != v:
                    merged[i] = UNKNOWN
            if all(v == UNKNOWN for v in merged):
                break
    return merged


@dataclass
class SolveResult:
    solutions: list[dict]
    complete: bool = True
    gold_moves: list[dict] = field(default_factory=list)


class _Budget(Exception):
    pass


def _propagate(payload, grid) -> bool:
    """Feasible-placement intersection to fixpoint; False on contradiction."""
    height, width = len(grid), len(grid[0])
    dirty = [("row", r) for r in range(height)] + [("col", c) for c in range(width)]
    while dirty:
        kind, idx = dirty.pop(0)
        if kind == "row":
            cells = tuple(grid[idx])
            clues = tuple(payload["row_clues"][idx])
        else:
            cells = tuple(grid[r][idx] for r in range(height))
            clues = tuple(payload["col_clues"][idx])
        merged = line_intersection(clues, cells)
        if merged is None:
            return False
        for i, v in enumerate(merged):
            if v == UNKNOWN or cells[i] != UNKNOWN:
                continue
            if kind == "row":
                grid[idx][i] = v
                if ("col", i) not in dirty:
                    dirty.append(("col", i))
            else:
                grid[i][idx] = v
                if ("row", i) not in dirty:
                    dirty.append(("row", i))
    return True


def solve(
    instance: PuzzleInstance,
    limit: int = 2,
    node_budget: int | None = 1_000_000,
) -> SolveResult:
    payload = instance.payload
    height, width = instance.height, instance.width
    solutions: list[dict] = []
    nodes = 0

    def search(grid) -> None:
        nonlocal nodes
        if len(solutions) >= limit:
            return
        nodes += 1
        if node_budget is not None and nodes > node_budget:
            raise _Budget()
        if not _propagate(payload, grid):
            return
        spot = next(
            ((r, c) for r in range(height) for c in range(width)
             if grid[r][c] == UNKNOWN),
            None,
        )
        if spot is None:
            sol = {"filled": [list(row) for row in grid]}
            if verify(instance, sol):
                solutions.append(sol)
            return
        r, c = spot
        for v in (FILLED, EMPTY):
            child = [list(row) for row in grid]
            child[r][c] = v
            search(child)
            if len(solutions) >= limit:
                return

    complete = True
    grid = [[UNKNOWN] * width for _ in range(height)]
    try:
        search(grid)
    except _Budget:
        complete = False

    gold: list[dict] = []
    if solutions:
        gold = gold_path(instance, solutions[0])
    return SolveResult(solutions=solutions, complete=complete, gold_moves=gold)


def deduction_solves(instance: PuzzleInstance) -> bool:
    grid = [[UNKNOWN] * instance.width for _ in range(instance.height)]
    if not _propagate(instance.payload, grid):
        return False
    return all(v != UNKNOWN for row in grid for v in row)


# -- gold path (moves commit one full line) -----------------------------------


def gold_path(instance: PuzzleInstance, solution: dict) -> list[dict]:
    """Commit lines in the order propagation completes them; when stalled the
    first incomplete row/col is committed from the solution."""
    payload = instance.payload
    height, width = instance.height, instance.width
    target = solution["filled"]
    grid = [[UNKNOWN] * width for _ in range(height)]
    committed: set[tuple[str, int]] = set()
    moves: list[dict] = []

    def line_cells(kind, idx):
        if kind == "row":
            return [target[idx][c] for c in range(width)]
        return [target[r][idx] for r in range(height)]

    def line_done(kind, idx):
        if kind == "row":
            return all(grid[idx][c] != UNKNOWN for c in range(width))
        return all(grid[r][idx] != UNKNOWN for r in range(height))

    all_lines = [("row", r) for r in range(height)] + [("col", c) for c in range(width)]
    while len(committed) < len(all_lines):
        _propagate(payload, grid)
        progressed = False
        for kind, idx in all_lines:
            if (kind, idx) in committed:
                continue
            if line_done(kind, idx):
                committed.add((kind, idx))
                moves.append({"line": kind, "index": idx, "cells": line_cells(kind, idx)})
                progressed = True
        if progressed:
            continue
        kind, idx = next(l for l in all_lines if l not in committed)
        cells = line_cells(kind, idx)
        if kind == "row":
            for c in range(width):
                grid[idx][c] = cells[c]
        else:
            for r in range(height):
                grid[r][idx] = cells[r]
        committed.add((kind, idx))
        moves.append({"line": kind, "index": idx, "cells": cells})
    return moves


def empty_state(width: int, height: int, payload: dict) -> dict:
    return {"grid": [[UNKNOWN] * width for _ in range(height)]}


def apply_move(width: int, height: int, payload: dict, state: dict, move: dict) -> dict:
    grid = [list(row) for row in state["grid"]]
    if move["line"] == "row":
        grid[move["index"]] = list(move["cells"])
    else:
        for r, v in enumerate(move["cells"]):
            grid[r][move["index"]] = v
    return {"grid": grid}


def state_solution(state: dict) -> dict:
    return {"filled": [list(row) for row in state["grid"]]}


def solution_state(solution: dict) -> dict:
    return {"grid": [list(row) for row in solution["filled"]]}


def move_text(payload: dict, move: dict) -> str:
    runs = runs_of([v for v in move["cells"]])
    return f"commit {move['line']} {move['index']} with runs {runs or 'empty'}"


# -- generation ---------------------------------------------------------------


def parse_params(params: str) -> tuple[int, int]:
    width, height, suffix = parse_dims(params)
    if suffix:
        raise PayloadError(f"pattern params carry no difficulty dial: {params!r}")
    return width, height


FILL_DENSITY = 0.55


def generate(params: str, rng, max_tries: int = 2000):
    width, height = parse_params(params)
    for _ in range(max_tries):
        grid = [
            [FILLED if rng.random() < FILL_DENSITY else EMPTY for _ in range(width)]
            for _ in range(height)
        ]
        payload = clues_from_grid(grid)
        try:
            validate_payload(width, height, payload)
        except PayloadError:
            continue
        instance = PuzzleInstance(
            family="pattern", width=width, height=height, payload=payload,
            engine_params=params,
        )
        result = solve(instance, limit=2, node_budget=100_000)
        if not result.complete or len(result.solutions) != 1:
            continue
        return instance, result.gold_moves
    raise GenerationError(f"pattern generation budget exhausted for {params}")
