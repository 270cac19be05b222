"""Hashiwokakero: connect numbered islands with non-crossing bridges.

Rules enforced by the verifier: each island's bridge count equals its number,
at most two bridges per island pair, bridges run horizontally/vertically
through empty water only, no two bridges cross, and the islands form one
connected component.  Cycles in the island graph are allowed.

Difficulty dial semantics (the WxHdD parameter's D):
    d0  solved by the forced-move closure alone (no hypotheticals),
    d1  needs single-branch lookahead on top of value propagation,
    d2  defeats one-level lookahead (nested search required).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from topopuzzles.core import (
    Coord,
    GenerationError,
    PayloadError,
    PuzzleInstance,
    Verdict,
    parse_dims,
)

MAX_REQUIRED = 8

# fixed rejection order
R_STRUCTURE = "structure"
R_COUNT = "count"
R_CROSSING = "crossing"
R_CONNECTIVITY = "connectivity"


def validate_payload(width: int, height: int, payload: dict) -> None:
    islands = payload.get("islands")
    if not isinstance(islands, list) or not islands:
        raise PayloadError("bridges payload needs a non-empty island list")
    seen = set()
    for entry in islands:
        r, c, v = entry
        if not (0 <= r < height and 0 <= c < width):
            raise PayloadError(f"island {entry} outside the board")
        if not (1 <= v <= MAX_REQUIRED):
            raise PayloadError(f"island value {v} outside 1..{MAX_REQUIRED}")
        if (r, c) in seen:
            raise PayloadError(f"duplicate island cell {(r, c)}")
        seen.add((r, c))
    # aligned neighbours at distance 1 would make their bridge invisible in
    # the ASCII form, so the model forbids them
    for (r, c) in seen:
        if (r, c + 1) in seen or (r + 1, c) in seen:
            raise PayloadError(f"adjacent aligned islands at {(r, c)}")
    if islands != sorted(islands):
        raise PayloadError("island list must be sorted by (row, col)")


def island_coords(payload: dict) -> list[Coord]:
    return [Coord(r, c) for r, c, _ in payload["islands"]]


def island_values(payload: dict) -> list[int]:
    return [v for _, _, v in payload["islands"]]


def corridor(a: Coord, b: Coord) -> list[Coord]:
    """Cells strictly between two aligned coordinates."""
    if a.row == b.row:
        lo, hi = sorted((a.col, b.col))
        return [Coord(a.row, c) for c in range(lo + 1, hi)]
    if a.col == b.col:
        lo, hi = sorted((a.row, b.row))
        return [Coord(r, a.col) for r in range(lo + 1, hi)]
    raise ValueError("coordinates not aligned")


@dataclass(frozen=True)
class Pair:
    a: int
    b: int
    cells: tuple[Coord, ...]
    horizontal: bool


def candidate_pairs(payload: dict) -> list[Pair]:
    """Visible aligned island pairs, sorted by (row_a, col_a, row_b, col_b)."""
    coords = island_coords(payload)
    occupied = set(coords)
    pairs = []
    for i, j in itertools.combinations(range(len(coords)), 2):
        a, b = coords[i], coords[j]
        if a.row != b.row and a.col != b.col:
            continue
        cells = corridor(a, b)
        if any(c in occupied for c in cells):
            continue
        pairs.append(Pair(i, j, tuple(cells), a.row == b.row))
    pairs.sort(key=lambda p: (coords[p.a], coords[p.b]))
    return pairs


def crossing_table(pairs: list[Pair]) -> list[set[int]]:
    """cross[i] = indices of pairs whose corridors intersect pair i's."""
    cell_owners: dict[Coord, list[int]] = {}
    for idx, p in enumerate(pairs):
        for cell in p.cells:
            cell_owners.setdefault(cell, []).append(idx)
    cross = [set() for _ in pairs]
    for owners in cell_owners.values():
        for i, j in itertools.combinations(owners, 2):
            cross[i].add(j)
            cross[j].add(i)
    return cross


def _connected(n: int, edges: dict[tuple[int, int], int]) -> bool:
    if n == 0:
        return True
    adj: dict[int, list[int]] = {i: [] for i in range(n)}
    for (a, b), m in edges.items():
        if m > 0:
            adj[a].append(b)
            adj[b].append(a)
    seen = {0}
    stack = [0]
    while stack:
        for nxt in adj[stack.pop()]:
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return len(seen) == n


def _edges_from_solution(payload: dict, solution: dict):
    """Return (edges dict, None) or (None, Verdict) on structural problems."""
    coords = island_coords(payload)
    occupied = set(coords)
    raw = solution.get("edges")
    if not isinstance(raw, list):
        return None, Verdict.reject(R_STRUCTURE, "missing edge list")
    edges: dict[tuple[int, int], int] = {}
    for entry in raw:
        try:
            a, b, m = entry
        except (TypeError, ValueError):
            return None, Verdict.reject(R_STRUCTURE, f"malformed edge {entry!r}")
        if not (isinstance(a, int) and isinstance(b, int) and isinstance(m, int)):
            return None, Verdict.reject(R_STRUCTURE, f"malformed edge {entry!r}")
        if not (0 <= a < len(coords) and 0 <= b < len(coords)) or a >= b:
            return None, Verdict.reject(R_STRUCTURE, f"bad island index in {entry!r}")
        if not (1 <= m <= 2):
            return None, Verdict.reject(R_STRUCTURE, f"multiplicity {m} outside 1..2")
        if (a, b) in edges:
            return None, Verdict.reject(R_STRUCTURE, f"duplicate pair ({a},{b})")
        pa, pb = coords[a], coords[b]
        if pa.row != pb.row and pa.col != pb.col:
            return None, Verdict.reject(R_STRUCTURE, f"islands {a},{b} not aligned")
        edges[(a, b)] = m
    # corridor/island collisions are crossing-class, checked by the caller
    return edges, None


def verify(instance: PuzzleInstance, solution: dict) -> Verdict:
    """Accept iff counts match, nothing crosses, and the graph is connected.

    Rejection carries the first violated class in the fixed order
    structure -> count -> crossing -> connectivity.
    """
    payload = instance.payload
    coords = island_coords(payload)
    values = island_values(payload)
    occupied = set(coords)

    edges, bad = _edges_from_solution(payload, solution)
    if bad is not None:
        return bad

    degree = [0] * len(coords)
    for (a, b), m in edges.items():
        degree[a] += m
        degree[b] += m
    for i, v in enumerate(values):
        if degree[i] != v:
            return Verdict.reject(
                R_COUNT, f"island {i} at {tuple(coords[i])} has {degree[i]} != {v}"
            )

    used: dict[Coord, tuple[int, int]] = {}
    for (a, b), m in sorted(edges.items()):
        for cell in corridor(coords[a], coords[b]):
            if cell in occupied:
                return Verdict.reject(R_CROSSING, f"bridge ({a},{b}) covers an island")
            if cell in used:
                return Verdict.reject(
                    R_CROSSING, f"bridges {used[cell]} and ({a},{b}) cross at {tuple(cell)}"
                )
            used[cell] = (a, b)

    if not _connected(len(coords), edges):
        return Verdict.reject(R_CONNECTIVITY, "islands form more than one component")
    return Verdict.accept()


def partial_verify(
    instance: PuzzleInstance,
    edges: dict[tuple[int, int], int],
    island_overrides: dict[int, int] | None = None,
) -> tuple[str, str] | None:
    """Check only monotone constraints on a partial edge set.

    Returns (class, detail) for the first violation, or None.  Completeness
    and connectivity are never checked here.  ``island_overrides`` models a
    board whose printed island numbers were tampered with.
    """
    payload = instance.payload
    coords = island_coords(payload)
    values = island_values(payload)
    occupied = set(coords)

    if island_overrides:
        for idx, shown in island_overrides.items():
            if not (0 <= idx < len(values)):
                return (R_STRUCTURE, f"override of unknown island {idx}")
            if shown != values[idx]:
                return (
                    R_STRUCTURE,
                    f"island {idx} shows {shown} but the puzzle fixes {values[idx]}",
                )

    for (a, b), m in edges.items():
        if not (0 <= a < len(coords) and 0 <= b < len(coords)) or a >= b:
            return (R_STRUCTURE, f"bad island index ({a},{b})")
        if not (0 <= m <= 2):
            return (R_STRUCTURE, f"multiplicity {m} outside 0..2")
        pa, pb = coords[a], coords[b]
        if pa.row != pb.row and pa.col != pb.col:
            return (R_STRUCTURE, f"islands {a},{b} not aligned")

    degree = [0] * len(coords)
    for (a, b), m in edges.items():
        degree[a] += m
        degree[b] += m
    for i, v in enumerate(values):
        if degree[i] > v:
            return (R_COUNT, f"island {i} overflows: {degree[i]} > {v}")

    used: dict[Coord, tuple[int, int]] = {}
    for (a, b), m in sorted(edges.items()):
        if m == 0:
            continue
        for cell in corridor(coords[a], coords[b]):
            if cell in occupied:
                return (R_CROSSING, f"bridge ({a},{b}) covers an island")
            if cell in used:
                return (R_CROSSING, f"bridges {used[cell]} and ({a},{b}) cross")
            used[cell] = (a, b)
    return None


# -- solving ---------------------------------------------------------------


class _Budget(Exception):
    pass


@dataclass
class SolveResult:
    solutions: list[dict]
    complete: bool = True
    gold_moves: list[dict] = field(default_factory=list)


def _propagate(values, pairs, cross, domains) -> bool:
    """Value-elimination fixpoint; False on contradiction."""
    island_pairs: dict[int, list[int]] = {i: [] for i in range(len(values))}
    for idx, p in enumerate(pairs):
        island_pairs[p.a].append(idx)
        island_pairs[p.b].append(idx)
    changed = True
    while changed:
        changed = False
        for idx, p in enumerate(pairs):
            if min(domains[idx]) >= 1:
                for other in cross[idx]:
                    if domains[other] - {0}:
                        if 0 not in domains[other]:
                            return False
                        if domains[other] != {0}:
                            domains[other] = {0}
                            changed = True
        for i, req in enumerate(values):
            pids = island_pairs[i]
            highs = {pid: max(domains[pid]) for pid in pids}
            lows = {pid: min(domains[pid]) for pid in pids}
            s_hi = sum(highs.values())
            s_lo = sum(lows.values())
            if s_hi < req or s_lo > req:
                return False
            for pid in pids:
                keep = set()
                for v in domains[pid]:
                    if v + (s_hi - highs[pid]) < req:
                        continue
                    if v + (s_lo - lows[pid]) > req:
                        continue
                    keep.add(v)
                if not keep:
                    return False
                if keep != domains[pid]:
                    domains[pid] = keep
                    changed = True
    return True


def _possible_connected(n, pairs, domains) -> bool:
    edges = {(p.a, p.b): 1 for idx, p in enumerate(pairs) if max(domains[idx]) >= 1}
    return _connected(n, edges)


def solve(
    instance: PuzzleInstance,
    limit: int = 2,
    node_budget: int | None = 2_000_000,
) -> SolveResult:
    """Enumerate solutions up to ``limit``.

    Propagation plus backtracking; branch order is the (row, col, row, col)
    pair order with higher multiplicity tried first.  ``complete`` is False
    when the node budget ran out before the search space was exhausted.
    """
    payload = instance.payload
    values = island_values(payload)
    pairs = candidate_pairs(payload)
    cross = crossing_table(pairs)
    domains = [{0, 1, 2} for _ in pairs]

    solutions: list[dict] = []
    nodes = 0

    def leaf(domains) -> None:
        edges = {
            (pairs[idx].a, pairs[idx].b): next(iter(domains[idx]))
            for idx in range(len(pairs))
            if next(iter(domains[idx])) > 0
        }
        if _connected(len(values), edges):
            solutions.append(
                {"edges": sorted([a, b, m] for (a, b), m in edges.items())}
            )

    def search(domains) -> None:
        nonlocal nodes
        if len(solutions) >= limit:
            return
        nodes += 1
        if node_budget is not None and nodes > node_budget:
            raise _Budget()
        if not _propagate(values, pairs, cross, domains):
            return
        if not _possible_connected(len(values), pairs, domains):
            return
        undecided = [idx for idx in range(len(pairs)) if len(domains[idx]) > 1]
        if not undecided:
            leaf(domains)
            return
        pick = undecided[0]
        for v in sorted(domains[pick], reverse=True):
            child = [set(d) for d in domains]
            child[pick] = {v}
            search(child)
            if len(solutions) >= limit:
                return

    complete = True
    try:
        search(domains)
    except _Budget:
        complete = False

    gold: list[dict] = []
    if solutions:
        gold = gold_path(instance, solutions[0])
    return SolveResult(solutions=solutions, complete=complete, gold_moves=gold)


# -- forced-move closure (shared with the tool-service policy) ---------------


def joint_capacity(values, coords, occupied, edges, pair: Pair) -> int:
    """Bridges that can still be added between a visible pair right now."""
    cur = edges.get((pair.a, pair.b), 0)
    blocked = False
    placed_cells = _placed_cells(coords, edges, skip=(pair.a, pair.b))
    for cell in pair.cells:
        if cell in placed_cells:
            blocked = True
            break
    if blocked:
        return 0
    rem_a = values[pair.a] - _degree(values, edges, pair.a)
    rem_b = values[pair.b] - _degree(values, edges, pair.b)
    return max(0, min(2 - cur, rem_a, rem_b))


def _degree(values, edges, i) -> int:
    return sum(m for (a, b), m in edges.items() if i in (a, b))


def _placed_cells(coords, edges, skip=None) -> set[Coord]:
    cells: set[Coord] = set()
    for (a, b), m in edges.items():
        if m == 0 or (a, b) == skip:
            continue
        cells.update(corridor(coords[a], coords[b]))
    return cells


def forced_moves(payload: dict, edges: dict[tuple[int, int], int]) -> list[dict]:
    """One round of forced placements from the current state.

    For each island with remaining requirement r and open pairs with joint
    capacities c_j: any pair must carry at least r - sum(other capacities)
    additional bridges.  Returns 'set pair to m' moves, scanning islands in
    index order; empty when nothing is forced.
    """
    coords = island_coords(payload)
    values = island_values(payload)
    occupied = set(coords)
    pairs = candidate_pairs(payload)
    by_island: dict[int, list[Pair]] = {i: [] for i in range(len(values))}
    for p in pairs:
        by_island[p.a].append(p)
        by_island[p.b].append(p)

    moves = []
    for i in range(len(values)):
        rem = values[i] - _degree(values, edges, i)
        if rem <= 0:
            continue
        caps = [(p, joint_capacity(values, coords, occupied, edges, p)) for p in by_island[i]]
        total = sum(c for _, c in caps)
        for p, c in caps:
            need = rem - (total - c)
            if need > 0:
                cur = edges.get((p.a, p.b), 0)
                moves.append({"a": p.a, "b": p.b, "m": cur + need})
    # deduplicate, keeping the strongest requirement per pair
    best: dict[tuple[int, int], int] = {}
    order: list[tuple[int, int]] = []
    for mv in moves:
        key = (mv["a"], mv["b"])
        if key not in best:
            order.append(key)
        best[key] = max(best.get(key, 0), mv["m"])
    return [{"a": a, "b": b, "m": best[(a, b)]} for a, b in order]


def forced_closure(
    instance: PuzzleInstance, edges: dict[tuple[int, int], int] | None = None
) -> tuple[dict[tuple[int, int], int], list[dict], bool]:
    """Apply forced moves until fixpoint.

    Returns (edges, moves, solved) where solved means every island is
    satisfied.  One move is applied per round so corridor effects propagate
    deterministically.
    """
    payload = instance.payload
    values = island_values(payload)
    edges = dict(edges or {})
    moves: list[dict] = []
    while True:
        round_moves = forced_moves(payload, edges)
        if not round_moves:
            break
        mv = round_moves[0]
        edges[(mv["a"], mv["b"])] = mv["m"]
        moves.append(mv)
    solved = all(
        _degree(values, edges, i) == v for i, v in enumerate(values)
    )
    return edges, moves, solved


def _lookahead_solves(instance: PuzzleInstance, max_nest: int) -> bool:
    """Propagation plus assume-and-refute nesting up to ``max_nest`` levels."""
    payload = instance.payload
    values = island_values(payload)
    pairs = candidate_pairs(payload)
    cross = crossing_table(pairs)

    def reduce(domains, depth) -> bool | None:
        # True: solved, False: contradiction, None: stalled
        if not _propagate(values, pairs, cross, domains):
            return False
        undecided = [i for i in range(len(pairs)) if len(domains[i]) > 1]
        if not undecided:
            edges = {
                (pairs[i].a, pairs[i].b): next(iter(domains[i]))
                for i in range(len(pairs))
                if next(iter(domains[i])) > 0
            }
            return _connected(len(values), edges)
        if depth == 0:
            return None
        changed = True
        while changed:
            changed = False
            for idx in list(undecided):
                if len(domains[idx]) <= 1:
                    continue
                for v in sorted(domains[idx]):
                    child = [set(d) for d in domains]
                    child[idx] = {v}
                    if reduce(child, depth - 1) is False:
                        domains[idx].discard(v)
                        changed = True
                        if not domains[idx]:
                            return False
            if changed:
                if not _propagate(values, pairs, cross, domains):
                    return False
                undecided = [i for i in range(len(pairs)) if len(domains[i]) > 1]
                if not undecided:
                    edges = {
                        (pairs[i].a, pairs[i].b): next(iter(domains[i]))
                        for i in range(len(pairs))
                        if next(iter(domains[i])) > 0
                    }
                    return _connected(len(values), edges)
        return None

    domains = [{0, 1, 2} for _ in pairs]
    return reduce(domains, max_nest) is True


def classify_depth(instance: PuzzleInstance) -> int:
    """0 = forced closure solves, 1 = one-level lookahead needed, 2 = deeper."""
    _, _, solved = forced_closure(instance)
    if solved:
        return 0
    if _lookahead_solves(instance, 1):
        return 1
    return 2


# -- gold path ---------------------------------------------------------------


def gold_path(instance: PuzzleInstance, solution: dict) -> list[dict]:
    """Ordered move list reproducing ``solution`` from the blank board.

    Forced-move closure supplies the order; if it stalls the lexicographically
    first undecided solution edge is injected and the closure resumes.
    """
    target = {(a, b): m for a, b, m in solution["edges"]}
    payload = instance.payload
    edges: dict[tuple[int, int], int] = {}
    moves: list[dict] = []
    while edges != target:
        round_moves = forced_moves(payload, edges)
        applied = False
        for mv in round_moves:
            key = (mv["a"], mv["b"])
            # the closure is sound for unique-solution boards, but replay
            # from arbitrary partial states must not overshoot the target
            if target.get(key, 0) >= mv["m"] > edges.get(key, 0):
                edges[key] = mv["m"]
                moves.append(mv)
                applied = True
                break
        if applied:
            continue
        pending = sorted(
            key for key, m in target.items() if edges.get(key, 0) < m
        )
        key = pending[0]
        mv = {"a": key[0], "b": key[1], "m": target[key]}
        edges[key] = target[key]
        moves.append(mv)
    return moves


def empty_state(width: int, height: int, payload: dict) -> dict:
    return {}


def apply_move(width: int, height: int, payload: dict, state: dict, move: dict) -> dict:
    new = dict(state)
    new[(move["a"], move["b"])] = move["m"]
    return new


def state_solution(state: dict) -> dict:
    return {"edges": sorted([a, b, m] for (a, b), m in state.items() if m > 0)}


def solution_state(solution: dict) -> dict:
    return {(a, b): m for a, b, m in solution["edges"]}


def move_text(payload: dict, move: dict) -> str:
    coords = island_coords(payload)
    a, b, m = move["a"], move["b"], move["m"]
    return (
        f"set {m} bridge{'s' if m > 1 else ''} between island {a} at "
        f"{tuple(coords[a])} and island {b} at {tuple(coords[b])}"
    )


# -- generation ---------------------------------------------------------------


def _random_layout(width: int, height: int, rng) -> dict | None:
    """Scatter islands via a random spanning structure, then densify."""
    target = max(5, round(width * height / 3.5))
    first = Coord(int(rng.integers(0, height)), int(rng.integers(0, width)))
    coords = [first]
    occupied = {first}
    edges: dict[tuple[int, int], int] = {}
    corridors: set[Coord] = set()
    span_degree: dict[int, int] = {0: 0}

    def blocked(cells):
        return any(cell in occupied or cell in corridors for cell in cells)

    attempts = 0
    while len(coords) < target and attempts < target * 30:
        attempts += 1
        base_idx = int(rng.integers(0, len(coords)))
        if span_degree[base_idx] >= MAX_REQUIRED - 2:
            continue
        base = coords[base_idx]
        dr, dc = [(0, 1), (0, -1), (1, 0), (-1, 0)][int(rng.integers(0, 4))]
        dist = int(rng.integers(2, 5))
        spot = Coord(base.row + dr * dist, base.col + dc * dist)
        if not (0 <= spot.row < height and 0 <= spot.col < width):
            continue
        if spot in occupied or spot in corridors:
            continue
        # keep aligned islands at least two apart
        near = [
            Coord(spot.row + nr, spot.col + nc)
            for nr, nc in [(0, 1), (0, -1), (1, 0), (-1, 0)]
        ]
        if any(n in occupied for n in near):
            continue
        path = corridor(base, spot)
        if blocked(path):
            continue
        mult = int(rng.integers(1, 3))
        idx = len(coords)
        coords.append(spot)
        occupied.add(spot)
        a, b = sorted((base_idx, idx))
        edges[(a, b)] = mult
        corridors.update(path)
        span_degree[base_idx] += mult
        span_degree[idx] = mult

    if len(coords) < 2:
        return None

    # densify: extra edges between visible pairs, respecting the value cap
    degree: dict[int, int] = {i: 0 for i in range(len(coords))}
    for (a, b), m in edges.items():
        degree[a] += m
        degree[b] += m
    order = list(range(len(coords)))
    rng.shuffle(order)
    for i in order:
        for j in order:
            if j <= i:
                continue
            a, b = coords[i], coords[j]
            if a.row != b.row and a.col != b.col:
                continue
            if (i, j) in edges:
                continue
            cells = corridor(a, b)
            if not cells:
                continue
            if any(c in occupied or c in corridors for c in cells):
                continue
            mult = int(rng.integers(1, 3))
            if degree[i] + mult > MAX_REQUIRED or degree[j] + mult > MAX_REQUIRED:
                continue
            if rng.random() < 0.5:
                continue
            edges[tuple(sorted((i, j)))] = mult
            degree[i] += mult
            degree[j] += mult
            corridors.update(cells)

    degree = {i: 0 for i in range(len(coords))}
    for (a, b), m in edges.items():
        degree[a] += m
        degree[b] += m
    if any(d == 0 or d > MAX_REQUIRED for d in degree.values()):
        return None

    pairs = sorted(range(len(coords)), key=lambda i: coords[i])
    remap = {old: new for new, old in enumerate(pairs)}
    islands = sorted([coords[i].row, coords[i].col, degree[i]] for i in range(len(coords)))
    sol_edges = sorted(
        [min(remap[a], remap[b]), max(remap[a], remap[b]), m]
        for (a, b), m in edges.items()
    )
    return {
        "payload": {"islands": islands},
        "solution": {"edges": sol_edges},
    }


def parse_params(params: str) -> tuple[int, int, int]:
    width, height, suffix = parse_dims(params)
    if not suffix.startswith("d") or not suffix[1:].isdigit():
        raise PayloadError(f"bridges params need a dN suffix: {params!r}")
    return width, height, int(suffix[1:])


def generate(params: str, rng, max_tries: int = 4000):
    """Build a unique-solution instance matching the difficulty dial.

    Returns (PuzzleInstance, gold_moves).  Raises GenerationError when the
    retry budget runs out.
    """
    width, height, want_depth = parse_params(params)
    for _ in range(max_tries):
        layout = _random_layout(width, height, rng)
        if layout is None:
            continue
        payload = layout["payload"]
        try:
            validate_payload(width, height, payload)
        except PayloadError:
            continue
        instance = PuzzleInstance(
            family="bridges", width=width, height=height, payload=payload,
            engine_params=params,
        )
        result = solve(instance, limit=2, node_budget=200_000)
        if not result.complete or len(result.solutions) != 1:
            continue
        depth = classify_depth(instance)
        if want_depth == 0 and depth != 0:
            continue
        if want_depth == 1 and depth != 1:
            continue
        if want_depth >= 2 and depth < 2:
            continue
        return instance, result.gold_moves
    raise GenerationError(f"bridges generation budget exhausted for {params}")
