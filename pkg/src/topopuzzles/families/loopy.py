"""Slitherlink on a square grid: draw one closed loop matching cell clues.

Edges live on the cell lattice: h_edges[r][c] borders cell rows r-1/r at
column c ((H+1) x W of them), v_edges[r][c] borders cell columns c-1/c at
row r (H x (W+1)).  A solution states every edge explicitly on or off, and
the loop must be non-empty even when no clue forces it.

Difficulty codes: de = propagation closure solves, dt = one-level lookahead
needed, dh = deeper search required.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from topopuzzles.core import (
    GenerationError,
    PayloadError,
    PuzzleInstance,
    Verdict,
    parse_dims,
)

R_STRUCTURE = "structure"
R_CLUE = "clue"
R_DEGREE = "degree"
R_LOOP = "loop"

ON, OFF, UNKNOWN = 1, 0, -1


def validate_payload(width: int, height: int, payload: dict) -> None:
    clues = payload.get("clues")
    if not isinstance(clues, list):
        raise PayloadError("loopy payload needs a clue list")
    seen = set()
    for entry in clues:
        r, c, v = entry
        if not (0 <= r < height and 0 <= c < width):
            raise PayloadError(f"clue {entry} outside the board")
        if not (0 <= v <= 4):
            raise PayloadError(f"clue value {v} outside 0..4")
        if (r, c) in seen:
            raise PayloadError(f"duplicate clue cell {(r, c)}")
        seen.add((r, c))
    if clues != sorted(clues):
        raise PayloadError("clue list must be sorted")


def edge_slots(width: int, height: int):
    """All edges as ('h', r, c) / ('v', r, c) tuples in lattice order."""
    slots = []
    for r in range(height + 1):
        for c in range(width):
            slots.append(("h", r, c))
    for r in range(height):
        for c in range(width + 1):
            slots.append(("v", r, c))
    return slots


def cell_edges(r: int, c: int):
    return [("h", r, c), ("h", r + 1, c), ("v", r, c), ("v", r, c + 1)]


def vertex_edges(r: int, c: int, width: int, height: int):
    """Edges incident to lattice vertex (r, c), 0 <= r <= H, 0 <= c <= W."""
    out = []
    if c > 0:
        out.append(("h", r, c - 1))
    if c < width:
        out.append(("h", r, c))
    if r > 0:
        out.append(("v", r - 1, c))
    if r < height:
        out.append(("v", r, c))
    return out


def edge_vertices(edge):
    kind, r, c = edge
    if kind == "h":
        return (r, c), (r, c + 1)
    return (r, c), (r + 1, c)


def _solution_edges(instance, solution):
    h = solution.get("h_edges")
    v = solution.get("v_edges")
    W, H = instance.width, instance.height
    if (
        not isinstance(h, list) or len(h) != H + 1
        or any(len(row) != W for row in h)
        or not isinstance(v, list) or len(v) != H
        or any(len(row) != W + 1 for row in v)
        or any(x not in (0, 1) for row in h + v for x in row)
    ):
        return None
    return {("h", r, c): h[r][c] for r in range(H + 1) for c in range(W)} | {
        ("v", r, c): v[r][c] for r in range(H) for c in range(W + 1)
    }


def verify(instance: PuzzleInstance, solution: dict) -> Verdict:
    """Accept iff every vertex has on-degree 0 or 2, the on-edges form exactly
    one non-empty cycle, and clue counts match."""
    W, H = instance.width, instance.height
    state = _solution_edges(instance, solution)
    if state is None:
        return Verdict.reject(R_STRUCTURE, "edge maps are not total 0/1 grids")

    for r, c, v in instance.payload["clues"]:
        count = sum(state[e] for e in cell_edges(r, c))
        if count != v:
            return Verdict.reject(R_CLUE, f"cell ({r},{c}) has {count} != {v}")

    on_edges = [e for e, x in state.items() if x == ON]
    if not on_edges:
        return Verdict.reject(R_LOOP, "no loop drawn")

    degree: dict[tuple[int, int], int] = {}
    for e in on_edges:
        for vtx in edge_vertices(e):
            degree[vtx] = degree.get(vtx, 0) + 1
    for vtx, d in degree.items():
        if d != 2:
            return Verdict.reject(R_DEGREE, f"vertex {vtx} has degree {d}")

    # single cycle: walk from one on-edge and count reachable on-edges
    adj: dict[tuple[int, int], list] = {}
    for e in on_edges:
        a, b = edge_vertices(e)
        adj.setdefault(a, []).append(b)
        adj.setdefault(b, []).append(a)
    start = edge_vertices(on_edges[0])[0]
    seen = {start}
    stack = [start]
    while stack:
        for nxt in adj[stack.pop()]:
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    if len(seen) != len(degree):
        return Verdict.reject(R_LOOP, "more than one loop")
    return Verdict.accept()


def jordan_parity_ok(instance: PuzzleInstance, solution: dict) -> bool:
    """Independent check: each row crosses vertical on-edges an even number
    of times."""
    for r in range(instance.height):
        crossings = sum(solution["v_edges"][r])
        if crossings % 2:
            return False
    return True


# -- solving -------------------------------------------------------------------


@dataclass
class SolveResult:
    solutions: list[dict]
    complete: bool = True
    gold_moves: list[dict] = field(default_factory=list)


class _Budget(Exception):
    pass


class _Contradiction(Exception):
    pass


class _Engine:
    """Integer-slot propagation engine shared by solve/lookahead/closure."""

    def __init__(self, instance):
        W, H = instance.width, instance.height
        self.W, self.H = W, H
        self.slots = edge_slots(W, H)
        self.slot_id = {e: i for i, e in enumerate(self.slots)}
        self.n = len(self.slots)

        self.vertex_slots = []          # per vertex: slot ids
        self.vertex_of = [[] for _ in range(self.n)]  # per slot: vertex idxs
        vid = 0
        for r in range(H + 1):
            for c in range(W + 1):
                ids = [self.slot_id[e] for e in vertex_edges(r, c, W, H)]
                self.vertex_slots.append(ids)
                for s in ids:
                    self.vertex_of[s].append(vid)
                vid += 1

        self.clue_vals = []
        self.clue_slots = []
        self.clue_of = [[] for _ in range(self.n)]
        for ci, (r, c, v) in enumerate(instance.payload["clues"]):
            ids = [self.slot_id[e] for e in cell_edges(r, c)]
            self.clue_vals.append(v)
            self.clue_slots.append(ids)
            for s in ids:
                self.clue_of[s].append(ci)

        # slot endpoints as flat vertex ids for the cycle rule
        self.ends = []
        for e in self.slots:
            (r1, c1), (r2, c2) = edge_vertices(e)
            self.ends.append((r1 * (W + 1) + c1, r2 * (W + 1) + c2))

    def fresh(self):
        return [UNKNOWN] * self.n

    def propagate(self, state, dirty=None) -> bool:
        """Vertex, cell and closed-cycle rules to fixpoint; False on
        contradiction.  ``dirty`` lists slot ids that changed since the last
        fixpoint; None means check everything."""
        if dirty is None:
            vqueue = set(range(len(self.vertex_slots)))
            cqueue = set(range(len(self.clue_vals)))
        else:
            vqueue, cqueue = set(), set()
            for s in dirty:
                vqueue.update(self.vertex_of[s])
                cqueue.update(self.clue_of[s])

        on_changed = [True]

        def set_slot(s, value):
            if state[s] == value:
                return False
            if state[s] != UNKNOWN:
                raise _Contradiction()
            state[s] = value
            if value == ON:
                on_changed[0] = True
            vqueue.update(self.vertex_of[s])
            cqueue.update(self.clue_of[s])
            return True

        try:
            while True:
                while vqueue or cqueue:
                    if vqueue:
                        ids = self.vertex_slots[vqueue.pop()]
                        on = unk = 0
                        for s in ids:
                            v = state[s]
                            if v == ON:
                                on += 1
                            elif v == UNKNOWN:
                                unk += 1
                        if on > 2 or (on == 1 and unk == 0):
                            raise _Contradiction()
                        if on == 2 and unk:
                            for s in ids:
                                if state[s] == UNKNOWN:
                                    set_slot(s, OFF)
                        elif on == 1 and unk == 1:
                            for s in ids:
                                if state[s] == UNKNOWN:
                                    set_slot(s, ON)
                        elif on == 0 and unk == 1:
                            for s in ids:
                                if state[s] == UNKNOWN:
                                    set_slot(s, OFF)
                    else:
                        ci = cqueue.pop()
                        ids = self.clue_slots[ci]
                        want = self.clue_vals[ci]
                        on = unk = 0
                        for s in ids:
                            v = state[s]
                            if v == ON:
                                on += 1
                            elif v == UNKNOWN:
                                unk += 1
                        if on > want or on + unk < want:
                            raise _Contradiction()
                        if unk and on == want:
                            for s in ids:
                                if state[s] == UNKNOWN:
                                    set_slot(s, OFF)
                        elif unk and on + unk == want:
                            for s in ids:
                                if state[s] == UNKNOWN:
                                    set_slot(s, ON)
                # closed-cycle rule, global: only ON assignments can close a
                # cycle, so skip the scan when none happened
                if not on_changed[0]:
                    break
                on_changed[0] = False
                if not self._cycle_rule(state, set_slot):
                    break
        except _Contradiction:
            return False
        return True

    def _cycle_rule(self, state, set_slot) -> bool:
        n_vertices = (self.W + 1) * (self.H + 1)
        parent = list(range(n_vertices))

        def find(x):
            root = x
            while parent[root] != root:
                root = parent[root]
            while parent[x] != x:
                parent[x], x = root, parent[x]
            return root

        closed = False
        for s in range(self.n):
            if state[s] != ON:
                continue
            a, b = self.ends[s]
            ra, rb = find(a), find(b)
            if ra == rb:
                closed = True
            else:
                parent[ra] = rb
        if not closed:
            return False
        roots = set()
        for s in range(self.n):
            if state[s] == ON:
                roots.add(find(self.ends[s][0]))
        if len(roots) > 1:
            raise _Contradiction()
        changed = False
        for s in range(self.n):
            if state[s] == UNKNOWN:
                set_slot(s, OFF)
                changed = True
        return changed

    def as_solution(self, state):
        W, H = self.W, self.H
        return {
            "h_edges": [
                [state[self.slot_id[("h", r, c)]] for c in range(W)]
                for r in range(H + 1)
            ],
            "v_edges": [
                [state[self.slot_id[("v", r, c)]] for c in range(W + 1)]
                for r in range(H)
            ],
        }


def solve(
    instance: PuzzleInstance,
    limit: int = 2,
    node_budget: int | None = 1_000_000,
    want_gold: bool = True,
) -> SolveResult:
    eng = _Engine(instance)
    solutions: list[dict] = []
    nodes = 0

    def search(state, dirty):
        nonlocal nodes
        if len(solutions) >= limit:
            return
        nodes += 1
        if node_budget is not None and nodes > node_budget:
            raise _Budget()
        if not eng.propagate(state, dirty):
            return
        # prefer extending an open chain end: vertices with exactly one ON
        # edge force a decision soon, which prunes much earlier
        pick = -1
        for ids in eng.vertex_slots:
            on = unk = 0
            cand = -1
            for s in ids:
                v = state[s]
                if v == ON:
                    on += 1
                elif v == UNKNOWN:
                    unk += 1
                    cand = s
            if on == 1 and unk:
                pick = cand
                break
        if pick < 0:
            for s in range(eng.n):
                if state[s] == UNKNOWN:
                    pick = s
                    break
        if pick < 0:
            sol = eng.as_solution(state)
            if verify(instance, sol):
                solutions.append(sol)
            return
        for value in (ON, OFF):
            child = list(state)
            child[pick] = value
            search(child, [pick])
            if len(solutions) >= limit:
                return

    complete = True
    try:
        search(eng.fresh(), None)
    except _Budget:
        complete = False

    gold: list[dict] = []
    if solutions and want_gold:
        gold = gold_path(instance, solutions[0])
    return SolveResult(solutions=solutions, complete=complete, gold_moves=gold)


def _la_reduce(instance, eng, state, depth, dirty=None):
    """Propagation plus assume-and-refute nesting; True when fully decided
    and verified, False on contradiction, None when stalled.  ``dirty`` lists
    the slots changed since the state was last at fixpoint."""

    def full_ok(st):
        return bool(verify(instance, eng.as_solution(st)))

    if not eng.propagate(state, dirty):
        return False
    if UNKNOWN not in state:
        return full_ok(state)
    if depth == 0:
        return None
    changed = True
    while changed:
        changed = False
        for s in range(eng.n):
            if state[s] != UNKNOWN:
                continue
            for value in (ON, OFF):
                child = list(state)
                child[s] = value
                if _la_reduce(instance, eng, child, depth - 1, [s]) is False:
                    state[s] = OFF if value == ON else ON
                    changed = True
                    if not eng.propagate(state, [s]):
                        return False
                    break
        if UNKNOWN not in state:
            return full_ok(state)
    return None


def _lookahead_solves(instance, max_nest: int) -> bool:
    eng = _Engine(instance)
    return _la_reduce(instance, eng, eng.fresh(), max_nest) is True


def deduction_solves(instance: PuzzleInstance) -> bool:
    eng = _Engine(instance)
    state = eng.fresh()
    if not eng.propagate(state, None):
        return False
    return UNKNOWN not in state


def classify_depth(instance: PuzzleInstance) -> int:
    if deduction_solves(instance):
        return 0
    if _lookahead_solves(instance, 1):
        return 1
    return 2


def gold_path(instance: PuzzleInstance, solution: dict) -> list[dict]:
    """Edges in propagation-decision order; stalls inject the first undecided
    edge from the solution."""
    eng = _Engine(instance)
    target = [
        solution["h_edges"][r][c] if k == "h" else solution["v_edges"][r][c]
        for k, r, c in eng.slots
    ]
    state = eng.fresh()
    moves: list[dict] = []
    dirty = None
    while UNKNOWN in state:
        before = list(state)
        eng.propagate(state, dirty)
        newly = [s for s in range(eng.n)
                 if before[s] == UNKNOWN and state[s] != UNKNOWN]
        if newly:
            for s in newly:
                moves.append({"edge": list(eng.slots[s]), "state": state[s]})
            dirty = []
            continue
        s = state.index(UNKNOWN)
        state[s] = target[s]
        moves.append({"edge": list(eng.slots[s]), "state": target[s]})
        dirty = [s]
    return moves


def empty_state(width: int, height: int, payload: dict) -> dict:
    return {
        "h_edges": [[UNKNOWN] * width for _ in range(height + 1)],
        "v_edges": [[UNKNOWN] * (width + 1) for _ in range(height)],
    }


def apply_move(width: int, height: int, payload: dict, state: dict, move: dict) -> dict:
    new = {
        "h_edges": [list(row) for row in state["h_edges"]],
        "v_edges": [list(row) for row in state["v_edges"]],
    }
    kind, r, c = move["edge"]
    new["h_edges" if kind == "h" else "v_edges"][r][c] = move["state"]
    return new


def state_solution(state: dict) -> dict:
    """Total states equal the solver's solution dict; -1 marks undecided."""
    return {
        "h_edges": [list(row) for row in state["h_edges"]],
        "v_edges": [list(row) for row in state["v_edges"]],
    }


def solution_state(solution: dict) -> dict:
    return {
        "h_edges": [list(row) for row in solution["h_edges"]],
        "v_edges": [list(row) for row in solution["v_edges"]],
    }


def move_text(payload: dict, move: dict) -> str:
    kind, r, c = move["edge"]
    word = "horizontal" if kind == "h" else "vertical"
    action = "draw" if move["state"] == ON else "cross out"
    return f"{action} the {word} edge at ({r},{c})"


# -- generation -------------------------------------------------------------------


def parse_params(params: str) -> tuple[int, int, int]:
    width, height, suffix = parse_dims(params)
    if not suffix.startswith("t0d"):
        raise PayloadError(f"loopy params need the t0 grid type: {params!r}")
    code = suffix[3:]
    depth = {"e": 0, "t": 1, "h": 2}.get(code)
    if depth is None:
        raise PayloadError(f"unknown loopy difficulty {code!r}")
    return width, height, depth


def _random_cycle_region(width, height, rng):
    """Grow a cell region whose boundary stays a single cycle."""

    def boundary_ok(region):
        # every lattice vertex must touch 0 or 2 boundary edges
        degree: dict[tuple[int, int], int] = {}
        for (r, c) in region:
            neighbours = {
                ("h", r, c): (r - 1, c),
                ("h", r + 1, c): (r + 1, c),
                ("v", r, c): (r, c - 1),
                ("v", r, c + 1): (r, c + 1),
            }
            for e, other in neighbours.items():
                if other in region:
                    continue
                for vtx in edge_vertices(e):
                    degree[vtx] = degree.get(vtx, 0) + 1
        return all(d == 2 for d in degree.values())

    start = (int(rng.integers(0, height)), int(rng.integers(0, width)))
    region = {start}
    target = max(3, int(round(width * height * (0.35 + 0.25 * rng.random()))))
    stall = 0
    while len(region) < target and stall < 200:
        cells = sorted(region)
        base = cells[int(rng.integers(0, len(cells)))]
        dr, dc = [(0, 1), (0, -1), (1, 0), (-1, 0)][int(rng.integers(0, 4))]
        cand = (base[0] + dr, base[1] + dc)
        if not (0 <= cand[0] < height and 0 <= cand[1] < width) or cand in region:
            stall += 1
            continue
        trial = region | {cand}
        if boundary_ok(trial):
            region = trial
            stall = 0
        else:
            stall += 1
    return region if boundary_ok(region) else None


def _region_solution(width, height, region):
    h_edges = [[0] * width for _ in range(height + 1)]
    v_edges = [[0] * (width + 1) for _ in range(height)]
    for r in range(height + 1):
        for c in range(width):
            above = (r - 1, c) in region
            below = (r, c) in region
            if above != below:
                h_edges[r][c] = 1
    for r in range(height):
        for c in range(width + 1):
            left = (r, c - 1) in region
            right = (r, c) in region
            if left != right:
                v_edges[r][c] = 1
    return {"h_edges": h_edges, "v_edges": v_edges}


CLUE_DENSITY = 0.60


def _inst(width, height, clues, params):
    return PuzzleInstance(
        family="loopy", width=width, height=height,
        payload={"clues": sorted(clues)}, engine_params=params,
    )


def generate(params: str, rng, max_tries: int = 400):
    """Carve a random cycle, emit full clues, then thin them out.

    Clue deletion is steered by the difficulty dial: easy deletes only while
    plain propagation still solves (down to the density target), deeper
    tiers keep deleting while a deduction proof of uniqueness survives, so a
    candidate lands at the requested depth instead of being thrown away.
    """
    width, height, want_depth = parse_params(params)
    total_cells = width * height
    for _ in range(max_tries):
        region = _random_cycle_region(width, height, rng)
        if region is None:
            continue
        solution = _region_solution(width, height, region)
        clues = sorted(
            [r, c,
             solution["h_edges"][r][c] + solution["h_edges"][r + 1][c]
             + solution["v_edges"][r][c] + solution["v_edges"][r][c + 1]]
            for r in range(height) for c in range(width)
        )
        order = list(range(len(clues)))
        rng.shuffle(order)
        current = list(clues)

        # phase 1: delete while propagation alone still solves
        min_keep = int(round(total_cells * CLUE_DENSITY)) if want_depth == 0 else 0
        for idx in order:
            if len(current) <= min_keep:
                break
            trial = [e for e in current if e != clues[idx]]
            if deduction_solves(_inst(width, height, trial, params)):
                current = trial

        if want_depth >= 1:
            # phase 2: delete while one-level lookahead still proves the
            # solution (deduction success implies uniqueness)
            moved = 0
            misses = 0
            for idx in order:
                if moved >= 2 or misses >= 6:
                    break
                trial = [e for e in current if e != clues[idx]]
                if len(trial) == len(current):
                    continue
                trial_inst = _inst(width, height, trial, params)
                if deduction_solves(trial_inst):
                    current = trial
                elif _lookahead_solves(trial_inst, 1):
                    current = trial
                    moved += 1
                else:
                    misses += 1
            if not moved:
                continue

        if want_depth >= 2:
            # phase 3: keep deleting while the board stays unique, stopping
            # early once one-level lookahead no longer suffices
            deletions = 0
            for idx in order:
                trial = [e for e in current if e != clues[idx]]
                if len(trial) == len(current):
                    continue
                trial_inst = _inst(width, height, trial, params)
                result = solve(trial_inst, limit=2, node_budget=200_000,
                               want_gold=False)
                if result.complete and len(result.solutions) == 1:
                    current = trial
                    deletions += 1
                    if deletions % 2 == 0 and not _lookahead_solves(trial_inst, 1):
                        break

        instance = _inst(width, height, current, params)
        result = solve(instance, limit=2, node_budget=400_000, want_gold=True)
        if not result.complete or len(result.solutions) != 1:
            continue
        depth = classify_depth(instance)
        # dh keeps any board that defeats plain propagation; exact-depth-2
        # boards are kept when phase 3 reaches one but are too rare to demand
        if want_depth == 0 and depth != 0:
            continue
        if want_depth == 1 and depth != 1:
            continue
        if want_depth >= 2 and depth < 1:
            continue
        return instance, result.gold_moves
    raise GenerationError(f"loopy generation budget exhausted for {params}")
