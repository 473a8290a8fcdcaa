"""Routing inside tiles: quadrant crossbars, initial SW routing, tile stitching.

All movement is on the embedded plane: east = store edge, north = forward
edge.  A quadrant is a w x h rectangle with uniform per-track capacities
(east_cap per store edge, north_cap per forward edge).  Jobs enter on the
west or south side (or stand mid-flight inside after replanning) and must
leave through a required side or reach a required row.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Optional

EXIT_EAST = "E"
EXIT_NORTH = "N"


class Infeasible(RuntimeError):
    """A quadrant or crossbar instance admits no capacity-respecting packing."""


@dataclass(frozen=True)
class QuadGeom:
    """Rectangle [x0, x0+w) x [y0, y0+h) with per-track edge capacities.

    row_limit bounds the real rows of the network: store edges on rows
    >= row_limit and forward edges whose head row would be >= row_limit
    have zero capacity (dummy padding at the spatial boundary).
    """
    x0: int
    y0: int
    w: int
    h: int
    east_cap: int
    north_cap: int
    row_limit: Optional[int] = None

    def east_ok(self, y: int) -> bool:
        return self.row_limit is None or y <= self.row_limit - 1

    def north_ok(self, y: int) -> bool:
        # tail row y, head row y+1 must both be real
        return self.row_limit is None or y <= self.row_limit - 2


@dataclass
class QuadJob:
    """One packet to route through a quadrant.

    need is EXIT_EAST, EXIT_NORTH, or an int = the row to reach (delivery).
    side is the side through which the packet entered the quadrant ('W' or
    'S'); entry_idx its 0-based index along that side at entry time.  Both
    drive lane preferences only; position (x, y) is what constrains paths.
    """
    rid: int
    x: int
    y: int
    need: object
    side: str = "S"
    entry_idx: int = 0


def _edges_of(x: int, y: int, moves: str) -> list[tuple[str, int, int]]:
    out = []
    for m in moves:
        out.append((m, x, y))
        if m == "E":
            x += 1
        else:
            y += 1
    return out


class QuadSolver:
    """Deterministic capacity-exact routing of jobs through one quadrant."""

    def __init__(self, geom: QuadGeom):
        self.geom = geom
        self.loads: dict[tuple[str, int, int], int] = {}
        self.placed: dict[int, str] = {}
        self.starts: dict[int, tuple[int, int]] = {}

    def residual(self, edge: tuple[str, int, int]) -> int:
        m, x, y = edge
        g = self.geom
        if m == "E":
            if not (g.x0 <= x < g.x0 + g.w and g.y0 <= y < g.y0 + g.h):
                return 0
            if not g.east_ok(y):
                return 0
            cap = g.east_cap
        else:
            if not (g.x0 <= x < g.x0 + g.w and g.y0 <= y < g.y0 + g.h):
                return 0
            if not g.north_ok(y):
                return 0
            cap = g.north_cap
        return cap - self.loads.get(edge, 0)

    def _free(self, x: int, y: int, moves: str) -> bool:
        return all(self.residual(e) > 0 for e in _edges_of(x, y, moves))

    def _place(self, job: QuadJob, moves: str) -> None:
        for e in _edges_of(job.x, job.y, moves):
            self.loads[e] = self.loads.get(e, 0) + 1
        self.placed[job.rid] = moves
        self.starts[job.rid] = (job.x, job.y)

    # -- canonical path shapes ------------------------------------------

    def _straight_moves(self, job: QuadJob) -> str:
        g = self.geom
        if job.need == EXIT_EAST:
            return "E" * (g.x0 + g.w - job.x)
        if job.need == EXIT_NORTH:
            return "N" * (g.y0 + g.h - job.y)
        return "N" * (int(job.need) - job.y)  # climb to the target row

    def _bent_moves(self, job: QuadJob, turn: int) -> str:
        g = self.geom
        if job.need == EXIT_EAST:
            # north on the current column to row `turn`, then east out
            return "N" * (turn - job.y) + "E" * (g.x0 + g.w - job.x)
        if job.need == EXIT_NORTH:
            # east on the current row to column `turn`, then north out
            return "E" * (turn - job.x) + "N" * (g.y0 + g.h - job.y)
        # delivery row: shift east to column `turn`, then climb
        return "E" * (turn - job.x) + "N" * (int(job.need) - job.y)

    def _try_bends(self, job: QuadJob, candidates: Iterable[int]) -> bool:
        for turn in candidates:
            moves = self._bent_moves(job, turn)
            if self._free(job.x, job.y, moves):
                self._place(job, moves)
                return True
        return False

    def _bfs(self, job: QuadJob) -> Optional[str]:
        """Shortest monotone path through residual capacity; east explored
        first so equal-length plans tie-break identically everywhere."""
        g = self.geom
        start = (job.x, job.y)
        seen = {start}
        queue = deque([(start, "")])
        while queue:
            (x, y), moves = queue.popleft()
            if job.need == EXIT_EAST and x == g.x0 + g.w:
                return moves
            if job.need == EXIT_NORTH and y == g.y0 + g.h:
                return moves
            if not isinstance(job.need, str) and y == job.need and x < g.x0 + g.w:
                return moves
            for m in "EN":
                edge = (m, x, y)
                if self.residual(edge) <= 0:
                    continue
                nxt = (x + 1, y) if m == "E" else (x, y + 1)
                # never overshoot a target row
                if not isinstance(job.need, str) and nxt[1] > job.need:
                    continue
                if nxt not in seen:
                    seen.add(nxt)
                    queue.append((nxt, moves + m))
        return None

    # -- the phased construction ----------------------------------------

    def solve(self, jobs: list[QuadJob]) -> dict[int, str]:
        g = self.geom
        jobs = sorted(jobs, key=lambda j: j.rid)
        pending: list[QuadJob] = []

        # Phase A: straight lanes with precedence (opposite-side traversals
        # and deliveries climbing their own column).
        for job in jobs:
            is_straight = (
                (job.side == "W" and job.need == EXIT_EAST)
                or (job.side == "S" and job.need == EXIT_NORTH)
                or not isinstance(job.need, str)
            )
            if is_straight:
                moves = self._straight_moves(job)
                if self._free(job.x, job.y, moves):
                    self._place(job, moves)
                    continue
            pending.append(job)

        # Phase B: east-bound turners take the lowest row with residual
        # capacity at or above their current row.
        still: list[QuadJob] = []
        for job in pending:
            if job.need == EXIT_EAST:
                if not self._try_bends(job, range(job.y, g.y0 + g.h)):
                    still.append(job)
            else:
                still.append(job)
        pending, still = still, []

        # Phase C: north-bound turners turn at the SW diagonal column when
        # free, then scan east, then the remaining lower columns.
        for job in pending:
            if job.need == EXIT_NORTH:
                diag = min(g.x0 + job.entry_idx, g.x0 + g.w - 1) if job.side == "W" else job.x
                lo = max(diag, job.x)
                cand = list(range(lo, g.x0 + g.w)) + list(range(job.x, lo))
                if not self._try_bends(job, cand):
                    still.append(job)
            else:
                still.append(job)
        pending, still = still, []

        # Phase C': deliveries that could not climb straight shift east.
        for job in pending:
            if not isinstance(job.need, str):
                if not self._try_bends(job, range(job.x, g.x0 + g.w)):
                    still.append(job)
            else:
                still.append(job)
        pending = still

        # Phase D: anything left takes a shortest feasible staircase.
        for job in pending:
            moves = self._bfs(job)
            if moves is None:
                raise Infeasible(
                    f"no path for request {job.rid} at ({job.x},{job.y}) "
                    f"need={job.need} in quadrant {g}")
            self._place(job, moves)

        return dict(self.placed)


def solve_quadrant(geom: QuadGeom, jobs: list[QuadJob]) -> dict[int, str]:
    """Route all jobs; falls back to pure sequential staircase search before
    declaring the quadrant infeasible."""
    try:
        return QuadSolver(geom).solve(jobs)
    except Infeasible:
        solver = QuadSolver(geom)
        for job in sorted(jobs, key=lambda j: j.rid):
            moves = solver._bfs(job)
            if moves is None:
                raise
            solver._place(job, moves)
        return dict(solver.placed)


# -- crossbar surface (side-entrant instances, uniform capacities) --------


@dataclass(frozen=True)
class CrossbarInstance:
    """Side-to-side path requests across an a x b directed grid.

    a rows, b columns.  Entries are (index, rid) pairs: wn/we enter on the
    west side at row index, sn/se on the south side at column index.  At
    most one request per (class, index).  hcap/vcap are the uniform
    horizontal/vertical edge capacities.
    """
    a: int
    b: int
    wn: tuple[tuple[int, int], ...] = ()
    sn: tuple[tuple[int, int], ...] = ()
    we: tuple[tuple[int, int], ...] = ()
    se: tuple[tuple[int, int], ...] = ()
    hcap: int = 1
    vcap: int = 1

    def __post_init__(self) -> None:
        for name, entries, limit in (
            ("wn", self.wn, self.a), ("we", self.we, self.a),
            ("sn", self.sn, self.b), ("se", self.se, self.b),
        ):
            for idx, _rid in entries:
                if not 0 <= idx < limit:
                    raise ValueError(f"{name} entry index {idx} outside [0, {limit})")
        # one request per side vertex: the packing condition below is an iff
        # only when sources are distinct (two requests sharing a source can
        # deadlock each other even when both side counts fit)
        west = [i for i, _ in self.wn] + [i for i, _ in self.we]
        south = [i for i, _ in self.sn] + [i for i, _ in self.se]
        if len(set(west)) != len(west) or len(set(south)) != len(south):
            raise ValueError("duplicate entry vertex on a side")
        rids = [rid for entries in (self.wn, self.sn, self.we, self.se)
                for _, rid in entries]
        if len(set(rids)) != len(rids):
            raise ValueError("a request may appear in exactly one list")


def crossbar_feasible(inst: CrossbarInstance) -> bool:
    """Packable iff each destination side has enough crossing capacity."""
    east_bound = len(inst.we) + len(inst.se) <= inst.a * inst.hcap
    north_bound = len(inst.wn) + len(inst.sn) <= inst.b * inst.vcap
    return east_bound and north_bound


@dataclass(frozen=True)
class CrossbarSolution:
    """Per request: start vertex and move string; the final move crosses the
    destination side."""
    paths: dict[int, tuple[tuple[int, int], str]]


def crossbar_route(inst: CrossbarInstance) -> CrossbarSolution:
    if not crossbar_feasible(inst):
        raise Infeasible(f"side counts exceed crossing capacity: {inst}")
    geom = QuadGeom(x0=0, y0=0, w=inst.b, h=inst.a,
                    east_cap=inst.hcap, north_cap=inst.vcap)
    jobs = []
    for idx, rid in inst.we:
        jobs.append(QuadJob(rid, 0, idx, EXIT_EAST, side="W", entry_idx=idx))
    for idx, rid in inst.wn:
        jobs.append(QuadJob(rid, 0, idx, EXIT_NORTH, side="W", entry_idx=idx))
    for idx, rid in inst.sn:
        jobs.append(QuadJob(rid, idx, 0, EXIT_NORTH, side="S", entry_idx=idx))
    for idx, rid in inst.se:
        jobs.append(QuadJob(rid, idx, 0, EXIT_EAST, side="S", entry_idx=idx))
    moves = solve_quadrant(geom, jobs)
    starts = {job.rid: (job.x, job.y) for job in jobs}
    return CrossbarSolution(paths={rid: (starts[rid], moves[rid]) for rid in moves})


# -- initial routing in the SW quadrant -----------------------------------


@dataclass
class SWLedger:
    """Straight-lane reservations of one tile's SW quadrant.

    Initial requests own the quadrant: a column carries at most north_cap
    northward lanes and a row at most east_cap eastward lanes, and a lane is
    free exactly when its column/row count is below that cap (every lane
    runs to the boundary, so the outermost edge carries the full count).
    """
    east_cap: int
    north_cap: int
    col_used: dict[int, int] = field(default_factory=dict)
    row_used: dict[int, int] = field(default_factory=dict)

    def offer(self, x: int, y: int) -> Optional[str]:
        """North lane first, then east; None when both are exhausted."""
        if self.col_used.get(x, 0) < self.north_cap:
            return "N"
        if self.row_used.get(y, 0) < self.east_cap:
            return "E"
        return None

    def commit(self, x: int, y: int, direction: str) -> None:
        if direction == "N":
            self.col_used[x] = self.col_used.get(x, 0) + 1
        else:
            self.row_used[y] = self.row_used.get(y, 0) + 1

    @property
    def accepted(self) -> int:
        return sum(self.col_used.values()) + sum(self.row_used.values())
