"""Top-level online algorithm and discrete-time engine.

Per step: filter arrivals, classify, admit (near-track check, or path
packing AND initial routing for far requests), replan detailed routes,
advance every in-flight packet one edge, deliver, and assert every
capacity invariant.  Accepted packets are never dropped; rejection only
happens at arrival.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

from .intratile import (EXIT_EAST, EXIT_NORTH, Infeasible, QuadGeom, QuadJob,
                        SWLedger, solve_quadrant)
from .model import NetConfig, Request, Track, classify
from .pathpack import NoPath, PackState, SketchPath, ipp_commit, ipp_offer
from .spacetime import (EdgeKind, EdgeUsage, EmbeddedPoint, STEdge,
                        edge_of_move, embedded_step)
from .tiling import Quadrant, SketchGraph, TileId, Tiling, sketch_graphs


class InvariantViolation(RuntimeError):
    """A capacity or nonpreemption invariant failed; always a bug."""


class FatalInfeasible(RuntimeError):
    """Detailed routing could not complete an accepted packet's route."""


@dataclass
class NearPacket:
    rid: int
    src: int
    dst: int
    t_arr: int
    pos: EmbeddedPoint

    @property
    def delivered(self) -> bool:
        return self.pos.y == self.dst


@dataclass
class FarPacket:
    rid: int
    src: int
    dst: int
    t_arr: int
    j: int
    sketch: SketchPath
    init_dir: str            # N or E straight lane inside the SW quadrant
    pos: EmbeddedPoint
    tile_idx: int = 0        # progress along the sketch tile sequence
    quad_side: str = "S"     # side through which the current quadrant was entered
    quad_entry_idx: int = 0
    plan: list[str] = field(default_factory=list)
    realized_tiles: list[TileId] = field(default_factory=list)
    delivered_at: Optional[int] = None

    @property
    def delivered(self) -> bool:
        return self.delivered_at is not None


@dataclass
class FarState:
    """Everything one tiling owns; a pure function of its accepted set."""
    graph: SketchGraph
    pack: PackState
    sw: dict[TileId, SWLedger] = field(default_factory=dict)
    packets: dict[int, FarPacket] = field(default_factory=dict)


@dataclass
class StepReport:
    t: int
    arrivals: int = 0
    filtered: int = 0
    accepted: dict[str, int] = field(default_factory=dict)
    rejected: dict[str, int] = field(default_factory=dict)
    rejected_nopath: int = 0
    delivered: int = 0
    max_loads: dict[str, int] = field(default_factory=dict)
    violations: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "t": self.t,
            "arrivals": self.arrivals,
            "filtered": self.filtered,
            "accepted": dict(sorted(self.accepted.items())),
            "rejected": dict(sorted(self.rejected.items())),
            "rejected_nopath": self.rejected_nopath,
            "delivered": self.delivered,
            "max_loads": dict(sorted(self.max_loads.items())),
            "violations": list(self.violations),
        }


def filter_arrivals(cfg: NetConfig, t: int, arrivals: list[Request]
                    ) -> tuple[list[Request], list[Request]]:
    """Per source vertex keep the B'+c' requests with smallest distance,
    ties by id; everything else is dropped before classification."""
    keep_per_vertex = cfg.B_track + cfg.c_track
    by_src: dict[int, list[Request]] = {}
    for r in arrivals:
        if r.t != t:
            raise ValueError(f"request {r.id} arrives at {r.t}, not {t}")
        by_src.setdefault(r.src, []).append(r)
    kept: list[Request] = []
    dropped: list[Request] = []
    for src in sorted(by_src):
        group = sorted(by_src[src], key=lambda r: (r.dist, r.id))
        kept.extend(group[:keep_per_vertex])
        dropped.extend(group[keep_per_vertex:])
    kept.sort(key=lambda r: r.id)
    dropped.sort(key=lambda r: r.id)
    return kept, dropped


class Engine:
    """Deterministic single-threaded engine for the tiled routing policy."""

    def __init__(self, cfg: NetConfig, event_sink: Optional[Callable[[dict], None]] = None):
        self.cfg = cfg
        self.t = 0
        self.far: dict[int, FarState] = {}
        for j, graph in sketch_graphs(cfg).items():
            self.far[j] = FarState(
                graph=graph,
                pack=PackState(k=cfg.k, tau=cfg.tau, hop_bound=cfg.hop_bound))
        self.near_reserved: dict[STEdge, int] = {}
        self.near_packets: dict[int, NearPacket] = {}
        self.near_accept_ids: set[int] = set()
        self.usage = EdgeUsage(n=cfg.n, B=cfg.B, c=cfg.c,
                               B_track=cfg.B_track, c_track=cfg.c_track)
        self.reports: list[StepReport] = []
        self.totals = {
            "arrivals": 0, "filtered": 0, "accepted": 0, "rejected": 0,
            "delivered": 0, "rejected_nopath": 0,
        }
        self.per_class_accepted = {"near": 0, "far1": 0, "far2": 0, "far3": 0, "far4": 0}
        self.per_class_rejected = {"near": 0, "far1": 0, "far2": 0, "far3": 0, "far4": 0}
        self.delivery_violations: list[str] = []
        self.event_sink = event_sink
        self._emit({"ev": "config", "n": cfg.n, "B": cfg.B, "c": cfg.c,
                    "horizon": cfg.horizon, "B_track": cfg.B_track,
                    "c_track": cfg.c_track, "p_max": cfg.p_max, "k": cfg.k,
                    "lh": cfg.lh, "lv": cfg.lv})

    def _emit(self, event: dict) -> None:
        if self.event_sink is not None:
            self.event_sink(event)

    # -- admission --------------------------------------------------------

    def _route_near(self, r: Request) -> bool:
        first = STEdge(EdgeKind.FORWARD, r.src, r.t)
        if self.near_reserved.get(first, 0) >= self.cfg.c_track:
            return False
        for i in range(r.dist):
            e = STEdge(EdgeKind.FORWARD, r.src + i, r.t + i)
            self.near_reserved[e] = self.near_reserved.get(e, 0) + 1
        self.near_packets[r.id] = NearPacket(
            rid=r.id, src=r.src, dst=r.dst, t_arr=r.t,
            pos=EmbeddedPoint(r.t - r.src, r.src))
        self.near_accept_ids.add(r.id)
        return True

    def _admit_far(self, r: Request, j: int) -> tuple[bool, str]:
        fs = self.far[j]
        tiling = fs.graph.tiling
        pos = EmbeddedPoint(r.t - r.src, r.src)
        src_tile = tiling.tile_of(pos)
        bands = fs.graph.sink_band(r.dst) - src_tile.iy
        budget = self.cfg.request_hop_bound(r.dist, bands)
        try:
            sketch = ipp_offer(fs.pack, fs.graph, src_tile, r.dst, max_hops=budget)
        except NoPath:
            return False, "nopath"
        if sketch is None:
            return False, "ipp"
        led = fs.sw.get(src_tile)
        if led is None:
            led = SWLedger(east_cap=self.cfg.B_track, north_cap=self.cfg.c_track)
            fs.sw[src_tile] = led
        direction = led.offer(pos.x, pos.y)
        if direction is None:
            return False, "init"
        # both components agreed: commit them together
        ipp_commit(fs.pack, r.id, sketch)
        led.commit(pos.x, pos.y, direction)
        packet = FarPacket(rid=r.id, src=r.src, dst=r.dst, t_arr=r.t, j=j,
                           sketch=sketch, init_dir=direction, pos=pos,
                           realized_tiles=[src_tile])
        fs.packets[r.id] = packet
        self._stitch_all(j, seed_tiles=set(sketch.tiles))
        return True, direction

    # -- detailed routing ---------------------------------------------------

    def _sw_prefix(self, tiling: Tiling, p: FarPacket, pos: EmbeddedPoint,
                   tile_idx: int) -> Optional[tuple[str, int, int, str, int]]:
        """Remaining straight-lane moves while still inside the SW quadrant,
        plus the landing (x, y, side, entry index) into NW or SE."""
        if tile_idx != 0 or tiling.quadrant_of(pos) is not Quadrant.SW:
            return None
        tile = p.sketch.tiles[0]
        x0, y0 = tiling.origin(tile)
        mx, my = x0 + tiling.lh // 2, y0 + tiling.lv // 2
        if p.init_dir == "N":
            moves = "N" * (my - pos.y)
            return moves, pos.x, my, "S", pos.x - x0
        moves = "E" * (mx - pos.x)
        return moves, mx, pos.y, "W", pos.y - y0

    def _stitch_tile(self, fs: FarState, tile: TileId,
                     jobs: list[tuple[FarPacket, int, int, str, int, object]]
                     ) -> dict[int, tuple[str, Optional[tuple[int, int, str, int]]]]:
        """Route all given jobs through the NW/SE/NE quadrants of one tile.

        Each job is (packet, x, y, side, entry_idx, objective) where the
        objective is EXIT_EAST/EXIT_NORTH (the packet's sketch move out of
        this tile) or the destination row (final requests).  Returns, per
        request, the in-tile move string and the landing in the next tile
        (None when the packet is delivered inside this tile).
        """
        cfg = self.cfg
        tiling = fs.graph.tiling
        x0, y0 = tiling.origin(tile)
        half_w, half_v = tiling.lh // 2, tiling.lv // 2
        mx, my = x0 + half_w, y0 + half_v

        nw_jobs: list[QuadJob] = []
        se_jobs: list[QuadJob] = []
        ne_seed: dict[int, tuple[int, int, str, int]] = {}
        target: dict[int, object] = {}
        prefix: dict[int, str] = {}

        for packet, x, y, side, idx, objective in jobs:
            target[packet.rid] = objective
            prefix[packet.rid] = ""
            if y >= my and x >= mx:
                ne_seed[packet.rid] = (x, y, side, idx)
            elif y >= my:
                nw_jobs.append(QuadJob(packet.rid, x, y, EXIT_EAST, side, idx))
            else:
                if not isinstance(objective, str) and objective < my:
                    se_jobs.append(QuadJob(packet.rid, x, y, objective, side, idx))
                else:
                    se_jobs.append(QuadJob(packet.rid, x, y, EXIT_NORTH, side, idx))

        out: dict[int, tuple[str, Optional[tuple[int, int, str, int]]]] = {}

        if nw_jobs:
            geom = QuadGeom(x0=x0, y0=my, w=half_w, h=half_v,
                            east_cap=cfg.B_track, north_cap=cfg.c_track,
                            row_limit=cfg.n)
            solved = solve_quadrant(geom, nw_jobs)
            for job in nw_jobs:
                moves = solved[job.rid]
                y_exit = job.y + moves.count("N")
                prefix[job.rid] = moves
                ne_seed[job.rid] = (mx, y_exit, "W", y_exit - my)

        if se_jobs:
            geom = QuadGeom(x0=mx, y0=y0, w=half_w, h=half_v,
                            east_cap=cfg.B_track, north_cap=cfg.c_track,
                            row_limit=cfg.n)
            solved = solve_quadrant(geom, se_jobs)
            for job in se_jobs:
                moves = solved[job.rid]
                if not isinstance(job.need, str):
                    # delivered inside the SE quadrant
                    out[job.rid] = (moves, None)
                    continue
                x_exit = job.x + moves.count("E")
                prefix[job.rid] = moves
                ne_seed[job.rid] = (x_exit, my, "S", x_exit - mx)

        if ne_seed:
            geom = QuadGeom(x0=mx, y0=my, w=half_w, h=half_v,
                            east_cap=cfg.B_track, north_cap=cfg.c_track,
                            row_limit=cfg.n)
            ne_jobs = []
            for rid, (x, y, side, idx) in sorted(ne_seed.items()):
                need = target[rid]
                if not isinstance(need, str):
                    need = int(need)
                ne_jobs.append(QuadJob(rid, x, y, need, side, idx))
            solved = solve_quadrant(geom, ne_jobs)
            for job in ne_jobs:
                moves = solved[job.rid]
                full = prefix[job.rid] + moves
                if not isinstance(job.need, str):
                    out[job.rid] = (full, None)
                    continue
                if job.need == EXIT_EAST:
                    y_exit = job.y + moves.count("N")
                    out[job.rid] = (full, (x0 + tiling.lh, y_exit, "W", y_exit - my))
                else:
                    x_exit = job.x + moves.count("E")
                    out[job.rid] = (full, (x_exit, y0 + tiling.lv, "S", x_exit - mx))
        return out

    @staticmethod
    def _transition(tiling: Tiling, p: FarPacket, pos: EmbeddedPoint,
                    tile_idx: int, quad_side: str, quad_entry_idx: int,
                    move: str) -> tuple[EmbeddedPoint, int, str, int, bool, Optional[str]]:
        """Position bookkeeping for one move: new position, sketch progress,
        quadrant entry data, whether a tile boundary was crossed, and a
        routing-rule violation message if the entry half is wrong."""
        pos = embedded_step(pos, move)
        violation = None
        nxt = tile_idx + 1
        tile_here = tiling.tile_of(pos)
        if nxt < len(p.sketch.tiles) and tile_here == p.sketch.tiles[nxt]:
            tile_idx = nxt
            x0, y0 = tiling.origin(tile_here)
            mx, my = x0 + tiling.lh // 2, y0 + tiling.lv // 2
            if move == "N":
                quad_side = "S"
                quad_entry_idx = pos.x - mx
                if pos.x < mx:
                    violation = (f"far {p.rid} entered tile {tile_here} on the "
                                 f"west half of the south side")
            else:
                quad_side = "W"
                quad_entry_idx = pos.y - my
                if pos.y < my:
                    violation = (f"far {p.rid} entered tile {tile_here} on the "
                                 f"south half of the west side")
            return pos, tile_idx, quad_side, quad_entry_idx, True, violation
        if tile_here != p.sketch.tiles[tile_idx]:
            return (pos, tile_idx, quad_side, quad_entry_idx, False,
                    f"far {p.rid} left its sketch path at {tile_here}")
        prev = EmbeddedPoint(pos.x - (1 if move == "E" else 0),
                             pos.y - (1 if move == "N" else 0))
        if tiling.quadrant_of(prev) is not tiling.quadrant_of(pos):
            x0, y0 = tiling.origin(tile_here)
            mx, my = x0 + tiling.lh // 2, y0 + tiling.lv // 2
            quad_side = "S" if move == "N" else "W"
            qx0 = mx if pos.x >= mx else x0
            qy0 = my if pos.y >= my else y0
            quad_entry_idx = (pos.x - qx0) if move == "N" else (pos.y - qy0)
        return pos, tile_idx, quad_side, quad_entry_idx, False, None

    def _stitch_all(self, j: int, seed_tiles: Optional[set[TileId]] = None) -> None:
        """Rebuild the planned suffix of in-flight packets of tiling j,
        tiles in column-major order so all entry vertices are fixed.

        A packet that already has a plan keeps its head move: the edge taken
        during the current step is locked at step start; only later edges
        are replanned.  Locked edges live at the current step while all
        replanned edges live strictly later, so they never compete.

        With seed_tiles given, only the transitive closure of packets whose
        remaining chains touch those tiles is replanned; every other plan
        lives entirely in disjoint tiles and stays valid untouched.
        """
        fs = self.far[j]
        tiling = fs.graph.tiling
        active = [p for p in fs.packets.values() if not p.delivered]
        if seed_tiles is not None:
            region = set(seed_tiles)
            pool = active
            while True:
                hit, rest = [], []
                for p in pool:
                    chain = p.sketch.tiles[p.tile_idx:]
                    (hit if any(t in region for t in chain) else rest).append(p)
                if not hit:
                    break
                for p in hit:
                    region.update(p.sketch.tiles[p.tile_idx:])
                pool = rest
            untouched = {p.rid for p in pool}
            active = [p for p in active if p.rid not in untouched]
        if not active:
            return
        plans: dict[int, list[str]] = {p.rid: [] for p in active}
        cursor: dict[int, tuple[int, tuple[int, int, str, int]]] = {}
        packets = {p.rid: p for p in active}

        needed: set[TileId] = set()
        for p in active:
            pos, tile_idx = p.pos, p.tile_idx
            side, eidx = p.quad_side, p.quad_entry_idx
            if p.plan:
                head = p.plan[0]
                plans[p.rid].append(head)
                pos, tile_idx, side, eidx, _entered, _v = self._transition(
                    tiling, p, pos, tile_idx, side, eidx, head)
                if pos.y == p.dst:
                    continue  # delivery is one locked move away; nothing to replan
            sw = self._sw_prefix(tiling, p, pos, tile_idx)
            if sw is not None:
                moves, x, y, side, eidx = sw
                plans[p.rid].extend(moves)
                cursor[p.rid] = (tile_idx, (x, y, side, eidx))
            else:
                cursor[p.rid] = (tile_idx, (pos.x, pos.y, side, eidx))
            needed.update(p.sketch.tiles[tile_idx:])

        for tile in sorted(needed, key=lambda s: (s.ix, s.iy)):
            jobs = []
            for rid, (idx, entry) in sorted(cursor.items()):
                p = packets[rid]
                if idx < len(p.sketch.tiles) and p.sketch.tiles[idx] == tile:
                    x, y, side, eidx = entry
                    objective: object
                    if idx == len(p.sketch.moves):
                        objective = p.dst
                    else:
                        objective = p.sketch.moves[idx]
                    jobs.append((p, x, y, side, eidx, objective))
            if not jobs:
                continue
            try:
                solved = self._stitch_tile(fs, tile, jobs)
            except Infeasible as exc:
                raise FatalInfeasible(f"tile {tile}: {exc}") from exc
            for p, *_rest in jobs:
                moves, landing = solved[p.rid]
                plans[p.rid].extend(moves)
                idx, _ = cursor[p.rid]
                if landing is None:
                    del cursor[p.rid]
                else:
                    cursor[p.rid] = (idx + 1, landing)

        if cursor:
            raise FatalInfeasible(f"unplanned packets remain: {sorted(cursor)}")
        for p in active:
            p.plan = plans[p.rid]
            self._check_plan(p)

    def _check_plan(self, p: FarPacket) -> None:
        """Planned suffix must be a monotone path from the current position
        to the first copy of the destination, within the length budget."""
        y = p.pos.y + p.plan.count("N")
        if y != p.dst:
            raise FatalInfeasible(
                f"plan of request {p.rid} ends at row {y}, not {p.dst}")
        # vertex time is x + y, so steps-since-arrival plus the plan length
        # is the total path length
        realized = (p.pos.x + p.pos.y - p.t_arr) + len(p.plan)
        if realized > self.cfg.p_max:
            raise FatalInfeasible(
                f"plan of request {p.rid} is {realized} steps > p_max {self.cfg.p_max}")
        if p.plan and p.plan[-1] != "N":
            raise FatalInfeasible(f"plan of request {p.rid} does not end on delivery")

    # -- the per-step loop --------------------------------------------------

    def step(self, t: int, arrivals: list[Request]) -> StepReport:
        if t != self.t:
            raise ValueError(f"engine at step {self.t}, got step {t}")
        cfg = self.cfg
        report = StepReport(t=t)
        report.arrivals = len(arrivals)
        for r in arrivals:
            r.validate(cfg.n)
            self._emit({"ev": "arrival", "id": r.id, "src": r.src,
                        "dst": r.dst, "t": r.t})

        kept, dropped = filter_arrivals(cfg, t, arrivals)
        report.filtered = len(dropped)
        for r in dropped:
            self._emit({"ev": "filter_drop", "id": r.id, "t": t})

        for r in kept:
            track = classify(cfg, r)
            if track is Track.NEAR:
                ok = self._route_near(r)
                key = "near"
                reason = "near_track" if not ok else ""
            else:
                ok, reason = self._admit_far(r, track.tiling)
                key = f"far{track.tiling}"
            if ok:
                report.accepted[key] = report.accepted.get(key, 0) + 1
                self.per_class_accepted[key] += 1
                extra = {}
                if track is not Track.NEAR:
                    p = self.far[track.tiling].packets[r.id]
                    extra = {"j": track.tiling, "init": p.init_dir,
                             "sketch": [[s.ix, s.iy] for s in p.sketch.tiles]}
                self._emit({"ev": "accept", "id": r.id, "t": t, "cls": key, **extra})
            else:
                report.rejected[key] = report.rejected.get(key, 0) + 1
                self.per_class_rejected[key] += 1
                if reason == "nopath":
                    report.rejected_nopath += 1
                self._emit({"ev": "reject", "id": r.id, "t": t, "cls": key,
                            "reason": reason})

        self._advance(report)

        violations, step_max = self.usage.audit(t)
        report.violations.extend(violations)
        report.max_loads = step_max
        if report.violations:
            raise InvariantViolation("; ".join(report.violations))
        self.usage.retire_before(t - 1)
        if t % 256 == 0:
            # reservations at past steps can never be queried again
            dead = [e for e in self.near_reserved if e.t < t]
            for e in dead:
                del self.near_reserved[e]

        self.totals["arrivals"] += report.arrivals
        self.totals["filtered"] += report.filtered
        self.totals["accepted"] += sum(report.accepted.values())
        self.totals["rejected"] += sum(report.rejected.values())
        self.totals["rejected_nopath"] += report.rejected_nopath
        self.totals["delivered"] += report.delivered
        self.reports.append(report)
        self.t += 1
        return report

    def _advance(self, report: StepReport) -> None:
        cfg = self.cfg
        t = self.t
        for rid in sorted(self.near_packets):
            p = self.near_packets[rid]
            edge = edge_of_move(p.pos, "N", cfg.n)
            self.usage.add(edge, Track.NEAR)
            self._emit({"ev": "move", "id": rid, "t": t, "kind": "F", "v": edge.v})
            p.pos = embedded_step(p.pos, "N")
        delivered_near = [rid for rid, p in self.near_packets.items() if p.delivered]
        for rid in delivered_near:
            p = self.near_packets.pop(rid)
            if p.pos.x + p.pos.y - p.t_arr > cfg.p_max:
                self.delivery_violations.append(f"near {rid} exceeded p_max")
            self._emit({"ev": "deliver", "id": rid, "t": t + 1, "v": p.dst})
            report.delivered += 1

        for j in (1, 2, 3, 4):
            fs = self.far[j]
            for rid in sorted(fs.packets):
                p = fs.packets[rid]
                if p.delivered:
                    continue
                if not p.plan:
                    raise InvariantViolation(f"far packet {rid} has no plan")
                move = p.plan.pop(0)
                edge = edge_of_move(p.pos, move, cfg.n)
                self.usage.add(edge, Track.far(j))
                self._emit({"ev": "move", "id": rid, "t": t,
                            "kind": edge.kind.value, "v": edge.v})
                self._move_far(fs, p, move, report)

    def _move_far(self, fs: FarState, p: FarPacket, move: str,
                  report: StepReport) -> None:
        tiling = fs.graph.tiling
        pos, tile_idx, side, eidx, entered, violation = self._transition(
            tiling, p, p.pos, p.tile_idx, p.quad_side, p.quad_entry_idx, move)
        p.pos = pos
        if pos.y == p.dst:
            if entered:
                p.realized_tiles.append(p.sketch.tiles[tile_idx])
            if violation:
                report.violations.append(violation)
            p.delivered_at = self.t + 1
            if p.plan:
                report.violations.append(
                    f"far {p.rid} delivered with {len(p.plan)} planned moves left")
            if p.delivered_at - p.t_arr > self.cfg.p_max:
                self.delivery_violations.append(
                    f"far {p.rid} took {p.delivered_at - p.t_arr} > p_max")
            if p.realized_tiles != list(p.sketch.tiles):
                self.delivery_violations.append(
                    f"far {p.rid} tile sequence diverged from its sketch path")
            self._emit({"ev": "deliver", "id": p.rid, "t": self.t + 1, "v": p.dst})
            report.delivered += 1
            return
        p.tile_idx, p.quad_side, p.quad_entry_idx = tile_idx, side, eidx
        if entered:
            p.realized_tiles.append(p.sketch.tiles[tile_idx])
        if violation:
            report.violations.append(violation)

    # -- whole-trace driver ---------------------------------------------------

    def run(self, requests: list[Request], drain: bool = True) -> dict:
        by_step: dict[int, list[Request]] = {}
        for r in requests:
            by_step.setdefault(r.t, []).append(r)
        last_arrival = max(by_step) if by_step else -1
        t = 0
        while True:
            arrivals = by_step.get(t, [])
            self.step(t, arrivals)
            t += 1
            if t <= min(last_arrival, self.cfg.horizon - 1):
                continue
            if not drain:
                if t >= self.cfg.horizon:
                    break
                continue
            if not self.in_flight():
                break
            if t > last_arrival + self.cfg.p_max + 2:
                raise InvariantViolation("packets still in flight past p_max drain window")
        return self.summary()

    def in_flight(self) -> int:
        live = len(self.near_packets)
        for fs in self.far.values():
            live += sum(1 for p in fs.packets.values() if not p.delivered)
        return live

    def summary(self) -> dict:
        return {
            "schema": 1,
            "policy": "paper",
            "n": self.cfg.n, "B": self.cfg.B, "c": self.cfg.c,
            "horizon": self.cfg.horizon,
            "arrivals_total": self.totals["arrivals"],
            "filtered_total": self.totals["filtered"],
            "accepted_total": self.totals["accepted"],
            "rejected_total": self.totals["rejected"],
            "rejected_nopath": self.totals["rejected_nopath"],
            "delivered_total": self.totals["delivered"],
            "per_class_accepted": dict(sorted(self.per_class_accepted.items())),
            "per_class_rejected": dict(sorted(self.per_class_rejected.items())),
            "max_loads": dict(sorted(self.usage.max_seen.items())),
            "violations": sum(len(r.violations) for r in self.reports)
            + len(self.delivery_violations),
        }
