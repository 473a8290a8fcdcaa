"""Online integral path packing over a sketch graph.

Admission uses edge weights exponential in the load: w(e) = 2^load(e) - 1.
A request is offered the lightest monotone path from its source tile to any
sink tile (the destination row band, absorbing) within a hop budget, and is
accepted iff that weight is strictly below the threshold tau.  Any edge at
load k weighs 2^k - 1 >= tau, so no accepted path can push a load past k.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Collection, Optional

from .tiling import SketchGraph, TileId

SketchEdge = tuple[TileId, str]  # (tail tile, move "E" or "N")


class NoPath(RuntimeError):
    """The destination is unreachable within the window and hop budget."""


class DoubleCommit(RuntimeError):
    """A request id was committed twice."""


@dataclass(frozen=True)
class SketchPath:
    """A monotone tile path: start tile plus an east/north move string."""
    start: TileId
    moves: str

    @property
    def tiles(self) -> tuple[TileId, ...]:
        out = [self.start]
        for m in self.moves:
            j, ix, iy = out[-1]
            out.append(TileId(j, ix + 1, iy) if m == "E" else TileId(j, ix, iy + 1))
        return tuple(out)

    @property
    def edges(self) -> tuple[SketchEdge, ...]:
        tiles = self.tiles
        return tuple((tiles[i], self.moves[i]) for i in range(len(self.moves)))

    def __len__(self) -> int:
        return len(self.moves)


@dataclass
class PackState:
    """Loads and committed paths; a pure function of the committed set."""
    k: int
    tau: int
    hop_bound: int
    loads: dict[SketchEdge, int] = field(default_factory=dict)
    committed: dict[int, SketchPath] = field(default_factory=dict)

    def load(self, edge: SketchEdge) -> int:
        return self.loads.get(edge, 0)

    def weight(self, edge: SketchEdge) -> int:
        return (1 << self.load(edge)) - 1

    def max_load(self) -> int:
        return max(self.loads.values(), default=0)

    def snapshot(self) -> tuple:
        """Hashable image of the full state, for replay comparison."""
        return (tuple(sorted((e, l) for e, l in self.loads.items() if l)),
                tuple(sorted((rid, p.start, p.moves)
                             for rid, p in self.committed.items())))


def lightest_path(
    graph: SketchGraph,
    weights: Callable[[SketchEdge], int],
    src: TileId,
    sinks: Collection[TileId],
    hop_bound: int,
) -> Optional[tuple[SketchPath, int]]:
    """Minimum-weight monotone path from src to any sink, at most hop_bound
    hops, sinks absorbing.  Ties prefer fewer hops, then the lexicographically
    smallest move string with E < N.  None when no sink is reachable.

    Every monotone path to a fixed tile has the same hop count, so no
    per-hop state is needed; the region is bounded by the hop budget.
    """
    sinks = set(sinks)
    if src in sinks:
        return SketchPath(start=src, moves=""), 0

    # forward reachability within the budget
    region: set[TileId] = {src}
    frontier = [src]
    hops_of = lambda t: (t.ix - src.ix) + (t.iy - src.iy)
    while frontier:
        nxt: list[TileId] = []
        for tile in frontier:
            if tile in sinks or hops_of(tile) >= hop_bound:
                continue
            for nbr, _cap in graph.neighbors(tile):
                if nbr not in region:
                    region.add(nbr)
                    nxt.append(nbr)
        frontier = nxt
    if not (region & sinks):
        return None

    # backward DP: value = (cost, hops) to reach a sink
    value: dict[TileId, tuple[int, int]] = {s: (0, 0) for s in region & sinks}
    for tile in sorted(region - sinks, key=lambda t: -(t.ix + t.iy)):
        best: Optional[tuple[int, int]] = None
        for nbr, _cap in graph.neighbors(tile):
            if nbr not in region or nbr not in value:
                continue
            move = "E" if nbr.ix > tile.ix else "N"
            cost, hops = value[nbr]
            cand = (cost + weights((tile, move)), hops + 1)
            if best is None or cand < best:
                best = cand
        if best is not None:
            value[tile] = best
    if src not in value:
        return None

    # forward greedy with east preferred among optimal continuations
    moves: list[str] = []
    cur = src
    while cur not in sinks:
        cost, hops = value[cur]
        chosen = None
        nbrs = {t for t, _cap in graph.neighbors(cur)}
        for move in "EN":
            nbr = (TileId(cur.j, cur.ix + 1, cur.iy) if move == "E"
                   else TileId(cur.j, cur.ix, cur.iy + 1))
            if nbr not in value or nbr not in region or nbr not in nbrs:
                continue
            ncost, nhops = value[nbr]
            if (ncost + weights((cur, move)), nhops + 1) == (cost, hops):
                chosen = (move, nbr)
                break
        if chosen is None:  # value table inconsistent; cannot happen
            raise AssertionError("lightest-path reconstruction failed")
        moves.append(chosen[0])
        cur = chosen[1]
    return SketchPath(start=src, moves="".join(moves)), value[src][0]


def ipp_offer(
    state: PackState,
    graph: SketchGraph,
    src: TileId,
    dst: int,
    max_hops: Optional[int] = None,
) -> Optional[SketchPath]:
    """Lightest admissible path for a request from src tile to row dst, or
    None when its weight reaches the threshold.  Raises NoPath when the
    destination band is unreachable.  Never mutates state."""
    budget = state.hop_bound if max_hops is None else min(max_hops, state.hop_bound)
    band = graph.sink_band(dst)
    d_band = band - src.iy
    if d_band < 0 or d_band > budget:
        raise NoPath(f"band {band} not reachable from {src} within {budget} hops")
    east_budget = budget - d_band
    sinks = {TileId(src.j, src.ix + e, band) for e in range(east_budget + 1)}
    found = lightest_path(graph, state.weight, src, sinks, budget)
    if found is None:
        raise NoPath(f"no sketch path from {src} to row {dst}")
    path, weight = found
    if weight >= state.tau:
        return None
    return path


def ipp_commit(state: PackState, rid: int, path: SketchPath) -> None:
    """Record an accepted path and bump the loads along it."""
    if rid in state.committed:
        raise DoubleCommit(f"request {rid} already committed")
    for edge in path.edges:
        new = state.loads.get(edge, 0) + 1
        if new > state.k:
            raise AssertionError(
                f"edge {edge} load {new} exceeds the k-packing bound {state.k}")
        state.loads[edge] = new
    state.committed[rid] = path
