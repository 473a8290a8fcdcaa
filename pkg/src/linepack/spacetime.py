"""Space-time grid addressing: vertices, edges, the axis-parallel embedding.

The grid is a DAG over (node, step) copies.  A forward edge models sending a
packet over the link (v, v+1) at step t; a store edge models buffering at v.
Under the embedding (v, t) -> (x=t-v, y=v) a store edge is a unit move east
and a forward edge a unit move north, so every route is a monotone staircase
in the plane and the whole engine can reason in 2-d.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import NamedTuple

from .model import Track


class OutOfRange(ValueError):
    """Coordinate outside the real grid."""


class STVertex(NamedTuple):
    v: int
    t: int


class EmbeddedPoint(NamedTuple):
    x: int  # t - v: increases east, one per store step
    y: int  # v: increases north, one per forward step


class EdgeKind(Enum):
    FORWARD = "F"  # (v,t) -> (v+1,t+1), capacity c, north in the embedding
    STORE = "S"    # (v,t) -> (v,t+1), capacity B, east in the embedding


class STEdge(NamedTuple):
    kind: EdgeKind
    v: int  # tail node
    t: int  # tail step

    @property
    def tail(self) -> STVertex:
        return STVertex(self.v, self.t)

    @property
    def head(self) -> STVertex:
        if self.kind is EdgeKind.FORWARD:
            return STVertex(self.v + 1, self.t + 1)
        return STVertex(self.v, self.t + 1)


def embed(w: STVertex) -> EmbeddedPoint:
    return EmbeddedPoint(w.t - w.v, w.v)


def unembed(p: EmbeddedPoint, n: int) -> STVertex:
    if not 0 <= p.y < n:
        raise OutOfRange(f"row {p.y} outside [0, {n})")
    return STVertex(p.y, p.x + p.y)


def is_real(p: EmbeddedPoint, n: int) -> bool:
    """True for points that are copies of real nodes at step >= 0."""
    return 0 <= p.y < n and p.x + p.y >= 0


def out_edges(w: STVertex, n: int) -> list[STEdge]:
    """Store edge always; forward edge unless v is the last node."""
    edges = [STEdge(EdgeKind.STORE, w.v, w.t)]
    if w.v < n - 1:
        edges.append(STEdge(EdgeKind.FORWARD, w.v, w.t))
    return edges


def embedded_step(p: EmbeddedPoint, move: str) -> EmbeddedPoint:
    if move == "E":
        return EmbeddedPoint(p.x + 1, p.y)
    if move == "N":
        return EmbeddedPoint(p.x, p.y + 1)
    raise ValueError(f"unknown move {move!r}")


def edge_of_move(p: EmbeddedPoint, move: str, n: int) -> STEdge:
    """The space-time edge taken when moving east/north from embedded point p."""
    w = unembed(p, n)
    kind = EdgeKind.STORE if move == "E" else EdgeKind.FORWARD
    if kind is EdgeKind.FORWARD and w.v >= n - 1:
        raise OutOfRange(f"no forward edge out of last node, v={w.v}")
    return STEdge(kind, w.v, w.t)


@dataclass
class EdgeUsage:
    """Per-step usage counters for capacity auditing.

    Keyed lazily by edge; the engine records every edge actually taken and
    asserts the caps, then retires steps that can no longer be touched.
    """
    n: int
    B: int
    c: int
    B_track: int
    c_track: int
    counts: dict[STEdge, dict[Track, int]] = field(default_factory=dict)
    max_seen: dict[str, int] = field(default_factory=lambda: {
        "store_total": 0, "forward_total": 0, "store_track": 0, "forward_track": 0,
    })

    def add(self, edge: STEdge, track: Track) -> None:
        per = self.counts.setdefault(edge, {})
        per[track] = per.get(track, 0) + 1

    def audit(self, t: int) -> tuple[list[str], dict[str, int]]:
        """Capacity violations and per-step maxima among edges with tail step t."""
        out = []
        step_max = {"buffer": 0, "link": 0, "store_track": 0, "forward_track": 0}
        for edge, per in self.counts.items():
            if edge.t != t:
                continue
            total = sum(per.values())
            track_max = max(per.values())
            if edge.kind is EdgeKind.STORE:
                step_max["buffer"] = max(step_max["buffer"], total)
                step_max["store_track"] = max(step_max["store_track"], track_max)
                if total > self.B:
                    out.append(f"buffer over capacity at v={edge.v} t={t}: {total} > {self.B}")
                if track_max > self.B_track:
                    out.append(f"store track over capacity at v={edge.v} t={t}: "
                               f"{track_max} > {self.B_track}")
            else:
                step_max["link"] = max(step_max["link"], total)
                step_max["forward_track"] = max(step_max["forward_track"], track_max)
                if total > self.c:
                    out.append(f"link over capacity at v={edge.v} t={t}: {total} > {self.c}")
                if track_max > self.c_track:
                    out.append(f"forward track over capacity at v={edge.v} t={t}: "
                               f"{track_max} > {self.c_track}")
        self.max_seen["store_total"] = max(self.max_seen["store_total"], step_max["buffer"])
        self.max_seen["forward_total"] = max(self.max_seen["forward_total"], step_max["link"])
        self.max_seen["store_track"] = max(self.max_seen["store_track"], step_max["store_track"])
        self.max_seen["forward_track"] = max(self.max_seen["forward_track"],
                                             step_max["forward_track"])
        return out, step_max

    def retire_before(self, t: int) -> None:
        """Drop counters for steps strictly before t; they can never change."""
        dead = [e for e in self.counts if e.t < t]
        for e in dead:
            del self.counts[e]


def count_window_edges(n: int, horizon: int) -> int:
    """Edges with tail step in [0, horizon): n stores + (n-1) forwards per step."""
    return sum(len(out_edges(STVertex(v, t), n)) for v in range(n) for t in range(horizon))
