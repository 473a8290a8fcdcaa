"""Tilings of the embedded plane, tile/quadrant geometry, sketch graphs.

Each of the four half-shifted tilings partitions the plane into lh x lv
rectangles.  The sketch graph of a tiling has one node per tile and a
unit-capacity edge to the east and north neighbors wherever at least one
real space-time edge crosses the shared boundary.  A destination row b is
served anycast-style by every tile of the row band containing b.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple

from .model import NetConfig, tiling_offsets
from .spacetime import EmbeddedPoint


class TileId(NamedTuple):
    j: int   # tiling index 1..4
    ix: int  # column in the tile lattice (east)
    iy: int  # row band in the tile lattice (north)


class Quadrant(Enum):
    SW = "SW"
    SE = "SE"
    NW = "NW"
    NE = "NE"


@dataclass(frozen=True)
class Tiling:
    """One shifted tiling: offset pair plus the side lengths from the config."""
    j: int
    ox: int
    oy: int
    lh: int
    lv: int

    @staticmethod
    def of(cfg: NetConfig, j: int) -> "Tiling":
        ox, oy = tiling_offsets(cfg, j)
        return Tiling(j=j, ox=ox, oy=oy, lh=cfg.lh, lv=cfg.lv)

    def tile_of(self, p: EmbeddedPoint) -> TileId:
        return TileId(self.j, (p.x - self.ox) // self.lh, (p.y - self.oy) // self.lv)

    def origin(self, tile: TileId) -> EmbeddedPoint:
        """South-west corner of the tile rectangle."""
        return EmbeddedPoint(self.ox + tile.ix * self.lh, self.oy + tile.iy * self.lv)

    def quadrant_of(self, p: EmbeddedPoint) -> Quadrant:
        x0, y0 = self.origin(self.tile_of(p))
        west = (p.x - x0) < self.lh // 2
        south = (p.y - y0) < self.lv // 2
        if south:
            return Quadrant.SW if west else Quadrant.SE
        return Quadrant.NW if west else Quadrant.NE

    def band_of_row(self, y: int) -> int:
        """Row-band index iy of the tiles whose row span contains row y."""
        return (y - self.oy) // self.lv


@dataclass(frozen=True)
class SketchGraph:
    """Static geometry of one tiling's sketch graph.

    Load counters live in the path packing state, which must be a pure
    function of the committed request set; this object only answers
    which unit-capacity edges exist.
    """
    tiling: Tiling
    n: int  # real rows are 0..n-1

    @property
    def j(self) -> int:
        return self.tiling.j

    def east_edge_exists(self, tile: TileId) -> bool:
        """Some real store edge crosses from this tile to its east neighbor."""
        t = self.tiling
        x0, y0 = t.origin(tile)
        x_tail = x0 + t.lh - 1
        y_hi = min(y0 + t.lv, self.n)  # exclusive
        y_lo = max(y0, 0)
        if y_lo >= y_hi:
            return False
        # tail step = x_tail + y must be >= 0 for some real row
        return x_tail + (y_hi - 1) >= 0

    def north_edge_exists(self, tile: TileId) -> bool:
        """Some real forward edge crosses into the tile's north neighbor."""
        t = self.tiling
        x0, y0 = t.origin(tile)
        y_tail = y0 + t.lv - 1
        if not (0 <= y_tail <= self.n - 2):
            return False
        # some column with non-negative tail step
        return (x0 + t.lh - 1) + y_tail >= 0

    def neighbors(self, tile: TileId) -> list[tuple[TileId, int]]:
        """Outgoing sketch edges as (neighbor, capacity)."""
        out: list[tuple[TileId, int]] = []
        if self.east_edge_exists(tile):
            out.append((TileId(tile.j, tile.ix + 1, tile.iy), 1))
        if self.north_edge_exists(tile):
            out.append((TileId(tile.j, tile.ix, tile.iy + 1), 1))
        return out

    def sink_band(self, dst: int) -> int:
        if not 0 <= dst < self.n:
            raise ValueError(f"destination row {dst} outside [0, {self.n})")
        return self.tiling.band_of_row(dst)

    def sink_wiring(self, dst: int, ix_lo: int, ix_hi: int) -> set[TileId]:
        """Tiles wired to the virtual sink of row dst, within a tile-column window."""
        band = self.sink_band(dst)
        return {TileId(self.j, ix, band) for ix in range(ix_lo, ix_hi + 1)}


def sketch_graphs(cfg: NetConfig) -> dict[int, SketchGraph]:
    return {j: SketchGraph(tiling=Tiling.of(cfg, j), n=cfg.n) for j in (1, 2, 3, 4)}


def crossing_capacity(cfg: NetConfig, horizontal: bool) -> int:
    """Total space-time capacity crossing a fully interior tile boundary:
    lv store edges of capacity B between east-west neighbors, lh forward
    edges of capacity c between south-north neighbors."""
    return cfg.lv * cfg.B if horizontal else cfg.lh * cfg.c
