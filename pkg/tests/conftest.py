from __future__ import annotations

from linepack.tiling import TileId


class GridSketch:
    """Synthetic full w x h sketch grid; a destination names its row band."""

    def __init__(self, w: int, h: int, j: int = 1, missing: frozenset = frozenset()):
        self.w, self.h, self.j = w, h, j
        self.missing = missing  # set of (tail TileId, move) edges to drop

    def neighbors(self, tile: TileId):
        out = []
        if tile.ix + 1 < self.w and (tile, "E") not in self.missing:
            out.append((TileId(self.j, tile.ix + 1, tile.iy), 1))
        if tile.iy + 1 < self.h and (tile, "N") not in self.missing:
            out.append((TileId(self.j, tile.ix, tile.iy + 1), 1))
        return out

    def sink_band(self, dst: int) -> int:
        return dst


def band_sinks(grid: GridSketch, src: TileId, dst: int, budget: int) -> set[TileId]:
    band = grid.sink_band(dst)
    east = budget - (band - src.iy)
    return {TileId(grid.j, src.ix + e, band) for e in range(east + 1)}
