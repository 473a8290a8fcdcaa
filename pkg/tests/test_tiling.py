import pytest

from linepack.model import validate_config
from linepack.spacetime import EmbeddedPoint
from linepack.tiling import (Quadrant, SketchGraph, TileId, Tiling,
                             crossing_capacity, sketch_graphs)


def test_tile_of_origin():
    t = Tiling(j=1, ox=0, oy=0, lh=4, lv=4)
    assert t.tile_of(EmbeddedPoint(0, 0)) == TileId(1, 0, 0)
    assert t.tile_of(EmbeddedPoint(3, 3)) == TileId(1, 0, 0)
    assert t.tile_of(EmbeddedPoint(4, 0)) == TileId(1, 1, 0)


def test_tile_of_negative_offset_floor():
    t = Tiling(j=2, ox=-2, oy=0, lh=4, lv=4)
    assert t.tile_of(EmbeddedPoint(1, 0)).ix == 0  # floor((1+2)/4)
    assert t.tile_of(EmbeddedPoint(2, 0)).ix == 1


def test_tile_of_matches_interval_oracle():
    t = Tiling(j=4, ox=-3, oy=-2, lh=6, lv=4)
    for x in range(-6, 3 * 6):
        for y in range(-4, 3 * 4):
            tile = t.tile_of(EmbeddedPoint(x, y))
            x0, y0 = t.origin(tile)
            assert x0 <= x < x0 + t.lh
            assert y0 <= y < y0 + t.lv


def test_quadrants():
    t = Tiling(j=1, ox=0, oy=0, lh=6, lv=4)
    assert t.quadrant_of(EmbeddedPoint(0, 0)) is Quadrant.SW
    assert t.quadrant_of(EmbeddedPoint(3, 2)) is Quadrant.NE  # mid point goes NE
    assert t.quadrant_of(EmbeddedPoint(3, 0)) is Quadrant.SE
    assert t.quadrant_of(EmbeddedPoint(0, 2)) is Quadrant.NW


def test_quadrants_partition_equally():
    t = Tiling(j=1, ox=0, oy=0, lh=6, lv=4)
    counts = {q: 0 for q in Quadrant}
    for x in range(6):
        for y in range(4):
            counts[t.quadrant_of(EmbeddedPoint(x, y))] += 1
    assert set(counts.values()) == {6 * 4 // 4}


@pytest.fixture(scope="module")
def cfg():
    return validate_config(16, 5, 5, 200, k=2, lh=12, lv=12)


def brute_force_east_crossing(sg: SketchGraph, tile: TileId) -> bool:
    # enumerate real store edges crossing the east boundary
    t = sg.tiling
    x0, y0 = t.origin(tile)
    x_tail = x0 + t.lh - 1
    return any(0 <= y < sg.n and x_tail + y >= 0 for y in range(y0, y0 + t.lv))


def brute_force_north_crossing(sg: SketchGraph, tile: TileId) -> bool:
    t = sg.tiling
    x0, y0 = t.origin(tile)
    y_tail = y0 + t.lv - 1
    return any(0 <= y_tail < sg.n - 1 and x + y_tail >= 0
               for x in range(x0, x0 + t.lh))


def test_sketch_neighbors_match_crossing_enumeration(cfg):
    for sg in sketch_graphs(cfg).values():
        for ix in range(-2, 4):
            for iy in range(-1, 3):
                tile = TileId(sg.j, ix, iy)
                nbrs = dict((n, c) for n, c in sg.neighbors(tile))
                east = TileId(sg.j, ix + 1, iy)
                north = TileId(sg.j, ix, iy + 1)
                assert (east in nbrs) == brute_force_east_crossing(sg, tile)
                assert (north in nbrs) == brute_force_north_crossing(sg, tile)
                assert all(c == 1 for c in nbrs.values())


def test_interior_tile_has_two_neighbors(cfg):
    sg = sketch_graphs(cfg)[1]
    assert len(sg.neighbors(TileId(1, 2, 0))) == 2


def test_top_band_tile_has_no_north_neighbor(cfg):
    sg = sketch_graphs(cfg)[1]
    top_band = sg.sink_band(cfg.n - 1)
    nbrs = [n for n, _ in sg.neighbors(TileId(1, 2, top_band))]
    assert all(n.iy == top_band for n in nbrs)


def test_sink_wiring(cfg):
    sg = sketch_graphs(cfg)[1]
    assert sg.sink_band(0) == 0
    band = sg.sink_band(7)
    assert band == 7 // cfg.lv
    tiles = sg.sink_wiring(7, 0, 3)
    assert tiles == {TileId(1, ix, band) for ix in range(4)}
    # agreement with direct row-span enumeration
    for tile in tiles:
        x0, y0 = sg.tiling.origin(tile)
        assert y0 <= 7 < y0 + cfg.lv


def test_interior_crossing_capacity(cfg):
    assert crossing_capacity(cfg, horizontal=True) == cfg.lv * cfg.B
    assert crossing_capacity(cfg, horizontal=False) == cfg.lh * cfg.c
    # both are Theta(k) with the module constants: at least 6k per track side
    assert cfg.lv * cfg.B >= 6 * cfg.k and cfg.lh * cfg.c >= 6 * cfg.k


def test_every_vertex_sw_in_exactly_one_tiling(cfg):
    tilings = [Tiling.of(cfg, j) for j in (1, 2, 3, 4)]
    for x in range(0, 2 * cfg.lh):
        for y in range(0, min(2 * cfg.lv, cfg.n)):
            hits = [t.j for t in tilings
                    if t.quadrant_of(EmbeddedPoint(x, y)) is Quadrant.SW]
            assert len(hits) == 1
