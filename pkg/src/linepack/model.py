"""Core domain types: network config, derived constants, requests, classification."""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import IntEnum
from fractions import Fraction
from typing import Optional


class BadParameter(ValueError):
    """Raised when a configuration or request is outside the supported range."""


class Track(IntEnum):
    """Capacity slice of every edge: one for near traffic, one per tiling.

    Each track owns B_track units of every store edge and c_track units of
    every forward edge, so the five classes never compete for capacity.
    The same labels classify requests (NEAR, or FAR<j> for tiling j).
    """
    NEAR = 0
    FAR1 = 1
    FAR2 = 2
    FAR3 = 3
    FAR4 = 4

    @property
    def tiling(self) -> int:
        if self is Track.NEAR:
            raise ValueError("near track has no tiling")
        return int(self)

    @staticmethod
    def far(j: int) -> "Track":
        if j not in (1, 2, 3, 4):
            raise ValueError(f"tiling index out of range: {j}")
        return Track(j)


def _ceil_log2(x: int) -> int:
    # smallest k with 2^k >= x, for x >= 1
    return (x - 1).bit_length()


def _round_up_even(x: int) -> int:
    return x if x % 2 == 0 else x + 1


@dataclass(frozen=True)
class NetConfig:
    """Validated network parameters plus every derived constant.

    Immutable; construct through validate_config().
    """
    n: int
    B: int
    c: int
    horizon: int
    seed: int = 0
    # per-track capacities (a fifth of the edge, rounded down)
    B_track: int = field(init=False, default=0)
    c_track: int = field(init=False, default=0)
    # maximum detailed path length; beyond it throughput loss stops paying off
    p_max: int = field(init=False, default=0)
    # sketch-edge load bound and tile sides
    k: int = field(init=False, default=0)
    lh: int = field(init=False, default=0)
    lv: int = field(init=False, default=0)
    # admission threshold for the path packing weights
    tau: int = field(init=False, default=0)
    # global sketch hop bound (per-request bounds may be tighter)
    hop_bound: int = field(init=False, default=0)

    def east_hop_cap(self, dist: int) -> int:
        """Max east sketch hops so a detailed path of this src-dst distance
        stays within p_max steps: length <= (east_hops+1)*lh - 1 + dist."""
        return (self.p_max - dist + 1 - self.lh) // self.lh

    def request_hop_bound(self, dist: int, bands: int) -> int:
        """Sketch hop budget for one request: bands north hops are mandatory,
        east hops capped by the path-length budget and the global bound."""
        return min(self.hop_bound, bands + max(self.east_hop_cap(dist), 0))


def validate_config(
    n: int,
    B: int,
    c: int,
    horizon: int,
    seed: int = 0,
    k: Optional[int] = None,
    lh: Optional[int] = None,
    lv: Optional[int] = None,
) -> NetConfig:
    """Check raw parameters and compute all derived constants.

    Overrides for k, lh, lv exist for testing small tiles; they must still
    satisfy the per-quadrant capacity preconditions or detailed routing would
    lose its feasibility guarantee.
    """
    if n < 2:
        raise BadParameter(f"need at least 2 nodes, got n={n}")
    if B < 5:
        raise BadParameter(f"buffers must hold at least 5 packets, got B={B}")
    if c < 5:
        raise BadParameter(f"links must carry at least 5 packets, got c={c}")
    if horizon < 1:
        raise BadParameter(f"horizon must be positive, got {horizon}")

    B_track = B // 5
    c_track = c // 5

    p_max_exact = 2 * n * (1 + Fraction(B, c))
    p_max = int(-((-p_max_exact.numerator) // p_max_exact.denominator))  # ceil

    k_val = k if k is not None else _ceil_log2(1 + 3 * p_max)
    if k_val < 1:
        raise BadParameter(f"load bound k must be >= 1, got {k_val}")

    lh_val = lh if lh is not None else _round_up_even(-(-6 * k_val // c_track))
    lv_val = lv if lv is not None else _round_up_even(-(-6 * k_val // B_track))

    for name, val in (("lh", lh_val), ("lv", lv_val)):
        if val < 2 or val % 2 != 0:
            raise BadParameter(f"{name} must be an even integer >= 2, got {val}")
    if lh_val * c_track < 6 * k_val:
        raise BadParameter(
            f"per-track capacity of a horizontal tile side is {lh_val * c_track}"
            f" < 6k = {6 * k_val}; detailed routing would be infeasible")
    if lv_val * B_track < 6 * k_val:
        raise BadParameter(
            f"per-track capacity of a vertical tile side is {lv_val * B_track}"
            f" < 6k = {6 * k_val}; detailed routing would be infeasible")
    if lv_val < n - 1 and lh_val > p_max - n + 2:
        # far requests exist but a worst-case one could not be delivered
        # within p_max steps even on a straight-north sketch path
        raise BadParameter(
            f"lh={lh_val} too large for p_max={p_max}: far requests could "
            f"exceed the p_max path-length bound")

    tau = min(3 * p_max, 2 ** k_val - 1)
    half_h = lh_val // 2
    half_v = lv_val // 2
    hop_bound = -(-p_max // half_h) + (-(-p_max // half_v)) + 2

    cfg = NetConfig(n=n, B=B, c=c, horizon=horizon, seed=seed)
    object.__setattr__(cfg, "B_track", B_track)
    object.__setattr__(cfg, "c_track", c_track)
    object.__setattr__(cfg, "p_max", p_max)
    object.__setattr__(cfg, "k", k_val)
    object.__setattr__(cfg, "lh", lh_val)
    object.__setattr__(cfg, "lv", lv_val)
    object.__setattr__(cfg, "tau", tau)
    object.__setattr__(cfg, "hop_bound", hop_bound)
    return cfg


@dataclass(frozen=True, order=True)
class Request:
    """One packet request: src node, dst node, arrival step."""
    id: int
    src: int
    dst: int
    t: int

    def validate(self, n: int) -> None:
        if not (0 <= self.src < self.dst <= n - 1):
            raise BadParameter(
                f"request {self.id}: need 0 <= src < dst <= {n - 1}, "
                f"got src={self.src} dst={self.dst}")
        if self.t < 0:
            raise BadParameter(f"request {self.id}: negative arrival step {self.t}")

    @property
    def dist(self) -> int:
        return self.dst - self.src


# The four tiling offsets, indexed by j.  Offsets are fractions of a tile:
# (ox_num, oy_num) with ox = ox_num * lh // 2 etc.
TILING_OFFSET_SIGNS = {1: (0, 0), 2: (-1, 0), 3: (0, -1), 4: (-1, -1)}


def tiling_offsets(cfg: NetConfig, j: int) -> tuple[int, int]:
    sx, sy = TILING_OFFSET_SIGNS[j]
    return sx * cfg.lh // 2, sy * cfg.lv // 2


def sw_tiling_of_point(cfg: NetConfig, x: int, y: int) -> int:
    """The unique tiling index whose tile has (x, y) in its south-west quadrant."""
    half_h, half_v = cfg.lh // 2, cfg.lv // 2
    j_found = 0
    for j in (1, 2, 3, 4):
        ox, oy = tiling_offsets(cfg, j)
        if (x - ox) % cfg.lh < half_h and (y - oy) % cfg.lv < half_v:
            if j_found:
                raise AssertionError(f"point ({x},{y}) is SW in tilings {j_found} and {j}")
            j_found = j
    if not j_found:
        raise AssertionError(f"point ({x},{y}) is SW in no tiling")
    return j_found


def classify(cfg: NetConfig, r: Request) -> Track:
    """Near iff the src-dst distance is at most lv, else the unique far class."""
    if r.dist <= cfg.lv:
        return Track.NEAR
    x, y = r.t - r.src, r.src
    return Track.far(sw_tiling_of_point(cfg, x, y))
