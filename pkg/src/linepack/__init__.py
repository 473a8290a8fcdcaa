"""Online packet routing on unidirectional line networks with bounded buffers.

Library + CLI: a deterministic admission-controlled routing engine built on
space-time path packing over tiled sketch graphs, a greedy reference baseline,
offline optimum oracles (fractional LP, exact branch-and-bound, cut bounds),
and seeded workload generators.
"""
from .model import BadParameter, NetConfig, Request, Track, classify, validate_config

__all__ = [
    "BadParameter",
    "NetConfig",
    "Request",
    "Track",
    "classify",
    "validate_config",
]

__version__ = "0.1.0"
