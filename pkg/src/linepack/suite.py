"""The bundled workload suite: named, fully deterministic trace/config pairs.

The safety suite exercises every class mix the engine supports, including
small-tile overrides so far traffic appears at desk scale.  The compare
suite is small enough for the LP oracle and anchors the recorded
competitive-ratio baselines.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .model import NetConfig, Request, validate_config
from .workload import GENERATORS


@dataclass(frozen=True)
class SuiteEntry:
    name: str
    n: int
    horizon: int
    generator: str
    seed: int
    params: tuple = ()
    B: int = 5
    c: int = 5
    k: Optional[int] = None
    lh: Optional[int] = None
    lv: Optional[int] = None

    def config(self) -> NetConfig:
        return validate_config(self.n, self.B, self.c, self.horizon,
                               seed=self.seed, k=self.k, lh=self.lh, lv=self.lv)

    def trace(self) -> list[Request]:
        gen = GENERATORS[self.generator]
        return gen(self.n, self.horizon, seed=self.seed, **dict(self.params))


SAFETY_SUITE: tuple[SuiteEntry, ...] = (
    # derived tile parameters: all requests are near at these sizes
    SuiteEntry("uniform-n8-long", 8, 4000, "uniform", 101, (("rate", 0.6),)),
    SuiteEntry("uniform-n16-long", 16, 4000, "uniform", 102, (("rate", 0.8),)),
    SuiteEntry("uniform-n32-long", 32, 3000, "uniform", 103, (("rate", 1.0),)),
    SuiteEntry("uniform-n64-long", 64, 2500, "uniform", 104, (("rate", 1.0),)),
    SuiteEntry("burst-n16", 16, 1200, "burst", 105, (("burst", 14),)),
    SuiteEntry("burst-n32", 32, 1000, "burst", 106, (("burst", 12),)),
    SuiteEntry("nearflood-n16", 16, 1500, "near_flood", 107),
    SuiteEntry("nearflood-n32", 32, 1200, "near_flood", 108),
    SuiteEntry("crossing-n32", 32, 900, "crossing", 109, (("density", 1.5),)),
    SuiteEntry("crossing-n64", 64, 700, "crossing", 110, (("density", 1.5),)),
    SuiteEntry("killer-n16", 16, 300, "greedy_killer", 111, k=1, lh=6, lv=6),
    SuiteEntry("killer-n32", 32, 300, "greedy_killer", 112, k=2, lh=12, lv=12),
    # small-tile overrides: far machinery under load
    SuiteEntry("uniform-n8-far", 8, 500, "uniform", 113, (("rate", 1.0),),
               k=1, lh=6, lv=6),
    SuiteEntry("uniform-n16-far", 16, 400, "uniform", 114, (("rate", 1.5),),
               k=1, lh=6, lv=6),
    SuiteEntry("uniform-n16-far-k2", 16, 500, "uniform", 115, (("rate", 1.5),),
               k=2, lh=12, lv=12),
    SuiteEntry("uniform-n32-far", 32, 400, "uniform", 116, (("rate", 2.0),),
               k=2, lh=12, lv=12),
    SuiteEntry("uniform-n64-far", 64, 350, "uniform", 117, (("rate", 2.0),),
               k=2, lh=12, lv=12),
    SuiteEntry("crossing-n32-far", 32, 300, "crossing", 118, (("density", 2.0),),
               k=2, lh=12, lv=12),
    SuiteEntry("crossing-n64-far", 64, 250, "crossing", 119, (("density", 2.0),),
               k=2, lh=12, lv=12),
    SuiteEntry("burst-n32-far", 32, 400, "burst", 120, (("burst", 12),),
               k=2, lh=12, lv=12),
    SuiteEntry("killer-n32-far", 32, 200, "greedy_killer", 121,
               k=3, lh=18, lv=18),
    SuiteEntry("uniform-n64-far-k3", 64, 300, "uniform", 122, (("rate", 2.0),),
               k=3, lh=18, lv=18),
)

COMPARE_SUITE: tuple[SuiteEntry, ...] = (
    SuiteEntry("cmp-n16-uniform", 16, 40, "uniform", 201, (("rate", 1.0),)),
    SuiteEntry("cmp-n16-burst", 16, 30, "burst", 202, (("burst", 10),)),
    SuiteEntry("cmp-n16-far", 16, 40, "uniform", 203, (("rate", 1.0),),
               k=1, lh=6, lv=6),
    SuiteEntry("cmp-n32-uniform", 32, 30, "uniform", 204, (("rate", 1.0),)),
    SuiteEntry("cmp-n32-far", 32, 25, "crossing", 205, (("density", 1.2),),
               k=2, lh=12, lv=12),
    SuiteEntry("cmp-n32-nearflood", 32, 25, "near_flood", 206),
    SuiteEntry("cmp-n64-uniform", 64, 25, "uniform", 207, (("rate", 0.8),)),
    SuiteEntry("cmp-n64-far", 64, 25, "uniform", 208, (("rate", 0.8),),
               k=2, lh=12, lv=12),
)


def entry_by_name(name: str) -> SuiteEntry:
    for entry in SAFETY_SUITE + COMPARE_SUITE:
        if entry.name == name:
            return entry
    raise KeyError(name)


def compare_entry(entry: SuiteEntry) -> dict:
    """Run the routing policy and the fractional oracle on one compare-suite
    entry; ratios rounded to 1e-9, the recorded precision of the baselines."""
    import math

    from .oracle import GridSpec, fractional_opt
    from .router import Engine

    cfg = entry.config()
    trace = entry.trace()
    eng = Engine(cfg)
    summary = eng.run(trace)
    alg = summary["delivered_total"]
    window = max(r.t for r in trace) + cfg.p_max
    sol = fractional_opt(GridSpec(entry.n, entry.B, entry.c), trace, horizon=window)
    row = {
        "name": entry.name,
        "n": entry.n,
        "alg": alg,
        "frac_opt": round(sol.objective, 9),
        "violations": summary["violations"],
    }
    if alg > 0:
        row["ratio"] = round(sol.objective / alg, 9)
        row["ratio_per_logn"] = round(sol.objective / alg / math.log2(entry.n), 9)
    else:
        row["ratio"] = None
        row["ratio_per_logn"] = None
    return row
