"""Seeded request-trace generators and the canonical JSONL trace format.

All randomness comes from SplitMix64, a counter-based 64-bit generator with
fixed published constants (gamma 0x9E3779B97F4A7C15 and the two finalizer
multipliers below), so traces are reproducible bit-for-bit from a single
seed across implementations.  Bounded draws use plain modulo reduction;
the tiny bias is irrelevant for workloads and keeps the semantics trivial
to restate.
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Sequence

from .model import BadParameter, Request

MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
MIX1 = 0xBF58476D1CE4E5B9
MIX2 = 0x94D049BB133111EB


class SplitMix64:
    """Deterministic splittable PRNG; next() advances a counter and mixes."""

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next(self) -> int:
        self.state = (self.state + GAMMA) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * MIX1) & MASK64
        z = ((z ^ (z >> 27)) * MIX2) & MASK64
        return z ^ (z >> 31)

    def below(self, bound: int) -> int:
        if bound <= 0:
            raise ValueError(f"bound must be positive, got {bound}")
        return self.next() % bound

    def chance(self, num: int, den: int) -> bool:
        return self.below(den) < num

    def split(self, label: int) -> "SplitMix64":
        return SplitMix64(self.next() ^ (label * GAMMA))


def validate_trace(requests: Sequence[Request], n: int, horizon: int) -> None:
    prev = None
    seen_ids = set()
    for r in requests:
        r.validate(n)
        if r.t >= horizon:
            raise BadParameter(f"request {r.id} arrives at {r.t} >= horizon {horizon}")
        if r.id in seen_ids:
            raise BadParameter(f"duplicate request id {r.id}")
        seen_ids.add(r.id)
        key = (r.t, r.id)
        if prev is not None and key < prev:
            raise BadParameter("trace not sorted by (t, id)")
        prev = key


def write_trace(path: str | Path, requests: Sequence[Request]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for r in requests:
            fh.write(json.dumps({"id": r.id, "src": r.src, "dst": r.dst, "t": r.t},
                                separators=(", ", ": ")) + "\n")


def read_trace(path: str | Path) -> list[Request]:
    out = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            d = json.loads(line)
            out.append(Request(id=int(d["id"]), src=int(d["src"]),
                               dst=int(d["dst"]), t=int(d["t"])))
    return out


def _finish(reqs: list[tuple[int, int, int]], n: int, horizon: int) -> list[Request]:
    """Assign ids in (t, insertion) order and validate."""
    reqs.sort(key=lambda x: (x[0],))
    out = [Request(id=i, src=src, dst=dst, t=t)
           for i, (t, src, dst) in enumerate(reqs)]
    validate_trace(out, n, horizon)
    return out


def gen_uniform(n: int, horizon: int, rate: float, seed: int) -> list[Request]:
    """Independent per-step arrivals: floor(rate) fixed plus one Bernoulli
    for the fractional part; src/dst uniform over valid pairs."""
    rng = SplitMix64(seed).split(1)
    whole = int(rate)
    frac_num = round((rate - whole) * 1_000_000)
    reqs: list[tuple[int, int, int]] = []
    for t in range(horizon):
        count = whole + (1 if frac_num and rng.chance(frac_num, 1_000_000) else 0)
        for _ in range(count):
            src = rng.below(n - 1)
            dst = src + 1 + rng.below(n - 1 - src)
            reqs.append((t, src, dst))
    return _finish(reqs, n, horizon)


def gen_burst(n: int, horizon: int, burst: int, seed: int, period: int = 8) -> list[Request]:
    """Repeated bursts at a single random space-time vertex per episode;
    stresses the per-source filter and the B+c source cut."""
    rng = SplitMix64(seed).split(2)
    reqs: list[tuple[int, int, int]] = []
    for t in range(0, horizon, period):
        v = rng.below(n - 1)
        for _ in range(burst):
            dst = v + 1 + rng.below(n - 1 - v)
            reqs.append((t, v, dst))
    return _finish(reqs, n, horizon)


def gen_greedy_killer(n: int, horizon: int, seed: int, rate: int = 0) -> list[Request]:
    """Sustained long-haul waves plus link-saturating short-haul arrivals.

    In-transit packets are older than anything injected downstream, so a
    work-conserving oldest-first drop-newest policy hands every link to the
    long waves and starves the shorts, even though serving the shorts alone
    fills every link: each long consumes n-1 link-slots for one delivery.
    rate defaults to the link capacity of the bundled configs (5); the seed
    only perturbs which interior node loses its shorts each step.
    """
    rng = SplitMix64(seed).split(3)
    per_step = rate if rate > 0 else 5
    reqs: list[tuple[int, int, int]] = []
    span = max(2, n - 1)
    for t in range(horizon):
        for _ in range(per_step):
            reqs.append((t, 0, span))
        skip = 1 + rng.below(max(1, n - 2))
        for v in range(1, n - 1):
            if v == skip:
                continue
            for _ in range(per_step):
                reqs.append((t, v, v + 1))
    return _finish(reqs, n, horizon)


def gen_crossing(n: int, horizon: int, density: float, seed: int) -> list[Request]:
    """Overlapping long spans saturating the interior links."""
    rng = SplitMix64(seed).split(4)
    whole = int(density)
    frac_num = round((density - whole) * 1_000_000)
    reqs: list[tuple[int, int, int]] = []
    half = n // 2
    for t in range(horizon):
        count = whole + (1 if frac_num and rng.chance(frac_num, 1_000_000) else 0)
        for _ in range(count):
            src = rng.below(max(1, half))
            lo = max(half, src + 1)
            dst = lo + rng.below(max(1, n - lo))
            dst = min(dst, n - 1)
            if dst <= src:
                dst = src + 1
            reqs.append((t, src, dst))
    return _finish(reqs, n, horizon)


def gen_near_flood(n: int, horizon: int, seed: int, fan: int = 6,
                   span: int = 1) -> list[Request]:
    """Many short requests at few vertices; exercises the near-track bound."""
    rng = SplitMix64(seed).split(5)
    reqs: list[tuple[int, int, int]] = []
    for t in range(horizon):
        v = rng.below(max(1, n - span))
        for _ in range(fan):
            d = 1 + rng.below(span)
            if v + d <= n - 1:
                reqs.append((t, v, v + d))
    return _finish(reqs, n, horizon)


GENERATORS = {
    "uniform": gen_uniform,
    "burst": gen_burst,
    "greedy_killer": gen_greedy_killer,
    "crossing": gen_crossing,
    "near_flood": gen_near_flood,
}
