"""Reference greedy baseline: forward if the link has room, else store if
the buffer has room, else drop the newest packets.  Older packets win ties,
so it is work-conserving and preemptive (a stored packet can still be lost
later when a full buffer forces drops)."""
from __future__ import annotations

from dataclasses import dataclass

from .model import Request


@dataclass
class _Pkt:
    rid: int
    dst: int
    t_arr: int


class GreedyEngine:
    def __init__(self, n: int, B: int, c: int, horizon: int):
        self.n, self.B, self.c, self.horizon = n, B, c, horizon
        self.nodes: list[list[_Pkt]] = [[] for _ in range(n)]
        self.t = 0
        self.totals = {"arrivals": 0, "accepted": 0, "rejected": 0,
                       "delivered": 0, "dropped_inflight": 0, "filtered": 0}
        self.reports: list[dict] = []
        self.max_buffer = 0
        self.max_link = 0

    def step(self, t: int, arrivals: list[Request]) -> dict:
        assert t == self.t
        self.totals["arrivals"] += len(arrivals)
        for r in sorted(arrivals, key=lambda r: r.id):
            self.nodes[r.src].append(_Pkt(r.id, r.dst, r.t))

        delivered = 0
        step_link = 0
        incoming: list[list[_Pkt]] = [[] for _ in range(self.n)]
        rejected = 0
        for v in range(self.n):
            here = sorted(self.nodes[v], key=lambda p: p.rid)
            forwarded = here[: self.c] if v < self.n - 1 else []
            rest = here[len(forwarded):]
            step_link = max(step_link, len(forwarded))
            for p in forwarded:
                incoming[v + 1].append(p)
            stored = rest[: self.B]
            for p in rest[self.B:]:
                if p.t_arr == t:
                    rejected += 1  # dropped on arrival
                else:
                    self.totals["dropped_inflight"] += 1
            self.nodes[v] = stored
            self.max_buffer = max(self.max_buffer, len(stored))
        accepted = len(arrivals) - rejected
        self.max_link = max(self.max_link, step_link)

        for v in range(self.n):
            for p in incoming[v]:
                if p.dst == v:
                    delivered += 1
                else:
                    self.nodes[v].append(p)

        self.totals["accepted"] += accepted
        self.totals["rejected"] += rejected
        self.totals["delivered"] += delivered
        report = {"t": t, "arrivals": len(arrivals), "filtered": 0,
                  "accepted": accepted, "rejected": rejected,
                  "delivered": delivered,
                  "max_loads": {"buffer": self.max_buffer, "link": step_link}}
        self.reports.append(report)
        self.t += 1
        return report

    def run(self, requests: list[Request], drain: bool = True) -> dict:
        by_step: dict[int, list[Request]] = {}
        for r in requests:
            by_step.setdefault(r.t, []).append(r)
        last = max(by_step) if by_step else -1
        t = 0
        while True:
            self.step(t, by_step.get(t, []))
            t += 1
            if t <= last:
                continue
            if not drain:
                if t >= self.horizon:
                    break
                continue
            if not any(self.nodes):
                break
            if t > last + 2 * self.n + 2:
                break  # everything still aboard is at most n hops away
        return self.summary()

    def summary(self) -> dict:
        return {
            "schema": 1,
            "policy": "greedy",
            "n": self.n, "B": self.B, "c": self.c, "horizon": self.horizon,
            "arrivals_total": self.totals["arrivals"],
            "filtered_total": 0,
            "accepted_total": self.totals["accepted"],
            "rejected_total": self.totals["rejected"],
            "rejected_nopath": 0,
            "delivered_total": self.totals["delivered"],
            "dropped_inflight": self.totals["dropped_inflight"],
            "per_class_accepted": {},
            "per_class_rejected": {},
            "max_loads": {"buffer": self.max_buffer, "link": self.max_link},
            "violations": 0,
        }
