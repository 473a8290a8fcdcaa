"""Offline optimum oracles for benchmarking the online algorithm.

fractional_opt solves the per-request edge-flow LP on a truncated space-time
window (exact to 1e-6 on the objective, feasibility re-verified from the raw
flows).  integral_opt is exact branch-and-bound for tiny instances.
cut_upper_bound is a cheap capacity-cut bound dominating both.  These model
the raw network (no tracks), so they accept arbitrary positive B and c.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import linprog
from scipy.sparse import coo_matrix

from .model import Request
from .pathpack import SketchPath
from .spacetime import EdgeKind, STEdge

OBJ_TOL = 1e-6


class TooLarge(RuntimeError):
    """Instance exceeds the configured oracle size limits."""


@dataclass(frozen=True)
class GridSpec:
    """Raw network parameters for oracle runs (no track multiplexing)."""
    n: int
    B: int
    c: int

    def cap(self, kind: EdgeKind) -> int:
        return self.B if kind is EdgeKind.STORE else self.c


@dataclass
class FlowSolution:
    """A fractional routing: per-request flow amounts and edge flows."""
    objective: float
    amounts: dict[int, float]
    edge_flows: dict[int, dict[STEdge, float]]
    edge_totals: dict[STEdge, float] = field(default_factory=dict)

    def verify(self, gs: GridSpec, requests: Sequence[Request], tol: float = 1e-5) -> None:
        """Independent feasibility recheck straight from the flow values."""
        by_id = {r.id: r for r in requests}
        totals: dict[STEdge, float] = {}
        for rid, flows in self.edge_flows.items():
            r = by_id[rid]
            net: dict[tuple[int, int], float] = {}
            for e, val in flows.items():
                if val < -tol or val > 1 + tol:
                    raise AssertionError(f"flow outside [0,1]: {e} = {val}")
                totals[e] = totals.get(e, 0.0) + val
                net[(e.v, e.t)] = net.get((e.v, e.t), 0.0) - val
                hv, ht = e.head
                net[(hv, ht)] = net.get((hv, ht), 0.0) + val
            for (v, t), bal in net.items():
                if v == r.dst:
                    continue  # absorbed at any copy of the destination
                if (v, t) == (r.src, r.t):
                    if not -tol <= -bal <= 1 + tol:
                        raise AssertionError(f"request {rid} source outflow {-bal}")
                    continue
                if abs(bal) > tol:
                    raise AssertionError(f"request {rid} conservation broken at ({v},{t})")
        for e, tot in totals.items():
            if tot > gs.cap(e.kind) + tol:
                raise AssertionError(f"edge {e} overloaded: {tot} > {gs.cap(e.kind)}")


def _request_edges(gs: GridSpec, r: Request, t_end: int, deadline: int) -> list[STEdge]:
    """Edges request r may use: monotone window between its source and the
    latest step at which the destination row is still reachable."""
    out = []
    for v in range(r.src, r.dst):
        lo = r.t + (v - r.src)
        hi_store = min(t_end, deadline - r.dst + v) - 1      # tail step, inclusive
        hi_fwd = min(t_end - 1, deadline - r.dst + v)
        for t in range(lo, hi_store + 1):
            out.append(STEdge(EdgeKind.STORE, v, t))
        for t in range(lo, hi_fwd + 1):
            out.append(STEdge(EdgeKind.FORWARD, v, t))
    return out


def fractional_opt(
    gs: GridSpec,
    requests: Sequence[Request],
    horizon: int,
    pmax_bound: Optional[int] = None,
    var_cap: int = 2_000_000,
) -> FlowSolution:
    """Maximum-throughput fractional 1-packing on the windowed grid.

    With pmax_bound set, each request's paths are limited to that many steps
    via its reachability window (every edge advances time by one, so length
    and deadline coincide).
    """
    requests = sorted(requests, key=lambda r: r.id)
    var_index: dict[tuple[int, STEdge], int] = {}
    edges_of: dict[int, list[STEdge]] = {}
    for r in requests:
        deadline = horizon if pmax_bound is None else min(horizon, r.t + pmax_bound)
        edges = _request_edges(gs, r, horizon, deadline)
        edges_of[r.id] = edges
        for e in edges:
            var_index[(r.id, e)] = len(var_index)
    nvars = len(var_index)
    if nvars > var_cap:
        raise TooLarge(f"{nvars} flow variables exceed the cap {var_cap}")
    if nvars == 0:
        return FlowSolution(0.0, {r.id: 0.0 for r in requests},
                            {r.id: {} for r in requests})

    obj = np.zeros(nvars)
    eq_rows: list[int] = []
    eq_cols: list[int] = []
    eq_vals: list[float] = []
    ub_rows: list[int] = []
    ub_cols: list[int] = []
    ub_vals: list[float] = []
    ub_b: list[float] = []
    n_eq = 0

    for r in requests:
        src = (r.src, r.t)
        incident: dict[tuple[int, int], list[tuple[int, float]]] = {}
        for e in edges_of[r.id]:
            col = var_index[(r.id, e)]
            incident.setdefault((e.v, e.t), []).append((col, -1.0))  # outflow
            hv, ht = e.head
            incident.setdefault((hv, ht), []).append((col, +1.0))    # inflow
        for vertex, terms in sorted(incident.items()):
            v, _t = vertex
            if v == r.dst:
                continue  # absorbing row
            if vertex == src:
                # source outflow at most 1 (this is the served amount)
                row = len(ub_b)
                for col, sign in terms:
                    if sign < 0:
                        ub_rows.append(row)
                        ub_cols.append(col)
                        ub_vals.append(1.0)
                        obj[col] = -1.0  # linprog minimizes
                ub_b.append(1.0)
                continue
            for col, sign in terms:
                eq_rows.append(n_eq)
                eq_cols.append(col)
                eq_vals.append(sign)
            n_eq += 1

    # shared capacity per physical edge
    phys: dict[STEdge, list[int]] = {}
    for (rid, e), col in var_index.items():
        phys.setdefault(e, []).append(col)
    for e, cols in sorted(phys.items(), key=lambda kv: (kv[0].kind.value, kv[0].v, kv[0].t)):
        row = len(ub_b)
        for col in cols:
            ub_rows.append(row)
            ub_cols.append(col)
            ub_vals.append(1.0)
        ub_b.append(float(gs.cap(e.kind)))

    a_eq = coo_matrix((eq_vals, (eq_rows, eq_cols)), shape=(n_eq, nvars)) if n_eq else None
    a_ub = coo_matrix((ub_vals, (ub_rows, ub_cols)), shape=(len(ub_b), nvars))
    res = linprog(obj, A_ub=a_ub, b_ub=np.array(ub_b),
                  A_eq=a_eq, b_eq=np.zeros(n_eq) if n_eq else None,
                  bounds=(0, 1), method="highs")
    if not res.success:
        raise RuntimeError(f"LP solve failed: {res.message}")

    x = np.clip(res.x, 0.0, 1.0)
    amounts: dict[int, float] = {}
    flows: dict[int, dict[STEdge, float]] = {}
    for r in requests:
        per: dict[STEdge, float] = {}
        for e in edges_of[r.id]:
            val = float(x[var_index[(r.id, e)]])
            if val > 1e-12:
                per[e] = val
        flows[r.id] = per
        amounts[r.id] = sum(v for e, v in per.items() if (e.v, e.t) == (r.src, r.t))
    totals: dict[STEdge, float] = {}
    for per in flows.values():
        for e, v in per.items():
            totals[e] = totals.get(e, 0.0) + v
    sol = FlowSolution(objective=float(-res.fun), amounts=amounts,
                       edge_flows=flows, edge_totals=totals)
    sol.verify(gs, requests)
    return sol


# -- exact integral optimum for tiny instances ----------------------------


def _iter_paths(gs: GridSpec, r: Request, horizon: int, deadline: int,
                residual: dict[STEdge, int]):
    """Residual-feasible monotone paths of r, forward moves explored first
    so the earliest-delivery path comes out first."""

    def walk(v: int, t: int, acc: list[STEdge]):
        if v == r.dst:
            yield list(acc)
            return
        if t + (r.dst - v) > deadline or t >= horizon:
            return
        fwd = STEdge(EdgeKind.FORWARD, v, t)
        if residual.get(fwd, gs.c) > 0:
            acc.append(fwd)
            yield from walk(v + 1, t + 1, acc)
            acc.pop()
        sto = STEdge(EdgeKind.STORE, v, t)
        if residual.get(sto, gs.B) > 0:
            acc.append(sto)
            yield from walk(v, t + 1, acc)
            acc.pop()

    yield from walk(r.src, r.t, [])


def integral_opt(
    gs: GridSpec,
    requests: Sequence[Request],
    horizon: int,
    pmax_bound: Optional[int] = None,
    max_requests: int = 10,
    max_n: int = 6,
    max_horizon: int = 14,
    node_cap: int = 500_000,
) -> tuple[int, dict[int, list[STEdge]]]:
    """Exact maximum served subset via branch-and-bound over accept decisions
    with per-request path branching under residual capacities.  Returns the
    count and one witness schedule.
    """
    if len(requests) > max_requests or gs.n > max_n or horizon > max_horizon:
        raise TooLarge(
            f"instance beyond exact-search limits: {len(requests)} requests, "
            f"n={gs.n}, horizon={horizon}")
    requests = sorted(requests, key=lambda r: r.id)
    residual: dict[STEdge, int] = {}
    best: dict = {"count": -1, "schedule": {}}
    chosen: dict[int, list[STEdge]] = {}
    nodes = [0]
    roof = min(len(requests), cut_upper_bound(gs, requests, horizon, pmax_bound))

    def take(path: list[STEdge], sign: int) -> None:
        for e in path:
            residual[e] = residual.get(e, gs.cap(e.kind)) - sign

    def deadline_of(r: Request) -> int:
        return horizon if pmax_bound is None else min(horizon, r.t + pmax_bound)

    # greedy seed: tightens the bound before the exact search starts
    for r in requests:
        for path in _iter_paths(gs, r, horizon, deadline_of(r), residual):
            take(path, +1)
            chosen[r.id] = path
            break
    best["count"] = len(chosen)
    best["schedule"] = {rid: list(p) for rid, p in chosen.items()}
    for path in chosen.values():
        take(path, -1)
    chosen.clear()

    class _Done(Exception):
        pass

    def dfs(idx: int, acc: int) -> None:
        nodes[0] += 1
        if nodes[0] > node_cap:
            raise TooLarge(f"search exceeded {node_cap} nodes")
        if acc + (len(requests) - idx) <= best["count"]:
            return  # even accepting everything left cannot improve
        if idx == len(requests):
            best["count"] = acc
            best["schedule"] = {rid: list(p) for rid, p in chosen.items()}
            if acc >= roof:
                raise _Done
            return
        r = requests[idx]
        deadline = deadline_of(r)
        for path in _iter_paths(gs, r, horizon, deadline, residual):
            take(path, +1)
            chosen[r.id] = path
            dfs(idx + 1, acc + 1)
            del chosen[r.id]
            take(path, -1)
            if acc + (len(requests) - idx) <= best["count"]:
                return  # bound reached while exploring accept branches
        dfs(idx + 1, acc)  # reject branch

    if best["count"] < roof:
        try:
            dfs(0, 0)
        except _Done:
            pass
    return best["count"], best["schedule"]


def cut_upper_bound(
    gs: GridSpec,
    requests: Sequence[Request],
    horizon: int,
    pmax_bound: Optional[int] = None,
) -> int:
    """Min over a family of capacity cuts; always at least the fractional
    optimum: total count, per-source-vertex out-capacity, and per-link
    time-window capacity."""
    if not requests:
        return 0
    bounds = [len(requests)]
    per_src: dict[tuple[int, int], int] = {}
    for r in requests:
        per_src[(r.src, r.t)] = per_src.get((r.src, r.t), 0) + 1
    bounds.append(sum(min(cnt, gs.B + gs.c) for cnt in per_src.values()))
    t_hi = horizon if pmax_bound is None else min(
        horizon, max(r.t for r in requests) + pmax_bound)
    for v in range(gs.n - 1):
        crossing = [r for r in requests if r.src <= v < r.dst]
        if not crossing:
            continue
        t_lo = min(r.t + (v - r.src) for r in crossing)
        window_cap = gs.c * max(0, t_hi - t_lo)
        bounds.append((len(requests) - len(crossing)) + window_cap)
    return min(bounds)


# -- fractional path packing on sketch instances ---------------------------


def enumerate_sketch_paths(graph, src, sinks, hop_bound: int) -> list[SketchPath]:
    """All monotone sketch paths from src to an absorbing sink within the
    hop budget; the benchmark family equals the online algorithm's."""
    sinks = set(sinks)
    out: list[SketchPath] = []

    def walk(tile, moves: str) -> None:
        if tile in sinks:
            out.append(SketchPath(start=src, moves=moves))
            return
        if len(moves) >= hop_bound:
            return
        for nbr, _cap in graph.neighbors(tile):
            walk(nbr, moves + ("E" if nbr.ix > tile.ix else "N"))

    walk(src, "")
    return out


def sketch_fractional_opt(graph, offers: Sequence[tuple], edge_cap: int = 1) -> float:
    """LP value of the best fractional 1-packing for (src, sinks, hop) offers
    over unit-capacity sketch edges."""
    paths: list[tuple[int, SketchPath]] = []
    for i, (src, sinks, budget) in enumerate(offers):
        for p in enumerate_sketch_paths(graph, src, sinks, budget):
            paths.append((i, p))
    if not paths:
        return 0.0
    nvars = len(paths)
    obj = -np.ones(nvars)
    rows, cols, vals, rhs = [], [], [], []
    for i in range(len(offers)):
        row = len(rhs)
        for col, (j, _p) in enumerate(paths):
            if j == i:
                rows.append(row)
                cols.append(col)
                vals.append(1.0)
        rhs.append(1.0)
    edge_use: dict = {}
    for col, (_i, p) in enumerate(paths):
        for e in p.edges:
            edge_use.setdefault(e, []).append(col)
    for e, cs in sorted(edge_use.items(), key=lambda kv: repr(kv[0])):
        row = len(rhs)
        for col in cs:
            rows.append(row)
            cols.append(col)
            vals.append(1.0)
        rhs.append(float(edge_cap))
    a_ub = coo_matrix((vals, (rows, cols)), shape=(len(rhs), nvars))
    res = linprog(obj, A_ub=a_ub, b_ub=np.array(rhs), bounds=(0, None), method="highs")
    if not res.success:
        raise RuntimeError(f"sketch LP failed: {res.message}")
    return float(-res.fun)
