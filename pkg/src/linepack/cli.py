"""Command-line entry point: generate traces, run policies, compare against
oracles, and verify execution logs.

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 internal
invariant violation.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from pathlib import Path

from .greedy import GreedyEngine
from .model import BadParameter, NetConfig, Request, validate_config
from .oracle import GridSpec, TooLarge, cut_upper_bound, fractional_opt, integral_opt
from .router import Engine, FatalInfeasible, InvariantViolation
from .workload import GENERATORS, read_trace, validate_trace, write_trace

log = logging.getLogger("linepack")


def _setup_logging() -> None:
    level = os.environ.get("LINEPACK_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")


def _json_out(payload: dict, path: str | None) -> None:
    text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    if path:
        Path(path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


CONFIG_KEYS = {"n": "n", "B": "B", "c": "c", "horizon": "horizon",
               "seed": "seed", "overrides.k": "override_k",
               "overrides.lh": "override_lh", "overrides.lv": "override_lv"}


def read_config_file(path: str) -> dict:
    """Flat key-value config: one `key = value` per line, # comments."""
    out: dict = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise BadParameter(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, value = (part.strip() for part in line.partition("="))
        if key not in CONFIG_KEYS:
            raise BadParameter(f"{path}:{lineno}: unknown config key {key!r}")
        try:
            out[CONFIG_KEYS[key]] = int(value)
        except ValueError:
            raise BadParameter(f"{path}:{lineno}: {key} must be an integer") from None
    return out


def _config_from_args(args) -> NetConfig:
    """CLI flags win over the config file, which wins over built-in defaults."""
    file_vals = read_config_file(args.config) if args.config else {}
    defaults = {"B": 5, "c": 5, "seed": 0}

    def pick(attr):
        flag = getattr(args, attr)
        if flag is not None:
            return flag
        if attr in file_vals:
            return file_vals[attr]
        return defaults.get(attr)

    n, horizon = pick("n"), pick("horizon")
    if n is None or horizon is None:
        raise BadParameter("n and horizon are required (flag or config file)")
    return validate_config(
        n=n, B=pick("B"), c=pick("c"), horizon=horizon, seed=pick("seed"),
        k=pick("override_k"), lh=pick("override_lh"), lv=pick("override_lv"))


def cmd_gen(args) -> int:
    gen = GENERATORS[args.kind]
    kwargs = {"n": args.n, "horizon": args.horizon, "seed": args.seed}
    if args.kind == "uniform":
        kwargs["rate"] = args.rate
    elif args.kind == "burst":
        kwargs["burst"] = args.burst
    elif args.kind == "crossing":
        kwargs["density"] = args.density
    elif args.kind == "near_flood":
        kwargs["fan"] = args.fan
    trace = gen(**kwargs)
    write_trace(args.output, trace)
    log.info("wrote %d requests to %s", len(trace), args.output)
    return 0


def run_policy(policy: str, cfg: NetConfig, trace: list[Request],
               event_sink=None) -> dict:
    if policy == "paper":
        engine = Engine(cfg, event_sink=event_sink)
        summary = engine.run(trace)
        summary["reports"] = [r.to_dict() for r in engine.reports]
        return summary
    engine = GreedyEngine(cfg.n, cfg.B, cfg.c, cfg.horizon)
    summary = engine.run(trace)
    summary["reports"] = engine.reports
    return summary


def _write_csv(path: str, reports: list[dict]) -> None:
    lines = ["t,arrivals,accepted,delivered,max_buffer,max_link"]
    for r in reports:
        acc = r["accepted"]
        acc_n = sum(acc.values()) if isinstance(acc, dict) else acc
        ml = r.get("max_loads", {})
        lines.append(f"{r['t']},{r['arrivals']},{acc_n},{r['delivered']},"
                     f"{ml.get('buffer', 0)},{ml.get('link', 0)}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def cmd_run(args) -> int:
    cfg = _config_from_args(args)
    trace = read_trace(args.trace)
    validate_trace(trace, cfg.n, cfg.horizon)
    events: list[dict] = []
    sink = events.append if args.log else None
    summary = run_policy(args.policy, cfg, trace, event_sink=sink)
    reports = summary.pop("reports")
    if args.csv:
        _write_csv(args.csv, reports)
    if args.steps:
        with open(args.steps, "w", encoding="utf-8", newline="\n") as fh:
            for rep in reports:
                fh.write(json.dumps(rep, sort_keys=True) + "\n")
    if args.log:
        with open(args.log, "w", encoding="utf-8", newline="\n") as fh:
            for ev in events:
                fh.write(json.dumps(ev, sort_keys=True) + "\n")
    _json_out(summary, args.out)
    if summary.get("violations", 0):
        return 3
    return 0


def cmd_compare(args) -> int:
    cfg = _config_from_args(args)
    trace = read_trace(args.trace)
    validate_trace(trace, cfg.n, cfg.horizon)
    summary = run_policy(args.policy, cfg, trace)
    summary.pop("reports")
    alg = summary["delivered_total"]
    gs = GridSpec(n=cfg.n, B=cfg.B, c=cfg.c)
    window = (max((r.t for r in trace), default=0)) + cfg.p_max
    frac = fractional_opt(gs, trace, horizon=window, pmax_bound=None)
    report = {
        "schema": 1,
        "policy": args.policy,
        "alg": alg,
        "frac_opt": round(frac.objective, 9),
        "cut_bound": cut_upper_bound(gs, trace, horizon=window),
        "excluded": 0,
    }
    try:
        count, _sched = integral_opt(gs, trace, horizon=window)
        report["int_opt"] = count
    except TooLarge:
        pass
    if alg > 0:
        report["ratio"] = round(frac.objective / alg, 9)
        report["ratio_per_logn"] = round(frac.objective / alg / math.log2(cfg.n), 9)
    else:
        report["ratio"] = None if frac.objective < 1e-9 else "inf"
        report["ratio_per_logn"] = report["ratio"]
    _json_out(report, args.out)
    return 0


def _tile_of(cfg: dict, j: int, x: int, y: int) -> tuple[int, int]:
    ox = {1: 0, 2: -1, 3: 0, 4: -1}[j] * cfg["lh"] // 2
    oy = {1: 0, 2: 0, 3: -1, 4: -1}[j] * cfg["lv"] // 2
    return (x - ox) // cfg["lh"], (y - oy) // cfg["lv"]


def verify_log(lines) -> tuple[bool, str]:
    """Replay an execution log and independently re-check every invariant."""
    try:
        cfg = None
        accepted: dict[int, dict] = {}
        arrivals: dict[int, dict] = {}
        delivered: dict[int, dict] = {}
        usage: dict[tuple, dict[str, int]] = {}
        pos: dict[int, tuple[int, int]] = {}
        for raw in lines:
            raw = raw.strip()
            if not raw:
                continue
            ev = json.loads(raw)
            if not isinstance(ev, dict):
                return False, f"malformed log line: {raw[:40]!r}"
            kind = ev.get("ev")
            if kind == "config":
                cfg = ev
            elif kind == "arrival":
                arrivals[ev["id"]] = ev
            elif kind == "accept":
                if cfg is None:
                    return False, "accept before config"
                accepted[ev["id"]] = ev
                r = arrivals[ev["id"]]
                pos[ev["id"]] = (r["t"] - r["src"], r["src"])
            elif kind == "move":
                if ev["id"] not in accepted:
                    return False, f"move of unaccepted packet {ev['id']} at step {ev['t']}"
                acc = accepted[ev["id"]]
                cls = acc["cls"]
                key = (ev["t"], ev["kind"], ev["v"])
                per = usage.setdefault(key, {})
                per[cls] = per.get(cls, 0) + 1
                x, y = pos[ev["id"]]
                x, y = (x, y + 1) if ev["kind"] == "F" else (x + 1, y)
                pos[ev["id"]] = (x, y)
                if cls.startswith("far"):
                    # every position stays on the committed sketch tiles
                    tile = list(_tile_of(cfg, acc["j"], x, y))
                    if tile not in acc["sketch"]:
                        return False, (f"packet {ev['id']} left its sketch "
                                       f"path at tile {tile} (step {ev['t']})")
            elif kind == "deliver":
                delivered[ev["id"]] = ev
        if cfg is None:
            return False, "no config line"
        for key, per in sorted(usage.items()):
            t, kindc, v = key
            total = sum(per.values())
            cap = cfg["c"] if kindc == "F" else cfg["B"]
            track_cap = cfg["c_track"] if kindc == "F" else cfg["B_track"]
            if total > cap:
                return False, f"capacity violated at step {t} v={v}: {total} > {cap}"
            if max(per.values()) > track_cap:
                return False, f"track capacity violated at step {t} v={v}"
        for rid, ev in sorted(accepted.items()):
            r = arrivals.get(rid)
            if r is None:
                return False, f"accepted packet {rid} never arrived"
            d = delivered.get(rid)
            if d is None:
                return False, f"accepted packet {rid} never delivered"
            if d["v"] != r["dst"]:
                return False, f"packet {rid} delivered at {d['v']}, not {r['dst']}"
            if d["t"] - r["t"] > cfg["p_max"]:
                return False, f"packet {rid} took {d['t'] - r['t']} > p_max"
            x, y = pos[rid]
            if y != r["dst"]:
                return False, f"packet {rid} moves end at row {y}, not {r['dst']}"
            if ev["cls"].startswith("far"):
                ok, msg = _check_sketch_conformance(cfg, ev, r)
                if not ok:
                    return False, f"packet {rid}: {msg}"
        return True, f"ok: {len(accepted)} accepted, {len(delivered)} delivered"
    except (KeyError, ValueError, TypeError, AttributeError,
            json.JSONDecodeError) as exc:
        return False, f"malformed log: {exc!r}"


def _check_sketch_conformance(cfg: dict, accept_ev: dict, arrival: dict
                              ) -> tuple[bool, str]:
    """The accept event's sketch tiles must be monotone and start at the tile
    of the source vertex (full positional conformance is engine-audited)."""
    tiles = accept_ev.get("sketch")
    if not tiles:
        return False, "far accept without sketch tiles"
    j = accept_ev["j"]
    sx = {1: 0, 2: -1, 3: 0, 4: -1}[j] * cfg["lh"] // 2
    sy = {1: 0, 2: 0, 3: -1, 4: -1}[j] * cfg["lv"] // 2
    x, y = arrival["t"] - arrival["src"], arrival["src"]
    ix0, iy0 = (x - sx) // cfg["lh"], (y - sy) // cfg["lv"]
    if tiles[0] != [ix0, iy0]:
        return False, f"sketch starts at {tiles[0]}, source tile is {[ix0, iy0]}"
    for a, b in zip(tiles, tiles[1:]):
        dx, dy = b[0] - a[0], b[1] - a[1]
        if (dx, dy) not in ((1, 0), (0, 1)):
            return False, f"sketch moves {a} -> {b} is not a unit east/north hop"
    return True, ""


def cmd_verify(args) -> int:
    try:
        with open(args.log, "r", encoding="utf-8") as fh:
            ok, msg = verify_log(fh)
    except OSError as exc:
        print(f"FAIL: cannot read log: {exc}", file=sys.stderr)
        return 1
    print(("PASS: " if ok else "FAIL: ") + msg)
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="linepack",
                                 description="online line-network packet routing")
    sub = ap.add_subparsers(dest="command", required=True)

    def add_net_flags(p):
        p.add_argument("--config", default=None,
                       help="flat key-value config file; explicit flags win")
        p.add_argument("--n", type=int, default=None)
        p.add_argument("--B", type=int, default=None)
        p.add_argument("--c", type=int, default=None)
        p.add_argument("--horizon", type=int, default=None)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--override-k", type=int, default=None)
        p.add_argument("--override-lh", type=int, default=None)
        p.add_argument("--override-lv", type=int, default=None)

    g = sub.add_parser("gen", help="generate a workload trace")
    g.add_argument("--kind", choices=sorted(GENERATORS), required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--horizon", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--rate", type=float, default=1.0)
    g.add_argument("--burst", type=int, default=8)
    g.add_argument("--density", type=float, default=1.0)
    g.add_argument("--fan", type=int, default=6)
    g.add_argument("-o", "--output", required=True)
    g.set_defaults(func=cmd_gen)

    r = sub.add_parser("run", help="run a routing policy over a trace")
    add_net_flags(r)
    r.add_argument("--policy", choices=("paper", "greedy"), default="paper")
    r.add_argument("--trace", required=True)
    r.add_argument("--out", default=None)
    r.add_argument("--csv", default=None)
    r.add_argument("--steps", default=None, help="write step reports as JSON lines")
    r.add_argument("--log", default=None, help="write a JSONL execution log")
    r.set_defaults(func=cmd_run)

    c = sub.add_parser("compare", help="run a policy and offline oracles")
    add_net_flags(c)
    c.add_argument("--policy", choices=("paper", "greedy"), default="paper")
    c.add_argument("--trace", required=True)
    c.add_argument("--out", default=None)
    c.set_defaults(func=cmd_compare)

    v = sub.add_parser("verify", help="re-check invariants from an execution log")
    v.add_argument("--log", required=True)
    v.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    _setup_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0,) else 0
    try:
        return args.func(args)
    except BadParameter as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except (InvariantViolation, FatalInfeasible) as exc:
        print(f"internal invariant violation: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
