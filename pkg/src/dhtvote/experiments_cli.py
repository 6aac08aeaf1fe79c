"""Command-line experiment harness emitting CSV result tables.

Subcommands: tree-stats (depth and neighbor-distance histograms),
static-vote (two-phase convergence run), stationary-vote (accuracy and
sending cost under continuous input noise), gossip-compare (budget-matched
gossip baseline against local majority voting).  CSV goes to --out or
stdout; human-readable summaries go to stderr.
"""

from __future__ import annotations

import argparse
import csv
import json
import random
import sys
from collections import Counter
from typing import Optional, Sequence

from .address_math import DIRECTIONS, Direction
from .dht_overlay import Overlay
from .oracle import build_global_tree
from .sim_engine import GossipNetwork, LocalMajorityNetwork, MetricsLog
from .tree_routing import probe_walk

STATIC_CYCLE_CAP = 10_000
STATIC_GOSSIP_CYCLE_CAP = 2_000
GOSSIP_TICK_PERIOD = 5.0

DEFAULTS = {
    "n": 1024,
    "d": 32,
    "mode": "symmetric",
    "seeds": 3,
    "algorithm": "local",
    "mu_pre": 0.1,
    "mu_post": 0.9,
    "noise_ppmc": 1000.0,
    "duration": 400,
    "budget_mults": "1,4,16,64",
    "out": None,
    "config": None,
}

METRIC_NAMES = {
    Direction.UP: ("tree_hops_up", "dht_hops_up"),
    Direction.CW: ("tree_hops_cw", "dht_hops_cw"),
    Direction.CCW: ("tree_hops_ccw", "dht_hops_ccw"),
}


def make_votes(n: int, mu: float, seed: int) -> dict[int, int]:
    """Deterministic vote assignment with exactly round(mu * n) ones."""
    rng = random.Random(seed * 1_000_003 + 12345)
    votes = dict.fromkeys(range(n), 0)
    for pid in rng.sample(range(n), round(mu * n)):
        votes[pid] = 1
    return votes


def run_tree_stats(n: int, d: int, mode: str, seeds: Sequence[int]) -> list[tuple]:
    """Histogram rows (seed, metric, bucket, count) for depth and hop counts."""
    rows: list[tuple] = []
    for seed in seeds:
        ov = Overlay.build(n, d, mode, seed)
        tree = build_global_tree(ov)
        hists: dict[str, Counter] = {"depth": Counter(tree.depth.values())}
        for idx in range(n):
            pid = ov.ids[idx]
            for direction in DIRECTIONS:
                if tree.neighbor(pid, direction) is None:
                    continue
                acceptor, legs, trail = probe_walk(ov, idx, direction)
                if acceptor is None:
                    continue
                dht = sum(ov.route(holder, dest)[1] for holder, dest in trail)
                tree_name, dht_name = METRIC_NAMES[direction]
                hists.setdefault(tree_name, Counter())[legs] += 1
                hists.setdefault(dht_name, Counter())[dht] += 1
        for metric in sorted(hists):
            for bucket in sorted(hists[metric]):
                rows.append((seed, metric, bucket, hists[metric][bucket]))
    return rows


def run_static_vote(
    n: int,
    d: int,
    mode: str,
    seed: int,
    mu_pre: float,
    mu_post: float,
    algorithm: str = "local",
) -> tuple[MetricsLog, dict]:
    """Two-phase run: converge on mu_pre votes, switch to mu_post, reconverge.

    The summary reports per-phase cycle and message counts measured at the
    first cycle where every output matches the current true majority.  A
    phase that hits the cycle cap reports its counts as lower bounds with
    converged=False.
    """
    ov = Overlay.build(n, d, mode, seed)
    votes = make_votes(n, mu_pre, seed)
    if algorithm == "local":
        net = LocalMajorityNetwork(ov, votes, seed)
        cap = STATIC_CYCLE_CAP
    else:
        net = GossipNetwork(ov, votes, seed, period=GOSSIP_TICK_PERIOD)
        cap = STATIC_GOSSIP_CYCLE_CAP
    log = MetricsLog(n)
    hit1 = net.run_cycles(cap, log=log, stop_pred=net.all_correct)
    end1 = hit1 if hit1 is not None else net.cycle - 1
    msgs1 = net.total_msgs
    net.set_vote_fraction(mu_post)
    hit2 = net.run_cycles(cap, log=log, stop_pred=net.all_correct)
    end2 = hit2 if hit2 is not None else net.cycle - 1
    msgs2 = net.total_msgs - msgs1
    summary = {
        "algorithm": algorithm,
        "phase1_cycles": end1 + 1,
        "phase1_converged": hit1 is not None,
        "phase1_msgs_per_peer": msgs1 / n,
        "phase2_cycles": end2 - end1,
        "phase2_converged": hit2 is not None,
        "phase2_msgs_per_peer": msgs2 / n,
    }
    return log, summary


def run_stationary(
    n: int,
    d: int,
    mode: str,
    seed: int,
    mu: float,
    noise_ppmc: float,
    duration: int,
) -> tuple[MetricsLog, dict]:
    """Local-majority run under continuous input noise for a fixed duration."""
    ov = Overlay.build(n, d, mode, seed)
    votes = make_votes(n, mu, seed)
    net = LocalMajorityNetwork(ov, votes, seed)
    log = MetricsLog(n)
    net.run_cycles(duration, noise_ppmc=noise_ppmc, log=log)
    summary = {
        "steady_accuracy": log.steady_accuracy(),
        "steady_sender_frac": log.steady_sender_frac(),
        "msgs_per_peer": net.total_msgs / n,
    }
    return log, summary


def run_gossip_compare(
    n: int,
    d: int,
    mode: str,
    seed: int,
    mu: float,
    noise_ppmc: float,
    duration: int,
    budget_mults: Sequence[int],
) -> list[tuple]:
    """Rows (seed, multiplier, algo, error_rate, msgs_per_peer).

    The local run fixes the message budget; each gossip run may send up to
    multiplier times that many messages over the same duration.
    """
    ov = Overlay.build(n, d, mode, seed)
    votes = make_votes(n, mu, seed)
    net = LocalMajorityNetwork(ov, votes, seed)
    local_log = MetricsLog(n)
    net.run_cycles(duration, noise_ppmc=noise_ppmc, log=local_log)
    local_msgs = net.total_msgs
    rows = []
    for mult in budget_mults:
        budget = mult * local_msgs
        period = n * duration / budget
        gnet = GossipNetwork(ov, make_votes(n, mu, seed), seed, period, budget)
        glog = MetricsLog(n)
        gnet.run_cycles(duration, noise_ppmc=noise_ppmc, log=glog)
        rows.append((seed, mult, "local", local_log.steady_error(), local_msgs / n))
        rows.append((seed, mult, "gossip", glog.steady_error(), gnet.total_msgs / n))
    return rows


def _static_rows(seed: int, log: MetricsLog) -> list[tuple]:
    return [
        (
            seed,
            log.cycles[i],
            f"{log.accuracy[i]:.6f}",
            log.msgs_in_cycle[i],
            f"{log.cum_msgs_per_peer[i]:.6f}",
        )
        for i in range(len(log.cycles))
    ]


def _write_csv(out: Optional[str], header: list[str], rows: list[tuple]) -> None:
    if out is None or out == "-":
        writer = csv.writer(sys.stdout, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
        return
    with open(out, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _summary(text: str) -> None:
    print(text, file=sys.stderr)


def _cmd_tree_stats(cfg: dict) -> int:
    rows = run_tree_stats(cfg["n"], cfg["d"], cfg["mode"], range(cfg["seeds"]))
    _write_csv(cfg["out"], ["seed", "metric", "bucket", "count"], rows)
    return 0


def _cmd_static_vote(cfg: dict) -> int:
    rows: list[tuple] = []
    for seed in range(cfg["seeds"]):
        log, summary = run_static_vote(
            cfg["n"], cfg["d"], cfg["mode"], seed,
            cfg["mu_pre"], cfg["mu_post"], cfg["algorithm"],
        )
        rows.extend(_static_rows(seed, log))
        _summary(
            "seed {} {}: phase1 {} cycles {:.3f} msgs/peer (converged={}), "
            "phase2 {} cycles {:.3f} msgs/peer (converged={})".format(
                seed,
                summary["algorithm"],
                summary["phase1_cycles"],
                summary["phase1_msgs_per_peer"],
                summary["phase1_converged"],
                summary["phase2_cycles"],
                summary["phase2_msgs_per_peer"],
                summary["phase2_converged"],
            )
        )
    _write_csv(
        cfg["out"],
        ["seed", "cycle", "accuracy", "msgs_this_cycle", "cum_msgs_per_peer"],
        rows,
    )
    return 0


def _cmd_stationary_vote(cfg: dict) -> int:
    rows: list[tuple] = []
    for seed in range(cfg["seeds"]):
        log, summary = run_stationary(
            cfg["n"], cfg["d"], cfg["mode"], seed,
            cfg["mu_pre"], cfg["noise_ppmc"], cfg["duration"],
        )
        rows.extend(_static_rows(seed, log))
        _summary(
            "seed {}: steady accuracy {:.4f}, sender fraction {:.4f}, "
            "{:.2f} msgs/peer".format(
                seed,
                summary["steady_accuracy"],
                summary["steady_sender_frac"],
                summary["msgs_per_peer"],
            )
        )
    _write_csv(
        cfg["out"],
        ["seed", "cycle", "accuracy", "msgs_this_cycle", "cum_msgs_per_peer"],
        rows,
    )
    return 0


def _cmd_gossip_compare(cfg: dict) -> int:
    rows: list[tuple] = []
    for seed in range(cfg["seeds"]):
        raw = run_gossip_compare(
            cfg["n"], cfg["d"], cfg["mode"], seed,
            cfg["mu_pre"], cfg["noise_ppmc"], cfg["duration"],
            cfg["budget_mults"],
        )
        rows.extend(
            (seed_, mult, algo, f"{err:.6f}", f"{mpp:.6f}")
            for seed_, mult, algo, err, mpp in raw
        )
    _write_csv(
        cfg["out"],
        ["seed", "multiplier", "algo", "error_rate", "msgs_per_peer"],
        rows,
    )
    return 0


COMMANDS = {
    "tree-stats": _cmd_tree_stats,
    "static-vote": _cmd_static_vote,
    "stationary-vote": _cmd_stationary_vote,
    "gossip-compare": _cmd_gossip_compare,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dhtvote", description="Voting-protocol experiment harness."
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--n", type=int)
        p.add_argument("--d", type=int)
        p.add_argument("--mode", choices=["chord", "symmetric"])
        p.add_argument("--seeds", type=int, help="number of seeds (0..k-1)")
        p.add_argument("--algorithm", choices=["local", "gossip"])
        p.add_argument("--mu-pre", type=float, dest="mu_pre",
                       help="vote fraction (initial phase / stationary runs)")
        p.add_argument("--mu-post", type=float, dest="mu_post")
        p.add_argument("--noise-ppmc", type=float, dest="noise_ppmc",
                       help="input flips per million peers per average "
                            "message delay (five cycles)")
        p.add_argument("--duration", type=int, help="cycles to simulate")
        p.add_argument("--budget-mults", dest="budget_mults",
                       help="comma-separated gossip budget multipliers")
        p.add_argument("--out", help="CSV output path (default stdout)")
        p.add_argument("--config", help="JSON file with flag defaults")
    return parser


def _merge_config(ns: argparse.Namespace) -> dict:
    cfg = dict(DEFAULTS)
    if ns.config is not None:
        with open(ns.config, "r", encoding="utf-8") as fh:
            loaded = json.load(fh)
        unknown = set(loaded) - set(DEFAULTS)
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        cfg.update(loaded)
    for key in DEFAULTS:
        value = getattr(ns, key, None)
        if value is not None:
            cfg[key] = value
    if isinstance(cfg["budget_mults"], str):
        cfg["budget_mults"] = [int(s) for s in cfg["budget_mults"].split(",") if s]
    return cfg


def _validate(cfg: dict) -> Optional[str]:
    if cfg["n"] < 2:
        return "n must be at least 2"
    if not 8 <= cfg["d"] <= 64:
        return "d must be in [8, 64]"
    if (1 << cfg["d"]) < cfg["n"]:
        return "address space too small for n peers"
    if cfg["seeds"] < 1:
        return "seeds must be positive"
    for key in ("mu_pre", "mu_post"):
        if not 0.0 <= cfg[key] <= 1.0:
            return f"{key} must be in [0, 1]"
    if cfg["noise_ppmc"] < 0:
        return "noise_ppmc must be nonnegative"
    if cfg["duration"] < 1:
        return "duration must be positive"
    if not cfg["budget_mults"] or any(m < 1 for m in cfg["budget_mults"]):
        return "budget_mults must be positive integers"
    return None


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = _merge_config(ns)
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    error = _validate(cfg)
    if error is not None:
        print(f"error: {error}", file=sys.stderr)
        return 2
    return COMMANDS[ns.command](cfg)


if __name__ == "__main__":
    sys.exit(main())
