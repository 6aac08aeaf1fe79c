"""Event loop determinism, delay bounds, noise accounting, and churn hooks."""

import math
import random

from dhtvote.dht_overlay import Overlay
from dhtvote.oracle import true_majority
from dhtvote.sim_engine import (
    MAX_DELAY,
    MIN_DELAY,
    GossipNetwork,
    LocalMajorityNetwork,
    MetricsLog,
)


def _votes(ov, ones):
    return {pid: (1 if pid in ones else 0) for pid in ov.ids}


def test_runs_are_deterministic():
    logs = []
    outs = []
    for _ in range(2):
        ov = Overlay.build(64, 16, "symmetric", 3)
        net = LocalMajorityNetwork(ov, _votes(ov, set(range(20))), seed=5)
        log = MetricsLog(net.n)
        net.run_cycles(60, noise_ppmc=2000.0, log=log)
        logs.append((log.accuracy, log.msgs_in_cycle, log.sender_frac))
        outs.append(net.outputs())
    assert logs[0] == logs[1]
    assert outs[0] == outs[1]


def test_initial_delays_within_bounds():
    ov = Overlay.build(32, 16, "chord", 1)
    net = LocalMajorityNetwork(ov, _votes(ov, set(range(10))), seed=2)
    assert net.heap
    for time, _, _ in net.heap:
        assert MIN_DELAY <= time <= MAX_DELAY


def test_quiescent_outputs_match_truth():
    ov = Overlay.build(48, 16, "chord", 7)
    votes = _votes(ov, set(range(30)))
    net = LocalMajorityNetwork(ov, votes, seed=1)
    events = net.run_to_quiescence()
    assert events > 0 and not net.heap
    truth = true_majority(votes.values())
    assert set(net.outputs().values()) == {truth}
    assert net.all_correct() and net.accuracy() == 1.0


def test_input_switch_reconverges():
    ov = Overlay.build(48, 16, "symmetric", 7)
    net = LocalMajorityNetwork(ov, _votes(ov, set(range(5))), seed=1)
    net.run_to_quiescence()
    assert set(net.outputs().values()) == {0}
    net.set_vote_fraction(0.9)
    net.run_to_quiescence()
    assert set(net.outputs().values()) == {1}


def test_noise_preserves_truth_and_rate():
    ov = Overlay.build(100, 16, "symmetric", 9)
    net = LocalMajorityNetwork(ov, _votes(ov, set(range(40))), seed=4)
    ones_before = net.pools.ones
    swaps = 0
    orig = net.swap_one_pair

    def counting():
        nonlocal swaps
        swaps += 1
        orig()

    net.swap_one_pair = counting
    net.run_cycles(200, noise_ppmc=50_000.0)
    # 50000 ppm of 100 peers per 5-cycle message delay = 1 swap per cycle.
    assert swaps == 200
    assert net.pools.ones == ones_before


def test_metrics_log_windows():
    log = MetricsLog(10)
    for c in range(8):
        log.add(c, 0.5 if c < 4 else 1.0, 3, float(c), 2)
    assert log.steady_accuracy() == 1.0
    assert log.steady_error() == 0.0
    assert log.steady_sender_frac() == 0.2
    assert log.cycles == list(range(8))


def test_local_churn_hooks_keep_network_correct():
    ov = Overlay.build(32, 16, "chord", 11)
    votes = _votes(ov, set(range(13)))
    net = LocalMajorityNetwork(ov, votes, seed=3)
    net.run_to_quiescence()
    taken = set(ov.addrs)
    addr = next(a for a in range(1 << 16) if a not in taken)
    victim = ov.ids[0]
    pid = net.apply_join(addr, 1)
    net.apply_leave(victim)
    net.run_to_quiescence()
    truth = true_majority(net.pools.bit.values())
    assert set(net.outputs().values()) == {truth}
    assert pid in net.voters


def test_live_traffic_churn_converges():
    # Joins and leaves land while vote messages are still in flight; the
    # alert/solicit machinery must repair every broken edge afterwards.
    for seed in range(3):
        rng = random.Random(seed)
        ov = Overlay.build(25, 16, "chord", seed)
        votes = {pid: rng.randrange(2) for pid in ov.ids}
        net = LocalMajorityNetwork(ov, votes, seed)
        for _ in range(15):
            net.run_cycles(rng.randrange(0, 8))
            if net.n > 3 and rng.random() < 0.5:
                net.apply_leave(ov.ids[rng.randrange(ov.n)])
            else:
                addr = rng.randrange(1 << 16)
                if addr not in set(ov.addrs):
                    net.apply_join(addr, rng.randrange(2))
        net.run_to_quiescence()
        truth = true_majority(net.pools.bit.values())
        assert set(net.outputs().values()) == {truth}


def test_gossip_budget_caps_sends():
    ov = Overlay.build(64, 16, "symmetric", 2)
    net = GossipNetwork(ov, _votes(ov, set(range(40))), seed=2, period=2.0, budget=100)
    net.run_cycles(200)
    assert net.sent == 100
    assert net.total_msgs <= 100


def test_gossip_conservation_during_run():
    ov = Overlay.build(64, 16, "symmetric", 2)
    votes = _votes(ov, set(range(24)))
    net = GossipNetwork(ov, votes, seed=8, period=3.0)
    for cycles in (7, 50, 200):
        net.run_cycles(cycles)
        mass, weight = net.conservation()
        assert math.isclose(mass, 24.0, rel_tol=1e-12)
        assert math.isclose(weight, 64.0, rel_tol=1e-12)
