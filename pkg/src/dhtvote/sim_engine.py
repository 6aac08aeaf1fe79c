"""Deterministic discrete-event simulation of both voting protocols.

Time is measured in cycles.  Every message leg is delivered after a uniform
random delay of 1 to 10 cycles, so per-cycle draining never feeds events back
into the cycle that produced them.  All randomness comes from one seeded
generator per network, which makes runs with equal parameters byte-identical.
"""

from __future__ import annotations

import heapq
import math
import random
from dataclasses import dataclass, field
from statistics import fmean
from typing import Callable, Optional

from .address_math import DIRECTIONS, Direction
from .change_notification import AlertMessage, alert_direction, plan_notify
from .dht_overlay import Overlay
from .majority_gossip import GossipPeer
from .majority_local import Voter
from .tree_routing import DeliverStatus, deliver, make_message, neighbor_direction

MIN_DELAY = 1
MAX_DELAY = 10
# The noise rate counts input flips per million peers per average message
# delay (nominally five cycles), so one cycle carries a fifth of the rate.
NOISE_PERIOD = 5.0


@dataclass
class MetricsLog:
    """Per-cycle samples of one voting run."""

    n: int
    cycles: list[int] = field(default_factory=list)
    accuracy: list[float] = field(default_factory=list)
    msgs_in_cycle: list[int] = field(default_factory=list)
    cum_msgs_per_peer: list[float] = field(default_factory=list)
    sender_frac: list[float] = field(default_factory=list)

    def add(
        self, cycle: int, accuracy: float, msgs: int, cum: float, senders: int
    ) -> None:
        self.cycles.append(cycle)
        self.accuracy.append(accuracy)
        self.msgs_in_cycle.append(msgs)
        self.cum_msgs_per_peer.append(cum)
        self.sender_frac.append(senders / self.n)

    def _steady(self, series: list[float]) -> list[float]:
        # Steady-state window: second half of the sampled run.
        return series[len(series) // 2 :]

    def steady_accuracy(self) -> float:
        return fmean(self._steady(self.accuracy))

    def steady_error(self) -> float:
        return 1.0 - self.steady_accuracy()

    def steady_sender_frac(self) -> float:
        return fmean(self._steady(self.sender_frac))


class _VotePools:
    """Peer ids bucketed by current input bit, for O(1) random swaps."""

    def __init__(self, votes: dict[int, int]) -> None:
        self.buckets: tuple[list[int], list[int]] = ([], [])
        self.slot: dict[int, int] = {}
        self.bit: dict[int, int] = {}
        for pid, x in votes.items():
            self.add(pid, x)

    def add(self, pid: int, x: int) -> None:
        bucket = self.buckets[x]
        self.slot[pid] = len(bucket)
        self.bit[pid] = x
        bucket.append(pid)

    def remove(self, pid: int) -> int:
        x = self.bit.pop(pid)
        bucket = self.buckets[x]
        i = self.slot.pop(pid)
        last = bucket.pop()
        if last != pid:
            bucket[i] = last
            self.slot[last] = i
        return x

    def move(self, pid: int, x: int) -> None:
        if self.bit[pid] != x:
            self.remove(pid)
            self.add(pid, x)

    @property
    def ones(self) -> int:
        return len(self.buckets[1])

    @property
    def size(self) -> int:
        return len(self.bit)

    def pick(self, x: int, rng: random.Random) -> int:
        bucket = self.buckets[x]
        return bucket[rng.randrange(len(bucket))]


class _Network:
    """Shared event loop, metrics counters, and input-noise machinery."""

    def __init__(self, overlay: Overlay, votes: dict[int, int], seed: int) -> None:
        self.ov = overlay
        self.d = overlay.d
        self.rng = random.Random(seed)
        self.heap: list = []
        self._seq = 0
        self.cycle = 0
        self.total_msgs = 0
        self._msgs_cycle = 0
        self._senders_cycle = 0
        self._sender_mark: dict[int, int] = {}
        self._noise_acc = 0.0
        self.pools = _VotePools(votes)
        self.count_out1 = 0

    @property
    def n(self) -> int:
        return self.pools.size

    def truth(self) -> int:
        return 1 if 2 * self.pools.ones >= self.pools.size else 0

    def accuracy(self) -> float:
        correct = self.count_out1 if self.truth() else self.n - self.count_out1
        return correct / self.n

    def all_correct(self) -> bool:
        target = self.n if self.truth() else 0
        return self.count_out1 == target

    def outputs_all_equal(self) -> bool:
        return self.count_out1 in (0, self.n)

    def _push(self, time, item) -> None:
        heapq.heappush(self.heap, (time, self._seq, item))
        self._seq += 1

    def _delay(self) -> int:
        return self.rng.randrange(MIN_DELAY, MAX_DELAY + 1)

    def _mark_sender(self, pid: int) -> None:
        if self._sender_mark.get(pid) != self.cycle:
            self._sender_mark[pid] = self.cycle
            self._senders_cycle += 1

    def _handle(self, item, time) -> None:
        raise NotImplementedError

    def _set_input(self, pid: int, x: int) -> None:
        raise NotImplementedError

    def set_input(self, pid: int, x: int) -> None:
        if self.pools.bit[pid] == x:
            return
        self.pools.move(pid, x)
        self._set_input(pid, x)

    def swap_one_pair(self) -> None:
        """Flip a random 1-voter to 0 and a random 0-voter to 1."""
        one = self.pools.pick(1, self.rng)
        zero = self.pools.pick(0, self.rng)
        self.set_input(one, 0)
        self.set_input(zero, 1)

    def set_vote_fraction(self, mu: float) -> None:
        """Flip random inputs until the ones count is round(mu * n)."""
        target = round(mu * self.n)
        while self.pools.ones > target:
            self.set_input(self.pools.pick(1, self.rng), 0)
        while self.pools.ones < target:
            self.set_input(self.pools.pick(0, self.rng), 1)

    def step(self) -> bool:
        """Process one event; returns False when the queue is empty."""
        if not self.heap:
            return False
        time, _, item = heapq.heappop(self.heap)
        self.cycle = int(time)
        self._handle(item, time)
        return True

    def run_cycles(
        self,
        n_cycles: int,
        noise_ppmc: float = 0.0,
        log: Optional[MetricsLog] = None,
        stop_pred: Optional[Callable[[], bool]] = None,
    ) -> Optional[int]:
        """Run whole cycles; returns the cycle where stop_pred first held.

        Each cycle injects input noise, drains every event scheduled inside
        the cycle, then samples metrics.  Without a predicate the full span
        runs and None is returned.
        """
        for _ in range(n_cycles):
            t = self.cycle
            self._msgs_cycle = 0
            self._senders_cycle = 0
            if noise_ppmc:
                self._noise_acc += noise_ppmc * self.n / 1e6 / NOISE_PERIOD
                swaps = int(self._noise_acc)
                self._noise_acc -= swaps
                for _ in range(swaps):
                    self.swap_one_pair()
            while self.heap and self.heap[0][0] < t + 1:
                time, _, item = heapq.heappop(self.heap)
                self._handle(item, time)
            self.cycle = t + 1
            if log is not None:
                log.add(
                    t,
                    self.accuracy(),
                    self._msgs_cycle,
                    self.total_msgs / self.n,
                    self._senders_cycle,
                )
            if stop_pred is not None:
                if stop_pred():
                    return t
                if not self.heap and not noise_ppmc:
                    return None
        return None

    def run_to_quiescence(self, max_events: int = 10**7) -> int:
        """Drain the queue completely; returns the number of events."""
        events = 0
        while self.step():
            events += 1
            if events > max_events:
                raise RuntimeError("no quiescence within event budget")
        return events


class LocalMajorityNetwork(_Network):
    """Tree-routed local-thresholding majority voting over an overlay."""

    def __init__(self, overlay: Overlay, votes: dict[int, int], seed: int) -> None:
        super().__init__(overlay, votes, seed)
        self.voters = {pid: Voter(x) for pid, x in votes.items()}
        self.count_out1 = sum(v.output() for v in self.voters.values())
        # Edge epochs fence off traffic that an alert has already superseded:
        # an in-flight message whose sending edge was alerted after it left
        # carries outdated counters, and its sender re-announced on reset.
        self._edge_epoch: dict[tuple[int, Direction], int] = {}
        for pid in list(overlay.ids):
            self._apply(pid, self.voters[pid].test)

    def outputs(self) -> dict[int, int]:
        return {pid: v.output() for pid, v in self.voters.items()}

    def _apply(self, pid: int, handler, *args) -> None:
        voter = self.voters[pid]
        before = voter.output()
        emissions = handler(*args)
        after = voter.output()
        if after != before:
            self.count_out1 += 1 if after else -1
        if emissions:
            self._mark_sender(pid)
            idx = self.ov.index_of_id(pid)
            pos = self.ov.position(idx)
            lo, hi = self.ov.segment(idx)
            for direction, vm in emissions:
                epoch = self._edge_epoch.get((pid, direction), 0)
                msg = make_message(
                    pos, lo, hi, direction, self.d, (pid, direction, epoch, vm)
                )
                if msg is not None:
                    self._push(self.cycle + self._delay(), (msg, pid))

    def _handle(self, item, time) -> None:
        msg, sender_pid = item
        idx = self.ov.owner_index(msg.dest)
        holder = self.ov.ids[idx]
        # Only peer-to-peer transits cost a message; a destination inside the
        # sender's own segment resolves locally.
        if holder != sender_pid:
            self.total_msgs += 1
            self._msgs_cycle += 1
        pos = self.ov.position(idx)
        lo, hi = self.ov.segment(idx)
        status, fwd = deliver(pos, lo, hi, msg, self.d)
        if status is DeliverStatus.FORWARDED:
            self._push(self.cycle + self._delay(), (fwd, holder))
        elif status is DeliverStatus.ACCEPTED:
            pid = holder
            payload = msg.payload
            if isinstance(payload, AlertMessage):
                direction = alert_direction(pos, payload.pos, self.d)
                if direction is not None:
                    self._alert(pid, direction)
            else:
                sender, sent_dir, epoch, vm = payload
                if (
                    sender not in self.voters
                    or self._edge_epoch.get((sender, sent_dir), 0) != epoch
                ):
                    return
                direction = neighbor_direction(pos, msg.origin, self.d)
                self._apply(pid, self.voters[pid].on_accept, direction, vm, sender)

    def _set_input(self, pid: int, x: int) -> None:
        self._apply(pid, self.voters[pid].on_input_change, x)

    def _alert(self, pid: int, direction: Direction) -> None:
        key = (pid, direction)
        self._edge_epoch[key] = self._edge_epoch.get(key, 0) + 1
        self._apply(pid, self.voters[pid].on_alert, direction)

    def inject_alert(self, pid: int, direction) -> None:
        """Deliver a spurious ALERT upcall directly (fault-injection hook)."""
        self._alert(pid, direction)

    def _notify_successor(self, report) -> None:
        # Alerts walk to their targets synchronously at churn time: every
        # affected direction is reset before any post-churn vote message can
        # arrive, and the monotonic per-sender sequence numbers then order
        # crossing re-announcements.  Only the resulting vote traffic is
        # subject to network delay.
        # Boundary hints on in-flight messages describe the old segmentation;
        # against the new one they can fake a doomed bounce and kill a live
        # advertisement.  Stripped messages still walk correctly (or die by
        # descent exhaustion) on the current topology.
        for _, _, (m, _sender) in self.heap:
            m.edge = None
        succ = report.successor_id
        idx = self.ov.index_of_id(succ)
        plan = plan_notify(self.ov.addrs[idx], report.old_pred, report.new_pred, self.d)
        self._mark_sender(succ)
        for msg in plan.messages:
            alert_pos = msg.payload.pos
            holder = succ
            while msg is not None:
                tidx = self.ov.owner_index(msg.dest)
                if self.ov.ids[tidx] != holder:
                    self.total_msgs += 1
                    self._msgs_cycle += 1
                holder = self.ov.ids[tidx]
                pos = self.ov.position(tidx)
                lo, hi = self.ov.segment(tidx)
                status, msg = deliver(pos, lo, hi, msg, self.d)
                if status is DeliverStatus.ACCEPTED:
                    direction = alert_direction(pos, alert_pos, self.d)
                    if direction is not None:
                        self._alert(self.ov.ids[tidx], direction)
                    break
        if plan.own_position_changed:
            for direction in DIRECTIONS:
                self._alert(succ, direction)

    def apply_join(self, addr: int, x: int) -> int:
        """Join a peer with vote x; returns its id."""
        report = self.ov.join(addr)
        pid = report.joined_id
        voter = Voter(x)
        self.voters[pid] = voter
        self.pools.add(pid, x)
        self.count_out1 += voter.output()
        self._notify_successor(report)
        for direction in DIRECTIONS:
            self._alert(pid, direction)
        return pid

    def apply_leave(self, pid: int) -> None:
        voter = self.voters.pop(pid)
        self.count_out1 -= voter.output()
        self.pools.remove(pid)
        for direction in DIRECTIONS:
            self._edge_epoch.pop((pid, direction), None)
        report = self.ov.leave(pid)
        self._notify_successor(report)


class GossipNetwork(_Network):
    """Push-gossip averaging over the same overlay's finger graph."""

    def __init__(
        self,
        overlay: Overlay,
        votes: dict[int, int],
        seed: int,
        period: float = 5.0,
        budget: Optional[int] = None,
    ) -> None:
        super().__init__(overlay, votes, seed)
        self.period = period
        self.budget = budget
        self.sent = 0
        self.peers = {pid: GossipPeer(x) for pid, x in votes.items()}
        self.count_out1 = sum(p.output() for p in self.peers.values())
        self._dests = {pid: overlay.gossip_destinations(pid) for pid in overlay.ids}
        for pid in overlay.ids:
            self._push(self.rng.random() * period, ("tick", pid))

    def _handle(self, item, time) -> None:
        if item[0] == "tick":
            pid = item[1]
            if self.budget is not None and self.sent >= self.budget:
                return
            dests = self._dests[pid]
            dest = dests[self.rng.randrange(len(dests))]
            est, share = self.peers[pid].send_half()
            self.sent += 1
            self._mark_sender(pid)
            self._push(time + self._delay(), ("msg", dest, est, share))
            self._push(time + self.period, ("tick", pid))
        else:
            _, dest, est, share = item
            self.total_msgs += 1
            self._msgs_cycle += 1
            peer = self.peers[dest]
            before = peer.output()
            peer.receive(est, share)
            if peer.output() != before:
                self.count_out1 += 1 if peer.output() else -1

    def _set_input(self, pid: int, x: int) -> None:
        peer = self.peers[pid]
        before = peer.output()
        peer.on_input_change(x)
        if peer.output() != before:
            self.count_out1 += 1 if peer.output() else -1

    def conservation(self) -> tuple[float, float]:
        """Exact (sum of weighted estimates, sum of weights) incl. in-flight."""
        mass = [p.w * p.est for p in self.peers.values()]
        weight = [p.w for p in self.peers.values()]
        for _, _, item in self.heap:
            if item[0] == "msg":
                mass.append(item[2] * item[3])
                weight.append(item[3])
        return math.fsum(mass), math.fsum(weight)
