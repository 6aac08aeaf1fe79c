"""Event-driven majority voting with local thresholding on the peer tree.

Each peer keeps one counter pair per tree direction for what it last
received (X_in) and last sent (X_out).  A pair (ones, total) thresholds to 1
when at least half the counted votes are ones.  A peer resends toward a
direction only when its own threshold and the one it advertised there
disagree in a correctness-breaking way, so a converged network is silent.
"""

from __future__ import annotations

from dataclasses import dataclass

from .address_math import DIRECTIONS, Direction

Pair = tuple[int, int]

ZERO: Pair = (0, 0)


def balance(pair: Pair) -> int:
    """Ones minus zeros of a counter pair."""
    ones, total = pair
    return 2 * ones - total


def threshold(pair: Pair) -> bool:
    return balance(pair) >= 0


def pair_add(a: Pair, b: Pair) -> Pair:
    return (a[0] + b[0], a[1] + b[1])


def pair_sub(a: Pair, b: Pair) -> Pair:
    return (a[0] - b[0], a[1] - b[1])


@dataclass
class VoteMessage:
    pair: Pair
    seq: int
    # A soliciting message demands an unconditional counter-announcement.
    # Alert-triggered sends set it: an alert may be a false alarm, and then
    # only the alerted side resets, so it must pull the neighbor's state back.
    solicit: bool = False


class Voter:
    """Majority-voting state machine for one peer.

    Handlers return a list of (direction, VoteMessage) emissions; the caller
    routes each one as a tree message from the peer's current position.
    """

    __slots__ = ("x", "x_in", "x_out", "seq", "last")

    def __init__(self, x: int) -> None:
        self.x = x
        self.x_in: list[Pair] = [ZERO, ZERO, ZERO]
        self.x_out: list[Pair] = [ZERO, ZERO, ZERO]
        self.seq = 0
        # Per direction: (sender token, sequence) of the newest accepted
        # message.  Sequence ordering only applies between equal senders, so
        # a neighborhood handover cannot lock the new occupant out.
        self.last: list[tuple] = [(None, 0), (None, 0), (None, 0)]

    def knowledge(self) -> Pair:
        k = (self.x, 1)
        for pair in self.x_in:
            k = pair_add(k, pair)
        return k

    def output(self) -> int:
        return 1 if threshold(self.knowledge()) else 0

    def _send(
        self, direction: Direction, solicit: bool = False
    ) -> tuple[Direction, VoteMessage]:
        self.x_out[direction] = pair_sub(self.knowledge(), self.x_in[direction])
        self.seq += 1
        return (direction, VoteMessage(self.x_out[direction], self.seq, solicit))

    def test(self) -> list[tuple[Direction, VoteMessage]]:
        out = []
        k = balance(self.knowledge())
        for direction in DIRECTIONS:
            fa = balance(pair_add(self.x_in[direction], self.x_out[direction]))
            fka = k - fa
            if (fa >= 0 and fka < 0) or (fa < 0 and fka > 0):
                out.append(self._send(direction))
        return out

    def on_input_change(self, x: int) -> list[tuple[Direction, VoteMessage]]:
        if x == self.x:
            return []
        self.x = x
        return self.test()

    def on_accept(
        self, direction: Direction, msg: VoteMessage, sender=None
    ) -> list[tuple[Direction, VoteMessage]]:
        last_sender, last_seq = self.last[direction]
        fresh = not (sender == last_sender and msg.seq <= last_seq)
        if fresh:
            self.x_in[direction] = msg.pair
            self.last[direction] = (sender, msg.seq)
        out = []
        if msg.solicit:
            # Answer even a stale solicitation: the asker reset its view of
            # this edge and only an announcement from here can restore it.
            out.append(self._send(direction))
        if fresh:
            out.extend(self.test())
        return out

    def on_alert(self, direction: Direction) -> list[tuple[Direction, VoteMessage]]:
        self.x_in[direction] = ZERO
        self.last[direction] = (None, 0)
        out = [self._send(direction, solicit=True)]
        # Dropping X_in changed the local count; other directions may now
        # disagree with what was advertised there.
        out.extend(self.test())
        return out
