"""Weighted push-gossip average estimation (failure-free baseline).

Each peer holds an estimate and a weight; a tick sends half the weight with
the current estimate to a random finger-table neighbor, and a receive folds
the incoming share into a weighted average.  Weight times estimate summed
over all peers and in-flight shares is invariant, so estimates converge to
the network average and thresholding at one half recovers the majority bit.
"""

from __future__ import annotations


class GossipPeer:
    __slots__ = ("x", "est", "w")

    def __init__(self, x: int) -> None:
        self.x = x
        self.est = float(x)
        self.w = 1.0

    def send_half(self) -> tuple[float, float]:
        """Split off half the weight for a push; returns (estimate, weight)."""
        share = self.w / 2.0
        self.w -= share
        return (self.est, share)

    def receive(self, m_est: float, m_w: float) -> None:
        self.est = (self.w * self.est + m_w * m_est) / (self.w + m_w)
        self.w += m_w

    def on_input_change(self, x: int) -> None:
        if x == self.x:
            return
        self.est += (x - self.x) / self.w
        self.x = x

    def output(self) -> int:
        return 1 if self.est >= 0.5 else 0
