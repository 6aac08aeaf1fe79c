"""Simulated Chord and Symmetric Chord ring overlays.

Peers own half-open circular segments (pred_addr, addr] of a d-bit address
space.  Finger tables are ideal (every entry resolves to the current owner of
the target address) and are rebuilt lazily after churn.  A churn event
returns a report carrying the successor NOTIFY payload; delivering that
upcall is the caller's job.
"""

from __future__ import annotations

import random
from bisect import bisect_left, insort
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from . import kernels
from .address_math import position_of_segment, segment_contains


class OverlayMode(Enum):
    CHORD = "chord"
    SYMMETRIC_CHORD = "symmetric"


@dataclass
class ChurnReport:
    """Successor NOTIFY payload plus bookkeeping about the changed peer."""

    successor_id: int
    old_pred: int
    new_pred: int
    joined_id: Optional[int] = None
    left_id: Optional[int] = None


class Overlay:
    """Ring membership, segments, positions, ideal fingers, greedy routing."""

    def __init__(
        self, d: int, mode: OverlayMode | str, addrs: list[int], seed: int = 0
    ):
        if not 8 <= d <= 64:
            raise ValueError("d must be in [8, 64]")
        if not addrs:
            raise ValueError("overlay needs at least one peer")
        self.d = d
        self.mode = OverlayMode(mode)
        self.seed = seed
        self.addrs: list[int] = sorted(addrs)
        if len(set(self.addrs)) != len(self.addrs):
            raise ValueError("duplicate peer addresses")
        self.ids: list[int] = list(range(len(self.addrs)))
        self._next_id = len(self.addrs)
        self._addr_of: dict[int, int] = dict(zip(self.ids, self.addrs))
        self.positions: list[int] = [
            int(p)
            for p in kernels.positions_from_sorted(
                np.asarray(self.addrs, dtype=np.uint64), d
            )
        ]
        self._finger_matrix: Optional[np.ndarray] = None
        self._finger_rows: dict[int, list[int]] = {}

    @classmethod
    def build(cls, n: int, d: int, mode: OverlayMode | str, seed: int) -> "Overlay":
        """n peers at distinct uniformly random addresses, deterministic in seed."""
        if not 1 <= n <= (1 << d):
            raise ValueError("need 1 <= n <= 2^d")
        rng = random.Random(seed)
        addrs = rng.sample(range(1 << d), n)
        return cls(d, mode, addrs, seed=seed)

    @property
    def n(self) -> int:
        return len(self.addrs)

    # Index-level queries.  Indices follow the sorted address order and shift
    # on churn; PeerIds are stable.

    def index_of_id(self, pid: int) -> int:
        return self.owner_index(self._addr_of[pid])

    def addr_of_id(self, pid: int) -> int:
        return self._addr_of[pid]

    def is_live(self, pid: int) -> bool:
        return pid in self._addr_of

    def owner_index(self, dest: int) -> int:
        """Index of the peer whose segment contains dest."""
        i = bisect_left(self.addrs, dest)
        return 0 if i == len(self.addrs) else i

    def owner_of(self, dest: int) -> int:
        return self.ids[self.owner_index(dest)]

    def pred_addr(self, idx: int) -> int:
        return self.addrs[idx - 1]

    def segment(self, idx: int) -> tuple[int, int]:
        return self.addrs[idx - 1], self.addrs[idx]

    def position(self, idx: int) -> int:
        return self.positions[idx]

    def position_of_id(self, pid: int) -> int:
        return self.positions[self.index_of_id(pid)]

    def owns(self, idx: int, addr: int) -> bool:
        lo, hi = self.segment(idx)
        return segment_contains(lo, hi, addr)

    # Fingers and routing.

    def _finger_targets(self, addr: int) -> list[int]:
        msk = (1 << self.d) - 1
        targets = [(addr + (1 << j)) & msk for j in range(self.d)]
        if self.mode is OverlayMode.SYMMETRIC_CHORD:
            targets += [(addr - (1 << j)) & msk for j in range(self.d)]
        return targets

    def finger_row(self, idx: int) -> list[int]:
        """Owner indices of idx's finger targets (cached until churn)."""
        row = self._finger_rows.get(idx)
        if row is None:
            row = [self.owner_index(t) for t in self._finger_targets(self.addrs[idx])]
            self._finger_rows[idx] = row
        return row

    def finger_matrix(self) -> np.ndarray:
        """Full ideal finger table as an owner-index matrix (cached)."""
        if self._finger_matrix is None:
            a = np.asarray(self.addrs, dtype=np.uint64)
            shifts = np.asarray([1 << j for j in range(self.d)], dtype=np.uint64)
            msk = np.uint64((1 << self.d) - 1)
            targets = (a[:, None] + shifts[None, :]) & msk
            if self.mode is OverlayMode.SYMMETRIC_CHORD:
                back = (a[:, None] - shifts[None, :]) & msk
                targets = np.concatenate([targets, back], axis=1)
            owners = np.searchsorted(a, targets, side="left")
            owners[owners == len(a)] = 0
            self._finger_matrix = owners.astype(np.int64)
        return self._finger_matrix

    def gossip_destinations(self, pid: int) -> list[int]:
        """Distinct live PeerIds in pid's finger table, excluding pid itself."""
        idx = self.index_of_id(pid)
        seen = sorted({f for f in self.finger_row(idx) if f != idx})
        return [self.ids[f] for f in seen]

    def route(self, src_idx: int, dest: int) -> tuple[int, int]:
        """Greedy-forward dest from src; returns (owner index, overlay hops)."""
        hops = kernels.route_hops_many(
            np.asarray(self.addrs, dtype=np.uint64),
            self.finger_matrix(),
            np.asarray([src_idx], dtype=np.int64),
            np.asarray([dest], dtype=np.uint64),
            self.d,
            self.mode is OverlayMode.SYMMETRIC_CHORD,
        )[0]
        if hops < 0:
            raise RuntimeError("greedy routing exceeded the hop cap")
        return self.owner_index(dest), int(hops)

    def route_hops_batch(self, src_idxs, dests) -> np.ndarray:
        hops = kernels.route_hops_many(
            np.asarray(self.addrs, dtype=np.uint64),
            self.finger_matrix(),
            np.asarray(src_idxs, dtype=np.int64),
            np.asarray(dests, dtype=np.uint64),
            self.d,
            self.mode is OverlayMode.SYMMETRIC_CHORD,
        )
        if (hops < 0).any():
            raise RuntimeError("greedy routing exceeded the hop cap")
        return hops

    # Churn.

    def _invalidate_fingers(self) -> None:
        self._finger_matrix = None
        self._finger_rows.clear()

    def join(self, addr: int) -> ChurnReport:
        """Insert a peer at addr; returns the successor's NOTIFY payload."""
        i = bisect_left(self.addrs, addr)
        if i < len(self.addrs) and self.addrs[i] == addr:
            raise ValueError("address already occupied")
        old_pred = self.addrs[i - 1]
        pid = self._next_id
        self._next_id += 1
        insort(self.addrs, addr)
        self.ids.insert(i, pid)
        self._addr_of[pid] = addr
        self.positions.insert(
            i, position_of_segment(self.addrs[i - 1], addr, self.d)
        )
        succ = (i + 1) % len(self.addrs)
        self.positions[succ] = position_of_segment(
            self.addrs[succ - 1], self.addrs[succ], self.d
        )
        self._invalidate_fingers()
        return ChurnReport(
            successor_id=self.ids[succ],
            old_pred=old_pred,
            new_pred=addr,
            joined_id=pid,
        )

    def leave(self, pid: int) -> ChurnReport:
        """Remove a live peer; returns the successor's NOTIFY payload."""
        if len(self.addrs) == 1:
            raise ValueError("cannot empty the overlay")
        i = self.index_of_id(pid)
        departed = self.addrs[i]
        new_pred = self.addrs[i - 1]
        del self.addrs[i]
        del self.ids[i]
        del self.positions[i]
        del self._addr_of[pid]
        succ = i % len(self.addrs)
        self.positions[succ] = position_of_segment(
            self.addrs[succ - 1], self.addrs[succ], self.d
        )
        self._invalidate_fingers()
        return ChurnReport(
            successor_id=self.ids[succ],
            old_pred=departed,
            new_pred=new_pred,
            left_id=pid,
        )
