"""Global-view brute-force reference for the peer tree.

Builds the exact tree from all ring segments at once and derives every
peer's neighbors by domination: the clockwise (counterclockwise) neighbor
is the unique occupied position of maximal low bit inside the clockwise
(counterclockwise) subtree interval, which must dominate every other
occupied position there.  Positions are derived by an independent downward
scan, not the navigation formulas used by the routing path, so the two
routes to a neighbor share no code.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .address_math import Direction


def _own_position(lo: int, hi: int, d: int) -> int:
    """Position of the segment (lo, hi]: the unique member of maximal low bit.

    Independent derivation: walk k downward and take the largest multiple of
    2^k not exceeding hi the first time one lands inside the segment.  A
    wrapping or full-ring segment contains the all-zero address and takes
    the root.
    """
    if lo >= hi:
        return 0
    for k in range(d - 1, 0, -1):
        cand = (hi >> k) << k
        if cand > lo:
            return cand
    return hi


@dataclass
class OracleTree:
    """Per-peer neighbor ids (None where absent), depths, and positions."""

    up: dict[int, Optional[int]] = field(default_factory=dict)
    cw: dict[int, Optional[int]] = field(default_factory=dict)
    ccw: dict[int, Optional[int]] = field(default_factory=dict)
    depth: dict[int, int] = field(default_factory=dict)
    position: dict[int, int] = field(default_factory=dict)

    def neighbor(self, pid: int, direction: Direction) -> Optional[int]:
        if direction == Direction.UP:
            return self.up[pid]
        if direction == Direction.CW:
            return self.cw[pid]
        return self.ccw[pid]

    def neighbors(self, pid: int) -> tuple:
        return (self.up[pid], self.cw[pid], self.ccw[pid])


def build_global_tree(overlay) -> OracleTree:
    """Compute every peer's tree neighbors and depth from the global view."""
    d = overlay.d
    n = overlay.n
    addrs = overlay.addrs
    ids = overlay.ids
    pos = np.asarray(
        [_own_position(addrs[i - 1], addrs[i], d) for i in range(n)],
        dtype=np.uint64,
    )
    order = np.argsort(pos, kind="stable")
    P = pos[order]
    if int(P[0]) != 0 or (n > 1 and int(P[1]) == 0):
        raise AssertionError("expected exactly one root position")
    lb = P & (~P + np.uint64(1))
    parent = np.full(n, -1, dtype=np.int64)
    cw_child = np.full(n, -1, dtype=np.int64)
    ccw_child = np.full(n, -1, dtype=np.int64)

    # Subtree interval bounds for every non-root position, searched in one
    # vectorized pass (scalar searchsorted with Python ints is pathologically
    # slow against uint64).  Root rows hold garbage and are skipped below.
    one = np.uint64(1)
    cw_l = np.searchsorted(P, P, side="right").tolist()
    cw_r = np.searchsorted(P, P + lb - one, side="right").tolist()
    ccw_l = np.searchsorted(P, P - lb, side="right").tolist()
    ccw_r = np.searchsorted(P, P - one, side="right").tolist()
    P_list = P.tolist()
    lb_list = lb.tolist()

    def dominator(l: int, r: int) -> int:
        s = l + int(np.argmax(lb[l:r]))
        p, k = P_list[s], lb_list[s]
        # Every occupied position in the range must sit in the dominator's
        # subtree interval; the range is sorted so the ends suffice.
        if not (p - k < P_list[l] and P_list[r - 1] <= p + k - 1):
            raise AssertionError("subtree domination violated")
        return s

    for s in range(n):
        if P_list[s] == 0:
            ranges = (((1, n), cw_child),) if n > 1 else ()
        else:
            ranges = (
                ((cw_l[s], cw_r[s]), cw_child),
                ((ccw_l[s], ccw_r[s]), ccw_child),
            )
        for (l, r), slot in ranges:
            if l >= r:
                continue
            c = dominator(l, r)
            slot[s] = c
            if parent[c] != -1:
                raise AssertionError("peer assigned two parents")
            parent[c] = s

    depth = np.full(n, -1, dtype=np.int64)
    root = 0
    depth[root] = 0
    stack = [root]
    while stack:
        s = stack.pop()
        for c in (cw_child[s], ccw_child[s]):
            if c != -1:
                depth[c] = depth[s] + 1
                stack.append(c)
    if (depth < 0).any():
        raise AssertionError("tree is not connected")

    tree = OracleTree()
    pid_of_sorted = [ids[int(order[s])] for s in range(n)]
    for s in range(n):
        pid = pid_of_sorted[s]
        tree.position[pid] = int(P[s])
        tree.depth[pid] = int(depth[s])
        tree.up[pid] = pid_of_sorted[parent[s]] if parent[s] != -1 else None
        tree.cw[pid] = pid_of_sorted[cw_child[s]] if cw_child[s] != -1 else None
        tree.ccw[pid] = pid_of_sorted[ccw_child[s]] if ccw_child[s] != -1 else None
    return tree


def check_subtrees_contiguous(overlay, tree: OracleTree) -> bool:
    """Each peer's subtree owns one contiguous circular stretch of segments."""
    n = overlay.n
    idx_of_pid = {pid: i for i, pid in enumerate(overlay.ids)}
    children: dict[int, list[int]] = {pid: [] for pid in overlay.ids}
    for pid in overlay.ids:
        for c in (tree.cw[pid], tree.ccw[pid]):
            if c is not None:
                children[pid].append(c)

    def subtree_indices(pid: int) -> set[int]:
        out = set()
        stack = [pid]
        while stack:
            q = stack.pop()
            out.add(idx_of_pid[q])
            stack.extend(children[q])
        return out

    for pid in overlay.ids:
        s = subtree_indices(pid)
        if len(s) == n:
            continue
        breaks = sum(1 for i in s if (i + 1) % n not in s)
        if breaks != 1:
            return False
    return True


def changed_peers(before: OracleTree, after: OracleTree) -> set[int]:
    """Ids of peers alive in both trees whose neighbor triple changed."""
    common = before.depth.keys() & after.depth.keys()
    return {
        pid
        for pid in common
        if before.neighbors(pid) != after.neighbors(pid)
    }


def check_churn_blast_radius(
    before: OracleTree, after: OracleTree, changed_pid: int, successor_pid: int
) -> set[int]:
    """Affected peers are tree neighbors of the changed peer or its successor."""
    affected = changed_peers(before, after)
    allowed = {changed_pid, successor_pid}
    for tree in (before, after):
        for pid in (changed_pid, successor_pid):
            if pid in tree.depth:
                allowed.update(x for x in tree.neighbors(pid) if x is not None)
    extra = affected - allowed
    if extra:
        raise AssertionError(f"peers affected beyond the allowed set: {extra}")
    core = affected - {changed_pid, successor_pid}
    if len(core) > 5:
        raise AssertionError(f"more than five affected peers: {core}")
    return affected


def true_majority(bits) -> int:
    """Exact global majority with ties counting as one."""
    ones = 0
    total = 0
    for b in bits:
        ones += b
        total += 1
    return 1 if 2 * ones - total >= 0 else 0
