"""Global-view tree reference: structure, invariants, and majority ground truth."""

import pytest

from dhtvote.dht_overlay import Overlay
from dhtvote.oracle import (
    build_global_tree,
    changed_peers,
    check_subtrees_contiguous,
    check_churn_blast_radius,
    true_majority,
)


def test_single_peer_tree():
    ov = Overlay(8, "chord", [0x42])
    tree = build_global_tree(ov)
    assert tree.position[0] == 0 and tree.depth[0] == 0
    assert tree.neighbors(0) == (None, None, None)


def test_saturated_ring_positions_are_addresses():
    # Every address occupied: each segment is a single address.
    ov = Overlay.build(256, 8, "chord", 0)
    assert sorted(ov.addrs) == list(range(256))
    tree = build_global_tree(ov)
    for idx in range(256):
        pid = ov.ids[idx]
        assert tree.position[pid] == ov.addrs[idx]
        assert tree.depth[pid] <= 8
    assert max(tree.depth.values()) == 8


def test_tree_is_consistent_parent_child():
    ov = Overlay.build(200, 16, "symmetric", 1)
    tree = build_global_tree(ov)
    roots = [pid for pid in ov.ids if tree.up[pid] is None]
    assert len(roots) == 1 and tree.position[roots[0]] == 0
    for pid in ov.ids:
        for c in (tree.cw[pid], tree.ccw[pid]):
            if c is not None:
                assert tree.up[c] == pid
                assert tree.depth[c] == tree.depth[pid] + 1


@pytest.mark.parametrize("mode", ["chord", "symmetric"])
def test_subtrees_contiguous(mode):
    for seed in range(3):
        ov = Overlay.build(100, 16, mode, seed)
        assert check_subtrees_contiguous(ov, build_global_tree(ov))


def test_churn_blast_radius():
    import random

    rng = random.Random(0)
    ov = Overlay.build(80, 16, "chord", 5)
    before = build_global_tree(ov)
    for _ in range(60):
        if ov.n > 3 and rng.random() < 0.5:
            report = ov.leave(ov.ids[rng.randrange(ov.n)])
            changed = report.left_id
        else:
            addr = rng.randrange(1 << 16)
            if addr in set(ov.addrs):
                continue
            report = ov.join(addr)
            changed = report.joined_id
        after = build_global_tree(ov)
        affected = check_churn_blast_radius(before, after, changed, report.successor_id)
        assert affected == changed_peers(before, after)
        before = after


def test_true_majority_ties_go_to_one():
    assert true_majority([1, 0]) == 1
    assert true_majority([1, 1, 0]) == 1
    assert true_majority([0, 0, 1]) == 0
    assert true_majority([]) == 1
    assert true_majority([0]) == 0
