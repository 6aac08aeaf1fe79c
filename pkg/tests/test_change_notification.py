"""Predecessor-change alert planning and end-to-end churn notification."""

import random

import pytest

from dhtvote.address_math import DIRECTIONS, Direction
from dhtvote.change_notification import (
    AlertMessage,
    alert_direction,
    audit_churn_event,
    plan_notify,
)
from dhtvote.dht_overlay import Overlay
from dhtvote.oracle import build_global_tree
from dhtvote.tree_routing import TreeMessage


def test_join_plan_splits_segment():
    # Successor at 0xD0 (position 0xC0) learns its predecessor moved
    # 0x9F -> 0xB0; its own half keeps the old position.
    plan = plan_notify(0xD0, 0x9F, 0xB0, 8)
    assert plan.pos_fix == 0xC0 and plan.pos_var == 0xA0
    assert not plan.own_position_changed
    assert len(plan.messages) == 6
    # Own-position copies carry the new segment boundaries as edges.
    assert TreeMessage(0xC0, 0xE0, 0xD0, AlertMessage(0xC0)) in plan.messages
    assert TreeMessage(0xC0, 0xA0, 0xB0, AlertMessage(0xC0)) in plan.messages
    assert TreeMessage(0xC0, 0x80, None, AlertMessage(0xC0)) in plan.messages
    # Copies for the vacated half are synthesized without edges.
    assert TreeMessage(0xA0, 0xB0, None, AlertMessage(0xA0)) in plan.messages


def test_leave_plan_merges_segment():
    plan = plan_notify(0xE7, 0xD8, 0xD0, 8)
    assert plan.pos_fix == 0xE0 and plan.pos_var == 0xD8
    assert not plan.own_position_changed
    assert len(plan.messages) == 6


def test_own_position_change_detected():
    # Join splitting off the position-bearing half moves the successor.
    # Successor at 0x98 owning (0x70, 0x98] sits at 0x80 until a joiner
    # at 0x85 takes that position away.
    plan = plan_notify(0x98, 0x70, 0x85, 8)
    assert plan.pos_fix == 0x80 and plan.pos_var == 0x90
    assert plan.own_position_changed


def test_two_to_one_peer_degenerate():
    plan = plan_notify(0x10, 0x90, 0x10, 8)
    assert plan.pos_fix == 0 and plan.pos_var == 0x80
    assert not plan.own_position_changed
    # Root has no parent and no counterclockwise child: four copies.
    assert len(plan.messages) == 4
    ov = Overlay(8, "chord", [0x10])
    report = type("R", (), {
        "successor_id": 0, "old_pred": 0x90, "new_pred": 0x10,
        "joined_id": None, "left_id": 1,
    })()
    upcalls, issued = audit_churn_event(ov, report)
    assert issued == 4
    assert upcalls == {(0, Direction.CW)}


def test_unchanged_predecessor_rejected():
    with pytest.raises(ValueError):
        plan_notify(0x10, 0x20, 0x20, 8)


def test_alert_direction_filters_self():
    assert alert_direction(0xC0, 0xC0, 8) is None
    assert alert_direction(0xC0, 0x80, 8) == Direction.UP
    assert alert_direction(0xC0, 0xE0, 8) == Direction.CW


@pytest.mark.parametrize("mode", ["chord", "symmetric"])
def test_churn_alerts_cover_every_changed_neighbor(mode):
    rng = random.Random(17)
    ov = Overlay.build(64, 16, mode, 4)
    before = build_global_tree(ov)
    for _ in range(100):
        if ov.n > 3 and rng.random() < 0.5:
            report = ov.leave(ov.ids[rng.randrange(ov.n)])
        else:
            addr = rng.randrange(1 << 16)
            if addr in set(ov.addrs):
                continue
            report = ov.join(addr)
        after = build_global_tree(ov)
        upcalls, issued = audit_churn_event(ov, report)
        assert issued <= 6
        for pid in before.depth.keys() & after.depth.keys():
            for direction in DIRECTIONS:
                if before.neighbor(pid, direction) != after.neighbor(pid, direction):
                    assert (pid, direction) in upcalls
        before = after
