"""Alert routing after a predecessor-segment change.

When a peer's predecessor address changes (a ring join or leave next to it),
the peer computes the two tree positions whose neighborhoods may have
changed: pos_fix, the position of the merged segment, and pos_var, the
position of the split half that differs from it.  It then routes an ALERT in
all three directions from each position (at most six tree messages).  A peer
accepting an ALERT learns only the direction of the changed neighborhood.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .address_math import (
    DIRECTIONS,
    Direction,
    position_of_segment,
    segment_contains,
)
from .tree_routing import (
    DeliverStatus,
    TreeMessage,
    deliver,
    make_message,
    make_synthesized_message,
    neighbor_direction,
)


@dataclass
class AlertMessage:
    pos: int


@dataclass
class NotifyPlan:
    pos_fix: int
    pos_var: int
    own_position_changed: bool
    messages: list[TreeMessage]


def plan_notify(a_i: int, old_pred: int, new_pred: int, d: int) -> NotifyPlan:
    """Alert plan for the peer at a_i whose predecessor moved old_pred -> new_pred.

    A join shrank the segment (new_pred splits the old one); a leave grew it.
    The special case new_pred == a_i is the survivor taking the whole ring.
    """
    if old_pred == new_pred:
        raise ValueError("predecessor did not change")
    join = new_pred != a_i and segment_contains(old_pred, a_i, new_pred)
    wider, splitter = (old_pred, new_pred) if join else (new_pred, old_pred)
    pos_fix = position_of_segment(wider, a_i, d)
    half_hi = position_of_segment(splitter, a_i, d)
    half_lo = position_of_segment(wider, splitter, d)
    # Exactly one split half keeps the merged position.
    if (half_hi == pos_fix) == (half_lo == pos_fix):
        raise AssertionError("position refinement violated")
    pos_var = half_lo if half_hi == pos_fix else half_hi
    own_pos = half_hi if join else pos_fix

    messages = []
    for src in (pos_fix, pos_var):
        for direction in DIRECTIONS:
            if src == own_pos:
                msg = make_message(src, new_pred, a_i, direction, d, AlertMessage(src))
            else:
                msg = make_synthesized_message(src, direction, d, AlertMessage(src))
            if msg is not None:
                messages.append(msg)
    return NotifyPlan(
        pos_fix=pos_fix,
        pos_var=pos_var,
        own_position_changed=half_hi != pos_fix,
        messages=messages,
    )


def alert_direction(own_pos: int, alert_pos: int, d: int) -> Optional[Direction]:
    """Direction to raise for an accepted ALERT; None filters self-reference."""
    if alert_pos == own_pos:
        return None
    return neighbor_direction(own_pos, alert_pos, d)


def audit_churn_event(overlay, report) -> tuple[set, int]:
    """Route one churn event's alerts synchronously on the post-churn overlay.

    Returns (upcalls, issued): upcalls is the set of (peer id, direction)
    ALERT notifications raised anywhere (routed alerts plus the notified
    peer's self-alerts and a joiner's birth alerts), issued is the number of
    tree messages the notified peer sent.
    """
    d = overlay.d
    succ_idx = overlay.index_of_id(report.successor_id)
    plan = plan_notify(
        overlay.addrs[succ_idx], report.old_pred, report.new_pred, d
    )
    upcalls: set = set()
    if plan.own_position_changed:
        for direction in DIRECTIONS:
            upcalls.add((report.successor_id, direction))
    if report.joined_id is not None:
        for direction in DIRECTIONS:
            upcalls.add((report.joined_id, direction))
    for msg in plan.messages:
        while msg is not None:
            idx = overlay.owner_index(msg.dest)
            lo, hi = overlay.segment(idx)
            status, fwd = deliver(overlay.position(idx), lo, hi, msg, d)
            if status is DeliverStatus.ACCEPTED:
                direction = alert_direction(overlay.position(idx), msg.payload.pos, d)
                if direction is not None:
                    upcalls.add((overlay.ids[idx], direction))
                break
            msg = fwd
    return upcalls, len(plan.messages)
