"""Stateless per-hop binary tree routing layered on the ring overlay.

A message carries the origin position, the current destination position, and
an optional edge: the sending segment's boundary in the travel direction.  A
receiver owning the destination address either accepts (its own position
equals the destination), forwards one tree step, or drops.  Dropping happens
when the edge matches the receiver's own boundary (the message could only
bounce between ring-adjacent peers) or when the destination runs out of
descendants.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Any, Optional

from .address_math import (
    Direction,
    ccw,
    cw,
    in_cw_subtree,
    is_foreparent,
    segment_contains,
    up,
)


@dataclass
class TreeMessage:
    origin: int
    dest: int
    edge: Optional[int]
    payload: Any


class DeliverStatus(Enum):
    ACCEPTED = "accepted"
    FORWARDED = "forwarded"
    DROPPED = "dropped"


def make_message(
    pos: int, lo: int, hi: int, direction: Direction, d: int, payload: Any
) -> Optional[TreeMessage]:
    """Build the message a peer at pos with segment (lo, hi] sends.

    Returns None when no destination exists in that direction (root upward,
    leaf position downward): such sends are silently dropped.
    """
    if direction == Direction.UP:
        if pos == 0:
            return None
        return TreeMessage(pos, up(pos, d), None, payload)
    if direction == Direction.CW:
        dest = cw(pos, d)
        return None if dest is None else TreeMessage(pos, dest, hi, payload)
    dest = ccw(pos, d)
    return None if dest is None else TreeMessage(pos, dest, lo, payload)


def make_synthesized_message(
    origin_pos: int, direction: Direction, d: int, payload: Any
) -> Optional[TreeMessage]:
    """Message issued on behalf of a position the issuer does not occupy.

    The issuer cannot speak for that segment's boundaries, so the edge is
    left unset; undeliverable copies die by descent exhaustion instead.
    """
    if direction == Direction.UP:
        if origin_pos == 0:
            return None
        return TreeMessage(origin_pos, up(origin_pos, d), None, payload)
    dest = cw(origin_pos, d) if direction == Direction.CW else ccw(origin_pos, d)
    return None if dest is None else TreeMessage(origin_pos, dest, None, payload)


def _interval_inside(lo: int, hi: int, a: int, b: int) -> bool:
    """Is the non-wrapping interval (a, b] contained in the segment (lo, hi]?"""
    if lo == hi:
        return True
    if lo < hi:
        return lo <= a and b <= hi
    # Wrapping segment: containment means no overlap with the gap (hi, lo].
    return b <= hi or lo <= a


def deliver(
    pos_i: int, lo: int, hi: int, msg: TreeMessage, d: int
) -> tuple[DeliverStatus, Optional[TreeMessage]]:
    """Process msg at the peer owning msg.dest (position pos_i, segment (lo, hi]).

    The destination walks tree steps internally while it stays inside this
    segment; only a step that leaves the segment costs another DHT delivery.
    The edge therefore describes the boundary crossed on entry, and a match
    means the message bounced straight back from a ring neighbor.  Such a
    bounce is dropped unless this peer's own position still lies under the
    destination (then the walk below can still accept here) or this peer
    owns the origin (then the edge is its own stamp, not a neighbor's).
    """
    origin = msg.origin
    dest = msg.dest
    edge = msg.edge
    # A receiver owning the origin address plays the sender's role below.
    # For an occupied origin that is exactly "origin == pos_i"; it also
    # covers messages issued from vacated positions after churn.
    sender_role = segment_contains(lo, hi, origin)
    while True:
        if dest == pos_i:
            return DeliverStatus.ACCEPTED, None
        if is_foreparent(dest, origin):
            # The owner of the root address occupies the root position, so
            # an unaccepted upward destination is never the root.
            assert dest != 0, "root reached without acceptance"
            new_dest, new_edge = up(dest, d), None
        else:
            # Descending.  A subtree half lying entirely inside this segment
            # holds no peer's position except possibly this peer's own, so a
            # half that is contained and does not cover pos_i is dead; the
            # walk must take the other one.  Two dead halves mean nobody
            # below can accept.  A dead-half step forced back across the
            # entry boundary is dropped: the sender had already ruled out
            # its own side, so the surviving interval is the empty crack
            # between the two segments.
            lowbit = dest & -dest
            cw_dead = _interval_inside(lo, hi, dest, dest + lowbit - 1) and not (
                dest < pos_i <= dest + lowbit - 1
            )
            ccw_dead = _interval_inside(lo, hi, dest - lowbit, dest - 1) and not (
                dest - lowbit < pos_i <= dest - 1
            )
            if cw_dead and ccw_dead:
                return DeliverStatus.DROPPED, None
            if cw_dead:
                # At the origin's owner the edge is this peer's own stamp,
                # not a neighbor's verdict, so it cannot justify a drop.
                if (
                    not sender_role
                    and edge is not None
                    and edge == lo
                    and not is_foreparent(dest, pos_i)
                ):
                    return DeliverStatus.DROPPED, None
                new_dest, new_edge = ccw(dest, d), lo
            elif ccw_dead:
                if (
                    not sender_role
                    and edge is not None
                    and edge == hi
                    and not is_foreparent(dest, pos_i)
                ):
                    return DeliverStatus.DROPPED, None
                new_dest, new_edge = cw(dest, d), hi
            elif in_cw_subtree(dest, origin, d):
                if edge is not None and edge == lo and not is_foreparent(dest, pos_i):
                    return DeliverStatus.DROPPED, None
                if sender_role:
                    new_dest, new_edge = cw(dest, d), hi
                else:
                    new_dest, new_edge = ccw(dest, d), lo
            else:
                if edge is not None and edge == hi and not is_foreparent(dest, pos_i):
                    return DeliverStatus.DROPPED, None
                if sender_role:
                    new_dest, new_edge = ccw(dest, d), lo
                else:
                    new_dest, new_edge = cw(dest, d), hi
        if new_dest is None:
            return DeliverStatus.DROPPED, None
        if segment_contains(lo, hi, new_dest):
            # No boundary crossed; keep walking locally.
            dest = new_dest
            edge = None
            continue
        break
    return DeliverStatus.FORWARDED, TreeMessage(
        msg.origin, new_dest, new_edge, msg.payload
    )


def neighbor_direction(pos_self: int, pos_other: int, d: int) -> Direction:
    """Direction of pos_other as seen from pos_self (positions must differ)."""
    if is_foreparent(pos_other, pos_self):
        return Direction.UP
    if in_cw_subtree(pos_other, pos_self, d):
        return Direction.CW
    return Direction.CCW


def probe_walk(overlay, src_idx: int, direction: Direction):
    """Trace one probe from src_idx synchronously through the overlay.

    Returns (acceptor index or None, tree legs, leg (holder, dest) pairs).
    Each leg is one DHT-level delivery; the pairs let callers batch overlay
    hop counting separately.
    """
    d = overlay.d
    lo, hi = overlay.segment(src_idx)
    msg = make_message(overlay.position(src_idx), lo, hi, direction, d, None)
    holder = src_idx
    legs = 0
    pairs = []
    while msg is not None:
        owner = overlay.owner_index(msg.dest)
        pairs.append((holder, msg.dest))
        legs += 1
        olo, ohi = overlay.segment(owner)
        status, fwd = deliver(overlay.position(owner), olo, ohi, msg, d)
        if status is DeliverStatus.ACCEPTED:
            return owner, legs, pairs
        if status is DeliverStatus.DROPPED:
            return None, legs, pairs
        msg = fwd
        holder = owner
    return None, legs, pairs
