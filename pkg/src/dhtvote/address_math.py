"""Bit-level arithmetic on d-bit ring addresses and their tree positions.

Every d-bit address doubles as a node of a binary tree: a nonzero address is
read as p10^k (prefix p, a single set bit, k trailing zeros) and the all-zero
address is the root.  Bit 0 is the least significant bit.  All functions here
are pure and operate on plain ints; d is passed explicitly where it matters.
"""

from __future__ import annotations

from enum import IntEnum
from typing import Optional


class Direction(IntEnum):
    """The three tree directions a peer can talk to."""

    UP = 0
    CW = 1
    CCW = 2


DIRECTIONS = (Direction.UP, Direction.CW, Direction.CCW)


def mask(d: int) -> int:
    return (1 << d) - 1


def lowbit(a: int) -> int:
    """Value of the rightmost set bit of a nonzero address."""
    return a & -a


def up(pos: int, d: int) -> int:
    """Parent position: clear the rightmost set bit, set the next higher one.

    The topmost position 10^(d-1) overflows into the all-zero root.  Calling
    on the root itself is a contract violation.
    """
    if pos == 0:
        raise ValueError("the root has no parent")
    low = pos & -pos
    return ((pos & (pos - 1)) | (low << 1)) & mask(d)


def cw(pos: int, d: int) -> Optional[int]:
    """Clockwise descendant p110^(k-1), or None for odd (leaf) positions."""
    if pos == 0:
        return 1 << (d - 1)
    low = pos & -pos
    if low == 1:
        return None
    return pos + (low >> 1)


def ccw(pos: int, d: int) -> Optional[int]:
    """Counterclockwise descendant p010^(k-1); the root has none."""
    if pos == 0:
        return None
    low = pos & -pos
    if low == 1:
        return None
    return pos - (low >> 1)


def child(pos: int, direction: Direction, d: int) -> Optional[int]:
    if direction == Direction.CW:
        return cw(pos, d)
    if direction == Direction.CCW:
        return ccw(pos, d)
    raise ValueError("child direction must be CW or CCW")


def is_foreparent(a: int, b: int) -> bool:
    """True iff b lies in the subtree rooted at a (reflexive).

    The subtree of a = p10^k is the integer interval (a - 2^k, a + 2^k - 1];
    the root's subtree is the whole address space.
    """
    if a == 0:
        return True
    low = a & -a
    return a - low < b <= a + low - 1


def in_cw_subtree(dest: int, origin: int, d: int) -> bool:
    """True iff dest lies in the clockwise subtree of origin."""
    c = cw(origin, d)
    return c is not None and is_foreparent(c, dest)


def in_ccw_subtree(dest: int, origin: int, d: int) -> bool:
    """True iff dest lies in the counterclockwise subtree of origin."""
    c = ccw(origin, d)
    return c is not None and is_foreparent(c, dest)


def segment_contains(lo: int, hi: int, x: int) -> bool:
    """Membership in the circular segment (lo, hi]; lo == hi is the full ring."""
    if lo == hi:
        return True
    if lo < hi:
        return lo < x <= hi
    return x > lo or x <= hi


def position_of_segment(lo: int, hi: int, d: int) -> int:
    """Tree position taken by the peer owning the segment (lo, hi].

    A segment containing the all-zero address (wraparound, hi == 0, or the
    single-peer full ring lo == hi) takes the root.  Otherwise, with t the
    highest bit where lo and hi differ, the position is hi with its t lowest
    bits cleared: the unique address of maximal low bit inside the segment.
    """
    if lo >= hi:
        return 0
    t = (lo ^ hi).bit_length() - 1
    return hi & ~((1 << t) - 1)
