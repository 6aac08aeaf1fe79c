"""Unit and property tests for tree-position address arithmetic."""

import pytest
from hypothesis import given, strategies as st

from dhtvote.address_math import (
    DIRECTIONS,
    Direction,
    ccw,
    child,
    cw,
    in_ccw_subtree,
    in_cw_subtree,
    is_foreparent,
    lowbit,
    mask,
    position_of_segment,
    segment_contains,
    up,
)

D = 8


def test_up_frozen_examples():
    assert up(0x80, D) == 0x00
    assert up(0x40, D) == 0x80
    assert up(0xC0, D) == 0x80
    assert up(0xD8, D) == 0xD0
    assert up(0xD0, D) == 0xE0
    assert up(0x01, D) == 0x02


def test_cw_ccw_frozen_examples():
    assert cw(0x00, D) == 0x80
    assert ccw(0x00, D) is None
    assert cw(0x80, D) == 0xC0
    assert ccw(0x80, D) == 0x40
    assert cw(0xD8, D) == 0xDC
    assert ccw(0xD8, D) == 0xD4
    # Odd positions are leaves.
    assert cw(0xD9, D) is None
    assert ccw(0x01, D) is None


def test_child_matches_direction():
    assert child(0x80, Direction.CW, D) == cw(0x80, D)
    assert child(0x80, Direction.CCW, D) == ccw(0x80, D)


def test_is_foreparent_frozen_examples():
    assert is_foreparent(0x00, 0xD8)
    assert is_foreparent(0x00, 0x00)
    assert is_foreparent(0x80, 0xD8)
    assert is_foreparent(0xD8, 0xD8)
    assert not is_foreparent(0xC0, 0x40)
    assert not is_foreparent(0xD8, 0xD0)


def test_subtree_membership_frozen_examples():
    assert in_cw_subtree(0xD8, 0xD0, D)
    assert not in_ccw_subtree(0xD8, 0xD0, D)
    assert in_ccw_subtree(0x40, 0x80, D)
    # The root's clockwise subtree is every other address.
    assert in_cw_subtree(0x01, 0x00, D)
    assert not in_ccw_subtree(0x01, 0x00, D)


def test_segment_contains():
    assert segment_contains(0x10, 0x20, 0x20)
    assert not segment_contains(0x10, 0x20, 0x10)
    assert segment_contains(0xF0, 0x10, 0x05)
    assert segment_contains(0xF0, 0x10, 0xF5)
    assert not segment_contains(0xF0, 0x10, 0x80)
    # Equal boundaries mean the full ring.
    assert segment_contains(0x42, 0x42, 0x00)


def test_position_of_segment_frozen_examples():
    assert position_of_segment(0x70, 0x98, D) == 0x80
    assert position_of_segment(0xA0, 0xE0, D) == 0xC0
    assert position_of_segment(0xD0, 0xD8, D) == 0xD8
    # Wrapping (and full-ring) segments take the root position.
    assert position_of_segment(0xF0, 0x10, D) == 0x00
    assert position_of_segment(0x42, 0x42, D) == 0x00


positions = st.integers(min_value=0, max_value=mask(D))


@given(positions.filter(lambda p: p != 0))
def test_up_inverts_children(p):
    for direction in (Direction.CW, Direction.CCW):
        c = child(p, direction, D)
        if c is not None:
            assert up(c, D) == p


@given(positions.filter(lambda p: p != 0))
def test_parent_is_foreparent(p):
    assert is_foreparent(up(p, D), p)
    assert not is_foreparent(p, up(p, D))


@given(positions, positions)
def test_subtree_partition(origin, dest):
    # Inside a subtree, everything but the apex is in exactly one half.
    if is_foreparent(origin, dest) and dest != origin:
        assert in_cw_subtree(dest, origin, D) != in_ccw_subtree(dest, origin, D)
    else:
        assert not in_cw_subtree(dest, origin, D)
        assert not in_ccw_subtree(dest, origin, D)


@given(positions, positions)
def test_position_lies_in_segment(lo, hi):
    pos = position_of_segment(lo, hi, D)
    assert segment_contains(lo, hi, pos)


@given(positions, positions, positions)
def test_position_maximality(lo, hi, x):
    # No address in the segment out-ranks its position (root ranks highest).
    pos = position_of_segment(lo, hi, D)
    if not segment_contains(lo, hi, x):
        return
    rank = (1 << D) if pos == 0 else lowbit(pos)
    xrank = (1 << D) if x == 0 else lowbit(x)
    assert rank >= xrank


@given(positions, positions, positions)
def test_position_refinement(lo, hi, m):
    # Splitting a segment leaves its position in exactly one half.
    if m == hi or not segment_contains(lo, hi, m):
        return
    pos = position_of_segment(lo, hi, D)
    pos_a = position_of_segment(lo, m, D)
    pos_b = position_of_segment(m, hi, D)
    assert (pos_a == pos) != (pos_b == pos)


@pytest.mark.parametrize("d", [8, 16, 32])
def test_mask_and_lowbit(d):
    assert mask(d) == (1 << d) - 1
    assert lowbit(0b1011000) == 0b1000
    assert DIRECTIONS == (Direction.UP, Direction.CW, Direction.CCW)
