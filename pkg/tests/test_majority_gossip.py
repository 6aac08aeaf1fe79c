"""Push-gossip averaging peer: halving, merging, and mass conservation."""

import math

from hypothesis import given, strategies as st

from dhtvote.majority_gossip import GossipPeer


def test_send_halves_weight():
    p = GossipPeer(1)
    assert (p.est, p.w) == (1.0, 1.0)
    est, share = p.send_half()
    assert est == 1.0 and share == 0.5 and p.w == 0.5
    assert p.est == 1.0


def test_receive_merges_weighted_average():
    p = GossipPeer(1)
    p.receive(0.0, 0.5)
    assert math.isclose(p.est, 2.0 / 3.0)
    assert math.isclose(p.w, 1.5)


def test_input_change_preserves_others_mass():
    p = GossipPeer(0)
    p.receive(1.0, 1.0)
    mass_before = p.est * p.w
    p.on_input_change(1)
    # The own-vote delta adds exactly 1 unit of mass.
    assert math.isclose(p.est * p.w, mass_before + 1.0)
    p.on_input_change(1)
    assert math.isclose(p.est * p.w, mass_before + 1.0)


def test_output_threshold_at_half():
    p = GossipPeer(1)
    assert p.output() == 1
    p.receive(0.0, 1.0)  # est 0.5
    assert p.output() == 1
    p.receive(0.0, 2.0)  # est 0.25
    assert p.output() == 0


@given(st.lists(st.tuples(st.floats(0, 1), st.floats(0.01, 2)), max_size=50))
def test_pairwise_exchange_conserves_mass(transfers):
    a, b = GossipPeer(1), GossipPeer(0)

    def mass():
        return a.est * a.w + b.est * b.w

    def weight():
        return a.w + b.w

    m0, w0 = mass(), weight()
    for _, _ in transfers:
        est, share = a.send_half()
        b.receive(est, share)
        assert math.isclose(mass(), m0, rel_tol=1e-12)
        assert math.isclose(weight(), w0, rel_tol=1e-12)
        a, b = b, a
