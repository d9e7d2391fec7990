import math

import numpy as np
import pytest

from rpnet.antenna.network import (
    Topology, active_in, build_hc, build_net, guard_for, parse_transition_id, ring_hoods,
    ring_topology, selected, selection_state, transition_id,
)
from rpnet.conditions import holds
from rpnet.errors import InvalidTopology
from rpnet.model import Bond, State, split_hazards, validate
from rpnet.netfile import format_marking
from rpnet.antenna.capacity import capacity
from rpnet.semantics import FORWARD, RandomUniform, co_enabled, enabled_steps, fire, reverse, run


def two_antennas(h_on, h_off, rho=10.0):
    H = np.array([[h_on], [h_off]], dtype=complex)
    return build_net(ring_topology(2, {0}), H, rho, n_ts=1, n_r=1)


def test_two_antenna_net_has_handover_wiring(fig1b):
    net = two_antennas(1.0, 2.0)
    assert validate(net) == []
    assert set(net.transitions) == {"t1_2_M1_p1", "t2_1_M1_p1"}
    t = net.transitions["t1_2_M1_p1"]
    ref = fig1b.transitions["t_ij"]
    rename = {"A_i": "A1", "A_j": "A2", "M_k": "M1", "p": "p1", "a_i": "a1", "a_j": "a2", "m_k": "m1"}

    def renamed(arcs):
        out = {}
        for place, lab in arcs.items():
            out[rename[place]] = frozenset(
                Bond(rename[e.a], rename[e.b]) if isinstance(e, Bond) else rename[e] for e in lab)
        return out

    assert t.inputs == renamed(ref.inputs)
    assert t.outputs == renamed(ref.outputs)
    s0 = net.initial_state()
    assert format_marking(net, s0) == "A1: p1; A2: a2; M1: m1,a1;(a1,m1)"
    s1 = fire(net, s0, "t1_2_M1_p1")
    assert format_marking(net, s1) == "A1: a1; A2: p1; M1: m1,a2;(a2,m1)"


@pytest.mark.parametrize("h_i, h_j, fires", [
    (1.0, 2.0, True),
    (2.0, 1.0, False),
    (0.7 + 0.1j, 0.7 + 0.1j, False),
    (0.5j, -0.6, True),
])
def test_guard_on_single_user_toy(h_i, h_j, fires):
    net = two_antennas(h_i, h_j)
    s0 = net.initial_state()
    assert holds(guard_for(0, 1, 0), s0, net) is (math.log2(1 + 10 * abs(h_i) ** 2) < math.log2(1 + 10 * abs(h_j) ** 2))
    assert (enabled_steps(net, s0) == [("t1_2_M1_p1", FORWARD)]) is fires


def test_fired_swap_is_kept_while_it_still_pays():
    net = two_antennas(1.0, 2.0)
    s1 = fire(net, net.initial_state(), "t1_2_M1_p1")
    assert holds(guard_for(0, 1, 0), s1, net) is True
    assert not co_enabled(net, s1, "t1_2_M1_p1")
    assert enabled_steps(net, s1) == []


@pytest.mark.parametrize("h2, reversible", [
    ([1.0, 0.01], True),   # nearly parallel to a3: a1 would now be the better partner
    ([0.0, 2.0], False),   # a2 still beats a1 next to a3
])
def test_swap_reverses_once_it_stops_paying(h2, reversible):
    H = np.array([[0.0, 1.0], h2, [1.0, 0.0]], dtype=complex)
    net = build_net(ring_topology(3, {0, 2}), H, 10.0, n_ts=2, n_r=2)
    after = State.make(net.places, {
        "A1": {"a1"}, "A2": {"p1"}, "A3": {"p2"},
        "M1": {"m1", "a2", "a3", Bond("a2", "m1"), Bond("a3", "m1")},
    }, {"t1_2_M1_p1": {1}})
    with_a1 = capacity(H[[0, 2]], 10.0, 2, 2)
    with_a2 = capacity(H[[1, 2]], 10.0, 2, 2)
    assert (with_a1 >= with_a2) is reversible
    assert co_enabled(net, after, "t1_2_M1_p1") is reversible
    if reversible:
        back = reverse(net, after, "t1_2_M1_p1")
        assert selected(back, 3) == (0, 2)


def test_all_on_is_stuck():
    rng = np.random.default_rng(0)
    H = rng.standard_normal((4, 2)) + 1j * rng.standard_normal((4, 2))
    net = build_net(ring_topology(4, range(4), size=2, stride=1), H, 10.0, 4, 2)
    assert validate(net) == []
    assert enabled_steps(net, net.initial_state()) == []


def test_ring_of_four_validates():
    rng = np.random.default_rng(1)
    H = rng.standard_normal((4, 2)) + 1j * rng.standard_normal((4, 2))
    top = ring_topology(4, {0, 2}, size=2, stride=1)
    assert top.hoods == ((0, 1), (1, 2), (2, 3), (0, 3))
    net = build_net(top, H, 10.0, 2, 2)
    assert validate(net) == []
    assert len(net.transitions) == 4 * 2 * 2


def test_power_tokens_are_conserved():
    rng = np.random.default_rng(2)
    H = rng.standard_normal((12, 3)) + 1j * rng.standard_normal((12, 3))
    top = ring_topology(12, {0, 3, 5, 8, 11}, size=4, stride=2)
    net = build_net(top, H, 10.0, 5, 3)
    res = run(net, net.initial_state(), RandomUniform(4), 200)
    assert len(selected(res.state, 12)) == 5
    assert res.trace


def test_ring_hoods():
    assert ring_hoods(16, 8, 4) == tuple(
        tuple(sorted((s + o) % 16 for o in range(8))) for s in range(0, 16, 4))
    assert ring_hoods(6, 8, 4) == ((0, 1, 2, 3, 4, 5),)


def test_topology_checks():
    H = np.zeros((3, 1))
    with pytest.raises(InvalidTopology):
        build_net(Topology(3, ((0, 1),), frozenset({0})), H, 1.0, 1, 1)
    with pytest.raises(InvalidTopology):
        build_net(ring_topology(3, {0, 1}), H, 1.0, 1, 1)
    with pytest.raises(InvalidTopology):
        build_net(ring_topology(3, {0}), np.zeros((3, 2)), 1.0, 1, 1)
    with pytest.raises(InvalidTopology):
        Topology(3, ((0, 1), (1, 2)), frozenset({0}), ((0, 1),)).check()


def test_transition_ids_round_trip():
    assert transition_id(0, 11, 2, 4) == "t1_12_M3_p5"
    assert parse_transition_id("t1_12_M3_p5") == (0, 11, 2, 4)


def test_build_hc_cases():
    rng = np.random.default_rng(3)
    H = rng.standard_normal((4, 2)) + 1j * rng.standard_normal((4, 2))
    places = ("A1", "A2", "A3", "A4", "M1")
    empty = State.make(places, {"M1": {"m1"}})
    assert not build_hc(empty, "M1", H).any()
    full = State.make(places, {"M1": {"m1", "a1", "a2", "a3", "a4"} | {Bond(f"a{i}", "m1") for i in range(1, 5)}})
    np.testing.assert_array_equal(build_hc(full, "M1", H), H)
    mixed = State.make(places, {"M1": {"m1", "a2", "a4", Bond("a2", "m1"), Bond("a4", "m1")}})
    want = np.zeros_like(H)
    want[[1, 3]] = H[[1, 3]]
    np.testing.assert_array_equal(build_hc(mixed, "M1", H), want)
    assert active_in(mixed, 0) == (1, 3)


def test_selection_state_moves_tokens():
    rng = np.random.default_rng(4)
    H = rng.standard_normal((8, 2)) + 1j * rng.standard_normal((8, 2))
    top = ring_topology(8, {0, 1}, size=4, stride=2)
    net = build_net(top, H, 10.0, 2, 2)
    s = selection_state(net, top.with_selection({5, 6}, {5: 2, 6: 3}))
    assert selected(s, 8) == (5, 6)
    assert active_in(s, 2) == (5,)
    assert active_in(s, 3) == (6,)
