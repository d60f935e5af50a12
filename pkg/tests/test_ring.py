import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from qkdrb.errors import InputError
from qkdrb.ring import (
    RingScenario,
    adjacent_links,
    all_pairs,
    chord_length,
    crossing_paths_per_link,
    enumerate_crossing_paths,
    hop_attenuation,
    hop_distance,
    path_links,
)

odd_n = st.integers(1, 30).map(lambda i: 2 * i + 1)


def test_chord_circle_values():
    s = RingScenario(5, 1.0)
    assert chord_length(s, 1) == pytest.approx(0.93549, abs=1e-5)
    assert chord_length(s, 2) == pytest.approx(1.51365, abs=1e-5)


def test_chord_arc():
    s = RingScenario(7, 1.0, chord_mode="arc")
    assert chord_length(s, 1) == 1
    assert chord_length(s, 5) == 2


@pytest.mark.parametrize("k", [0, 5, -1])
def test_chord_range(k):
    with pytest.raises(InputError):
        chord_length(RingScenario(5, 1.0), k)


def test_hop_attenuation():
    assert hop_attenuation(RingScenario(5, 10, 0.24, "arc"), 1) == pytest.approx(2.4)
    assert hop_attenuation(RingScenario(25, 1, 0.24), 12) == pytest.approx(1.906, abs=5e-4)
    s = RingScenario(9, 3, 0.0)
    assert all(hop_attenuation(s, k) == 0 for k in range(1, 5))
    with pytest.raises(InputError):
        hop_attenuation(RingScenario(5, 1), 3)


def test_adjacent_attenuation_uses_link_length():
    assert RingScenario(25, 10).adjacent_attenuation_db == pytest.approx(2.4)


@pytest.mark.parametrize("N", [4, 1, 2, 3.0, True])
def test_bad_ring(N):
    with pytest.raises(InputError):
        RingScenario(N, 1.0)
    with pytest.raises(InputError):
        crossing_paths_per_link(N)


@pytest.mark.parametrize("kw", [{"Le": 0}, {"a_c": -0.1}, {"chord_mode": "line"}])
def test_bad_scenario_fields(kw):
    base = {"N": 5, "Le": 1.0}
    base.update(kw)
    with pytest.raises(InputError):
        RingScenario(**base)


def test_crossing_counts():
    assert crossing_paths_per_link(3) == 1
    assert crossing_paths_per_link(5) == 3
    assert crossing_paths_per_link(25) == 78


def test_enumeration_examples():
    assert enumerate_crossing_paths(3, (1, 2)) == [(1, 2)]
    assert enumerate_crossing_paths(5, (1, 2)) == [(1, 2), (1, 3), (5, 2)]
    assert len(enumerate_crossing_paths(7, (1, 2))) == 6
    assert len(enumerate_crossing_paths(25, (1, 2))) == 78
    # orientation of the link does not matter
    assert enumerate_crossing_paths(5, (2, 1)) == enumerate_crossing_paths(5, (1, 2))


def test_enumeration_rejects_non_links():
    with pytest.raises(InputError):
        enumerate_crossing_paths(5, (1, 3))
    with pytest.raises(InputError):
        enumerate_crossing_paths(5, (0, 1))


def _walk_oracle(N, link):
    """Step along every shortest path node by node."""
    out = []
    for s, d in all_pairs(N):
        node = s
        while node != d:
            nxt = node % N + 1
            if {node, nxt} == set(link):
                out.append((s, d))
                break
            node = nxt
    return sorted(out)


@pytest.mark.parametrize("N", [3, 5, 7, 11, 15])
def test_enumeration_matches_walk(N):
    for link in adjacent_links(N):
        assert enumerate_crossing_paths(N, link) == _walk_oracle(N, link)


@given(odd_n)
def test_count_uniform_over_links(N):
    counts = {len(enumerate_crossing_paths(N, lk)) for lk in adjacent_links(N)}
    assert counts == {crossing_paths_per_link(N)}


@given(st.integers(1, 8).map(lambda i: 2 * i + 1))
def test_pair_crosses_hopdist_links(N):
    hits = {p: 0 for p in all_pairs(N)}
    for lk in adjacent_links(N):
        for p in enumerate_crossing_paths(N, lk):
            hits[p] += 1
    assert all(hits[(s, d)] == hop_distance(N, s, d) == len(path_links(N, (s, d))) for s, d in hits)
    assert len(hits) == N * (N - 1) // 2


@given(odd_n, st.floats(0.1, 50), st.data())
def test_chord_properties(N, Le, data):
    k = data.draw(st.integers(1, N - 1))
    circ = RingScenario(N, Le)
    arc = RingScenario(N, Le, chord_mode="arc")
    assert chord_length(circ, k) == pytest.approx(chord_length(circ, N - k), rel=1e-12)
    assert chord_length(circ, k) < min(k, N - k) * Le
    assert chord_length(arc, k) == min(k, N - k) * Le
