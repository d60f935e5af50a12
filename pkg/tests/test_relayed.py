from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from qkdrb.relayed import relayed_consumption, relayed_consumption_exact, relayed_oracle
from qkdrb.ring import RingScenario, adjacent_links
from qkdrb.skr_model import apply_switched_penalties, default_model, fit_table_model, generation_rate


def const_model(g):
    return fit_table_model([(0, g), (1000, g)])


def test_n3_full_rate():
    s = RingScenario(3, 5.0)
    assert relayed_consumption(s, const_model(300)) == 300
    alloc = relayed_oracle(s, const_model(300))
    assert set(alloc.per_pair_rate.values()) == {300}


def test_n5_arithmetic():
    assert relayed_consumption(RingScenario(5, 1.0), const_model(300)) == 100
    alloc = relayed_oracle(RingScenario(5, 1.0), const_model(300))
    assert set(alloc.per_link_contributions.values()) == {100}
    assert set(alloc.per_pair_rate.values()) == {100}


def test_n7_oracle():
    alloc = relayed_oracle(RingScenario(7, 1.0), const_model(480))
    assert set(alloc.per_pair_rate.values()) == {80}
    assert len(alloc.per_pair_rate) == 21


def test_n25_flat_region():
    m = default_model()
    s = RingScenario(25, 20.0)
    assert relayed_consumption(s, m) == pytest.approx(generation_rate(m, 6) / 78, rel=1e-15)


def test_link_load_conserved():
    s = RingScenario(9, 4.0)
    alloc = relayed_oracle(s, default_model())
    for link in adjacent_links(9):
        assert alloc.link_load(link) <= alloc.link_rate


@given(st.integers(1, 12).map(lambda i: 2 * i + 1), st.floats(0.5, 60), st.floats(1, 1e7))
def test_oracle_equivalence_exact(N, Le, g):
    s = RingScenario(N, Le)
    for m in (const_model(g), default_model()):
        alloc = relayed_oracle(s, m)
        assert alloc.min_pair_rate == relayed_consumption_exact(s, m)
        # equal splitting gives every pair the same rate
        assert len(set(alloc.per_pair_rate.values())) == 1
        assert float(alloc.min_pair_rate) == pytest.approx(relayed_consumption(s, m), rel=1e-12)


def test_monotone_in_N_and_Le():
    m = default_model()
    rates = [relayed_consumption(RingScenario(N, 10), m) for N in range(3, 27, 2)]
    assert all(a > b for a, b in zip(rates, rates[1:]))
    les = [relayed_consumption(RingScenario(9, le), m) for le in range(1, 80, 3)]
    assert all(a >= b for a, b in zip(les, les[1:]))


def test_independent_of_switched_penalties():
    s = RingScenario(9, 12.0)
    m = default_model()
    raw = 8 * generation_rate(m, s.adjacent_attenuation_db) / 80
    penalized = 8 * generation_rate(apply_switched_penalties(m, 2, 2), s.adjacent_attenuation_db) / 80
    assert relayed_consumption(s, m) == raw
    assert raw != penalized
