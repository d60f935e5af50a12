import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qkdrb.errors import InfeasibleScheduleError, InputError
from qkdrb.kms_sim import (
    KeyBlock,
    KeyPool,
    SimConfig,
    auto_block_bits,
    relay_chain_xor,
    run_relayed_sim,
    run_switched_sim,
)
from qkdrb.relayed import relayed_consumption
from qkdrb.ring import RingScenario
from qkdrb.skr_model import default_model
from qkdrb.switched import SwitchedConfig, switched_consumption

REF = SwitchedConfig()
MODEL = default_model()


def relayed_run(N, load, seed=3, B=256):
    s = RingScenario(N, 10.0)
    cr = relayed_consumption(s, MODEL)
    measure = 400 * B / cr
    return cr, run_relayed_sim(s, MODEL, SimConfig(B, 0.1 * measure, measure, load * cr, seed))


def switched_run(N, load, cfg=REF, periods=30, seed=3):
    s = RingScenario(N, 10.0)
    cs = switched_consumption(s, MODEL, cfg)
    B = auto_block_bits(cs, cfg.T)
    sim = SimConfig(B, 2 * cfg.T, periods * cfg.T, load * cs, seed)
    return cs, run_switched_sim(s, MODEL, cfg, sim)


class TestRelayXor:
    def test_empty_chain(self):
        k = KeyBlock(0b1011, 4)
        transcript, rec = relay_chain_xor(k, [])
        assert transcript == [] and rec == k

    def test_single_hop(self):
        k, l1 = KeyBlock(0b1100, 4), KeyBlock(0b1010, 4)
        transcript, rec = relay_chain_xor(k, [l1])
        assert [c.bits for c in transcript] == [0b0110]
        assert rec.bits == k.bits

    def test_random_chain_seed7(self):
        rng = random.Random(7)
        end = KeyBlock(rng.getrandbits(256), 256)
        links = [KeyBlock(rng.getrandbits(256), 256) for _ in range(4)]
        transcript, rec = relay_chain_xor(end, links)
        assert rec.bits == end.bits
        assert len(transcript) == 4
        for c, lk in zip(transcript, links):
            assert c.bits == end.bits ^ lk.bits
            if lk.bits:
                assert c.bits != end.bits

    def test_size_mismatch(self):
        with pytest.raises(InputError):
            relay_chain_xor(KeyBlock(1, 8), [KeyBlock(1, 16)])
        with pytest.raises(InputError):
            KeyBlock(256, 8)

    def test_bitstring(self):
        assert KeyBlock(5, 4).bitstring() == "0101"

    @given(st.integers(1, 512), st.integers(0, 12), st.randoms(use_true_random=False))
    def test_recovers_any_chain(self, size, hops, rnd):
        end = KeyBlock(rnd.getrandbits(size), size)
        links = [KeyBlock(rnd.getrandbits(size), size) for _ in range(hops)]
        assert relay_chain_xor(end, links)[1].bits == end.bits


def test_pool_never_negative():
    pool = KeyPool((1, 2))
    assert not pool.withdraw(10)
    pool.deposit(10)
    assert pool.withdraw(10)
    assert pool.fill_bits == 0 and pool.high_water == 10


def test_sim_config_validation():
    with pytest.raises(InputError):
        SimConfig(block_bits=0)
    with pytest.raises(InputError):
        SimConfig(measure_s=0)
    with pytest.raises(InputError):
        SimConfig(consumption_bps=-1.0).demand((1, 2))
    assert SimConfig(consumption_bps={(1, 2): 5.0}).demand((1, 3)) == 0.0


class TestRelayedSim:
    def test_n3_undersubscribed(self):
        cr, rep = relayed_run(3, 0.9)
        assert rep.starvation_events == 0
        for p in rep.pairs:
            assert p.consumed_bps == pytest.approx(0.9 * cr, rel=0.01)

    def test_n5_at_capacity(self):
        cr, rep = relayed_run(5, 1.0)
        assert cr == pytest.approx(8 * MODEL(2.4) / 24)
        for p in rep.pairs:
            assert p.delivered_bps == pytest.approx(cr, rel=0.01)
        assert rep.starvation_events == 0

    def test_n5_oversubscribed(self):
        _, rep = relayed_run(5, 1.1)
        assert rep.starved

    def test_checks(self):
        _, rep = relayed_run(7, 0.99)
        assert rep.relay_checks > 0 and rep.relay_symmetry_ok and rep.conservation_ok
        assert len(rep.pairs) == 21
        assert all(p.min_pool_bits >= 0 for p in rep.pairs)

    def test_deterministic(self):
        a = relayed_run(5, 0.99, seed=11)[1]
        b = relayed_run(5, 0.99, seed=11)[1]
        assert a.to_json() == b.to_json() and a.to_csv() == b.to_csv()


class TestSwitchedSim:
    def test_n3_single_phase(self):
        cfg = SwitchedConfig(2, 2, 0, 10800)
        cs, rep = switched_run(3, 1.0, cfg)
        assert cs == pytest.approx(MODEL(0) * 10**-0.2)
        for p in rep.pairs:
            assert p.delivered_bps == pytest.approx(cs, rel=0.01)
        assert rep.starvation_events == 0

    def test_n9_under_and_over(self):
        cs, ok = switched_run(9, 0.99)
        assert not ok.starved
        assert all(p.delivered_bps == pytest.approx(cs, rel=0.01) for p in ok.pairs)
        _, bad = switched_run(9, 1.05)
        assert bad.starved

    def test_infeasible_propagates(self):
        with pytest.raises(InfeasibleScheduleError):
            run_switched_sim(RingScenario(9, 1.0), MODEL, SwitchedConfig(R=3000, T=12000), SimConfig())

    def test_deterministic(self):
        a = switched_run(5, 1.02, seed=5)[1]
        b = switched_run(5, 1.02, seed=5)[1]
        assert a.to_json() == b.to_json()

    def test_report_serialization(self):
        _, rep = switched_run(5, 0.99, periods=3)
        d = rep.to_dict()
        assert d["arch"] == "switched" and len(d["pairs"]) == 10
        assert rep.to_csv().splitlines()[0] == "pair,delivered_bps,min_pool_bits,starved"


def test_auto_block_bits():
    assert auto_block_bits(1000.0, 10.0) == 256
    assert auto_block_bits(1e5, 10800) == int(1e5 * 10800 / 200)
    assert auto_block_bits(0.0, 10.0) == 256
