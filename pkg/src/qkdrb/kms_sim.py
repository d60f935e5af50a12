"""Discrete-event simulation of the key management layer.

Key material moves in fixed-size blocks of ``block_bits`` bits. Each SAE
pair owns a quantum key pool (QKP) that the KMS fills and the pair's
applications drain at a constant demand rate; a demand that finds the pool
short is dropped and counted as a starvation event.

Relayed runs materialize real key bits: every adjacent link emits link-key
blocks which a splitter hands round-robin to the relay paths crossing the
link, and an end-to-end key is forwarded by one-time-pad XOR hop by hop as
soon as every link on its path has contributed a block. Switched runs only
track pool levels; keys are generated end to end during the owning phase.

Events at equal times are ordered by priority (generation before demand),
then phase index or link, then pair, so a run is fully determined by its
inputs and seed.
"""
from __future__ import annotations

import csv
import heapq
import io
import json
import math
import random
from collections import deque
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .errors import InputError
from .relayed import relayed_consumption
from .ring import RingScenario, adjacent_links, all_pairs, enumerate_crossing_paths, path_links
from .skr_model import GenerationModel, generation_rate
from .switched import Schedule, SwitchedConfig, build_schedule, switched_consumption

Pair = tuple[int, int]

_GENERATE = 0
_DEMAND = 1


@dataclass(frozen=True)
class KeyBlock:
    """``size`` bits of key held as an integer, most significant bit first."""

    bits: int
    size: int
    origin_link: tuple[int, int] | None = None
    sequence: int = 0

    def __post_init__(self):
        if self.size <= 0 or self.bits < 0 or self.bits.bit_length() > self.size:
            raise InputError("key block bits do not fit its size")

    def __xor__(self, other: "KeyBlock") -> "KeyBlock":
        if other.size != self.size:
            raise InputError(f"block size mismatch: {self.size} vs {other.size}")
        return KeyBlock(self.bits ^ other.bits, self.size, self.origin_link, self.sequence)

    def bitstring(self) -> str:
        return format(self.bits, f"0{self.size}b")


def relay_chain_xor(
    end_key: KeyBlock, link_keys: Sequence[KeyBlock]
) -> tuple[list[KeyBlock], KeyBlock]:
    """Forward ``end_key`` over a chain of OTP-protected hops.

    The sender encrypts with the first link key; each intermediate node
    decrypts with the key of the incoming link and re-encrypts with the key
    of the outgoing one. Returns the ciphertext seen on every hop and the
    key recovered at the far end.
    """
    for lk in link_keys:
        if lk.size != end_key.size:
            raise InputError(f"block size mismatch: {lk.size} vs {end_key.size}")
    transcript = []
    held = end_key
    for lk in link_keys:
        cipher = held ^ lk
        transcript.append(cipher)
        held = cipher ^ lk
    return transcript, held


class KeyPool:
    """Quantum key pool of one SAE pair."""

    def __init__(self, owner: Pair, keep_blocks: bool = False):
        self.owner = owner
        self.fill_bits = 0
        self.high_water = 0
        self.low_water = 0
        self.blocks: deque[KeyBlock] | None = deque() if keep_blocks else None

    def deposit(self, bits: int, block: KeyBlock | None = None) -> None:
        self.fill_bits += bits
        if self.blocks is not None:
            self.blocks.append(block)
        self.high_water = max(self.high_water, self.fill_bits)

    def withdraw(self, bits: int) -> bool:
        if self.fill_bits < bits:
            return False
        self.fill_bits -= bits
        if self.blocks is not None:
            self.blocks.popleft()
        return True


@dataclass(frozen=True)
class SimConfig:
    """Block size, timing window and per-pair demand of one simulation run.

    ``consumption_bps`` is either one rate for every pair or a mapping from
    canonical pair to rate. Measurement covers ``[warmup_s, warmup_s + measure_s)``.
    """

    block_bits: int = 256
    warmup_s: float = 0.1
    measure_s: float = 1.0
    consumption_bps: float | Mapping[Pair, float] = 0.0
    seed: int = 0

    def __post_init__(self):
        if isinstance(self.block_bits, bool) or not isinstance(self.block_bits, int) or self.block_bits <= 0:
            raise InputError("block_bits must be a positive integer")
        if not self.warmup_s >= 0 or not self.measure_s > 0:
            raise InputError("warmup must be >= 0 s and measurement > 0 s")

    def demand(self, pair: Pair) -> float:
        if isinstance(self.consumption_bps, Mapping):
            rate = self.consumption_bps.get(pair, 0.0)
        else:
            rate = self.consumption_bps
        if not rate >= 0:
            raise InputError(f"consumption rate for {pair} must be >= 0")
        return float(rate)


@dataclass(frozen=True)
class PairStats:
    pair: Pair
    delivered_bps: float
    consumed_bps: float
    demand_bps: float
    min_pool_bits: int
    starvation_events: int

    @property
    def starved(self) -> bool:
        return self.starvation_events > 0


@dataclass(frozen=True)
class SimReport:
    """Outcome of one run; rates are measured inside the measurement window.

    ``delivered_bps`` is key handed by the KMS into a pair's pool,
    ``consumed_bps`` is key actually taken by the pair's applications.
    """

    arch: str
    N: int
    analytic_bps: float
    block_bits: int
    window_s: tuple[float, float]
    pairs: tuple[PairStats, ...]
    warmup_starvation_events: int = 0
    relay_checks: int = 0
    relay_symmetry_ok: bool = True
    conservation_ok: bool = True
    extra: dict = field(default_factory=dict)

    @property
    def starvation_events(self) -> int:
        return sum(p.starvation_events for p in self.pairs)

    @property
    def starved(self) -> bool:
        return self.starvation_events > 0

    def min_delivered_bps(self) -> float:
        return min(p.delivered_bps for p in self.pairs)

    def to_dict(self) -> dict:
        return {
            "arch": self.arch,
            "N": self.N,
            "analytic_bps": self.analytic_bps,
            "block_bits": self.block_bits,
            "window_s": list(self.window_s),
            "starvation_events": self.starvation_events,
            "warmup_starvation_events": self.warmup_starvation_events,
            "starved": self.starved,
            "relay_checks": self.relay_checks,
            "relay_symmetry_ok": self.relay_symmetry_ok,
            "conservation_ok": self.conservation_ok,
            "pairs": [
                {
                    "pair": f"{p.pair[0]}-{p.pair[1]}",
                    "delivered_bps": p.delivered_bps,
                    "consumed_bps": p.consumed_bps,
                    "demand_bps": p.demand_bps,
                    "min_pool_bits": p.min_pool_bits,
                    "starvation_events": p.starvation_events,
                }
                for p in self.pairs
            ],
            **self.extra,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["pair", "delivered_bps", "min_pool_bits", "starved"])
        for p in self.pairs:
            w.writerow([f"{p.pair[0]}-{p.pair[1]}", repr(p.delivered_bps), p.min_pool_bits, int(p.starved)])
        return buf.getvalue()


class _Tally:
    """Per-pair counters restricted to the measurement window."""

    def __init__(self, pairs, t0, t1):
        self.t0, self.t1 = t0, t1
        self.delivered = dict.fromkeys(pairs, 0)
        self.consumed = dict.fromkeys(pairs, 0)
        self.starved = dict.fromkeys(pairs, 0)
        self.early_starved = 0
        self.min_level = dict.fromkeys(pairs, None)

    def inside(self, t):
        return self.t0 <= t < self.t1

    def level(self, pair, t, fill):
        if t >= self.t0:
            cur = self.min_level[pair]
            if cur is None or fill < cur:
                self.min_level[pair] = fill

    def report(self, arch, N, analytic, sim, pools, **kw):
        span = self.t1 - self.t0
        stats = []
        for pair in sorted(self.delivered):
            lvl = self.min_level[pair]
            stats.append(
                PairStats(
                    pair,
                    self.delivered[pair] / span,
                    self.consumed[pair] / span,
                    sim.demand(pair),
                    pools[pair].fill_bits if lvl is None else lvl,
                    self.starved[pair],
                )
            )
        return SimReport(
            arch, N, analytic, sim.block_bits, (self.t0, self.t1), tuple(stats),
            warmup_starvation_events=self.early_starved, **kw,
        )


def _demand_step(tally, pools, pair, t, bits):
    if pools[pair].withdraw(bits):
        if tally.inside(t):
            tally.consumed[pair] += bits
    elif t >= tally.t0:
        tally.starved[pair] += 1
    else:
        tally.early_starved += 1
    tally.level(pair, t, pools[pair].fill_bits)


def _push_demands(heap, pairs, sim, start, end):
    for idx, pair in enumerate(pairs):
        c = sim.demand(pair)
        if c > 0:
            t = start + sim.block_bits / c
            if t < end:
                heapq.heappush(heap, (t, _DEMAND, idx, 1, start, c))


def run_relayed_sim(
    scenario: RingScenario, model: GenerationModel, sim: SimConfig
) -> SimReport:
    """Simulate trusted-node key relaying with equal round-robin splitting."""
    N, B = scenario.N, sim.block_bits
    rng = random.Random(sim.seed)
    links = adjacent_links(N)
    pairs = all_pairs(N)
    crossing = {link: enumerate_crossing_paths(N, link) for link in links}
    route = {pair: path_links(N, pair) for pair in pairs}
    queues = {(link, pair): deque() for link in links for pair in crossing[link]}
    pools = {pair: KeyPool(pair, keep_blocks=True) for pair in pairs}
    generated = dict.fromkeys(links, 0)
    assigned = dict.fromkeys(links, 0)
    rr = dict.fromkeys(links, 0)
    t0 = sim.warmup_s
    t1 = sim.warmup_s + sim.measure_s
    tally = _Tally(pairs, t0, t1)
    relay_checks, symmetric = 0, True

    g = generation_rate(model, scenario.adjacent_attenuation_db)
    heap: list = []
    if g > 0:
        tick = B / g
        for li in range(len(links)):
            if tick < t1:
                heapq.heappush(heap, (tick, _GENERATE, li, 1))
    _push_demands(heap, pairs, sim, 0.0, t1)

    while heap:
        ev = heapq.heappop(heap)
        t, kind, idx, j = ev[:4]
        if kind == _GENERATE:
            link = links[idx]
            block = KeyBlock(rng.getrandbits(B), B, link, j)
            generated[link] += B
            pair = crossing[link][rr[link] % len(crossing[link])]
            rr[link] += 1
            queues[(link, pair)].append(block)
            assigned[link] += B
            path = route[pair]
            if all(queues[(lk, pair)] for lk in path):
                link_keys = [queues[(lk, pair)].popleft() for lk in path]
                end_key = KeyBlock(rng.getrandbits(B), B, None, j)
                _, recovered = relay_chain_xor(end_key, link_keys)
                relay_checks += 1
                symmetric &= recovered.bits == end_key.bits
                pools[pair].deposit(B, end_key)
                if tally.inside(t):
                    tally.delivered[pair] += B
                tally.level(pair, t, pools[pair].fill_bits)
            nxt = (j + 1) * tick
            if nxt < t1:
                heapq.heappush(heap, (nxt, _GENERATE, idx, j + 1))
        else:
            start, c = ev[4], ev[5]
            pair = pairs[idx]
            _demand_step(tally, pools, pair, t, B)
            nxt = start + (j + 1) * B / c
            if nxt < t1:
                heapq.heappush(heap, (nxt, _DEMAND, idx, j + 1, start, c))

    conservation = all(assigned[lk] <= generated[lk] for lk in links)
    return tally.report(
        "relayed", N, relayed_consumption(scenario, model), sim, pools,
        relay_checks=relay_checks, relay_symmetry_ok=symmetric, conservation_ok=conservation,
        extra={"link_rate_bps": g, "crossing_paths_per_link": len(crossing[links[0]])},
    )


def run_switched_sim(
    scenario: RingScenario, model: GenerationModel, cfg: SwitchedConfig, sim: SimConfig
) -> SimReport:
    """Simulate the periodic k-hop TDM schedule feeding per-pair pools.

    The first period only charges the pools; demand starts at t = T.
    """
    schedule = build_schedule(scenario, model, cfg)
    N, B, T = scenario.N, sim.block_bits, cfg.T
    pairs = all_pairs(N)
    pools = {pair: KeyPool(pair) for pair in pairs}
    members = [
        sorted((i, (i + ph.k - 1) % N + 1) for i in range(1, N + 1)) for ph in schedule.phases
    ]
    starts = schedule.phase_starts()
    t0 = sim.warmup_s
    t1 = sim.warmup_s + sim.measure_s
    tally = _Tally(pairs, t0, t1)

    # per phase: (period, blocks emitted this period, carried bits)
    state = [[0, 0, 0.0] for _ in schedule.phases]
    heap: list = []

    def schedule_next(pi):
        ph = schedule.phases[pi]
        period, j, carry = state[pi]
        while True:
            tau = ((j + 1) * B - carry) / ph.rate_bps
            if tau <= ph.duration_s * (1 + 1e-12):
                t = period * T + starts[pi] + tau
                if t < t1:
                    heapq.heappush(heap, (t, _GENERATE, pi, period, j + 1))
                return
            # phase over for this period: carry the partial block
            carry = carry + ph.rate_bps * ph.duration_s - j * B
            period, j = period + 1, 0
            state[pi][:] = [period, 0, carry]
            if period * T + starts[pi] >= t1:
                return

    for pi in range(len(schedule.phases)):
        schedule_next(pi)
    _push_demands(heap, pairs, sim, T, t1)

    while heap:
        ev = heapq.heappop(heap)
        t, kind, idx = ev[:3]
        if kind == _GENERATE:
            j = ev[4]
            state[idx][1] = j
            for pair in members[idx]:
                pools[pair].deposit(B)
                if tally.inside(t):
                    tally.delivered[pair] += B
                tally.level(pair, t, pools[pair].fill_bits)
            schedule_next(idx)
        else:
            j, start, c = ev[3], ev[4], ev[5]
            pair = pairs[idx]
            _demand_step(tally, pools, pair, t, B)
            nxt = start + (j + 1) * B / c
            if nxt < t1:
                heapq.heappush(heap, (nxt, _DEMAND, idx, j + 1, start, c))

    return tally.report(
        "switched", N, switched_consumption(scenario, model, cfg), sim, pools,
        extra={
            "period_s": T,
            "phases": [
                {"k": p.k, "rate_bps": p.rate_bps, "duration_s": p.duration_s}
                for p in schedule.phases
            ],
        },
    )


def auto_block_bits(rate_bps: float, horizon_s: float, blocks: int = 200, floor: int = 256) -> int:
    """Largest block size giving at least ``blocks`` blocks of ``rate_bps`` over ``horizon_s``."""
    if not rate_bps > 0:
        return floor
    return max(floor, int(math.floor(rate_bps * horizon_s / blocks)))
