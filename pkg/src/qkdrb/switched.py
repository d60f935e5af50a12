"""TDM k-hop phase schedule and consumption rate of the switched architecture.

Within one period of length T the schedule runs phases k = 1..(N-1)/2. In
phase k every pair k hops apart holds a direct chord link (each node's
Alice and Bob serve the two k-hop neighbours simultaneously); each phase is
followed by a reconfiguration gap of R seconds. Durations are set
inversely proportional to the penalized generation rate so every pair
collects the same key per period.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction

from .errors import InfeasibleScheduleError, InputError, OutOfBudgetError
from .ring import RingScenario, chord_length, hop_attenuation
from .skr_model import GenerationModel, apply_switched_penalties, generation_rate


@dataclass(frozen=True)
class SwitchedConfig:
    """Switch loss O (dB), pairing penalty P (dB), reconfiguration R and period T (s)."""

    O: float = 2.0
    P: float = 2.0
    R: float = 300.0
    T: float = 10800.0

    def __post_init__(self):
        if not self.O >= 0:
            raise InputError(f"switch loss O must be >= 0 dB, got {self.O!r}")
        if not self.R >= 0:
            raise InputError(f"reconfiguration time R must be >= 0 s, got {self.R!r}")
        if not self.T > 0:
            raise InputError(f"period T must be > 0 s, got {self.T!r}")
        if not math.isfinite(self.P):
            raise InputError("pairing penalty P must be finite")

    def overhead(self, N: int) -> float:
        """Total reconfiguration time per period, R (N-1)/2."""
        return self.R * (N - 1) / 2


@dataclass(frozen=True)
class Phase:
    k: int
    chord_km: float
    attenuation_db: float
    rate_bps: float
    duration_s: float


@dataclass(frozen=True)
class Schedule:
    phases: tuple[Phase, ...]
    period_s: float
    reconfig_s: float

    def with_durations(self, durations) -> "Schedule":
        durations = list(durations)
        if len(durations) != len(self.phases):
            raise InputError("one duration per phase is required")
        phases = tuple(
            Phase(p.k, p.chord_km, p.attenuation_db, p.rate_bps, float(d))
            for p, d in zip(self.phases, durations)
        )
        return Schedule(phases, self.period_s, self.reconfig_s)

    def phase_starts(self) -> list[float]:
        """Offset of each phase within the period (each phase is followed by R)."""
        starts, t = [], 0.0
        for p in self.phases:
            starts.append(t)
            t += p.duration_s + self.reconfig_s
        return starts


def penalized_hop_rates(
    scenario: RingScenario, model: GenerationModel, cfg: SwitchedConfig
) -> list[tuple[int, float, float, float]]:
    """(k, chord_km, A^k, G'(A^k)) for k = 1..(N-1)/2, with G' = G(A + O) 10^(-P/10)."""
    penalized = apply_switched_penalties(model, cfg.O, cfg.P)
    out = []
    for k in range(1, scenario.max_hop + 1):
        att = hop_attenuation(scenario, k)
        out.append((k, chord_length(scenario, k), att, generation_rate(penalized, att)))
    return out


def _checked_rates(scenario, model, cfg):
    overhead = cfg.overhead(scenario.N)
    if overhead >= cfg.T:
        raise InfeasibleScheduleError(overhead, cfg.T)
    hops = penalized_hop_rates(scenario, model, cfg)
    for k, _, att, g in hops:
        if g <= 0:
            raise OutOfBudgetError(k, att + cfg.O)
    return hops


def build_schedule(
    scenario: RingScenario, model: GenerationModel, cfg: SwitchedConfig
) -> Schedule:
    """Rate-equalizing schedule: D^k proportional to 1/G'(A^k), filling the period."""
    hops = _checked_rates(scenario, model, cfg)
    generation_time = cfg.T - cfg.overhead(scenario.N)
    inv_sum = math.fsum(1.0 / g for *_, g in hops)
    alpha = generation_time / inv_sum
    phases = tuple(Phase(k, c, a, g, alpha / g) for k, c, a, g in hops)
    return Schedule(phases, cfg.T, cfg.R)


def _exact_inverse_sum(hops) -> Fraction:
    return sum((1 / Fraction(g) for *_, g in hops), Fraction(0))


def switched_consumption(
    scenario: RingScenario, model: GenerationModel, cfg: SwitchedConfig
) -> float:
    """C_S = (1 - R (N-1) / (2T)) / sum_k 1/G'(A^k), in bits/s.

    Evaluated in exact rationals over the float inputs: with the 1-bit
    normalization the overhead dwarfs sum 1/G' and float cancellation would
    lose most digits.
    """
    hops = _checked_rates(scenario, model, cfg)
    T = Fraction(cfg.T)
    duty = (T - Fraction(cfg.R) * (scenario.N - 1) / 2) / T
    return float(duty / _exact_inverse_sum(hops))


def natural_period(
    scenario: RingScenario, model: GenerationModel, cfg: SwitchedConfig
) -> Fraction:
    """Exact period of the 1-bit normalized schedule, R (N-1)/2 + sum_k 1 bit / G'(A^k)."""
    hops = penalized_hop_rates(scenario, model, cfg)
    for k, _, att, g in hops:
        if g <= 0:
            raise OutOfBudgetError(k, att + cfg.O)
    return Fraction(cfg.R) * (scenario.N - 1) / 2 + _exact_inverse_sum(hops)


def switched_consumption_unit_bit(
    scenario: RingScenario, model: GenerationModel, cfg: SwitchedConfig
) -> float:
    """The 1-bit normalized form, 1 bit / (R (N-1)/2 + sum_k 1/G'(A^k)).

    Ignores ``cfg.T``: the period is implied by giving each phase exactly
    one bit of key.
    """
    return float(1 / natural_period(scenario, model, cfg))


def schedule_min_rate(schedule: Schedule) -> float:
    """Bottleneck consumption rate min_k D^k G'(A^k) / T of any duration vector."""
    if not schedule.phases:
        raise InputError("schedule has no phases")
    total = math.fsum(p.duration_s for p in schedule.phases)
    total += schedule.reconfig_s * len(schedule.phases)
    if any(not p.duration_s > 0 for p in schedule.phases):
        raise InputError("all phase durations must be positive")
    if abs(total - schedule.period_s) > 1e-9 * schedule.period_s:
        raise InputError(
            f"durations plus reconfiguration sum to {total!r} s, period is {schedule.period_s!r} s"
        )
    return min(p.duration_s * p.rate_bps / schedule.period_s for p in schedule.phases)


def optimize_durations_oracle(
    scenario: RingScenario,
    model: GenerationModel,
    cfg: SwitchedConfig,
    iterations: int = 10_000,
    seed: int = 0,
    restarts: int = 4,
) -> tuple[list[float], float]:
    """Numeric max-min search over duration vectors, blind to the closed form.

    Random restarts on the simplex of durations summing to the generation
    time, each followed by a pairwise coordinate search: pick two phases
    (the current bottleneck with probability 1/2) and move time between
    them to the best split along that line. The objective is only ever
    evaluated through per-phase rates D G' / T.
    """
    hops = _checked_rates(scenario, model, cfg)
    rates = [g for *_, g in hops]
    m = len(rates)
    budget = cfg.T - cfg.overhead(scenario.N)
    rng = random.Random(seed)

    def phase_rates(d):
        return [di * gi / cfg.T for di, gi in zip(d, rates)]

    best_d, best = None, -math.inf
    per_restart = max(1, iterations // max(1, restarts))
    for _ in range(max(1, restarts)):
        w = [rng.expovariate(1.0) for _ in range(m)]
        s = math.fsum(w)
        d = [budget * wi / s for wi in w]
        if m > 1:
            for _ in range(per_restart):
                r = phase_rates(d)
                if rng.random() < 0.5:
                    i = min(range(m), key=r.__getitem__)
                    j = rng.randrange(m - 1)
                    j += j >= i
                else:
                    i, j = rng.sample(range(m), 2)
                d[i], d[j] = _best_split(d[i] + d[j], rates[i], rates[j])
        s = math.fsum(d)
        d = [di * budget / s for di in d]
        value = min(phase_rates(d))
        if value > best:
            best, best_d = value, list(d)
    return best_d, best


def _best_split(total, gi, gj, steps=80):
    # rate_i - rate_j is increasing in the time given to i; bisect its sign change
    lo, hi = 0.0, total
    for _ in range(steps):
        mid = 0.5 * (lo + hi)
        if mid * gi < (total - mid) * gj:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-15 * total:
            break
    x = 0.5 * (lo + hi)
    return x, total - x
