"""Max-min consumption rate of the trusted-relay architecture on a ring."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .ring import (
    RingScenario,
    adjacent_links,
    all_pairs,
    crossing_paths_per_link,
    enumerate_crossing_paths,
)
from .skr_model import GenerationModel, generation_rate

Link = tuple[int, int]
Pair = tuple[int, int]


def relayed_consumption(scenario: RingScenario, model: GenerationModel) -> float:
    """C_R = 8 G(A^e) / (N^2 - 1) in bits/s.

    Only adjacent links generate key, so the switched-architecture penalties
    never enter here; pass the raw model.
    """
    g = generation_rate(model, scenario.adjacent_attenuation_db)
    return 8.0 * g / (scenario.N**2 - 1)


@dataclass(frozen=True)
class RelayAllocation:
    """Per-link key contributions and the resulting end-to-end pair rates.

    Rates are exact rationals over the model's evaluated link rate.
    """

    link_rate: Fraction
    per_link_contributions: dict[tuple[Link, Pair], Fraction]
    per_pair_rate: dict[Pair, Fraction]

    @property
    def min_pair_rate(self) -> Fraction:
        return min(self.per_pair_rate.values())

    def link_load(self, link: Link) -> Fraction:
        return sum(
            (c for (lk, _), c in self.per_link_contributions.items() if lk == link),
            Fraction(0),
        )


def relayed_oracle(scenario: RingScenario, model: GenerationModel) -> RelayAllocation:
    """Equal key splitting over explicitly enumerated shortest relay paths."""
    N = scenario.N
    g = Fraction(generation_rate(model, scenario.adjacent_attenuation_db))
    contributions: dict[tuple[Link, Pair], Fraction] = {}
    links_of: dict[Pair, list[Link]] = {p: [] for p in all_pairs(N)}
    for link in adjacent_links(N):
        crossing = enumerate_crossing_paths(N, link)
        share = g / len(crossing)
        for pair in crossing:
            contributions[(link, pair)] = share
            links_of[pair].append(link)
    per_pair = {
        pair: min(contributions[(link, pair)] for link in links)
        for pair, links in links_of.items()
    }
    return RelayAllocation(g, contributions, per_pair)


def relayed_consumption_exact(scenario: RingScenario, model: GenerationModel) -> Fraction:
    """Closed form evaluated in rationals, for exact oracle comparison."""
    g = Fraction(generation_rate(model, scenario.adjacent_attenuation_db))
    return g / crossing_paths_per_link(scenario.N)
