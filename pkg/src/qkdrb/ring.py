"""Uniform ring geometry and shortest-path combinatorics.

Nodes are numbered 1..N. For odd N every unordered node pair has a unique
shortest path, so a pair is written in its canonical travel direction
``(s, d)`` with ``d = s + k (mod N)`` and ``1 <= k <= (N-1)/2``. Adjacent
links are written ``(i, i+1)``, the last one being ``(N, 1)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InputError

CHORD_MODES = ("circle", "arc")


def check_odd_n(N) -> int:
    if isinstance(N, bool) or not isinstance(N, int) or N < 3 or N % 2 == 0:
        raise InputError(f"ring size must be an odd integer >= 3, got {N!r}")
    return N


@dataclass(frozen=True)
class RingScenario:
    N: int
    Le: float
    a_c: float = 0.24
    chord_mode: str = "circle"

    def __post_init__(self):
        check_odd_n(self.N)
        if not self.Le > 0:
            raise InputError(f"adjacent link length must be > 0 km, got {self.Le!r}")
        # a_c = 0 is allowed as a degenerate lossless fiber
        if not self.a_c >= 0:
            raise InputError(f"attenuation coefficient must be >= 0, got {self.a_c!r}")
        if self.chord_mode not in CHORD_MODES:
            raise InputError(f"chord_mode must be one of {CHORD_MODES}, got {self.chord_mode!r}")

    @property
    def max_hop(self) -> int:
        return (self.N - 1) // 2

    @property
    def adjacent_attenuation_db(self) -> float:
        """A^e = a_c * Le, the attenuation of an adjacent (relayed) link."""
        return self.a_c * self.Le


def chord_length(scenario: RingScenario, k: int) -> float:
    """Fiber distance in km between nodes ``k`` hops apart."""
    N = scenario.N
    if not 1 <= k <= N - 1:
        raise InputError(f"hop count must satisfy 1 <= k <= {N - 1}, got {k!r}")
    if scenario.chord_mode == "circle":
        return (N * scenario.Le / math.pi) * math.sin(math.pi * k / N)
    return min(k, N - k) * scenario.Le


def hop_attenuation(scenario: RingScenario, k: int) -> float:
    """A^k = a_c * chord(k), the attenuation of a direct k-hop link in dB."""
    if not 1 <= k <= scenario.max_hop:
        raise InputError(f"hop count must satisfy 1 <= k <= {scenario.max_hop}, got {k!r}")
    return scenario.a_c * chord_length(scenario, k)


def crossing_paths_per_link(N: int) -> int:
    """Number of SAE pairs whose shortest path crosses any one adjacent link."""
    check_odd_n(N)
    return (N * N - 1) // 8


def hop_distance(N: int, s: int, d: int) -> int:
    k = (d - s) % N
    return min(k, N - k)


def canonical_pair(N: int, s: int, d: int) -> tuple[int, int]:
    """Orient an unordered pair along its shortest path."""
    if s == d:
        raise InputError("a pair needs two distinct nodes")
    if (d - s) % N <= (N - 1) // 2:
        return (s, d)
    return (d, s)


def all_pairs(N: int) -> list[tuple[int, int]]:
    """All N(N-1)/2 pairs in canonical orientation, sorted lexicographically."""
    check_odd_n(N)
    pairs = [
        (s, (s + k - 1) % N + 1) for s in range(1, N + 1) for k in range(1, (N - 1) // 2 + 1)
    ]
    return sorted(pairs)


def adjacent_links(N: int) -> list[tuple[int, int]]:
    check_odd_n(N)
    return [(i, i % N + 1) for i in range(1, N + 1)]


def path_links(N: int, pair: tuple[int, int]) -> list[tuple[int, int]]:
    """Adjacent links along the shortest path of a canonical pair, in order."""
    s, d = pair
    k = (d - s) % N
    return [((s + j - 1) % N + 1, (s + j) % N + 1) for j in range(k)]


def enumerate_crossing_paths(N: int, link: tuple[int, int]) -> list[tuple[int, int]]:
    """Every pair whose shortest path traverses ``link``, found by brute force.

    Checks each of the N(N-1)/2 shortest paths for the link; independent of
    the closed-form count in :func:`crossing_paths_per_link`.
    """
    check_odd_n(N)
    a, b = link
    if not (1 <= a <= N and 1 <= b <= N) or hop_distance(N, a, b) != 1:
        raise InputError(f"{link!r} is not an adjacent link of a {N}-node ring")
    # the link's start node when traversed in increasing-index direction
    start = a if b == a % N + 1 else b
    found = []
    for s in range(1, N + 1):
        for k in range(1, (N - 1) // 2 + 1):
            # the path from s covers links starting at s, s+1, ..., s+k-1
            if (start - s) % N < k:
                found.append((s, (s + k - 1) % N + 1))
    return sorted(found)
