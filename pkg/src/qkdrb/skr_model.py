"""Secret-key-rate generation models G(A), in bits/s versus attenuation in dB.

Two families are supported: the asymptotic decoy-state BB84 rate (weak +
vacuum decoy, GLLP-style bound) and piecewise log-linear tables built from
measured points. Both are wrapped in a :class:`GenerationModel` that applies
receiver saturation as attenuation clamping, plus the attenuation offset and
output scaling used for the switched architecture.
"""
from __future__ import annotations

import bisect
import csv
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Sequence

from .errors import DomainError, InputError


def binary_entropy(x: float) -> float:
    """Shannon binary entropy H2(x) in bits, with H2(0) = H2(1) = 0."""
    if not 0.0 <= x <= 1.0 or math.isnan(x):
        raise DomainError(f"binary entropy needs 0 <= x <= 1, got {x!r}")
    if x == 0.0 or x == 1.0:
        return 0.0
    return -x * math.log2(x) - (1.0 - x) * math.log2(1.0 - x)


@dataclass(frozen=True)
class DecoyParams:
    """Transmitter/receiver parameters of the decoy-state BB84 rate.

    The defaults approximate a GHz-clocked phase-encoded decoy system. They
    are a calibration, not measured data: ``detector_efficiency`` lumps the
    receiver's internal transmittance and detection efficiency and is tuned
    with ``mu`` so that G(6 dB) sits in the few-hundred-kbit/s decade.
    """

    clock_rate: float = 1e9
    mu: float = 0.45
    detector_efficiency: float = 0.05
    dark_count_yield: float = 1.7e-6
    misalignment_error: float = 0.033
    error_correction_inefficiency: float = 1.16
    sifting_factor: float = 0.5

    def __post_init__(self):
        if not self.clock_rate > 0:
            raise InputError("clock_rate must be > 0")
        if not self.mu > 0:
            raise InputError("mu must be > 0")
        for name in ("detector_efficiency", "dark_count_yield", "misalignment_error"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise InputError(f"{name} must be a probability, got {v!r}")
        if not 0.0 < self.sifting_factor <= 1.0:
            raise InputError("sifting_factor must lie in (0, 1]")
        if not self.error_correction_inefficiency >= 1.0:
            raise InputError("error_correction_inefficiency must be >= 1")


def decoy_skr(params: DecoyParams, attenuation_db: float) -> float:
    """Asymptotic decoy-state BB84 secret key rate in bits/s.

    Negative per-pulse rates are the natural link-budget cutoff and map to 0.
    """
    if not attenuation_db >= 0:
        raise DomainError(f"attenuation must be >= 0 dB, got {attenuation_db!r}")
    p = params
    y0 = p.dark_count_yield
    eta = p.detector_efficiency * 10.0 ** (-attenuation_db / 10.0)
    detected = 1.0 - math.exp(-p.mu * eta)
    gain = y0 + detected
    qber = (0.5 * y0 + p.misalignment_error * detected) / gain
    y1 = y0 + eta - y0 * eta
    q1 = y1 * p.mu * math.exp(-p.mu)
    e1 = min((0.5 * y0 + p.misalignment_error * eta) / y1, 0.5)
    r = p.sifting_factor * (
        q1 * (1.0 - binary_entropy(e1))
        - p.error_correction_inefficiency * gain * binary_entropy(min(qber, 0.5))
    )
    return p.clock_rate * max(0.0, r)


@dataclass(frozen=True)
class SaturationClamp:
    """Receiver saturation: the received power may not exceed ``max_rx_power_dbm``.

    Any attenuation below ``tx_power_dbm - max_rx_power_dbm`` is topped up
    with a virtual attenuator, which flattens G(A) at low loss.
    """

    tx_power_dbm: float = 0.0
    max_rx_power_dbm: float = -6.0

    def __post_init__(self):
        if self.sat_attenuation_db < 0:
            raise InputError(
                "max_rx_power_dbm above tx_power_dbm gives a negative saturation attenuation"
            )

    @property
    def sat_attenuation_db(self) -> float:
        return self.tx_power_dbm - self.max_rx_power_dbm

    def flat_region_km(self, a_c: float) -> float:
        """Length K of the flat region for attenuation coefficient ``a_c`` (dB/km)."""
        return self.sat_attenuation_db / a_c


NO_CLAMP = SaturationClamp(0.0, 0.0)


@dataclass(frozen=True)
class GenerationModel:
    """An SKR generation function G(A).

    ``kind`` is ``"parametric"`` (``params`` set) or ``"table"`` (``points``
    set). ``attenuation_offset_db`` and ``output_scale`` carry the switched
    architecture's optical loss and pairing penalty so penalized and raw
    models share one evaluation path.
    """

    kind: str
    params: DecoyParams | None = None
    points: tuple[tuple[float, float], ...] | None = None
    clamp: SaturationClamp = field(default_factory=SaturationClamp)
    output_scale: float = 1.0
    attenuation_offset_db: float = 0.0

    def __post_init__(self):
        if self.kind == "parametric":
            if self.params is None:
                raise InputError("parametric model needs DecoyParams")
        elif self.kind == "table":
            _check_points(self.points)
        else:
            raise InputError(f"unknown model kind {self.kind!r}")
        if not self.output_scale >= 0:
            raise InputError("output_scale must be >= 0")
        if not self.attenuation_offset_db >= 0:
            raise InputError("attenuation offset must be >= 0 dB")

    def __call__(self, attenuation_db: float) -> float:
        return generation_rate(self, attenuation_db)

    def base_rate(self, attenuation_db: float) -> float:
        """Unclamped, unscaled rate of the underlying model."""
        if self.kind == "parametric":
            return decoy_skr(self.params, attenuation_db)
        return _table_rate(self.points, attenuation_db)


def default_model(clamp: SaturationClamp | None = None) -> GenerationModel:
    """Calibrated decoy-state model with the reference -6 dBm receiver limit."""
    return GenerationModel(
        "parametric", params=DecoyParams(), clamp=clamp or SaturationClamp()
    )


def generation_rate(model: GenerationModel, attenuation_db: float) -> float:
    """G(A) in bits/s, after clamping, offset and output scaling."""
    if not attenuation_db >= 0:
        raise DomainError(f"attenuation must be >= 0 dB, got {attenuation_db!r}")
    a_eff = max(attenuation_db + model.attenuation_offset_db, model.clamp.sat_attenuation_db)
    return model.base_rate(a_eff) * model.output_scale


def apply_switched_penalties(model: GenerationModel, O: float, P: float) -> GenerationModel:
    """Return a model evaluating to ``G(A + O) * 10**(-P/10)``.

    ``O`` is the optical switch loss in dB and ``P`` the pairing penalty in
    dB; a negative ``P`` models an unmatched pair that outperforms the
    matched one.
    """
    if not O >= 0:
        raise DomainError(f"switch loss O must be >= 0 dB, got {O!r}")
    return replace(
        model,
        attenuation_offset_db=model.attenuation_offset_db + O,
        output_scale=model.output_scale * 10.0 ** (-P / 10.0),
    )


def pairing_penalty_db(skr_matched: float, skr_unmatched: float) -> float:
    """Penalty P in dB of an unmatched pair relative to its matched baseline."""
    if not (skr_matched > 0 and skr_unmatched > 0):
        raise DomainError("pairing penalty needs two positive key rates")
    return -10.0 * math.log10(skr_unmatched / skr_matched)


def _check_points(points) -> None:
    if points is None or len(points) < 2:
        raise InputError("a table model needs at least 2 points")
    atts = [a for a, _ in points]
    if any(b <= a for a, b in zip(atts, atts[1:])):
        raise InputError("table attenuations must be strictly increasing")
    if any(a < 0 for a in atts):
        raise InputError("table attenuations must be >= 0 dB")
    if any(not r >= 0 for _, r in points):
        raise InputError("table key rates must be >= 0")


def _table_rate(points: Sequence[tuple[float, float]], attenuation_db: float) -> float:
    atts = [a for a, _ in points]
    if attenuation_db <= atts[0]:
        return points[0][1]
    if attenuation_db > atts[-1]:
        return 0.0
    i = bisect.bisect_left(atts, attenuation_db)
    a1, r1 = points[i]
    if attenuation_db == a1:
        return r1
    a0, r0 = points[i - 1]
    t = (attenuation_db - a0) / (a1 - a0)
    if r0 > 0 and r1 > 0:
        return r0 * (r1 / r0) ** t
    # log-linear is undefined through a zero knot
    return r0 + (r1 - r0) * t


def fit_table_model(
    points: Iterable[tuple[float, float]], clamp: SaturationClamp = NO_CLAMP
) -> GenerationModel:
    """Build a table model, log-linear in SKR between measured points."""
    pts = tuple((float(a), float(r)) for a, r in points)
    return GenerationModel("table", points=pts, clamp=clamp)


def load_table_csv(path: str | Path, clamp: SaturationClamp = NO_CLAMP) -> GenerationModel:
    """Read an ``attenuation_db,skr_bps`` CSV (with header) into a table model."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["attenuation_db", "skr_bps"]:
            raise InputError(f"{path}: expected header 'attenuation_db,skr_bps'")
        pts = []
        for lineno, row in enumerate(reader, start=2):
            if not row or not "".join(row).strip():
                continue
            if len(row) != 2:
                raise InputError(f"{path}:{lineno}: expected two columns")
            try:
                pts.append((float(row[0]), float(row[1])))
            except ValueError as exc:
                raise InputError(f"{path}:{lineno}: {exc}") from None
    return fit_table_model(pts, clamp)


def budget_limit_db(model: GenerationModel, hi: float = 200.0, tol: float = 1e-9) -> float:
    """Smallest attenuation beyond which the model yields exactly zero key.

    Bisection on the zero crossing; returns ``inf`` if the model is still
    positive at ``hi``.
    """
    if generation_rate(model, hi) > 0:
        return math.inf
    lo = 0.0
    if generation_rate(model, lo) == 0:
        return 0.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if generation_rate(model, mid) > 0:
            lo = mid
        else:
            hi = mid
    return hi
