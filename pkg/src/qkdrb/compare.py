"""Relative gain of switched over relayed, and (N, Le) sweeps."""
from __future__ import annotations

import csv
import io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

from .errors import DomainError, InfeasibleScheduleError, InputError, OutOfBudgetError
from .relayed import relayed_consumption
from .ring import RingScenario, check_odd_n
from .skr_model import GenerationModel, default_model
from .switched import SwitchedConfig, switched_consumption

CSV_HEADER = ["N", "Le_km", "C_R_bps", "C_S_bps", "f_percent", "tag"]


def relative_gain(Cs: float, Cr: float) -> float:
    """f = 100 (C_S - C_R) / max(C_S, C_R), in [-100, 100]; 0 when both are 0."""
    if not (Cs >= 0 and Cr >= 0):
        raise DomainError(f"consumption rates must be >= 0, got Cs={Cs!r}, Cr={Cr!r}")
    top = max(Cs, Cr)
    if top == 0:
        return 0.0
    return 100.0 * ((Cs - Cr) / top)


@dataclass(frozen=True)
class SweepSpec:
    node_counts: tuple[int, ...]
    link_lengths: tuple[float, ...]
    cfg: SwitchedConfig = field(default_factory=SwitchedConfig)
    model: GenerationModel = field(default_factory=default_model)
    a_c: float = 0.24
    chord_mode: str = "circle"

    def __post_init__(self):
        if not self.node_counts or not self.link_lengths:
            raise InputError("sweep axes must be non-empty")
        bad = [n for n in self.node_counts if not _is_odd_n(n)]
        if bad:
            raise InputError(f"node counts must be odd integers >= 3, got {bad}")
        object.__setattr__(self, "node_counts", tuple(self.node_counts))
        object.__setattr__(self, "link_lengths", tuple(float(x) for x in self.link_lengths))


def _is_odd_n(n) -> bool:
    try:
        check_odd_n(n)
    except InputError:
        return False
    return True


@dataclass(frozen=True)
class SweepCell:
    N: int
    Le: float
    C_R: float
    C_S: float
    f: float
    tag: str = ""


def evaluate_cell(spec: SweepSpec, N: int, Le: float) -> SweepCell:
    scenario = RingScenario(N, Le, spec.a_c, spec.chord_mode)
    cr = relayed_consumption(scenario, spec.model)
    tag = ""
    try:
        cs = switched_consumption(scenario, spec.model, spec.cfg)
    except OutOfBudgetError as exc:
        cs, tag = 0.0, f"out_of_budget_k{exc.hop}"
    except InfeasibleScheduleError:
        cs, tag = 0.0, "infeasible_schedule"
    return SweepCell(N, Le, cr, cs, relative_gain(cs, cr), tag)


def _cell_job(args):
    return evaluate_cell(*args)


def sweep(spec: SweepSpec, workers: int = 1) -> list[SweepCell]:
    """Every (N, Le) cell, ordered by N then Le whatever the evaluation order."""
    grid = [(spec, n, le) for n in spec.node_counts for le in spec.link_lengths]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            cells = list(pool.map(_cell_job, grid))
    else:
        cells = [_cell_job(g) for g in grid]
    return sorted(cells, key=lambda c: (c.N, c.Le))


def grid_csv(cells: Sequence[SweepCell]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for c in cells:
        w.writerow([c.N, repr(c.Le), repr(c.C_R), repr(c.C_S), repr(c.f), c.tag])
    return buf.getvalue()


def _diverging(f: float) -> str:
    # blue (-100) through white (0) to red (+100)
    t = max(-1.0, min(1.0, f / 100.0))
    if t >= 0:
        r, g, b = 255, round(255 * (1 - t)), round(255 * (1 - t))
    else:
        r, g, b = round(255 * (1 + t)), round(255 * (1 + t)), 255
    return f"#{r:02x}{g:02x}{b:02x}"


def grid_svg(cells: Sequence[SweepCell], cell_px: int = 48) -> str:
    """Heatmap of f with N on the vertical axis and Le on the horizontal one."""
    ns = sorted({c.N for c in cells})
    les = sorted({c.Le for c in cells})
    by_key = {(c.N, c.Le): c for c in cells}
    left, top = 60, 30
    width = left + cell_px * len(les) + 20
    height = top + cell_px * len(ns) + 50
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'font-family="sans-serif" font-size="11">',
        f'<text x="{left}" y="18">f (%) switched vs relayed, scale pinned at +/-100</text>',
    ]
    for row, n in enumerate(reversed(ns)):
        y = top + row * cell_px
        out.append(f'<text x="{left - 8}" y="{y + cell_px // 2 + 4}" text-anchor="end">N={n}</text>')
        for col, le in enumerate(les):
            x = left + col * cell_px
            c = by_key.get((n, le))
            if c is None:
                continue
            out.append(
                f'<rect x="{x}" y="{y}" width="{cell_px}" height="{cell_px}" '
                f'fill="{_diverging(c.f)}" stroke="#888"/>'
            )
            out.append(
                f'<text x="{x + cell_px // 2}" y="{y + cell_px // 2 + 4}" '
                f'text-anchor="middle">{c.f:.0f}</text>'
            )
    y = top + cell_px * len(ns) + 16
    for col, le in enumerate(les):
        x = left + col * cell_px + cell_px // 2
        out.append(f'<text x="{x}" y="{y}" text-anchor="middle">{le:g}</text>')
    out.append(f'<text x="{left}" y="{y + 20}">Le (km)</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
