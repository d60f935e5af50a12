"""Command-line front end.

Exit codes: 0 success, 1 usage or input error, 2 key starvation in
``simulate``.
"""
from __future__ import annotations

import argparse
import dataclasses
import math
import sys
from pathlib import Path

from . import __version__
from .compare import SweepSpec, grid_csv, grid_svg, sweep
from .config import ToolConfig, load_config, parse_duration
from .errors import QKDRBError
from .kms_sim import SimConfig, auto_block_bits, run_relayed_sim, run_switched_sim
from .relayed import relayed_consumption
from .skr_model import generation_rate
from .switched import build_schedule, switched_consumption

EXIT_OK, EXIT_USAGE, EXIT_STARVED = 0, 1, 2

REFERENCE_NODES = "5,9,13,17,21,25"
REFERENCE_LE = "1,2.5,5,7.5,10,15,20,25,30,35"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_values(text: str, kind=float) -> list:
    """``"1,2.5,5"`` or an inclusive range ``"start:stop:step"``."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise UsageError(f"range must be start:stop:step, got {text!r}")
        start, stop, step = (kind(p) for p in parts)
        if not step > 0 or stop < start:
            raise UsageError(f"bad range {text!r}")
        n = int(math.floor((stop - start) / step + 1e-9)) + 1
        return [kind(start + i * step) for i in range(n)]
    try:
        return [kind(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"cannot parse values {text!r}") from None


def _odd_nodes(text: str) -> list[int]:
    try:
        nodes = parse_values(text, int)
    except ValueError:
        raise UsageError(f"node counts must be integers: {text!r}") from None
    bad = [n for n in nodes if n < 3 or n % 2 == 0]
    if bad:
        raise UsageError(f"node counts must be odd and >= 3; offending values: {bad}")
    if not nodes:
        raise UsageError("no node counts given")
    return nodes


def _apply_overrides(cfg: ToolConfig, args) -> ToolConfig:
    sw, model, scen = cfg.switched, cfg.model, cfg.scenario
    if args.switch_loss_db is not None:
        sw = dataclasses.replace(sw, O_db=args.switch_loss_db)
    if args.penalty_db is not None:
        sw = dataclasses.replace(sw, P_db=args.penalty_db)
    if args.reconfig is not None:
        sw = dataclasses.replace(sw, R_seconds=parse_duration(args.reconfig))
    if args.period is not None:
        sw = dataclasses.replace(sw, T_seconds=parse_duration(args.period))
    if args.ra_dbm is not None:
        model = dataclasses.replace(model, R_A_dbm=args.ra_dbm)
    if args.chord_mode is not None:
        scen = dataclasses.replace(scen, chord_mode=args.chord_mode)
    if args.ac is not None:
        scen = dataclasses.replace(scen, a_c=args.ac)
    return dataclasses.replace(cfg, switched=sw, model=model, scenario=scen).validate()


def _write(path: str, text: str) -> None:
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc.strerror}") from None


def cmd_skr_curve(args) -> int:
    if not args.step_db > 0:
        raise UsageError("--step-db must be > 0")
    if args.to_db < args.from_db or args.from_db < 0:
        raise UsageError("need 0 <= --from-db <= --to-db")
    model = load_config(args.config).generation_model()
    n = int(math.floor((args.to_db - args.from_db) / args.step_db + 1e-9)) + 1
    lines = ["attenuation_db,skr_bps"]
    for i in range(n):
        a = args.from_db + i * args.step_db
        lines.append(f"{a!r},{generation_rate(model, a)!r}")
    _write(args.out, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_compare_grid(args) -> int:
    nodes = _odd_nodes(args.nodes)
    les = parse_values(args.le, float)
    if not les or any(not le > 0 for le in les):
        raise UsageError("--le values must be positive")
    cfg = _apply_overrides(load_config(args.config), args)
    spec = SweepSpec(
        tuple(nodes), tuple(les), cfg.switched.config(), cfg.generation_model(),
        cfg.scenario.a_c, cfg.scenario.chord_mode,
    )
    cells = sweep(spec, workers=args.workers)
    text = grid_csv(cells)
    if args.out:
        _write(args.out, text)
    else:
        sys.stdout.write(text)
    if args.svg:
        _write(args.svg, grid_svg(cells))
    return EXIT_OK


def cmd_schedule_show(args) -> int:
    cfg = _apply_overrides(load_config(args.config), args)
    scenario = cfg.scenario.scenario(args.nodes, args.le)
    schedule = build_schedule(scenario, cfg.generation_model(), cfg.switched.config())
    lines = ["k,chord_km,attenuation_db,rate_bps,duration_s"]
    for p in schedule.phases:
        lines.append(f"{p.k},{p.chord_km!r},{p.attenuation_db!r},{p.rate_bps!r},{p.duration_s!r}")
    sys.stdout.write("\n".join(lines) + "\n")
    return EXIT_OK


def simulation_inputs(cfg: ToolConfig, arch: str):
    """Scenario, model and the effective SimConfig for ``simulate``."""
    s = cfg.sim
    scenario = cfg.scenario.scenario(s.nodes, s.le_km)
    model = cfg.generation_model()
    sw = cfg.switched.config()
    if arch == "relayed":
        analytic = relayed_consumption(scenario, model)
        block = 256 if s.block_bits == "auto" else s.block_bits
        measure = max(1.0, 400 * block / analytic) if analytic > 0 else 1.0
        warmup = 0.1 * measure
    else:
        analytic = switched_consumption(scenario, model, sw)
        block = auto_block_bits(analytic, sw.T) if s.block_bits == "auto" else s.block_bits
        warmup, measure = 2 * sw.T, 30 * sw.T
    if s.warmup != "auto":
        warmup = parse_duration(s.warmup)
    if s.measure != "auto":
        measure = parse_duration(s.measure)
    demand = s.consumption_bps if s.consumption_bps is not None else s.load_factor * analytic
    sim = SimConfig(block, warmup, measure, demand, s.seed)
    return scenario, model, sw, sim


def cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    scenario, model, sw, sim = simulation_inputs(cfg, args.arch)
    if args.arch == "relayed":
        report = run_relayed_sim(scenario, model, sim)
    else:
        report = run_switched_sim(scenario, model, sw, sim)
    out = Path(args.out)
    csv_path = args.csv or str(out.with_suffix(".csv"))
    _write(str(out), report.to_json())
    _write(csv_path, report.to_csv())
    if report.starved:
        print(
            f"starvation: {report.starvation_events} events after warmup "
            f"(demand {sim.demand(report.pairs[0].pair):.6g} bps, analytic {report.analytic_bps:.6g} bps)",
            file=sys.stderr,
        )
        return EXIT_STARVED
    return EXIT_OK


def cmd_config_dump(args) -> int:
    text = load_config(args.config).dumps()
    if args.out:
        _write(args.out, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _add_overrides(p):
    p.add_argument("--switch-loss-db", type=float, help="switch optical loss O (dB)")
    p.add_argument("--penalty-db", type=float, help="pairing penalty P (dB)")
    p.add_argument("--reconfig", help="reconfiguration time R, e.g. 5min or 300s")
    p.add_argument("--period", help="period T, e.g. 180min")
    p.add_argument("--ra-dbm", type=float, help="maximum received power R_A (dBm)")
    p.add_argument("--chord-mode", choices=["circle", "arc"])
    p.add_argument("--ac", type=float, help="attenuation coefficient (dB/km)")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help=f"JSON config (default: ${'QKDRB_CONFIG'} or built-in reference)")

    parser = _Parser(prog="qkdrb", description="Relayed vs switched QKD ring evaluation")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser, required=True)

    p = sub.add_parser("skr-curve", parents=[common], help="sample G(A) to CSV")
    p.add_argument("--from-db", type=float, default=0.0)
    p.add_argument("--to-db", type=float, default=30.0)
    p.add_argument("--step-db", type=float, default=0.5)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_skr_curve)

    p = sub.add_parser("compare-grid", parents=[common], help="(N, Le) sweep of f")
    p.add_argument("--nodes", default=REFERENCE_NODES)
    p.add_argument("--le", default=REFERENCE_LE)
    _add_overrides(p)
    p.add_argument("--out", help="CSV path (default: stdout)")
    p.add_argument("--svg", help="optional heatmap path")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_compare_grid)

    p = sub.add_parser("schedule", help="switched schedule tools")
    ssub = p.add_subparsers(dest="schedule_command", parser_class=_Parser, required=True)
    p = ssub.add_parser("show", parents=[common], help="dump the k-hop phases as CSV")
    p.add_argument("--nodes", type=int, required=True)
    p.add_argument("--le", type=float, required=True)
    _add_overrides(p)
    p.set_defaults(func=cmd_schedule_show)

    p = sub.add_parser("simulate", parents=[common], help="run the KMS simulator")
    p.add_argument("--arch", choices=["relayed", "switched"], required=True)
    p.add_argument("--out", required=True, help="JSON report path")
    p.add_argument("--csv", help="per-pair CSV path (default: report path with .csv)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("config", help="configuration tools")
    csub = p.add_subparsers(dest="config_command", parser_class=_Parser, required=True)
    p = csub.add_parser("dump", parents=[common], help="print the effective config")
    p.add_argument("--out")
    p.set_defaults(func=cmd_config_dump)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, QKDRBError) as exc:
        print(f"qkdrb: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
