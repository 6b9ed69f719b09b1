"""
Command-line front end.

Exit codes: 0 when the run is proven stable, 2 when synchronism is lost (or not
proven within the horizon), 1 on errors.
"""

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path
from typing import List, Optional, Tuple

import numpy as np

from .config import ScenarioConfig, dump_preset, load_scenario
from .control import Variant
from .errors import AlwaysStable, NeverStable, ParameterError, SyncArenaError, UsageError
from .export import (
    ensure_dir,
    format_number,
    write_basin_csv,
    write_roa_csv,
    write_summary,
    write_sweep_csv,
    write_trajectory_csv,
)
from .integrate import StepConfig, simulate_swing
from .lyapunov import EnergyKind, energy_function, swing_equilibria
from .models import SwingState
from .plant import Plant
from .scenario import (
    PRESET_NAMES,
    SWEEP_COLUMNS,
    Preset,
    ScenarioSpec,
    SweepSpec,
    analogy_report,
    fault_scenario,
    fault_windows,
    get_preset,
    parse_axis,
    preset_rows,
    run_scenario,
    sweep,
    variant_params,
)
from .settings import get_dt, get_jobs, get_out_dir
from .stability import (
    BasinGrid,
    basin_oracle,
    classify_block,
    critical_clearing,
    eac_gfl,
    eac_gfm,
    estimate_roa,
    roa_basin_grid,
)

logger = logging.getLogger("syncarena.cli")

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_UNSTABLE = 2

VARIANT_NAMES = [v.value for v in Variant]

# Clearing times of the canned ride-through timelines
GFL_CLEAR_TIME = 3.0
GFM_CLEAR_TIME = 2.4

BASIN_DT = 1e-3


def _emit(values) -> None:
    for key, value in values.items():
        print(f"{key}={format_number(value)}")


def _out_dir(args) -> Path:
    return ensure_dir(args.out if args.out else get_out_dir())


def _step_defaults(args) -> StepConfig:
    return StepConfig(dt=args.dt if args.dt is not None else get_dt(),
                      t_end=args.t_end if args.t_end is not None else 5.0)


def _load(args) -> ScenarioConfig:
    """Scenario of a command: the config file if given, else a preset timeline."""
    if args.config:
        loaded = load_scenario(args.config, defaults=_step_defaults(args),
                               variant=getattr(args, "variant", None))
        spec = loaded.scenario
        cfg_changes = {}
        if args.dt is not None:
            cfg_changes["dt"] = args.dt
        if args.t_end is not None:
            cfg_changes["t_end"] = args.t_end
        if cfg_changes:
            spec = replace(spec, cfg=replace(spec.cfg, **cfg_changes))
        return replace(loaded, scenario=spec)

    preset = get_preset(args.preset or "table2")
    variant = Variant.parse(getattr(args, "variant", None) or preset.default_variant)
    cfg = _step_defaults(args)
    if getattr(args, "steady", False):
        spec = ScenarioSpec(name=f"{preset.name}:{variant.value}:steady", variant=variant,
                            params=variant_params(preset, variant), cfg=cfg)
    else:
        t_clear = args.t_clear
        if t_clear is None:
            t_clear = GFL_CLEAR_TIME if variant.is_gfl else GFM_CLEAR_TIME
        spec = fault_scenario(preset, variant, depth=args.depth, t_fault=args.t_fault,
                              t_clear=min(t_clear, cfg.t_end), t_end=cfg.t_end, dt=cfg.dt,
                              kind=args.kind)
    return ScenarioConfig(scenario=spec, preset=preset, base=preset.base)


def _preset_and_variant(args) -> Tuple[Preset, Variant]:
    if args.config:
        loaded = _load(args)
        return loaded.preset, loaded.scenario.variant
    preset = get_preset(args.preset or "table2")
    return preset, Variant.parse(args.variant or preset.default_variant)


def _swing_or_fail(plant: Plant, params, what: str):
    sw = plant.equivalent_swing(params)
    if sw is None:
        raise ParameterError(f"{plant.variant.value} has no second-order swing form for the {what}")
    return sw


def cmd_sim(args) -> int:
    """Run a scenario, write its trajectory and verdict summary."""
    spec = _load(args).scenario
    result = run_scenario(spec)
    out = _out_dir(args)
    stem = spec.variant.value
    write_trajectory_csv(result.trajectory, out / f"trajectory-{stem}.csv")

    code = EXIT_OK if result.stable else EXIT_UNSTABLE
    values = {
        "scenario": spec.name,
        "variant": stem,
        "dt": spec.cfg.dt,
        "t_end": spec.cfg.t_end,
        "samples": len(result.trajectory),
        "overall": result.overall.kind.value,
        "overall_t": result.overall.t,
    }
    for i, window in enumerate(result.windows):
        values[f"window{i}_start"] = window.t_start
        values[f"window{i}_stop"] = window.t_stop
        values[f"window{i}_verdict"] = window.verdict.kind.value
        values[f"window{i}_t"] = window.verdict.t
    values["lost_sync"] = result.lost_sync
    values["exit_code"] = code
    write_summary(values, out / f"summary-{stem}.txt")
    _emit(values)
    return code


def cmd_eac(args) -> int:
    """Equal-area test of the scenario's fault; GFM runs also report the critical clearing."""
    spec = _load(args).scenario
    plant = Plant(spec.variant)
    start, fault_params, post_params = fault_windows(spec)
    pre_sw = _swing_or_fail(plant, start, "pre-fault window")
    fault_sw = _swing_or_fail(plant, fault_params, "fault window")
    values = {"scenario": spec.name, "variant": spec.variant.value}

    if spec.variant.is_gfl:
        result = eac_gfl(pre_sw, fault_sw, init=spec.init)
    else:
        post_sw = _swing_or_fail(plant, post_params, "post-fault window")
        init = spec.initial_state()
        if args.clear_angle is not None:
            delta_c = args.clear_angle
        else:
            times = [ev.t for ev in spec.events if ev.t > 0.0]
            t_fault = times[0] if times else 0.0
            t_clear = times[1] if len(times) > 1 else t_fault
            duration = t_clear - t_fault
            delta_c = init.delta
            if duration >= spec.cfg.dt:
                on = simulate_swing(fault_sw, init, StepConfig(dt=spec.cfg.dt, t_end=duration))
                delta_c = float(on.delta[-1])
        result = eac_gfm(fault_sw, post_sw, init.delta, max(delta_c, init.delta))
        try:
            angle, t_cc = critical_clearing(fault_sw, post_sw, init, via="eac",
                                            cfg=StepConfig(dt=spec.cfg.dt, t_end=spec.cfg.t_end))
            values["critical_angle"] = angle
            values["critical_time"] = t_cc
        except (AlwaysStable, NeverStable) as e:
            values["critical_angle"] = None
            values["critical_note"] = f"{type(e).__name__}: {e}"

    values.update({
        "s_plus": result.s_plus,
        "s_minus": result.s_minus,
        "margin": result.margin,
        "stable": result.stable,
        "delta_b": result.delta_b,
        "delta_c": result.delta_c,
        "delta_limit": result.delta_limit,
    })
    write_summary(values, _out_dir(args) / f"eac-{spec.variant.value}.txt")
    _emit(values)
    return EXIT_OK if result.stable else EXIT_UNSTABLE


def cmd_roa(args) -> int:
    """Classic and modified energy ROA estimates of the post-fault system."""
    spec = _load(args).scenario
    plant = Plant(spec.variant)
    _, _, post = fault_windows(spec)
    sw = _swing_or_fail(plant, post, "post-fault window")
    swing_equilibria(sw).require()
    out = _out_dir(args)
    stem = spec.variant.value
    values = {"variant": stem}
    estimates = {}
    for kind in EnergyKind:
        f = energy_function(sw, kind, shifted=args.shifted)
        est = estimate_roa(f, resolution=args.resolution, vdot=args.vdot)
        estimates[kind] = (f, est)
        write_roa_csv(est, out / f"roa-{kind.value}-{stem}.csv")
        values[f"{kind.value}_c"] = est.c
        values[f"{kind.value}_area"] = est.area
        values[f"{kind.value}_area_vdot"] = est.area_vdot

    code = EXIT_OK
    if args.verify > 0:
        f, est = estimates[EnergyKind.MODIFIED]
        samples = est.sample_interior(f, args.verify, np.random.default_rng(args.seed))
        cfg = StepConfig(dt=args.dt if args.dt is not None else BASIN_DT,
                         t_end=args.t_end if args.t_end is not None else 5.0)
        verdicts = classify_block(plant, post, (), cfg, samples[:, 0], samples[:, 1],
                                  plant.equilibria(post))
        violations = int(np.count_nonzero(verdicts != "Stable"))
        values["verify_samples"] = len(samples)
        values["verify_violations"] = violations
        if violations:
            code = EXIT_UNSTABLE
    write_summary(values, out / f"roa-{stem}.txt")
    _emit(values)
    return code


def cmd_basin(args) -> int:
    """Phase-plane grid of synchronization verdicts of the post-fault system."""
    spec = _load(args).scenario
    plant = Plant(spec.variant)
    _, _, post = fault_windows(spec)
    if args.delta_range and args.rate_range:
        grid = BasinGrid(args.delta_range[0], args.delta_range[1],
                         args.rate_range[0], args.rate_range[1], args.n, args.n)
    elif args.delta_range or args.rate_range:
        raise ParameterError("--delta-range and --rate-range must be given together")
    else:
        sw = _swing_or_fail(plant, post, "default basin grid (give --delta-range/--rate-range)")
        grid = roa_basin_grid(estimate_roa(energy_function(sw), resolution=201), n=args.n)
    cfg = StepConfig(dt=args.dt if args.dt is not None else BASIN_DT,
                     t_end=args.t_end if args.t_end is not None else 5.0)
    jobs = args.jobs if args.jobs is not None else get_jobs()
    basin = basin_oracle(plant, post, grid, cfg, jobs=jobs)

    out = _out_dir(args)
    stem = spec.variant.value
    write_basin_csv(basin, out / f"basin-{stem}.csv")
    values = {
        "variant": stem,
        "cells": basin.verdicts.size,
        "stable_fraction": basin.stable_fraction,
        "stable_area": basin.stable_area,
    }
    write_summary(values, out / f"basin-{stem}.txt")
    _emit(values)
    return EXIT_OK


def cmd_sweep(args) -> int:
    """Parameter grid of fault scenarios, one CSV row per point."""
    preset, variant = _preset_and_variant(args)
    axes = tuple(parse_axis(a) for a in args.axis)
    cfg = _step_defaults(args)
    spec = SweepSpec(preset=preset, variant=variant, axes=axes, t_fault=args.t_fault,
                     clear_time=args.clear_time, depth=args.depth, t_end=cfg.t_end, dt=cfg.dt,
                     kind=args.kind, with_eac=args.eac)
    jobs = args.jobs if args.jobs is not None else get_jobs()
    rows = sweep(spec, jobs=jobs)
    columns = [name for name, _ in axes] + list(SWEEP_COLUMNS)
    path = write_sweep_csv(rows, _out_dir(args) / f"sweep-{variant.value}.csv", columns)
    failed = sum(1 for row in rows if row["error"])
    _emit({"points": len(rows), "errors": failed, "csv": str(path)})
    return EXIT_OK


def cmd_analogy(args) -> int:
    preset = None
    if args.config:
        preset = _load(args).preset
    elif args.preset:
        preset = get_preset(args.preset)
    print(analogy_report(preset), end="")
    return EXIT_OK


def cmd_presets(args) -> int:
    """List the presets, or print one as a config file with --preset."""
    if args.preset:
        print(dump_preset(get_preset(args.preset)), end="")
        return EXIT_OK
    for name in PRESET_NAMES:
        print(name)
        for key, text in preset_rows(get_preset(name)):
            print(f"  {key:8s} {text}")
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    """Parser whose usage errors carry the error exit code instead of argparse's 2."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: {message}")


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="scenario config file")
    common.add_argument("--preset", choices=PRESET_NAMES, help="parameter preset (default table2)")
    common.add_argument("--out", help="output directory (default $SYNCARENA_OUT or ./syncarena-out)")
    common.add_argument("--dt", type=float, help="integration step in s (default $SYNCARENA_DT or 1e-4)")
    common.add_argument("--t-end", dest="t_end", type=float, help="horizon in s (default 5)")
    common.add_argument("--jobs", type=int, help="worker processes (default $SYNCARENA_JOBS or 1)")
    common.add_argument("--seed", type=int, default=0, help="random seed for sampled checks")
    return common


def _timeline_parser() -> argparse.ArgumentParser:
    timeline = argparse.ArgumentParser(add_help=False)
    timeline.add_argument("--variant", choices=VARIANT_NAMES, help="controller variant")
    timeline.add_argument("--t-fault", dest="t_fault", type=float, default=2.0,
                          help="fault inception time in s (default 2)")
    timeline.add_argument("--t-clear", dest="t_clear", type=float,
                          help="clearing time in s (default 3 for PLL, 2.4 for VSG variants)")
    timeline.add_argument("--depth", type=float, help="grid voltage during the fault in p.u.")
    timeline.add_argument("--kind", choices=("dip", "line-trip"), default="dip", help="fault path")
    timeline.add_argument("--steady", action="store_true", help="no fault, normal operation only")
    return timeline


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    timeline = _timeline_parser()
    parser = _Parser(
        prog="syncarena",
        description="Transient synchronization stability of grid-following and grid-forming converters.",
        epilog="controller variants:\n" + "\n".join(f"  {name}" for name in VARIANT_NAMES),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", metavar="command")

    p = sub.add_parser("sim", parents=[common, timeline], help="simulate a fault scenario")
    p.set_defaults(handler=cmd_sim)

    p = sub.add_parser("eac", parents=[common, timeline], help="equal-area criterion of a fault")
    p.add_argument("--clear-angle", dest="clear_angle", type=float,
                   help="clearing angle in rad (VSG variants; default from the simulated clearing time)")
    p.set_defaults(handler=cmd_eac)

    p = sub.add_parser("roa", parents=[common, timeline], help="energy-function region of attraction")
    p.add_argument("--resolution", type=int, default=801, help="level-set grid nodes per axis")
    p.add_argument("--vdot", choices=("printed", "flow"), default="printed",
                   help="V-dot used for the V-dot <= 0 area")
    p.add_argument("--shifted", action="store_true", help="use delta - sep in the |delta*delta_dot| term")
    p.add_argument("--verify", type=int, default=0,
                   help="simulate this many random interior samples of the modified estimate")
    p.set_defaults(handler=cmd_roa)

    p = sub.add_parser("basin", parents=[common, timeline], help="basin-of-attraction grid")
    p.add_argument("--n", type=int, default=41, help="grid nodes per axis")
    p.add_argument("--delta-range", dest="delta_range", type=float, nargs=2, metavar=("LO", "HI"))
    p.add_argument("--rate-range", dest="rate_range", type=float, nargs=2, metavar=("LO", "HI"))
    p.set_defaults(handler=cmd_basin)

    p = sub.add_parser("sweep", parents=[common], help="parameter sweep over fault scenarios")
    p.add_argument("--variant", choices=VARIANT_NAMES, help="controller variant")
    p.add_argument("--axis", action="append", required=True,
                   help="name=v1,v2,... or name=start:stop:count (repeatable)")
    p.add_argument("--t-fault", dest="t_fault", type=float, default=2.0)
    p.add_argument("--clear-time", dest="clear_time", type=float, default=1.0,
                   help="fault duration in s")
    p.add_argument("--depth", type=float)
    p.add_argument("--kind", choices=("dip", "line-trip"), default="dip")
    p.add_argument("--eac", action="store_true", help="add the equal-area margin column")
    p.set_defaults(handler=cmd_sweep)

    p = sub.add_parser("analogy", parents=[common], help="GFL/GFM parameter analogy table")
    p.set_defaults(handler=cmd_analogy)

    p = sub.add_parser("presets", parents=[common], help="list presets")
    p.set_defaults(handler=cmd_presets)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR
    if not getattr(args, "handler", None):
        parser.print_help(sys.stderr)
        return EXIT_ERROR
    try:
        return args.handler(args)
    except SyncArenaError as e:
        logger.debug(f"{args.command} failed", exc_info=True)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
