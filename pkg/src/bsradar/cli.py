"""Command-line entry point: simulate / run / sweep / beampattern / bench."""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import cubeio
from .mvdr import beam_pattern, lift_correlator, write_beam_pattern_csv
from .pipeline import (
    METHODS,
    PipelineConfig,
    run_pipeline,
    sweep,
)
from .simulate import PRESET_NAMES, ChirpParams, synthesize_datacube


def _pair(text: str) -> tuple[int, int]:
    """Parse '4x32' or '4,32' into an int pair."""
    sep = "x" if "x" in text else ","
    parts = text.split(sep)
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected VxH, got {text!r}")
    return int(parts[0]), int(parts[1])


def _load_config_file(path: str) -> dict:
    return json.loads(Path(path).read_text())


def _build_config(args) -> PipelineConfig:
    geometry = None
    chirp = None
    scenario = None
    pipeline_overrides: dict = {}
    if getattr(args, "config", None):
        data = _load_config_file(args.config)
        if "geometry" in data:
            geometry = cubeio.geometry_from_dict(data["geometry"])
        if "chirp" in data:
            chirp = cubeio.chirp_from_dict(data["chirp"])
        if "scenario" in data:
            scenario = cubeio.scenario_from_dict(data["scenario"])
        pipeline_overrides = data.get("pipeline", {})

    cfg = PipelineConfig(
        preset=getattr(args, "preset", None),
        scenario=scenario,
        geometry=geometry or PipelineConfig.geometry,
        chirp=chirp or ChirpParams(),
    )
    for key, value in pipeline_overrides.items():
        if key in ("window", "fft_size", "gate"):
            value = tuple(value)
        cfg = replace(cfg, **{key: value})

    overrides: dict = {}
    if getattr(args, "method", None):
        overrides["method"] = args.method
    if getattr(args, "subbands", None):
        overrides["subbands"] = args.subbands
    if getattr(args, "fft", None):
        overrides["fft_size"] = args.fft
    if getattr(args, "window", None):
        overrides["window"] = args.window
    if getattr(args, "loading", None) is not None:
        overrides["loading"] = args.loading
    if getattr(args, "train_pulses", None):
        overrides["train_pulses"] = args.train_pulses
    if getattr(args, "cfar_db", None) is not None:
        overrides["cfar_threshold_db"] = args.cfar_db
    if getattr(args, "guard", None) is not None:
        overrides["cfar_guard_cells"] = args.guard
    if getattr(args, "statistic", None):
        overrides["cfar_statistic"] = args.statistic
    if getattr(args, "no_recenter", False):
        overrides["recenter_per_subband"] = False
    if getattr(args, "seed", None) is not None:
        overrides["seed"] = args.seed
    if getattr(args, "snr_db", None) is not None:
        overrides["snr_db"] = args.snr_db
    if getattr(args, "workers", None):
        overrides["workers"] = args.workers
    if getattr(args, "out", None):
        overrides["output_dir"] = args.out
    if getattr(args, "export_maps", False):
        overrides["export_maps"] = True
    if getattr(args, "export_patterns", False):
        overrides["export_patterns"] = True
    return replace(cfg, **overrides)


def _cmd_simulate(args) -> int:
    cfg = _build_config(args)
    scenario = cfg.resolve_scenario()
    cube = synthesize_datacube(scenario, cfg.geometry, cfg.chirp)
    cubeio.save_cube(args.cube_out, cube)
    print(f"wrote cube {cube.samples.shape} to {args.cube_out}")
    if args.scenario_out:
        cubeio.save_scenario(args.scenario_out, scenario)
        print(f"wrote scenario to {args.scenario_out}")
    return 0


def _cmd_run(args) -> int:
    cfg = _build_config(args)
    result = run_pipeline(cfg)
    detected = result.detection_count
    total = len(result.scores)
    print(f"method={cfg.method} scenario={result.scenario.label or 'custom'}")
    print(f"detected {detected}/{total} targets")
    for score in result.scores:
        if score.detected:
            print(
                f"  target {score.target_id:2d}: range err {score.range_error:8.2f} m, "
                f"velocity err {score.velocity_error:6.2f} m/s"
            )
        else:
            print(f"  target {score.target_id:2d}: MISS")
    report = result.complexity
    print(
        f"training mults/pair: {report.training_mults_per_pair}, "
        f"application mults/snapshot: {report.application_mults_per_snapshot}"
    )
    for artifact in result.artifacts:
        print(f"wrote {artifact}")
    return 0


def _cmd_sweep(args) -> int:
    cfg = _build_config(args)
    if args.axis in ("window", "fft-size"):
        values = [_pair(v) for v in args.values.split(",")] if args.values else []
    else:
        values = [v for v in args.values.split(",") if v] if args.values else []
    out_path = args.sweep_out
    rows = sweep(cfg, args.axis, values, out_path)
    ok = sum(1 for r in rows if r.get("status") == "ok")
    print(f"sweep over {args.axis}: {len(values)} points, {ok} result rows ok")
    print(f"wrote {out_path}")
    return 0


def _cmd_beampattern(args) -> int:
    cfg = _build_config(args)
    result = run_pipeline(cfg)
    corr = result.center_correlators[args.target]
    win = result.center_windows[args.target]
    plan = cfg.beamspace_plan()
    if corr.space != "antenna":
        corr = lift_correlator(corr, plan, win)

    azimuths = np.deg2rad(np.arange(args.az_start, args.az_stop + 1e-9, args.step))
    elevations = np.deg2rad(np.arange(args.el_start, args.el_stop + 1e-9, args.step))
    freq = cfg.chirp.carrier_freq
    pattern = beam_pattern(corr, azimuths, elevations, cfg.geometry, freq)
    write_beam_pattern_csv(args.pattern_out, pattern, azimuths, elevations)
    print(f"wrote beam pattern ({pattern.shape[0]}x{pattern.shape[1]}) to {args.pattern_out}")
    return 0


def _cmd_bench(args) -> int:
    """Wall-clock timings of the core kernels (informational only)."""
    from scipy.linalg import cho_factor, cho_solve

    rng = np.random.default_rng(0)
    for n in args.sizes:
        snaps = rng.standard_normal((n, 2 * n)) + 1j * rng.standard_normal((n, 2 * n))
        t0 = time.perf_counter()
        cov = (snaps @ snaps.conj().T) / (2 * n)
        t_cov = time.perf_counter() - t0
        steer = np.exp(1j * rng.uniform(0, 2 * np.pi, n))
        t0 = time.perf_counter()
        factor = cho_factor(cov + 1e-3 * np.trace(cov).real / n * np.eye(n))
        cho_solve(factor, steer)
        t_solve = time.perf_counter() - t0
        t0 = time.perf_counter()
        np.fft.fft(snaps, axis=0)
        t_fft = time.perf_counter() - t0
        print(
            f"dim {n:5d}: covariance {t_cov * 1e3:8.2f} ms, "
            f"solve {t_solve * 1e3:8.2f} ms, fft batch {t_fft * 1e3:8.2f} ms"
        )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bsradar",
        description="Windowed beamspace MVDR processing for wideband planar-array radar",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_scene_args(p):
        p.add_argument("--preset", choices=PRESET_NAMES, help="built-in scenario")
        p.add_argument("--config", help="JSON config file (scenario/geometry/chirp/pipeline)")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--snr-db", type=float, default=None, dest="snr_db")

    def add_pipeline_args(p):
        p.add_argument("--method", choices=METHODS)
        p.add_argument("--subbands", type=int)
        p.add_argument("--fft", type=_pair, metavar="MZxMX")
        p.add_argument("--window", type=_pair, metavar="WZxWX")
        p.add_argument("--loading", type=float)
        p.add_argument("--train-pulses", type=int, dest="train_pulses")
        p.add_argument("--cfar-db", type=float, dest="cfar_db")
        p.add_argument("--guard", type=int)
        p.add_argument("--statistic", choices=("median", "mean"))
        p.add_argument("--no-recenter", action="store_true", dest="no_recenter")
        p.add_argument("--workers", type=int)

    p_sim = sub.add_parser("simulate", help="synthesize a scene into a binary cube")
    add_scene_args(p_sim)
    p_sim.add_argument("--out", required=True, dest="cube_out", help="cube file path")
    p_sim.add_argument("--scenario-out", dest="scenario_out", help="also dump scenario JSON")
    p_sim.set_defaults(func=_cmd_simulate)

    p_run = sub.add_parser("run", help="run one pipeline configuration")
    add_scene_args(p_run)
    add_pipeline_args(p_run)
    p_run.add_argument("--out", help="output directory for reports")
    p_run.add_argument("--export-maps", action="store_true", dest="export_maps")
    p_run.add_argument("--export-patterns", action="store_true", dest="export_patterns")
    p_run.set_defaults(func=_cmd_run)

    p_sweep = sub.add_parser("sweep", help="sweep window / fft-size / scenario")
    add_scene_args(p_sweep)
    add_pipeline_args(p_sweep)
    p_sweep.add_argument("--axis", required=True, choices=("window", "fft-size", "scenario"))
    p_sweep.add_argument("--values", default="", help="comma list, e.g. 2x4,4x4,4x8")
    p_sweep.add_argument("--out", required=True, dest="sweep_out", help="CSV path")
    p_sweep.set_defaults(func=_cmd_sweep)

    p_bp = sub.add_parser("beampattern", help="export a correlator's beam pattern")
    add_scene_args(p_bp)
    add_pipeline_args(p_bp)
    p_bp.add_argument("--target", type=int, default=0)
    p_bp.add_argument("--az-start", type=float, default=-60.0)
    p_bp.add_argument("--az-stop", type=float, default=60.0)
    p_bp.add_argument("--el-start", type=float, default=-45.0)
    p_bp.add_argument("--el-stop", type=float, default=45.0)
    p_bp.add_argument("--step", type=float, default=1.0)
    p_bp.add_argument("--out", required=True, dest="pattern_out", help="CSV path")
    p_bp.set_defaults(func=_cmd_beampattern)

    p_bench = sub.add_parser("bench", help="wall-clock kernel timings")
    p_bench.add_argument("--sizes", type=lambda s: [int(v) for v in s.split(",")],
                         default=[64, 128, 256])
    p_bench.set_defaults(func=_cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
