"""End-to-end processing harness for the per-target beamforming pipelines.

One run takes a scene (preset name or explicit scenario), simulates the
cube, channelizes it, trains and applies a beamformer per (target, subband)
pair, resynthesizes the wideband per-target series, and scores CFAR
detections against the simulator truth.  Three methods share the harness:

* ``antenna-mvdr``      -- full N-dimensional MVDR per (target, subband);
* ``beamspace-mvdr``    -- windowed beamspace MVDR (the reduced pipeline);
* ``conventional``      -- non-adaptive distortionless weights a/||a||^2.

Every numeric kernel adds its complex-multiply tally to a shared counter;
the resulting report carries per-stage totals plus the derived per-pair
training and per-snapshot application costs used for method comparisons.
The channelizer and the beamspace transform run once per subband and are
tallied once (shared front end); each target's adaptive training is tallied
in full, including its own covariance accumulation.

Work splits across a bounded thread pool by subband; workers write disjoint
output slices and keep private counters that are merged at join, so results
and tallies are identical for any worker count.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy.linalg.blas import zgemm

from . import counters
from .beamspace import (
    BeamspacePlan,
    WindowSpec,
    beamspace_transform,
    extract_window,
    window_for,
    windowed_steering,
)
from .channelizer import SubbandCube, bin_center_frequencies, channelize, synthesize
from .counters import OpCounter
from .cubeio import save_map
from .detection import (
    Detection,
    DetectionScore,
    RangeDopplerMap,
    cfar_detect,
    range_doppler_map,
    score_detections,
    write_detection_report,
)
from .geometry import ArrayGeometry, spatial_frequencies, steering_matrix
from .mvdr import (
    ANTENNA_SPACE,
    Correlator,
    apply_correlator,
    conventional_correlator,
    estimate_covariance,
    mvdr_correlator,
    reduced_mvdr,
)
from .simulate import (
    DEFAULT_GEOMETRY,
    DEFAULT_SEED,
    ChirpParams,
    DataCube,
    Scenario,
    generate_chirp,
    scenario_preset,
    synthesize_datacube,
)

METHOD_ANTENNA = "antenna-mvdr"
METHOD_BEAMSPACE = "beamspace-mvdr"
METHOD_CONVENTIONAL = "conventional"
METHODS = (METHOD_ANTENNA, METHOD_BEAMSPACE, METHOD_CONVENTIONAL)


@dataclass(frozen=True)
class PipelineConfig:
    """Validated bundle of every knob one processing run needs."""

    preset: str | None = None
    scenario: Scenario | None = None
    method: str = METHOD_BEAMSPACE
    subbands: int = 128
    fft_size: tuple[int, int] | None = None
    window: tuple[int, int] = (2, 4)
    loading: float = 1e-3
    train_pulses: int = 8
    cfar_threshold_db: float = 10.0
    cfar_guard_cells: int = 4
    cfar_statistic: str = "median"
    gate: tuple[int, int] = (5, 3)
    recenter_per_subband: bool = True
    seed: int = DEFAULT_SEED
    snr_db: float | None = None
    geometry: ArrayGeometry = DEFAULT_GEOMETRY
    chirp: ChirpParams = field(default_factory=ChirpParams)
    workers: int = 1
    output_dir: str | None = None
    export_maps: bool = False
    export_patterns: bool = False
    pattern_step_deg: float = 2.0

    def validate(self) -> None:
        if self.method not in METHODS:
            raise ValueError(f"method: {self.method!r} not one of {METHODS}")
        if self.preset is None and self.scenario is None:
            raise ValueError("preset/scenario: one of the two must be given")
        if self.chirp.pulse_samples % self.subbands != 0:
            raise ValueError(
                f"subbands: {self.subbands} does not divide "
                f"pulse_samples {self.chirp.pulse_samples}"
            )
        if self.subbands != 1 and self.subbands % 2 != 0:
            raise ValueError(f"subbands: {self.subbands} must be even (or 1)")
        if not 1 <= self.train_pulses <= self.chirp.num_pulses:
            raise ValueError(
                f"train_pulses: {self.train_pulses} outside "
                f"[1, {self.chirp.num_pulses}]"
            )
        if self.loading < 0:
            raise ValueError("loading: must be >= 0")
        if self.workers < 1:
            raise ValueError("workers: must be >= 1")
        plan = self.beamspace_plan()
        w_z, w_x = self.window
        if not (1 <= w_z <= plan.m_z and 1 <= w_x <= plan.m_x):
            raise ValueError(
                f"window: ({w_z}, {w_x}) must fit the beam grid "
                f"({plan.m_z}, {plan.m_x})"
            )

    def beamspace_plan(self) -> BeamspacePlan:
        m_z, m_x = self.fft_size or (self.geometry.n_z, self.geometry.n_x)
        return BeamspacePlan(m_z, m_x, self.geometry.n_z, self.geometry.n_x)

    def resolve_scenario(self) -> Scenario:
        if self.scenario is not None:
            return self.scenario
        return scenario_preset(self.preset, seed=self.seed, snr_db=self.snr_db)


@dataclass
class ComplexityReport:
    """Per-stage complex-multiply tallies plus the derived comparison figures."""

    method: str
    n_antennas: int
    beam_points: int
    window_dim: int
    n_targets: int
    n_subbands: int
    n_train_snapshots: int
    n_apply_snapshots: int
    stage_mults: dict[str, int]
    training_mults_per_pair: int = 0
    application_mults_per_snapshot: int = 0

    def __post_init__(self) -> None:
        pairs = max(self.n_targets * self.n_subbands, 1)
        training = (
            self.stage_mults.get("covariance", 0)
            + self.stage_mults.get("solve", 0)
            + self.stage_mults.get("windowed_steering", 0)
        )
        self.training_mults_per_pair = training // pairs
        snaps = max(self.n_subbands * self.n_apply_snapshots, 1)
        per_target_apply = self.stage_mults.get("apply", 0) // max(
            self.n_targets * snaps, 1
        )
        shared_fft = self.stage_mults.get("beamspace_fft", 0) // snaps
        self.application_mults_per_snapshot = shared_fft + per_target_apply

    @property
    def total_mults(self) -> int:
        return sum(self.stage_mults.values())

    def as_dict(self) -> dict:
        return {
            "method": self.method,
            "n_antennas": self.n_antennas,
            "beam_points": self.beam_points,
            "window_dim": self.window_dim,
            "n_targets": self.n_targets,
            "n_subbands": self.n_subbands,
            "n_train_snapshots": self.n_train_snapshots,
            "n_apply_snapshots": self.n_apply_snapshots,
            "stage_mults": dict(sorted(self.stage_mults.items())),
            "training_mults_per_pair": self.training_mults_per_pair,
            "application_mults_per_snapshot": self.application_mults_per_snapshot,
            "total_mults": self.total_mults,
        }


@dataclass
class PipelineResult:
    config: PipelineConfig
    scenario: Scenario
    scores: list[DetectionScore]
    complexity: ComplexityReport
    detections: list[list[Detection]]
    wideband_outputs: np.ndarray | None = None
    subband_outputs: np.ndarray | None = None
    maps: list[RangeDopplerMap] | None = None
    center_correlators: list[Correlator] | None = None
    center_windows: list[WindowSpec | None] | None = None
    artifacts: list[str] = field(default_factory=list)

    @property
    def detection_count(self) -> int:
        return sum(1 for s in self.scores if s.detected)


class StageError(RuntimeError):
    """Wraps a failure with the pipeline stage where it happened."""


def _stage(name: str):
    class _Ctx:
        def __enter__(self):
            return self

        def __exit__(self, exc_type, exc, tb):
            if exc is not None and not isinstance(exc, StageError):
                raise StageError(f"stage '{name}': {exc}") from exc
            return False

    return _Ctx()


def _train_window_columns(snapshots_per_pulse: int, n_pulses: int, train_pulses: int) -> np.ndarray:
    """Column indices of the training snapshots inside the (S*P)-wide matrix."""
    s_idx = np.arange(snapshots_per_pulse)[:, None] * n_pulses
    return (s_idx + np.arange(train_pulses)[None, :]).ravel()


def _subband_steering(
    scenario: Scenario, geom: ArrayGeometry, freq: float
) -> np.ndarray:
    omegas = [
        spatial_frequencies(t.direction, freq, geom) for t in scenario.targets
    ]
    return steering_matrix(
        np.array([o.omega_x for o in omegas]),
        np.array([o.omega_z for o in omegas]),
        geom,
    )


def _process_subband_range(
    bins: Sequence[int],
    sub: SubbandCube,
    scenario: Scenario,
    cfg: PipelineConfig,
    plan: BeamspacePlan,
    freqs: np.ndarray,
    outputs: np.ndarray,
    correlator_slots: list[list[Correlator | None]],
    center_bin: int,
) -> OpCounter:
    """Worker body: handle a slice of subbands, return its private counter."""
    ops = OpCounter()
    geom, chirp = sub.geometry, sub.chirp
    n_ant = geom.n
    s_per_pulse = sub.snapshots_per_pulse
    n_pulses = chirp.num_pulses
    train_cols = _train_window_columns(s_per_pulse, n_pulses, cfg.train_pulses)
    w_z, w_x = cfg.window
    n_targets = len(scenario.targets)

    for b in bins:
        snap = sub.samples[:, b, :, :].reshape(n_ant, s_per_pulse * n_pulses)
        steer = _subband_steering(scenario, geom, freqs[b])

        if cfg.method == METHOD_BEAMSPACE:
            beams = beamspace_transform(snap, plan, ops)
            for k in range(n_targets):
                center_freq = freqs[b] if cfg.recenter_per_subband else geom.design_freq
                sf = spatial_frequencies(
                    scenario.targets[k].direction, center_freq, geom
                )
                win = window_for(sf, plan, w_z, w_x)
                reduced = extract_window(beams, plan, win)
                a_win = windowed_steering(steer[:, k], plan, win, ops)
                cov = estimate_covariance(reduced[:, train_cols], cfg.loading, ops)
                corr = reduced_mvdr(cov, a_win, ops, target_id=k, subband=b)
                outputs[k, b] = apply_correlator(corr, reduced, ops).reshape(
                    s_per_pulse, n_pulses
                )
                if b == center_bin:
                    correlator_slots[k][0] = corr
                    correlator_slots[k][1] = win
        else:
            train = snap[:, train_cols]
            weights = np.empty((n_targets, n_ant), dtype=complex)
            for k in range(n_targets):
                if cfg.method == METHOD_ANTENNA:
                    cov = estimate_covariance(train, cfg.loading, ops)
                    corr = mvdr_correlator(cov, steer[:, k], ops, target_id=k, subband=b)
                else:
                    corr = conventional_correlator(steer[:, k], target_id=k, subband=b)
                weights[k] = corr.weights
                if b == center_bin:
                    correlator_slots[k][0] = corr
                    correlator_slots[k][1] = None
            out = zgemm(1.0, np.conj(weights), snap)
            ops.add(
                "apply",
                n_targets * counters.matvec_mults(n_ant, snap.shape[1]),
            )
            outputs[:, b] = out.reshape(n_targets, s_per_pulse, n_pulses)
    return ops


def process_cube(
    cube: DataCube,
    scenario: Scenario,
    cfg: PipelineConfig,
    want_wideband: bool = False,
    want_subband_outputs: bool = False,
    want_maps: bool = False,
) -> PipelineResult:
    """Run channelization, beamforming, synthesis, and detection on a cube."""
    cfg.validate()
    geom, chirp = cube.geometry, cube.chirp
    plan = cfg.beamspace_plan()
    ops = OpCounter()
    n_targets = len(scenario.targets)

    with _stage("channelize"):
        sub = channelize(cube, cfg.subbands, ops)
        freqs = bin_center_frequencies(cfg.subbands, chirp)

    s_per_pulse = sub.snapshots_per_pulse
    outputs = np.empty(
        (n_targets, cfg.subbands, s_per_pulse, chirp.num_pulses), dtype=complex
    )
    correlator_slots: list[list] = [[None, None] for _ in range(n_targets)]
    center_bin = 0  # subband l = 0, nearest the carrier from below

    with _stage("beamform"):
        all_bins = list(range(cfg.subbands))
        if cfg.workers == 1:
            ops.merge(
                _process_subband_range(
                    all_bins, sub, scenario, cfg, plan, freqs, outputs,
                    correlator_slots, center_bin,
                )
            )
        else:
            chunks = [
                list(all_bins[i :: cfg.workers]) for i in range(cfg.workers)
            ]
            with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
                for worker_ops in pool.map(
                    lambda bins: _process_subband_range(
                        bins, sub, scenario, cfg, plan, freqs, outputs,
                        correlator_slots, center_bin,
                    ),
                    chunks,
                ):
                    ops.merge(worker_ops)

    with _stage("synthesize"):
        wideband = synthesize(outputs, ops)

    replica = generate_chirp(chirp)
    scores: list[DetectionScore] = []
    detections_per_target: list[list[Detection]] = []
    maps: list[RangeDopplerMap] = []
    with _stage("detect"):
        for k, target in enumerate(scenario.targets):
            rd = range_doppler_map(wideband[k], replica, chirp, target_id=k, ops=ops)
            dets = cfar_detect(
                rd,
                cfg.cfar_threshold_db,
                cfg.cfar_guard_cells,
                cfg.cfar_statistic,
            )
            truth_r = target.delay_samples(chirp)
            truth_v = (
                int(round(target.radial_velocity / chirp.velocity_resolution))
                + chirp.num_pulses // 2
            ) % chirp.num_pulses
            scores.append(
                score_detections(
                    dets, truth_r, truth_v, rd, k, cfg.gate[0], cfg.gate[1]
                )
            )
            detections_per_target.append(dets)
            if want_maps or cfg.export_maps:
                maps.append(rd)

    w_z, w_x = cfg.window
    report = ComplexityReport(
        method=cfg.method,
        n_antennas=geom.n,
        beam_points=plan.m,
        window_dim=w_z * w_x,
        n_targets=n_targets,
        n_subbands=cfg.subbands,
        n_train_snapshots=s_per_pulse * cfg.train_pulses,
        n_apply_snapshots=s_per_pulse * chirp.num_pulses,
        stage_mults=dict(ops.counts),
    )

    result = PipelineResult(
        config=cfg,
        scenario=scenario,
        scores=scores,
        complexity=report,
        detections=detections_per_target,
        wideband_outputs=wideband if want_wideband else None,
        subband_outputs=outputs if want_subband_outputs else None,
        maps=maps if (want_maps or cfg.export_maps) else None,
        center_correlators=[slots[0] for slots in correlator_slots],
        center_windows=[slots[1] for slots in correlator_slots],
    )
    if cfg.output_dir is not None:
        _write_artifacts(result)
    return result


def run_pipeline(cfg: PipelineConfig, **wants) -> PipelineResult:
    """Simulate the configured scene and process it; see :func:`process_cube`."""
    cfg.validate()
    scenario = cfg.resolve_scenario()
    with _stage("simulate"):
        cube = synthesize_datacube(scenario, cfg.geometry, cfg.chirp)
    return process_cube(cube, scenario, cfg, **wants)


def _score_row(cfg: PipelineConfig, scenario: Scenario, score: DetectionScore) -> dict:
    w_z, w_x = cfg.window
    plan = cfg.beamspace_plan()
    beamspace = cfg.method == METHOD_BEAMSPACE
    return {
        "scenario": scenario.label or (cfg.preset or "custom"),
        "target_id": score.target_id,
        "method": cfg.method,
        "w_z": w_z if beamspace else "",
        "w_x": w_x if beamspace else "",
        "m_z": plan.m_z if beamspace else "",
        "m_x": plan.m_x if beamspace else "",
        "detected": int(score.detected),
        "range_error_m": f"{score.range_error:.6f}" if score.detected else "inf",
        "velocity_error_mps": (
            f"{score.velocity_error:.6f}" if score.detected else "inf"
        ),
    }


def _write_artifacts(result: PipelineResult) -> None:
    out_dir = Path(result.config.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    report_path = out_dir / "detections.csv"
    rows = [
        _score_row(result.config, result.scenario, score) for score in result.scores
    ]
    write_detection_report(report_path, rows)
    result.artifacts.append(str(report_path))

    complexity_path = out_dir / "complexity.json"
    complexity_path.write_text(
        json.dumps(result.complexity.as_dict(), indent=2, sort_keys=True) + "\n"
    )
    result.artifacts.append(str(complexity_path))

    if result.config.export_maps and result.maps:
        for k, rd in enumerate(result.maps):
            map_path = out_dir / f"rdmap_target{k:02d}.bin"
            save_map(map_path, rd.power, result.config.chirp.sample_rate)
            result.artifacts.append(str(map_path))

    if result.config.export_patterns:
        _write_beam_patterns(result, out_dir)


def _write_beam_patterns(result: PipelineResult, out_dir: Path) -> None:
    from .mvdr import beam_pattern, lift_correlator, write_beam_pattern_csv

    cfg = result.config
    plan = cfg.beamspace_plan()
    step = cfg.pattern_step_deg
    azimuths = np.deg2rad(np.arange(-60.0, 60.0 + step / 2, step))
    elevations = np.deg2rad(np.arange(-45.0, 45.0 + step / 2, step))
    for k, corr in enumerate(result.center_correlators):
        if corr.space != ANTENNA_SPACE:
            corr = lift_correlator(corr, plan, result.center_windows[k])
        pattern = beam_pattern(
            corr, azimuths, elevations, cfg.geometry, cfg.chirp.carrier_freq
        )
        path = out_dir / f"beampattern_target{k:02d}.csv"
        write_beam_pattern_csv(path, pattern, azimuths, elevations)
        result.artifacts.append(str(path))


def complexity_count(cfg: PipelineConfig) -> ComplexityReport:
    """Run the instrumented pipeline and return its tally report."""
    return run_pipeline(cfg).complexity


SWEEP_AXES = ("window", "fft-size", "scenario")


def sweep(cfg: PipelineConfig, axis: str, values: Sequence, out_path=None) -> list[dict]:
    """Run the pipeline across one axis and aggregate per-target rows.

    ``axis`` is one of window / fft-size / scenario; window and fft-size
    values are (v, h) pairs, scenario values are preset names.  A failed
    grid point is recorded with a status message and the sweep continues.
    """
    if axis not in SWEEP_AXES:
        raise ValueError(f"axis {axis!r} not one of {SWEEP_AXES}")

    rows: list[dict] = []
    shared_cube: DataCube | None = None
    shared_scenario: Scenario | None = None
    if axis in ("window", "fft-size"):
        shared_scenario = cfg.resolve_scenario()
        shared_cube = synthesize_datacube(shared_scenario, cfg.geometry, cfg.chirp)

    for value in values:
        try:
            if axis == "window":
                case = replace(cfg, window=tuple(value), output_dir=None)
            elif axis == "fft-size":
                case = replace(cfg, fft_size=tuple(value), output_dir=None)
            else:
                case = replace(cfg, preset=str(value), scenario=None, output_dir=None)
            if shared_cube is not None:
                result = process_cube(shared_cube, shared_scenario, case)
            else:
                result = run_pipeline(case)
            for score in result.scores:
                row = _score_row(case, result.scenario, score)
                row["status"] = "ok"
                rows.append(row)
        except Exception as exc:  # record the failed cell, keep sweeping
            rows.append(
                {
                    "scenario": (
                        str(value) if axis == "scenario" else (cfg.preset or "custom")
                    ),
                    "target_id": "",
                    "method": cfg.method,
                    "w_z": "",
                    "w_x": "",
                    "m_z": "",
                    "m_x": "",
                    "detected": "",
                    "range_error_m": "",
                    "velocity_error_mps": "",
                    "status": f"failed[{value!r}]: {exc}",
                }
            )

    if out_path is not None:
        _write_sweep_csv(out_path, rows)
    return rows


def _write_sweep_csv(path, rows: list[dict]) -> None:
    import csv

    columns = [
        "scenario",
        "target_id",
        "method",
        "w_z",
        "w_x",
        "m_z",
        "m_x",
        "detected",
        "range_error_m",
        "velocity_error_mps",
        "status",
    ]
    with open(path, "w", newline="") as handle:
        handle.write("# bsradar sweep report v1\n")
        writer = csv.DictWriter(handle, fieldnames=columns, extrasaction="ignore")
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
