"""End-to-end runs: simulate, channelize, beamform, detect, score.

Processes one moderately loaded scene with all three methods and prints a
per-target scoreboard, then sweeps the beamspace window size to show how
detection count responds in a dense-interference scene.
"""

import numpy as np

from bsradar import (
    ArrayGeometry,
    ChirpParams,
    Direction,
    InterfererSpec,
    PipelineConfig,
    Scenario,
    TargetSpec,
    process_cube,
    synthesize_datacube,
)


def build_scene(seed=11, n_targets=6, snr_db=-22.0):
    rng = np.random.default_rng(seed)
    targets = []
    amp = 10.0 ** (snr_db / 20.0)
    for k in range(n_targets):
        az = np.deg2rad(-35.0 + 70.0 * k / (n_targets - 1))
        el = np.deg2rad(rng.uniform(-6.0, 8.0))
        rng_m = 40.0 + 40.0 * k  # all inside the 1024-sample receive window
        targets.append(TargetSpec(
            position=(rng_m * np.cos(el) * np.sin(az),
                      rng_m * np.cos(el) * np.cos(az),
                      rng_m * np.sin(el)),
            radial_velocity=float(rng.uniform(-60.0, 60.0)),
            amplitude=amp * np.exp(2j * np.pi * rng.random()),
        ))
    interferers = tuple(
        InterfererSpec(
            Direction.from_degrees(float(az), float(rng.uniform(-28.0, -15.0))),
            power=float(10.0 ** rng.uniform(4.5, 5.5)),
            waveform_kind="wideband-noise",
            bandwidth_fraction=0.7,
        )
        for az in np.linspace(-45.0, 45.0, 8)
    )
    return Scenario(targets=tuple(targets), interferers=interferers,
                    noise_power=1.0, seed=seed, label="demo-dense")


def main() -> None:
    geom = ArrayGeometry(n_z=4, n_x=16, design_freq=10e9)
    chirp = ChirpParams(pulse_samples=1024, num_pulses=32, pri=50e-6)
    scene = build_scene()
    cube = synthesize_datacube(scene, geom, chirp)
    print(f"scene: {len(scene.targets)} faint targets, "
          f"{len(scene.interferers)} strong interferers, cube {cube.samples.shape}")

    base = dict(scenario=scene, geometry=geom, chirp=chirp,
                subbands=64, train_pulses=8)
    for method in ("conventional", "beamspace-mvdr", "antenna-mvdr"):
        cfg = PipelineConfig(method=method, window=(2, 4), **base)
        result = process_cube(cube, scene, cfg)
        marks = "".join("#" if s.detected else "." for s in result.scores)
        print(f"{method:>15} [{marks}] {result.detection_count}"
              f"/{len(scene.targets)} detected, "
              f"training {result.complexity.training_mults_per_pair:,} "
              "mults per target-subband")

    print("\nwindow sweep (beamspace-mvdr):")
    for window in [(1, 2), (2, 4), (4, 4), (4, 8)]:
        cfg = PipelineConfig(method="beamspace-mvdr", window=window, **base)
        result = process_cube(cube, scene, cfg)
        detected = [s.target_id for s in result.scores if s.detected]
        errors = [s.range_error_bins for s in result.scores if s.detected]
        print(f"  {window[0]}x{window[1]}: {result.detection_count} detected "
              f"(ids {detected}), max range error {max(errors, default=0)} bins")


if __name__ == "__main__":
    main()
