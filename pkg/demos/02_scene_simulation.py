"""Building scenes and IQ cubes, and moving them through the file formats.

Shows the scenario presets, a hand-built scene, cube synthesis, and the
binary cube / JSON scenario round trips.
"""

import tempfile
from pathlib import Path

import numpy as np

from bsradar import (
    ArrayGeometry,
    ChirpParams,
    Direction,
    InterfererSpec,
    Scenario,
    TargetSpec,
    scenario_preset,
    synthesize_datacube,
)
from bsradar.cubeio import load_cube, load_scenario, save_cube, save_scenario


def main() -> None:
    # preset tour: interferer loading grows from A to E
    for name in ("A1", "C1", "E2", "noninterferer"):
        sc = scenario_preset(name)
        print(f"preset {name:>14}: {len(sc.targets)} targets, "
              f"{len(sc.interferers)} interferers, "
              f"|alpha| = {abs(sc.targets[0].amplitude):.3f}")

    # a small hand-built scene on a small array so synthesis is instant
    geom = ArrayGeometry(n_z=2, n_x=8, design_freq=10e9)
    chirp = ChirpParams(pulse_samples=512, num_pulses=16, pri=3e-6)
    scene = Scenario(
        targets=(
            TargetSpec(position=(10.0, 60.0, 5.0), radial_velocity=35.0),
            TargetSpec(position=(-20.0, 90.0, 8.0), radial_velocity=-50.0,
                       amplitude=0.5 + 0.5j),
        ),
        interferers=(
            InterfererSpec(Direction.from_degrees(-30.0, -20.0), power=100.0),
        ),
        noise_power=1.0,
        seed=42,
        label="demo-scene",
    )
    cube = synthesize_datacube(scene, geom, chirp)
    print(f"\nsynthesized cube {cube.samples.shape} "
          f"({cube.samples.nbytes / 1e6:.1f} MB in memory)")
    print(f"per-element power {np.mean(np.abs(cube.samples) ** 2):.1f} "
          "(noise 1.0 + interference + echoes)")

    # reproducibility: same scenario, same bits
    again = synthesize_datacube(scene, geom, chirp)
    print(f"bit-identical regeneration: {np.array_equal(cube.samples, again.samples)}")

    with tempfile.TemporaryDirectory() as tmp:
        cube_path = Path(tmp) / "scene.cube"
        scene_path = Path(tmp) / "scene.json"
        save_cube(cube_path, cube)
        save_scenario(scene_path, scene)
        print(f"\ncube file: {cube_path.stat().st_size / 1e6:.1f} MB "
              "(64-byte header + float32 IQ pairs)")
        reloaded = load_cube(cube_path, geom, chirp)
        err = np.max(np.abs(reloaded.samples - cube.samples))
        print(f"reload error after float32 quantization: {err:.2e}")
        print(f"scenario JSON round trip: "
              f"{len(load_scenario(scene_path).targets)} targets restored")


if __name__ == "__main__":
    main()
