"""On-disk formats: binary cubes and maps, JSON scenario/config files.

Binary layout (little endian, fixed 64-byte header then payload):

====== ====== ===========================================================
offset size   field
====== ====== ===========================================================
0      8      magic ``b"BSRCUBE\\0"``
8      4      format version (u32, currently 1)
12     4      flags (u32): bit0 = complex payload, bit1 = range-Doppler map
16     16     dims (4 x u32): cubes (n_z, n_x, fast, pulses);
              maps (range bins, velocity bins, 1, 1)
32     8      sample rate in Hz (f64)
40     24     reserved, zero
====== ====== ===========================================================

Complex payloads are interleaved float32 real/imag pairs in C order with
the antenna axis outermost; real payloads (maps) are plain float32.  Values
are quantized to float32 on write, so a load/save cycle is bit-exact.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .geometry import ArrayGeometry, Direction
from .simulate import (
    ChirpParams,
    DataCube,
    InterfererSpec,
    Scenario,
    TargetSpec,
)

MAGIC = b"BSRCUBE\x00"
VERSION = 1
FLAG_COMPLEX = 1
FLAG_MAP = 2

_HEADER = struct.Struct("<8sII4Idxxxxxxxxxxxxxxxxxxxxxxxx")
assert _HEADER.size == 64


def _write_header(handle, flags: int, dims: tuple[int, int, int, int], fs: float) -> None:
    handle.write(_HEADER.pack(MAGIC, VERSION, flags, *dims, fs))


def _read_header(handle) -> tuple[int, tuple[int, int, int, int], float]:
    raw = handle.read(_HEADER.size)
    if len(raw) != _HEADER.size:
        raise ValueError("file too short for a cube header")
    magic, version, flags, d0, d1, d2, d3, fs = _HEADER.unpack(raw)
    if magic != MAGIC:
        raise ValueError(f"bad magic {magic!r}; not a bsradar binary file")
    if version != VERSION:
        raise ValueError(f"unsupported format version {version}")
    return flags, (d0, d1, d2, d3), fs


def save_cube(path, cube: DataCube) -> None:
    """Write a data cube as float32 IQ pairs behind the fixed header."""
    geom = cube.geometry
    dims = (geom.n_z, geom.n_x, cube.chirp.pulse_samples, cube.chirp.num_pulses)
    payload = np.empty(cube.samples.shape + (2,), dtype="<f4")
    payload[..., 0] = cube.samples.real
    payload[..., 1] = cube.samples.imag
    with open(path, "wb") as handle:
        _write_header(handle, FLAG_COMPLEX, dims, cube.chirp.sample_rate)
        handle.write(payload.tobytes())


def load_cube(
    path,
    geometry: ArrayGeometry | None = None,
    chirp: ChirpParams | None = None,
) -> DataCube:
    """Read a cube file back; geometry/chirp supply the radio metadata.

    The header stores only dimensions and sample rate.  When geometry or
    chirp are omitted, placeholder parameters with the stored dimensions
    and sample rate are used.
    """
    with open(path, "rb") as handle:
        flags, (n_z, n_x, n_fast, n_pulses), fs = _read_header(handle)
        raw = np.frombuffer(handle.read(), dtype="<f4")
    if not flags & FLAG_COMPLEX:
        raise ValueError("file holds a real payload, not an IQ cube")
    expected = n_z * n_x * n_fast * n_pulses * 2
    if raw.size != expected:
        raise ValueError(f"payload holds {raw.size} floats, expected {expected}")
    pairs = raw.reshape(n_z * n_x, n_fast, n_pulses, 2).astype(np.float64)
    samples = pairs[..., 0] + 1j * pairs[..., 1]

    if geometry is None:
        geometry = ArrayGeometry(n_z=n_z, n_x=n_x, design_freq=fs * 20.0)
    if chirp is None:
        chirp = ChirpParams(
            carrier_freq=geometry.design_freq,
            sample_rate=fs,
            bandwidth=0.0,
            pulse_samples=n_fast,
            num_pulses=n_pulses,
            pri=2.0 * n_fast / fs,
        )
    if (geometry.n_z, geometry.n_x) != (n_z, n_x):
        raise ValueError("geometry does not match the stored dimensions")
    if (chirp.pulse_samples, chirp.num_pulses) != (n_fast, n_pulses):
        raise ValueError("chirp does not match the stored dimensions")
    return DataCube(samples, geometry, chirp)


def save_map(path, power: np.ndarray, sample_rate: float) -> None:
    """Write a real-valued range-Doppler power map (real-payload flag set)."""
    arr = np.asarray(power)
    if arr.ndim != 2:
        raise ValueError("expected a 2D power map")
    dims = (arr.shape[0], arr.shape[1], 1, 1)
    with open(path, "wb") as handle:
        _write_header(handle, FLAG_MAP, dims, sample_rate)
        handle.write(arr.astype("<f4").tobytes())


def load_map(path) -> np.ndarray:
    with open(path, "rb") as handle:
        flags, (rows, cols, _, _), _fs = _read_header(handle)
        raw = np.frombuffer(handle.read(), dtype="<f4")
    if flags & FLAG_COMPLEX:
        raise ValueError("file holds an IQ cube, not a power map")
    if raw.size != rows * cols:
        raise ValueError(f"payload holds {raw.size} floats, expected {rows * cols}")
    return raw.reshape(rows, cols).astype(np.float64)


# ---------------------------------------------------------------------------
# JSON scenario / config files (angles in degrees at the file boundary)
# ---------------------------------------------------------------------------


def scenario_to_dict(scenario: Scenario) -> dict:
    return {
        "label": scenario.label,
        "seed": scenario.seed,
        "noise_power": scenario.noise_power,
        "targets": [
            {
                "position_m": list(t.position),
                "radial_velocity_mps": t.radial_velocity,
                "amplitude": [t.amplitude.real, t.amplitude.imag],
            }
            for t in scenario.targets
        ],
        "interferers": [
            {
                "azimuth_deg": float(np.rad2deg(i.direction.azimuth)),
                "elevation_deg": float(np.rad2deg(i.direction.elevation)),
                "power": i.power,
                "waveform_kind": i.waveform_kind,
                "bandwidth_fraction": i.bandwidth_fraction,
            }
            for i in scenario.interferers
        ],
    }


def scenario_from_dict(data: dict) -> Scenario:
    targets = tuple(
        TargetSpec(
            position=tuple(float(v) for v in t["position_m"]),
            radial_velocity=float(t.get("radial_velocity_mps", 0.0)),
            amplitude=complex(*t.get("amplitude", [1.0, 0.0])),
        )
        for t in data.get("targets", [])
    )
    interferers = tuple(
        InterfererSpec(
            direction=Direction.from_degrees(
                float(i["azimuth_deg"]), float(i["elevation_deg"])
            ),
            power=float(i.get("power", 1.0)),
            waveform_kind=i.get("waveform_kind", "wideband-noise"),
            bandwidth_fraction=float(i.get("bandwidth_fraction", 0.8)),
        )
        for i in data.get("interferers", [])
    )
    return Scenario(
        targets=targets,
        interferers=interferers,
        noise_power=float(data.get("noise_power", 1.0)),
        seed=int(data.get("seed", 0)),
        label=str(data.get("label", "")),
    )


def save_scenario(path, scenario: Scenario) -> None:
    Path(path).write_text(json.dumps(scenario_to_dict(scenario), indent=2) + "\n")


def load_scenario(path) -> Scenario:
    return scenario_from_dict(json.loads(Path(path).read_text()))


def geometry_from_dict(data: dict) -> ArrayGeometry:
    return ArrayGeometry(
        n_z=int(data["n_z"]),
        n_x=int(data["n_x"]),
        design_freq=float(data["design_freq"]),
        spacing=None if data.get("spacing") is None else float(data["spacing"]),
    )


def chirp_from_dict(data: dict) -> ChirpParams:
    defaults = ChirpParams()
    return ChirpParams(
        carrier_freq=float(data.get("carrier_freq", defaults.carrier_freq)),
        sample_rate=float(data.get("sample_rate", defaults.sample_rate)),
        bandwidth=float(data.get("bandwidth", defaults.bandwidth)),
        pulse_samples=int(data.get("pulse_samples", defaults.pulse_samples)),
        num_pulses=int(data.get("num_pulses", defaults.num_pulses)),
        pri=float(data.get("pri", defaults.pri)),
    )
