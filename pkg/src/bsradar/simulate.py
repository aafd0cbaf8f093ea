"""Synthetic wideband radar scene generator.

Produces multi-pulse, multi-antenna IQ data cubes containing linear-FM
target echoes, direct-path interferers, and spatially white noise.  Targets
are delayed by an integer number of fast-time samples so the cube doubles
as an exact oracle for range-bin scoring; every frequency component of a
wideband emitter is steered with its own frequency-scaled array response.

Generation is reproducible: a scenario carries its own seed, and identical
(scenario, geometry, chirp) inputs yield bit-identical cubes.  Target
contributions draw nothing from the random stream (their complex gains are
stored on the target specs), so cubes superpose exactly over target subsets.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .geometry import (
    SPEED_OF_LIGHT,
    ArrayGeometry,
    Direction,
)

DEFAULT_SEED = 20260808

#: X-band defaults: FFT-friendly sizes, Doppler unambiguous to +/-75 m/s.
DEFAULT_GEOMETRY = ArrayGeometry(n_z=4, n_x=32, design_freq=10e9)


@dataclass(frozen=True)
class ChirpParams:
    """Linear-FM pulse train parameters.

    The receive window equals the chirp length (``pulse_samples``); the
    sweep covers [-bandwidth/2, +bandwidth/2] at unit amplitude.
    """

    carrier_freq: float = 10e9
    sample_rate: float = 500e6
    bandwidth: float = 400e6
    pulse_samples: int = 4096
    num_pulses: int = 64
    pri: float = 100e-6

    def __post_init__(self) -> None:
        if self.bandwidth < 0 or self.bandwidth > self.sample_rate:
            raise ValueError("bandwidth must lie in [0, sample_rate]")
        if self.pulse_samples < 1:
            raise ValueError("pulse_samples must be >= 1")
        if self.num_pulses < 2:
            raise ValueError("num_pulses must be >= 2 (slow-time FFT needs pulses)")
        if self.pri <= self.pulse_samples / self.sample_rate:
            raise ValueError("pri must exceed the sampled pulse window")

    @property
    def range_resolution(self) -> float:
        """Meters per fast-time sample bin (two-way)."""
        return SPEED_OF_LIGHT / (2.0 * self.sample_rate)

    @property
    def velocity_resolution(self) -> float:
        """Meters/second per slow-time DFT bin at the carrier."""
        wavelength = SPEED_OF_LIGHT / self.carrier_freq
        return wavelength / (2.0 * self.pri * self.num_pulses)

    @property
    def max_unambiguous_velocity(self) -> float:
        return self.velocity_resolution * self.num_pulses / 2.0


@dataclass(frozen=True)
class TargetSpec:
    """Point scatterer: position (m, array coordinates), closing velocity, gain.

    ``radial_velocity`` is the total closing rate seen by the array (positive
    toward it), including any platform-motion contribution folded in by the
    scenario builder.
    """

    position: tuple[float, float, float]
    radial_velocity: float = 0.0
    amplitude: complex = 1.0 + 0.0j

    @property
    def range(self) -> float:
        return float(np.linalg.norm(self.position))

    @property
    def direction(self) -> Direction:
        return Direction.from_position(*self.position)

    def delay_samples(self, chirp: ChirpParams) -> int:
        """Round-trip delay quantized to the fast-time sample grid."""
        return int(round(2.0 * self.range / SPEED_OF_LIGHT * chirp.sample_rate))


@dataclass(frozen=True)
class InterfererSpec:
    """Direct-path emitter that does not carry the radar chirp.

    ``power`` is the per-element average power relative to the scenario
    noise floor.  Wideband-noise interferers occupy a centered band of
    ``bandwidth_fraction`` of the sample rate; narrowband tones sit at a
    fixed frequency drawn from that same band.
    """

    direction: Direction
    power: float = 1.0
    waveform_kind: str = "wideband-noise"
    bandwidth_fraction: float = 0.8

    def __post_init__(self) -> None:
        if self.power <= 0:
            raise ValueError("interferer power must be positive")
        if self.waveform_kind not in ("wideband-noise", "narrowband-tone"):
            raise ValueError(f"unknown waveform_kind {self.waveform_kind!r}")
        if not 0.0 <= self.bandwidth_fraction <= 1.0:
            raise ValueError("bandwidth_fraction must lie in [0, 1]")


@dataclass(frozen=True)
class Scenario:
    """Targets + interferers + noise level under one reproducibility seed."""

    targets: tuple[TargetSpec, ...] = ()
    interferers: tuple[InterfererSpec, ...] = ()
    noise_power: float = 1.0
    seed: int = DEFAULT_SEED
    label: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "targets", tuple(self.targets))
        object.__setattr__(self, "interferers", tuple(self.interferers))
        if self.noise_power < 0:
            raise ValueError("noise_power must be >= 0")


@dataclass
class DataCube:
    """Received IQ samples, shape (antennas, fast-time samples, pulses)."""

    samples: np.ndarray
    geometry: ArrayGeometry
    chirp: ChirpParams

    def __post_init__(self) -> None:
        expected = (self.geometry.n, self.chirp.pulse_samples, self.chirp.num_pulses)
        if self.samples.shape != expected:
            raise ValueError(
                f"cube shape {self.samples.shape} does not match geometry/chirp {expected}"
            )
        if not np.all(np.isfinite(self.samples)):
            raise ValueError("cube contains non-finite samples")


def generate_chirp(chirp: ChirpParams) -> np.ndarray:
    """Unit-amplitude baseband LFM sweep across the pulse window.

    Instantaneous frequency ramps linearly from -bandwidth/2 to
    +bandwidth/2 over the ``pulse_samples`` duration.
    """
    n = np.arange(chirp.pulse_samples)
    t = n / chirp.sample_rate
    duration = chirp.pulse_samples / chirp.sample_rate
    slope = chirp.bandwidth / duration
    phase = 2.0 * np.pi * (-0.5 * chirp.bandwidth * t + 0.5 * slope * t * t)
    return np.exp(1j * phase)


def _steering_vs_frequency(
    direction: Direction, geom: ArrayGeometry, rf_freqs: np.ndarray
) -> np.ndarray:
    """Array response per RF frequency, shape (N, len(rf_freqs)).

    Each frequency gets its own spatial scaling, so wideband emitters are
    steered exactly rather than at a single nominal frequency.
    """
    u_x, _, u_z = direction.cosines
    scale = np.pi * (rf_freqs / geom.design_freq) * (
        geom.spacing / (geom.wavelength / 2.0)
    )
    a_x = np.exp(1j * np.outer(np.arange(geom.n_x), scale * u_x))
    a_z = np.exp(1j * np.outer(np.arange(geom.n_z), scale * u_z))
    return (a_x[:, None, :] * a_z[None, :, :]).reshape(geom.n, -1)


def _doppler_phases(radial_velocity: float, chirp: ChirpParams) -> np.ndarray:
    """Pulse-to-pulse phase ramp: +4*pi*v*pri/lambda per pulse (closing positive)."""
    wavelength = SPEED_OF_LIGHT / chirp.carrier_freq
    step = 4.0 * np.pi * radial_velocity * chirp.pri / wavelength
    return np.exp(1j * step * np.arange(chirp.num_pulses))


def _target_block(
    target: TargetSpec, geom: ArrayGeometry, chirp: ChirpParams, pulse: np.ndarray
) -> np.ndarray:
    """Antenna-by-fast-time contribution of one target for a single pulse."""
    delay = target.delay_samples(chirp)
    if delay >= chirp.pulse_samples:
        raise ValueError(
            f"target at range {target.range:.1f} m needs delay {delay} samples, "
            f"beyond the {chirp.pulse_samples}-sample pulse window"
        )
    delayed = np.zeros(chirp.pulse_samples, dtype=complex)
    delayed[delay:] = pulse[: chirp.pulse_samples - delay]
    spectrum = np.fft.fft(delayed)
    rf = chirp.carrier_freq + np.fft.fftfreq(chirp.pulse_samples, 1.0 / chirp.sample_rate)
    steer = _steering_vs_frequency(target.direction, geom, rf)
    return np.fft.ifft(steer * spectrum[None, :], axis=1)


def _interferer_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(1, index)))


def _noise_rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(2, 0)))


def _add_noise_interferer(
    out: np.ndarray,
    spec: InterfererSpec,
    geom: ArrayGeometry,
    chirp: ChirpParams,
    ref_power: float,
    rng: np.random.Generator,
) -> None:
    n_fast = chirp.pulse_samples
    base_freqs = np.fft.fftfreq(n_fast, 1.0 / chirp.sample_rate)
    mask = np.abs(base_freqs) <= spec.bandwidth_fraction * chirp.sample_rate / 2.0
    n_bins = int(mask.sum())
    steer = _steering_vs_frequency(spec.direction, geom, chirp.carrier_freq + base_freqs)
    # Spectral variance chosen so the time-domain per-element power is
    # power * ref_power after the unitary-inverse scaling of ifft.
    sigma_f = np.sqrt(spec.power * ref_power * n_fast**2 / n_bins / 2.0)
    for m in range(chirp.num_pulses):
        spectrum = np.zeros(n_fast, dtype=complex)
        draws = rng.standard_normal((n_bins, 2))
        spectrum[mask] = sigma_f * (draws[:, 0] + 1j * draws[:, 1])
        out[:, :, m] += np.fft.ifft(steer * spectrum[None, :], axis=1)


def _add_tone_interferer(
    out: np.ndarray,
    spec: InterfererSpec,
    geom: ArrayGeometry,
    chirp: ChirpParams,
    ref_power: float,
    rng: np.random.Generator,
) -> None:
    half_band = spec.bandwidth_fraction * chirp.sample_rate / 2.0
    f_tone = rng.uniform(-half_band, half_band)
    phase0 = rng.uniform(0.0, 2.0 * np.pi)
    amp = np.sqrt(spec.power * ref_power)
    steer = _steering_vs_frequency(
        spec.direction, geom, np.array([chirp.carrier_freq + f_tone])
    )[:, 0]
    # Tone phase stays continuous across the unsampled gaps between pulses.
    t_fast = np.arange(chirp.pulse_samples) / chirp.sample_rate
    t_pulse = np.arange(chirp.num_pulses) * chirp.pri
    tone = amp * np.exp(
        1j * (2.0 * np.pi * f_tone * (t_fast[:, None] + t_pulse[None, :]) + phase0)
    )
    out += steer[:, None, None] * tone[None, :, :]


def synthesize_datacube(
    scenario: Scenario,
    geom: ArrayGeometry = DEFAULT_GEOMETRY,
    chirp: ChirpParams = ChirpParams(),
) -> DataCube:
    """Render a scenario into a (N, pulse_samples, num_pulses) IQ cube.

    Per pulse m the cube holds
    ``sum_k alpha_k a_k(f) p[n - d_k] e^{j m dphi_k} + interference + noise``
    with the steering applied per fast-time frequency bin, integer-sample
    target delays, and circular complex Gaussian noise of per-element
    variance ``noise_power``.
    """
    pulse = generate_chirp(chirp)
    out = np.zeros((geom.n, chirp.pulse_samples, chirp.num_pulses), dtype=complex)

    for target in scenario.targets:
        block = _target_block(target, geom, chirp, pulse)
        dopp = _doppler_phases(target.radial_velocity, chirp)
        out += target.amplitude * block[:, :, None] * dopp[None, None, :]

    ref_power = scenario.noise_power if scenario.noise_power > 0 else 1.0
    for idx, spec in enumerate(scenario.interferers):
        rng = _interferer_rng(scenario.seed, idx)
        if spec.waveform_kind == "wideband-noise":
            _add_noise_interferer(out, spec, geom, chirp, ref_power, rng)
        else:
            _add_tone_interferer(out, spec, geom, chirp, ref_power, rng)

    if scenario.noise_power > 0:
        rng = _noise_rng(scenario.seed)
        sigma = np.sqrt(scenario.noise_power / 2.0)
        out += sigma * rng.standard_normal(out.shape)
        out += 1j * sigma * rng.standard_normal(out.shape)

    return DataCube(out, geom, chirp)


# ---------------------------------------------------------------------------
# Scenario presets
# ---------------------------------------------------------------------------

#: Interferer count per scenario letter (monotone A -> E).
PRESET_INTERFERER_COUNTS = {"A": 2, "B": 4, "C": 8, "D": 12, "E": 16}

PRESET_NAMES = tuple(
    f"{letter}{mode}" for letter in "ABCDE" for mode in (1, 2)
) + ("noninterferer",)

#: Reference geometry for the angular layout: platform at 7 km altitude,
#: ground aim point 18 km ahead along broadside.
_PLATFORM_ALTITUDE_M = 7_000.0
_GROUND_POINT_AHEAD_M = 18_000.0
_PLATFORM_SPEED_MPS = 90.0

_NUM_TARGETS = 20
_MAX_INTERFERERS = 16


def _ground_elevation() -> float:
    return float(np.arctan2(-_PLATFORM_ALTITUDE_M, _GROUND_POINT_AHEAD_M))


def _preset_targets(
    mode: int, seed: int, snr_db: float, noise_power: float
) -> tuple[TargetSpec, ...]:
    """20 airborne targets with elevation separations per easy/difficult mode.

    Separations from the ground reference direction span 25-50 deg in easy
    mode (1) and 12.5-20 deg in difficult mode (2).  Ranges are compressed
    into the sampled pulse window (the range axis is scored in bins, so only
    bin placement matters); closing velocities include the 90 m/s eastward
    platform motion folded per target and stay inside the unambiguous span.
    """
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(0, mode)))
    theta_ground = _ground_elevation()

    azimuths = np.deg2rad(np.linspace(-40.0, 40.0, _NUM_TARGETS))
    azimuths += rng.uniform(-0.02, 0.02, _NUM_TARGETS)
    if mode == 1:
        seps = np.deg2rad(np.linspace(25.0, 50.0, _NUM_TARGETS))
    else:
        seps = np.deg2rad(np.linspace(12.5, 20.0, _NUM_TARGETS))
    elevations = theta_ground + rng.permutation(seps)

    ranges = rng.permutation(np.linspace(250.0, 1000.0, _NUM_TARGETS))
    ranges += rng.uniform(-5.0, 5.0, _NUM_TARGETS)

    # Desired total closing velocities on distinct slow-time bins.
    closing = rng.permutation(np.linspace(-60.0, 60.0, _NUM_TARGETS))
    closing += rng.uniform(-0.3, 0.3, _NUM_TARGETS)

    amp = np.sqrt(10.0 ** (snr_db / 10.0) * (noise_power if noise_power > 0 else 1.0))
    phases = rng.uniform(0.0, 2.0 * np.pi, _NUM_TARGETS)

    targets = []
    for k in range(_NUM_TARGETS):
        ce, se = np.cos(elevations[k]), np.sin(elevations[k])
        x = ranges[k] * ce * np.sin(azimuths[k])
        y = ranges[k] * ce * np.cos(azimuths[k])
        z = ranges[k] * se
        # closing[k] already contains the platform fold 90*cos(el)*sin(az);
        # the target's own motion makes up the difference.
        targets.append(
            TargetSpec(
                position=(float(x), float(y), float(z)),
                radial_velocity=float(closing[k]),
                amplitude=complex(amp * np.exp(1j * phases[k])),
            )
        )
    return tuple(targets)


def _preset_interferers(count: int, seed: int) -> tuple[InterfererSpec, ...]:
    """First ``count`` slots of a fixed 16-emitter ground/sea layout.

    Scenario A uses the first two emitters, E all sixteen, so the loading
    grows by nesting.  All emitters sit below the horizon; every fourth is
    a narrowband tone, the rest are band-limited noise.
    """
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(3, 0)))
    azimuths = np.deg2rad(np.linspace(-48.0, 48.0, _MAX_INTERFERERS))
    azimuths += rng.uniform(-0.02, 0.02, _MAX_INTERFERERS)
    elevations = np.deg2rad(rng.uniform(-32.0, -14.0, _MAX_INTERFERERS))
    powers = 10.0 ** rng.uniform(4.8, 6.0, _MAX_INTERFERERS)
    fractions = rng.uniform(0.4, 0.9, _MAX_INTERFERERS)

    specs = []
    for i in range(count):
        kind = "narrowband-tone" if i % 4 == 3 else "wideband-noise"
        specs.append(
            InterfererSpec(
                direction=Direction(float(azimuths[i]), float(elevations[i])),
                power=float(powers[i]),
                waveform_kind=kind,
                bandwidth_fraction=float(fractions[i]),
            )
        )
    return tuple(specs)


#: Difficult-mode targets are deliberately faint so that window size, not
#: raw processing gain, decides detection (the easy layouts keep 0 dB).
EASY_MODE_SNR_DB = 0.0
DIFFICULT_MODE_SNR_DB = -30.0


def scenario_preset(
    name: str,
    seed: int = DEFAULT_SEED,
    snr_db: float | None = None,
    noise_power: float = 1.0,
) -> Scenario:
    """Named synthetic scene: A1..E2 or 'noninterferer'.

    Letters A-E fix the interferer count (2, 4, 8, 12, 16); suffix 1 uses
    the easy elevation layout, suffix 2 the difficult one.  The
    noninterferer preset carries the easy targets and an empty interferer
    list.  ``snr_db`` overrides the per-mode default per-element target SNR.
    """
    if name not in PRESET_NAMES:
        raise ValueError(f"unknown preset {name!r}; choose from {PRESET_NAMES}")
    if name == "noninterferer":
        if snr_db is None:
            snr_db = EASY_MODE_SNR_DB
        targets = _preset_targets(1, seed, snr_db, noise_power)
        interferers: tuple[InterfererSpec, ...] = ()
    else:
        letter, mode = name[0], int(name[1])
        if snr_db is None:
            snr_db = EASY_MODE_SNR_DB if mode == 1 else DIFFICULT_MODE_SNR_DB
        targets = _preset_targets(mode, seed, snr_db, noise_power)
        interferers = _preset_interferers(PRESET_INTERFERER_COUNTS[letter], seed)
    return Scenario(
        targets=targets,
        interferers=interferers,
        noise_power=noise_power,
        seed=seed,
        label=name,
    )


def with_targets(scenario: Scenario, targets: Sequence[TargetSpec]) -> Scenario:
    """Copy of ``scenario`` with a different target list (same seed/noise)."""
    return replace(scenario, targets=tuple(targets))
