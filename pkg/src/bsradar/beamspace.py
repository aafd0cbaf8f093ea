"""Zero-padded 2D spatial DFT (beamspace) and fixed rectangular windows.

The transform maps a length-N antenna snapshot onto an m_z-by-m_x beam grid
through the scaled truncated DFT pair, flattened x-major / z-fastest like
the steering vectors.  With the 1/sqrt(m_z m_x) scaling the transform is an
isometry for any m >= n: columns of the implied matrix are orthonormal, so
snapshot energy is preserved exactly (not merely up to a ratio).

Windows wrap circularly (the spatial DFT is periodic); an even-width window
spans floor(w/2) bins below its center and the remainder above.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import counters
from .counters import OpCounter
from .geometry import ArrayGeometry, SpatialFrequencies

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class BeamspacePlan:
    """Beam-grid sizes (m_z, m_x) over an n_z-by-n_x array; m >= n per axis."""

    m_z: int
    m_x: int
    n_z: int
    n_x: int

    def __post_init__(self) -> None:
        if self.n_z < 1 or self.n_x < 1:
            raise ValueError("array dims must be >= 1")
        if self.m_z < self.n_z or self.m_x < self.n_x:
            raise ValueError(
                f"FFT sizes ({self.m_z}, {self.m_x}) must cover the array "
                f"({self.n_z}, {self.n_x}); zero-padding only enlarges"
            )

    @classmethod
    def for_geometry(
        cls, geom: ArrayGeometry, m_z: int | None = None, m_x: int | None = None
    ) -> "BeamspacePlan":
        return cls(m_z or geom.n_z, m_x or geom.n_x, geom.n_z, geom.n_x)

    @property
    def m(self) -> int:
        return self.m_z * self.m_x

    @property
    def n(self) -> int:
        return self.n_z * self.n_x


@dataclass(frozen=True)
class WindowSpec:
    """w_z-by-w_x rectangle of beam bins centered at (center_row, center_col)."""

    w_z: int
    w_x: int
    center_row: int
    center_col: int

    def __post_init__(self) -> None:
        if self.w_z < 1 or self.w_x < 1:
            raise ValueError("window dims must be >= 1")

    @property
    def w(self) -> int:
        return self.w_z * self.w_x


def _check_window(win: WindowSpec, plan: BeamspacePlan) -> None:
    if win.w_z > plan.m_z or win.w_x > plan.m_x:
        raise ValueError(
            f"window ({win.w_z}, {win.w_x}) exceeds beam grid ({plan.m_z}, {plan.m_x})"
        )


def beamspace_transform(
    y: np.ndarray, plan: BeamspacePlan, ops: OpCounter | None = None
) -> np.ndarray:
    """Project antenna snapshot(s) onto the beam grid.

    ``y`` is a length-N vector or an (N, T) batch; the result has length
    m_z*m_x per snapshot, x-major / z-fastest.  Implemented as a zero-padded
    two-stage FFT; identical to the dense transform matrix product to
    floating-point roundoff.
    """
    arr = np.asarray(y)
    single = arr.ndim == 1
    if single:
        arr = arr[:, None]
    if arr.shape[0] != plan.n:
        raise ValueError(f"snapshot length {arr.shape[0]} != array size {plan.n}")
    t = arr.shape[1]

    grid = arr.reshape(plan.n_x, plan.n_z, t)
    stage_z = np.fft.fft(grid, n=plan.m_z, axis=1)
    stage_x = np.fft.fft(stage_z, n=plan.m_x, axis=0)
    out = stage_x.reshape(plan.m, t) / np.sqrt(plan.m)
    if ops is not None:
        ops.add(
            "beamspace_fft",
            t * counters.beamspace_fft_mults(plan.n_x, plan.m_z, plan.m_x),
        )
    return out[:, 0] if single else out


def adjoint_transform(x: np.ndarray, plan: BeamspacePlan) -> np.ndarray:
    """Apply the conjugate-transposed beamspace transform to beam vector(s)."""
    arr = np.asarray(x)
    single = arr.ndim == 1
    if single:
        arr = arr[:, None]
    if arr.shape[0] != plan.m:
        raise ValueError(f"beam vector length {arr.shape[0]} != grid size {plan.m}")
    t = arr.shape[1]

    grid = arr.reshape(plan.m_x, plan.m_z, t)
    stage_x = np.fft.ifft(grid, axis=0)[: plan.n_x] * plan.m_x
    stage_z = np.fft.ifft(stage_x, axis=1)[:, : plan.n_z] * plan.m_z
    out = stage_z.reshape(plan.n, t) / np.sqrt(plan.m)
    return out[:, 0] if single else out


def window_center(sf: SpatialFrequencies, plan: BeamspacePlan) -> tuple[int, int]:
    """Beam-grid bin (row, col) nearest to the given spatial frequencies.

    Rounds half-integer positions to the even bin (numpy rounding).  An
    on-grid steering vector maps to the single bin its transform occupies.
    """
    row = int(np.round(sf.omega_z * plan.m_z / TWO_PI)) % plan.m_z
    col = int(np.round(sf.omega_x * plan.m_x / TWO_PI)) % plan.m_x
    return row, col


def window_for(
    sf: SpatialFrequencies, plan: BeamspacePlan, w_z: int, w_x: int
) -> WindowSpec:
    """WindowSpec of the given size centered on the bin nearest ``sf``."""
    row, col = window_center(sf, plan)
    return WindowSpec(w_z, w_x, row, col)


def window_indices(win: WindowSpec, plan: BeamspacePlan) -> tuple[np.ndarray, np.ndarray]:
    """Wrapped (rows, cols) selected by the window, in window order."""
    _check_window(win, plan)
    rows = (win.center_row - win.w_z // 2 + np.arange(win.w_z)) % plan.m_z
    cols = (win.center_col - win.w_x // 2 + np.arange(win.w_x)) % plan.m_x
    return rows, cols


def extract_window(
    beam: np.ndarray, plan: BeamspacePlan, win: WindowSpec
) -> np.ndarray:
    """Select the window's bins from beam vector(s): the 0/1 selector product."""
    rows, cols = window_indices(win, plan)
    arr = np.asarray(beam)
    single = arr.ndim == 1
    if single:
        arr = arr[:, None]
    if arr.shape[0] != plan.m:
        raise ValueError(f"beam vector length {arr.shape[0]} != grid size {plan.m}")
    grid = arr.reshape(plan.m_x, plan.m_z, -1)
    picked = grid[cols[:, None], rows[None, :], :].reshape(win.w, -1)
    return picked[:, 0] if single else picked


def scatter_window(
    values: np.ndarray, plan: BeamspacePlan, win: WindowSpec
) -> np.ndarray:
    """Adjoint of :func:`extract_window`: place window values on the full grid."""
    rows, cols = window_indices(win, plan)
    values = np.asarray(values)
    if values.shape[0] != win.w:
        raise ValueError(f"expected {win.w} window values, got {values.shape[0]}")
    grid = np.zeros((plan.m_x, plan.m_z), dtype=complex)
    grid[cols[:, None], rows[None, :]] = values.reshape(win.w_x, win.w_z)
    return grid.reshape(plan.m)


def windowed_steering(
    steering: np.ndarray,
    plan: BeamspacePlan,
    win: WindowSpec,
    ops: OpCounter | None = None,
) -> np.ndarray:
    """Length-W windowed beamspace image of an antenna steering vector."""
    beam = beamspace_transform(steering, plan)
    if ops is not None:
        ops.add(
            "windowed_steering",
            counters.beamspace_fft_mults(plan.n_x, plan.m_z, plan.m_x),
        )
    return extract_window(beam, plan, win)
