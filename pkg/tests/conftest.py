import numpy as np
import pytest

from bsradar import ArrayGeometry, ChirpParams


@pytest.fixture
def rng():
    return np.random.default_rng(20260808)


@pytest.fixture
def geom():
    """The default 4x32 X-band array."""
    return ArrayGeometry(n_z=4, n_x=32, design_freq=10e9)


@pytest.fixture
def small_geom():
    return ArrayGeometry(n_z=2, n_x=4, design_freq=10e9)


@pytest.fixture
def small_chirp():
    """Tiny pulse train for fast end-to-end tests."""
    return ChirpParams(
        carrier_freq=10e9,
        sample_rate=500e6,
        bandwidth=400e6,
        pulse_samples=256,
        num_pulses=8,
        pri=1e-6,
    )


def random_complex(rng, shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
