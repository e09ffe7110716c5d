import numpy as np
import pytest

from bilmax.grids import Field, Grid, fft_inverse, lp_norm
from bilmax.wavelets import cached_wavelet_system


@pytest.fixture(scope="session")
def db4():
    return cached_wavelet_system(4, 14)


@pytest.fixture(scope="session")
def db2():
    return cached_wavelet_system(2, 14)


def band_limited(grid: Grid, band, seed) -> Field:
    """Unit-L2 field with iid complex spectrum restricted to an annulus."""
    rng = np.random.default_rng(seed)
    dual = grid.dual()
    r = dual.radius()
    spec = rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)
    spec *= (r >= band[0]) & (r <= band[1])
    f = fft_inverse(Field(dual, spec))
    return Field(grid, f.values / lp_norm(f, 2))
