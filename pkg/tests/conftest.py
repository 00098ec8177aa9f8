import numpy as np
import pytest

from pdolab.grid import make_grid
from pdolab.lp import make_partition


@pytest.fixture(scope="session")
def grid64():
    return make_grid(64)


@pytest.fixture(scope="session")
def grid128():
    return make_grid(128)


@pytest.fixture(scope="session")
def grid256():
    return make_grid(256)


@pytest.fixture(scope="session")
def partition64(grid64):
    return make_partition(grid64)


@pytest.fixture(scope="session")
def partition128(grid128):
    return make_partition(grid128)


@pytest.fixture(scope="session")
def partition256(grid256):
    return make_partition(grid256)


def direct_dft(samples: np.ndarray) -> np.ndarray:
    """O(N^2) summation oracle for the forward transform, freqs -N/2..N/2-1."""
    n = len(samples)
    j = np.arange(n)
    k = np.arange(-(n // 2), n // 2)
    return (samples[None, :] * np.exp(-2j * np.pi * np.outer(k, j) / n)).sum(axis=1) / n
