"""Periodic grid, sampled functions, spectral transform, and basic norms.

Everything downstream lives on the circle [0, 2*pi) sampled at N equispaced
points, with the integer frequency lattice {-N/2, ..., N/2 - 1}.  A sampled
function carries both its point values and its Fourier coefficients under the
convention

    coeff(k) = (1/N) * sum_j f(x_j) exp(-i k x_j)
    f(x_j)   = sum_k coeff(k) exp(+i k x_j)

so that frequency multipliers act as exact diagonal maps on the coefficient
side.  All values are complex; realness is a property, never a constraint.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "PeriodicGrid",
    "GridFunction",
    "make_grid",
    "lp_norm",
    "sup_norm",
    "random_band_limited",
]


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True, eq=False)
class PeriodicGrid:
    """Equispaced grid on [0, 2*pi) with its integer frequency lattice.

    Attributes:
        n: number of points; a power of two, at least 16.
        points: x_j = 2*pi*j/n for j = 0..n-1.
        freqs: integers -n/2 .. n/2 - 1 in increasing order.
    """

    n: int
    points: np.ndarray = field(repr=False)
    freqs: np.ndarray = field(repr=False)

    @property
    def top_level(self) -> int:
        """Largest dyadic level J with 2**J = n/2."""
        return int(self.n // 2).bit_length() - 1


def make_grid(n: int) -> PeriodicGrid:
    """Build the periodic grid of size ``n``.

    Rejects sizes that are not powers of two or are below 16: the dyadic
    frequency decomposition needs exact halving all the way down.
    """
    if not _is_power_of_two(n):
        raise ValueError("size must be a power of two")
    if n < 16:
        raise ValueError(f"size must be at least 16, got {n}")
    points = 2.0 * np.pi * np.arange(n) / n
    freqs = np.arange(-(n // 2), n // 2)
    points.setflags(write=False)
    freqs.setflags(write=False)
    return PeriodicGrid(n=n, points=points, freqs=freqs)


@dataclass(frozen=True, eq=False)
class GridFunction:
    """A function sampled on a PeriodicGrid, with cached Fourier coefficients.

    ``spectrum`` is aligned with ``grid.freqs`` (increasing k).  Instances are
    immutable; all operations return new objects.
    """

    grid: PeriodicGrid
    samples: np.ndarray = field(repr=False)
    spectrum: np.ndarray = field(repr=False)

    @classmethod
    def from_samples(cls, grid: PeriodicGrid, samples: np.ndarray) -> "GridFunction":
        samples = np.asarray(samples, dtype=np.complex128)
        if samples.shape != (grid.n,):
            raise ValueError(f"expected {grid.n} samples, got shape {samples.shape}")
        spectrum = np.fft.fftshift(np.fft.fft(samples)) / grid.n
        samples = samples.copy()
        samples.setflags(write=False)
        spectrum.setflags(write=False)
        return cls(grid=grid, samples=samples, spectrum=spectrum)

    @classmethod
    def from_spectrum(cls, grid: PeriodicGrid, spectrum: np.ndarray) -> "GridFunction":
        spectrum = np.asarray(spectrum, dtype=np.complex128)
        if spectrum.shape != (grid.n,):
            raise ValueError(f"expected {grid.n} coefficients, got shape {spectrum.shape}")
        samples = np.fft.ifft(np.fft.ifftshift(spectrum)) * grid.n
        spectrum = spectrum.copy()
        spectrum.setflags(write=False)
        samples.setflags(write=False)
        return cls(grid=grid, samples=samples, spectrum=spectrum)

    def coeff(self, k: int) -> complex:
        """Fourier coefficient at integer frequency ``k``."""
        n = self.grid.n
        if not -(n // 2) <= k < n // 2:
            raise ValueError(f"frequency {k} outside lattice [-{n//2}, {n//2 - 1}]")
        return complex(self.spectrum[k + n // 2])

    def __add__(self, other: "GridFunction") -> "GridFunction":
        _check_same_grid(self, other)
        return GridFunction.from_spectrum(self.grid, self.spectrum + other.spectrum)

    def __sub__(self, other: "GridFunction") -> "GridFunction":
        _check_same_grid(self, other)
        return GridFunction.from_spectrum(self.grid, self.spectrum - other.spectrum)

    def __mul__(self, scalar: complex) -> "GridFunction":
        return GridFunction.from_spectrum(self.grid, self.spectrum * scalar)

    __rmul__ = __mul__


def _check_same_grid(f: GridFunction, g: GridFunction) -> None:
    if f.grid.n != g.grid.n:
        raise ValueError(f"grid size mismatch: {f.grid.n} vs {g.grid.n}")


def lp_norm(f: GridFunction, p: float) -> float:
    """Riemann-sum L^p norm, ((2*pi/N) * sum_j |f(x_j)|^p)^(1/p), for p in (1, inf)."""
    if not 1.0 < p < np.inf:
        raise ValueError(f"p must lie in (1, inf), got {p}")
    w = 2.0 * np.pi / f.grid.n
    return float((w * np.sum(np.abs(f.samples) ** p)) ** (1.0 / p))


def sup_norm(f: GridFunction) -> float:
    """Grid sup norm max_j |f(x_j)|."""
    return float(np.max(np.abs(f.samples)))


def random_band_limited(grid: PeriodicGrid, max_freq: int, seed: int) -> GridFunction:
    """Deterministic random probe with spectrum supported in |k| <= max_freq.

    Coefficients are iid complex Gaussian, then rescaled so sum_k |coeff|^2 = 1,
    i.e. unit L^2 norm up to the sqrt(2*pi) volume factor.
    """
    half = grid.n // 2
    if not 1 <= max_freq <= half - 1:
        raise ValueError(f"max_freq must lie in [1, {half - 1}], got {max_freq}")
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    width = 2 * max_freq + 1
    coeffs = rng.standard_normal(width) + 1j * rng.standard_normal(width)
    spectrum = np.zeros(grid.n, dtype=np.complex128)
    spectrum[half - max_freq : half + max_freq + 1] = coeffs
    spectrum /= np.linalg.norm(spectrum)
    return GridFunction.from_spectrum(grid, spectrum)
