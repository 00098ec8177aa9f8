"""Dyadic frequency decomposition and the four function-space norms.

The dyadic family starts from a base cutoff psi_0 that is exactly 1 on
|xi| <= 1 and exactly 0 on |xi| >= 2, with

    psi_j(xi) = psi_0(2^-j xi) - psi_0(2^-j+1 xi),   j >= 1,

so the family telescopes: sum_{j<=J} psi_j(xi) = psi_0(2^-J xi), which is
identically 1 on the whole lattice when J = log2(N/2).  Two base profiles are
provided: a C^2 polynomial spline (exact plateaus, default) and a smoother
erf-based transition.

On top of the partition sit the norms used throughout:

    besov_norm          max_j 2^{js} ||psi_j(D) f||_inf      (dyadic Zygmund)
    zygmund_continuous  ||phi(D) f||_inf + sup_t t^s ||psi(D/t) f||_inf
    sobolev_norm        || <D>^s f ||_{L^p}
    square_function     || (sum_j 4^{js} |psi_j(D) f|^2)^(1/2) ||_{L^p}

The dyadic form is the canonical Zygmund norm; the continuous-t form is a
cross-check with t sampled geometrically.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import erf

from .grid import GridFunction, PeriodicGrid, lp_norm, random_band_limited, sup_norm

__all__ = [
    "SplineCutoff",
    "ErfCutoff",
    "LPPartition",
    "NormParams",
    "make_partition",
    "apply_multiplier",
    "besov_norm",
    "zygmund_continuous_norm",
    "sobolev_norm",
    "square_function_norm",
    "check_support_inequality",
    "block_functions",
    "uniform_bound_constant",
    "japanese_bracket",
    "continuous_decomposition_residual",
    "PROFILES",
]


def japanese_bracket(xi: np.ndarray) -> np.ndarray:
    """<xi> = sqrt(1 + xi^2), the weight of the Sobolev scale."""
    xi = np.asarray(xi, dtype=np.float64)
    return np.sqrt(1.0 + xi * xi)


class SplineCutoff:
    """C^2 plateau cutoff: 1 on |t|<=1, 0 on |t|>=2, quintic spline between.

    The transition is the quintic smoothstep, whose first and second
    derivatives vanish at both junctions.
    """

    name = "polynomial-spline"

    def __call__(self, t):
        t = np.abs(np.asarray(t, dtype=np.float64))
        u = np.clip(t - 1.0, 0.0, 1.0)
        s = u ** 3 * (10.0 - 15.0 * u + 6.0 * u * u)
        return 1.0 - s

    def derivative(self, t):
        t = np.asarray(t, dtype=np.float64)
        a = np.abs(t)
        u = np.clip(a - 1.0, 0.0, 1.0)
        inside = (a > 1.0) & (a < 2.0)
        ds = 30.0 * u * u * (1.0 - u) ** 2
        return np.where(inside, -np.sign(t) * ds, 0.0)


class ErfCutoff:
    """Smooth plateau cutoff with an erf-shaped transition on 1 < |t| < 2.

    The transition variable v = (u - 1/2)/sqrt(u(1-u)) runs over the whole
    line as u crosses (0, 1), so every derivative vanishes at the junctions.
    """

    name = "smoothed-erf"

    def __call__(self, t):
        t = np.abs(np.asarray(t, dtype=np.float64))
        u = np.clip(t - 1.0, 0.0, 1.0)
        out = np.ones_like(u)
        inside = (u > 0.0) & (u < 1.0)
        ui = u[inside]
        v = (ui - 0.5) / np.sqrt(ui * (1.0 - ui))
        out[inside] = 0.5 * (1.0 - erf(v))
        out[u >= 1.0] = 0.0
        return out

    def derivative(self, t):
        t = np.asarray(t, dtype=np.float64)
        a = np.abs(t)
        u = np.clip(a - 1.0, 0.0, 1.0)
        out = np.zeros_like(u)
        inside = (u > 0.0) & (u < 1.0)
        ui = u[inside]
        v = (ui - 0.5) / np.sqrt(ui * (1.0 - ui))
        # d/du erf(v(u)) with v'(u) = 1/(4 (u(1-u))^(3/2))
        dv = 0.25 / (ui * (1.0 - ui)) ** 1.5
        out[inside] = -np.exp(-v * v) / np.sqrt(np.pi) * dv
        return np.where((a > 1.0) & (a < 2.0), np.sign(t) * out, 0.0)


PROFILES = {
    SplineCutoff.name: SplineCutoff,
    ErfCutoff.name: ErfCutoff,
}


@dataclass(frozen=True, eq=False)
class LPPartition:
    """The dyadic family {psi_j} plus the continuous pair (phi, psi).

    ``blocks[j]`` holds psi_j evaluated on the frequency lattice; phi is the
    base cutoff and psi(xi) = -xi * phi'(xi) generates the continuous-t form
    of the Zygmund norm.
    """

    grid: PeriodicGrid
    profile: object
    levels: int  # J = log2(N/2); blocks are indexed 0..J
    blocks: np.ndarray = field(repr=False)  # (J+1, N)

    def block_profile(self, j: int, xi) -> np.ndarray:
        """psi_j evaluated at arbitrary (not necessarily lattice) arguments."""
        xi = np.asarray(xi, dtype=np.float64)
        if j == 0:
            return self.profile(xi)
        return self.profile(xi * 2.0 ** (-j)) - self.profile(xi * 2.0 ** (-j + 1))

    def phi(self, xi) -> np.ndarray:
        return self.profile(xi)

    def psi_continuous(self, xi) -> np.ndarray:
        xi = np.asarray(xi, dtype=np.float64)
        return -xi * self.profile.derivative(xi)


@dataclass(frozen=True)
class NormParams:
    """Scalar parameters shared by the norm and sweep machinery."""

    s: float = 0.0
    p: float = 2.0
    r: float = 0.5
    h: float = 0.0
    m: float = 0.0

    def __post_init__(self):
        if not 1.0 < self.p < np.inf:
            raise ValueError(f"p must lie in (1, inf), got {self.p}")
        if self.h < 0.0:
            raise ValueError(f"h must be nonnegative, got {self.h}")


def make_partition(grid: PeriodicGrid, profile: str = "polynomial-spline") -> LPPartition:
    """Build the dyadic partition covering the lattice exactly.

    The level count is J = log2(N/2), so the telescoped sum equals 1 at every
    lattice frequency including +-N/2.
    """
    if profile not in PROFILES:
        raise ValueError(f"unknown profile {profile!r}; choose from {sorted(PROFILES)}")
    prof = PROFILES[profile]()
    levels = grid.top_level
    xi = grid.freqs.astype(np.float64)
    blocks = np.empty((levels + 1, grid.n))
    blocks[0] = prof(xi)
    for j in range(1, levels + 1):
        blocks[j] = prof(xi * 2.0 ** (-j)) - prof(xi * 2.0 ** (-j + 1))
    blocks.setflags(write=False)
    return LPPartition(grid=grid, profile=prof, levels=levels, blocks=blocks)


def apply_multiplier(f: GridFunction, symbol_of_xi) -> GridFunction:
    """Apply a frequency multiplier: output spectrum = profile(k) * coeff(k).

    ``symbol_of_xi`` is either an array aligned with the lattice or a callable
    evaluated on it.
    """
    if callable(symbol_of_xi):
        values = np.asarray(symbol_of_xi(f.grid.freqs))
    else:
        values = np.asarray(symbol_of_xi)
        if values.shape != (f.grid.n,):
            raise ValueError(f"multiplier shape {values.shape} does not match lattice")
    return GridFunction.from_spectrum(f.grid, values * f.spectrum)


def block_functions(f: GridFunction, partition: LPPartition) -> np.ndarray:
    """Samples of psi_j(D) f for every level at once, shape (J+1, N)."""
    spec = partition.blocks * f.spectrum[np.newaxis, :]
    return np.fft.ifft(np.fft.ifftshift(spec, axes=1), axis=1) * f.grid.n


def besov_norm(f: GridFunction, s: float, partition: LPPartition) -> float:
    """Dyadic Zygmund norm max_j 2^{js} ||psi_j(D) f||_inf.

    This is the implementation backing every Holder-Zygmund statement in the
    package.
    """
    blocks = block_functions(f, partition)
    sups = np.max(np.abs(blocks), axis=1)
    weights = 2.0 ** (s * np.arange(partition.levels + 1))
    return float(np.max(weights * sups))


def zygmund_continuous_norm(
    f: GridFunction, s: float, partition: LPPartition, t_samples_per_octave: int = 8
) -> float:
    """Continuous-dilation Zygmund norm with t sampled geometrically.

    Evaluates ||phi(D) f||_inf + max_m t_m^s ||psi(D/t_m) f||_inf over the
    grid t_m = 2^(m/q) up to N/2.  Cross-check for besov_norm; equivalent up
    to profile-dependent constants.
    """
    q = int(t_samples_per_octave)
    if q < 1:
        raise ValueError(f"t_samples_per_octave must be >= 1, got {q}")
    grid = f.grid
    xi = grid.freqs.astype(np.float64)
    phi_term = sup_norm(apply_multiplier(f, partition.phi(xi)))
    octaves = grid.top_level  # t up to N/2
    exponents = np.arange(0, q * octaves + 1) / q
    ts = 2.0 ** exponents
    profiles = partition.psi_continuous(xi[np.newaxis, :] / ts[:, np.newaxis])
    spec = profiles * f.spectrum[np.newaxis, :]
    vals = np.fft.ifft(np.fft.ifftshift(spec, axes=1), axis=1) * grid.n
    sups = np.max(np.abs(vals), axis=1)
    return float(phi_term + np.max(ts ** s * sups))


def sobolev_norm(f: GridFunction, s: float, p: float) -> float:
    """|| <D>^s f ||_{L^p} with <k> = sqrt(1 + k^2) on the lattice."""
    weighted = apply_multiplier(f, japanese_bracket(f.grid.freqs) ** s)
    return lp_norm(weighted, p)


def square_function_norm(
    f: GridFunction, s: float, p: float, partition: LPPartition
) -> float:
    """L^p norm of the dyadic square function (sum_j 4^{js} |psi_j(D) f|^2)^(1/2)."""
    blocks = block_functions(f, partition)
    weights = 4.0 ** (s * np.arange(partition.levels + 1))
    pointwise = np.sqrt(np.sum(weights[:, None] * np.abs(blocks) ** 2, axis=0))
    return lp_norm(GridFunction.from_samples(f.grid, pointwise), p)


# Calibrated constants, keyed by (N, profile, s, p).  The underlying
# inequalities hold with unspecified constants; we fix one per configuration
# by measuring a seeded probe family once and record it in every report.
_SUPPORT_CONSTANTS: dict = {}
_CALIBRATION_SEED = 20260810


def _support_constant(partition: LPPartition, s: float, p: float, A: float) -> float:
    key = (partition.grid.n, partition.profile.name, round(s, 12), round(p, 12), round(A, 12))
    if key not in _SUPPORT_CONSTANTS:
        worst = 0.0
        for fks in _support_probe_battery(partition.grid, A):
            lhs, raw = _support_sides(fks, s, p, partition)
            if raw > 0:
                worst = max(worst, lhs / raw)
        _SUPPORT_CONSTANTS[key] = 1.05 * worst
    return _SUPPORT_CONSTANTS[key]


def _single_mode(grid: PeriodicGrid, k: int, amplitude: complex = 1.0) -> GridFunction:
    half = grid.n // 2
    spectrum = np.zeros(grid.n, dtype=np.complex128)
    spectrum[half + k if k < half else half - k] = amplitude
    return GridFunction.from_spectrum(grid, spectrum)


def _support_probe_battery(grid: PeriodicGrid, A: float) -> list:
    """Deterministic calibration family: extremal single modes, dyadic combs,
    and random band-limited sequences of every length."""
    half = grid.n // 2
    levels = grid.top_level
    zero = GridFunction.from_spectrum(grid, np.zeros(grid.n, dtype=np.complex128))
    battery = []
    caps = []
    for k in range(levels + 1):
        cap = int(min(A * 2.0 ** (k + 1), half))
        if cap < 1:
            cap = 1
        caps.append(cap)
    # one term at its top admissible frequency, per level
    for k in range(levels + 1):
        seq = [zero] * k + [_single_mode(grid, caps[k])]
        battery.append(seq)
    # dyadic comb across all levels
    battery.append([_single_mode(grid, min(2 ** k, half)) for k in range(levels + 1)])
    # random families, full and truncated
    for trial in range(16):
        length = 1 + trial % (levels + 1)
        seq = [
            random_band_limited(grid, min(caps[k], half - 1), seed=_CALIBRATION_SEED + 31 * trial + k)
            for k in range(length)
        ]
        battery.append(seq)
    return battery


def _support_sides(f_seq, s, p, partition):
    grid = f_seq[0].grid
    total = np.zeros(grid.n, dtype=np.complex128)
    sq = np.zeros(grid.n)
    for k, fk in enumerate(f_seq):
        total = total + fk.spectrum
        sq += 4.0 ** (k * s) * np.abs(fk.samples) ** 2
    lhs = sobolev_norm(GridFunction.from_spectrum(grid, total), s, p)
    raw = lp_norm(GridFunction.from_samples(grid, np.sqrt(sq)), p)
    return lhs, raw


def check_support_inequality(
    f_seq, s: float, p: float, A: float, partition: LPPartition
) -> dict:
    """Square-function control of sums with dyadically growing spectra.

    Requires supp coeff(f_k) within |xi| <= A*2^(k+1) and s > 0.  Returns the
    two sides of ||sum f_k||_{H^{s,p}} <= C ||(sum 4^{ks}|f_k|^2)^(1/2)||_p
    with the calibrated constant folded into the right side.
    """
    if s <= 0:
        raise ValueError(f"s must be positive, got {s}")
    if not f_seq:
        raise ValueError("need at least one function")
    grid = f_seq[0].grid
    for k, fk in enumerate(f_seq):
        cap = A * 2.0 ** (k + 1)
        outside = np.abs(grid.freqs) > cap
        tail = np.max(np.abs(fk.spectrum[outside])) if outside.any() else 0.0
        if tail > 1e-13 * max(1.0, float(np.max(np.abs(fk.spectrum)))):
            raise ValueError(
                f"spectrum of term {k} leaks outside |xi| <= {cap:g} (max {tail:.3e})"
            )
    C = _support_constant(partition, s, p, A)
    lhs, raw = _support_sides(f_seq, s, p, partition)
    rhs = C * raw
    return {"lhs": lhs, "rhs": rhs, "ok": bool(lhs <= rhs), "constant": C}


# L^1 norms of the transition kernels, computed once per profile by dense
# quadrature of the continuum Fourier transform.  These fix the constant in
# the uniform sup-norm bound for the block multipliers.
_KERNEL_L1: dict = {}


def _kernel_l1(profile, which: str) -> float:
    key = (profile.name, which)
    if key not in _KERNEL_L1:
        m = 1 << 18
        span = 8.0
        xi = -span / 2 + span * np.arange(m) / m
        if which == "base":
            vals = profile(xi)
        else:  # first dyadic block
            vals = profile(xi / 2.0) - profile(xi)
        hat = np.fft.fft(np.fft.ifftshift(vals)) * (span / m)
        dx = 2.0 * np.pi / span
        _KERNEL_L1[key] = float(np.sum(np.abs(hat)) * dx)
    return _KERNEL_L1[key]


def uniform_bound_constant(partition: LPPartition) -> float:
    """Profile constant c with ||psi_j(D) f||_inf <= c ||f||_inf for all j.

    Equals (2*pi)^-1 * max of the kernel L^1 norms of the base cutoff and the
    first dyadic block; rescaling gives every other level the same bound, and
    the partial sums sum_{l<=j} psi_l are dilates of the base cutoff.
    """
    c0 = _kernel_l1(partition.profile, "base")
    c1 = _kernel_l1(partition.profile, "block")
    return max(c0, c1) / (2.0 * np.pi)


def continuous_decomposition_residual(
    f: GridFunction, partition: LPPartition, t_samples_per_octave: int = 32
) -> float:
    """Diagnostic: quadrature defect of f = phi(D)f + int_1^inf psi(D/t) f dt/t.

    The integral is discretised by the trapezoid rule in log t on the same
    geometric grid the continuous Zygmund norm uses.  Not an acceptance gate;
    the identity is exact in the limit and the defect decays like the square
    of the log-spacing.
    """
    grid = f.grid
    xi = grid.freqs.astype(np.float64)
    q = int(t_samples_per_octave)
    octaves = grid.top_level + 2
    exponents = np.arange(0, q * octaves + 1) / q
    ts = 2.0 ** exponents
    log_step = np.log(2.0) / q
    total = partition.phi(xi).astype(np.complex128)
    profiles = partition.psi_continuous(xi[np.newaxis, :] / ts[:, np.newaxis])
    weights = np.full(len(ts), log_step)
    weights[0] = weights[-1] = log_step / 2.0
    total = total + np.sum(weights[:, None] * profiles, axis=0)
    defect = (total - 1.0) * f.spectrum
    g = GridFunction.from_spectrum(grid, defect)
    return sup_norm(g)
