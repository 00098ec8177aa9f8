"""Mollifier profiles, the delta-net, and smoothing sweeps.

A mollifier is specified by its Fourier transform rho_hat alone: on the
lattice, convolution with the rescaled profile rho_eps(x) = eps^-1 rho(x/eps)
is exactly multiplication of coeff(k) by rho_hat(eps*k).  rho_hat(0) = 1
encodes unit mass; flatness of rho_hat at 0 encodes vanishing moments.

Two stock profiles:

    gaussian         rho_hat(xi) = exp(-xi^2/2); positive kernel, so
                     smoothing never increases sup norms.
    moment_vanishing rho_hat identically 1 on |xi| <= 1/2 and 0 on |xi| >= 1;
                     all moments of rho vanish except the mass.

The sweeps measure how fast Zygmund and sup norms grow as eps shrinks: the
smoothing gains r derivatives at the price of eps^-r, and with vanishing
moments the borderline case grows only like log(1/eps).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .grid import GridFunction, sup_norm
from .lp import LPPartition, SplineCutoff, besov_norm

__all__ = [
    "Mollifier",
    "make_mollifier",
    "regularize",
    "zygmund_blowup_sweep",
    "sup_blowup_sweep",
    "log_blowup_check",
    "default_eps_grid",
]


@dataclass(frozen=True, eq=False)
class Mollifier:
    """Regularising profile given by its Fourier transform."""

    kind: str
    fourier_profile: Callable[[np.ndarray], np.ndarray]
    all_vanishing: bool

    def weights(self, eps: float, freqs: np.ndarray) -> np.ndarray:
        return np.asarray(self.fourier_profile(eps * np.asarray(freqs, dtype=np.float64)))


def _gaussian_hat(xi: np.ndarray) -> np.ndarray:
    xi = np.asarray(xi, dtype=np.float64)
    return np.exp(-0.5 * xi * xi)


_PLATEAU = SplineCutoff()


def _moment_vanishing_hat(xi: np.ndarray) -> np.ndarray:
    # Plateau on |xi| <= 1/2, zero beyond 1: all derivatives vanish at 0,
    # hence all moments of rho except the zeroth.
    return _PLATEAU(2.0 * np.asarray(xi, dtype=np.float64))


def make_mollifier(kind: str, fourier_profile: Callable | None = None) -> Mollifier:
    """Build a mollifier; ``custom`` requires a profile with value 1 at 0."""
    if kind == "gaussian":
        return Mollifier(kind="gaussian", fourier_profile=_gaussian_hat, all_vanishing=False)
    if kind == "moment_vanishing":
        return Mollifier(
            kind="moment_vanishing",
            fourier_profile=_moment_vanishing_hat,
            all_vanishing=True,
        )
    if kind == "custom":
        if fourier_profile is None:
            raise ValueError("custom mollifier needs a fourier_profile")
        at_zero = float(np.asarray(fourier_profile(np.array([0.0])))[0])
        if abs(at_zero - 1.0) > 1e-12:
            raise ValueError(f"not a mollifier: profile(0) = {at_zero!r}, expected 1")
        return Mollifier(kind="custom", fourier_profile=fourier_profile, all_vanishing=False)
    raise ValueError(f"unknown mollifier kind {kind!r}")


def _check_eps(eps: float) -> float:
    eps = float(eps)
    if not 0.0 < eps <= 1.0:
        raise ValueError(f"eps must lie in (0, 1], got {eps}")
    return eps


def regularize(f: GridFunction, mol: Mollifier, eps: float) -> GridFunction:
    """Convolve with the delta-net: coeff(k) -> rho_hat(eps*k) * coeff(k)."""
    eps = _check_eps(eps)
    return GridFunction.from_spectrum(f.grid, mol.weights(eps, f.grid.freqs) * f.spectrum)


def default_eps_grid(start: int = 3, stop: int = 10) -> np.ndarray:
    """Dyadic grid 2^-start .. 2^-stop, decreasing."""
    return 2.0 ** (-np.arange(start, stop + 1, dtype=np.float64))


def _check_eps_grid(eps_grid: Sequence[float]) -> np.ndarray:
    eps = np.asarray(list(eps_grid), dtype=np.float64)
    if eps.ndim != 1 or len(eps) < 2:
        raise ValueError("eps grid needs at least two points")
    if np.any(eps <= 0.0) or np.any(eps > 1.0):
        raise ValueError("eps grid must lie in (0, 1]")
    if np.any(np.diff(eps) >= 0):
        raise ValueError("eps grid must be strictly decreasing")
    return eps


def zygmund_blowup_sweep(
    f: GridFunction,
    mol: Mollifier,
    s: float,
    r: float,
    eps_grid: Sequence[float],
    partition: LPPartition,
):
    """Measure the dyadic Zygmund norm at smoothness s + r along an eps sweep.

    The smoothed function gains r derivatives at cost eps^-r, so the log-log
    slope of the recorded values against 1/eps estimates r.
    """
    from .estimate import SweepReport  # local import to avoid a cycle

    eps = _check_eps_grid(eps_grid)
    values = np.array(
        [besov_norm(regularize(f, mol, e), s + r, partition) for e in eps]
    )
    meta = {
        "quantity": "besov",
        "s": s,
        "r": r,
        "mollifier": mol.kind,
        "n": f.grid.n,
    }
    return SweepReport(eps=eps, values=values, meta=meta)


def sup_blowup_sweep(
    f: GridFunction, mol: Mollifier, eps_grid: Sequence[float]
):
    """Sup-norm variant of the sweep, for the positive-smoothness corollary."""
    from .estimate import SweepReport

    eps = _check_eps_grid(eps_grid)
    values = np.array([sup_norm(regularize(f, mol, e)) for e in eps])
    return SweepReport(eps=eps, values=values, meta={"quantity": "sup", "n": f.grid.n})


def log_blowup_check(
    f_with_s0: GridFunction, mol: Mollifier, eps_grid: Sequence[float]
) -> dict:
    """Borderline growth check: sup norm against log(1/eps).

    Requires a mollifier with all moments vanishing; the probe should have
    finite flat Zygmund norm with divergent partial sup norms (a lacunary
    series with unit coefficients).  Verifies the ratio is stable, not sharp:
    ok when max/min of the ratios over the last four points is below 2.
    """
    if not mol.all_vanishing:
        raise ValueError("log-growth check needs a moment-vanishing mollifier")
    eps = _check_eps_grid(eps_grid)
    ratios = np.array(
        [sup_norm(regularize(f_with_s0, mol, e)) / np.log(1.0 / e) for e in eps]
    )
    tail = ratios[-4:]
    lo, hi = float(np.min(tail)), float(np.max(tail))
    ok = lo > 0 and hi / lo < 2.0
    return {"eps": eps, "ratios": ratios, "ok": bool(ok), "tail_max_over_min": hi / lo if lo > 0 else np.inf}
