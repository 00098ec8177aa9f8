"""Sampled symbols a(x, xi), their seminorm tables, and the probe library.

A symbol is an N x N complex matrix of values a(x_j, k) over grid points times
the integer frequency lattice, tagged with a declared order m.  Seminorms of
symbol-class type are measured discretely:

  * xi-derivatives as iterated unit-step central differences on the lattice
    (the alpha outermost frequencies are excluded from sups to avoid
    wrap-around effects),
  * x-derivatives spectrally, column by column.

The probe library supplies the recurring test subjects: the truncated
Weierstrass function (rough with prescribed Holder exponent), its flat
variant, a smooth order-zero symbol, constants, and multiplication symbols.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .grid import GridFunction, PeriodicGrid
from .lp import LPPartition, besov_norm, japanese_bracket
from .mollify import Mollifier, _check_eps

__all__ = [
    "SampledSymbol",
    "SymbolSeminorms",
    "ModerateNet",
    "builtin",
    "weierstrass_function",
    "seminorm",
    "seminorm_table",
    "zygmund_seminorm",
    "mollify_symbol",
    "moderate_net",
]

SEMINORM_DEPTH = 4  # default (alpha, beta) table depth


@dataclass(frozen=True, eq=False)
class SampledSymbol:
    """a(x_j, k) on grid x lattice, with order and regularity metadata.

    ``values[j, i]`` is the symbol at x_j and frequency grid.freqs[i].  The
    growth constant c0 = sup_k sup_x |a| / <k>^m is fitted at construction.
    """

    grid: PeriodicGrid
    values: np.ndarray = field(repr=False)
    order: float = 0.0
    declared_regularity: float | None = None
    provenance: tuple = ("unknown",)
    growth_constant: float = 0.0

    @classmethod
    def from_values(
        cls,
        grid: PeriodicGrid,
        values: np.ndarray,
        order: float = 0.0,
        declared_regularity: float | None = None,
        provenance: tuple = ("unknown",),
    ) -> "SampledSymbol":
        values = np.array(values, dtype=np.complex128, copy=True, order="C")
        if values.shape != (grid.n, grid.n):
            raise ValueError(f"expected {(grid.n, grid.n)} values, got {values.shape}")
        if not np.all(np.isfinite(values.view(np.float64))):
            raise ValueError("symbol values must be finite")
        weight = japanese_bracket(grid.freqs) ** order
        c0 = float(np.max(np.abs(values) / weight[np.newaxis, :]))
        values.setflags(write=False)
        return cls(
            grid=grid,
            values=values,
            order=order,
            declared_regularity=declared_regularity,
            provenance=provenance,
            growth_constant=c0,
        )

    def column(self, i: int) -> GridFunction:
        """The x-profile at lattice index i, as a GridFunction."""
        return GridFunction.from_samples(self.grid, self.values[:, i])


@dataclass(frozen=True)
class SymbolSeminorms:
    """Seminorm tables of a symbol up to a fixed depth."""

    order: float
    depth: int
    table: dict  # (alpha, beta) -> |a|_{alpha,beta}
    zygmund: dict  # alpha -> weighted Zygmund seminorm
    notes: dict


def weierstrass_function(grid: PeriodicGrid, r: float, flat: bool = False) -> np.ndarray:
    """Samples of the truncated lacunary series sum_j c_j cos(2^j x).

    Coefficients are 2^{-jr} (or all 1 when flat), truncated at the grid's
    top dyadic level so the function stays band-limited.
    """
    x = grid.points
    total = np.zeros(grid.n)
    for j in range(grid.top_level + 1):
        c = 1.0 if flat else 2.0 ** (-j * r)
        total += c * np.cos((2 ** j) * x)
    return total


def builtin(grid: PeriodicGrid, name: str, param=None) -> SampledSymbol:
    """Probe library lookup.

    Names: ``one``, ``weierstrass`` (param: exponent r in (0,4)),
    ``lacunary_flat``, ``smooth_s0``, ``mult`` (param: DSL expression in x).
    """
    n = grid.n
    if name == "one":
        return SampledSymbol.from_values(
            grid, np.ones((n, n), dtype=np.complex128), order=0.0, provenance=("builtin", "one")
        )
    if name == "weierstrass":
        r = float(param if param is not None else 0.5)
        if not 0.0 < r < 4.0:
            raise ValueError(f"weierstrass exponent must lie in (0, 4), got {r}")
        w = weierstrass_function(grid, r)
        values = np.repeat(w[:, None], n, axis=1)
        return SampledSymbol.from_values(
            grid,
            values,
            order=0.0,
            declared_regularity=r,
            provenance=("builtin", f"weierstrass({r:g})"),
        )
    if name == "lacunary_flat":
        w = weierstrass_function(grid, 0.0, flat=True)
        values = np.repeat(w[:, None], n, axis=1)
        return SampledSymbol.from_values(
            grid, values, order=0.0, declared_regularity=0.0,
            provenance=("builtin", "lacunary_flat"),
        )
    if name == "smooth_s0":
        xi = grid.freqs.astype(np.float64)
        profile = 1.0 + xi * xi / (1.0 + xi * xi)
        values = np.sin(grid.points)[:, None] * profile[None, :]
        return SampledSymbol.from_values(
            grid, values, order=0.0, provenance=("builtin", "smooth_s0")
        )
    if name == "mult":
        from .dsl import evaluate_x_profile  # local import; dsl depends on symbols

        g = evaluate_x_profile(str(param), grid)
        values = np.repeat(np.asarray(g, dtype=np.complex128)[:, None], n, axis=1)
        return SampledSymbol.from_values(
            grid, values, order=0.0, provenance=("builtin", f"mult({param})")
        )
    raise ValueError(f"unknown builtin symbol {name!r}")


def _xi_difference(values: np.ndarray, alpha: int) -> np.ndarray:
    """Iterated central difference along the frequency axis, step 1.

    Each application shrinks the valid frequency range by one on both sides;
    callers exclude the outermost alpha columns from sups.
    """
    out = values
    for _ in range(alpha):
        out = 0.5 * (out[:, 2:] - out[:, :-2])
        out = np.pad(out, ((0, 0), (1, 1)))
    return out


def _x_derivative(values: np.ndarray, beta: int) -> np.ndarray:
    """Spectral x-derivative of every frequency column at once."""
    if beta == 0:
        return values
    n = values.shape[0]
    lfreqs = np.fft.fftfreq(n, d=1.0 / n)  # x-frequencies in FFT order
    hat = np.fft.fft(values, axis=0)
    hat *= (1j * lfreqs[:, None]) ** beta
    return np.fft.ifft(hat, axis=0)


def seminorm(a: SampledSymbol, alpha: int, beta: int, depth: int = SEMINORM_DEPTH) -> float:
    """Symbol-class seminorm sup <k>^{-m+alpha} |D_xi^alpha D_x^beta a|.

    xi-derivatives are unit-step central differences, x-derivatives spectral.
    """
    if alpha < 0 or beta < 0 or alpha > depth or beta > depth:
        raise ValueError(f"(alpha, beta) = {(alpha, beta)} exceeds depth {depth}")
    vals = _x_derivative(np.asarray(a.values), beta)
    vals = _xi_difference(vals, alpha)
    weight = japanese_bracket(a.grid.freqs) ** (-a.order + alpha)
    weighted = np.abs(vals) * weight[np.newaxis, :]
    if alpha > 0:
        weighted = weighted[:, alpha:-alpha]
    return float(np.max(weighted))


def zygmund_seminorm(
    a: SampledSymbol, alpha: int, r: float, partition: LPPartition,
    depth: int = SEMINORM_DEPTH,
) -> float:
    """sup_k <k>^{-(m - alpha + r)} * besov_norm of the alpha-th xi-difference."""
    if alpha < 0 or alpha > depth:
        raise ValueError(f"alpha = {alpha} exceeds depth {depth}")
    vals = _xi_difference(np.asarray(a.values), alpha)
    weight = japanese_bracket(a.grid.freqs) ** (-(a.order - alpha + r))
    lo, hi = alpha, a.grid.n - alpha
    best = 0.0
    for i in range(lo, hi):
        col = GridFunction.from_samples(a.grid, vals[:, i])
        best = max(best, weight[i] * besov_norm(col, r, partition))
    return float(best)


def seminorm_table(
    a: SampledSymbol,
    partition: LPPartition,
    depth: int = SEMINORM_DEPTH,
    r: float | None = None,
) -> SymbolSeminorms:
    """Full (alpha, beta) table plus the Zygmund column for a given r."""
    table = {
        (al, be): seminorm(a, al, be, depth=depth)
        for al in range(depth + 1)
        for be in range(depth + 1)
    }
    zyg = {}
    if r is not None:
        zyg = {al: zygmund_seminorm(a, al, r, partition, depth=depth) for al in range(depth + 1)}
    return SymbolSeminorms(
        order=a.order,
        depth=depth,
        table=table,
        zygmund=zyg,
        notes={"xi_difference": "central-unit-step"},
    )


def mollify_symbol(a: SampledSymbol, mol: Mollifier, eps: float) -> SampledSymbol:
    """Smooth every frequency column in x: x-coefficients scaled by rho_hat(eps*l)."""
    eps = _check_eps(eps)
    n = a.grid.n
    lfreqs = np.fft.fftfreq(n, d=1.0 / n)
    hat = np.fft.fft(np.asarray(a.values), axis=0)
    hat *= mol.weights(eps, lfreqs)[:, None]
    values = np.fft.ifft(hat, axis=0)
    return SampledSymbol.from_values(
        a.grid,
        values,
        order=a.order,
        declared_regularity=a.declared_regularity,
        provenance=("mollified", a.provenance, eps),
    )


@dataclass(frozen=True, eq=False)
class ModerateNet:
    """An eps-family of symbols with fitted seminorm growth exponents.

    ``exponents[(alpha, beta)]`` is the fitted N in |a_eps|_{alpha,beta} =
    O(eps^-N); residuals are the RMS misfit of the log-log regression.
    """

    generator: Callable[[float], SampledSymbol]
    eps_grid: np.ndarray
    exponents: dict
    residuals: dict
    notes: dict


def moderate_net(
    generator: Callable[[float], SampledSymbol],
    eps_grid: Sequence[float],
    depth: int = 2,
) -> ModerateNet:
    """Fit the seminorm growth of a symbol net by log-log regression.

    Entries whose seminorms vanish somewhere on the grid are reported with
    exponent 0 and residual nan (constant-zero nets are trivially moderate).
    """
    eps = np.asarray(list(eps_grid), dtype=np.float64)
    logs = np.log(1.0 / eps)
    tables = []
    for e in eps:
        a = generator(float(e))
        tables.append(
            {(al, be): seminorm(a, al, be, depth=depth) for al in range(depth + 1) for be in range(depth + 1)}
        )
    exponents, residuals = {}, {}
    for key in tables[0]:
        vals = np.array([t[key] for t in tables])
        if np.any(vals <= 0.0):
            exponents[key] = 0.0
            residuals[key] = float("nan")
            continue
        y = np.log(vals)
        slope, intercept = np.polyfit(logs, y, 1)
        fit = slope * logs + intercept
        exponents[key] = float(slope)
        residuals[key] = float(np.sqrt(np.mean((y - fit) ** 2)))
    return ModerateNet(
        generator=generator,
        eps_grid=eps,
        exponents=exponents,
        residuals=residuals,
        notes={"xi_difference": "central-unit-step", "depth": depth},
    )
