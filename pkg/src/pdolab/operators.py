"""Quantization a(x, D) on the lattice, operator algebra, and transposition.

An operator is stored as the dense N x N matrix M acting on Fourier
coefficients and returning point values:

    (T f)(x_j) = sum_k M[j, k] coeff_f(k),
    quantize:    M[j, k] = a(x_j, k) exp(i k x_j).

Composition is exact matrix composition (no asymptotic expansions): products
of symbols in the calculus are realised by composing the quantized factors.
The transpose is the real-bilinear one for the pairing
<u, v> = (2*pi/N) sum_j u(x_j) v(x_j), with no conjugation, matching the
duality arguments the norm estimates rely on.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from .grid import GridFunction, PeriodicGrid
from .lp import japanese_bracket
from .symbols import SampledSymbol

__all__ = [
    "LatticeOperator",
    "quantize",
    "multiplier_operator",
    "identity_operator",
    "bracket_power",
    "apply",
    "transpose",
    "compose",
    "bilinear_pairing",
]


@lru_cache(maxsize=8)
def _fourier_matrices(n: int):
    """(F, E): forward DFT samples->coefficients and its inverse."""
    j = np.arange(n)
    k = np.arange(-(n // 2), n // 2)
    phase = np.exp(-2j * np.pi * np.outer(k, j) / n)
    F = phase / n  # (k, j)
    E = phase.conj().T  # (j, k)
    return F, E


@dataclass(frozen=True, eq=False)
class LatticeOperator:
    """Dense lattice operator: coefficients in, samples out."""

    grid: PeriodicGrid
    matrix: np.ndarray = field(repr=False)  # (N, N), columns indexed by k
    provenance: tuple = ("unknown",)

    @property
    def spectral_matrix(self) -> np.ndarray:
        """The same operator as a map coefficients -> coefficients."""
        F, _ = _fourier_matrices(self.grid.n)
        return F @ self.matrix


def quantize(a: SampledSymbol) -> LatticeOperator:
    """Kohn-Nirenberg quantization: (a(x,D) f)(x_j) = sum_k a(x_j,k) coeff(k) e^{ikx_j}."""
    grid = a.grid
    _, E = _fourier_matrices(grid.n)
    matrix = np.asarray(a.values) * E
    return LatticeOperator(grid=grid, matrix=matrix, provenance=("quantized", a.provenance))


def multiplier_operator(grid: PeriodicGrid, profile) -> LatticeOperator:
    """Operator of an x-independent symbol: a diagonal map on coefficients."""
    if callable(profile):
        values = np.asarray(profile(grid.freqs), dtype=np.complex128)
    else:
        values = np.asarray(profile, dtype=np.complex128)
    if values.shape != (grid.n,):
        raise ValueError(f"multiplier shape {values.shape} does not match lattice")
    _, E = _fourier_matrices(grid.n)
    return LatticeOperator(
        grid=grid, matrix=E * values[np.newaxis, :], provenance=("multiplier",)
    )


def identity_operator(grid: PeriodicGrid) -> LatticeOperator:
    return multiplier_operator(grid, np.ones(grid.n))


def bracket_power(grid: PeriodicGrid, t: float) -> LatticeOperator:
    """<D>^t, the Sobolev weight as an operator."""
    return multiplier_operator(grid, japanese_bracket(grid.freqs) ** t)


def apply(op: LatticeOperator, f: GridFunction) -> GridFunction:
    """Apply to a grid function; linear, grids must match."""
    if op.grid.n != f.grid.n:
        raise ValueError(f"grid mismatch: operator {op.grid.n}, function {f.grid.n}")
    if op.provenance[0] == "multiplier":
        # matrix-free path: diagonal in frequency
        _, E = _fourier_matrices(op.grid.n)
        diag = op.matrix[0, :] / E[0, :]
        return GridFunction.from_spectrum(f.grid, diag * f.spectrum)
    return GridFunction.from_samples(f.grid, op.matrix @ f.spectrum)


def bilinear_pairing(u: GridFunction, v: GridFunction) -> complex:
    """<u, v> = (2*pi/N) sum_j u(x_j) v(x_j), without conjugation."""
    if u.grid.n != v.grid.n:
        raise ValueError("grid mismatch in pairing")
    return complex(2.0 * np.pi / u.grid.n * np.sum(u.samples * v.samples))


def transpose(op: LatticeOperator) -> LatticeOperator:
    """Real-bilinear transpose: <T u, v> = <u, transpose(T) v> for the pairing above.

    Algebraically M_t = F^T M^T F^{-1} on the coefficient side.
    """
    F, E = _fourier_matrices(op.grid.n)
    matrix = F.T @ op.matrix.T @ E
    return LatticeOperator(grid=op.grid, matrix=matrix, provenance=("transposed", op.provenance))


def compose(ops: Sequence[LatticeOperator]) -> LatticeOperator:
    """Composition in writing order: compose([A, B, C]) applies C first."""
    ops = list(ops)
    if not ops:
        raise ValueError("compose needs at least one operator")
    n = ops[0].grid.n
    for op in ops:
        if op.grid.n != n:
            raise ValueError("compose requires a common grid")
    F, _ = _fourier_matrices(n)
    matrix = ops[-1].matrix
    for op in reversed(ops[:-1]):
        matrix = op.matrix @ (F @ matrix)
    return LatticeOperator(
        grid=ops[0].grid,
        matrix=matrix,
        provenance=("composed", tuple(op.provenance for op in ops)),
    )
