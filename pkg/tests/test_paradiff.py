import numpy as np
import pytest

from pdolab.grid import GridFunction, sup_norm
from pdolab.lp import japanese_bracket, make_partition
from pdolab.mollify import default_eps_grid, make_mollifier
from pdolab.operators import bracket_power, compose, quantize
from pdolab.paradiff import (
    ElementarySymbol,
    assemble,
    decompose,
    split,
    standard_rough_probe,
    three_part_sweep,
)
from pdolab.symbols import SampledSymbol, builtin, mollify_symbol
from pdolab.dsl import evaluate
from pdolab.estimate import op_norm


@pytest.fixture(scope="module")
def mol():
    return make_mollifier("gaussian")


def single_level_probe(partition, level, samples):
    grid = partition.grid
    coeffs = [GridFunction.from_samples(grid, np.zeros(grid.n)) for _ in range(partition.levels + 1)]
    coeffs[level] = GridFunction.from_samples(grid, samples)
    return ElementarySymbol(partition=partition, coefficients=tuple(coeffs), regularity=0.5)


class TestElementarySymbol:
    def test_coefficient_count_enforced(self, partition64):
        with pytest.raises(ValueError):
            ElementarySymbol(partition=partition64, coefficients=(), regularity=0.5)

    def test_rough_probe_bounds(self, partition256):
        probe = standard_rough_probe(partition256, 0.5)
        c = probe.coefficient_bound()
        assert 1.0 <= c <= 4.0
        # Zygmund norms saturate the dyadic growth at every level
        from pdolab.lp import besov_norm

        for k, ak in enumerate(probe.coefficients):
            assert besov_norm(ak, 0.5, partition256) == pytest.approx(
                2.0 ** (k * 0.5), rel=1e-12
            )

    def test_assemble_separable(self, partition64):
        probe = single_level_probe(partition64, 3, np.cos(partition64.grid.points))
        symbol = assemble(probe)
        expected = np.cos(partition64.grid.points)[:, None] * partition64.blocks[3][None, :]
        assert np.max(np.abs(np.asarray(symbol.values) - expected)) < 1e-13


class TestSplit:
    def test_bands_sum_to_smoothed_symbol(self, partition256, mol):
        probe = standard_rough_probe(partition256, 0.5)
        for eps in (0.5, 2.0 ** -4):
            parts = split(probe, mol, eps)
            total = parts.low.values + parts.diagonal.values + parts.high.values
            direct = mollify_symbol(assemble(probe), mol, eps)
            assert np.max(np.abs(total - np.asarray(direct.values))) < 1e-12

    def test_single_mode_lands_in_diagonal(self, partition256, mol):
        grid = partition256.grid
        probe = single_level_probe(partition256, 5, np.cos(2 ** 5 * grid.points))
        parts = split(probe, mol, 0.25)
        assert np.max(np.abs(parts.low.values)) < 1e-14
        assert np.max(np.abs(parts.high.values)) < 1e-14
        assert np.max(np.abs(parts.diagonal.values)) > 0

    def test_high_frequency_coefficient_lands_in_high(self, partition256, mol):
        grid = partition256.grid
        probe = single_level_probe(partition256, 2, np.cos(2 ** 6 * grid.points))
        parts = split(probe, mol, 0.25)
        assert np.max(np.abs(parts.low.values)) < 1e-14
        assert np.max(np.abs(parts.diagonal.values)) < 1e-14
        assert np.max(np.abs(parts.high.values)) > 0

    def test_low_band_routing(self, partition256, mol):
        grid = partition256.grid
        probe = single_level_probe(partition256, 6, np.cos(2 * grid.points))
        parts = split(probe, mol, 0.25)
        assert np.max(np.abs(parts.diagonal.values)) < 1e-14
        assert np.max(np.abs(parts.high.values)) < 1e-14
        assert np.max(np.abs(parts.low.values)) > 0


class TestThreePartSweep:
    def test_constant_symbol_degenerate_high_band(self, partition64, mol):
        grid = partition64.grid
        coeffs = tuple(
            GridFunction.from_samples(grid, np.ones(grid.n)) for _ in range(partition64.levels + 1)
        )
        probe = ElementarySymbol(partition=partition64, coefficients=coeffs, regularity=0.5)
        out = three_part_sweep(probe, mol, 0.5, 2.0, 0.5, 1.0, default_eps_grid(3, 7))
        assert out["high"]["fit"].degenerate

    def test_band_slopes(self, mol):
        from pdolab.grid import make_grid

        grid = make_grid(256)
        partition = make_partition(grid)
        probe = standard_rough_probe(partition, 0.5)
        out = three_part_sweep(probe, mol, 1.0, 2.0, 0.5, 0.7, default_eps_grid(3, 10))
        assert -0.1 <= out["low"]["fit"].slope <= 0.1
        assert -0.1 <= out["diagonal"]["fit"].slope <= 0.1
        assert out["high"]["fit"].slope <= 0.85

    def test_validates_parameters(self, partition64, mol):
        probe = standard_rough_probe(partition64, 0.5)
        with pytest.raises(ValueError):
            three_part_sweep(probe, mol, -1.0, 2.0, 0.5, 1.0, default_eps_grid(3, 6))
        with pytest.raises(ValueError):
            three_part_sweep(probe, mol, 1.0, 1.0, 0.5, 1.0, default_eps_grid(3, 6))


class TestDecompose:
    def test_constant_symbol_canonical(self, grid64, partition64):
        dec = decompose(builtin(grid64, "one"), r=0.5, V=8, partition=partition64)
        assert dec.residual < 1e-10
        for (k, nu) in dec.entries:
            if nu != 0:
                assert np.max(np.abs(dec.coefficient(k, nu))) < 1e-8
        assert np.max(np.abs(dec.coefficient(0, 0) - 1.0)) < 1e-10

    def test_partition_block_probe_single_level(self, grid64, partition64):
        symbol = evaluate("weier(0.5, x) * psi(3, xi)", grid64, 0.0, partition=partition64)
        dec = decompose(symbol, r=0.5, V=8, partition=partition64)
        assert dec.residual < 1e-8
        energy = dec.block_energy()
        assert energy[3] > 1.0
        others = np.delete(energy, 3)
        assert np.max(others) < 1e-5 * energy[3]

    def test_windowed_probe_residuals_monotone(self, grid256, partition256):
        symbol = evaluate("weier(0.5, x) * chi(xi / 8)", grid256, 0.0, partition=partition256)
        residuals = [
            decompose(symbol, r=0.5, V=V, partition=partition256).residual for V in (4, 8, 16)
        ]
        assert residuals[-1] < 1e-6
        for a, b in zip(residuals, residuals[1:]):
            assert b <= a * (1 + 1e-9) + 1e-15

    def test_modulated_symbol_needs_modes(self, grid64, partition64):
        symbol = evaluate("weier(0.5, x) * psi(3, xi) * cos(xi)", grid64, 0.0, partition=partition64)
        res = {V: decompose(symbol, r=0.5, V=V, partition=partition64).residual for V in (2, 8)}
        assert res[2] > 1e-3
        assert res[8] < 1e-9

    def test_coefficients_uniformly_bounded(self, grid256, partition256):
        symbol = evaluate("weier(0.5, x) * chi(xi / 8)", grid256, 0.0, partition=partition256)
        dec = decompose(symbol, r=0.5, V=16, partition=partition256)
        w = np.max(np.abs(symbol.values))
        assert dec.sup_coefficient <= 2.0 * w  # one constant across all (k, nu)

    def test_weights_are_bracket_powers(self, grid64, partition64):
        dec = decompose(builtin(grid64, "one"), r=0.5, V=4, M0=4, partition=partition64)
        nus = np.arange(-4, 5)
        expected = (1.0 + nus.astype(float) ** 2) ** -2.0
        assert np.allclose(dec.weights, expected, rtol=1e-14)
        assert np.all(dec.weights > 0)
        assert np.array_equal(dec.weights, dec.weights[::-1])

    def test_rejects_order_one_symbol(self, grid64, partition64):
        values = np.repeat(japanese_bracket(grid64.freqs)[None, :], grid64.n, axis=0)
        bad = SampledSymbol.from_values(grid64, values, order=0.0)
        with pytest.raises(ValueError, match="order"):
            decompose(bad, r=0.5, V=8, partition=partition64)

    def test_rejects_bad_truncation(self, grid64, partition64):
        with pytest.raises(ValueError):
            decompose(builtin(grid64, "one"), r=0.5, V=0, partition=partition64)


class TestOrderReduction:
    def test_conjugation_matches_direct_norm(self, grid64, mol):
        # order-m elementary probe: separable rough coefficient times <xi>^m
        m = 1.0
        part = make_partition(grid64)
        base = standard_rough_probe(part, 0.5)
        flat = assemble(base)
        values = np.asarray(flat.values) * (japanese_bracket(grid64.freqs) ** m)[None, :]
        a_m = SampledSymbol.from_values(grid64, values, order=m)
        smoothed = mollify_symbol(a_m, mol, 0.125)
        op = quantize(smoothed)
        s = 0.8
        direct = op_norm(op, s + m, s, 2.0, method="exact2")
        conjugated = compose([op, bracket_power(grid64, -m)])
        reduced = op_norm(conjugated, s, s, 2.0, method="exact2")
        assert direct == pytest.approx(reduced, rel=1e-8)


class TestMollifyWindowCommutation:
    def test_weight_then_smooth_equals_smooth_then_weight(self, grid64, mol):
        a = builtin(grid64, "weierstrass", 0.5)
        weight = (japanese_bracket(grid64.freqs) ** -1.0)[None, :]
        first = mollify_symbol(
            SampledSymbol.from_values(grid64, np.asarray(a.values) * weight, order=-1.0),
            mol,
            0.125,
        )
        second = np.asarray(mollify_symbol(a, mol, 0.125).values) * weight
        assert np.max(np.abs(np.asarray(first.values) - second)) < 1e-12
