import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pdolab.grid import GridFunction, lp_norm, make_grid, random_band_limited, sup_norm

from conftest import direct_dft


class TestMakeGrid:
    def test_small_grid_frequencies(self):
        g = make_grid(16)
        assert list(g.freqs) == list(range(-8, 8))
        assert g.n == 16

    def test_rejects_non_power_of_two(self):
        with pytest.raises(ValueError, match="power of two"):
            make_grid(15)

    def test_rejects_undersized(self):
        with pytest.raises(ValueError):
            make_grid(8)

    def test_point_spacing(self):
        g = make_grid(1024)
        assert g.points[1] == pytest.approx(2 * np.pi / 1024, abs=0, rel=1e-15)

    def test_top_level(self):
        assert make_grid(64).top_level == 5
        assert make_grid(1024).top_level == 9


class TestTransform:
    def test_single_mode(self, grid64):
        f = GridFunction.from_samples(grid64, np.exp(3j * grid64.points))
        assert f.coeff(3) == pytest.approx(1.0, abs=1e-13)
        others = np.abs(f.spectrum).copy()
        others[grid64.n // 2 + 3] = 0.0
        assert np.max(others) < 1e-13

    def test_constant(self, grid64):
        f = GridFunction.from_samples(grid64, np.ones(64))
        assert f.coeff(0) == pytest.approx(1.0, abs=1e-14)

    def test_roundtrip_against_direct_summation(self, grid64):
        rng = np.random.default_rng(3)
        samples = rng.standard_normal(64) + 1j * rng.standard_normal(64)
        f = GridFunction.from_samples(grid64, samples)
        # forward transform against the O(N^2) oracle
        oracle = direct_dft(samples)
        assert np.max(np.abs(f.spectrum - oracle)) < 1e-12
        # inverse of forward reproduces the samples
        g = GridFunction.from_spectrum(grid64, f.spectrum)
        assert np.max(np.abs(g.samples - samples)) / np.max(np.abs(samples)) < 1e-12

    def test_shape_mismatch(self, grid64):
        with pytest.raises(ValueError):
            GridFunction.from_samples(grid64, np.ones(32))


class TestLpNorm:
    def test_constant(self, grid64):
        f = GridFunction.from_samples(grid64, np.ones(64))
        for p in (1.5, 2.0, 3.0, 7.0):
            assert lp_norm(f, p) == pytest.approx((2 * np.pi) ** (1 / p), rel=1e-13)

    def test_cosine_against_quadrature(self, grid64):
        # oracle: trapezoid quadrature of cos^2 on a fine grid
        x = np.linspace(0.0, 2 * np.pi, 200001)
        oracle = np.sqrt(np.trapezoid(np.cos(x) ** 2, x))
        f = GridFunction.from_samples(grid64, np.cos(grid64.points))
        assert lp_norm(f, 2.0) == pytest.approx(oracle, rel=1e-9)
        assert lp_norm(f, 2.0) == pytest.approx(np.sqrt(np.pi), rel=1e-13)

    def test_zero(self, grid64):
        f = GridFunction.from_samples(grid64, np.zeros(64))
        assert lp_norm(f, 2.5) == 0.0

    @pytest.mark.parametrize("p", [0.5, 1.0, np.inf])
    def test_rejects_bad_exponent(self, grid64, p):
        f = GridFunction.from_samples(grid64, np.ones(64))
        with pytest.raises(ValueError):
            lp_norm(f, p)


class TestSupNorm:
    def test_cosine(self, grid64):
        assert sup_norm(GridFunction.from_samples(grid64, np.cos(grid64.points))) == 1.0

    def test_negative_constant(self, grid64):
        assert sup_norm(GridFunction.from_samples(grid64, -2.0 * np.ones(64))) == 2.0

    def test_unimodular(self, grid64):
        f = GridFunction.from_samples(grid64, np.exp(5j * grid64.points))
        assert sup_norm(f) == pytest.approx(1.0, rel=1e-14)


class TestRandomBandLimited:
    def test_deterministic(self, grid64):
        a = random_band_limited(grid64, 8, seed=1)
        b = random_band_limited(grid64, 8, seed=1)
        assert np.array_equal(a.samples, b.samples)

    def test_support(self, grid64):
        f = random_band_limited(grid64, 8, seed=1)
        assert f.coeff(20) == 0.0
        assert f.coeff(-9) == 0.0

    def test_normalisation(self, grid64):
        f = random_band_limited(grid64, 8, seed=5)
        assert lp_norm(f, 2.0) / np.sqrt(2 * np.pi) == pytest.approx(1.0, abs=1e-12)

    def test_rejects_out_of_range(self, grid64):
        with pytest.raises(ValueError):
            random_band_limited(grid64, 32, seed=0)


class TestInvariants:
    def test_parseval_over_probes(self, grid64):
        for i in range(100):
            f = random_band_limited(grid64, 31, seed=1000 + i)
            lhs = lp_norm(f, 2.0) ** 2 / (2 * np.pi)
            rhs = float(np.sum(np.abs(f.spectrum) ** 2))
            assert lhs == pytest.approx(rhs, rel=1e-10)

    @given(st.integers(0, 10_000))
    @settings(max_examples=40, deadline=None)
    def test_pointwise_monotonicity(self, seed):
        g = make_grid(32)
        rng = np.random.default_rng(seed)
        small = rng.standard_normal(32) + 1j * rng.standard_normal(32)
        bigger = np.abs(small) + np.abs(rng.standard_normal(32))
        fs = GridFunction.from_samples(g, small)
        fb = GridFunction.from_samples(g, bigger)
        for p in (1.5, 2.0, 4.0):
            assert lp_norm(fs, p) <= lp_norm(fb, p) * (1 + 1e-12)

    @given(st.integers(0, 10_000))
    @settings(max_examples=40, deadline=None)
    def test_holder_consistency(self, seed):
        g = make_grid(32)
        rng = np.random.default_rng(seed)
        f = GridFunction.from_samples(g, rng.standard_normal(32) + 1j * rng.standard_normal(32))
        for p in (1.5, 2.0, 4.0):
            assert lp_norm(f, p) <= (2 * np.pi) ** (1 / p) * sup_norm(f) * (1 + 1e-12)
