import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pdolab.grid import make_grid
from pdolab.lp import japanese_bracket
from pdolab.mollify import default_eps_grid, make_mollifier
from pdolab.operators import bracket_power, identity_operator, multiplier_operator, quantize
from pdolab.symbols import SampledSymbol, builtin, mollify_symbol
from pdolab.estimate import (
    RateFit,
    SweepReport,
    blowup_sweep,
    fit_rate,
    interpolation_check,
    op_norm,
    seminorm_bound_check,
    top_singular_value,
    uniformity_check,
)


class TestOpNorm:
    def test_identity(self, grid64):
        op = identity_operator(grid64)
        for s in (-1.0, 0.0, 2.0):
            assert op_norm(op, s, s, 2.0, "exact2") == pytest.approx(1.0, rel=1e-10)

    def test_inverse_bracket_attained_at_zero_mode(self, grid64):
        op = multiplier_operator(grid64, japanese_bracket(grid64.freqs) ** -1.0)
        assert op_norm(op, 0.7, 0.7, 2.0, "exact2") == pytest.approx(1.0, rel=1e-10)

    def test_constant_multiple(self, grid64):
        op = multiplier_operator(grid64, 2.0 * np.ones(grid64.n))
        assert op_norm(op, 0.0, 0.0, 2.0, "exact2") == pytest.approx(2.0, rel=1e-10)

    def test_exact2_requires_p2(self, grid64):
        with pytest.raises(ValueError, match="p = 2"):
            op_norm(identity_operator(grid64), 0.0, 0.0, 3.0, "exact2")

    def test_unknown_method(self, grid64):
        with pytest.raises(ValueError):
            op_norm(identity_operator(grid64), 0.0, 0.0, 2.0, "secret")

    def test_probe_is_lower_bound_within_factor(self, grid64):
        mol = make_mollifier("gaussian")
        ops = [
            identity_operator(grid64),
            multiplier_operator(grid64, japanese_bracket(grid64.freqs) ** -0.5),
            quantize(mollify_symbol(builtin(grid64, "weierstrass", 0.5), mol, 0.125)),
            quantize(builtin(grid64, "smooth_s0")),
        ]
        for op in ops:
            exact = op_norm(op, 0.5, 0.5, 2.0, "exact2")
            probe = op_norm(op, 0.5, 0.5, 2.0, "probe")
            assert probe <= exact * (1 + 1e-9)
            assert exact <= probe * 10.0

    def test_boyd_matches_exact2_at_p2(self, grid64):
        rng = np.random.default_rng(11)
        for i in range(20):
            matrix = rng.standard_normal((grid64.n, grid64.n)) + 1j * rng.standard_normal(
                (grid64.n, grid64.n)
            )
            from pdolab.operators import LatticeOperator

            op = LatticeOperator(grid=grid64, matrix=matrix, provenance=("test",))
            exact = op_norm(op, 0.0, 0.0, 2.0, "exact2")
            boyd = op_norm(op, 0.0, 0.0, 2.0, "boyd", seed=17 + i)
            assert abs(boyd - exact) / exact < 0.01

    def test_boyd_lp_multiplication_norm(self, grid64):
        # multiplication by a positive function has L^p -> L^p norm = sup
        g = 2.0 + np.sin(grid64.points)
        values = np.repeat(g[:, None], grid64.n, axis=1)
        op = quantize(SampledSymbol.from_values(grid64, values, order=0.0))
        for p in (1.5, 3.0):
            est = op_norm(op, 0.0, 0.0, p, "boyd")
            assert est == pytest.approx(3.0, rel=2e-2)
            assert est <= 3.0 * (1 + 1e-9)


class TestTopSingularValue:
    def test_matches_full_svd(self):
        rng = np.random.default_rng(2)
        for i in range(20):
            m = rng.standard_normal((96, 96)) + 1j * rng.standard_normal((96, 96))
            assert top_singular_value(m, seed=i) == pytest.approx(
                float(np.linalg.svd(m, compute_uv=False)[0]), rel=1e-8
            )

    def test_degenerate_top_cluster(self):
        # diagonal with a five-fold top value
        d = np.concatenate([np.full(5, 3.0), np.linspace(2.9, 0.1, 59)])
        m = np.diag(d.astype(np.complex128))
        assert top_singular_value(m) == pytest.approx(3.0, rel=1e-9)

    def test_zero_matrix(self):
        assert top_singular_value(np.zeros((16, 16), dtype=np.complex128)) == 0.0


class TestFitRate:
    def test_exact_power_law(self):
        eps = default_eps_grid(1, 8)
        rep = SweepReport(eps=eps, values=eps ** -1.5, meta={})
        fit = fit_rate(rep, tail_points=6)
        assert fit.slope == pytest.approx(1.5, abs=1e-12)
        assert fit.residual_rms < 1e-12

    def test_constant(self):
        eps = default_eps_grid(1, 8)
        rep = SweepReport(eps=eps, values=np.full(len(eps), 4.2), meta={})
        assert fit_rate(rep, 6).slope == pytest.approx(0.0, abs=1e-12)

    def test_noisy_power_law(self):
        rng = np.random.default_rng(0)
        eps = default_eps_grid(1, 8)
        values = eps ** -1.0 * (1.0 + 0.01 * rng.standard_normal(len(eps)))
        fit = fit_rate(SweepReport(eps=eps, values=values, meta={}), 8)
        assert 0.95 <= fit.slope <= 1.05
        assert fit.residual_rms < 0.02

    @given(st.floats(1e-6, 1e6))
    @settings(max_examples=50, deadline=None)
    def test_affine_equivariance(self, lam):
        eps = default_eps_grid(1, 8)
        values = eps ** -0.7
        base = fit_rate(SweepReport(eps=eps, values=values, meta={}), 6)
        scaled = fit_rate(SweepReport(eps=eps, values=lam * values, meta={}), 6)
        assert scaled.slope == pytest.approx(base.slope, abs=1e-12)
        assert scaled.intercept == pytest.approx(base.intercept + np.log(lam), abs=1e-9)

    def test_degenerate_marker(self):
        eps = default_eps_grid(1, 6)
        rep = SweepReport(eps=eps, values=np.zeros(len(eps)), meta={})
        fit = fit_rate(rep, 4)
        assert fit.degenerate and fit.slope == 0.0

    def test_tail_guard(self):
        eps = default_eps_grid(1, 6)
        rep = SweepReport(eps=eps, values=eps, meta={})
        with pytest.raises(ValueError):
            fit_rate(rep, 2)

    def test_report_validation(self):
        with pytest.raises(ValueError):
            SweepReport(eps=np.array([0.1, 0.2]), values=np.array([1.0, 1.0]), meta={})


class TestBlowupSweep:
    def test_constant_symbol_flat(self, grid64):
        mol = make_mollifier("gaussian")
        rep = blowup_sweep(builtin(grid64, "one"), mol, 1.0, 2.0, 0.0, default_eps_grid(3, 8))
        assert np.max(np.abs(rep.values - 1.0)) < 1e-9
        assert abs(fit_rate(rep, 6).slope) < 1e-9

    def test_rough_multiplication_rate_bracket(self):
        grid = make_grid(1024)
        mol = make_mollifier("gaussian")
        rep = blowup_sweep(
            builtin(grid, "weierstrass", 0.5), mol, 1.2, 2.0, 0.0, default_eps_grid(3, 10)
        )
        slope = fit_rate(rep, 6).slope
        assert 0.55 <= slope <= 0.80

    def test_below_regularity_no_blowup(self):
        grid = make_grid(512)
        mol = make_mollifier("gaussian")
        rep = blowup_sweep(
            builtin(grid, "weierstrass", 0.5), mol, 0.3, 2.0, 0.0, default_eps_grid(3, 10)
        )
        assert -0.1 <= fit_rate(rep, 6).slope <= 0.1

    def test_monotone_bands_in_s(self):
        grid = make_grid(512)
        mol = make_mollifier("gaussian")
        eps = default_eps_grid(3, 10)
        ops = [quantize(mollify_symbol(builtin(grid, "weierstrass", 0.5), mol, float(e))) for e in eps]
        slopes = []
        for s in (0.6, 0.9, 1.2, 1.5):
            values = np.array([op_norm(op, s, s, 2.0, "exact2") for op in ops])
            slopes.append(fit_rate(SweepReport(eps=eps, values=values, meta={}), 6).slope)
        assert all(b >= a - 1e-6 for a, b in zip(slopes, slopes[1:]))


class TestUniformity:
    def test_smooth_symbol_flat(self, grid128):
        mol = make_mollifier("gaussian")
        res = uniformity_check(
            builtin(grid128, "smooth_s0"), [-1.0, 0.5], 2.0, 0.0, default_eps_grid(3, 8), mol
        )
        for fit in res["fits"].values():
            assert abs(fit.slope) <= 0.1

    def test_constant_exactly_flat(self, grid64):
        mol = make_mollifier("gaussian")
        res = uniformity_check(
            builtin(grid64, "one"), [0.5], 2.0, 0.0, default_eps_grid(3, 8), mol
        )
        assert abs(res["fits"][0.5].slope) < 1e-9

    def test_gate_rejects_rough_symbol(self, grid128):
        mol = make_mollifier("gaussian")
        with pytest.raises(ValueError, match="gate"):
            uniformity_check(
                builtin(grid128, "weierstrass", 0.5), [0.5], 2.0, 0.0, default_eps_grid(3, 8), mol
            )


class TestInterpolation:
    def test_constant_multiplier(self, grid64):
        op = multiplier_operator(grid64, 3.0 * np.ones(grid64.n))
        results = interpolation_check(lambda e: op, 0.2, 2.0, [0.5], 2.0, [0.5, 0.25])
        for r in results:
            assert r.omega0 == pytest.approx(3.0, rel=1e-9)
            assert r.omega1 == pytest.approx(3.0, rel=1e-9)
            assert r.mid == pytest.approx(3.0, rel=1e-9)
            assert r.ok

    def test_inverse_bracket(self, grid64):
        op = multiplier_operator(grid64, japanese_bracket(grid64.freqs) ** -1.0)
        results = interpolation_check(lambda e: op, 0.2, 2.0, [0.25, 0.75], 2.0, [0.5])
        assert all(r.ok for r in results)
        assert all(r.mid == pytest.approx(1.0, rel=1e-9) for r in results)

    def test_rough_net(self, grid128):
        mol = make_mollifier("gaussian")
        rough = builtin(grid128, "weierstrass", 0.5)
        results = interpolation_check(
            lambda e: quantize(mollify_symbol(rough, mol, e)),
            0.2, 2.0, [0.5], 2.0, default_eps_grid(3, 6),
        )
        assert all(r.ok for r in results)

    def test_theta_validated(self, grid64):
        op = identity_operator(grid64)
        with pytest.raises(ValueError):
            interpolation_check(lambda e: op, 0.0, 1.0, [1.5], 2.0, [0.5])


class TestSeminormBound:
    def test_constant_net_unit_ratio(self, grid64):
        one = builtin(grid64, "one")
        res = seminorm_bound_check(lambda e: one, 2.0, 0.0, 0.0, 4, default_eps_grid(3, 8))
        assert np.allclose(res["ratios"], 1.0, atol=1e-9)
        assert res["ok"]

    def test_oscillating_net_inequality_direction(self, grid256):
        # norms stay bounded while the seminorm sup grows: the ratio only shrinks
        def generator(eps: float) -> SampledSymbol:
            q = int(round(1.0 / eps))
            values = np.sin(q * grid256.points)[:, None] * np.ones(grid256.n)[None, :]
            return SampledSymbol.from_values(grid256, values, order=0.0)

        res = seminorm_bound_check(generator, 2.0, 0.0, 0.0, 2, default_eps_grid(3, 6))
        assert np.all(np.diff(res["seminorms"]) > 0)
        assert np.all(res["ratios"] <= res["ratios"][0] * (1 + 1e-9))

    def test_rough_net_bounded_above(self, grid128):
        mol = make_mollifier("gaussian")
        rough = builtin(grid128, "weierstrass", 0.5)
        res = seminorm_bound_check(
            lambda e: mollify_symbol(rough, mol, e), 2.0, 0.0, 0.0, 4, default_eps_grid(3, 8)
        )
        assert np.all(res["ratios"] <= res["ratios"][0] * (1 + 1e-9))

    def test_depth_guard(self, grid64):
        one = builtin(grid64, "one")
        with pytest.raises(ValueError):
            seminorm_bound_check(lambda e: one, 2.0, 0.0, 0.0, 1, default_eps_grid(3, 6))
