"""Named verification suites: each check returns verdicts {name, measured, bound, pass}.

These are the exit criteria of the laboratory, bundled so the command line,
the tests, and the demos all run the same code.  Every check is deterministic
for a fixed seed; grid sizes are chosen per check (desk scale, N <= 2048).
"""

from __future__ import annotations

import numpy as np

from .grid import GridFunction, lp_norm, make_grid, random_band_limited, sup_norm
from .lp import (
    besov_norm,
    block_functions,
    make_partition,
    sobolev_norm,
    square_function_norm,
    uniform_bound_constant,
)
from .mollify import (
    default_eps_grid,
    log_blowup_check,
    make_mollifier,
    sup_blowup_sweep,
    zygmund_blowup_sweep,
)
from .symbols import SampledSymbol, builtin, mollify_symbol, weierstrass_function
from .dsl import evaluate
from .operators import compose, bracket_power, quantize, transpose
from .paradiff import decompose, standard_rough_probe, three_part_sweep
from .estimate import (
    SweepReport,
    fit_rate,
    interpolation_check,
    op_norm,
    seminorm_bound_check,
    top_singular_value,
    uniformity_check,
)

__all__ = ["SUITES", "run_suite", "suite_names"]


def _verdict(name: str, measured: float, bound: float, ok: bool) -> dict:
    return {"name": name, "measured": float(measured), "bound": float(bound), "pass": bool(ok)}


def _scaling_eps_grid(grid) -> np.ndarray:
    # Keep the maximizing dyadic block on the lattice for r up to 2: the
    # smallest eps must not fall below 2^-J, else the sweep saturates and the
    # fitted slope sags.  Eight dyadic points ending at 2^-J.
    top = grid.top_level
    lo = max(0, top - 7)
    return 2.0 ** (-np.arange(lo, top + 1, dtype=np.float64))


def check_mollifier_scaling(n: int = 1024, seed: int = 7) -> list:
    """Smoothing gains r derivatives at cost eps^-r: fitted slope near r."""
    grid = make_grid(n)
    partition = make_partition(grid)
    mol = make_mollifier("gaussian")
    probe = GridFunction.from_samples(grid, weierstrass_function(grid, 0.5))
    eps = _scaling_eps_grid(grid)
    out = []
    for r in (0.5, 1.0, 2.0):
        rep = zygmund_blowup_sweep(probe, mol, 0.5, r, eps, partition)
        fit = fit_rate(rep, tail_points=min(6, len(eps)))
        ok = (fit.slope <= r + 0.1) and (fit.slope >= r - 0.15)
        out.append(_verdict(f"mollifier-scaling r={r:g}", fit.slope, r + 0.1, ok))
    return out


def check_sup_corollary(n: int = 1024, seed: int = 7) -> list:
    """Positive total smoothness keeps sup norms bounded along the sweep."""
    grid = make_grid(n)
    mol = make_mollifier("gaussian")
    probe = GridFunction.from_samples(grid, weierstrass_function(grid, 0.5))
    eps = _scaling_eps_grid(grid)
    rep = sup_blowup_sweep(probe, mol, eps)
    fit = fit_rate(rep, tail_points=min(6, len(eps)))
    out = []
    for r in (0.5, 1.0, 2.0):
        out.append(_verdict(f"sup-corollary r={r:g}", fit.slope, r + 0.1, fit.slope <= r + 0.1))
    return out


def check_log_case(n: int = 1024, seed: int = 7) -> list:
    """Flat lacunary probe under a moment-vanishing mollifier grows like log(1/eps)."""
    grid = make_grid(n)
    mol = make_mollifier("moment_vanishing")
    probe = GridFunction.from_samples(grid, weierstrass_function(grid, 0.0, flat=True))
    res = log_blowup_check(probe, mol, default_eps_grid(3, 10))
    return [_verdict("log-case ratio stability", res["tail_max_over_min"], 2.0, res["ok"])]


def check_partition_bounds(n: int = 512, n_probes: int = 200, seed: int = 7) -> list:
    """Block multipliers and their partial sums are uniformly sup-bounded."""
    grid = make_grid(n)
    partition = make_partition(grid)
    c = uniform_bound_constant(partition)
    worst = 0.0
    violations = 0
    for i in range(n_probes):
        f = random_band_limited(grid, n // 2 - 1, seed=seed * 7919 + i)
        base = sup_norm(f)
        blocks = block_functions(f, partition)
        sups = np.max(np.abs(blocks), axis=1)
        partial_spec = np.cumsum(partition.blocks * f.spectrum[np.newaxis, :], axis=0)
        partial = np.fft.ifft(np.fft.ifftshift(partial_spec, axes=1), axis=1) * grid.n
        psups = np.max(np.abs(partial), axis=1)
        ratio = max(float(np.max(sups)), float(np.max(psups))) / base
        worst = max(worst, ratio)
        if ratio > c:
            violations += 1
    out = [
        _verdict("partition-bound worst ratio", worst, c, worst <= c),
        _verdict("partition-bound violations", violations, 0.0, violations == 0),
    ]
    return out


def check_norm_equivalence(n: int = 256, n_probes: int = 500, seed: int = 7) -> list:
    """Square-function and bracket-weight Sobolev norms agree within one bracket."""
    grid = make_grid(n)
    partition = make_partition(grid)
    out = []
    cap = 8.0
    for s in (0.5, 1.0, 2.0):
        ratios = []
        for i in range(n_probes):
            f = random_band_limited(grid, n // 2 - 1, seed=seed * 104729 + i)
            ratios.append(square_function_norm(f, s, 2.0, partition) / sobolev_norm(f, s, 2.0))
        ratios = np.asarray(ratios)
        bracket = max(float(np.max(ratios)), 1.0 / float(np.min(ratios)))
        escapes = int(np.sum((ratios > cap) | (ratios < 1.0 / cap)))
        out.append(
            _verdict(f"norm-equivalence bracket s={s:g}", bracket, cap, bracket <= cap and escapes == 0)
        )
    return out


def check_elementary_reconstruction(n: int = 256, seed: int = 7) -> list:
    """Order-zero probes decompose with tiny residual, monotone in the truncation."""
    grid = make_grid(n)
    partition = make_partition(grid)
    out = []
    for label, text in (
        ("weier*chi(xi/8)", "weier(0.5, x) * chi(xi / 8)"),
        ("weier*chi(xi/4)", "weier(0.5, x) * chi(xi / 4)"),
    ):
        symbol = evaluate(text, grid, 0.0, partition=partition)
        residuals = []
        for V in (4, 8, 16):
            residuals.append(decompose(symbol, r=0.5, V=V, M0=4, partition=partition).residual)
        monotone = all(
            residuals[i + 1] <= residuals[i] * (1.0 + 1e-9) + 1e-15 for i in range(len(residuals) - 1)
        )
        out.append(_verdict(f"reconstruction residual {label}", residuals[-1], 1e-6, residuals[-1] < 1e-6))
        out.append(_verdict(f"reconstruction monotone {label}", float(monotone), 1.0, monotone))
    return out


def check_three_part(n: int = 512, seed: int = 7) -> list:
    """Low and diagonal bands flat in eps; high band blows up at most like eps^-h."""
    grid = make_grid(n)
    partition = make_partition(grid)
    mol = make_mollifier("gaussian")
    eps = default_eps_grid(3, 10)
    out = []
    for r, h, s in ((0.5, 1.0, 1.2), (0.5, 0.7, 1.0)):
        probe = standard_rough_probe(partition, r)
        sweep = three_part_sweep(probe, mol, s, 2.0, r, h, eps, method="exact2")
        for band in ("low", "diagonal"):
            slope = sweep[band]["fit"].slope
            out.append(
                _verdict(f"three-part {band} s={s:g} h={h:g}", slope, 0.1, -0.1 <= slope <= 0.1)
            )
        high = sweep["high"]["fit"].slope
        out.append(_verdict(f"three-part high s={s:g} h={h:g}", high, h + 0.15, high <= h + 0.15))
    return out


def check_main_theorem(n: int = 1024, seed: int = 7) -> list:
    """Rough multiplication operators blow up no faster than the regularity gap."""
    grid = make_grid(n)
    mol = make_mollifier("gaussian")
    probe = builtin(grid, "weierstrass", 0.5)
    eps = default_eps_grid(3, 10)
    operators = [quantize(mollify_symbol(probe, mol, float(e))) for e in eps]
    out = []
    r = 0.5
    for s in (0.9, 1.2, 1.5):
        values = np.array([op_norm(op, s, s, 2.0, method="exact2") for op in operators])
        fit = fit_rate(SweepReport(eps=eps, values=values, meta={"s": s}), tail_points=6)
        bound = (s - r) + 0.1
        out.append(_verdict(f"main-theorem slope s={s:g}", fit.slope, bound, fit.slope <= bound))
    values = np.array([op_norm(op, 0.3, 0.3, 2.0, method="exact2") for op in operators])
    fit = fit_rate(SweepReport(eps=eps, values=values, meta={"s": 0.3}), tail_points=6)
    out.append(
        _verdict("main-theorem flat regime s=0.3", fit.slope, 0.1, -0.1 <= fit.slope <= 0.1)
    )
    return out


def check_uniformity(n: int = 256, seed: int = 7) -> list:
    """Smooth symbols are bounded uniformly in eps at every smoothness, with duality."""
    grid = make_grid(n)
    mol = make_mollifier("gaussian")
    probe = builtin(grid, "smooth_s0")
    eps = default_eps_grid(3, 10)
    res = uniformity_check(probe, [-2.0, -0.5, 0.5, 2.0], 2.0, 0.0, eps, mol)
    out = []
    for s, fit in res["fits"].items():
        out.append(
            _verdict(f"uniformity slope s={s:g}", fit.slope, 0.1, -0.1 <= fit.slope <= 0.1)
        )
    op = quantize(mollify_symbol(probe, mol, 0.125))
    direct = op_norm(op, 0.5, 0.5, 2.0, method="exact2")
    dual = op_norm(transpose(op), -0.5, -0.5, 2.0, method="exact2")
    err = abs(direct - dual) / max(direct, 1e-300)
    out.append(_verdict("uniformity duality identity", err, 1e-8, err <= 1e-8))
    return out


def check_interpolation(n: int = 128, seed: int = 7) -> list:
    """Interior norms never exceed the endpoint maximum on the Sobolev scale."""
    grid = make_grid(n)
    mol = make_mollifier("gaussian")
    eps = default_eps_grid(3, 10)
    rough = builtin(grid, "weierstrass", 0.5)
    smooth = builtin(grid, "smooth_s0")
    three = SampledSymbol.from_values(
        grid, 3.0 * np.ones((n, n)), order=0.0, provenance=("builtin", "three")
    )
    nets = {
        "mult-by-3": lambda e: quantize(three),
        "bracket-inverse": lambda e: bracket_power(grid, -1.0),
        "rough-mult": lambda e: quantize(mollify_symbol(rough, mol, e)),
        "smooth-symbol": lambda e: quantize(mollify_symbol(smooth, mol, e)),
        "conjugated-rough": lambda e: compose(
            [bracket_power(grid, 0.3), quantize(mollify_symbol(rough, mol, e)), bracket_power(grid, -0.3)]
        ),
    }
    out = []
    for name, net in nets.items():
        results = interpolation_check(net, 0.2, 2.0, [0.25, 0.5, 0.75], 2.0, eps, tol=1e-6)
        worst = max(r.mid / (max(r.omega0, r.omega1) * (1.0 + 1e-6)) for r in results)
        ok = all(r.ok for r in results)
        out.append(_verdict(f"interpolation {name}", worst, 1.0, ok))
    return out


def check_seminorm_bounds(n: int = 256, seed: int = 7) -> list:
    """Operator norms are controlled by finitely many symbol seminorms, stably in eps."""
    grid = make_grid(n)
    smooth = builtin(grid, "smooth_s0")
    eps = default_eps_grid(3, 10)
    one = builtin(grid, "one")

    def net_constant(e: float) -> SampledSymbol:
        return one

    def net_smooth(e: float) -> SampledSymbol:
        return smooth

    def net_scaled(e: float) -> SampledSymbol:
        return SampledSymbol.from_values(
            grid, np.asarray(smooth.values) / e, order=0.0, provenance=("scaled-smooth", e)
        )

    nets = {"constant": net_constant, "smooth": net_smooth, "amplitude-1/eps": net_scaled}
    out = []
    for p in (1.5, 2.0, 3.0):
        for name, net in nets.items():
            res = seminorm_bound_check(net, p, 0.0, 0.0, 4, eps)
            out.append(
                _verdict(
                    f"seminorm-bound {name} p={p:g}", res["max_over_median"], 3.0, res["ok"]
                )
            )
    for s in (-1.0, 1.0):
        res = seminorm_bound_check(nets["amplitude-1/eps"], 2.0, s, 0.0, 4, eps)
        out.append(
            _verdict(f"seminorm-bound conjugated s={s:g}", res["max_over_median"], 3.0, res["ok"])
        )
    return out


def check_oracles(n: int = 256, seed: int = 7) -> list:
    """Iterative estimator against full decomposition; quantization against direct sums."""
    grid = make_grid(n)
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    worst_sv = 0.0
    for i in range(20):
        matrix = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        iterative = top_singular_value(matrix, seed=seed + i)
        full = float(np.linalg.svd(matrix, compute_uv=False)[0])
        worst_sv = max(worst_sv, abs(iterative - full) / full)
    mol = make_mollifier("gaussian")
    rough = builtin(grid, "weierstrass", 0.5)
    a = mollify_symbol(rough, mol, 0.125)
    op = quantize(a)
    worst_q = 0.0
    phases = np.exp(1j * np.outer(grid.points, grid.freqs))
    for i in range(20):
        f = random_band_limited(grid, n // 4, seed=seed * 31 + i)
        direct = (np.asarray(a.values) * phases) @ f.spectrum
        via_op = (op.matrix @ f.spectrum)
        worst_q = max(worst_q, float(np.max(np.abs(direct - via_op))))
    return [
        _verdict("oracle exact2 vs svd", worst_sv, 1e-8, worst_sv <= 1e-8),
        _verdict("oracle quantize vs direct sum", worst_q, 1e-11, worst_q <= 1e-11),
    ]


SUITES = {
    "zygmund": [check_mollifier_scaling, check_sup_corollary, check_log_case,
                check_partition_bounds, check_norm_equivalence],
    "main": [check_main_theorem],
    "uniform": [check_uniformity],
    "interp": [check_interpolation],
    "wong": [check_seminorm_bounds],
    "three-part": [check_elementary_reconstruction, check_three_part],
}
SUITES["all"] = [fn for key in ("zygmund", "main", "uniform", "interp", "wong", "three-part")
                 for fn in SUITES[key]] + [check_oracles]


def suite_names() -> list:
    return sorted(SUITES)


def run_suite(name: str, n: int | None = None, seed: int = 7) -> list:
    """Run a named suite; ``n`` overrides each check's default grid size."""
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from {suite_names()}")
    verdicts = []
    for fn in SUITES[name]:
        if n is None:
            verdicts.extend(fn(seed=seed))
        else:
            verdicts.extend(fn(n=n, seed=seed))
    return verdicts
