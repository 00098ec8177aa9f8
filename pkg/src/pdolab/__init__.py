"""Numerical laboratory for pseudodifferential operators with rough symbols.

The package measures, on the periodic lattice, how operator and function
norms blow up when a non-smooth symbol is regularised by convolution with a
shrinking mollifier: dyadic frequency analysis, Zygmund/Sobolev norms,
Kohn-Nirenberg quantization, elementary-symbol decompositions, and seeded
eps-sweep experiments with log-log rate fits.
"""

from .grid import GridFunction, PeriodicGrid, lp_norm, make_grid, random_band_limited, sup_norm
from .lp import (
    LPPartition,
    NormParams,
    apply_multiplier,
    besov_norm,
    check_support_inequality,
    make_partition,
    sobolev_norm,
    square_function_norm,
    uniform_bound_constant,
    zygmund_continuous_norm,
)
from .mollify import (
    Mollifier,
    default_eps_grid,
    log_blowup_check,
    make_mollifier,
    regularize,
    sup_blowup_sweep,
    zygmund_blowup_sweep,
)
from .symbols import (
    ModerateNet,
    SampledSymbol,
    builtin,
    moderate_net,
    mollify_symbol,
    seminorm,
    seminorm_table,
    zygmund_seminorm,
)
from .dsl import evaluate, parse, render
from .operators import (
    LatticeOperator,
    apply,
    bracket_power,
    compose,
    identity_operator,
    multiplier_operator,
    quantize,
    transpose,
)
from .paradiff import (
    ElementaryDecomposition,
    ElementarySymbol,
    SplitSymbol,
    assemble,
    decompose,
    split,
    standard_rough_probe,
    three_part_sweep,
)
from .estimate import (
    InterpolationCheckResult,
    RateFit,
    SweepReport,
    blowup_sweep,
    fit_rate,
    interpolation_check,
    op_norm,
    seminorm_bound_check,
    uniformity_check,
)

__version__ = "0.1.0"
