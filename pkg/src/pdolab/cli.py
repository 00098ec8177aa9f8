"""Command-line front end: reproducible experiments over the library.

Every run validates its configuration before computing, writes its primary
JSON payload to stdout (and to the output directory), CSV tables where the
subcommand produces them, and a manifest recording config, versions, seed,
and wall time next to the outputs.  Exit codes: 0 success, 1 validation
error, 2 failed check suite.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .grid import make_grid
from .lp import (
    PROFILES,
    besov_norm,
    make_partition,
    sobolev_norm,
    square_function_norm,
    zygmund_continuous_norm,
)
from .mollify import make_mollifier, regularize, zygmund_blowup_sweep
from .symbols import builtin, weierstrass_function
from .dsl import DslError, evaluate, parse
from .operators import apply as apply_operator
from .operators import quantize
from .paradiff import decompose, standard_rough_probe, three_part_sweep
from .estimate import blowup_sweep, fit_rate
from .serialize import (
    dumps17,
    grid_function_from_json,
    grid_function_to_json,
    symbol_from_json,
)
from .suites import run_suite, suite_names

__all__ = ["main", "parse_eps_spec", "RunConfig"]

MOLLIFIER_NAMES = {"gaussian": "gaussian", "momvan": "moment_vanishing"}


class CliError(ValueError):
    """Configuration rejected before any computation."""


class _Parser(argparse.ArgumentParser):
    # usage text goes to stderr and validation failures exit with code 1
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        raise SystemExit(1)


def parse_eps_spec(text: str) -> np.ndarray:
    """Parse ``2^-A..2^-B`` (dyadic, factor 1/2) or a comma list of floats.

    Malformed specs raise CliError with the 0-based offset of the first
    invalid character.
    """

    def fail(offset: int, expected: str):
        raise CliError(f"bad eps spec at offset {offset}: expected {expected}")

    if ".." in text:
        i = 0

        def expect(token: str):
            nonlocal i
            if not text.startswith(token, i):
                fail(i, f"'{token}'")
            i += len(token)

        def expect_int() -> int:
            nonlocal i
            j = i
            while j < len(text) and text[j].isdigit():
                j += 1
            if j == i:
                fail(i, "an integer")
            value = int(text[i:j])
            i = j
            return value

        expect("2^-")
        a = expect_int()
        expect("..")
        expect("2^-")
        b = expect_int()
        if i != len(text):
            fail(i, "end of spec")
        if b < a:
            raise CliError(f"bad eps spec: 2^-{a}..2^-{b} is not decreasing")
        return 2.0 ** (-np.arange(a, b + 1, dtype=np.float64))
    values = []
    offset = 0
    for piece in text.split(","):
        try:
            values.append(float(piece))
        except ValueError:
            fail(offset, "a number")
        offset += len(piece) + 1
    eps = np.asarray(values, dtype=np.float64)
    if np.any(eps <= 0) or np.any(eps > 1):
        raise CliError("eps values must lie in (0, 1]")
    if np.any(np.diff(eps) >= 0):
        raise CliError("eps values must be strictly decreasing")
    return eps


@dataclass
class RunConfig:
    """Validated run parameters shared by the compute subcommands."""

    command: str
    n: int = 256
    seed: int = 7
    profile: str = "polynomial-spline"
    s: float = 0.0
    p: float = 2.0
    r: float = 0.5
    h: float = 0.0
    m: float = 0.0
    mollifier: str = "gaussian"
    method: str = "exact2"
    eps: np.ndarray = field(default_factory=lambda: 2.0 ** (-np.arange(3, 11, dtype=np.float64)))
    symbol_text: str | None = None
    symbol_file: str | None = None
    extra: dict = field(default_factory=dict)

    def validate(self):
        if self.n & (self.n - 1) or self.n < 16 or self.n > 4096:
            raise CliError(f"--n must be a power of two in [16, 4096], got {self.n}")
        try:
            NormParams(s=self.s, p=self.p, r=self.r, h=self.h, m=self.m)
        except ValueError as exc:
            raise CliError(str(exc))
        if self.profile not in PROFILES:
            raise CliError(f"--profile must be one of {sorted(PROFILES)}")
        if self.mollifier not in MOLLIFIER_NAMES:
            raise CliError(f"--mollifier must be one of {sorted(MOLLIFIER_NAMES)}")
        if self.method not in ("exact2", "probe", "boyd"):
            raise CliError(f"--method must be exact2, probe, or boyd, got {self.method}")
        if self.method == "exact2" and self.p != 2:
            raise CliError("--method exact2 requires --p 2")
        if len(self.eps) < 3:
            raise CliError("eps grid needs at least three points to fit a rate")


def _resolve_seed(args) -> int:
    env = os.environ.get("PDOLAB_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise CliError(f"PDOLAB_SEED must be an integer, got {env!r}")
    return args.seed


def _load_symbol(config: RunConfig, grid, partition):
    if config.symbol_file:
        path = Path(config.symbol_file)
        if not path.exists():
            raise CliError(f"symbol file not found: {path}")
        return symbol_from_json(path.read_text())
    if config.symbol_text:
        try:
            return evaluate(config.symbol_text, grid, config.m, partition=partition)
        except DslError as exc:
            raise CliError(f"bad --symbol: {exc}")
    raise CliError("a symbol is required: pass --symbol or --symbol-file")


def _write_outputs(outdir: Path, stem: str, payload: dict, csv_rows=None, csv_header=None):
    outdir.mkdir(parents=True, exist_ok=True)
    text = dumps17(payload)
    (outdir / f"{stem}.json").write_text(text + "\n")
    paths = [str(outdir / f"{stem}.json")]
    if csv_rows is not None:
        csv_path = outdir / f"{stem}.csv"
        with open(csv_path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(csv_header)
            for row in csv_rows:
                writer.writerow([
                    format(v, ".17g") if isinstance(v, float) else v for v in row
                ])
        paths.append(str(csv_path))
    return text, paths


def _write_manifest(outdir: Path, stem: str, argv, config_dict, seed, wall, outputs, results):
    manifest = {
        "schema": 1,
        "tool": "pdolab",
        "version": __version__,
        "argv": list(argv),
        "config": config_dict,
        "seed": seed,
        "versions": {
            "python": sys.version.split()[0],
            "numpy": np.__version__,
        },
        "wall_time_s": wall,
        "outputs": outputs,
        "results": results,
    }
    path = outdir / f"{stem}-manifest.json"
    path.write_text(dumps17(manifest) + "\n")
    return path


def _ratefit_payload(fit) -> dict:
    return {
        "slope": fit.slope,
        "intercept": fit.intercept,
        "residual_rms": fit.residual_rms,
        "points_used": fit.points_used,
        "degenerate": fit.degenerate,
    }


def _add_common(sub, *, grid_size=256):
    sub.add_argument("--n", type=int, default=grid_size, help="grid size (power of two)")
    sub.add_argument("--seed", type=int, default=7)
    sub.add_argument("--profile", default="polynomial-spline", choices=sorted(PROFILES))
    sub.add_argument("--outdir", default=".", help="directory for files and the manifest")


def _build_parser() -> _Parser:
    parser = _Parser(prog="pdolab", description=__doc__)
    parser.add_argument("--version", action="version", version=f"pdolab {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("norm", help="evaluate a function-space norm of a grid function")
    p.add_argument("--input", required=True, help="GridFunction JSON file")
    p.add_argument("--kind", required=True, choices=["besov", "zygmund", "sobolev", "sqfn"])
    p.add_argument("--s", type=float, default=0.0)
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--q", type=int, default=8, help="t samples per octave (zygmund)")
    _add_common(p)

    p = subs.add_parser("regularize", help="convolve a grid function with the delta-net")
    p.add_argument("--input", required=True)
    p.add_argument("--mollifier", default="gaussian", choices=sorted(MOLLIFIER_NAMES))
    p.add_argument("--eps", type=float, required=True)
    _add_common(p)

    p = subs.add_parser("quantize", help="apply a quantized symbol to a grid function")
    p.add_argument("--symbol", help="symbol expression")
    p.add_argument("--symbol-file", help="symbol JSON file")
    p.add_argument("--input", required=True)
    p.add_argument("--m", type=float, default=0.0, help="declared symbol order")
    _add_common(p)

    p = subs.add_parser("decompose", help="elementary decomposition of an order-zero symbol")
    p.add_argument("--symbol", help="symbol expression")
    p.add_argument("--symbol-file")
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--nu-max", type=int, required=True, dest="nu_max")
    p.add_argument("--m0", type=int, default=4)
    _add_common(p)

    p = subs.add_parser("three-part", help="band-split operator norms along an eps sweep")
    p.add_argument("--symbol", help="symbol expression (sampled at block centers)")
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--h", type=float, required=True)
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--eps", default="2^-3..2^-10")
    p.add_argument("--method", default="exact2", choices=["exact2", "probe", "boyd"])
    p.add_argument("--mollifier", default="gaussian", choices=sorted(MOLLIFIER_NAMES))
    _add_common(p, grid_size=512)

    p = subs.add_parser("sweep", help="operator-norm blow-up sweep for a mollified symbol")
    p.add_argument("--symbol", help="symbol expression")
    p.add_argument("--symbol-file")
    p.add_argument("--r", type=float, default=0.5)
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--m", type=float, default=0.0)
    p.add_argument("--mollifier", default="gaussian", choices=sorted(MOLLIFIER_NAMES))
    p.add_argument("--eps", default="2^-3..2^-10")
    p.add_argument("--method", default="exact2", choices=["exact2", "probe", "boyd"])
    _add_common(p)

    p = subs.add_parser("sweep-zygmund", help="Zygmund-norm blow-up sweep for a probe function")
    p.add_argument("--probe", default="weierstrass:0.5",
                   help="weierstrass:R | lacunary_flat | mult:<expr>")
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--mollifier", default="gaussian", choices=sorted(MOLLIFIER_NAMES))
    p.add_argument("--eps", default="2^-3..2^-10")
    _add_common(p)

    p = subs.add_parser("check", help="run a verification suite")
    p.add_argument("--suite", required=True, choices=suite_names())
    p.add_argument("--n", type=int, default=None, help="override grid size for every check")
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--outdir", default=".")

    p = subs.add_parser("report", help="consolidate manifests into one table")
    p.add_argument("manifests", nargs="*", help="manifest JSON paths")
    p.add_argument("--outdir", default=".")

    return parser


def _probe_function(grid, spec: str):
    if spec.startswith("weierstrass:"):
        r = float(spec.split(":", 1)[1])
        from .grid import GridFunction

        return GridFunction.from_samples(grid, weierstrass_function(grid, r))
    if spec == "lacunary_flat":
        from .grid import GridFunction

        return GridFunction.from_samples(grid, weierstrass_function(grid, 0.0, flat=True))
    if spec.startswith("mult:"):
        from .dsl import evaluate_x_profile
        from .grid import GridFunction

        return GridFunction.from_samples(grid, evaluate_x_profile(spec[5:], grid))
    raise CliError(f"unknown probe {spec!r}")


def _cmd_norm(args, seed) -> tuple:
    path = Path(args.input)
    if not path.exists():
        raise CliError(f"input file not found: {path}")
    f = grid_function_from_json(path.read_text())
    partition = make_partition(f.grid, args.profile)
    if args.kind == "besov":
        value = besov_norm(f, args.s, partition)
    elif args.kind == "zygmund":
        value = zygmund_continuous_norm(f, args.s, partition, args.q)
    elif args.kind == "sobolev":
        value = sobolev_norm(f, args.s, args.p)
    else:
        value = square_function_norm(f, args.s, args.p, partition)
    payload = {"schema": 1, "value": value}
    config = {"kind": args.kind, "s": args.s, "p": args.p, "n": f.grid.n, "profile": args.profile}
    return payload, None, None, config


def _cmd_regularize(args, seed) -> tuple:
    path = Path(args.input)
    if not path.exists():
        raise CliError(f"input file not found: {path}")
    f = grid_function_from_json(path.read_text())
    if not 0 < args.eps <= 1:
        raise CliError(f"--eps must lie in (0, 1], got {args.eps}")
    mol = make_mollifier(MOLLIFIER_NAMES[args.mollifier])
    out = regularize(f, mol, args.eps)
    payload = json.loads(grid_function_to_json(out))
    payload["schema"] = 1
    config = {"mollifier": args.mollifier, "eps": args.eps, "n": f.grid.n}
    return payload, None, None, config


def _cmd_quantize(args, seed) -> tuple:
    path = Path(args.input)
    if not path.exists():
        raise CliError(f"input file not found: {path}")
    f = grid_function_from_json(path.read_text())
    partition = make_partition(f.grid, args.profile)
    config = RunConfig(command="quantize", n=f.grid.n, seed=seed, profile=args.profile,
                       m=args.m, symbol_text=args.symbol, symbol_file=args.symbol_file)
    config.validate()
    a = _load_symbol(config, f.grid, partition)
    out = apply_operator(quantize(a), f)
    payload = json.loads(grid_function_to_json(out))
    payload["schema"] = 1
    return payload, None, None, {"m": args.m, "n": f.grid.n, "symbol": args.symbol or args.symbol_file}


def _cmd_decompose(args, seed) -> tuple:
    config = RunConfig(command="decompose", n=args.n, seed=seed, profile=args.profile,
                       r=args.r, symbol_text=args.symbol, symbol_file=args.symbol_file)
    config.validate()
    if args.nu_max < 1:
        raise CliError(f"--nu-max must be >= 1, got {args.nu_max}")
    grid = make_grid(args.n)
    partition = make_partition(grid, args.profile)
    a = _load_symbol(config, grid, partition)
    dec = decompose(a, r=args.r, V=args.nu_max, M0=args.m0, partition=partition)
    payload = {
        "schema": 1,
        "residual": dec.residual,
        "c_nu": [float(w) for w in dec.weights],
        "sup_akv": dec.sup_coefficient,
        "nu_max": dec.V,
        "m0": dec.M0,
        "block_energy": [float(v) for v in dec.block_energy()],
    }
    config_dict = {"n": args.n, "r": args.r, "nu_max": args.nu_max, "m0": args.m0,
                   "symbol": args.symbol or args.symbol_file, "profile": args.profile}
    return payload, None, None, config_dict


def _elementary_from_symbol(args, grid, partition):
    if args.symbol:
        try:
            a = evaluate(args.symbol, grid, 0.0, partition=partition)
        except DslError as exc:
            raise CliError(f"bad --symbol: {exc}")
        from .grid import GridFunction
        from .paradiff import ElementarySymbol

        coeffs = []
        half = grid.n // 2
        for k in range(partition.levels + 1):
            col = int(2 ** k)
            idx = half + col if col < half else half - col  # block center (Nyquist aliases)
            coeffs.append(GridFunction.from_samples(grid, np.asarray(a.values)[:, idx]))
        return ElementarySymbol(partition=partition, coefficients=tuple(coeffs), regularity=args.r)
    return standard_rough_probe(partition, args.r)


def _cmd_three_part(args, seed) -> tuple:
    eps = parse_eps_spec(args.eps)
    config = RunConfig(command="three-part", n=args.n, seed=seed, profile=args.profile,
                       s=args.s, p=args.p, r=args.r, h=args.h, eps=eps,
                       mollifier=args.mollifier, method=args.method, symbol_text=args.symbol)
    config.validate()
    if args.r <= 0 or args.s <= 0:
        raise CliError("--r and --s must be positive")
    grid = make_grid(args.n)
    partition = make_partition(grid, args.profile)
    probe = _elementary_from_symbol(args, grid, partition)
    mol = make_mollifier(MOLLIFIER_NAMES[args.mollifier])
    sweep = three_part_sweep(probe, mol, args.s, args.p, args.r, args.h, eps, method=args.method)
    rows = []
    for band in ("low", "diagonal", "high"):
        rep = sweep[band]["report"]
        for e, v in zip(rep.eps, rep.values):
            rows.append([float(e), band, float(v)])
    payload = {
        "schema": 1,
        "slopes": {band: _ratefit_payload(sweep[band]["fit"]) for band in sweep},
    }
    config_dict = {"n": args.n, "s": args.s, "p": args.p, "r": args.r, "h": args.h,
                   "method": args.method, "mollifier": args.mollifier,
                   "eps": [float(e) for e in eps], "symbol": args.symbol, "seed": seed}
    return payload, rows, ["eps", "part", "norm"], config_dict


def _cmd_sweep(args, seed) -> tuple:
    eps = parse_eps_spec(args.eps)
    config = RunConfig(command="sweep", n=args.n, seed=seed, profile=args.profile,
                       s=args.s, p=args.p, r=args.r, m=args.m, eps=eps,
                       mollifier=args.mollifier, method=args.method,
                       symbol_text=args.symbol, symbol_file=args.symbol_file)
    config.validate()
    grid = make_grid(args.n)
    partition = make_partition(grid, args.profile)
    a = _load_symbol(config, grid, partition)
    mol = make_mollifier(MOLLIFIER_NAMES[args.mollifier])
    rep = blowup_sweep(a, mol, args.s, args.p, args.m, eps, method=args.method, seed=seed)
    fit = fit_rate(rep, tail_points=min(6, len(eps)))
    rows = [[float(e), float(v)] for e, v in zip(rep.eps, rep.values)]
    payload = {"schema": 1, "ratefit": _ratefit_payload(fit)}
    config_dict = {"n": args.n, "s": args.s, "p": args.p, "r": args.r, "m": args.m,
                   "method": args.method, "mollifier": args.mollifier,
                   "eps": [float(e) for e in eps], "symbol": args.symbol or args.symbol_file,
                   "seed": seed}
    return payload, rows, ["eps", "value"], config_dict


def _cmd_sweep_zygmund(args, seed) -> tuple:
    eps = parse_eps_spec(args.eps)
    config = RunConfig(command="sweep-zygmund", n=args.n, seed=seed, profile=args.profile,
                       s=args.s, r=args.r, eps=eps, mollifier=args.mollifier)
    config.validate()
    grid = make_grid(args.n)
    partition = make_partition(grid, args.profile)
    f = _probe_function(grid, args.probe)
    mol = make_mollifier(MOLLIFIER_NAMES[args.mollifier])
    rep = zygmund_blowup_sweep(f, mol, args.s, args.r, eps, partition)
    fit = fit_rate(rep, tail_points=min(6, len(eps)))
    rows = [[float(e), float(v)] for e, v in zip(rep.eps, rep.values)]
    payload = {"schema": 1, "ratefit": _ratefit_payload(fit)}
    config_dict = {"n": args.n, "s": args.s, "r": args.r, "probe": args.probe,
                   "mollifier": args.mollifier, "eps": [float(e) for e in eps], "seed": seed}
    return payload, rows, ["eps", "norm"], config_dict


def _cmd_check(args, seed) -> tuple:
    verdicts = run_suite(args.suite, n=args.n, seed=seed)
    payload = {"schema": 1, "suite": args.suite, "verdicts": verdicts,
               "pass": all(v["pass"] for v in verdicts)}
    config_dict = {"suite": args.suite, "n": args.n, "seed": seed}
    return payload, None, None, config_dict


def _cmd_report(args, seed) -> tuple:
    runs = []
    rows = []
    overall = True
    for path_text in args.manifests:
        path = Path(path_text)
        if not path.exists():
            raise CliError(f"manifest not found: {path}")
        manifest = json.loads(path.read_text())
        run_id = path.stem
        results = manifest.get("results", {})
        config = manifest.get("config", {})
        key = {k: config.get(k) for k in ("s", "p", "r", "h")}
        key["suite"] = config.get("suite") or manifest.get("command")
        runs.append({"run_id": run_id, "key": key})
        for verdict in results.get("verdicts", []):
            overall = overall and bool(verdict.get("pass"))
        for row in results.get("rows", []):
            if len(row) == 2:
                rows.append([run_id, key["suite"], key["s"], key["p"], key["r"], key["h"],
                             row[0], "", row[1]])
            else:
                rows.append([run_id, key["suite"], key["s"], key["p"], key["r"], key["h"],
                             row[0], row[1], row[2]])
    payload = {"schema": 1, "runs": runs, "pass": overall, "row_count": len(rows)}
    header = ["run_id", "suite", "s", "p", "r", "h", "eps", "label", "value"]
    return payload, rows, header, {"manifests": list(args.manifests)}


_HANDLERS = {
    "norm": _cmd_norm,
    "regularize": _cmd_regularize,
    "quantize": _cmd_quantize,
    "decompose": _cmd_decompose,
    "three-part": _cmd_three_part,
    "sweep": _cmd_sweep,
    "sweep-zygmund": _cmd_sweep_zygmund,
    "check": _cmd_check,
    "report": _cmd_report,
}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        seed = _resolve_seed(args) if hasattr(args, "seed") else 7
        started = time.perf_counter()
        payload, rows, header, config_dict = _HANDLERS[args.command](args, seed)
        wall = time.perf_counter() - started
        outdir = Path(args.outdir)
        stem = f"pdolab-{args.command}"
        results = dict(payload)
        if rows is not None:
            results["rows"] = rows
        text, outputs = _write_outputs(outdir, stem, payload, rows, header)
        _write_manifest(outdir, stem, argv, config_dict, seed, wall, outputs, results)
        sys.stdout.write(text + "\n")
    except (CliError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    if args.command == "check" and not payload["pass"]:
        return 2
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
