"""File formats: grid-function and symbol JSON, operator binaries, manifests.

All floating-point output is serialised with 17 significant digits so that
repeated runs are byte-identical; see docs/formats.md for the schemas.
"""

from __future__ import annotations

import json
import struct
import sys
from typing import IO

import numpy as np

from .grid import GridFunction, PeriodicGrid, make_grid
from .operators import LatticeOperator
from .symbols import SampledSymbol

__all__ = [
    "dumps17",
    "grid_function_to_json",
    "grid_function_from_json",
    "symbol_to_json",
    "symbol_from_json",
    "write_operator",
    "read_operator",
]

SCHEMA_VERSION = 1
_OPERATOR_MAGIC = b"PDOLABOP"


def _format_float(x: float) -> str:
    if np.isnan(x) or np.isinf(x):
        return '"%s"' % repr(float(x))
    if x == 0.0:
        return "0"  # normalise negative zero
    return format(float(x), ".17g")


def dumps17(obj) -> str:
    """Deterministic JSON with 17-significant-digit floats and sorted keys."""
    if isinstance(obj, dict):
        items = ",".join(f"{json.dumps(str(k))}:{dumps17(v)}" for k, v in sorted(obj.items()))
        return "{" + items + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ",".join(dumps17(v) for v in obj) + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _format_float(float(obj))
    if isinstance(obj, complex):
        return dumps17({"re": obj.real, "im": obj.imag})
    return json.dumps(obj)


def grid_function_to_json(f: GridFunction) -> str:
    payload = {
        "n": f.grid.n,
        "samples_re": [float(v) for v in f.samples.real],
        "samples_im": [float(v) for v in f.samples.imag],
    }
    return dumps17(payload)


def grid_function_from_json(text: str) -> GridFunction:
    data = json.loads(text)
    grid = make_grid(int(data["n"]))
    samples = np.asarray(data["samples_re"], dtype=np.float64) + 1j * np.asarray(
        data["samples_im"], dtype=np.float64
    )
    return GridFunction.from_samples(grid, samples)


def symbol_to_json(a: SampledSymbol) -> str:
    flat = np.asarray(a.values).reshape(-1)
    pairs = []
    for v in flat:
        pairs.append([float(v.real), float(v.imag)])
    return dumps17({"n": a.grid.n, "m": a.order, "values": pairs})


def symbol_from_json(text: str) -> SampledSymbol:
    data = json.loads(text)
    n = int(data["n"])
    grid = make_grid(n)
    pairs = np.asarray(data["values"], dtype=np.float64)
    if pairs.shape != (n * n, 2):
        raise ValueError(f"expected {n * n} [re, im] pairs, got shape {pairs.shape}")
    values = (pairs[:, 0] + 1j * pairs[:, 1]).reshape(n, n)
    return SampledSymbol.from_values(
        grid, values, order=float(data.get("m", 0.0)), provenance=("file",)
    )


def write_operator(op: LatticeOperator, fh: IO[bytes]) -> None:
    """16-byte header (magic, u32 size, u32 reserved) then row-major complex128."""
    fh.write(_OPERATOR_MAGIC)
    fh.write(struct.pack("<II", op.grid.n, 0))
    data = np.ascontiguousarray(op.matrix, dtype=np.complex128)
    if sys.byteorder != "little":  # pragma: no cover
        data = data.astype("<c16")
    fh.write(data.tobytes())


def read_operator(fh: IO[bytes]) -> LatticeOperator:
    magic = fh.read(8)
    if magic != _OPERATOR_MAGIC:
        raise ValueError(f"bad operator file magic {magic!r}")
    n, _reserved = struct.unpack("<II", fh.read(8))
    grid = make_grid(int(n))
    raw = fh.read(16 * n * n)
    matrix = np.frombuffer(raw, dtype="<c16").reshape(n, n).astype(np.complex128)
    return LatticeOperator(grid=grid, matrix=matrix, provenance=("file",))
