"""Feasibility sweeps over two-jump chains.

Every grid cell is a chain with two interfaces, each carrying a single
sample equal to its bounds.  Cells are evaluated (optionally in a process
pool) and written in row-major order over ``h1_low, h1_up, h2_low, h2_up``.
"""

from __future__ import annotations

import itertools
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .chain_engine import CornerChain, InterfaceData, certify
from .documents import format_float, write_atomic
from .errors import InvalidGrid, LockError
from .lock_core import DEFAULT_TOL

PARAMS = ("h1_low", "h1_up", "h2_low", "h2_up")
HEADER = PARAMS + ("square_sum", "verdict", "min_margin")
TEMPLATES = ("two-jump",)

WORKERS_ENV = "LOCKCERT_WORKERS"
# Grids smaller than this are evaluated in-process.
_PARALLEL_MIN_CELLS = 256


def _axis(name: str, spec) -> list[float]:
    if isinstance(spec, (int, float)) and not isinstance(spec, bool):
        values = [float(spec)]
    elif isinstance(spec, list):
        values = [float(v) for v in spec]
    elif isinstance(spec, dict):
        try:
            start, stop, steps = float(spec["start"]), float(spec["stop"]), int(spec["steps"])
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidGrid(f"{name}: range needs start, stop, steps") from exc
        if steps < 1:
            raise InvalidGrid(f"{name}: steps must be >= 1")
        values = [start] if steps == 1 else [float(x) for x in np.linspace(start, stop, steps)]
    else:
        raise InvalidGrid(f"{name}: expected a number, a list or a start/stop/steps object")
    if not values:
        raise InvalidGrid(f"{name}: no values")
    if not all(math.isfinite(v) for v in values):
        raise InvalidGrid(f"{name}: non-finite value")
    return values


def parse_grid(spec) -> tuple[dict[str, list[float]], int, float]:
    """Grid spec: a dict, a JSON string, or a path to a JSON file.

    Keys ``h1_low, h1_up, h2_low, h2_up`` each take a number, a list of
    values, or ``{"start", "stop", "steps"}``; ``n`` and ``tol`` are optional.
    """
    if isinstance(spec, (str, Path)):
        text = str(spec)
        if os.path.exists(text):
            text = Path(text).read_text(encoding="utf-8")
        try:
            spec = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InvalidGrid(f"grid is neither a file nor JSON: {exc.msg}") from exc
    if not isinstance(spec, dict):
        raise InvalidGrid("grid must be an object")
    unknown = set(spec) - set(PARAMS) - {"n", "tol"}
    if unknown:
        raise InvalidGrid(f"unknown grid keys: {sorted(unknown)}")
    missing = [p for p in PARAMS if p not in spec]
    if missing:
        raise InvalidGrid(f"missing grid parameters: {missing}")
    axes = {p: _axis(p, spec[p]) for p in PARAMS}
    n = spec.get("n", 3)
    if isinstance(n, bool) or not isinstance(n, int) or n < 3:
        raise InvalidGrid(f"n must be an integer >= 3, got {n!r}")
    tol = float(spec.get("tol", DEFAULT_TOL))
    if not tol > 0:
        raise InvalidGrid("tol must be positive")
    return axes, n, tol


def two_jump_chain(h1_low, h1_up, h2_low, h2_up, n: int = 3) -> CornerChain:
    return CornerChain(
        n,
        (
            InterfaceData("sigma_1", (h1_low,), (h1_up,)),
            InterfaceData("sigma_2", (h2_low,), (h2_up,)),
        ),
    )


def evaluate_cell(args) -> tuple:
    """``(square_sum, verdict, min_margin)`` for one grid cell."""
    (h1_low, h1_up, h2_low, h2_up), n, tol = args
    chain = two_jump_chain(h1_low, h1_up, h2_low, h2_up, n)
    try:
        cert = certify(chain, tol)
    except LockError as exc:
        return (h1_low * h1_low - h1_up * h1_up + h2_low * h2_low - h2_up * h2_up,
                f"Error({type(exc).__name__})", math.nan)
    return cert.square_sum, cert.label, cert.worst_margin


def worker_count() -> int:
    raw = os.environ.get(WORKERS_ENV)
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return os.cpu_count() or 1


def run_sweep(grid, template: str = "two-jump", workers: int | None = None) -> list[tuple]:
    if template not in TEMPLATES:
        raise InvalidGrid(f"unknown template {template!r}")
    axes, n, tol = parse_grid(grid)
    cells = list(itertools.product(*(axes[p] for p in PARAMS)))
    jobs = [(cell, n, tol) for cell in cells]
    workers = worker_count() if workers is None else workers
    if workers > 1 and len(jobs) >= _PARALLEL_MIN_CELLS:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(evaluate_cell, jobs, chunksize=64))
    else:
        results = [evaluate_cell(j) for j in jobs]
    return [cell + res for cell, res in zip(cells, results)]


def _field(v) -> str:
    if isinstance(v, float):
        return format_float(v) if math.isfinite(v) else "nan"
    return str(v)


def rows_to_csv(rows) -> str:
    lines = [",".join(HEADER)]
    lines += [",".join(_field(v) for v in row) for row in rows]
    return "\n".join(lines) + "\n"


def write_sweep(grid, csv_path, template: str = "two-jump", workers: int | None = None) -> list[tuple]:
    rows = run_sweep(grid, template, workers)
    write_atomic(csv_path, rows_to_csv(rows))
    return rows
