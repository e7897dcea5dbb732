"""Artifact persistence: binary path dumps, sidecars and CSV emission.

Every output data file gets a JSON sidecar carrying the full configuration,
master seed, package version and a wall-clock stamp; reruns with identical
sidecar inputs reproduce byte-identical data files.  CSV uses '.' decimals
and 17 significant digits so floats round-trip exactly.
"""

from __future__ import annotations

import datetime
import json
from pathlib import Path

import numpy as np

from . import __version__
from .laws import BlockLaw
from .paths import LevyPath
from .spectral import validate_exponent


def fmt_float(x: float) -> str:
    return format(float(x), ".17g")


def write_sidecar(path: Path, config: dict) -> None:
    payload = dict(config)
    payload["version"] = __version__
    payload["created_utc"] = datetime.datetime.now(datetime.timezone.utc).isoformat()
    path.write_text(json.dumps(payload, indent=2, sort_keys=True))


def write_path_dump(out_prefix: Path, path: LevyPath, config: dict | None = None, csv: bool = False) -> Path:
    """Dump a path as little-endian float64 rows (t, x_1..x_d) plus sidecar."""
    out_prefix = Path(out_prefix)
    data = np.ascontiguousarray(path.graph_points(), dtype="<f8")
    bin_path = out_prefix.with_suffix(".bin")
    data.tofile(bin_path)
    sidecar = {
        "exponent": {"c": path.spec.c, "matrix": path.spec.matrix.tolist()},
        "laws": [l.as_dict() for l in path.laws],
        "seed": path.seed,
        "n": path.n,
        "rows": int(data.shape[0]),
        "columns": int(data.shape[1]),
        "layout": "row-major (t, x_1..x_d), little-endian float64",
    }
    if config:
        sidecar["config"] = config
    write_sidecar(out_prefix.with_suffix(".json"), sidecar)
    if csv:
        write_csv(
            out_prefix.with_suffix(".csv"),
            ["t"] + [f"x{i + 1}" for i in range(path.d)],
            data,
        )
    return bin_path


def read_path_dump(out_prefix: Path) -> LevyPath:
    out_prefix = Path(out_prefix)
    meta = json.loads(out_prefix.with_suffix(".json").read_text())
    rows, cols = meta["rows"], meta["columns"]
    data = np.fromfile(out_prefix.with_suffix(".bin"), dtype="<f8").reshape(rows, cols)
    spec = validate_exponent(
        np.asarray(meta["exponent"]["matrix"], dtype=float), meta["exponent"]["c"]
    )
    laws = tuple(BlockLaw.from_dict(l) for l in meta["laws"])
    return LevyPath(
        times=data[:, 0].copy(),
        values=data[:, 1:].copy(),
        seed=int(meta["seed"]),
        n=int(meta["n"]),
        spec=spec,
        laws=laws,
    )


def write_csv(path: Path, header: list[str], rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(fmt_float(x) for x in row))
    Path(path).write_text("\n".join(lines) + "\n")


def write_loglog_csv(path: Path, scales, statistics, stderrs=None) -> None:
    """Plot-ready CSV of (scale, statistic, stderr, log scale, log statistic)."""
    scales = np.asarray(scales, dtype=float)
    statistics = np.asarray(statistics, dtype=float)
    if stderrs is None:
        stderrs = np.zeros_like(statistics)
    rows = np.column_stack(
        [scales, statistics, stderrs, np.log(scales), np.log(statistics)]
    )
    write_csv(path, ["scale", "statistic", "stderr", "log_scale", "log_statistic"], rows)
