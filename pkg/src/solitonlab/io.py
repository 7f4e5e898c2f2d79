"""Binary trajectory records, CSV tables and JSON summaries."""
from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .grid import GridSpec

HEADER = struct.Struct("<dqd")  # L, n, dt

DIAGNOSTICS_COLUMNS = ("t", "energy", "charge", "momentum")
MODULATION_COLUMNS = ("t", "a", "v", "gamma", "mu", "h1_w", "residual", "lyapunov")
EFFECTIVE_COLUMNS = ("t", "a", "v", "gamma", "mu", "v_eff", "grad_v_eff", "b_eff")
SUMMARY_KEYS = ("epsilons", "y_T", "z_T", "a_gap_max", "slope", "stderr", "horizon", "truncated")


def write_trajectory(path, grid: GridSpec, dt: float, samples) -> None:
    """Little-endian: header ``L, n, dt``; per sample ``t`` then interleaved re/im doubles."""
    with open(path, "wb") as fh:
        fh.write(HEADER.pack(grid.L, grid.n, dt))
        for t, psi in samples:
            fh.write(struct.pack("<d", t))
            fh.write(np.ascontiguousarray(grid.check(psi), dtype="<c16").tobytes())


def read_trajectory(path) -> tuple[GridSpec, float, list[tuple[float, np.ndarray]]]:
    data = Path(path).read_bytes()
    L, n, dt = HEADER.unpack_from(data, 0)
    rec = 8 + 16 * n
    body = data[HEADER.size:]
    if len(body) % rec:
        raise ValueError(f"{path}: truncated trajectory record")
    samples = []
    for off in range(0, len(body), rec):
        (t,) = struct.unpack_from("<d", body, off)
        psi = np.frombuffer(body, dtype="<c16", count=n, offset=off + 8).astype(complex)
        samples.append((t, psi))
    return GridSpec(L, n), dt, samples


def write_csv(path, columns, rows) -> None:
    rows = np.asarray(rows, dtype=float).reshape(-1, len(columns))
    np.savetxt(path, rows, delimiter=",", header=",".join(columns), comments="", fmt="%.17g")


def read_csv(path) -> dict[str, np.ndarray]:
    with open(path, encoding="utf-8") as fh:
        columns = fh.readline().strip().split(",")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return {c: data[:, i] for i, c in enumerate(columns)}


def _jsonable(v):
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (np.floating, float)):
        return float(v) if np.isfinite(v) else None
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.bool_):
        return bool(v)
    return v


def write_json(path, payload: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump({k: _jsonable(v) for k, v in payload.items()}, fh, indent=2)
        fh.write("\n")
