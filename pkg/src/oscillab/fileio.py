"""Deterministic CSV / JSON / PGM writers.

Every CSV starts with a comment line carrying the config hash, then the
column header.  Floats are written with ``repr`` (shortest round-trip form)
so identical configurations produce byte-identical files.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np


def config_hash(config: dict) -> str:
    """Stable 16-hex-digit digest of a canonical-JSON config."""
    canon = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()[:16]


def format_value(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return str(v)


def write_csv(path, columns: Sequence[str], rows: Iterable[Sequence], cfg_hash: str) -> None:
    lines = [f"# config={cfg_hash}", ",".join(columns)]
    for row in rows:
        lines.append(",".join(format_value(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n")


def dumps_json(obj: dict) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def write_json(path, obj: dict) -> None:
    Path(path).write_text(dumps_json(obj))


def write_pgm(path, data: np.ndarray, cfg_hash: str) -> None:
    """8-bit binary PGM heat map (rows = time, columns = space) plus a JSON
    sidecar with the affine value mapping, so images stay reconstructible."""
    data = np.asarray(data, dtype=float)
    if data.ndim != 2:
        raise ValueError(f"expected a 2-D array, got shape {data.shape}")
    finite = data[np.isfinite(data)]
    vmin = float(finite.min()) if finite.size else 0.0
    vmax = float(finite.max()) if finite.size else 0.0
    span = vmax - vmin
    if span <= 0.0:
        scaled = np.zeros_like(data)
    else:
        scaled = (data - vmin) / span
    scaled = np.where(np.isfinite(scaled), np.clip(scaled, 0.0, 1.0), 0.0)
    pixels = np.round(255.0 * scaled).astype(np.uint8)
    rows, cols = data.shape
    header = f"P5\n{cols} {rows}\n255\n".encode()
    Path(path).write_bytes(header + pixels.tobytes())
    write_json(
        str(path) + ".json",
        {"vmin": vmin, "vmax": vmax, "rows": rows, "cols": cols, "config": cfg_hash},
    )
