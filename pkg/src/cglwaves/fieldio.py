"""On-disk formats: field files, path/trajectory/spectrum CSV exports.

A field file is UTF-8 text: `#`-prefixed metadata lines carrying the
problem parameters and grid shape, then one `r,re,im` row per node with 17
significant digits (exact float64 round trip). Files written from equal
inputs are byte-identical.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import BadParameter
from .grid import Domain, ProblemParams, RadialField, build_grid

__all__ = [
    "write_field",
    "read_field",
    "write_path_csv",
    "read_path_csv",
    "write_trajectory_csv",
    "write_spectrum_csv",
    "write_json",
]

_FMT = "%.17g"


def write_field(path: str | Path, field: RadialField, params: ProblemParams) -> None:
    grid = field.grid
    vals = np.asarray(field.values, dtype=complex)
    lines = [
        f"# domain={grid.domain.value}",
        f"# dim={grid.dim}",
        f"# alpha={_FMT % params.alpha}",
        f"# rho={_FMT % params.rho}",
        f"# theta={_FMT % params.theta}",
        f"# M={grid.npoints}",
        f"# rmax={_FMT % grid.rmax}",
    ]
    for r, v in zip(grid.r, vals):
        lines.append(f"{_FMT % r},{_FMT % v.real},{_FMT % v.imag}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_field(path: str | Path) -> tuple[RadialField, ProblemParams]:
    text = Path(path).read_text(encoding="utf-8")
    meta: dict[str, str] = {}
    rows: list[tuple[float, float, float]] = []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            key, _, value = line.lstrip("# ").partition("=")
            meta[key.strip()] = value.strip()
            continue
        parts = line.split(",")
        if len(parts) != 3:
            raise BadParameter(f"malformed field row: {line!r}")
        rows.append((float(parts[0]), float(parts[1]), float(parts[2])))
    required = {"domain", "dim", "alpha", "rho", "theta", "M", "rmax"}
    missing = required - meta.keys()
    if missing:
        raise BadParameter(f"field file missing metadata: {sorted(missing)}")
    params = ProblemParams(
        domain=Domain(meta["domain"]),
        dim=int(meta["dim"]),
        alpha=float(meta["alpha"]),
        rho=float(meta["rho"]),
        theta=float(meta["theta"]),
    )
    npoints = int(meta["M"])
    if len(rows) != npoints:
        raise BadParameter(f"expected {npoints} rows, found {len(rows)}")
    grid = build_grid(params, npoints, float(meta["rmax"]))
    re = np.array([row[1] for row in rows])
    im = np.array([row[2] for row in rows])
    vals = re + 1j * im if np.any(im != 0.0) else re.astype(complex)
    return RadialField(grid, vals), params


def write_path_csv(path: str | Path, cont_path) -> None:
    """Columns gamma,omega,residual,l2norm,peak, one row per branch point."""
    lines = ["gamma,omega,residual,l2norm,peak"]
    for pt in cont_path.points:
        grid = pt.u.grid
        l2 = float(np.sqrt(np.sum(grid.w * np.abs(pt.u.values) ** 2)))
        peak = float(np.max(np.abs(pt.u.values)))
        lines.append(
            ",".join(
                _FMT % x for x in (pt.gamma, pt.omega, pt.residual, l2, peak)
            )
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_path_csv(path: str | Path) -> dict[str, np.ndarray]:
    text = Path(path).read_text(encoding="utf-8").splitlines()
    if not text:
        raise BadParameter(f"empty path file: {path}")
    header = text[0].split(",")
    data = [[float(x) for x in line.split(",")] for line in text[1:] if line.strip()]
    if not data:
        raise BadParameter(f"path file has no rows: {path}")
    arr = np.array(data)
    return {name: arr[:, j] for j, name in enumerate(header)}


def write_trajectory_csv(path: str | Path, summary) -> None:
    """Columns t,l2norm,drift (drift empty when no reference was given)."""
    lines = ["t,l2norm,drift"]
    for k, t in enumerate(summary.times):
        drift = _FMT % summary.drifts[k] if summary.drifts is not None else ""
        lines.append(f"{_FMT % t},{_FMT % summary.norms[k]},{drift}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_spectrum_csv(path: str | Path, spectrum) -> None:
    """Columns j,lambda."""
    lines = ["j,lambda"]
    for j, lam in enumerate(spectrum.eigenvalues, start=1):
        lines.append(f"{j},{_FMT % lam}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_json(path: str | Path, payload: dict) -> None:
    Path(path).write_text(
        json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
