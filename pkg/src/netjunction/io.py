"""CSV / JSON output of trajectories, exact samples and error tables."""

from __future__ import annotations

import csv
import json
import os
from pathlib import Path
from typing import Sequence

import numpy as np

from .analysis import ErrorReport, Rates, convergence_rates, sample_points
from .exact import ExactEvaluator
from .scheme import GridSolution, Trajectory


def _fmt(value) -> str:
    if value is None:
        return ""
    return format(float(value), ".17g")


def _ensure_dir(out_dir) -> Path:
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out}: {exc}") from exc
    if not os.access(out, os.W_OK):
        raise OSError(f"output directory {out} is not writable")
    return out


def snapshot_name(t: float, prefix: str = "snapshot") -> str:
    return f"{prefix}_t{t:.6f}.csv"


def write_state_csv(path, state: GridSolution, t: float | None = None, values=None):
    """One row ``arc,t,x,rho`` per cell, sorted by arc then position."""
    t = state.t if t is None else t
    rows = values if values is not None else state.rho
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["arc", "t", "x", "rho"])
        for h, r in enumerate(rows):
            x = state.mesh.centers(h)
            tt = _fmt(t)
            for xi, ri in zip(x, r):
                w.writerow([h, tt, _fmt(xi), _fmt(ri)])


def write_snapshot_csv(trajectory: Trajectory, out_dir) -> list[Path]:
    """Write every snapshot plus ``conservation.csv``; returns the paths.

    Each snapshot file is named after the requested time; the ``t`` column
    carries the time actually reached.
    """
    if not trajectory.snapshots:
        raise ValueError("empty trajectory")
    out = _ensure_dir(out_dir)
    paths = []
    for snap in trajectory.snapshots:
        path = out / snapshot_name(snap.requested_t)
        write_state_csv(path, snap.state)
        paths.append(path)
    path = out / "conservation.csv"
    log = trajectory.log
    keys = ["t", "p", "residual", "boundary_in", "boundary_out", "mass_defect"]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["step"] + keys)
        count = len(log.get("t", ()))
        for k in range(count):
            w.writerow([k + 1] + [_fmt(log[key][k]) for key in keys])
    paths.append(path)
    return paths


def write_exact_csv(path, exact: ExactEvaluator, state: GridSolution, t: float, where: str = "left"):
    """Exact solution sampled where the error norms sample it."""
    values = [np.asarray(exact(t, sample_points(state.mesh, h, where), h)) for h in range(len(state.rho))]
    write_state_csv(path, state, t=t, values=values)


def write_report_json(path, report: ErrorReport, **extra):
    data = {
        "t": report.t,
        "cells_per_arc": report.cells_per_arc,
        "E_whole": report.whole,
        "E_incoming": report.incoming,
        "E_outgoing": report.outgoing,
        **extra,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(data, fh, indent=2)
        fh.write("\n")


TABLE_COLUMNS = ["N", "E_whole", "rate_whole", "E_incoming", "rate_incoming", "E_outgoing", "rate_outgoing"]


def table_rows(reports: Sequence[ErrorReport]) -> list[list[str]]:
    rates = [Rates(None, None, None)] + (convergence_rates(reports) if len(reports) > 1 else [])
    rows = []
    for rep, rt in zip(reports, rates):
        rows.append(
            [
                str(rep.cells_per_arc),
                _fmt(rep.whole), _fmt(rt.whole),
                _fmt(rep.incoming), _fmt(rt.incoming),
                _fmt(rep.outgoing), _fmt(rt.outgoing),
            ]
        )
    return rows


def write_table_csv(path, reports: Sequence[ErrorReport]) -> Path:
    """Convergence table, one row per resolution; the first row has no rates."""
    path = Path(path)
    _ensure_dir(path.parent)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TABLE_COLUMNS)
        w.writerows(table_rows(reports))
    return path
