"""Shipped experiments: scenario files under ``data/presets`` and their drivers."""

from __future__ import annotations

import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Sequence

import numpy as np

from .analysis import ErrorReport, rel_l1_error
from .config import ScenarioConfig, config_from_dict
from .errors import ConfigError
from .exact import ExactEvaluator, MergeSolution, junction_riemann
from .io import snapshot_name, write_exact_csv, write_report_json, write_snapshot_csv, write_table_csv
from .scheme import PiecewiseConstant, Trajectory, godunov_line, run

PRESETS = (
    "merge-explicit",
    "riemann-2-1-a",
    "riemann-2-1-b",
    "riemann-1-2-a",
    "riemann-1-2-b",
    "riemann-2-2-a",
    "riemann-2-2-b",
    "single-arc-consistency",
    "convergence-table",
)

TABLE_CELLS = (60, 120, 600, 1200)
FULL_TABLE_CELLS = TABLE_CELLS + (6000, 12000)


def preset_data(name: str) -> dict:
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; valid names: {', '.join(PRESETS)}")
    text = resources.files("netjunction").joinpath("data", "presets", f"{name}.json").read_text("utf-8")
    return json.loads(text)


def preset_config(name: str, dx: float | None = None) -> ScenarioConfig:
    """Scenario of a preset, optionally on a different mesh.

    A `dx` override is snapped to the nearest step dividing every arc; the
    time step keeps the preset's ratio ``dt / dx``.
    """
    if name == "convergence-table":
        raise ConfigError("convergence-table is a study, not a single scenario")
    cfg = config_from_dict(preset_data(name))
    if dx is None:
        return cfg
    new_dx = commensurate_dx(cfg, dx)
    dt = None if cfg.dt is None else cfg.dt * new_dx / cfg.dx
    return config_from_dict({**cfg.to_dict(), "dx": new_dx, **({"dt": dt} if dt else {})})


def commensurate_dx(cfg: ScenarioConfig, dx: float) -> float:
    """Step closest to `dx` that divides the (common) arc length."""
    lengths = {a.length for a in cfg.arcs}
    if len(lengths) != 1:
        raise ConfigError("dx override needs arcs of equal length")
    length = lengths.pop()
    return length / max(2, round(length / dx))


def reference_solution(cfg: ScenarioConfig) -> ExactEvaluator | None:
    if cfg.reference == "merge-explicit":
        return MergeSolution(cfg.network)
    if cfg.reference == "junction-riemann":
        return junction_riemann(cfg.network, cfg.constant_states())[1]
    return None


@dataclass
class ScenarioResult:
    config: ScenarioConfig
    trajectory: Trajectory
    reports: dict[float, ErrorReport] = field(default_factory=dict)
    single_arc_gap: dict[float, float] = field(default_factory=dict)
    paths: list[Path] = field(default_factory=list)


def run_scenario(cfg: ScenarioConfig, out_dir=None, record: bool = True) -> ScenarioResult:
    """Run a scenario and compare it with its reference, if any.

    With `out_dir` the snapshots, the conservation log, exact samples and
    error reports are written there.
    """
    net, mesh, dt = cfg.network, cfg.mesh(), cfg.time_step()
    traj = run(net, mesh, cfg.initial_condition(), cfg.t_end, cfg.output_times, dt=dt, record=record)
    result = ScenarioResult(cfg, traj)
    exact = reference_solution(cfg)
    snaps = [s for s in traj.snapshots if s.requested_t > 0 or cfg.t_end == 0]
    if exact is not None:
        for snap in snaps:
            result.reports[snap.requested_t] = rel_l1_error(snap.state, exact, snap.t, dt=dt)
    if cfg.reference == "single-arc":
        for snap in snaps:
            result.single_arc_gap[snap.requested_t] = single_arc_gap(cfg, snap.state, dt)

    if out_dir is not None:
        out = Path(out_dir)
        result.paths += write_snapshot_csv(traj, out)
        for t, rep in result.reports.items():
            snap_state = traj.at(t)
            path = out / snapshot_name(t, prefix="exact")
            write_exact_csv(path, exact, snap_state, snap_state.t)
            report_path = out / f"report_t{t:.6f}.json"
            write_report_json(report_path, rep, dt=dt, dx=mesh.dx)
            result.paths += [path, report_path]
        if result.single_arc_gap:
            path = out / "single_arc.json"
            with open(path, "w", encoding="utf-8") as fh:
                json.dump({f"{t:.6f}": gap for t, gap in result.single_arc_gap.items()}, fh, indent=2)
                fh.write("\n")
            result.paths.append(path)
    return result


def single_arc_gap(cfg: ScenarioConfig, state, dt: float) -> float:
    """Max cellwise gap between a 1-1 run and the junction-free run shifted right.

    The line covers ``[0, L_in + L_out]`` and carries the network data moved
    by ``L_in``, so the junction ends up at ``x = L_in``.
    """
    net = cfg.network
    same_flux = replace(net.fluxes[0], label="") == replace(net.fluxes[1], label="")
    if net.m != 1 or net.n != 1 or not same_flux:
        raise ConfigError("single-arc reference needs a 1-1 network with one flux")
    shift = net.incoming[0].length
    pieces = [(a + shift, b + shift, v) for arc in cfg.arcs for a, b, v in arc.initial]
    _, line = godunov_line(
        net.fluxes[0],
        0.0,
        shift + net.outgoing[0].length,
        cfg.mesh().dx,
        PiecewiseConstant(tuple(pieces)),
        dt,
        state.step,
    )
    return float(np.max(np.abs(np.concatenate(state.rho) - line)))


def run_preset(name: str, out_dir=None, dx: float | None = None, **kwargs):
    """Run a shipped experiment; see :data:`PRESETS` for the names."""
    if name == "convergence-table":
        data = preset_data(name)
        cells = data["full_cells"] if kwargs.pop("full", False) else data["cells"]
        return convergence_study(cells, dt=data["dt"], t=data["t"], out_dir=out_dir, **kwargs)
    return run_scenario(preset_config(name, dx), out_dir)


def _merge_report(args) -> ErrorReport:
    cells, dt, t = args
    base = preset_config("merge-explicit")
    length = base.arcs[0].length
    cfg = config_from_dict({**base.to_dict(), "dx": length / cells, "dt": dt, "t_end": t, "output_times": [t]})
    res = run_scenario(cfg, record=False)
    return res.reports[t]


def worker_count(default: int | None = None) -> int:
    cap = os.environ.get("NETJUNCTION_THREADS")
    n = default or os.cpu_count() or 1
    if cap:
        try:
            n = min(n, max(1, int(cap)))
        except ValueError:
            raise ConfigError(f"NETJUNCTION_THREADS must be an integer, got {cap!r}") from None
    return n


def convergence_study(
    cells: Sequence[int] = TABLE_CELLS,
    dt: float = 0.25e-4,
    t: float = 2.4,
    out_dir=None,
    workers: int | None = None,
) -> list[ErrorReport]:
    """Merge-solution errors at time `t` for each resolution, fixed `dt`.

    Resolutions run in parallel (capped by ``NETJUNCTION_THREADS``); the
    reports come back ordered by resolution.
    """
    cells = sorted(int(c) for c in cells)
    jobs = [(c, dt, t) for c in cells]
    n = min(worker_count(workers), len(jobs))
    if n > 1:
        with ProcessPoolExecutor(max_workers=n) as pool:
            reports = list(pool.map(_merge_report, jobs))
    else:
        reports = [_merge_report(job) for job in jobs]
    if out_dir is not None:
        write_table_csv(Path(out_dir) / "table1.csv", reports)
    return reports
