"""Finite-volume time marching on the network.

Cells on incoming arcs are indexed by ``l = -N, ..., -1`` and on outgoing arcs
by ``l = 0, ..., N-1``; cell ``l`` covers ``[l dx, (l+1) dx)`` so the junction
coincides with interface ``l = 0`` on every arc.  Arrays are stored left to
right, hence the junction cell is ``rho[-1]`` on an incoming arc and
``rho[0]`` on an outgoing one.

Interior interfaces use the Godunov flux of the arc, the junction interface
uses the fluxes returned by :func:`netjunction.junction.solve_demand_supply`
and the two truncation ends see a zero-gradient ghost cell.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence, Union

import numpy as np

from .errors import CFLError, ConfigError
from .flux import FluxFunction
from .junction import DEFAULT_TOL, JunctionResolution, solve_demand_supply
from .network import Network

QUADRATURE_POINTS = 64
# Overlap fractions this close to 0 or 1 are snapped; breakpoints that sit on
# an interface up to round-off then give exact cell averages.
SNAP = 1e-9
# Outermost-cell change above which a wave is deemed to have hit the boundary.
BOUNDARY_CHANGE = 1e-10


class OuterBoundaryWarning(UserWarning):
    """A wave reached a truncation end; the zero-gradient ghost took over."""


@dataclass(frozen=True)
class Mesh:
    dx: float
    cells: tuple[int, ...]
    m: int

    def is_incoming(self, h: int) -> bool:
        return h < self.m

    def first_index(self, h: int) -> int:
        return -self.cells[h] if self.is_incoming(h) else 0

    def interfaces(self, h: int) -> np.ndarray:
        l0 = self.first_index(h)
        return np.arange(l0, l0 + self.cells[h] + 1) * self.dx

    def centers(self, h: int) -> np.ndarray:
        l0 = self.first_index(h)
        return (np.arange(l0, l0 + self.cells[h]) + 0.5) * self.dx


def build_mesh(net: Network, dx: float) -> Mesh:
    """Uniform mesh with step `dx` on every arc; lengths must be multiples of `dx`."""
    if not dx > 0:
        raise ConfigError(f"dx must be positive, got {dx}")
    cells = []
    for arc in net.arcs:
        ratio = arc.length / dx
        count = round(ratio)
        if abs(ratio - count) > 1e-12 * max(1.0, ratio):
            raise ConfigError(
                f"arc {arc.name!r}: length {arc.length} is not a multiple of dx={dx}"
            )
        if count < 2:
            raise ConfigError(f"arc {arc.name!r}: {count} cell(s), need at least 2")
        cells.append(int(count))
    return Mesh(dx=float(dx), cells=tuple(cells), m=net.m)


@dataclass(frozen=True)
class PiecewiseConstant:
    """Profile ``sum_k value_k * chi_[a_k, b_k]``, zero elsewhere on the arc."""

    pieces: tuple[tuple[float, float, float], ...] = ()

    def __post_init__(self):
        pieces = tuple((float(a), float(b), float(v)) for a, b, v in self.pieces)
        for a, b, _ in pieces:
            if not a < b:
                raise ConfigError(f"empty or reversed interval [{a}, {b}]")
        ordered = sorted(pieces)
        for (_, b0, _), (a1, _, _) in zip(ordered, ordered[1:]):
            if a1 < b0:
                raise ConfigError(f"overlapping initial intervals at x={a1}")
        object.__setattr__(self, "pieces", pieces)

    @classmethod
    def constant(cls, value: float, domain: tuple[float, float]):
        return cls(((domain[0], domain[1], value),))

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for a, b, v in self.pieces:
            out = np.where((x >= a) & (x <= b), v, out)
        return out

    def cell_averages(self, edges: np.ndarray) -> np.ndarray:
        left, right = edges[:-1], edges[1:]
        width = right - left
        out = np.zeros(left.shape)
        for a, b, v in self.pieces:
            frac = (np.minimum(right, b) - np.maximum(left, a)) / width
            frac = np.clip(frac, 0.0, 1.0)
            frac[frac < SNAP] = 0.0
            frac[frac > 1.0 - SNAP] = 1.0
            out += v * frac
        return out


Profile = Union[PiecewiseConstant, Callable, float]


@dataclass
class GridSolution:
    """Cell averages on every arc at time ``t = step * dt``."""

    mesh: Mesh
    rho: tuple[np.ndarray, ...]
    t: float = 0.0
    step: int = 0
    junction: JunctionResolution | None = None

    def copy(self) -> GridSolution:
        return GridSolution(self.mesh, tuple(r.copy() for r in self.rho), self.t, self.step, self.junction)

    def mass(self) -> float:
        return self.mesh.dx * math.fsum(float(r.sum()) for r in self.rho)

    def junction_traces(self) -> tuple[list[float], list[float]]:
        m = self.mesh.m
        return ([float(r[-1]) for r in self.rho[:m]], [float(r[0]) for r in self.rho[m:]])


def discretize_initial(
    ic: Sequence[Profile] | Mapping[str, Profile],
    mesh: Mesh,
    net: Network | None = None,
) -> GridSolution:
    """Cell averages of the initial profiles.

    `ic` lists one profile per arc (or maps arc names to profiles when `net`
    is given; missing arcs start empty).  Piecewise-constant profiles are
    averaged exactly, callables with a composite midpoint rule and plain
    numbers are constants.
    """
    if isinstance(ic, Mapping):
        if net is None:
            raise ConfigError("a name-keyed initial condition needs the network")
        unknown = set(ic) - {a.name for a in net.arcs}
        if unknown:
            raise ConfigError(f"initial condition for unknown arc(s) {sorted(unknown)}")
        ic = [ic.get(a.name, 0.0) for a in net.arcs]
    if len(ic) != len(mesh.cells):
        raise ConfigError(f"expected {len(mesh.cells)} initial profiles, got {len(ic)}")
    rho = []
    for h, profile in enumerate(ic):
        edges = mesh.interfaces(h)
        lo, hi = edges[0], edges[-1]
        if isinstance(profile, PiecewiseConstant):
            slack = 1e-12 * max(1.0, hi - lo)
            for a, b, _ in profile.pieces:
                if a < lo - slack or b > hi + slack:
                    raise ConfigError(
                        f"arc {h}: initial interval [{a}, {b}] outside the arc domain [{lo}, {hi}]"
                    )
            values = profile.cell_averages(edges)
        elif callable(profile):
            k = QUADRATURE_POINTS
            offsets = (np.arange(k) + 0.5) / k
            x = edges[:-1, None] + mesh.dx * offsets[None, :]
            values = np.asarray(profile(x), dtype=float).mean(axis=1)
        else:
            values = np.full(mesh.cells[h], float(profile))
        rho.append(np.asarray(values, dtype=float))
    state = GridSolution(mesh, tuple(rho))
    if net is not None:
        _check_range(state, net)
    return state


def _check_range(state: GridSolution, net: Network):
    for arc, r in zip(net.arcs, state.rho):
        arc.flux.check(r, what="cell average")


def max_timestep(net: Network, dx: float) -> float:
    """Largest ``dt`` with ``dt * max_h L_h <= dx / 2``."""
    return dx / (2.0 * net.lipschitz_bound)


def check_cfl(net: Network, dx: float, dt: float):
    limit = max_timestep(net, dx)
    if not dt > 0 or dt > limit * (1.0 + 1e-12):
        raise CFLError(
            f"dt={dt} violates the CFL bound dt * L <= dx/2 (dx={dx}, L={net.lipschitz_bound}, "
            f"dt_max={limit})"
        )


def interface_fluxes(
    net: Network, rho: Sequence[np.ndarray], tol: float = DEFAULT_TOL
) -> tuple[list[np.ndarray], JunctionResolution]:
    """Numerical fluxes at every interface of every arc.

    Returns one array of length ``N_h + 1`` per arc (left to right) and the
    junction resolution used at ``x = 0``.
    """
    m = net.m
    demands, supplies = [], []
    for f, r in zip(net.fluxes, rho):
        demands.append(f._eval(np.minimum(r, f.rho_c)))
        supplies.append(f._eval(np.maximum(r, f.rho_c)))
    res = solve_demand_supply(
        net,
        [float(d[-1]) for d in demands[:m]],
        [float(s[0]) for s in supplies[m:]],
        tol,
    )
    out = []
    for h, (d, s) in enumerate(zip(demands, supplies)):
        F = np.empty(d.size + 1)
        F[1:-1] = np.minimum(d[:-1], s[1:])
        if h < m:
            F[0] = min(d[0], s[0])
            F[-1] = res.incoming_fluxes[h]
        else:
            F[0] = res.outgoing_fluxes[h - m]
            F[-1] = min(d[-1], s[-1])
        out.append(F)
    return out, res


def step(
    state: GridSolution, net: Network, mesh: Mesh, dt: float, tol: float = DEFAULT_TOL
) -> GridSolution:
    """Advance `state` by one step of size `dt`.

    The returned state records the junction resolution of this step.
    """
    check_cfl(net, mesh.dx, dt)
    fluxes, res = interface_fluxes(net, state.rho, tol)
    lam = dt / mesh.dx
    rho = tuple(r - lam * np.diff(F) for r, F in zip(state.rho, fluxes))
    return GridSolution(mesh, rho, (state.step + 1) * dt, state.step + 1, res)


@dataclass
class Snapshot:
    requested_t: float
    state: GridSolution

    @property
    def t(self) -> float:
        return self.state.t


@dataclass
class Trajectory:
    """Snapshots of a run plus its per-step conservation log.

    ``log`` holds equal-length arrays keyed by ``t`` (time after the step),
    ``p``, ``residual`` (junction imbalance), ``boundary_in`` and
    ``boundary_out`` (fluxes through the truncation ends) and
    ``mass_defect`` (mass change of the step minus ``dt`` times the net
    boundary inflow).
    """

    net: Network
    mesh: Mesh
    dt: float
    snapshots: list[Snapshot]
    log: dict[str, np.ndarray] = field(default_factory=dict)
    boundary_hits: dict[int, float] = field(default_factory=dict)

    @property
    def final(self) -> GridSolution:
        return self.snapshots[-1].state

    def at(self, t: float) -> GridSolution:
        best = min(self.snapshots, key=lambda s: abs(s.requested_t - t))
        return best.state


def run(
    net: Network,
    mesh: Mesh,
    ic: GridSolution | Sequence[Profile] | Mapping[str, Profile],
    t_end: float,
    output_times: Sequence[float] = (),
    dt: float | None = None,
    cfl_factor: float = 1.0,
    tol: float = DEFAULT_TOL,
    record: bool = True,
) -> Trajectory:
    """March from the initial datum to `t_end` with a fixed time step.

    ``dt`` defaults to ``cfl_factor * max_timestep``.  Snapshots are taken at
    the completed step nearest to each requested time (their actual time is
    ``snapshot.t``); the initial state and the final state are always kept.
    """
    if t_end < 0:
        raise ConfigError(f"t_end must be >= 0, got {t_end}")
    if dt is None:
        if not 0 < cfl_factor <= 1:
            raise ConfigError(f"cfl_factor must lie in (0, 1], got {cfl_factor}")
        dt = cfl_factor * max_timestep(net, mesh.dx)
    check_cfl(net, mesh.dx, dt)
    state = ic.copy() if isinstance(ic, GridSolution) else discretize_initial(ic, mesh, net)
    _check_range(state, net)

    n_end = round(t_end / dt)
    wanted: dict[int, list[float]] = {0: [0.0]}
    for t in output_times:
        if t < 0 or t > t_end + 0.5 * dt:
            raise ConfigError(f"output time {t} outside [0, t_end={t_end}]")
        wanted.setdefault(round(t / dt), []).append(float(t))
    wanted.setdefault(n_end, []).append(float(t_end))

    lam = dt / mesh.dx
    m = net.m
    rho = [r.copy() for r in state.rho]
    outer = [slice(0, 2) if h < m else slice(-2, None) for h in range(len(rho))]
    outer0 = [r[sl].copy() for r, sl in zip(rho, outer)]
    hits: dict[int, float] = {}
    logs = {k: [] for k in ("t", "p", "residual", "boundary_in", "boundary_out", "mass_defect")}
    snapshots = [Snapshot(t, state.copy()) for t in sorted(set(wanted[0]))]
    res = None
    s0 = state.step

    for s in range(s0 + 1, n_end + 1):
        fluxes, res = interface_fluxes(net, rho, tol)
        if record:
            old_mass = math.fsum(float(r.sum()) for r in rho)
        for r, F in zip(rho, fluxes):
            r -= lam * np.diff(F)
        t = s * dt
        if record:
            b_in = sum(float(F[0]) for F in fluxes[:m])
            b_out = sum(float(F[-1]) for F in fluxes[m:])
            new_mass = math.fsum(float(r.sum()) for r in rho)
            logs["t"].append(t)
            logs["p"].append(res.p)
            logs["residual"].append(res.residual)
            logs["boundary_in"].append(b_in)
            logs["boundary_out"].append(b_out)
            logs["mass_defect"].append((new_mass - old_mass) * mesh.dx - dt * (b_in - b_out))
        if s % 64 == 0 or s == n_end:
            for h, (r, sl) in enumerate(zip(rho, outer)):
                if h not in hits and np.max(np.abs(r[sl] - outer0[h])) > BOUNDARY_CHANGE:
                    hits[h] = t
        if s in wanted:
            snap = GridSolution(mesh, tuple(r.copy() for r in rho), t, s, res)
            for t_req in sorted(set(wanted[s])):
                snapshots.append(Snapshot(t_req, snap))

    for h, t in sorted(hits.items()):
        warnings.warn(
            f"arc {net.arcs[h].name!r}: a wave reached the outer boundary by t={t:.6g}",
            OuterBoundaryWarning,
            stacklevel=2,
        )
    return Trajectory(
        net=net,
        mesh=mesh,
        dt=dt,
        snapshots=snapshots,
        log={k: np.asarray(v, dtype=float) for k, v in logs.items()},
        boundary_hits=hits,
    )


def godunov_line(
    flux: FluxFunction,
    x0: float,
    length: float,
    dx: float,
    ic: Profile,
    dt: float,
    n_steps: int,
) -> tuple[np.ndarray, np.ndarray]:
    """Junction-free Godunov scheme on ``[x0, x0 + length]``.

    Same mesh convention (cell ``l`` on ``[l dx, (l+1) dx)``) and the same
    zero-gradient ends as :func:`run`.  Returns cell centers and the cell
    averages after `n_steps` steps.
    """
    if dt * flux.lipschitz_bound > 0.5 * dx * (1.0 + 1e-12):
        raise CFLError(f"dt={dt} violates the CFL bound for dx={dx}")
    l0 = round(x0 / dx)
    count = round(length / dx)
    if abs(l0 * dx - x0) > 1e-12 or abs(count * dx - length) > 1e-12 * max(1.0, length / dx):
        raise ConfigError("line end points must lie on the mesh")
    edges = np.arange(l0, l0 + count + 1) * dx
    if isinstance(ic, PiecewiseConstant):
        r = ic.cell_averages(edges)
    elif callable(ic):
        offsets = (np.arange(QUADRATURE_POINTS) + 0.5) / QUADRATURE_POINTS
        r = np.asarray(ic(edges[:-1, None] + dx * offsets[None, :]), dtype=float).mean(axis=1)
    else:
        r = np.full(count, float(ic))
    flux.check(r, what="cell average")
    lam = dt / dx
    rc = flux.rho_c
    F = np.empty(count + 1)
    for _ in range(n_steps):
        d = flux._eval(np.minimum(r, rc))
        s = flux._eval(np.maximum(r, rc))
        F[1:-1] = np.minimum(d[:-1], s[1:])
        F[0] = min(d[0], s[0])
        F[-1] = min(d[-1], s[-1])
        r = r - lam * np.diff(F)
    return 0.5 * (edges[:-1] + edges[1:]), r

