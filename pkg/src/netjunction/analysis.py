"""Error norms, convergence rates and discrete diagnostics."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import ConfigError
from .exact import ExactEvaluator
from .junction import JunctionResolution
from .scheme import GridSolution, Mesh


@dataclass(frozen=True)
class ErrorReport:
    """Relative L1 errors on the whole network and on each side of the junction.

    An entry is ``None`` when the exact solution vanishes identically on the
    corresponding arcs, so the ratio is undefined.
    """

    whole: float | None
    incoming: float | None
    outgoing: float | None
    t: float
    cells_per_arc: int


class Rates(NamedTuple):
    whole: float | None
    incoming: float | None
    outgoing: float | None


def _ratio(num: float, den: float) -> float | None:
    return num / den if den > 0 else None


def sample_points(mesh: Mesh, h: int, where: str = "left") -> np.ndarray:
    """Points at which the exact solution is compared with cell averages.

    ``"left"`` is the interface ``x_l`` opening cell ``[x_l, x_{l+1})``,
    ``"center"`` the cell midpoint and ``"right"`` the closing interface.
    """
    if where == "center":
        return mesh.centers(h)
    edges = mesh.interfaces(h)
    if where == "left":
        return edges[:-1]
    if where == "right":
        return edges[1:]
    raise ValueError(f"unknown sampling {where!r}")


def rel_l1_error(
    numeric: GridSolution,
    exact: ExactEvaluator,
    t: float | None = None,
    where: str = "left",
    dt: float | None = None,
) -> ErrorReport:
    """Relative L1 errors of `numeric` against `exact` at time `t`.

    The exact solution is sampled once per cell, by default at the interface
    ``x_l`` opening the cell, and compared with the cell average.  Sums are
    not weighted by ``dx`` since it cancels in the ratios.
    """
    t = numeric.t if t is None else float(t)
    if dt is not None and abs(numeric.t - t) > dt * (1 + 1e-9):
        raise ConfigError(f"snapshot at t={numeric.t} is more than one step from t={t}")
    mesh = numeric.mesh
    num, den = [], []
    for h, r in enumerate(numeric.rho):
        ref = np.asarray(exact(t, sample_points(mesh, h, where), h))
        num.append(math.fsum(np.abs(ref - r)))
        den.append(math.fsum(np.abs(ref)))
    m = mesh.m
    return ErrorReport(
        whole=_ratio(math.fsum(num), math.fsum(den)),
        incoming=_ratio(math.fsum(num[:m]), math.fsum(den[:m])),
        outgoing=_ratio(math.fsum(num[m:]), math.fsum(den[m:])),
        t=t,
        cells_per_arc=max(mesh.cells),
    )


def rate(e_coarse: float | None, e_fine: float | None, n_coarse: int, n_fine: int) -> float | None:
    """Observed order ``log(e_coarse / e_fine) / log(n_fine / n_coarse)``."""
    if not e_coarse or not e_fine:
        return None
    return math.log(e_coarse / e_fine) / math.log(n_fine / n_coarse)


def convergence_rates(reports: Sequence[ErrorReport]) -> list[Rates]:
    """Rates between consecutive reports, ordered by increasing resolution."""
    if len(reports) < 2:
        raise ValueError("need at least two reports")
    cells = [r.cells_per_arc for r in reports]
    if any(b <= a for a, b in zip(cells, cells[1:])):
        raise ValueError(f"cells per arc must increase strictly, got {cells}")
    out = []
    for a, b in zip(reports, reports[1:]):
        n0, n1 = a.cells_per_arc, b.cells_per_arc
        out.append(
            Rates(
                rate(a.whole, b.whole, n0, n1),
                rate(a.incoming, b.incoming, n0, n1),
                rate(a.outgoing, b.outgoing, n0, n1),
            )
        )
    return out


def l1_distance(a: GridSolution, b: GridSolution) -> float:
    """Discrete L1 distance ``sum_h sum_l |a - b| dx``."""
    if a.mesh != b.mesh:
        raise ConfigError("L1 distance needs two solutions on the same mesh")
    return a.mesh.dx * math.fsum(float(np.abs(x - y).sum()) for x, y in zip(a.rho, b.rho))


def conservation_residual(record: JunctionResolution) -> float:
    """Junction imbalance ``|sum incoming - sum outgoing|`` of one step."""
    return abs(math.fsum(record.incoming_fluxes) - math.fsum(record.outgoing_fluxes))
