"""Godunov scheme for scalar conservation laws on a star-shaped network.

One junction joins ``m`` incoming arcs ``[-L, 0]`` and ``n`` outgoing arcs
``[0, L]``.  Every arc carries its own unimodal flux; at the junction a single
trace ``p`` balances the incoming and outgoing Godunov fluxes.
"""

from .analysis import ErrorReport, convergence_rates, l1_distance, rate, rel_l1_error
from .config import ScenarioConfig, dump_config, load_config, parse_config
from .errors import (
    CFLError,
    ConfigError,
    DomainError,
    InvariantError,
    NetJunctionError,
    UnsupportedFluxError,
)
from .exact import MERGE, MergeSolution, junction_riemann, merge_exact_eval, riemann_eval
from .flux import FluxFunction, QuadraticFlux, TabulatedFlux, flux_from_dict
from .io import write_snapshot_csv, write_table_csv
from .junction import JunctionResolution, balance, solve
from .network import Arc, Network, uniform_network
from .presets import PRESETS, convergence_study, run_preset
from .scheme import (
    GridSolution,
    Mesh,
    OuterBoundaryWarning,
    PiecewiseConstant,
    build_mesh,
    discretize_initial,
    max_timestep,
    run,
    step,
)

__version__ = "0.1.0"

__all__ = [
    "Arc", "CFLError", "ConfigError", "DomainError", "ErrorReport", "FluxFunction",
    "GridSolution", "InvariantError", "JunctionResolution", "MERGE", "Mesh", "MergeSolution",
    "NetJunctionError", "Network", "OuterBoundaryWarning", "PRESETS", "PiecewiseConstant",
    "QuadraticFlux", "ScenarioConfig", "TabulatedFlux", "UnsupportedFluxError", "balance",
    "build_mesh", "convergence_rates", "convergence_study", "discretize_initial", "dump_config",
    "flux_from_dict", "junction_riemann", "l1_distance", "load_config", "max_timestep",
    "merge_exact_eval", "parse_config", "rate", "rel_l1_error", "riemann_eval", "run",
    "run_preset", "solve", "step", "uniform_network", "write_snapshot_csv", "write_table_csv",
]
