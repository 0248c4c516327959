"""Exception hierarchy shared by the solver, the exact solutions and the CLI."""


class NetJunctionError(Exception):
    """Base class for every error raised by :mod:`netjunction`."""


class DomainError(NetJunctionError, ValueError):
    """A density (or another argument) lies outside its admissible range."""


class ConfigError(NetJunctionError, ValueError):
    """Invalid topology, mesh, initial datum or scenario file."""


class CFLError(ConfigError):
    """The time step violates ``dt * max L_h <= dx / 2``."""


class UnsupportedFluxError(NetJunctionError, TypeError):
    """An exact solution was requested for a flux kind it cannot handle."""


class InvariantError(NetJunctionError, RuntimeError):
    """A numerical invariant that should hold by construction was violated."""
