"""Star-shaped network topology: ``m`` incoming and ``n`` outgoing arcs.

Incoming arcs live on ``[-length, 0]`` and outgoing arcs on ``[0, length]``;
the junction sits at ``x = 0`` on every arc.  Arcs are addressed by their
position ``h`` in :attr:`Network.arcs` (incoming first, then outgoing), so
``h < m`` means incoming.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .errors import ConfigError
from .flux import FluxFunction, QuadraticFlux


@dataclass(frozen=True)
class Arc:
    name: str
    flux: FluxFunction
    length: float

    def __post_init__(self):
        if not self.length > 0:
            raise ConfigError(f"arc {self.name!r}: length must be positive, got {self.length}")


@dataclass(frozen=True)
class Network:
    incoming: tuple[Arc, ...]
    outgoing: tuple[Arc, ...]

    def __post_init__(self):
        object.__setattr__(self, "incoming", tuple(self.incoming))
        object.__setattr__(self, "outgoing", tuple(self.outgoing))
        if not self.incoming or not self.outgoing:
            raise ConfigError("a junction needs at least one incoming and one outgoing arc")
        names = [a.name for a in self.arcs]
        if len(set(names)) != len(names):
            raise ConfigError(f"arc names must be unique, got {names}")
        rmax = {a.flux.rho_max for a in self.arcs}
        if len(rmax) != 1:
            # A single junction trace is only meaningful with a common rho_max.
            raise ConfigError(f"all arcs must share one rho_max, got {sorted(rmax)}")

    @property
    def m(self) -> int:
        return len(self.incoming)

    @property
    def n(self) -> int:
        return len(self.outgoing)

    @property
    def arcs(self) -> tuple[Arc, ...]:
        return self.incoming + self.outgoing

    @property
    def fluxes(self) -> tuple[FluxFunction, ...]:
        return tuple(a.flux for a in self.arcs)

    @property
    def rho_max(self) -> float:
        return self.incoming[0].flux.rho_max

    @property
    def lipschitz_bound(self) -> float:
        return max(a.flux.lipschitz_bound for a in self.arcs)

    def is_incoming(self, h: int) -> bool:
        return h < self.m

    def domain(self, h: int) -> tuple[float, float]:
        length = self.arcs[h].length
        return (-length, 0.0) if self.is_incoming(h) else (0.0, length)

    def index(self, name: str) -> int:
        for h, arc in enumerate(self.arcs):
            if arc.name == name:
                return h
        raise KeyError(name)


def uniform_network(m: int, n: int, length: float, flux: FluxFunction | None = None) -> Network:
    """Network with `m` + `n` arcs of equal `length` sharing one flux.

    Defaults to the normalised flux ``rho (1 - rho)``.
    """
    flux = flux or QuadraticFlux()

    def arc(name):
        return Arc(name, replace(flux, label=name), length)

    return Network(
        incoming=tuple(arc(f"in{i + 1}") for i in range(m)),
        outgoing=tuple(arc(f"out{j + 1}") for j in range(n)),
    )

