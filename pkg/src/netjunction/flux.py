"""Bell-shaped flux functions and the Godunov two-point flux.

Every flux lives on ``[0, rho_max]``, vanishes at both ends and is
nondecreasing up to the critical density ``rho_c`` and nonincreasing after it.
For such fluxes the Godunov flux has the demand/supply form::

    G(a, b) = min(demand(a), supply(b))
    demand(a) = f(min(a, rho_c))
    supply(b) = f(max(b, rho_c))

which is what the scheme evaluates.  The interval definition (min of ``f`` on
``[a, b]`` when ``a <= b``, max of ``f`` on ``[b, a]`` otherwise) is kept as
:func:`godunov_scan` for checking purposes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DomainError

# Slack allowed on density range checks; absorbs round-off in callers.
RANGE_SLACK = 1e-12


class FluxFunction:
    """Common interface of the unimodal fluxes.

    Subclasses provide ``rho_max``, ``rho_c``, ``lipschitz_bound``, ``label``
    and the unchecked evaluator :meth:`_eval`, which must accept floats and
    numpy arrays alike.
    """

    rho_max: float
    rho_c: float
    lipschitz_bound: float
    label: str

    kind = "abstract"

    def _eval(self, rho):
        raise NotImplementedError

    def _derivative(self, rho):
        raise NotImplementedError

    def check(self, rho, what: str = "density"):
        """Raise :class:`DomainError` unless every entry of `rho` is in range."""
        arr = np.asarray(rho, dtype=float)
        bad = ~((arr >= -RANGE_SLACK) & (arr <= self.rho_max + RANGE_SLACK))
        if np.any(bad):
            value = arr[bad].flat[0] if arr.ndim else float(arr)
            where = f" on arc {self.label!r}" if self.label else ""
            raise DomainError(
                f"{what} {value!r}{where} outside [0, {self.rho_max}]"
            )

    def __call__(self, rho):
        self.check(rho)
        return self._eval(np.clip(rho, 0.0, self.rho_max))

    @property
    def max_flux(self) -> float:
        return float(self._eval(self.rho_c))

    def derivative(self, rho):
        self.check(rho)
        return self._derivative(rho)

    def demand(self, rho):
        """Sending capacity ``f(min(rho, rho_c))``."""
        return self._eval(np.minimum(rho, self.rho_c))

    def supply(self, rho):
        """Receiving capacity ``f(max(rho, rho_c))``."""
        return self._eval(np.maximum(rho, self.rho_c))

    def godunov(self, a, b):
        """Godunov flux between left state `a` and right state `b`."""
        self.check(a)
        self.check(b)
        return np.minimum(self.demand(a), self.supply(b))

    def shock_speed(self, a, b):
        """Rankine-Hugoniot speed of a jump from `a` (left) to `b` (right).

        On the diagonal the limit value ``f'(a)`` is returned.
        """
        self.check(a)
        self.check(b)
        return self._shock_speed(a, b)

    def _shock_speed(self, a, b):
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        diff = b - a
        same = np.abs(diff) <= 1e-12 * self.rho_max
        safe = np.where(same, 1.0, diff)
        quotient = (self._eval(b) - self._eval(a)) / safe
        out = np.where(same, self._derivative(0.5 * (a + b)), quotient)
        return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class QuadraticFlux(FluxFunction):
    """Greenshields flux ``v_free * rho * (1 - rho / rho_max)``."""

    v_free: float = 1.0
    rho_max: float = 1.0
    label: str = ""

    kind = "quadratic"

    def __post_init__(self):
        if not (self.v_free > 0 and self.rho_max > 0):
            raise ConfigError(
                f"quadratic flux needs v_free > 0 and rho_max > 0, got "
                f"v_free={self.v_free}, rho_max={self.rho_max}"
            )

    @property
    def rho_c(self) -> float:
        return 0.5 * self.rho_max

    @property
    def lipschitz_bound(self) -> float:
        return self.v_free

    def _eval(self, rho):
        return self.v_free * rho * (1.0 - rho / self.rho_max)

    def _derivative(self, rho):
        return self.v_free * (1.0 - 2.0 * np.asarray(rho) / self.rho_max)

    def _shock_speed(self, a, b):
        # Closed form; coincides with f'(a) on the diagonal.
        out = self.v_free * (1.0 - (np.asarray(a) + np.asarray(b)) / self.rho_max)
        return float(out) if np.ndim(out) == 0 else out

    def inverse_derivative(self, speed):
        """Density whose characteristic speed is `speed`."""
        return 0.5 * self.rho_max * (1.0 - np.asarray(speed) / self.v_free)

    def to_dict(self) -> dict:
        return {"kind": "quadratic", "v_free": self.v_free, "rho_max": self.rho_max}


@dataclass(frozen=True)
class TabulatedFlux(FluxFunction):
    """Piecewise-linear flux through the points ``(grid[k], values[k])``.

    `rho_c` must be one of the grid nodes; the table has to rise up to it and
    fall after it.  Piecewise-linear fluxes have piecewise-constant
    derivatives, so they fall outside the exact-solution machinery and only
    drive the numerical scheme.
    """

    grid: tuple
    values: tuple
    rho_c: float
    label: str = ""
    _slopes: np.ndarray = field(init=False, repr=False, compare=False)

    kind = "tabulated"

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "grid", tuple(grid.tolist()))
        object.__setattr__(self, "values", tuple(values.tolist()))
        if grid.ndim != 1 or grid.shape != values.shape or grid.size < 3:
            raise ConfigError("tabulated flux needs >= 3 matching grid/value samples")
        if grid[0] != 0.0 or np.any(np.diff(grid) <= 0):
            raise ConfigError("tabulated flux grid must start at 0 and increase strictly")
        if values[0] != 0.0 or values[-1] != 0.0 or np.any(values < 0):
            raise ConfigError("tabulated flux must vanish at 0 and rho_max and stay >= 0")
        hits = np.flatnonzero(np.isclose(grid, self.rho_c, rtol=0, atol=1e-14))
        if hits.size != 1 or hits[0] in (0, grid.size - 1):
            raise ConfigError(f"rho_c={self.rho_c} must be an interior grid node")
        k = hits[0]
        if np.any(np.diff(values[: k + 1]) < 0) or np.any(np.diff(values[k:]) > 0):
            raise ConfigError("tabulated flux is not unimodal around rho_c")
        object.__setattr__(self, "_slopes", np.diff(values) / np.diff(grid))

    @property
    def rho_max(self) -> float:
        return self.grid[-1]

    @property
    def lipschitz_bound(self) -> float:
        return float(np.max(np.abs(self._slopes)))

    def _eval(self, rho):
        return np.interp(rho, self.grid, self.values)

    def _derivative(self, rho):
        # Central difference; exact inside a segment, averaged at the nodes.
        h = 1e-7 * self.rho_max
        rho = np.asarray(rho, dtype=float)
        lo = np.clip(rho - h, 0.0, self.rho_max)
        hi = np.clip(rho + h, 0.0, self.rho_max)
        return (self._eval(hi) - self._eval(lo)) / (hi - lo)

    def to_dict(self) -> dict:
        return {
            "kind": "tabulated",
            "grid": list(self.grid),
            "values": list(self.values),
            "rho_c": self.rho_c,
        }


def flux_from_dict(data: dict, label: str = "") -> FluxFunction:
    """Build a flux from its JSON description (see :meth:`to_dict`)."""
    kind = data.get("kind")
    if kind == "quadratic":
        return QuadraticFlux(
            v_free=float(data.get("v_free", 1.0)),
            rho_max=float(data.get("rho_max", 1.0)),
            label=label,
        )
    if kind == "tabulated":
        return TabulatedFlux(
            grid=tuple(data["grid"]),
            values=tuple(data["values"]),
            rho_c=float(data["rho_c"]),
            label=label,
        )
    raise ConfigError(f"unknown flux kind {kind!r} (expected 'quadratic' or 'tabulated')")


def godunov_scan(f: FluxFunction, a: float, b: float, samples: int = 100_001) -> float:
    """Godunov flux by brute-force min/max of `f` over the interval between a and b."""
    s = np.linspace(min(a, b), max(a, b), samples)
    vals = f._eval(s)
    return float(vals.min() if a <= b else vals.max())
