"""JSON scenario files.

A scenario looks like::

    {
      "arcs": [
        {"name": "in1", "direction": "incoming", "length": 0.6,
         "flux": {"kind": "quadratic", "v_free": 1.0, "rho_max": 1.0},
         "initial": [{"interval": [-0.5, 0.0], "value": 1.0}]},
        ...
      ],
      "dx": 0.01,
      "dt": 2.5e-5,            # or "cfl_factor": 1.0
      "t_end": 2.4,
      "output_times": [1.2, 2.4],
      "reference": "merge-explicit"   # optional
    }

Densities not covered by an ``initial`` interval are zero.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import ConfigError, DomainError
from .flux import flux_from_dict
from .network import Arc, Network
from .scheme import Mesh, PiecewiseConstant, build_mesh, check_cfl, max_timestep

REFERENCES = ("merge-explicit", "junction-riemann", "single-arc")
_TOP_KEYS = {"arcs", "dx", "dt", "cfl_factor", "t_end", "output_times", "output_dir", "reference", "description"}
_ARC_KEYS = {"name", "direction", "length", "flux", "initial"}


@dataclass(frozen=True)
class ArcConfig:
    name: str
    direction: str
    length: float
    flux: dict
    initial: tuple[tuple[float, float, float], ...] = ()


@dataclass(frozen=True)
class ScenarioConfig:
    arcs: tuple[ArcConfig, ...]
    dx: float
    t_end: float
    dt: float | None = None
    cfl_factor: float = 1.0
    output_times: tuple[float, ...] = ()
    output_dir: str | None = None
    reference: str | None = None
    description: str = ""
    _network: Network = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_network", _build_network(self.arcs))

    @property
    def network(self) -> Network:
        return self._network

    def mesh(self) -> Mesh:
        return build_mesh(self.network, self.dx)

    def time_step(self) -> float:
        if self.dt is not None:
            return self.dt
        return self.cfl_factor * max_timestep(self.network, self.dx)

    def initial_condition(self) -> dict[str, PiecewiseConstant]:
        return {a.name: PiecewiseConstant(a.initial) for a in self.arcs}

    def constant_states(self) -> list[float]:
        """Per-arc constant value, for junction Riemann problems."""
        states = []
        for h, arc in enumerate(self.arcs):
            lo, hi = self.network.domain(h)
            if not arc.initial:
                states.append(0.0)
            elif len(arc.initial) == 1 and arc.initial[0][:2] == (lo, hi):
                states.append(arc.initial[0][2])
            else:
                raise ConfigError(f"arc {arc.name!r}: initial datum is not constant on the arc")
        return states

    def to_dict(self) -> dict:
        out = {
            "arcs": [
                {
                    "name": a.name,
                    "direction": a.direction,
                    "length": a.length,
                    "flux": dict(a.flux),
                    "initial": [{"interval": [lo, hi], "value": v} for lo, hi, v in a.initial],
                }
                for a in self.arcs
            ],
            "dx": self.dx,
            "t_end": self.t_end,
            "output_times": list(self.output_times),
        }
        if self.dt is not None:
            out["dt"] = self.dt
        else:
            out["cfl_factor"] = self.cfl_factor
        for key in ("output_dir", "reference"):
            if getattr(self, key) is not None:
                out[key] = getattr(self, key)
        if self.description:
            out["description"] = self.description
        return out


def dump_config(cfg: ScenarioConfig) -> str:
    return json.dumps(cfg.to_dict(), indent=2) + "\n"


def _build_network(arcs) -> Network:
    incoming, outgoing = [], []
    for k, a in enumerate(arcs):
        try:
            flux = flux_from_dict(a.flux, label=a.name)
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"arcs[{k}].flux: {exc}") from None
        (incoming if a.direction == "incoming" else outgoing).append(Arc(a.name, flux, a.length))
    return Network(tuple(incoming), tuple(outgoing))


def _number(value, where: str, positive: bool = False) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where}: expected a number, got {value!r}")
    value = float(value)
    if positive and not value > 0:
        raise ConfigError(f"{where}: must be positive, got {value}")
    return value


def _unknown(keys, allowed, where):
    extra = sorted(set(keys) - allowed)
    if extra:
        raise ConfigError(f"{where}: unknown field(s) {extra}")


def config_from_dict(data: dict) -> ScenarioConfig:
    """Validate a decoded JSON object and build the scenario."""
    if not isinstance(data, dict):
        raise ConfigError("top level: expected a JSON object")
    _unknown(data, _TOP_KEYS, "top level")
    for key in ("arcs", "dx", "t_end"):
        if key not in data:
            raise ConfigError(f"top level: missing field {key!r}")
    if not isinstance(data["arcs"], list) or not data["arcs"]:
        raise ConfigError("arcs: expected a non-empty list")

    arcs = []
    for k, raw in enumerate(data["arcs"]):
        where = f"arcs[{k}]"
        if not isinstance(raw, dict):
            raise ConfigError(f"{where}: expected an object")
        _unknown(raw, _ARC_KEYS, where)
        for key in ("name", "direction", "length", "flux"):
            if key not in raw:
                raise ConfigError(f"{where}: missing field {key!r}")
        if raw["direction"] not in ("incoming", "outgoing"):
            raise ConfigError(f"{where}.direction: expected 'incoming' or 'outgoing', got {raw['direction']!r}")
        if not isinstance(raw["flux"], dict):
            raise ConfigError(f"{where}.flux: expected an object")
        length = _number(raw["length"], f"{where}.length", positive=True)
        pieces = []
        for q, piece in enumerate(raw.get("initial", [])):
            pw = f"{where}.initial[{q}]"
            if not isinstance(piece, dict) or set(piece) != {"interval", "value"}:
                raise ConfigError(f"{pw}: expected {{'interval': [a, b], 'value': v}}")
            interval = piece["interval"]
            if not isinstance(interval, list) or len(interval) != 2:
                raise ConfigError(f"{pw}.interval: expected [a, b]")
            a = _number(interval[0], f"{pw}.interval[0]")
            b = _number(interval[1], f"{pw}.interval[1]")
            lo, hi = (-length, 0.0) if raw["direction"] == "incoming" else (0.0, length)
            slack = 1e-12 * max(1.0, length)
            if not a < b or a < lo - slack or b > hi + slack:
                raise ConfigError(f"{pw}.interval: [{a}, {b}] is not a sub-interval of [{lo}, {hi}]")
            pieces.append((a, b, _number(piece["value"], f"{pw}.value")))
        arcs.append(
            ArcConfig(
                name=str(raw["name"]),
                direction=raw["direction"],
                length=length,
                flux=dict(raw["flux"]),
                initial=tuple(pieces),
            )
        )

    # Network order: incoming arcs first.
    arcs = [a for a in arcs if a.direction == "incoming"] + [a for a in arcs if a.direction == "outgoing"]
    dx = _number(data["dx"], "dx", positive=True)
    t_end = _number(data["t_end"], "t_end")
    if t_end < 0:
        raise ConfigError(f"t_end: must be >= 0, got {t_end}")
    dt = data.get("dt")
    cfl_factor = data.get("cfl_factor", 1.0)
    if dt is not None and "cfl_factor" in data:
        raise ConfigError("top level: give either 'dt' or 'cfl_factor', not both")
    if dt is not None:
        dt = _number(dt, "dt", positive=True)
    cfl_factor = _number(cfl_factor, "cfl_factor", positive=True)
    if cfl_factor > 1:
        raise ConfigError(f"cfl_factor: must lie in (0, 1], got {cfl_factor}")
    times = data.get("output_times", [])
    if not isinstance(times, list):
        raise ConfigError("output_times: expected a list")
    times = tuple(_number(t, f"output_times[{k}]") for k, t in enumerate(times))
    for k, t in enumerate(times):
        if t < 0 or t > t_end:
            raise ConfigError(f"output_times[{k}]: {t} outside [0, t_end={t_end}]")
    reference = data.get("reference")
    if reference is not None and reference not in REFERENCES:
        raise ConfigError(f"reference: expected one of {list(REFERENCES)}, got {reference!r}")

    try:
        cfg = ScenarioConfig(
            arcs=tuple(arcs),
            dx=dx,
            t_end=t_end,
            dt=dt,
            cfl_factor=cfl_factor,
            output_times=times,
            output_dir=data.get("output_dir"),
            reference=reference,
            description=str(data.get("description", "")),
        )
        check_cfl(cfg.network, cfg.mesh().dx, cfg.time_step())
        for arc, net_arc in zip(cfg.arcs, cfg.network.arcs):
            for q, (_, _, v) in enumerate(arc.initial):
                net_arc.flux.check(v, what=f"arc {arc.name!r} initial[{q}].value")
    except DomainError as exc:
        raise ConfigError(str(exc)) from None
    return cfg


def parse_config(text: str) -> ScenarioConfig:
    """Parse and validate a JSON scenario."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return config_from_dict(data)


def load_config(path) -> ScenarioConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())
