"""Closed-form reference solutions for the concave quadratic flux.

* :func:`riemann_eval` -- the entropy solution of a scalar Riemann problem as
  a function of ``xi = x / t``.
* :func:`junction_riemann` -- the self-similar solution of a junction
  Riemann problem (constant data on each arc).
* :class:`MergeSolution` -- the explicit front-tracking solution of a 2-1
  merge with ``f(rho) = rho (1 - rho)`` and data ``chi_[-1/2, 0]``,
  ``3/4 chi_[-1/4, 0]``, ``0``.

Densities evaluated exactly on a front get the value on its right.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError, UnsupportedFluxError
from .flux import FluxFunction, QuadraticFlux
from .junction import solve
from .network import Network, uniform_network
from .scheme import PiecewiseConstant


def _require_quadratic(f: FluxFunction) -> QuadraticFlux:
    if not isinstance(f, QuadraticFlux):
        raise UnsupportedFluxError(
            f"exact solutions need a concave quadratic flux, got {type(f).__name__}"
        )
    return f


def riemann_eval(f: FluxFunction, rho_l: float, rho_r: float, xi):
    """Entropy solution of the Riemann problem ``rho_l | rho_r`` at ``x / t = xi``."""
    f = _require_quadratic(f)
    f.check(rho_l)
    f.check(rho_r)
    xi = np.asarray(xi, dtype=float)
    if rho_l == rho_r:
        out = np.full(xi.shape, float(rho_l))
    elif rho_l < rho_r:
        sigma = f._shock_speed(rho_l, rho_r)
        out = np.where(xi < sigma, rho_l, rho_r).astype(float)
    else:
        lo, hi = f._derivative(rho_l), f._derivative(rho_r)
        fan = f.inverse_derivative(np.clip(xi, lo, hi))
        out = np.where(xi < lo, rho_l, np.where(xi >= hi, rho_r, fan))
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class Front:
    """A wave on one arc: shock trajectory or rarefaction edge.

    ``position(t)`` is valid on ``[t_start, t_end]``; ``formula`` is a
    human-readable form of it.
    """

    label: str
    arc: int
    kind: str
    t_start: float
    t_end: float
    position: Callable[[float], float]
    formula: str = ""


class ExactEvaluator:
    """Pointwise reference solution ``(t, x, arc) -> density``.

    Arcs are indexed like :attr:`Network.arcs`.  Evaluation beyond
    ``t_max`` raises :class:`DomainError`.
    """

    t_max: float = math.inf
    fronts: tuple[Front, ...] = ()

    def __init__(self, net: Network):
        self.net = net

    def __call__(self, t: float, x, arc: int):
        if not 0.0 <= t <= self.t_max:
            raise DomainError(f"t={t} outside the validity horizon [0, {self.t_max}]")
        if not 0 <= arc < len(self.net.arcs):
            raise DomainError(f"no arc {arc} in a network with {len(self.net.arcs)} arcs")
        x = np.asarray(x, dtype=float)
        out = np.asarray(self._evaluate(float(t), x, arc), dtype=float)
        return float(out) if out.ndim == 0 else out

    def _evaluate(self, t: float, x: np.ndarray, arc: int):
        raise NotImplementedError

    def traces(self, t: float) -> tuple[list[float], list[float]]:
        """Densities at ``0-`` on incoming and ``0+`` on outgoing arcs."""
        eps = 1e-12
        m = self.net.m
        tin = [self(t, -eps, i) for i in range(m)]
        tout = [self(t, eps, m + j) for j in range(self.net.n)]
        return tin, tout


class JunctionRiemannSolution(ExactEvaluator):
    """Self-similar solution for constant data on every arc."""

    def __init__(self, net: Network, states: Sequence[float], p_star: float):
        super().__init__(net)
        self.states = tuple(float(s) for s in states)
        self.p_star = float(p_star)

    def _evaluate(self, t, x, arc):
        rho0 = self.states[arc]
        if t == 0.0:
            return np.full(x.shape, rho0)
        f = self.net.arcs[arc].flux
        if self.net.is_incoming(arc):
            return riemann_eval(f, rho0, self.p_star, x / t)
        return riemann_eval(f, self.p_star, rho0, x / t)


def junction_riemann(net: Network, states: Sequence[float], tol: float = 1e-14):
    """Admissible solution of the junction Riemann problem with constant `states`.

    Returns ``(p_star, evaluator)``.  Each arc carries the full-line Riemann
    solution between its own state and ``p_star``, restricted to its
    half-line.
    """
    for arc in net.arcs:
        _require_quadratic(arc.flux)
    if len(states) != len(net.arcs):
        raise DomainError(f"expected {len(net.arcs)} states, got {len(states)}")
    res = solve(net, list(states[: net.m]), list(states[net.m:]), tol=tol)
    return res.p, JunctionRiemannSolution(net, states, res.p)


SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class MergeConstants:
    """Landmarks of the merge solution, all in closed form."""

    p1: float = (2.0 + SQRT2) / 4.0   # junction trace for t < t_F
    p2: float = 0.5                    # junction trace for t_F < t < t_H
    t_c: float = (2.0 - SQRT2) / 2.0   # S_B,2 meets S_O,2
    x_c: float = -SQRT2 / 8.0
    t_d: float = 0.5                   # fan edge reaches the stationary shock at A
    x_d: float = -0.5
    t_e: float = 12.0 - 8.0 * SQRT2    # S_D,1 leaves the fan
    x_e: float = 8.0 - 6.0 * SQRT2
    t_f: float = 1.5                   # arc 2 empties
    t_g: float = 1.5 + 7.5 - 5.0 * SQRT2   # S_E,1 meets the second fan
    t_h: float = field(default=0.0)    # arc 1 empties: 3/2 + C_G^2 = 2.75
    back_speed: float = -(SQRT2 + 1.0) / 4.0   # sigma(3/4, p1)
    fwd_speed: float = (2.0 - SQRT2) / 4.0     # sigma(0, p1) = 1 - p1
    c_g: float = field(default=0.0)

    def __post_init__(self):
        tau_g = self.t_g - self.t_f
        object.__setattr__(self, "c_g", -(1.0 + SQRT2 / 2.0) * math.sqrt(tau_g))
        object.__setattr__(self, "t_h", self.t_f + self.c_g**2)

    @property
    def x_g(self) -> float:
        return -(SQRT2 / 2.0) * (self.t_g - self.t_f)


MERGE = MergeConstants()


def merge_network(length: float = 0.6) -> Network:
    """The 2-1 merge with ``f(rho) = rho (1 - rho)`` on arcs of `length`."""
    return uniform_network(2, 1, length, QuadraticFlux())


def merge_initial_condition() -> list[PiecewiseConstant]:
    return [
        PiecewiseConstant(((-0.5, 0.0, 1.0),)),
        PiecewiseConstant(((-0.25, 0.0, 0.75),)),
        PiecewiseConstant(()),
    ]


class MergeSolution(ExactEvaluator):
    """Front-tracking solution of the merge, valid on ``0 <= t <= 3``.

    Wave pattern (arc 0 and 1 incoming, arc 2 outgoing)::

        arc 0: fan from O, stationary shock at x=-1/2 until D, curved shock
               S_D through the fan until E, straight shock S_E into the p1
               plateau, second fan from (0, t_F), curved shock S_G through it
               reaching the junction at t_H
        arc 1: shock from B (speed 1/4) and backward shock from O meet at C,
               shock S_C (speed 1 - p1) reaches the junction at t_F
        arc 2: fan from O; after t_H the curved shock S_H eats its left part
    """

    t_max = 3.0

    def __init__(self, net: Network | None = None):
        super().__init__(net or merge_network())
        c = MERGE
        self.c = c
        self.fronts = (
            Front("R_O,1 left edge", 0, "fan-edge", 0.0, c.t_d, lambda t: -t, "x = -t"),
            Front("S_A,1", 0, "shock", 0.0, c.t_d, lambda t: -0.5, "x = -1/2"),
            Front("S_D,1", 0, "shock", c.t_d, c.t_e, self.s_d, "x = t - sqrt(2 t)"),
            Front("R_O,1 right edge", 0, "fan-edge", 0.0, c.t_e,
                  lambda t: -(SQRT2 / 2.0) * t, "x = -(sqrt2/2) t"),
            Front("S_E,1", 0, "shock", c.t_e, c.t_g, self.s_e,
                  "x = x_E + (1 - p1)(t - t_E)"),
            Front("R_F,1 left edge", 0, "fan-edge", c.t_f, c.t_g,
                  lambda t: -(SQRT2 / 2.0) * (t - c.t_f), "x = -(sqrt2/2)(t - 3/2)"),
            Front("S_G,1", 0, "shock", c.t_g, c.t_h, self.s_g,
                  "x = (t - 3/2) + C_G sqrt(t - 3/2)"),
            Front("S_B,2", 1, "shock", 0.0, c.t_c, lambda t: -0.25 + 0.25 * t, "x = -1/4 + t/4"),
            Front("S_O,2", 1, "shock", 0.0, c.t_c, lambda t: c.back_speed * t,
                  "x = -(sqrt2 + 1) t / 4"),
            Front("S_C,2", 1, "shock", c.t_c, c.t_f, self.s_c, "x = x_C + (1 - p1)(t - t_C)"),
            Front("R_O,3 right edge", 2, "fan-edge", 0.0, self.t_max, lambda t: t, "x = t"),
            Front("S_H,3", 2, "shock", c.t_h, self.t_max, self.s_h, "x = t - sqrt(t_H t)"),
        )

    # front trajectories

    def s_d(self, t):
        return t - SQRT2 * np.sqrt(t)

    def s_e(self, t):
        c = self.c
        return c.x_e + c.fwd_speed * (t - c.t_e)

    def s_g(self, t):
        tau = t - self.c.t_f
        return tau + self.c.c_g * np.sqrt(tau)

    def s_c(self, t):
        c = self.c
        return c.x_c + c.fwd_speed * (t - c.t_c)

    def s_h(self, t):
        return t - np.sqrt(self.c.t_h * t)

    # evaluation

    def _evaluate(self, t, x, arc):
        if arc == 0:
            return self._arc0(t, x)
        if arc == 1:
            return self._arc1(t, x)
        return self._arc2(t, x)

    def _arc0(self, t, x):
        c = self.c
        if t == 0.0:
            return np.where(x >= -0.5, 1.0, 0.0)
        if t >= c.t_h:
            return np.zeros_like(x)
        fan_o = 0.5 * (1.0 - x / t)
        edge_o = -(SQRT2 / 2.0) * t
        if t < c.t_d:
            return np.select(
                [x < -0.5, x < -t, x < edge_o], [0.0, 1.0, fan_o], c.p1
            )
        if t < c.t_e:
            return np.select([x < self.s_d(t), x < edge_o], [0.0, fan_o], c.p1)
        if t < c.t_f:
            return np.where(x < self.s_e(t), 0.0, c.p1)
        tau = t - c.t_f
        fan_f = 0.5 * (1.0 - x / tau) if tau > 0 else np.full_like(x, c.p1)
        if t < c.t_g:
            edge_f = -(SQRT2 / 2.0) * tau
            return np.select([x < self.s_e(t), x < edge_f], [0.0, c.p1], fan_f)
        return np.where(x < self.s_g(t), 0.0, fan_f)

    def _arc1(self, t, x):
        c = self.c
        if t == 0.0:
            return np.where(x >= -0.25, 0.75, 0.0)
        if t >= c.t_f:
            return np.zeros_like(x)
        if t < c.t_c:
            return np.select(
                [x < -0.25 + 0.25 * t, x < c.back_speed * t], [0.0, 0.75], c.p1
            )
        return np.where(x < self.s_c(t), 0.0, c.p1)

    def _arc2(self, t, x):
        if t == 0.0:
            return np.zeros_like(x)
        fan = 0.5 * (1.0 - x / t)
        inside = np.where(x < t, fan, 0.0)
        if t > self.c.t_h:
            return np.where(x < self.s_h(t), 0.0, inside)
        return inside


def merge_exact_eval(t: float, x, arc: int):
    """Exact merge density on `arc` (0, 1 incoming; 2 outgoing) at ``(t, x)``."""
    return _MERGE_SOLUTION(t, x, arc)


_MERGE_SOLUTION = MergeSolution()
