"""Transmission condition at the junction.

Given the densities next to the junction on every arc, find a trace ``p``
shared by all arcs such that::

    sum_i G_i(rho_i, p) == sum_j G_j(p, rho_j)

The balance ``Phi(p)`` (incoming minus outgoing) is continuous and
nonincreasing with ``Phi(0) >= 0 >= Phi(rho_max)``, so bisection always
brackets a root.  Roots can form an interval; the per-arc fluxes are the same
anywhere in it, and those fluxes are what the scheme consumes.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass
from typing import Sequence

from .errors import ConfigError, InvariantError
from .flux import QuadraticFlux
from .network import Network

DEFAULT_TOL = 1e-12
MAX_ITER = 200
# |Phi(rho_c)| below this many ulps of the largest flux counts as balanced.
ROUND_OFF_ULPS = 16.0


@dataclass(frozen=True)
class JunctionResolution:
    """Outcome of one junction solve."""

    p: float
    incoming_fluxes: tuple[float, ...]
    outgoing_fluxes: tuple[float, ...]
    residual: float
    iterations: int = 0

    @property
    def total_flux(self) -> float:
        return sum(self.outgoing_fluxes)


def _check_traces(net: Network, traces_in: Sequence[float], traces_out: Sequence[float]):
    if len(traces_in) != net.m or len(traces_out) != net.n:
        raise ConfigError(
            f"expected {net.m} incoming and {net.n} outgoing traces, "
            f"got {len(traces_in)} and {len(traces_out)}"
        )
    for arc, rho in zip(net.incoming, traces_in):
        arc.flux.check(rho, what="incoming trace")
    for arc, rho in zip(net.outgoing, traces_out):
        arc.flux.check(rho, what="outgoing trace")


def balance(net: Network, traces_in: Sequence[float], traces_out: Sequence[float], p: float) -> float:
    """Signed junction balance ``Phi(p)``: incoming minus outgoing Godunov flux."""
    _check_traces(net, traces_in, traces_out)
    net.incoming[0].flux.check(p, what="junction trace")
    inflow = sum(float(a.flux.godunov(r, p)) for a, r in zip(net.incoming, traces_in))
    outflow = sum(float(a.flux.godunov(p, r)) for a, r in zip(net.outgoing, traces_out))
    return inflow - outflow


def solve(
    net: Network,
    traces_in: Sequence[float],
    traces_out: Sequence[float],
    tol: float = DEFAULT_TOL,
) -> JunctionResolution:
    """Find the junction trace and the per-arc fluxes.

    Parameters
    ----------
    net : Network
        Junction topology and fluxes.
    traces_in, traces_out : sequence of float
        Densities in the cells adjacent to the junction, incoming arcs first.
    tol : float
        Admissible flux imbalance at the returned trace.

    Returns
    -------
    JunctionResolution
        Trace ``p`` (the bisection limit) and fluxes ``G_i(rho_i, p)``,
        ``G_j(p, rho_j)``.
    """
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol}")
    _check_traces(net, traces_in, traces_out)
    demands = [float(a.flux.demand(r)) for a, r in zip(net.incoming, traces_in)]
    supplies = [float(a.flux.supply(r)) for a, r in zip(net.outgoing, traces_out)]
    return solve_demand_supply(net, demands, supplies, tol)


def solve_demand_supply(
    net: Network,
    demands: Sequence[float],
    supplies: Sequence[float],
    tol: float = DEFAULT_TOL,
) -> JunctionResolution:
    """Junction solve from precomputed incoming demands and outgoing supplies.

    This is the hot path of the time marcher: ``G_i(rho_i, p)`` only depends
    on ``rho_i`` through ``demand_i(rho_i)`` and ``G_j(p, rho_j)`` only
    through ``supply_j(rho_j)``.
    """
    rho_max = net.rho_max
    fin = [(a.flux._eval, a.flux.rho_c, d) for a, d in zip(net.incoming, demands)]
    fout = [(a.flux._eval, a.flux.rho_c, s) for a, s in zip(net.outgoing, supplies)]

    def fluxes(p):
        gin = [min(d, f(p if p > rc else rc)) for f, rc, d in fin]
        gout = [min(f(p if p < rc else rc), s) for f, rc, s in fout]
        return gin, gout

    def phi(p):
        acc = 0.0
        for f, rc, d in fin:
            g = f(p if p > rc else rc)
            acc += g if g < d else d
        for f, rc, s in fout:
            g = f(p if p < rc else rc)
            acc -= g if g < s else s
        return acc

    if all(isinstance(a.flux, QuadraticFlux) for a in net.arcs):
        # Same arithmetic as QuadraticFlux._eval, inlined for speed.
        qin = [(a.flux.v_free, a.flux.rho_max, a.flux.rho_c, d) for a, d in zip(net.incoming, demands)]
        qout = [(a.flux.v_free, a.flux.rho_max, a.flux.rho_c, s) for a, s in zip(net.outgoing, supplies)]

        def phi(p):
            acc = 0.0
            for v, r, rc, d in qin:
                q = p if p > rc else rc
                g = v * q * (1.0 - q / r)
                acc += g if g < d else d
            for v, r, rc, s in qout:
                q = p if p < rc else rc
                g = v * q * (1.0 - q / r)
                acc -= g if g < s else s
            return acc

    if all(d == 0.0 for d in demands):
        # Nothing wants to enter; p = 0 closes every outgoing arc.
        return _resolution(0.0, *fluxes(0.0), 0)
    if all(s == 0.0 for s in supplies):
        return _resolution(rho_max, *fluxes(rho_max), 0)

    lo, hi = 0.0, rho_max
    phi_lo, phi_hi = phi(lo), phi(hi)
    if phi_lo < -tol or phi_hi > tol:
        raise InvariantError(
            f"junction balance has no sign change: Phi(0)={phi_lo}, Phi(rho_max)={phi_hi}"
        )
    if phi_lo <= 0.0:
        return _resolution(lo, *fluxes(lo), 0)
    if phi_hi >= 0.0:
        return _resolution(hi, *fluxes(hi), 0)

    # With a shared critical density, Phi(rho_c) is exactly sum(demands) -
    # sum(supplies).  When that vanishes up to round-off every arc runs at
    # capacity and rho_c is a root whose fluxes are exactly the demands and
    # supplies; a stationary congested/free-flow pair then stays put.
    crit = {a.flux.rho_c for a in net.arcs}
    if len(crit) == 1:
        rc = crit.pop()
        stop = ROUND_OFF_ULPS * sys.float_info.epsilon * max(max(demands), max(supplies))
        if abs(phi(rc)) <= stop:
            return _resolution(rc, *fluxes(rc), 1)

    # Otherwise run to machine precision: flux errors of size tol would pile
    # up over thousands of steps.
    it = 0
    while it < MAX_ITER:
        it += 1
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        value = phi(mid)
        if value > 0.0:
            lo = mid
        elif value < 0.0:
            hi = mid
        else:
            lo = hi = mid
            break
    p = 0.5 * (lo + hi)
    res = _resolution(p, *fluxes(p), it)
    if res.residual > tol:
        raise InvariantError(
            f"junction residual {res.residual:.3e} exceeds tol {tol:.1e} at p={p!r}"
        )
    return res


def _resolution(p, gin, gout, iterations) -> JunctionResolution:
    return JunctionResolution(
        p=p,
        incoming_fluxes=tuple(gin),
        outgoing_fluxes=tuple(gout),
        residual=abs(sum(gin) - sum(gout)),
        iterations=iterations,
    )
