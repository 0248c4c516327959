"""End-to-end checks with their stated tolerances.

Each test carries ``criterion(n)``; the terminal summary prints one
PASS/FAIL line per criterion.  Run with ``-s`` to also see the measured
numbers.
"""

import math
import warnings

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from netjunction import (
    MERGE,
    GridSolution,
    QuadraticFlux,
    build_mesh,
    convergence_rates,
    discretize_initial,
    l1_distance,
    max_timestep,
    merge_exact_eval,
    run,
    solve,
    step,
    uniform_network,
)
from netjunction.flux import godunov_scan
from netjunction.network import Arc, Network
from netjunction.presets import TABLE_CELLS, convergence_study, run_preset

pytestmark = pytest.mark.filterwarnings("ignore::netjunction.OuterBoundaryWarning")

SQRT2 = math.sqrt(2)
TABLE_E = (6.5374e-2, 3.4281e-2, 7.6754e-3, 4.8890e-3)
TABLE_RATES = (0.9313, 0.9302, 0.8800)
TABLE_E_INCOMING_600 = 2.4933e-2
RIEMANN = ("riemann-2-1-a", "riemann-2-1-b", "riemann-1-2-a", "riemann-1-2-b", "riemann-2-2-a", "riemann-2-2-b")


def say(n, ok, what):
    print(f"[criterion {n}] {'PASS' if ok else 'FAIL'}: {what}")


@pytest.mark.criterion(1)
def test_junction_trace():
    net = uniform_network(2, 1, 0.6)
    res = solve(net, [1.0, 0.75], [0.0], tol=1e-12)
    ok = abs(res.p - (2 + SQRT2) / 4) <= 1e-10 and abs(res.total_flux - 0.25) <= 1e-10
    say(1, ok, f"p={res.p:.15f} flux={res.total_flux:.15f}")
    assert abs(res.p - (2 + SQRT2) / 4) <= 1e-10
    assert abs(sum(res.incoming_fluxes) - 0.25) <= 1e-10
    assert abs(res.total_flux - 0.25) <= 1e-10
    assert round(res.p, 2) == 0.85


@pytest.fixture(scope="module")
def ladder():
    return convergence_study(TABLE_CELLS, dt=0.25e-4, t=2.4)


class TestTable:
    @pytest.mark.criterion(2)
    @pytest.mark.parametrize("row", range(4), ids=[f"N{c}" for c in TABLE_CELLS])
    def test_whole_network_error(self, ladder, row):
        e = ladder[row].whole
        rel = abs(e - TABLE_E[row]) / TABLE_E[row]
        say(2, rel <= 0.05, f"N={TABLE_CELLS[row]} E_whole={e:.5e} target {TABLE_E[row]:.4e} (rel. gap {rel:.1%})")
        assert rel <= 0.05

    @pytest.mark.criterion(2)
    @pytest.mark.parametrize("pair", range(3), ids=["60-120", "120-600", "600-1200"])
    def test_rates(self, ladder, pair):
        r = convergence_rates(ladder)[pair].whole
        ok = abs(r - TABLE_RATES[pair]) <= 0.05
        say(2, ok, f"rate {pair}: {r:.4f} target {TABLE_RATES[pair]:.4f}")
        assert abs(r - TABLE_RATES[pair]) <= 0.05

    def test_incoming_error_600(self, ladder):
        e = ladder[2].incoming
        print(f"E_incoming(600)={e:.5e} target {TABLE_E_INCOMING_600:.4e}")
        assert e == pytest.approx(TABLE_E_INCOMING_600, rel=0.05)

    def test_monotone_ladder(self, ladder):
        errs = [r.whole for r in ladder]
        assert all(b < a for a, b in zip(errs, errs[1:]))

    def test_sublinear_rates(self, ladder):
        assert all(0 < r.whole < 1 for r in convergence_rates(ladder))


class TestMergeLandmarks:
    @pytest.mark.criterion(3)
    def test_second_arc_empty(self):
        x = np.linspace(-0.6, -1e-12, 601)
        for t in np.linspace(1.5 + 1e-9, 3.0, 40):
            assert np.all(merge_exact_eval(t, x, 1) == 0.0)
        assert np.any(merge_exact_eval(1.5 - 1e-3, x, 1) > 0)
        say(3, True, "second incoming arc empty for t > 3/2")

    @pytest.mark.criterion(3)
    def test_first_arc_empty(self):
        x = np.linspace(-0.6, -1e-12, 601)
        for t in np.linspace(2.75 + 1e-9, 3.0, 40):
            assert np.all(merge_exact_eval(t, x, 0) == 0.0)
        assert np.any(merge_exact_eval(2.75 - 1e-3, x, 0) > 0)
        say(3, True, "first incoming arc empty for t > 2.75")

    @pytest.mark.criterion(3)
    def test_t_h_against_front_odes(self):
        # Oracle: integrate S_D,1 through the first fan, follow S_E,1 as a
        # straight line, then integrate S_G,1 through the second fan.
        leave = lambda t, x: x[0] + (SQRT2 / 2) * t
        leave.terminal = True
        d = solve_ivp(lambda t, x: [(1 + x[0] / t) / 2], (0.5, 3.0), [-0.5], events=leave, rtol=1e-12, atol=1e-14)
        t_e, x_e = d.t_events[0][0], d.y_events[0][0][0]
        speed = 1 - (2 + SQRT2) / 4
        # meets the left edge x = -(sqrt2/2)(t - 3/2) of the second fan
        t_g = (x_e - speed * t_e - (SQRT2 / 2) * 1.5) / (-(SQRT2 / 2) - speed)
        x_g = x_e + speed * (t_g - t_e)
        reach = lambda t, x: x[0]
        reach.terminal = True
        g = solve_ivp(lambda t, x: [(1 + x[0] / (t - 1.5)) / 2], (t_g, 4.0), [x_g], events=reach, rtol=1e-12, atol=1e-14)
        t_h = g.t_events[0][0]
        say(3, abs(t_h - MERGE.t_h) <= 1e-6, f"t_H oracle={t_h:.10f} closed form={MERGE.t_h:.10f}")
        assert abs(t_h - 2.75) <= 1e-6
        assert abs(MERGE.t_h - 2.75) <= 1e-12


@pytest.fixture(scope="module")
def riemann_errors():
    out = {}
    for name in RIEMANN:
        coarse = run_preset(name, dx=1e-3)
        fine = run_preset(name, dx=1e-4)
        t = coarse.config.t_end
        out[name] = (coarse.reports[t].whole, fine.reports[t].whole)
    return out


@pytest.mark.criterion(4)
@pytest.mark.parametrize("name", RIEMANN)
def test_riemann_presets(riemann_errors, name):
    coarse, fine = riemann_errors[name]
    ok = coarse <= 2e-2 and fine < coarse
    say(4, ok, f"{name}: E(dx=1e-3)={coarse:.3e} E(dx=1e-4)={fine:.3e}")
    assert coarse <= 2e-2
    assert fine < coarse


@pytest.mark.criterion(5)
def test_single_arc_consistency():
    res = run_preset("single-arc-consistency")
    gaps = res.single_arc_gap
    say(5, max(gaps.values()) <= 1e-12, f"gaps {gaps}")
    assert set(gaps) == {0.4, 0.75}
    assert max(gaps.values()) <= 1e-12


class TestProperties:
    @staticmethod
    def scenario(rng, cells=24):
        m, n = (int(k) for k in rng.integers(1, 4, 2))
        arcs = [Arc(f"a{h}", QuadraticFlux(float(rng.choice([0.5, 1.0, 2.0]))), 1.0) for h in range(m + n)]
        net = Network(tuple(arcs[:m]), tuple(arcs[m:]))
        return net, build_mesh(net, 1.0 / cells)

    @staticmethod
    def state(rng, mesh, buffer=0):
        rho = []
        for h, n in enumerate(mesh.cells):
            r = rng.uniform(0, 1, n)
            if buffer:
                sl = slice(0, buffer) if h < mesh.m else slice(n - buffer, n)
                r[sl] = 0.5
            rho.append(r)
        return GridSolution(mesh, tuple(rho))

    @pytest.mark.criterion(6)
    def test_maximum_principle(self, rng):
        for _ in range(50):
            net, mesh = self.scenario(rng)
            s = self.state(rng, mesh)
            dt = max_timestep(net, mesh.dx)
            for _ in range(1000):
                s = step(s, net, mesh, dt)
                assert all(r.min() >= 0.0 and r.max() <= 1.0 for r in s.rho)
        say(6, True, "maximum principle: 50 scenarios x 1000 steps")

    @pytest.mark.criterion(6)
    def test_junction_conservation(self, rng):
        worst = 0.0
        for _ in range(50):
            net, mesh = self.scenario(rng)
            traj = run(net, mesh, self.state(rng, mesh), 200 * max_timestep(net, mesh.dx))
            worst = max(worst, float(traj.log["residual"].max()))
        say(6, worst <= 1e-12, f"junction residual max {worst:.2e}")
        assert worst <= 1e-12

    @pytest.mark.criterion(6)
    def test_l1_contraction(self, rng):
        for _ in range(100):
            net, mesh = self.scenario(rng, cells=60)
            a, b = self.state(rng, mesh, buffer=40), self.state(rng, mesh, buffer=40)
            dt = max_timestep(net, mesh.dx)
            d = l1_distance(a, b)
            for _ in range(30):
                a, b = step(a, net, mesh, dt), step(b, net, mesh, dt)
                d_new = l1_distance(a, b)
                assert d_new <= d + 1e-14
                d = d_new
        say(6, True, "L1 contraction: 100 random pairs")

    @pytest.mark.criterion(6)
    def test_demand_supply_vs_scan(self, rng):
        f = QuadraticFlux()
        worst = 0.0
        for a, b in rng.uniform(0, 1, (10_000, 2)):
            worst = max(worst, abs(float(f.godunov(a, b)) - godunov_scan(f, a, b)))
        say(6, worst <= 1e-8, f"demand/supply vs scan max gap {worst:.2e}")
        assert worst <= 1e-8

    @pytest.mark.criterion(6)
    def test_stationary_shock(self):
        net = uniform_network(1, 1, 1.0)
        mesh = build_mesh(net, 0.01)
        state = discretize_initial([0.2, 0.8], mesh, net)
        traj = run(net, mesh, state, 1e4 * 0.005, dt=0.005)
        ok = traj.final.step == 10_000 and all(
            np.array_equal(a, b) for a, b in zip(traj.final.rho, state.rho)
        )
        say(6, ok, "0.2|0.8 shock unchanged after 1e4 steps")
        assert ok
