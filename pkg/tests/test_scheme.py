import math
import warnings

import numpy as np
import pytest

from netjunction import (
    CFLError,
    ConfigError,
    GridSolution,
    OuterBoundaryWarning,
    PiecewiseConstant,
    QuadraticFlux,
    build_mesh,
    discretize_initial,
    max_timestep,
    run,
    step,
    uniform_network,
)
from netjunction.analysis import l1_distance
from netjunction.network import Arc, Network
from netjunction.scheme import godunov_line, interface_fluxes

pytestmark = pytest.mark.filterwarnings("ignore::netjunction.OuterBoundaryWarning")


def random_network(rng, cells=24):
    m, n = (int(k) for k in rng.integers(1, 4, 2))
    speeds = rng.choice([0.5, 1.0, 2.0], m + n)
    arcs = [Arc(f"a{h}", QuadraticFlux(float(v)), 1.0) for h, v in enumerate(speeds)]
    net = Network(tuple(arcs[:m]), tuple(arcs[m:]))
    return net, build_mesh(net, 1.0 / cells)


def random_state(rng, mesh, buffer=0):
    """Random cell values; the `buffer` outermost cells of each arc are set to 0.5."""
    rho = []
    for h, n in enumerate(mesh.cells):
        r = rng.uniform(0, 1, n)
        if rng.random() < 0.3:
            r = np.repeat(rng.uniform(0, 1, 4), -(-n // 4))[:n]
        if buffer:
            if h < mesh.m:
                r[:buffer] = 0.5
            else:
                r[-buffer:] = 0.5
        rho.append(r)
    return GridSolution(mesh, tuple(rho))


class TestMesh:
    @pytest.mark.parametrize("length, dx, cells", [(0.6, 0.01, 60), (0.5, 1e-4, 5000), (1 / 6, 1 / 6 / 1667, 1667)])
    def test_counts(self, length, dx, cells):
        mesh = build_mesh(uniform_network(2, 1, length), dx)
        assert mesh.cells == (cells,) * 3

    def test_too_coarse(self):
        with pytest.raises(ConfigError, match="at least 2"):
            build_mesh(uniform_network(1, 1, 0.5), 0.5)

    def test_not_commensurate(self):
        with pytest.raises(ConfigError, match="multiple"):
            build_mesh(uniform_network(1, 1, 0.5), 0.3)

    def test_junction_is_interface_zero(self):
        mesh = build_mesh(uniform_network(2, 2, 0.6), 0.01)
        for h in range(4):
            x = mesh.interfaces(h)
            assert (x[-1] if h < 2 else x[0]) == 0.0
        assert mesh.centers(0)[-1] == pytest.approx(-0.005)
        assert mesh.centers(2)[0] == pytest.approx(0.005)


class TestInitialData:
    def test_step_function(self):
        net = uniform_network(2, 1, 0.6)
        mesh = build_mesh(net, 0.05)
        state = discretize_initial([PiecewiseConstant(((-0.5, 0.0, 1.0),)), 0.0, 0.0], mesh, net)
        edges = mesh.interfaces(0)
        k = int(np.argmin(np.abs(edges - (-0.5))))
        assert state.rho[0][k] == 1.0
        assert state.rho[0][k - 1] == 0.0
        assert np.all(state.rho[1] == 0.0)

    def test_partial_cell_against_quadrature(self):
        net = uniform_network(2, 1, 0.6)
        mesh = build_mesh(net, 0.1)
        profile = PiecewiseConstant(((-0.25, 0.0, 0.75),))
        state = discretize_initial({"in2": profile}, mesh, net)
        k = int(np.argmin(np.abs(mesh.interfaces(1) - (-0.3))))
        # 10^6-point midpoint rule on [-0.3, -0.2]
        x = -0.3 + (np.arange(1_000_000) + 0.5) * 1e-7
        oracle = float(np.where(x >= -0.25, 0.75, 0.0).mean())
        assert state.rho[1][k] == pytest.approx(0.375, abs=1e-15)
        assert oracle == pytest.approx(0.375, abs=1e-6)

    def test_callable_profile(self):
        net = uniform_network(1, 1, 1.0)
        mesh = build_mesh(net, 0.1)
        state = discretize_initial([lambda x: -x, lambda x: x], mesh, net)
        np.testing.assert_allclose(state.rho[1], mesh.centers(1), atol=1e-14)

    def test_outside_domain(self):
        net = uniform_network(1, 1, 0.5)
        mesh = build_mesh(net, 0.1)
        with pytest.raises(ConfigError, match="outside"):
            discretize_initial([PiecewiseConstant(((-0.7, 0.0, 1.0),)), 0.0], mesh, net)

    def test_unknown_arc(self):
        net = uniform_network(1, 1, 0.5)
        with pytest.raises(ConfigError, match="unknown"):
            discretize_initial({"nope": 0.3}, build_mesh(net, 0.1), net)

    def test_overlap_rejected(self):
        with pytest.raises(ConfigError):
            PiecewiseConstant(((0.0, 0.5, 1.0), (0.4, 0.6, 0.2)))


class TestTimestep:
    def test_unit_speed(self):
        assert max_timestep(uniform_network(2, 1, 0.5), 1e-4) == pytest.approx(0.5e-4)

    def test_fastest_arc_wins(self):
        arcs = [Arc(f"a{v}", QuadraticFlux(v), 1.0) for v in (1.0, 2.0, 4.0)]
        assert max_timestep(Network(tuple(arcs[:2]), (arcs[2],)), 0.1) == pytest.approx(0.0125)

    def test_formula(self):
        net = uniform_network(1, 1, 2.0, QuadraticFlux(0.5))
        assert max_timestep(net, 1.0) == 1.0

    def test_violation(self):
        net = uniform_network(1, 1, 1.0)
        mesh = build_mesh(net, 0.1)
        state = discretize_initial([0.3, 0.3], mesh, net)
        before = [r.copy() for r in state.rho]
        with pytest.raises(CFLError):
            step(state, net, mesh, 0.1)
        assert all(np.array_equal(a, b) for a, b in zip(before, state.rho))


class TestStep:
    # stationary only when m = n: the junction then passes m f(0.3) on unchanged
    @pytest.mark.parametrize("m, n", [(1, 1), (2, 2), (3, 3)])
    def test_constant_state(self, m, n):
        net = uniform_network(m, n, 1.0)
        mesh = build_mesh(net, 0.05)
        state = discretize_initial([0.3] * (m + n), mesh, net)
        new = step(state, net, mesh, 0.025)
        for a, b in zip(state.rho, new.rho):
            np.testing.assert_allclose(a, b, rtol=0, atol=1e-16)

    def test_stationary_shock(self):
        net = uniform_network(1, 1, 1.0)
        mesh = build_mesh(net, 0.01)
        state = discretize_initial([0.2, 0.8], mesh, net)
        traj = run(net, mesh, state, 1e4 * 0.005, dt=0.005)
        assert traj.final.step == 10_000
        assert np.all(traj.final.rho[0] == 0.2)
        assert np.all(traj.final.rho[1] == 0.8)
        assert np.max(traj.log["residual"]) <= 1e-12

    def test_rarefaction_direction(self):
        net = uniform_network(1, 1, 1.0)
        mesh = build_mesh(net, 0.01)
        state = discretize_initial([0.8, 0.2], mesh, net)
        new = step(state, net, mesh, 0.005)
        assert new.junction.total_flux == pytest.approx(0.25, abs=1e-12)
        lam = 0.5
        assert new.rho[0][-1] == pytest.approx(0.8 - lam * (0.25 - 0.16))
        assert new.rho[1][0] == pytest.approx(0.2 + lam * (0.25 - 0.16))
        assert new.rho[0][-1] < 0.8 and new.rho[1][0] > 0.2

    def test_records_resolution(self):
        net = uniform_network(2, 1, 0.6)
        mesh = build_mesh(net, 0.05)
        state = discretize_initial([1.0, 0.75, 0.0], mesh, net)
        new = step(state, net, mesh, 0.025)
        assert new.step == 1 and new.t == 0.025
        assert new.junction.p == pytest.approx((2 + math.sqrt(2)) / 4, abs=1e-12)

    def test_interface_flux_shapes(self, rng):
        net, mesh = random_network(rng)
        fluxes, res = interface_fluxes(net, random_state(rng, mesh).rho)
        assert [F.size for F in fluxes] == [c + 1 for c in mesh.cells]
        assert res.residual <= 1e-12


class TestRun:
    def test_zero_time(self):
        net = uniform_network(1, 1, 1.0)
        traj = run(net, build_mesh(net, 0.1), [0.2, 0.4], 0.0)
        assert len(traj.snapshots) == 1
        assert traj.final.step == 0
        assert traj.log["t"].size == 0

    def test_snapshot_times(self):
        net = uniform_network(1, 1, 1.0)
        mesh = build_mesh(net, 0.01)
        traj = run(net, mesh, [0.2, 0.4], 0.1, output_times=[0.0333], dt=0.005)
        req = [s.requested_t for s in traj.snapshots]
        assert req == [0.0, 0.0333, 0.1]
        assert traj.snapshots[1].state.step == 7
        assert traj.snapshots[1].t == pytest.approx(0.035)
        assert traj.final.t == pytest.approx(0.1)

    def test_output_time_out_of_range(self):
        net = uniform_network(1, 1, 1.0)
        with pytest.raises(ConfigError):
            run(net, build_mesh(net, 0.1), [0.2, 0.4], 0.1, output_times=[0.5])

    def test_cfl_factor(self):
        net = uniform_network(1, 1, 1.0)
        traj = run(net, build_mesh(net, 0.1), [0.2, 0.4], 0.1, cfl_factor=0.5)
        assert traj.dt == pytest.approx(0.025)
        with pytest.raises(ConfigError):
            run(net, build_mesh(net, 0.1), [0.2, 0.4], 0.1, cfl_factor=1.5)

    def test_boundary_warning(self):
        net = uniform_network(1, 1, 0.2)
        mesh = build_mesh(net, 0.01)
        with pytest.warns(OuterBoundaryWarning, match="out1"):
            run(net, mesh, [0.8, 0.2], 0.5, dt=0.005)

    def test_quiet_when_waves_stay_inside(self):
        net = uniform_network(1, 1, 1.0)
        mesh = build_mesh(net, 0.01)
        with warnings.catch_warnings():
            warnings.simplefilter("error", OuterBoundaryWarning)
            traj = run(net, mesh, [0.8, 0.2], 0.2, dt=0.005)
        assert traj.boundary_hits == {}

    def test_deterministic(self):
        net = uniform_network(2, 1, 0.6)
        mesh = build_mesh(net, 0.01)
        ic = [PiecewiseConstant(((-0.5, 0.0, 1.0),)), PiecewiseConstant(((-0.25, 0.0, 0.75),)), 0.0]
        a = run(net, mesh, ic, 0.5, dt=0.005)
        b = run(net, mesh, ic, 0.5, dt=0.005)
        assert all(np.array_equal(x, y) for x, y in zip(a.final.rho, b.final.rho))


class TestSingleArcLine:
    def test_matches_network(self):
        # 1-1 network on [-1/2, 1/2] versus a line on [0, 1]
        net = uniform_network(1, 1, 0.5)
        mesh = build_mesh(net, 0.01)
        ic = {"in1": PiecewiseConstant(((-0.25, 0.0, 0.75),)), "out1": PiecewiseConstant(((0.0, 0.25, 0.75),))}
        traj = run(net, mesh, ic, 0.3, dt=0.005)
        _, line = godunov_line(net.fluxes[0], 0.0, 1.0, 0.01, PiecewiseConstant(((0.25, 0.75, 0.75),)), 0.005, 60)
        assert np.max(np.abs(np.concatenate(traj.final.rho) - line)) <= 1e-12


class TestProperties:
    def test_maximum_principle(self, rng):
        for _ in range(50):
            net, mesh = random_network(rng)
            state = random_state(rng, mesh)
            dt = max_timestep(net, mesh.dx)
            lo, hi = 1.0, 0.0
            for _ in range(1000):
                state = step(state, net, mesh, dt)
                lo = min(lo, min(float(r.min()) for r in state.rho))
                hi = max(hi, max(float(r.max()) for r in state.rho))
            assert lo >= 0.0 and hi <= 1.0

    def test_conservation(self, rng):
        tol = 1e-12
        for _ in range(20):
            net, mesh = random_network(rng)
            traj = run(net, mesh, random_state(rng, mesh), 200 * max_timestep(net, mesh.dx), tol=tol)
            assert np.max(traj.log["residual"]) <= tol
            assert np.max(np.abs(traj.log["mass_defect"])) <= (net.m + net.n) * tol

    def test_l1_contraction(self, rng):
        # The outermost 40 cells agree and differences move at most one cell
        # per step, so 30 steps never involve the outer ghost cells.
        for _ in range(100):
            net, mesh = random_network(rng, cells=60)
            a = random_state(rng, mesh, buffer=40)
            b = random_state(rng, mesh, buffer=40)
            dt = max_timestep(net, mesh.dx)
            d = l1_distance(a, b)
            for _ in range(30):
                a, b = step(a, net, mesh, dt), step(b, net, mesh, dt)
                d_new = l1_distance(a, b)
                assert d_new <= d + 1e-14
                d = d_new

    def test_order_preserved(self, rng):
        for _ in range(50):
            net, mesh = random_network(rng)
            a = random_state(rng, mesh)
            b = GridSolution(mesh, tuple(np.minimum(1.0, r + rng.uniform(0, 0.3, r.size)) for r in a.rho))
            dt = max_timestep(net, mesh.dx)
            for _ in range(100):
                a, b = step(a, net, mesh, dt), step(b, net, mesh, dt)
                assert all(np.all(x <= y + 1e-15) for x, y in zip(a.rho, b.rho))
