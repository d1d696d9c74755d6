import numpy as np
import pytest

from conftest import random_spd
from rimu_opt import inner
from rimu_opt.errors import DegenerateDirection, SurrogateIndefinite
from rimu_opt.model import (
    FomKind,
    NoiseModel,
    SensorConfiguration,
    evaluate_fom,
    optimality_defect,
)
from rimu_opt.solver import (
    SolverSettings,
    multi_start,
    random_configuration,
    solve,
    solve_a_optimal,
    solve_d_optimal,
    surrogate_value,
    update_H,
)

TIGHT = dict(eps_outer=1e-13, max_outer_iters=5000, eps_inner=1e-12, max_inner_sweeps=2000)


def scaled_identity(m, sigma2=3.0):
    return NoiseModel.from_covariance(sigma2 * np.eye(m))


class TestRandomConfiguration:
    def test_deterministic_in_seed(self):
        a = random_configuration(5, seed=42)
        b = random_configuration(5, seed=42)
        assert np.array_equal(a.axes, b.axes)
        c = random_configuration(5, seed=43)
        assert not np.array_equal(a.axes, c.axes)

    def test_full_rank_guard(self):
        for seed in range(20):
            cfg = random_configuration(3, seed)
            assert np.min(np.linalg.eigvalsh(cfg.gram())) > 1e-6

    def test_row_norm_audit(self):
        worst = 0.0
        for seed in range(1000):
            cfg = random_configuration(4, seed)
            worst = max(worst, float(np.max(np.abs(np.linalg.norm(cfg.axes, axis=1) - 1.0))))
        assert worst <= 1e-12


class TestUpdateH:
    def test_identity_s_normalizes_rows(self, rng):
        cfg = SensorConfiguration(np.eye(3))
        noise = NoiseModel.from_covariance(np.diag([1.0, 2.0, 4.0]))
        state = inner.init_inner(cfg, noise)
        got = update_H(state)
        expected = state.C / np.linalg.norm(state.C, axis=1, keepdims=True)
        assert np.allclose(got.axes, expected, atol=1e-14)

    def test_null_space_hit_raises(self):
        state = inner.InnerState(
            C=np.ascontiguousarray(np.eye(3)),
            A=np.ascontiguousarray(np.eye(3)),
            V=np.ascontiguousarray(np.eye(3)),
            Q=np.ascontiguousarray(np.diag([1.0, 1.0, 0.0])),
            u=np.ones(3),
            F=np.ascontiguousarray(np.eye(3)),
            P=np.ascontiguousarray(np.zeros((3, 3))),
        )
        with pytest.raises(DegenerateDirection):
            update_H(state)

    def test_fixed_point_at_converged_optimum(self):
        noise = NoiseModel.from_covariance(np.eye(3))
        sol = solve_a_optimal(noise, SolverSettings(seed=5, **TIGHT))
        # Polish with a few more iterations of the same map, then one more
        # application must leave the configuration in place.
        cfg = sol.configuration
        q_warm = np.eye(3)
        for _ in range(4):
            state = inner.init_inner(cfg, noise, q0=q_warm)
            inner.solve_inner(state, eps_inner=1e-13, max_sweeps=3000)
            cfg = update_H(state)
            q_warm = state.Q.copy()
        state = inner.init_inner(cfg, noise, q0=q_warm)
        inner.solve_inner(state, eps_inner=1e-13, max_sweeps=3000)
        advanced = update_H(state)
        assert np.max(np.abs(advanced.axes - cfg.axes)) <= 1e-8


class TestSurrogateValue:
    def test_touching_condition(self, rng):
        from conftest import random_unit_rows

        h = SensorConfiguration(random_unit_rows(5, rng))
        noise = NoiseModel.from_covariance(random_spd(5, rng))
        value = surrogate_value(h, h, noise)
        truth = evaluate_fom(h, noise, FomKind.A_TRACE)
        assert value == pytest.approx(truth, rel=1e-12)

    def test_trivial_value(self):
        cfg = SensorConfiguration(np.eye(3))
        assert surrogate_value(cfg, cfg, NoiseModel.from_covariance(np.eye(3))) == pytest.approx(3.0, abs=1e-12)

    def test_majorizes_near_anchor(self, rng):
        from conftest import random_unit_rows

        anchor = SensorConfiguration(random_unit_rows(5, rng))
        noise = NoiseModel.from_covariance(random_spd(5, rng))
        checked = 0
        while checked < 100:
            probe_rows = anchor.axes + 0.05 * rng.standard_normal((5, 3))
            probe_rows /= np.linalg.norm(probe_rows, axis=1, keepdims=True)
            probe = SensorConfiguration(probe_rows)
            try:
                bound = surrogate_value(probe, anchor, noise)
            except SurrogateIndefinite:
                continue
            truth = evaluate_fom(probe, noise, FomKind.A_TRACE)
            assert bound >= truth - 1e-9 * max(1.0, abs(truth))
            checked += 1

    def test_indefinite_raises(self):
        anchor = SensorConfiguration(np.eye(3))
        flipped = SensorConfiguration(-np.eye(3))
        noise = NoiseModel.from_covariance(np.eye(3))
        with pytest.raises(SurrogateIndefinite):
            surrogate_value(flipped, anchor, noise)


class TestAOptimal:
    def test_three_sensors_closed_form(self):
        sol = solve_a_optimal(scaled_identity(3), SolverSettings(seed=0, **TIGHT))
        assert sol.converged
        assert sol.objective == pytest.approx(9.0, abs=1e-6)
        assert optimality_defect(sol.configuration) <= 1e-5

    def test_four_sensors_closed_form(self):
        sol = solve_a_optimal(scaled_identity(4), SolverSettings(seed=0, **TIGHT))
        assert sol.objective == pytest.approx(27.0 / 4.0, abs=1e-6)
        assert np.sqrt(((sol.configuration.gram() - (4.0 / 3.0) * np.eye(3)) ** 2).sum()) <= 1e-4

    def test_random_noise_converges_monotonically(self, rng):
        noise = NoiseModel.from_covariance(random_spd(5, rng))
        sol = solve_a_optimal(noise, SolverSettings(seed=9))
        assert sol.converged
        objs = sol.trace.objectives()
        assert np.all(np.diff(objs) <= 1e-12 * np.maximum(1.0, np.abs(objs[:-1])))

    def test_objective_matches_reported_configuration(self, rng):
        noise = NoiseModel.from_covariance(random_spd(4, rng))
        sol = solve_a_optimal(noise, SolverSettings(seed=2))
        direct = evaluate_fom(sol.configuration, noise, FomKind.A_TRACE)
        assert sol.objective == pytest.approx(direct, rel=1e-12)


class TestDOptimal:
    def test_three_sensor_anchor(self):
        sol = solve_d_optimal(scaled_identity(3), SolverSettings(fom=FomKind.D_LOG_DET, seed=0, **TIGHT))
        assert sol.objective == pytest.approx(3.295836, abs=1e-4)
        h = sol.configuration.axes
        for i in range(3):
            for j in range(i + 1, 3):
                assert abs(float(h[i] @ h[j])) <= 1e-5

    def test_four_sensor_anchor(self):
        sol = solve_d_optimal(scaled_identity(4), SolverSettings(fom=FomKind.D_LOG_DET, seed=0, **TIGHT))
        assert sol.objective == pytest.approx(2.432790, abs=1e-4)
        assert optimality_defect(sol.configuration) <= 1e-4

    def test_random_noise_monotone(self, rng):
        noise = NoiseModel.from_covariance(random_spd(5, rng))
        sol = solve_d_optimal(noise, SolverSettings(fom=FomKind.D_LOG_DET, seed=1))
        assert sol.converged
        objs = sol.trace.objectives()
        assert np.all(np.diff(objs) <= 1e-12 * np.maximum(1.0, np.abs(objs[:-1])))


class TestMultiStart:
    def test_single_restart_matches_solve(self):
        noise = scaled_identity(4)
        settings = SolverSettings(seed=3)
        direct = solve(noise, settings)
        multi = multi_start(noise, settings)
        assert np.array_equal(direct.configuration.axes, multi.configuration.axes)
        assert multi.restart_objectives == (direct.objective,)

    def test_ten_restarts_land_together(self):
        settings = SolverSettings(fom=FomKind.D_LOG_DET, seed=0, restarts=10, eps_outer=1e-11, max_outer_iters=3000)
        sol = multi_start(scaled_identity(4), settings)
        finals = np.array(sol.restart_objectives)
        assert finals.max() - finals.min() <= 1e-4
        assert sol.objective == finals.min()

    def test_diagonal_noise_spread(self, rng):
        noise = NoiseModel.from_covariance(np.diag(rng.uniform(0.5, 4.0, size=6)))
        settings = SolverSettings(fom=FomKind.D_LOG_DET, seed=7, restarts=10, eps_outer=1e-11, max_outer_iters=3000)
        sol = multi_start(noise, settings)
        finals = np.array(sol.restart_objectives)
        assert (finals.max() - finals.min()) <= 1e-3 * max(1.0, abs(finals.min()))


class TestSolverBehavior:
    def test_deterministic_given_settings(self, rng):
        noise = NoiseModel.from_covariance(random_spd(5, rng))
        settings = SolverSettings(fom=FomKind.D_LOG_DET, seed=13)
        a = solve(noise, settings)
        b = solve(noise, settings)
        assert np.array_equal(a.configuration.axes, b.configuration.axes)
        assert a.objective == b.objective

    def test_h0_is_honored(self):
        noise = scaled_identity(3)
        h0 = SensorConfiguration(np.eye(3))
        sol = solve_a_optimal(noise, SolverSettings(), h0=h0)
        assert sol.trace[0].objective == pytest.approx(9.0, abs=1e-12)
        assert sol.seed is None

    def test_iteration_cap_reports_not_converged(self, rng):
        noise = NoiseModel.from_covariance(random_spd(6, rng))
        sol = solve_a_optimal(noise, SolverSettings(seed=1, max_outer_iters=2))
        assert not sol.converged
        assert sol.outer_iters == 2

    def test_sandwich_descent_chain(self):
        noise = scaled_identity(5)
        sol = solve_a_optimal(noise, SolverSettings(seed=4, eps_outer=1e-11, max_outer_iters=2000))
        records = list(sol.trace)
        for prev, cur in zip(records[:-1], records[1:]):
            g_next = surrogate_value(cur.config, prev.config, noise)
            assert cur.objective <= g_next + 1e-8
            assert g_next <= prev.objective + 1e-8

    def test_rotation_leaves_converged_objective(self, rng):
        from conftest import random_orthogonal
        from rimu_opt.model import rotate_configuration

        noise = scaled_identity(4)
        sol = solve_d_optimal(noise, SolverSettings(fom=FomKind.D_LOG_DET, seed=6, **TIGHT))
        for _ in range(5):
            rotated = rotate_configuration(sol.configuration, random_orthogonal(rng))
            val = evaluate_fom(rotated, noise, FomKind.D_LOG_DET)
            assert abs(val - sol.objective) <= 1e-10

    def test_settings_validation(self):
        with pytest.raises(ValueError):
            SolverSettings(fom=FomKind.GDOP)
        with pytest.raises(ValueError):
            SolverSettings(eps_outer=0.0)
        with pytest.raises(ValueError):
            SolverSettings(restarts=0)
        with pytest.raises(ValueError):
            SolverSettings(max_outer_iters=0)

    def test_trace_csv_shape(self):
        sol = solve_a_optimal(scaled_identity(3), SolverSettings(seed=0))
        lines = sol.trace.csv_lines()
        assert lines[0] == "iter,objective,inner_sweeps,optimality_defect"
        assert len(lines) == len(sol.trace) + 1
        assert lines[1].startswith("0,")
