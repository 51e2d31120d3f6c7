import numpy as np
import pytest

from vbsf.pso import ObjectiveError, PsoConfig, PsoResult, history_to_csv, optimize, step_position, step_velocity


def sphere(x):
    return float(x @ x)


def sphere_cfg(seed=42, iterations=200):
    return PsoConfig(bounds=[(-5.0, 5.0)] * 10, swarm_size=30, max_iterations=iterations, seed=seed)


class TestConfig:
    def test_rejects_bad_bounds(self):
        with pytest.raises(ValueError):
            PsoConfig(bounds=[(1.0, 1.0)])
        with pytest.raises(ValueError):
            PsoConfig(bounds=[(2.0, -2.0)])

    def test_rejects_bad_swarm(self):
        with pytest.raises(ValueError):
            PsoConfig(bounds=[(-1, 1)], swarm_size=0)

    def test_rejects_negative_vmax(self):
        with pytest.raises(ValueError):
            PsoConfig(bounds=[(-1, 1)], vmax=-0.5)


class TestStepVelocity:
    def test_inertia_only(self):
        cfg = PsoConfig(bounds=[(-10, 10)], omega=1.0, c1=0.0, c2=0.0)
        v = step_velocity([3.5], [0.0], [1.0], [2.0], cfg, r1=[0.7], r2=[0.2])
        assert v == pytest.approx([3.5])

    def test_hand_computed_update(self):
        # 0.7*1.0 + 1.5*0.5*(3-1) + 1.5*0.5*(5-1) = 0.7 + 1.5 + 3.0 = 5.2
        cfg = PsoConfig(bounds=[(-10, 10)], omega=0.7, c1=1.5, c2=1.5)
        v = step_velocity([1.0], [1.0], [3.0], [5.0], cfg, r1=[0.5], r2=[0.5])
        assert v == pytest.approx([5.2])

    def test_stationary_consensus(self):
        cfg = PsoConfig(bounds=[(-10, 10)] * 3, omega=0.9)
        x = np.array([1.0, -2.0, 0.5])
        v = step_velocity(np.zeros(3), x, x, x, cfg, r1=np.full(3, 0.3), r2=np.full(3, 0.8))
        assert np.allclose(v, 0.0)

    def test_vmax_clamp(self):
        cfg = PsoConfig(bounds=[(-10, 10)], omega=1.0, c1=0.0, c2=0.0, vmax=2.0)
        v = step_velocity([7.0], [0.0], [0.0], [0.0], cfg, r1=[0.0], r2=[0.0])
        assert v == pytest.approx([2.0])

    def test_dimension_mismatch(self):
        cfg = PsoConfig(bounds=[(-1, 1)] * 2)
        with pytest.raises(ValueError):
            step_velocity([0.0], [0.0], [0.0], [0.0], cfg, r1=[0.1], r2=[0.1])


class TestStepPosition:
    def test_plain_addition(self):
        pos, vel = step_position([1.0], [5.2], [(-10.0, 10.0)])
        assert pos == pytest.approx([6.2])
        assert vel == pytest.approx([5.2])

    def test_clamp_zeroes_velocity(self):
        pos, vel = step_position([1.0], [100.0], [(-5.0, 5.0)])
        assert pos == pytest.approx([5.0])
        assert vel == pytest.approx([0.0])

    def test_zero_velocity_identity(self):
        pos, vel = step_position([2.0, -3.0], [0.0, 0.0], [(-5.0, 5.0)] * 2)
        assert pos == pytest.approx([2.0, -3.0])


class TestOptimize:
    def test_constant_objective(self):
        cfg = PsoConfig(bounds=[(-1.0, 1.0)] * 2, swarm_size=5, max_iterations=10, seed=1)
        result = optimize(lambda x: 7.0, cfg)
        assert result.best_value == 7.0
        assert result.history == [7.0] * 10

    def test_sphere_convergence(self):
        result = optimize(sphere, sphere_cfg())
        assert result.best_value < 1e-3

    def test_history_non_increasing(self):
        result = optimize(sphere, sphere_cfg(seed=3, iterations=60))
        assert all(b <= a for a, b in zip(result.history, result.history[1:]))

    def test_determinism(self):
        a = optimize(sphere, sphere_cfg(seed=11, iterations=40))
        b = optimize(sphere, sphere_cfg(seed=11, iterations=40))
        assert np.array_equal(a.best_position, b.best_position)
        assert a.best_value == b.best_value
        assert a.history == b.history

    def test_positions_stay_in_bounds(self):
        cfg = PsoConfig(bounds=[(-2.0, 3.0)] * 4, swarm_size=8, max_iterations=30, seed=5)
        result = optimize(lambda x: float(np.sum(np.abs(x))), cfg)
        assert np.all(result.best_position >= -2.0)
        assert np.all(result.best_position <= 3.0)

    def test_non_finite_objective_aborts_with_location(self):
        cfg = PsoConfig(bounds=[(-1.0, 1.0)], swarm_size=3, max_iterations=5, seed=0)
        calls = []

        def bad(x):
            calls.append(1)
            return float("nan") if len(calls) > 5 else 0.0

        with pytest.raises(ObjectiveError, match=r"iteration \d+, particle \d+"):
            optimize(bad, cfg)

    def test_seeded_initial_positions(self):
        cfg = PsoConfig(bounds=[(-1.0, 1.0)] * 3, swarm_size=4, max_iterations=1, seed=0)
        origin = np.zeros((1, 3))
        result = optimize(sphere, cfg, initial_positions=origin)
        # the origin is the sphere optimum, so gbest can never exceed 0 + noise
        assert result.best_value <= 0.0 + 1e-12

    def test_trace_replay_reproduces_trajectory(self):
        """Replaying recorded (r1, r2) draws through the public step
        operations must reproduce the optimizer's result bit-for-bit."""
        cfg = PsoConfig(bounds=[(-5.0, 5.0)] * 4, swarm_size=6, max_iterations=25, seed=9)
        result = optimize(sphere, cfg, record=True)

        positions = result.initial_positions.copy()
        velocities = result.initial_velocities.copy()
        pbest = positions.copy()
        pbest_values = np.array([sphere(p) for p in positions])
        g = int(np.argmin(pbest_values))
        gbest, gbest_value = pbest[g].copy(), float(pbest_values[g])
        history = []
        for r1, r2 in result.draws:
            for i in range(cfg.swarm_size):
                velocities[i] = step_velocity(
                    velocities[i], positions[i], pbest[i], gbest, cfg, r1[i], r2[i]
                )
                positions[i], velocities[i] = step_position(positions[i], velocities[i], cfg.bounds)
            for i in range(cfg.swarm_size):
                v = sphere(positions[i])
                if v < pbest_values[i]:
                    pbest[i], pbest_values[i] = positions[i].copy(), v
            g = int(np.argmin(pbest_values))
            if pbest_values[g] < gbest_value:
                gbest, gbest_value = pbest[g].copy(), float(pbest_values[g])
            history.append(gbest_value)

        assert np.array_equal(gbest, result.best_position)
        assert gbest_value == result.best_value
        assert history == result.history

    def test_single_particle_matches_combined_coefficient_form(self):
        """With one particle gbest == pbest, so the two attraction terms
        collapse to a single coefficient (c1*r1 + c2*r2) toward pbest."""
        cfg = PsoConfig(
            bounds=[(-5.0, 5.0)] * 2, swarm_size=1, max_iterations=10, seed=21
        )
        result = optimize(sphere, cfg, record=True)

        pos = result.initial_positions[0].copy()
        vel = result.initial_velocities[0].copy()
        pbest = pos.copy()
        pbest_value = sphere(pos)
        for r1, r2 in result.draws:
            combined = cfg.c1 * r1[0] + cfg.c2 * r2[0]
            vel = cfg.omega * vel + combined * (pbest - pos)
            pos, vel = step_position(pos, vel, cfg.bounds)
            v = sphere(pos)
            if v < pbest_value:
                pbest, pbest_value = pos.copy(), v
        # algebraically identical; float association differs at the last ulp
        assert np.allclose(pbest, result.best_position, rtol=0, atol=1e-12)
        assert pbest_value == pytest.approx(result.best_value, abs=1e-12)


class TestHistoryCsv:
    def test_csv_format(self, tmp_path):
        path = tmp_path / "history.csv"
        history_to_csv([3.0, 2.0, 2.0], path)
        lines = path.read_text().splitlines()
        assert lines[0] == "iteration,gbest_value"
        assert lines[1] == "0,3.0"
        assert len(lines) == 4
