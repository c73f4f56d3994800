import numpy as np
import pytest

from quasibohm import (
    InvalidParameterError,
    evolve_ode,
    lyapunov_ratio,
    lyapunov_two_trajectory,
    lyapunov_variational,
)


class TestStationary:
    def test_all_estimators_zero(self, stationary):
        state, x0 = stationary
        t = np.linspace(0.0, 50.0, 51)
        var = lyapunov_variational(state, x0, t)
        assert np.max(np.abs(var.lambda_hat)) < 1e-12
        rat = lyapunov_ratio(state, evolve_ode(state, x0, t))
        assert np.max(np.abs(rat.lambda_hat)) < 1e-12
        two = lyapunov_two_trajectory(state, x0, t[:11])
        assert np.max(np.abs(two.lambda_hat)) < 1e-6


class TestRatioIdentity:
    @pytest.mark.parametrize("preset_name", ["two-mode-box", "harmonic-three"])
    def test_matches_variational(self, all_presets, preset_name):
        state, x0 = all_presets[preset_name]
        t = np.linspace(0.0, 100.0, 201)
        var = lyapunov_variational(state, x0, t)
        traj = evolve_ode(state, x0, t)
        rat = lyapunov_ratio(state, traj)
        assert np.max(np.abs(var.log_stretch - rat.log_stretch)) < 1e-5

    def test_log_stretch_bounded_by_density_range(self, two_mode_box):
        # ln delta = ln(rho_0 / rho_t) can never exceed the log of the
        # density range visited, which is finite away from nodes
        state, x0 = two_mode_box
        t = np.linspace(0.0, 100.0, 201)
        traj = evolve_ode(state, x0, t)
        rat = lyapunov_ratio(state, traj)
        rho0 = state.density(x0, 0.0)
        bound = np.log(rho0 / traj.diagnostics["min_density"]) + 1e-12
        assert np.max(rat.log_stretch) <= bound


class TestPeriodicStretch:
    def test_two_mode_log_stretch_periodic(self, two_mode_box):
        # period of the n = 1 flow is 2 pi / 1.5; ln delta shares it
        state, x0 = two_mode_box
        T = 2.0 * np.pi / 1.5
        m = 12
        t = np.linspace(0.0, 3 * T, 3 * m + 1)
        var = lyapunov_variational(state, x0, t)
        stretch = np.concatenate([[0.0], var.log_stretch])
        assert np.max(np.abs(stretch[m:2 * m] - stretch[:m])) < 1e-5
        assert np.max(np.abs(stretch[2 * m:3 * m] - stretch[:m])) < 1e-5


class TestTwoTrajectory:
    def test_matches_variational_at_horizon(self, two_mode_box):
        state, x0 = two_mode_box
        t = np.linspace(0.0, 100.0, 101)
        var = lyapunov_variational(state, x0, t)
        two = lyapunov_two_trajectory(state, x0, t)
        assert two.lambda_hat[-1] == pytest.approx(var.lambda_hat[-1], abs=1e-3)

    def test_insensitive_to_d0(self, two_mode_box):
        state, x0 = two_mode_box
        t = np.linspace(0.0, 50.0, 51)
        a = lyapunov_two_trajectory(state, x0, t, d0=1e-6)
        b = lyapunov_two_trajectory(state, x0, t, d0=5e-7)
        assert a.lambda_hat[-1] == pytest.approx(b.lambda_hat[-1], abs=1e-4)

    def test_invalid_parameters(self, two_mode_box):
        state, x0 = two_mode_box
        t = np.linspace(0.0, 10.0, 11)
        with pytest.raises(InvalidParameterError):
            lyapunov_two_trajectory(state, x0, t, d0=0.0)
        with pytest.raises(InvalidParameterError):
            lyapunov_two_trajectory(state, x0, t, renorm_every=-1.0)
