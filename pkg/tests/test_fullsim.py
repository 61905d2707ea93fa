import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import solve_ivp
from scipy.optimize import fsolve

from srde_reduce.errors import DivergenceError, InvalidStepError
from srde_reduce.fullsim import (
    SimConfig,
    Trajectory,
    equilibrium_amplitude,
    simulate_batch,
    simulate_coupled,
    simulate_full,
    step_full,
)
from srde_reduce.noise import SeededRng
from srde_reduce.params import ModelParams, NoiseSpectrum, example_params
from srde_reduce.spectral import Basis, cubic_galerkin


class TestSimConfig:
    @pytest.mark.parametrize(
        "kw",
        [{"dt": 0.0}, {"T": -1.0}, {"backend": "fem"}, {"scheme": "rk4"}, {"stride": 0},
         {"grid_points": 2}, {"monitor_mode": 0}, {"slow_dt": 0.0}],
    )
    def test_rejects(self, kw):
        with pytest.raises(ValueError):
            SimConfig(**kw)

    def test_step_error_type(self):
        with pytest.raises(InvalidStepError):
            SimConfig(dt=-1e-3)

    def test_n_steps(self):
        assert SimConfig(dt=0.01, T=1.0).n_steps == 100


class TestDeterministic:
    def test_equilibrium_amplitude(self):
        assert equilibrium_amplitude(example_params(0.1, eps_gamma=0.75)) == pytest.approx(1.0)
        assert equilibrium_amplitude(example_params(0.1, eps_gamma=-0.5)) == 0.0

    @pytest.mark.parametrize("scheme", ["semi-implicit", "exponential"])
    def test_matches_ode_solver(self, scheme):
        # sigma = 0: the Galerkin ODE solved independently by an adaptive RK method
        p = example_params(0.1, eps_gamma=0.8, sigma=0.0, total_modes=6)
        T = 5.0
        cfg = SimConfig(dt=1e-4, T=T, stride=50000, a0=0.2, scheme=scheme)
        traj = simulate_full(p, cfg)
        lin = -p.alphas + p.eps_gamma

        def rhs(_, w):
            return lin * w + cubic_galerkin(w, method="coupling")

        w0 = np.zeros(6)
        w0[0] = 0.2
        ref = solve_ivp(rhs, (0, T), w0, rtol=1e-11, atol=1e-13).y[0, -1]
        assert traj.amplitude[-1] == pytest.approx(ref, rel=2e-4)

    def test_relaxes_to_galerkin_fixed_point(self):
        # the sin 3x harmonic lifts the amplitude above the one-mode value
        p = example_params(0.1, eps_gamma=1.0, sigma=0.0)
        traj = simulate_full(p, SimConfig(dt=0.01, T=200.0, stride=1000))
        lin = -p.alphas + p.eps_gamma
        guess = np.zeros(p.M)
        guess[0] = 1.0
        root = fsolve(lambda w: lin * w + cubic_galerkin(w, method="coupling"), guess, xtol=1e-13)
        assert traj.amplitude[-1] == pytest.approx(root[0], rel=1e-9)
        assert traj.amplitude[-1] > equilibrium_amplitude(p)

    def test_finite_difference_agrees_with_spectral(self):
        p = example_params(0.1, eps_gamma=1.0, sigma=0.0)
        cfg = SimConfig(dt=0.01, T=100.0, stride=10000, a0=0.5)
        spec = simulate_full(p, cfg).amplitude[-1]
        fd = simulate_full(p, SimConfig(dt=0.01, T=100.0, stride=10000, a0=0.5,
                                        backend="finite-difference")).amplitude[-1]
        assert fd == pytest.approx(spec, rel=0.05)

    def test_fd_rejects_exponential(self):
        with pytest.raises(ValueError):
            simulate_full(example_params(), SimConfig(backend="finite-difference", scheme="exponential"))


class TestStochasticLinear:
    """Linear problem (``cubic=False``): mode 2 is an OU process with known variance."""

    def setup_method(self):
        self.p = example_params(0.1)
        self.k = self.p.alphas[1] - self.p.eps_gamma
        self.s2 = self.p.eps * self.p.sigma**2

    def _var(self, scheme, dt):
        cfg = SimConfig(dt=dt, T=40.0, stride=10, cubic=False, a0=0.0, scheme=scheme, monitor_mode=2)
        res = simulate_batch(self.p, cfg, range(400))
        return res.amplitude[:, res.amplitude.shape[1] // 4:].var()

    def test_exponential_is_exact(self):
        assert self._var("exponential", 0.05) == pytest.approx(self.s2 / (2 * self.k), rel=0.03)

    def test_semi_implicit_discrete_variance(self):
        dt = 0.05
        # stationary variance of x' = x/(1+k dt) + s sqrt(dt) z/(1+k dt)
        expected = self.s2 / (self.k * (2 + self.k * dt))
        assert self._var("semi-implicit", dt) == pytest.approx(expected, rel=0.03)


class TestBatching:
    def test_independent_of_batch_composition(self):
        p = example_params(0.1)
        cfg = SimConfig(dt=0.01, T=2.0, stride=10, chunk_steps=37)
        all3 = simulate_batch(p, cfg, [0, 1, 2]).amplitude
        one = simulate_batch(p, cfg, [1]).amplitude
        np.testing.assert_array_equal(all3[1], one[0])

    def test_chunk_size_irrelevant(self):
        p = example_params(0.1)
        a = simulate_batch(p, SimConfig(dt=0.01, T=2.0, stride=5, chunk_steps=7), [4]).amplitude
        b = simulate_batch(p, SimConfig(dt=0.01, T=2.0, stride=5, chunk_steps=4096), [4]).amplitude
        np.testing.assert_array_equal(a, b)

    def test_seed_changes_path(self):
        p = example_params(0.1)
        a = simulate_batch(p, SimConfig(dt=0.01, T=1.0, seed=0), [0]).amplitude
        b = simulate_batch(p, SimConfig(dt=0.01, T=1.0, seed=1), [0]).amplitude
        assert not np.array_equal(a, b)

    def test_divergence_flagged_not_raised(self):
        p = example_params(0.1)
        res = simulate_batch(p, SimConfig(dt=0.5, T=5.0, stride=1, a0=50.0), [0, 1])
        assert res.diverged.all()
        assert np.all(res.divergence_time <= 5.0)
        with pytest.raises(DivergenceError):
            simulate_full(p, SimConfig(dt=0.5, T=5.0, stride=1, a0=50.0))


class TestCoupled:
    def test_equals_full_at_eps_one(self):
        p = ModelParams(eps=1.0, gamma=0.5, sigma=0.7, basis=Basis(6, 0.0),
                        spectrum=NoiseSpectrum.single_mode(2, 6, 1))
        cfg = SimConfig(dt=0.01, T=2.0, stride=10)
        np.testing.assert_array_equal(simulate_full(p, cfg).amplitude, simulate_coupled(p, cfg).amplitude)

    def test_equals_full_when_slow_rate_vanishes(self):
        p = example_params(0.1)
        cfg = SimConfig(dt=0.01, T=2.0, stride=10)
        np.testing.assert_array_equal(simulate_full(p, cfg).amplitude, simulate_coupled(p, cfg).amplitude)

    def test_differs_otherwise(self):
        p = ModelParams(eps=0.1, gamma=1.0, sigma=1.0, basis=Basis(6, 0.0),
                        spectrum=NoiseSpectrum.single_mode(2, 6, 1))
        cfg = SimConfig(dt=0.01, T=2.0, stride=10)
        assert not np.allclose(simulate_full(p, cfg).amplitude, simulate_coupled(p, cfg).amplitude)


class TestTrajectory:
    def test_csv_roundtrip(self, tmp_path):
        p = example_params(0.1)
        tr = simulate_full(p, SimConfig(dt=0.01, T=1.0, stride=10, keep_fields=True))
        tr.to_csv(tmp_path / "t.csv")
        back = Trajectory.from_csv(tmp_path / "t.csv")
        np.testing.assert_array_equal(back.amplitude, tr.amplitude)
        np.testing.assert_array_equal(back.fields, tr.fields)
        assert tr.columns()[:3] == ["t", "a", "c1"]

    def test_validation(self):
        with pytest.raises(ValueError):
            Trajectory([0.0, 1.0], [1.0])
        with pytest.raises(ValueError):
            Trajectory([1.0, 0.0], [1.0, 1.0])


class TestStepFull:
    @settings(max_examples=20, deadline=None)
    @given(st.floats(-1, 1), st.floats(1e-4, 0.05))
    def test_deterministic_step_matches_simulator(self, a0, dt):
        p = example_params(0.1, sigma=0.0)
        w0 = np.zeros(p.M)
        w0[0] = a0
        one = step_full(w0, p, dt, SeededRng(0))
        sim = simulate_full(p, SimConfig(dt=dt, T=dt, stride=1, keep_fields=True), w0=w0).fields[-1]
        np.testing.assert_allclose(one, sim, atol=1e-14)

    def test_noise_enters_mode_two_only(self):
        p = example_params(0.1)
        out = step_full(np.zeros(p.M), p, 0.01, SeededRng(1), cubic=False)
        assert out[1] != 0.0 and np.all(out[[0, 2, 3, 4]] == 0.0)

    def test_rejects_bad_input(self):
        p = example_params(0.1)
        with pytest.raises(InvalidStepError):
            step_full(np.zeros(p.M), p, 0.0, 0)
        with pytest.raises(DivergenceError):
            step_full(np.full(p.M, np.nan), p, 0.01, 0)
