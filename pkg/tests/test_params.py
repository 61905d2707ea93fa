import math

import numpy as np
import pytest

from srde_reduce.errors import InvalidCutoffError
from srde_reduce.params import ModelParams, NoiseSpectrum, example_params
from srde_reduce.spectral import Basis


class TestNoiseSpectrum:
    def test_single_mode(self):
        s = NoiseSpectrum.single_mode(2, 5, 1, 0.5)
        assert s.lambdas == (0.0, 0.5, 0.0, 0.0, 0.0)
        np.testing.assert_array_equal(s.forced, [1])
        assert s.trace == 0.5

    def test_slow_noise_rejected(self):
        with pytest.raises(ValueError, match="slow modes"):
            NoiseSpectrum((1.0, 1.0, 0.0), 1)

    @pytest.mark.parametrize("bad", [-1.0, math.inf, math.nan])
    def test_bad_values(self, bad):
        with pytest.raises(ValueError):
            NoiseSpectrum((0.0, bad, 0.0), 1)

    def test_zeros_above_cutoff_allowed(self):
        s = NoiseSpectrum((0.0, 0.0, 1.0, 0.0), 1)
        np.testing.assert_array_equal(s.forced, [2])

    def test_cutoff_checked(self):
        with pytest.raises(InvalidCutoffError):
            NoiseSpectrum((0.0, 1.0), 2)


class TestModelParams:
    def test_defaults(self):
        p = ModelParams()
        assert p.M == 8 and p.N == 1
        assert p.spectrum.lambdas[1] == 1.0
        np.testing.assert_array_equal(p.alphas[:3], [0.0, 3.0, 8.0])

    @pytest.mark.parametrize("field, value", [("eps", 0.0), ("eps", 1.5), ("c0", 0.0), ("sigma", -1.0)])
    def test_range_errors(self, field, value):
        with pytest.raises(ValueError):
            ModelParams(**{field: value})

    def test_spectrum_mismatch(self):
        with pytest.raises(ValueError):
            ModelParams(basis=Basis(4, 1.0), spectrum=NoiseSpectrum.single_mode(2, 5, 1))

    def test_hashable_and_with(self):
        p = ModelParams()
        q = p.with_(gamma=2.0)
        assert q.gamma == 2.0 and p.gamma == 1.0
        assert hash(p) == hash(ModelParams())

    def test_example_physical_combinations(self):
        p = example_params(0.05, eps_gamma=0.6, eps_sigma2=0.3)
        assert p.eps_gamma == pytest.approx(0.6)
        assert p.eps_sigma2 == pytest.approx(0.3)
        with pytest.raises(ValueError):
            example_params(0.1, eps_sigma2=-1.0)
