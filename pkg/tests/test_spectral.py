import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from scipy.integrate import quad

from srde_reduce.errors import InvalidCutoffError
from srde_reduce.spectral import (
    Basis,
    an_diagonal,
    apply_AN,
    check_cutoff,
    collocation_grid,
    coupling_tensor,
    cubic_galerkin,
    inner,
    mode,
    norm,
    point_values,
    project_fast,
    project_slow,
    sine_product_integral,
)

finite = st.floats(-5, 5, allow_nan=False, allow_infinity=False)
fields = arrays(np.float64, 6, elements=finite)


def quad_integral(idx):
    f = lambda x: math.prod(math.sin(i * x) for i in idx)  # noqa: E731
    return 2.0 / math.pi * quad(f, 0.0, math.pi, limit=200, epsabs=1e-13)[0]


class TestBasis:
    def test_eigenvalues_shifted(self):
        b = Basis(5, 1.0)
        np.testing.assert_array_equal(b.eigenvalues, [0.0, 3.0, 8.0, 15.0, 24.0])

    def test_unshifted_laplacian(self):
        np.testing.assert_array_equal(Basis(3).eigenvalues, [1.0, 4.0, 9.0])

    @pytest.mark.parametrize("bad", [0, -2, 2.5])
    def test_rejects_bad_size(self, bad):
        with pytest.raises(ValueError):
            Basis(bad)

    def test_mode_vector(self):
        np.testing.assert_array_equal(mode(2, 4, 3.0), [0.0, 3.0, 0.0, 0.0])
        with pytest.raises(ValueError):
            mode(5, 4)


class TestProjection:
    @pytest.mark.parametrize("N", [0, 6, 7, 1.5])
    def test_invalid_cutoff(self, N):
        with pytest.raises(InvalidCutoffError):
            check_cutoff(N, 6)

    @given(fields, st.integers(1, 5))
    def test_complementary_idempotent(self, w, N):
        P, Q = project_slow(w, N), project_fast(w, N)
        np.testing.assert_array_equal(P + Q, w)
        np.testing.assert_array_equal(project_slow(P, N), P)
        np.testing.assert_array_equal(project_fast(Q, N), Q)
        np.testing.assert_array_equal(project_slow(Q, N), np.zeros(6))
        assert inner(P, Q) == 0.0

    @given(fields, st.integers(1, 5))
    def test_pythagoras(self, w, N):
        assert norm(w) ** 2 == pytest.approx(norm(project_slow(w, N)) ** 2 + norm(project_fast(w, N)) ** 2)

    def test_batched(self):
        w = np.arange(12.0).reshape(2, 6)
        np.testing.assert_array_equal(project_slow(w, 2)[:, 2:], 0.0)


class TestHighPass:
    def test_full_operator_at_eps_one(self):
        b = Basis(6, 1.0)
        w = np.linspace(-1, 1, 6)
        np.testing.assert_array_equal(apply_AN(w, 1.0, 2, b), -b.eigenvalues * w)

    def test_slow_block_scaled(self):
        b = Basis(4, 0.0)
        np.testing.assert_allclose(an_diagonal(0.1, 2, b), [-0.1, -0.4, -9.0, -16.0])

    @pytest.mark.parametrize("eps", [-0.1, 1.5])
    def test_eps_range(self, eps):
        with pytest.raises(ValueError):
            an_diagonal(eps, 1, Basis(3))

    def test_fast_modes_unchanged_by_eps(self):
        b = Basis(5, 1.0)
        d1, d2 = an_diagonal(0.01, 2, b), an_diagonal(0.5, 2, b)
        np.testing.assert_array_equal(d1[2:], d2[2:])


class TestSineProductIntegral:
    @pytest.mark.parametrize(
        "idx, expected",
        [((1, 1), 1.0), ((1, 2), 0.0), ((1, 1, 2, 2), 0.5), ((1, 1, 1, 1), 0.75),
         ((1, 1, 1, 3), -0.25), ((2, 2, 2, 2), 0.75), ((1, 2, 3, 4), 0.25), ((1, 1, 1, 2), 0.0)],
    )
    def test_known_values(self, idx, expected):
        assert sine_product_integral(idx) == expected

    def test_three_factor(self):
        # (2/pi) int sin x sin x sin x = 8/(3 pi)
        assert sine_product_integral((1, 1, 1)) == pytest.approx(8.0 / (3.0 * math.pi), abs=1e-15)

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_against_quadrature(self, n):
        for idx in itertools.combinations_with_replacement(range(1, 6), n):
            assert abs(sine_product_integral(idx) - quad_integral(idx)) <= 1e-10

    @given(st.lists(st.integers(1, 9), min_size=2, max_size=4))
    def test_symmetric(self, idx):
        assert sine_product_integral(idx) == sine_product_integral(tuple(reversed(idx)))

    @pytest.mark.parametrize("idx", [(1,), (1, 2, 3, 4, 5), (0, 1)])
    def test_rejects(self, idx):
        with pytest.raises(ValueError):
            sine_product_integral(idx)


class TestCubic:
    def test_tensor_symmetric_and_readonly(self):
        T = coupling_tensor(5)
        assert np.array_equal(T, T.transpose(1, 0, 2, 3))
        assert np.array_equal(T, T.transpose(0, 2, 1, 3))
        assert np.array_equal(T, T.transpose(3, 1, 2, 0))
        with pytest.raises(ValueError):
            T[0, 0, 0, 0] = 1.0

    def test_pure_fundamental(self):
        # sin^3 x = (3 sin x - sin 3x)/4
        out = cubic_galerkin(mode(1, 5, 2.0))
        np.testing.assert_allclose(out, [-6.0, 0.0, 2.0, 0.0, 0.0], atol=1e-13)

    @settings(max_examples=50)
    @given(fields)
    def test_collocation_matches_coupling(self, w):
        a = cubic_galerkin(w, method="collocation")
        b = cubic_galerkin(w, method="coupling")
        np.testing.assert_allclose(a, b, atol=1e-10 * (1 + np.max(np.abs(w)) ** 3))

    @settings(max_examples=30)
    @given(fields)
    def test_matches_pointwise_cube(self, w):
        # Galerkin projection of w^3 by quadrature on a fine grid
        x = np.linspace(0, math.pi, 4001)
        g = point_values(w, x) ** 3
        S = np.sin(np.multiply.outer(np.arange(1, 7), x))
        from scipy.integrate import simpson

        ref = -2.0 / math.pi * simpson(S * g, x=x, axis=-1)
        np.testing.assert_allclose(cubic_galerkin(w), ref, atol=1e-7 * (1 + np.max(np.abs(w)) ** 3))

    def test_scales_with_c0(self):
        w = np.array([0.3, -0.2, 0.1])
        np.testing.assert_allclose(cubic_galerkin(w, 2.5), 2.5 * cubic_galerkin(w))

    def test_unknown_method(self):
        with pytest.raises(ValueError):
            cubic_galerkin(np.ones(3), method="fft")

    def test_grid_roundtrip(self):
        x, to_grid, to_modes = collocation_grid(6)
        w = np.arange(1.0, 7.0)
        np.testing.assert_allclose((w @ to_grid) @ to_modes, w, atol=1e-13)
        np.testing.assert_allclose(point_values(w, x), w @ to_grid)
