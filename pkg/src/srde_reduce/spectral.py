"""Sine eigenbasis on (0, pi) and the operators built on it.

A field is stored as its coefficient vector ``w[..., i-1]`` on ``sin(i x)``,
``i = 1..M``. Leading axes are free, so every function here also works on
stacks of fields (ensembles). The inner product carries the weight ``2/pi``,
which makes the basis orthonormal.
"""

from __future__ import annotations

import functools
import itertools
from fractions import Fraction
from dataclasses import dataclass

import numpy as np

from .errors import InvalidCutoffError

__all__ = [
    "Basis",
    "mode",
    "inner",
    "norm",
    "point_values",
    "check_cutoff",
    "project_slow",
    "project_fast",
    "an_diagonal",
    "apply_AN",
    "sine_product_integral",
    "coupling_tensor",
    "collocation_grid",
    "cubic_galerkin",
]


@dataclass(frozen=True)
class Basis:
    """Truncated Dirichlet sine basis.

    Parameters
    ----------
    total_modes : int
        Number of retained modes ``M``.
    shift : float
        Constant added to the Laplacian. ``0`` gives ``A = d_xx`` with decay
        rates ``i**2``; ``1`` gives ``d_xx + 1`` with rates ``i**2 - 1`` (so the
        fundamental is neutral).
    """

    total_modes: int = 8
    shift: float = 0.0

    def __post_init__(self):
        if int(self.total_modes) != self.total_modes or self.total_modes < 1:
            raise ValueError(f"total_modes must be a positive integer, got {self.total_modes!r}")

    @property
    def modes(self) -> np.ndarray:
        return np.arange(1, self.total_modes + 1)

    @property
    def eigenvalues(self) -> np.ndarray:
        """Decay rates ``alpha_i = i**2 - shift``."""
        return self.modes.astype(float) ** 2 - self.shift


def mode(i: int, total_modes: int, amplitude: float = 1.0) -> np.ndarray:
    """Coefficient vector of ``amplitude * sin(i x)``."""
    if not 1 <= i <= total_modes:
        raise ValueError(f"mode {i} outside 1..{total_modes}")
    w = np.zeros(total_modes)
    w[i - 1] = amplitude
    return w


def inner(u, v) -> np.ndarray:
    """Weighted inner product ``(2/pi) int u v dx`` (sum of coefficient products)."""
    return np.sum(np.asarray(u) * np.asarray(v), axis=-1)


def norm(w) -> np.ndarray:
    return np.sqrt(inner(w, w))


def point_values(w, x) -> np.ndarray:
    """Evaluate ``sum_i w_i sin(i x)`` at the points ``x``."""
    w = np.asarray(w, dtype=float)
    x = np.asarray(x, dtype=float)
    i = np.arange(1, w.shape[-1] + 1)
    return w @ np.sin(np.multiply.outer(i, x))


def check_cutoff(N: int, total_modes: int) -> int:
    if int(N) != N or not 1 <= N < total_modes:
        raise InvalidCutoffError(f"slow cutoff N={N!r} must satisfy 1 <= N < M={total_modes}")
    return int(N)


def project_slow(w, N: int) -> np.ndarray:
    """Keep modes ``1..N``, zero the rest."""
    w = np.asarray(w, dtype=float)
    check_cutoff(N, w.shape[-1])
    out = np.zeros_like(w)
    out[..., :N] = w[..., :N]
    return out


def project_fast(w, N: int) -> np.ndarray:
    """Keep modes ``N+1..M``, zero the rest."""
    w = np.asarray(w, dtype=float)
    check_cutoff(N, w.shape[-1])
    out = np.zeros_like(w)
    out[..., N:] = w[..., N:]
    return out


def an_diagonal(eps: float, N: int, basis: Basis) -> np.ndarray:
    """Diagonal of the high-pass operator ``(Q_N + eps P_N) A``."""
    if not 0.0 <= eps <= 1.0:
        raise ValueError(f"eps must lie in [0, 1], got {eps!r}")
    check_cutoff(N, basis.total_modes)
    scale = np.ones(basis.total_modes)
    scale[:N] = eps
    return -basis.eigenvalues * scale


def apply_AN(w, eps: float, N: int, basis: Basis) -> np.ndarray:
    """Apply the high-pass filter ``A_N``: slow modes get ``-eps*alpha_i``, fast modes ``-alpha_i``."""
    w = np.asarray(w, dtype=float)
    if w.shape[-1] != basis.total_modes:
        raise ValueError("field length does not match basis")
    return w * an_diagonal(eps, N, basis)


@functools.lru_cache(maxsize=None)
def _sine_product_integral(indices: tuple[int, ...]) -> float:
    # sin(kx) = (e^{ikx} - e^{-ikx}) / 2i; expand over sign choices and integrate
    # each exponential exactly. Even n keeps only the m = 0 terms, odd n only the
    # odd-m terms (the rest are purely imaginary and cancel).
    n = len(indices)
    acc = Fraction(0)
    for signs in itertools.product((1, -1), repeat=n):
        coef = 1
        for s in signs:
            coef *= s
        m = sum(s * k for s, k in zip(signs, indices))
        if n % 2 == 0 and m == 0:
            acc += coef
        elif n % 2 == 1 and m % 2 == 1:
            acc += Fraction(coef, m)
    scale = Fraction(1, (-4) ** (n // 2))
    if n % 2 == 0:
        return float(2 * acc * scale)
    return float(2 * acc * scale) / np.pi


def sine_product_integral(indices) -> float:
    """Exact ``(2/pi) int_0^pi prod_k sin(i_k x) dx`` for 2 to 4 positive integers.

    Evaluated by expanding the product into complex exponentials; no quadrature.

    >>> sine_product_integral((1, 1, 2, 2))
    0.5
    """
    idx = tuple(sorted(int(i) for i in indices))
    if not 2 <= len(idx) <= 4:
        raise ValueError("need between 2 and 4 indices")
    if idx[0] < 1:
        raise ValueError("indices must be positive")
    return _sine_product_integral(idx)


@functools.lru_cache(maxsize=None)
def coupling_tensor(total_modes: int) -> np.ndarray:
    """``T[i, j, k, l] = <e_i e_j e_k e_l>`` for modes ``1..M`` (read-only)."""
    M = total_modes
    T = np.zeros((M, M, M, M))
    for quad in itertools.combinations_with_replacement(range(1, M + 1), 4):
        val = _sine_product_integral(quad)
        if val == 0.0:
            continue
        for perm in set(itertools.permutations(quad)):
            T[tuple(p - 1 for p in perm)] = val
    T.setflags(write=False)
    return T


@functools.lru_cache(maxsize=None)
def collocation_grid(total_modes: int, intervals: int | None = None):
    """Interior grid and forward/backward sine-transform matrices.

    Uses ``K = 2(M + 1)`` intervals by default, enough that the cube of an
    ``M``-mode field projects back onto modes ``1..M`` without aliasing.

    Returns ``(x, to_grid, to_modes)`` with ``grid = w @ to_grid`` and
    ``w = grid @ to_modes``.
    """
    K = 2 * (total_modes + 1) if intervals is None else int(intervals)
    x = np.arange(1, K) * np.pi / K
    i = np.arange(1, total_modes + 1)
    to_grid = np.sin(np.multiply.outer(i, x))  # (M, K-1)
    to_modes = (2.0 / K) * to_grid.T  # (K-1, M)
    for arr in (x, to_grid, to_modes):
        arr.setflags(write=False)
    return x, to_grid, to_modes


def cubic_galerkin(w, c0: float = 1.0, method: str = "collocation") -> np.ndarray:
    """Galerkin coefficients of ``-c0 * w**3`` on modes ``1..M``.

    Parameters
    ----------
    w : array_like, shape (..., M)
    c0 : float
        Cubic coefficient.
    method : {"collocation", "coupling"}
        ``"collocation"`` cubes on a padded grid and transforms back;
        ``"coupling"`` sums against :func:`coupling_tensor`. Both are exact.
    """
    w = np.asarray(w, dtype=float)
    M = w.shape[-1]
    if method == "collocation":
        _, to_grid, to_modes = collocation_grid(M)
        g = w @ to_grid
        return -c0 * ((g * g * g) @ to_modes)
    if method == "coupling":
        T = coupling_tensor(M)
        return -c0 * np.einsum("ijkl,...j,...k,...l->...i", T, w, w, w)
    raise ValueError(f"unknown method {method!r}")
