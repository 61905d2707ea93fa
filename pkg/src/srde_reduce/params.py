"""Model parameters shared by the full and reduced models."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .spectral import Basis, check_cutoff

__all__ = ["NoiseSpectrum", "ModelParams", "example_params"]


@dataclass(frozen=True)
class NoiseSpectrum:
    """Diagonal Q-Wiener spectrum ``lambda_i`` on the sine basis.

    Slow modes (``i <= N``) must carry no noise. Zeros above the cutoff are
    allowed and leave those modes deterministic.
    """

    lambdas: tuple
    N: int

    def __post_init__(self):
        lam = tuple(float(x) for x in self.lambdas)
        object.__setattr__(self, "lambdas", lam)
        check_cutoff(self.N, len(lam))
        if any(not math.isfinite(x) or x < 0 for x in lam):
            raise ValueError("noise eigenvalues must be finite and nonnegative")
        if any(x != 0.0 for x in lam[: self.N]):
            raise ValueError(f"slow modes 1..{self.N} must carry zero noise")

    @classmethod
    def single_mode(cls, k: int, total_modes: int, N: int, value: float = 1.0):
        lam = [0.0] * total_modes
        lam[k - 1] = value
        return cls(tuple(lam), N)

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.lambdas)

    @property
    def total_modes(self) -> int:
        return len(self.lambdas)

    @property
    def trace(self) -> float:
        return math.fsum(self.lambdas)

    @property
    def forced(self) -> np.ndarray:
        """Zero-based indices of modes with ``lambda_i > 0``."""
        return np.flatnonzero(self.array > 0)


@dataclass(frozen=True)
class ModelParams:
    """Parameters of ``w_t = A w + eps*gamma*w - c0*w**3 + sigma*sqrt(eps) dW``.

    ``A`` is the Dirichlet Laplacian plus ``basis.shift``. The full field only
    sees the combinations ``eps*gamma`` and ``sqrt(eps)*sigma``; ``eps`` on its
    own sets the slow/fast scale separation used by the reduced models.
    """

    eps: float = 0.1
    gamma: float = 1.0
    sigma: float = 1.0
    c0: float = 1.0
    N: int = 1
    basis: Basis = field(default_factory=lambda: Basis(8, 1.0))
    spectrum: NoiseSpectrum | None = None

    def __post_init__(self):
        if not 0.0 < self.eps <= 1.0:
            raise ValueError(f"eps must lie in (0, 1], got {self.eps!r}")
        if not self.c0 > 0:
            raise ValueError(f"c0 must be positive, got {self.c0!r}")
        if not self.sigma >= 0:
            raise ValueError(f"sigma must be nonnegative, got {self.sigma!r}")
        check_cutoff(self.N, self.basis.total_modes)
        if self.spectrum is None:
            object.__setattr__(
                self,
                "spectrum",
                NoiseSpectrum.single_mode(self.N + 1, self.basis.total_modes, self.N),
            )
        if self.spectrum.total_modes != self.basis.total_modes:
            raise ValueError("noise spectrum length differs from the basis size")
        if self.spectrum.N != self.N:
            raise ValueError("noise spectrum cutoff differs from N")

    @property
    def M(self) -> int:
        return self.basis.total_modes

    @property
    def alphas(self) -> np.ndarray:
        return self.basis.eigenvalues

    @property
    def eps_gamma(self) -> float:
        return self.eps * self.gamma

    @property
    def eps_sigma2(self) -> float:
        return self.eps * self.sigma**2

    def with_(self, **changes) -> "ModelParams":
        return replace(self, **changes)


def example_params(
    eps: float = 0.1,
    gamma: float = 1.0,
    sigma: float = 1.0,
    total_modes: int = 8,
    *,
    eps_gamma: float | None = None,
    eps_sigma2: float | None = None,
) -> ModelParams:
    """One-mode-forced stochastic heat equation: ``A = d_xx + 1``, noise on ``sin 2x`` only.

    ``eps_gamma`` / ``eps_sigma2`` set the physical combinations directly and
    override ``gamma`` / ``sigma``.
    """
    if eps_gamma is not None:
        gamma = eps_gamma / eps
    if eps_sigma2 is not None:
        if eps_sigma2 < 0:
            raise ValueError("eps_sigma2 must be nonnegative")
        sigma = math.sqrt(eps_sigma2 / eps)
    basis = Basis(total_modes, 1.0)
    return ModelParams(
        eps=eps,
        gamma=gamma,
        sigma=sigma,
        c0=1.0,
        N=1,
        basis=basis,
        spectrum=NoiseSpectrum.single_mode(2, total_modes, 1),
    )
