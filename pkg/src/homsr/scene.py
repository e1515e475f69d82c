"""Single-photon amplitude model for a two-point-source scene.

The imaging system is characterized by a Gaussian amplitude transfer function

    psi(x) = (2 pi sigma^2)^(-1/4) exp(-x^2 / (4 sigma^2)),

whose intensity |psi|^2 is a normal density with standard deviation sigma.
Two mutually incoherent point sources sit at x0 +/- eps/2, so a single
detected photon is described by the equal mixture of the two displaced
amplitudes.  This module provides the amplitude, the position density
q(x), the real kernel rho(x1, x2) of the one-photon density operator and
the amplitude overlap delta = exp(-eps^2 / (8 sigma^2)).

All positions are in the same (arbitrary) distance unit as sigma; sigma
defaults to 1 so that reported quantities are in natural units.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError

__all__ = [
    "SourceScene",
    "psf_amplitude",
    "overlap_delta",
    "single_photon_density",
    "rho_kernel",
]


@dataclass(frozen=True)
class SourceScene:
    """Scene parameters: centroid, separation, interference visibility, PSF width.

    eps is constrained nonnegative: every observable density of the model is
    even in eps, so the sign is not identifiable and estimators report |eps|.
    """

    x0: float
    eps: float
    visibility: float = 1.0
    sigma: float = 1.0

    def __post_init__(self):
        for name in ("x0", "eps", "visibility", "sigma"):
            v = getattr(self, name)
            if not np.isfinite(v):
                raise InvalidArgumentError(f"{name} must be finite, got {v!r}")
        if self.eps < 0:
            raise InvalidArgumentError(f"eps must be >= 0, got {self.eps}")
        if not 0.0 <= self.visibility <= 1.0:
            raise InvalidArgumentError(f"visibility must lie in [0, 1], got {self.visibility}")
        if self.sigma <= 0:
            raise InvalidArgumentError(f"sigma must be > 0, got {self.sigma}")

    @property
    def x_plus(self) -> float:
        return self.x0 + 0.5 * self.eps

    @property
    def x_minus(self) -> float:
        return self.x0 - 0.5 * self.eps


def _check_finite(x: np.ndarray, name: str) -> None:
    if not np.all(np.isfinite(x)):
        raise InvalidArgumentError(f"{name} must be finite")


def psf_amplitude(x, center: float = 0.0, sigma: float = 1.0):
    """Amplitude transfer function psi(x - center).

    Normalized so that the intensity integrates to one:
    integral psi(x)^2 dx = 1.
    """
    if sigma <= 0 or not np.isfinite(sigma):
        raise InvalidArgumentError(f"sigma must be positive and finite, got {sigma}")
    x = np.asarray(x, dtype=float)
    _check_finite(x, "x")
    if not np.isfinite(center):
        raise InvalidArgumentError(f"center must be finite, got {center!r}")
    u = x - center
    return (2.0 * np.pi * sigma**2) ** (-0.25) * np.exp(-(u * u) / (4.0 * sigma**2))


def overlap_delta(scene: SourceScene) -> float:
    """Amplitude overlap of the two displaced PSFs.

    For the Gaussian transfer function the overlap integral
    integral psi(x - x_plus) psi(x - x_minus) dx has the closed form
    exp(-eps^2 / (8 sigma^2)); see docs/derivations.md.
    """
    return float(np.exp(-(scene.eps**2) / (8.0 * scene.sigma**2)))


def single_photon_density(x, scene: SourceScene):
    """Position density q(x) of one detected photon: the equal mixture
    of the two source intensity profiles."""
    x = np.asarray(x, dtype=float)
    gp = psf_amplitude(x, scene.x_plus, scene.sigma)
    gm = psf_amplitude(x, scene.x_minus, scene.sigma)
    return 0.5 * (gp * gp + gm * gm)


def rho_kernel(x1, x2, scene: SourceScene):
    """Real position kernel rho(x1, x2) of the one-photon density operator.

    rho(x1, x2) = (1/2) [psi(x1 - x_plus) psi(x2 - x_plus)
                         + psi(x1 - x_minus) psi(x2 - x_minus)]

    Symmetric in its arguments; rho(x, x) = q(x); and by Cauchy-Schwarz
    rho(x1, x2)^2 <= q(x1) q(x2).
    """
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    p1 = psf_amplitude(x1, scene.x_plus, scene.sigma)
    p2 = psf_amplitude(x2, scene.x_plus, scene.sigma)
    m1 = psf_amplitude(x1, scene.x_minus, scene.sigma)
    m2 = psf_amplitude(x2, scene.x_minus, scene.sigma)
    return 0.5 * (p1 * p2 + m1 * m2)
