"""Per-photon Fisher information for the three measurement strategies.

Parameter order is (x0, eps) everywhere.  Conventions:

* All matrices are per single detected photon.  Two-photon strategies are
  computed per pair and divided by two, which makes the strategies directly
  comparable (both the spatially resolved and the binary two-photon
  information then start at 1/8 per photon for V = 1).
* Classical information is integrated with fixed-order Gauss-Legendre
  rules on a truncated window centered on the centroid.  Every result is
  recomputed with doubled node count and must agree to 1e-6 relative,
  otherwise a QuadratureError is raised.  Fixed rules keep the node set
  reproducible run to run.
* Points where an outcome density falls below ``floor`` are skipped; the
  integrand has a finite limit there but floating-point 0/0 does not.
  The probability mass skipped this way is returned on the result.

The quantum limit is available twice: ``qfi_reference`` returns the
closed-form small-separation matrix diag(1 - eps^2/4, 1/4) (in units of
1/sigma^2), and ``qfi_numeric_sld`` reconstructs the quantum information
from a discretized kernel via the symmetric logarithmic derivative, which
serves as the independent oracle at larger separations.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .densities import (
    SourceModel,
    coincidence_prob_derivative,
    densities_with_gradients,
    total_coincidence_prob,
)
from .errors import (
    DiscretizationError,
    InvalidArgumentError,
    NonIdentifiableError,
    QuadratureError,
)
from .scene import SourceScene, psf_amplitude

__all__ = [
    "FisherMatrix",
    "QuadratureSpec",
    "SldGridSpec",
    "fi_direct_imaging",
    "fi_twophoton_spatial",
    "fi_twophoton_binary",
    "qfi_reference",
    "qfi_numeric_sld",
    "crb",
    "di_small_eps_reference",
    "twophoton_spatial_small_eps_reference",
    "twophoton_binary_small_eps_reference",
]

PARAM_NAMES = ("x0", "eps")

# Node-doubling agreement required before a quadrature result is accepted.
_CONVERGENCE_RTOL = 1e-6
# Entries below this magnitude are exempt from the relative comparison
# (exact zeros from parity, rounding-level off-diagonals).
_CONVERGENCE_ATOL = 1e-12


@dataclass(frozen=True)
class FisherMatrix:
    """Symmetric 2x2 per-photon information matrix over (x0, eps), units 1/sigma^2.

    ``skipped_mass`` records how much outcome probability the density floor
    excluded from the information integral (zero for closed-form results).
    """

    x0x0: float
    x0eps: float
    epseps: float
    skipped_mass: float = 0.0

    def as_matrix(self) -> np.ndarray:
        return np.array([[self.x0x0, self.x0eps], [self.x0eps, self.epseps]])

    def entry(self, a: str, b: str) -> float:
        i = PARAM_NAMES.index(a)
        j = PARAM_NAMES.index(b)
        return float(self.as_matrix()[i, j])

    @classmethod
    def diagonal(cls, x0x0: float, epseps: float) -> "FisherMatrix":
        return cls(x0x0=float(x0x0), x0eps=0.0, epseps=float(epseps))


@dataclass(frozen=True)
class QuadratureSpec:
    """Fixed Gauss-Legendre rule on [x0 - W, x0 + W].

    half_width None resolves to 10 sigma + eps/2, which truncates less than
    1e-20 of the probability mass.  A user-supplied half_width must still be
    at least 8 sigma + eps/2.
    """

    half_width: float | None = None
    nodes_1d: int = 160
    nodes_2d: int = 200
    floor: float = 1e-14

    def __post_init__(self):
        if self.nodes_1d < 64 or self.nodes_2d < 64:
            raise InvalidArgumentError("quadrature needs at least 64 nodes per axis")
        if not 0.0 < self.floor <= 1e-12:
            raise InvalidArgumentError(f"floor must lie in (0, 1e-12], got {self.floor}")

    def resolve_half_width(self, scene: SourceScene) -> float:
        min_hw = 8.0 * scene.sigma + 0.5 * scene.eps
        if self.half_width is None:
            return 10.0 * scene.sigma + 0.5 * scene.eps
        if self.half_width < min_hw:
            raise InvalidArgumentError(
                f"half_width {self.half_width} is below the required {min_hw} "
                f"(8 sigma + eps/2) for this scene"
            )
        return float(self.half_width)


@dataclass(frozen=True)
class SldGridSpec:
    """Uniform grid used to discretize the one-photon kernel for the SLD oracle."""

    points: int = 400
    half_width: float | None = None
    spectral_floor: float = 1e-12

    def __post_init__(self):
        if self.points < 200:
            raise InvalidArgumentError("SLD grid needs at least 200 points")
        if self.spectral_floor <= 0:
            raise InvalidArgumentError("spectral_floor must be positive")

    def resolve_half_width(self, scene: SourceScene) -> float:
        min_hw = 8.0 * scene.sigma + 0.5 * scene.eps
        if self.half_width is None:
            return 10.0 * scene.sigma + 0.5 * scene.eps
        if self.half_width < min_hw:
            raise InvalidArgumentError(
                f"half_width {self.half_width} is below the required {min_hw} for this scene"
            )
        return float(self.half_width)


def _gauss_legendre(n: int, center: float, half_width: float):
    x, w = np.polynomial.legendre.leggauss(n)
    return center + half_width * x, half_width * w


def _entries_close(a: FisherMatrix, b: FisherMatrix) -> bool:
    for va, vb in ((a.x0x0, b.x0x0), (a.x0eps, b.x0eps), (a.epseps, b.epseps)):
        scale = max(abs(va), abs(vb))
        if scale < _CONVERGENCE_ATOL:
            continue
        if abs(va - vb) / scale > _CONVERGENCE_RTOL:
            return False
    return True


def _converged(coarse: FisherMatrix, fine: FisherMatrix, what: str) -> FisherMatrix:
    if not _entries_close(coarse, fine):
        raise QuadratureError(
            f"{what}: node-doubling changed the result by more than "
            f"{_CONVERGENCE_RTOL:g} relative "
            f"(coarse {coarse.as_matrix().tolist()}, fine {fine.as_matrix().tolist()})"
        )
    return fine


def _di_fi_once(scene: SourceScene, n: int, half_width: float, floor: float) -> FisherMatrix:
    x, w = _gauss_legendre(n, scene.x0, half_width)
    s2 = scene.sigma**2
    ap = psf_amplitude(x, scene.x_plus, scene.sigma)
    am = psf_amplitude(x, scene.x_minus, scene.sigma)
    gp, gm = ap * ap, am * am
    q = 0.5 * (gp + gm)
    hp = (x - scene.x_plus) / s2
    hm = (x - scene.x_minus) / s2
    dq_dx0 = 0.5 * (hp * gp + hm * gm)
    dq_deps = 0.25 * (hp * gp - hm * gm)
    mask = q > floor
    skipped = float(np.sum(w[~mask] * np.clip(q[~mask], 0.0, None)))
    wq = w[mask] / q[mask]
    d0, d1 = dq_dx0[mask], dq_deps[mask]
    return FisherMatrix(
        x0x0=float(np.sum(wq * d0 * d0)),
        x0eps=float(np.sum(wq * d0 * d1)),
        epseps=float(np.sum(wq * d1 * d1)),
        skipped_mass=skipped,
    )


def fi_direct_imaging(scene: SourceScene, quad: QuadratureSpec | None = None) -> FisherMatrix:
    """Per-photon information of the direct position measurement q(x)."""
    quad = quad or QuadratureSpec()
    hw = quad.resolve_half_width(scene)
    coarse = _di_fi_once(scene, quad.nodes_1d, hw, quad.floor)
    fine = _di_fi_once(scene, 2 * quad.nodes_1d, hw, quad.floor)
    return _converged(coarse, fine, "fi_direct_imaging")


def _twophoton_fi_once(
    scene: SourceScene, model: SourceModel, n: int, half_width: float, floor: float
) -> FisherMatrix:
    x, w = _gauss_legendre(n, scene.x0, half_width)
    x1 = x[:, None]
    x2 = x[None, :]
    w2 = w[:, None] * w[None, :]
    pc, pd, dpc, dpd = densities_with_gradients(x1, x2, scene, model)

    total = np.zeros((2, 2))
    skipped = 0.0
    for p, dp in ((pc, dpc), (pd, dpd)):
        mask = p > floor
        skipped += float(np.sum(w2[~mask] * np.clip(p[~mask], 0.0, None)))
        wp = w2[mask] / p[mask]
        d = (dp[0][mask], dp[1][mask])
        for i in range(2):
            for j in range(i, 2):
                total[i, j] += np.sum(wp * d[i] * d[j])
    # per pair -> per photon
    return FisherMatrix(
        x0x0=float(total[0, 0]) / 2.0,
        x0eps=float(total[0, 1]) / 2.0,
        epseps=float(total[1, 1]) / 2.0,
        skipped_mass=skipped,
    )


def fi_twophoton_spatial(
    scene: SourceScene,
    model: SourceModel = SourceModel.THERMAL_PAIR,
    quad: QuadratureSpec | None = None,
) -> FisherMatrix:
    """Per-photon information of the spatially resolved two-photon measurement.

    Integrates over both outcome densities (cross-coincidences and doubles)
    on a 2D tensor-product rule and halves the per-pair result.  At V = 1,
    eps = 0 the coincidence density vanishes identically and the floor rule
    excludes it, so the eps information is exactly zero at that point (the
    one-sided limit eps -> 0+ is 1/8; no first-order information exists at
    eps = 0 because every density is even in eps).
    """
    quad = quad or QuadratureSpec()
    hw = quad.resolve_half_width(scene)
    coarse = _twophoton_fi_once(scene, model, quad.nodes_2d, hw, quad.floor)
    fine = _twophoton_fi_once(scene, model, 2 * quad.nodes_2d, hw, quad.floor)
    return _converged(coarse, fine, "fi_twophoton_spatial")


def fi_twophoton_binary(
    scene: SourceScene, model: SourceModel = SourceModel.THERMAL_PAIR
) -> FisherMatrix:
    """Per-photon information when only the coincidence/double ratio is kept.

    The outcome is a single Bernoulli draw per pair, so
    F_epseps = (dP_c/deps)^2 / (2 P_c (1 - P_c)) and the x0 row and column
    vanish identically (the total probabilities do not depend on x0).
    When P_c is exactly 0 or 1 the derivative vanishes too and the
    information is returned as 0.
    """
    p = total_coincidence_prob(scene, model)
    if p <= 0.0 or p >= 1.0:
        return FisherMatrix(0.0, 0.0, 0.0)
    dp = coincidence_prob_derivative(scene, model)
    return FisherMatrix(0.0, 0.0, float(dp * dp / (2.0 * p * (1.0 - p))))


def qfi_reference(scene: SourceScene) -> FisherMatrix:
    """Quantum information reference diag(1 - eps^2/4, 1/4) in units 1/sigma^2.

    The x0 entry is a second-order small-separation expansion (the kernel
    value is 1 - delta^2 eps^2 / 4); the eps entry is exact for the Gaussian
    PSF at every separation.  ``qfi_numeric_sld`` is authoritative at large eps.
    """
    u = scene.eps / scene.sigma
    s2 = scene.sigma**2
    return FisherMatrix.diagonal((1.0 - u * u / 4.0) / s2, 0.25 / s2)


def qfi_numeric_sld(scene: SourceScene, grid: SldGridSpec | None = None) -> FisherMatrix:
    """Quantum information of the one-photon state by numeric SLD.

    The kernel rho(x1, x2) is discretized on a uniform grid with trapezoid
    weights folded in symmetrically, making the matrix a valid density
    operator.  Its analytic parameter derivatives are discretized the same
    way; after an eigendecomposition the information is

        F_ab = sum_{ij} 2 (d_a rho)_ij (d_b rho)_ij / (lambda_i + lambda_j)

    restricted to eigenvalue pairs above the spectral floor.
    """
    grid = grid or SldGridSpec()
    hw = grid.resolve_half_width(scene)
    n = grid.points
    x = np.linspace(scene.x0 - hw, scene.x0 + hw, n)
    w = np.full(n, x[1] - x[0])
    w[0] *= 0.5
    w[-1] *= 0.5
    sw = np.sqrt(w)

    s2 = scene.sigma**2
    ap = psf_amplitude(x, scene.x_plus, scene.sigma)
    am = psf_amplitude(x, scene.x_minus, scene.sigma)
    hp = (x - scene.x_plus) / (2.0 * s2)
    hm = (x - scene.x_minus) / (2.0 * s2)

    def weighted_kernel(fp, fm):
        k = 0.5 * (np.outer(fp[0], fp[1]) + np.outer(fp[1], fp[0])
                   + np.outer(fm[0], fm[1]) + np.outer(fm[1], fm[0]))
        return k * np.outer(sw, sw)

    rho_w = 0.5 * (np.outer(ap, ap) + np.outer(am, am)) * np.outer(sw, sw)
    derivs = []
    for cp, cm in ((1.0, 1.0), (0.5, -0.5)):
        # d rho = sym( d psi_+(x1) psi_+(x2) ) + sym( d psi_-(x1) psi_-(x2) )
        derivs.append(weighted_kernel((cp * hp * ap, ap), (cm * hm * am, am)))

    try:
        lam, vecs = np.linalg.eigh(rho_w)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - eigh on symmetric input
        raise DiscretizationError(f"eigendecomposition failed: {exc}") from exc
    if lam.min() < -1e-10:
        raise DiscretizationError(
            f"discretized kernel has eigenvalue {lam.min():.3e} < -1e-10; refine the grid"
        )

    mats = [vecs.T @ d @ vecs for d in derivs]
    pair_sum = lam[:, None] + lam[None, :]
    mask = pair_sum > grid.spectral_floor
    f = np.zeros((2, 2))
    for i in range(2):
        for j in range(i, 2):
            f[i, j] = np.sum(2.0 * mats[i][mask] * mats[j][mask] / pair_sum[mask])
    return FisherMatrix(x0x0=float(f[0, 0]), x0eps=float(f[0, 1]), epseps=float(f[1, 1]))


def crb(
    fisher: FisherMatrix, n_photons: int, params: tuple[str, ...] = ("x0", "eps")
) -> np.ndarray:
    """Cramer-Rao covariance bound F^-1 / N restricted to ``params``.

    For a strategy that carries no information on a parameter (binary
    two-photon and x0, or eps at the exact degeneracy point) pass the
    identifiable subset, e.g. params=("eps",).  A requested parameter with
    zero diagonal information raises NonIdentifiableError naming it.
    """
    if n_photons < 1:
        raise InvalidArgumentError(f"n_photons must be >= 1, got {n_photons}")
    unknown = [p for p in params if p not in PARAM_NAMES]
    if unknown or not params:
        raise InvalidArgumentError(f"params must be a nonempty subset of {PARAM_NAMES}, got {params}")
    full = fisher.as_matrix()
    idx = [PARAM_NAMES.index(p) for p in params]
    for p, i in zip(params, idx):
        if full[i, i] <= 0.0:
            raise NonIdentifiableError(p)
    sub = full[np.ix_(idx, idx)]
    if len(idx) > 1 and np.linalg.det(sub) <= 0.0:
        raise NonIdentifiableError(
            params[0], f"information matrix is singular for parameters {params}"
        )
    return np.linalg.inv(sub) / float(n_photons)


# ---------------------------------------------------------------------------
# Small-separation expansions (second order in eps) of the per-photon
# information, used as cross-checks and as scan reference curves.
# ---------------------------------------------------------------------------

def di_small_eps_reference(eps: float, sigma: float = 1.0) -> FisherMatrix:
    """Direct imaging: diag(1 - eps^2/4, eps^2/8) in units 1/sigma^2."""
    u = eps / sigma
    s2 = sigma**2
    return FisherMatrix.diagonal((1.0 - u * u / 4.0) / s2, (u * u / 8.0) / s2)


def twophoton_spatial_small_eps_reference(
    eps: float, visibility: float, sigma: float = 1.0
) -> FisherMatrix:
    """Spatial two-photon measurement, thermal-pair source.

    eps entry: 1/8 + 5 eps^2/128 at V = 1, else (4 - V^2) eps^2 / (32 (1 - V^2))
    (the latter valid for eps^2 well below 1 - V^2); x0 entry 1 - eps^2/4.
    """
    u = eps / sigma
    s2 = sigma**2
    if visibility >= 1.0:
        f_eps = 0.125 + 5.0 * u * u / 128.0
    else:
        v2 = visibility**2
        f_eps = (4.0 - v2) * u * u / (32.0 * (1.0 - v2))
    return FisherMatrix.diagonal((1.0 - u * u / 4.0) / s2, f_eps / s2)


def twophoton_binary_small_eps_reference(
    eps: float, visibility: float, sigma: float = 1.0
) -> FisherMatrix:
    """Coincidence/double ratio only: no x0 information at any order.

    eps entry: 1/8 - 5 eps^2/128 at V = 1, else V^2 eps^2 / (32 (1 - V^2)).
    """
    u = eps / sigma
    s2 = sigma**2
    if visibility >= 1.0:
        f_eps = 0.125 - 5.0 * u * u / 128.0
    else:
        v2 = visibility**2
        f_eps = v2 * u * u / (32.0 * (1.0 - v2))
    return FisherMatrix(0.0, 0.0, f_eps / s2)
