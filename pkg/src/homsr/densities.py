"""Spatially resolved two-photon outcome densities behind a 50:50 beamsplitter.

One photon enters each input port; after interference we either see a
cross-coincidence (one photon per output port) or a double event (both
photons in one port).  With port-1 and port-2 spatial amplitudes phi and
chi, and a scalar two-photon visibility V scaling the interference cross
term, the branch densities over ordered detector coordinates (x1, x2) are

    pc = (1/4) [phi(x1)^2 chi(x2)^2 + chi(x1)^2 phi(x2)^2
                - 2 V phi(x1) chi(x1) phi(x2) chi(x2)]
    pd = same with +2V,

where pd merges the two output ports (each port carries pd/2).  Averaging
the branches over the source assignments gives the two supported models:

* THERMAL_PAIR -- both photons drawn independently from the scene mixture
  (four equally likely assignments), which collapses to
      pc = (1/2) [q(x1) q(x2) - V rho(x1, x2)^2]
      pd = (1/2) [q(x1) q(x2) + V rho(x1, x2)^2]

* DISTINCT_EMITTERS -- exactly one photon from each source (two
  assignments), giving
      pc = (1/4) [g+(x1) g-(x2) + g-(x1) g+(x2) - 2 V m(x1) m(x2)]
  with g+- the single-source intensities and m = psi+ psi-.

The full derivation lives in docs/derivations.md.  pc + pd integrates to
one, both densities are symmetric under x1 <-> x2 and under reflection
about the centroid, and Cauchy-Schwarz makes them nonnegative.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np

from .scene import SourceScene, psf_amplitude

__all__ = [
    "SourceModel",
    "OutcomeDensities",
    "pc_density",
    "pd_density",
    "outcome_densities",
    "total_coincidence_prob",
    "coincidence_prob_derivative",
    "densities_with_gradients",
]


class SourceModel(Enum):
    """How the two photons relate to the two sources."""

    THERMAL_PAIR = "thermal_pair"          # both photons i.i.d. from the mixture
    DISTINCT_EMITTERS = "distinct_emitters"  # one photon from each source


@dataclass(frozen=True)
class OutcomeDensities:
    """Callable pair densities for a fixed scene and model.

    pc(x1, x2): cross-coincidence density (photon at x1 in port 1, x2 in port 2).
    pd(x1, x2): double-event density, both output ports merged, ordered coordinates.
    """

    pc: Callable[[np.ndarray, np.ndarray], np.ndarray]
    pd: Callable[[np.ndarray, np.ndarray], np.ndarray]


def _amplitudes(x, scene: SourceScene):
    """PSF amplitudes of both sources evaluated at x."""
    ap = psf_amplitude(x, scene.x_plus, scene.sigma)
    am = psf_amplitude(x, scene.x_minus, scene.sigma)
    return ap, am


def _pc_pd(x1, x2, scene: SourceScene, model: SourceModel):
    """Both outcome densities in the cancellation-free representation

        pc = A + (1 - V)/2 * C,    pd = A + (1 + V)/2 * C,

    with A = w [psi+(x1) psi-(x2) - psi-(x1) psi+(x2)]^2 the antisymmetric
    square (w = 1/8 thermal pair, 1/4 distinct emitters) and C the coherent
    bunching term (rho^2 resp. m(x1) m(x2)).  This keeps pc exactly
    nonnegative in floating point, exactly zero at eps = 0, V = 1, and makes
    pc and pd bit-identical at V = 0.
    """
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    v = scene.visibility
    ap1, am1 = _amplitudes(x1, scene)
    ap2, am2 = _amplitudes(x2, scene)
    anti = ap1 * am2 - am1 * ap2
    if model is SourceModel.THERMAL_PAIR:
        a = 0.125 * anti * anti
        rho = 0.5 * (ap1 * ap2 + am1 * am2)
        c = rho * rho
    elif model is SourceModel.DISTINCT_EMITTERS:
        a = 0.25 * anti * anti
        c = (ap1 * am1) * (ap2 * am2)
    else:
        raise TypeError(f"unknown source model: {model!r}")
    return a + 0.5 * (1.0 - v) * c, a + 0.5 * (1.0 + v) * c


def pc_density(x1, x2, scene: SourceScene, model: SourceModel = SourceModel.THERMAL_PAIR):
    """Cross-coincidence density p_c(x1, x2) over ordered pairs."""
    return _pc_pd(x1, x2, scene, model)[0]


def pd_density(x1, x2, scene: SourceScene, model: SourceModel = SourceModel.THERMAL_PAIR):
    """Double-event density p_d(x1, x2), both ports merged, ordered pairs."""
    return _pc_pd(x1, x2, scene, model)[1]


def outcome_densities(scene: SourceScene, model: SourceModel = SourceModel.THERMAL_PAIR) -> OutcomeDensities:
    return OutcomeDensities(
        pc=lambda x1, x2: pc_density(x1, x2, scene, model),
        pd=lambda x1, x2: pd_density(x1, x2, scene, model),
    )


def total_coincidence_prob(scene: SourceScene, model: SourceModel = SourceModel.THERMAL_PAIR) -> float:
    """Total cross-coincidence probability P_c = integral of p_c.

    Closed forms, with delta^2 = exp(-eps^2 / (4 sigma^2)):
        THERMAL_PAIR:      P_c = (1/2) [1 - V (1 + delta^2) / 2]
        DISTINCT_EMITTERS: P_c = (1/2) [1 - V delta^2]
    Always in [0, 1/2]; the remainder 1 - P_c is the double-event probability.
    """
    d2 = np.exp(-(scene.eps**2) / (4.0 * scene.sigma**2))
    if model is SourceModel.THERMAL_PAIR:
        return float(0.5 * (1.0 - scene.visibility * 0.5 * (1.0 + d2)))
    if model is SourceModel.DISTINCT_EMITTERS:
        return float(0.5 * (1.0 - scene.visibility * d2))
    raise TypeError(f"unknown source model: {model!r}")


def coincidence_prob_derivative(scene: SourceScene, model: SourceModel = SourceModel.THERMAL_PAIR) -> float:
    """Analytic derivative dP_c/deps of the total coincidence probability."""
    s2 = scene.sigma**2
    d2 = np.exp(-(scene.eps**2) / (4.0 * s2))
    if model is SourceModel.THERMAL_PAIR:
        return float(scene.visibility * scene.eps * d2 / (8.0 * s2))
    if model is SourceModel.DISTINCT_EMITTERS:
        return float(scene.visibility * scene.eps * d2 / (4.0 * s2))
    raise TypeError(f"unknown source model: {model!r}")


def densities_with_gradients(x1, x2, scene: SourceScene, model: SourceModel):
    """Densities and their analytic parameter gradients at (x1, x2).

    Returns (pc, pd, dpc, dpd) where dpc and dpd are pairs
    (d/dx0, d/deps).  Used by the Fisher-information quadratures; the
    derivatives follow from d psi(x - xp)/d theta =
    c_p (x - xp) / (2 sigma^2) psi(x - xp) with c_p = dxp/dtheta
    (c = 1 for x0, c = +/- 1/2 for eps).
    """
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    v = scene.visibility
    s2 = scene.sigma**2
    ap1, am1 = _amplitudes(x1, scene)
    ap2, am2 = _amplitudes(x2, scene)
    # d psi_+(x)/d theta = c_+ * hp(x) * psi_+(x) with hp = (x - x+)/(2 sigma^2)
    hp1 = (x1 - scene.x_plus) / (2.0 * s2)
    hm1 = (x1 - scene.x_minus) / (2.0 * s2)
    hp2 = (x2 - scene.x_plus) / (2.0 * s2)
    hm2 = (x2 - scene.x_minus) / (2.0 * s2)

    anti = ap1 * am2 - am1 * ap2
    if model is SourceModel.THERMAL_PAIR:
        weight = 0.125
        rho = 0.5 * (ap1 * ap2 + am1 * am2)
        c = rho * rho
    elif model is SourceModel.DISTINCT_EMITTERS:
        weight = 0.25
        c = (ap1 * am1) * (ap2 * am2)
    else:
        raise TypeError(f"unknown source model: {model!r}")
    a = weight * anti * anti
    pc = a + 0.5 * (1.0 - v) * c
    pd = a + 0.5 * (1.0 + v) * c

    dpc, dpd = [], []
    for cp, cm in ((1.0, 1.0), (0.5, -0.5)):  # dx_plus/dtheta, dx_minus/dtheta
        danti = (
            cp * hp1 * ap1 * am2 + cm * hm2 * ap1 * am2
            - cm * hm1 * am1 * ap2 - cp * hp2 * am1 * ap2
        )
        da = 2.0 * weight * anti * danti
        if model is SourceModel.THERMAL_PAIR:
            drho = 0.5 * (
                cp * (hp1 + hp2) * ap1 * ap2 + cm * (hm1 + hm2) * am1 * am2
            )
            dc = 2.0 * rho * drho
        else:
            dm1 = (cp * hp1 + cm * hm1) * ap1 * am1
            dm2 = (cp * hp2 + cm * hm2) * ap2 * am2
            dc = dm1 * (ap2 * am2) + (ap1 * am1) * dm2
        dpc.append(da + 0.5 * (1.0 - v) * dc)
        dpd.append(da + 0.5 * (1.0 + v) * dc)
    return pc, pd, tuple(dpc), tuple(dpd)
