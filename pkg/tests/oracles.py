"""Independent oracles used by the test suite.

Everything here deliberately avoids the production code paths it checks:
densities come from enumerating beamsplitter output amplitudes branch by
branch, integrals come from scipy's adaptive routines or dense Simpson
grids, and Fisher integrands can be built from finite differences of the
densities instead of the analytic gradients.
"""

from __future__ import annotations

import numpy as np
from scipy import integrate

from homsr import SourceModel, SourceScene
from homsr.densities import densities_with_gradients
from homsr.scene import psf_amplitude


# ---------------------------------------------------------------------------
# Branch-enumeration densities (amplitude picture)
# ---------------------------------------------------------------------------

def _branches(scene: SourceScene, model: SourceModel):
    """(weight, port-1 amplitude center, port-2 amplitude center) per branch."""
    xp, xm = scene.x_plus, scene.x_minus
    if model is SourceModel.THERMAL_PAIR:
        return [(0.25, a, b) for a in (xp, xm) for b in (xp, xm)]
    return [(0.5, xp, xm), (0.5, xm, xp)]


def branch_densities(x1, x2, scene: SourceScene, model: SourceModel):
    """(pc, pd) by averaging two-photon beamsplitter outcomes over branches.

    Within each branch the photon pair interferes with probability V
    (bosonic output amplitudes) and behaves distinguishably with
    probability 1 - V (independent 50:50 routing).
    """
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    v = scene.visibility
    pc = np.zeros(np.broadcast(x1, x2).shape)
    pd = np.zeros_like(pc)
    for w, ca, cb in _branches(scene, model):
        phi1 = psf_amplitude(x1, ca, scene.sigma)
        phi2 = psf_amplitude(x2, ca, scene.sigma)
        chi1 = psf_amplitude(x1, cb, scene.sigma)
        chi2 = psf_amplitude(x2, cb, scene.sigma)
        # interfering part: |antisymmetric|^2 splits, |symmetric|^2 bunches
        anti = phi1 * chi2 - chi1 * phi2
        sym = phi1 * chi2 + chi1 * phi2
        pc_int = 0.25 * anti * anti
        pd_int = 0.25 * sym * sym
        # distinguishable part: independent routing, 50% split / 50% bunch
        prod = 0.25 * ((phi1 * chi2) ** 2 + (chi1 * phi2) ** 2)
        pc = pc + w * (v * pc_int + (1.0 - v) * prod)
        pd = pd + w * (v * pd_int + (1.0 - v) * prod)
    return pc, pd


# ---------------------------------------------------------------------------
# Reference integrals
# ---------------------------------------------------------------------------

def quad_1d(f, lo, hi, **kw):
    val, _ = integrate.quad(f, lo, hi, limit=200, **kw)
    return val


def simpson_2d(f, lo, hi, n=801):
    """Dense Simpson integral of f(x1, x2) over [lo, hi]^2."""
    x = np.linspace(lo, hi, n)
    vals = f(x[:, None], x[None, :])
    return integrate.simpson(integrate.simpson(vals, x=x, axis=1), x=x)


def cell_masses_2d(f, edges, sub=8):
    """Integral of f(x1, x2) over every cell of a square grid.

    Tensor Gauss-Legendre with ``sub`` points per axis inside each cell;
    returns an (n_cells, n_cells) array of cell probabilities.
    """
    edges = np.asarray(edges, dtype=float)
    nodes, weights = np.polynomial.legendre.leggauss(sub)
    lo = edges[:-1]
    width = np.diff(edges)
    # all 1D sub-node positions and weights, flattened as (cell, sub)
    pts = lo[:, None] + 0.5 * width[:, None] * (nodes[None, :] + 1.0)
    wts = 0.5 * width[:, None] * weights[None, :]
    x = pts.ravel()
    w = wts.ravel()
    vals = f(x[:, None], x[None, :]) * np.outer(w, w)
    n = len(lo)
    return vals.reshape(n, sub, n, sub).sum(axis=(1, 3))


# ---------------------------------------------------------------------------
# Fisher information from finite-difference density derivatives
# ---------------------------------------------------------------------------

def _fd_gradients(x1, x2, scene: SourceScene, model: SourceModel, step=1e-4):
    """Richardson-extrapolated central differences of (pc, pd) in (x0, eps)."""
    def dens(x0, eps):
        s = SourceScene(x0, eps, scene.visibility, scene.sigma)
        pc, pd, _, _ = densities_with_gradients(x1, x2, s, model)
        return pc, pd

    out = []
    for i in range(2):
        def shift(h, i=i):
            d = [0.0, 0.0]
            d[i] = h
            pcp, pdp = dens(scene.x0 + d[0], scene.eps + d[1])
            pcm, pdm = dens(scene.x0 - d[0], scene.eps - d[1])
            return (pcp - pcm) / (2 * h), (pdp - pdm) / (2 * h)

        c1, d1 = shift(step)
        c2, d2 = shift(step / 2)
        out.append(((4 * c2 - c1) / 3, (4 * d2 - d1) / 3))
    (dpc0, dpd0), (dpc1, dpd1) = out
    return (dpc0, dpc1), (dpd0, dpd1)


def fd_fisher_twophoton(scene: SourceScene, model: SourceModel, n=240, floor=1e-14):
    """Per-photon two-photon spatial FI with finite-difference derivatives."""
    hw = 10.0 * scene.sigma + 0.5 * scene.eps
    nodes, w = np.polynomial.legendre.leggauss(n)
    x = scene.x0 + hw * nodes
    w = hw * w
    x1 = x[:, None]
    x2 = x[None, :]
    w2 = w[:, None] * w[None, :]
    pc, pd, _, _ = densities_with_gradients(x1, x2, scene, model)
    dpc, dpd = _fd_gradients(x1, x2, scene, model)
    total = np.zeros((2, 2))
    for p, dp in ((pc, dpc), (pd, dpd)):
        m = p > floor
        wp = w2[m] / p[m]
        for i in range(2):
            for j in range(2):
                total[i, j] += np.sum(wp * dp[i][m] * dp[j][m])
    return total / 2.0
