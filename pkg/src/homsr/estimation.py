"""Maximum-likelihood estimation of (x0, eps) and batch precision statistics.

Three strategies share one interface:

* DIRECT_IMAGING      -- data are single-photon positions drawn from q(x).
* TWO_PHOTON_SPATIAL  -- data are (kind, x1, x2) events; the likelihood of
                         an event is the outcome density of its kind.
* TWO_PHOTON_BINARY   -- only the coincidence count matters; the likelihood
                         is the binomial pmf of n_c out of n pairs.  x0 is
                         not estimable and is reported as nan.

The visibility and the PSF width are fixed known constants during fitting.
Every density is even in eps, so the likelihood is evaluated at |eps| and
fits report a nonnegative separation; estimates that collapse onto eps = 0
are legal and flagged via ``eps_at_boundary``.

Fitting is a coarse grid search (centroid over the event mean +/- 2 sigma,
separation over [0, 4 sigma], 41 steps each by default) followed by
Nelder-Mead refinement to parameter tolerance 1e-6.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import optimize, stats

from .densities import SourceModel, total_coincidence_prob
from .errors import InvalidArgumentError
from .fisher import (
    FisherMatrix,
    fi_direct_imaging,
    fi_twophoton_binary,
    fi_twophoton_spatial,
)
from .sampling import EVENT_DTYPE, KIND_COINCIDENCE, sample_events, sample_positions
from .scene import SourceScene

__all__ = [
    "Strategy",
    "GridSpec",
    "EstimationResult",
    "PrecisionReport",
    "log_likelihood",
    "mle_fit",
    "batch_precision",
    "PRECISION_CSV_HEADER",
    "precision_csv_row",
]

_PSF_NORM_POW = -0.25  # amplitude normalization exponent of (2 pi sigma^2)
_BLOCK = 128           # parameter points evaluated per vectorized block
_BOUNDARY_TOL = 1e-4   # |eps_hat| below this (times sigma) counts as the eps = 0 boundary


class Strategy(Enum):
    DIRECT_IMAGING = "direct_imaging"
    TWO_PHOTON_SPATIAL = "two_photon_spatial"
    TWO_PHOTON_BINARY = "two_photon_binary"


@dataclass(frozen=True)
class GridSpec:
    """Initialization grid for the MLE search (widths in units of sigma)."""

    x0_half_width: float = 2.0
    x0_steps: int = 41
    eps_max: float = 4.0
    eps_steps: int = 41

    def __post_init__(self):
        if self.x0_steps < 2 or self.eps_steps < 2:
            raise InvalidArgumentError("grid needs at least 2 steps per axis")
        if self.x0_half_width <= 0 or self.eps_max <= 0:
            raise InvalidArgumentError("grid widths must be positive")


@dataclass(frozen=True)
class EstimationResult:
    x0_hat: float
    eps_hat: float
    loglik: float
    converged: bool
    n_events: int
    strategy: Strategy
    eps_at_boundary: bool = False


@dataclass(frozen=True)
class PrecisionReport:
    """Batch statistics of inverse empirical variances per photon.

    inv_var_* = 1 / (N_photon * Var(theta_hat)) with jackknife standard
    errors over batches; crb_prediction holds the per-photon information
    matrix of the strategy, whose diagonal the inverse variances approach
    from below as batches grow.
    """

    strategy: Strategy
    scene: SourceScene
    model: SourceModel
    inv_var_eps_per_photon: float
    inv_var_eps_se: float
    inv_var_x0_per_photon: float
    inv_var_x0_se: float
    n_batches: int
    n_excluded: int
    n_boundary: int
    batch_size_events: int
    n_photons_per_batch: float
    crb_prediction: FisherMatrix


# ---------------------------------------------------------------------------
# Likelihood evaluation
# ---------------------------------------------------------------------------

def _as_positions(events) -> np.ndarray:
    """Direct-imaging data: a plain position array, or both coordinates of
    two-photon records."""
    arr = np.asarray(events)
    if arr.dtype == EVENT_DTYPE:
        return np.concatenate([arr["x1"], arr["x2"]])
    return arr.astype(float).ravel()


def _prepare(events, strategy: Strategy) -> dict:
    if strategy is Strategy.DIRECT_IMAGING:
        x = _as_positions(events)
        if x.size == 0:
            raise InvalidArgumentError("event list is empty")
        return {"x": x, "n_events": int(x.size)}
    arr = np.asarray(events)
    if arr.dtype != EVENT_DTYPE:
        raise InvalidArgumentError(
            f"{strategy.value} expects a structured event array with fields {EVENT_DTYPE.names}"
        )
    if arr.size == 0:
        raise InvalidArgumentError("event list is empty")
    is_c = arr["kind"] == KIND_COINCIDENCE
    return {
        "x1": arr["x1"].copy(),
        "x2": arr["x2"].copy(),
        "is_c": is_c,
        "n_c": int(np.count_nonzero(is_c)),
        "n_events": int(arr.size),
    }


def _loglik_block(x0s, epss, prep, visibility, sigma, model, strategy) -> np.ndarray:
    """Log-likelihood at a batch of (x0, eps) points; eps taken as |eps|."""
    x0s = np.atleast_1d(np.asarray(x0s, dtype=float))[:, None]
    epss = np.abs(np.atleast_1d(np.asarray(epss, dtype=float)))[:, None]
    s2 = sigma * sigma
    norm = (2.0 * np.pi * s2) ** _PSF_NORM_POW
    xp = x0s + 0.5 * epss
    xm = x0s - 0.5 * epss

    if strategy is Strategy.TWO_PHOTON_BINARY:
        d2 = np.exp(-(epss[:, 0] ** 2) / (4.0 * s2))
        if model is SourceModel.THERMAL_PAIR:
            p_c = 0.5 * (1.0 - visibility * 0.5 * (1.0 + d2))
        else:
            p_c = 0.5 * (1.0 - visibility * d2)
        return stats.binom.logpmf(prep["n_c"], prep["n_events"], p_c)

    if strategy is Strategy.DIRECT_IMAGING:
        x = prep["x"][None, :]
        gp = norm * np.exp(-((x - xp) ** 2) / (4.0 * s2))
        gm = norm * np.exp(-((x - xm) ** 2) / (4.0 * s2))
        q = 0.5 * (gp * gp + gm * gm)
        with np.errstate(divide="ignore"):
            return np.sum(np.log(np.maximum(q, 0.0)), axis=1)

    x1 = prep["x1"][None, :]
    x2 = prep["x2"][None, :]
    ap1 = norm * np.exp(-((x1 - xp) ** 2) / (4.0 * s2))
    am1 = norm * np.exp(-((x1 - xm) ** 2) / (4.0 * s2))
    ap2 = norm * np.exp(-((x2 - xp) ** 2) / (4.0 * s2))
    am2 = norm * np.exp(-((x2 - xm) ** 2) / (4.0 * s2))
    anti = ap1 * am2 - am1 * ap2
    if model is SourceModel.THERMAL_PAIR:
        rho = 0.5 * (ap1 * ap2 + am1 * am2)
        a = 0.125 * anti * anti
        c = rho * rho
    else:
        a = 0.25 * anti * anti
        c = (ap1 * am1) * (ap2 * am2)
    p = a + 0.5 * np.where(prep["is_c"][None, :], 1.0 - visibility, 1.0 + visibility) * c
    with np.errstate(divide="ignore"):
        return np.sum(np.log(p), axis=1)


def log_likelihood(
    params: tuple[float, float],
    events,
    scene_constants: tuple[float, float],
    model: SourceModel = SourceModel.THERMAL_PAIR,
    strategy: Strategy = Strategy.TWO_PHOTON_SPATIAL,
) -> float:
    """Log-likelihood of the data at params = (x0, eps).

    scene_constants = (visibility, sigma) are the fixed known constants.
    Even in eps; -inf is returned when an observed event has zero model
    density (e.g. any coincidence under V = 1, eps = 0).
    """
    x0, eps = params
    visibility, sigma = scene_constants
    prep = _prepare(events, strategy)
    val = _loglik_block([x0], [eps], prep, visibility, sigma, model, strategy)
    return float(val[0])


# ---------------------------------------------------------------------------
# Fitting
# ---------------------------------------------------------------------------

def _grid_best(prep, visibility, sigma, model, strategy, grid: GridSpec):
    eps_grid = np.linspace(0.0, grid.eps_max * sigma, grid.eps_steps)
    if strategy is Strategy.TWO_PHOTON_BINARY:
        ll = _loglik_block(np.zeros_like(eps_grid), eps_grid, prep, visibility, sigma, model, strategy)
        return None, float(eps_grid[int(np.argmax(ll))])
    center = float(np.mean(prep["x"] if strategy is Strategy.DIRECT_IMAGING
                           else np.concatenate([prep["x1"], prep["x2"]])))
    x0_grid = np.linspace(center - grid.x0_half_width * sigma,
                          center + grid.x0_half_width * sigma, grid.x0_steps)
    gx0, geps = np.meshgrid(x0_grid, eps_grid, indexing="ij")
    gx0 = gx0.ravel()
    geps = geps.ravel()
    best_val = -np.inf
    best = (gx0[0], geps[0])
    for start in range(0, gx0.size, _BLOCK):
        sl = slice(start, start + _BLOCK)
        ll = _loglik_block(gx0[sl], geps[sl], prep, visibility, sigma, model, strategy)
        k = int(np.argmax(ll))
        if ll[k] > best_val:
            best_val = float(ll[k])
            best = (float(gx0[sl][k]), float(geps[sl][k]))
    return best


def mle_fit(
    events,
    model: SourceModel,
    strategy: Strategy,
    scene_constants: tuple[float, float],
    grid: GridSpec | None = None,
) -> EstimationResult:
    """Maximize the log-likelihood over (x0, eps) (eps only, for the binary
    strategy): grid search then Nelder-Mead simplex to xatol = 1e-6."""
    visibility, sigma = scene_constants
    grid = grid or GridSpec()
    prep = _prepare(events, strategy)

    def objective(theta):
        if strategy is Strategy.TWO_PHOTON_BINARY:
            x0, eps = 0.0, theta[0]
        else:
            x0, eps = theta
        val = _loglik_block([x0], [eps], prep, visibility, sigma, model, strategy)[0]
        return -val if np.isfinite(val) else np.inf

    gx0, geps = _grid_best(prep, visibility, sigma, model, strategy, grid)
    start = np.array([geps]) if strategy is Strategy.TWO_PHOTON_BINARY else np.array([gx0, geps])
    res = optimize.minimize(
        objective,
        start,
        method="Nelder-Mead",
        options={"xatol": 1e-6, "fatol": 1e-12, "maxiter": 4000, "maxfev": 8000},
    )
    eps_hat = float(abs(res.x[-1]))
    x0_hat = float(res.x[0]) if strategy is not Strategy.TWO_PHOTON_BINARY else float("nan")
    return EstimationResult(
        x0_hat=x0_hat,
        eps_hat=eps_hat,
        loglik=float(-res.fun),
        converged=bool(res.success),
        n_events=prep["n_events"],
        strategy=strategy,
        eps_at_boundary=eps_hat < _BOUNDARY_TOL * sigma,
    )


# ---------------------------------------------------------------------------
# Batch precision
# ---------------------------------------------------------------------------

def derive_seed(*parts: int) -> int:
    """Deterministic child seed from integer parts (order-sensitive)."""
    return int(np.random.SeedSequence(tuple(int(p) for p in parts)).generate_state(1)[0])


def _simulate_batch(scene, model, strategy, batch_size, count_mode, batch_seed):
    """One synthetic dataset plus its photon count."""
    if strategy is Strategy.DIRECT_IMAGING:
        return sample_positions(scene, batch_size, batch_seed), batch_size
    if count_mode == "pairs":
        return sample_events(scene, model, batch_size, batch_seed), 2 * batch_size
    # condition on the number of cross-coincidences instead of pairs
    p_c = total_coincidence_prob(scene, model)
    if p_c <= 0.0:
        raise InvalidArgumentError("cannot condition on coincidences: P_c = 0 for this scene")
    blocks = []
    n_c = 0
    block_pairs = max(256, int(np.ceil(batch_size / p_c * 1.2)))
    for k in range(1000):
        ev = sample_events(scene, model, block_pairs, derive_seed(batch_seed, k))
        blocks.append(ev)
        n_c += int(np.count_nonzero(ev["kind"] == KIND_COINCIDENCE))
        if n_c >= batch_size:
            break
    events = np.concatenate(blocks)
    hit = np.flatnonzero(events["kind"] == KIND_COINCIDENCE)[batch_size - 1]
    events = events[: hit + 1]
    return events, 2 * events.size


def _run_single_batch(payload):
    scene, model, strategy, batch_size, count_mode, grid, batch_seed = payload
    data, n_photons = _simulate_batch(scene, model, strategy, batch_size, count_mode, batch_seed)
    fit = mle_fit(data, model, strategy, (scene.visibility, scene.sigma), grid)
    return fit.x0_hat, fit.eps_hat, fit.converged, fit.eps_at_boundary, n_photons


def _inv_var_with_jackknife(theta: np.ndarray, n_photons: float) -> tuple[float, float]:
    """1 / (N Var(theta)) with a delete-one jackknife standard error."""
    n = theta.size
    s1 = float(theta.sum())
    s2 = float((theta * theta).sum())
    var = (s2 - s1 * s1 / n) / (n - 1)
    t = 1.0 / (n_photons * var)
    loo_s1 = s1 - theta
    loo_s2 = s2 - theta * theta
    loo_var = (loo_s2 - loo_s1 * loo_s1 / (n - 1)) / (n - 2)
    t_i = 1.0 / (n_photons * loo_var)
    se = float(np.sqrt((n - 1) / n * np.sum((t_i - t_i.mean()) ** 2)))
    return float(t), se


def batch_precision(
    scene: SourceScene,
    model: SourceModel,
    strategy: Strategy,
    batch_size: int,
    n_batches: int,
    seed: int,
    count_mode: str = "pairs",
    grid: GridSpec | None = None,
    n_jobs: int = 1,
) -> PrecisionReport:
    """Simulate n_batches independent datasets, fit each, and report
    per-photon inverse empirical variances against the CRB prediction.

    batch_size counts photons for direct imaging and pairs for the
    two-photon strategies (count_mode="coincidences" instead stops each
    batch at batch_size cross-coincidences).  Batches that fail to converge
    are excluded from the statistics and counted; eps = 0 boundary fits are
    retained and counted.  Per-batch seeds derive deterministically from
    (seed, batch index), so the report does not depend on scheduling.
    """
    if batch_size < 100:
        raise InvalidArgumentError(f"batch_size must be >= 100, got {batch_size}")
    if n_batches < 10:
        raise InvalidArgumentError(f"n_batches must be >= 10, got {n_batches}")
    if count_mode not in ("pairs", "coincidences"):
        raise InvalidArgumentError(f"count_mode must be 'pairs' or 'coincidences', got {count_mode!r}")

    payloads = [
        (scene, model, strategy, batch_size, count_mode, grid, derive_seed(seed, i))
        for i in range(n_batches)
    ]
    if n_jobs == 1:
        results = [_run_single_batch(p) for p in payloads]
    else:
        workers = n_jobs if n_jobs > 0 else (os.cpu_count() or 1)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_single_batch, payloads, chunksize=max(1, n_batches // (4 * workers))))

    x0s = np.array([r[0] for r in results])
    epss = np.array([r[1] for r in results])
    ok = np.array([r[2] for r in results])
    boundary = np.array([r[3] for r in results])
    n_photons = np.array([r[4] for r in results], dtype=float)

    if int(np.count_nonzero(ok)) < 3:
        raise InvalidArgumentError(
            f"only {int(np.count_nonzero(ok))} of {n_batches} batches converged; cannot form statistics"
        )
    n_bar = float(n_photons[ok].mean())
    inv_eps, inv_eps_se = _inv_var_with_jackknife(epss[ok], n_bar)
    if strategy is Strategy.TWO_PHOTON_BINARY:
        inv_x0, inv_x0_se = float("nan"), float("nan")
    else:
        inv_x0, inv_x0_se = _inv_var_with_jackknife(x0s[ok], n_bar)

    if strategy is Strategy.DIRECT_IMAGING:
        pred = fi_direct_imaging(scene)
    elif strategy is Strategy.TWO_PHOTON_SPATIAL:
        pred = fi_twophoton_spatial(scene, model)
    else:
        pred = fi_twophoton_binary(scene, model)

    return PrecisionReport(
        strategy=strategy,
        scene=scene,
        model=model,
        inv_var_eps_per_photon=inv_eps,
        inv_var_eps_se=inv_eps_se,
        inv_var_x0_per_photon=inv_x0,
        inv_var_x0_se=inv_x0_se,
        n_batches=n_batches,
        n_excluded=int(np.count_nonzero(~ok)),
        n_boundary=int(np.count_nonzero(boundary & ok)),
        batch_size_events=batch_size,
        n_photons_per_batch=n_bar,
        crb_prediction=pred,
    )


# ---------------------------------------------------------------------------
# CSV export
# ---------------------------------------------------------------------------

PRECISION_CSV_HEADER = (
    "eps,strategy,inv_var_eps,inv_var_eps_se,inv_var_x0,inv_var_x0_se,"
    "crb_eps,crb_x0,n_batches,batch_size,qcrb_eps,qcrb_x0,visibility,n_excluded,n_boundary"
)


def _fmt(v: float) -> str:
    return "nan" if not np.isfinite(v) else f"{v:.12g}"


def precision_csv_row(report: PrecisionReport, qcrb: FisherMatrix) -> str:
    """One CSV line per report; information-free entries are written as nan."""
    crb_eps = report.crb_prediction.epseps
    crb_x0 = report.crb_prediction.x0x0
    fields = [
        _fmt(report.scene.eps),
        report.strategy.value,
        _fmt(report.inv_var_eps_per_photon),
        _fmt(report.inv_var_eps_se),
        _fmt(report.inv_var_x0_per_photon),
        _fmt(report.inv_var_x0_se),
        _fmt(crb_eps) if crb_eps > 0 else "nan",
        _fmt(crb_x0) if crb_x0 > 0 else "nan",
        str(report.n_batches),
        str(report.batch_size_events),
        _fmt(qcrb.epseps),
        _fmt(qcrb.x0x0),
        _fmt(report.scene.visibility),
        str(report.n_excluded),
        str(report.n_boundary),
    ]
    return ",".join(fields)
