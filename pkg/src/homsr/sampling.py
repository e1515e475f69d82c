"""Seeded Monte Carlo generation of two-photon detection events.

Events are drawn pair by pair: first the outcome kind (cross-coincidence
with probability P_c, otherwise double), then the detector coordinates by
rejection sampling from the conditional density.  The proposal is the
product q(x1) q(x2) of single-photon densities; Cauchy-Schwarz bounds both
outcome densities by a constant times this product, so the envelope is
exact and the sampler unbiased:

    thermal pair:       p_c <= (1/2) q q,    p_d <= (1+V)/2 q q
    distinct emitters:  p_c <= q q,          p_d <= (2+V)/2 q q

Reproducibility: the stream is generated in fixed-size chunks, each chunk
from its own counter-based Philox generator keyed by (seed, chunk index).
Identical (seed, scene, model, n_pairs) therefore reproduces the event
list bit for bit, and chunks can be generated independently (in parallel)
without changing the merged, index-ordered output.
"""

from __future__ import annotations

import csv
import string
from dataclasses import dataclass

import numpy as np

from .densities import SourceModel, pc_density, pd_density, total_coincidence_prob
from .errors import InvalidArgumentError, SamplingError
from .scene import SourceScene, single_photon_density

__all__ = [
    "EVENT_DTYPE",
    "KIND_COINCIDENCE",
    "KIND_DOUBLE",
    "EventRecord",
    "DetectorSpec",
    "BinnedEvents",
    "sample_events",
    "sample_positions",
    "bin_events",
    "write_events_csv",
    "load_events_csv",
    "to_records",
]

KIND_COINCIDENCE = "C"
KIND_DOUBLE = "D"

EVENT_DTYPE = np.dtype([("kind", "U1"), ("x1", "f8"), ("x2", "f8")])

_MIN_ACCEPTANCE = 1e-4
_MAX_ROUNDS = 200
_MAX_PROPOSALS_PER_ROUND = 2_000_000


@dataclass(frozen=True)
class EventRecord:
    """One detected two-photon outcome."""

    kind: str
    x1: float
    x2: float


def _chunk_rng(seed: int, chunk_index: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence((seed, chunk_index))))


def _envelope_constants(model: SourceModel, visibility: float) -> tuple[float, float]:
    if model is SourceModel.THERMAL_PAIR:
        return 0.5, 0.5 * (1.0 + visibility)
    return 1.0, 0.5 * (2.0 + visibility)


def _check_seed(seed: int) -> int:
    if not isinstance(seed, (int, np.integer)) or seed < 0:
        raise InvalidArgumentError(f"seed must be a nonnegative integer, got {seed!r}")
    return int(seed)


def _propose_positions(rng: np.random.Generator, k: int, scene: SourceScene):
    """Draw k samples from the single-photon mixture q."""
    pick = rng.random(k) < 0.5
    z = rng.standard_normal(k)
    mean = np.where(pick, scene.x_plus, scene.x_minus)
    return mean + scene.sigma * z


def _fill_branch(
    rng: np.random.Generator,
    count: int,
    scene: SourceScene,
    model: SourceModel,
    kind: str,
    envelope: float,
    branch_prob: float,
):
    """Rejection-sample ``count`` coordinate pairs from one outcome branch."""
    if count == 0:
        return np.empty(0), np.empty(0)
    density = pc_density if kind == KIND_COINCIDENCE else pd_density
    acceptance = branch_prob / envelope
    xs1, xs2 = [], []
    have = 0
    for _ in range(_MAX_ROUNDS):
        need = count - have
        k = int(np.ceil(need / acceptance * 1.2)) + 16
        k = min(max(k, need), _MAX_PROPOSALS_PER_ROUND)
        x1 = _propose_positions(rng, k, scene)
        x2 = _propose_positions(rng, k, scene)
        u = rng.random(k)
        p = density(x1, x2, scene, model)
        bound = envelope * single_photon_density(x1, scene) * single_photon_density(x2, scene)
        accept = u * bound < p
        xs1.append(x1[accept])
        xs2.append(x2[accept])
        have += int(np.count_nonzero(accept))
        if have >= count:
            x1_all = np.concatenate(xs1)[:count]
            x2_all = np.concatenate(xs2)[:count]
            return x1_all, x2_all
    raise SamplingError(
        f"rejection sampling did not terminate after {_MAX_ROUNDS} rounds "
        f"(kind={kind}, predicted acceptance {acceptance:.3e}, scene={scene})"
    )


def sample_events(
    scene: SourceScene,
    model: SourceModel = SourceModel.THERMAL_PAIR,
    n_pairs: int = 1,
    seed: int = 0,
    chunk_size: int = 8192,
) -> np.ndarray:
    """Draw n_pairs i.i.d. two-photon events as a structured array.

    Fields: kind ("C" cross-coincidence / "D" double), x1, x2.  The chunked
    stream layout is part of the reproducibility contract; chunk_size has a
    fixed default and changing it changes the stream.
    """
    if n_pairs < 1:
        raise InvalidArgumentError(f"n_pairs must be >= 1, got {n_pairs}")
    seed = _check_seed(seed)

    p_c = total_coincidence_prob(scene, model)
    env_c, env_d = _envelope_constants(model, scene.visibility)
    for kind, prob, env in ((KIND_COINCIDENCE, p_c, env_c), (KIND_DOUBLE, 1.0 - p_c, env_d)):
        if prob > 0.0 and prob / env < _MIN_ACCEPTANCE:
            raise SamplingError(
                f"predicted rejection acceptance {prob / env:.3e} for kind={kind} is below "
                f"{_MIN_ACCEPTANCE:g} (branch probability {prob:.3e}, envelope constant {env:.3g}); "
                f"scene={scene}, model={model.value}"
            )

    out = np.empty(n_pairs, dtype=EVENT_DTYPE)
    for chunk_index, start in enumerate(range(0, n_pairs, chunk_size)):
        m = min(chunk_size, n_pairs - start)
        rng = _chunk_rng(seed, chunk_index)
        is_c = rng.random(m) < p_c
        n_c = int(np.count_nonzero(is_c))
        x1c, x2c = _fill_branch(rng, n_c, scene, model, KIND_COINCIDENCE, env_c, p_c)
        x1d, x2d = _fill_branch(rng, m - n_c, scene, model, KIND_DOUBLE, env_d, 1.0 - p_c)
        block = out[start : start + m]
        block["kind"] = np.where(is_c, KIND_COINCIDENCE, KIND_DOUBLE)
        block["x1"][is_c] = x1c
        block["x2"][is_c] = x2c
        block["x1"][~is_c] = x1d
        block["x2"][~is_c] = x2d
    return out


def sample_positions(
    scene: SourceScene, n_photons: int, seed: int, chunk_size: int = 65536
) -> np.ndarray:
    """Draw n_photons i.i.d. single-photon positions from q(x) (direct imaging)."""
    if n_photons < 1:
        raise InvalidArgumentError(f"n_photons must be >= 1, got {n_photons}")
    seed = _check_seed(seed)
    out = np.empty(n_photons)
    for chunk_index, start in enumerate(range(0, n_photons, chunk_size)):
        m = min(chunk_size, n_photons - start)
        rng = _chunk_rng(seed, chunk_index)
        out[start : start + m] = _propose_positions(rng, m, scene)
    return out


@dataclass(frozen=True)
class DetectorSpec:
    """Pixelated 1D detector spanning [lo, hi] in each output arm.

    region_boundaries optionally splits the span into named regions
    (A, B, C, ... left to right), mirroring region-pair coincidence logic.
    """

    pixel_width: float
    span: tuple[float, float]
    region_boundaries: tuple[float, ...] | None = None

    def __post_init__(self):
        lo, hi = self.span
        if not (np.isfinite(lo) and np.isfinite(hi) and lo < hi):
            raise InvalidArgumentError(f"span must be a finite interval with lo < hi, got {self.span}")
        if not (np.isfinite(self.pixel_width) and self.pixel_width > 0):
            raise InvalidArgumentError(f"pixel_width must be > 0, got {self.pixel_width}")
        if self.region_boundaries is not None:
            b = tuple(self.region_boundaries)
            if any(not lo < x < hi for x in b) or list(b) != sorted(set(b)):
                raise InvalidArgumentError(
                    "region_boundaries must be strictly increasing and inside the span"
                )
            object.__setattr__(self, "region_boundaries", b)

    def pixel_edges(self) -> np.ndarray:
        lo, hi = self.span
        n = int(np.ceil((hi - lo) / self.pixel_width - 1e-12))
        return lo + self.pixel_width * np.arange(n + 1)

    def region_edges(self) -> np.ndarray | None:
        if self.region_boundaries is None:
            return None
        lo, hi = self.span
        return np.array([lo, *self.region_boundaries, hi])

    def region_names(self) -> tuple[str, ...] | None:
        if self.region_boundaries is None:
            return None
        return tuple(string.ascii_uppercase[: len(self.region_boundaries) + 1])


@dataclass(frozen=True)
class BinnedEvents:
    """2D histograms of (x1, x2) per event kind.

    counts arrays have shape (n_pixels + 2, n_pixels + 2); the first and
    last row/column are underflow/overflow bins for events off the span.
    """

    pixel_edges: np.ndarray
    counts: dict[str, np.ndarray]
    region_names: tuple[str, ...] | None = None
    region_counts: dict[str, np.ndarray] | None = None

    def total(self, kind: str) -> int:
        return int(self.counts[kind].sum())

    def interior(self, kind: str) -> np.ndarray:
        return self.counts[kind][1:-1, 1:-1]


def bin_events(events: np.ndarray, detector: DetectorSpec) -> BinnedEvents:
    """Histogram events onto the detector grid, preserving counts exactly."""
    edges = detector.pixel_edges()
    ext = np.concatenate(([-np.inf], edges, [np.inf]))
    counts: dict[str, np.ndarray] = {}
    region_counts: dict[str, np.ndarray] | None = None
    region_edges = detector.region_edges()
    if region_edges is not None:
        region_counts = {}
    for kind in (KIND_COINCIDENCE, KIND_DOUBLE):
        sel = events["kind"] == kind
        x1 = events["x1"][sel]
        x2 = events["x2"][sel]
        h, _, _ = np.histogram2d(x1, x2, bins=(ext, ext))
        counts[kind] = h.astype(np.int64)
        if region_edges is not None:
            lo, hi = detector.span
            inside = (x1 >= lo) & (x1 <= hi) & (x2 >= lo) & (x2 <= hi)
            hr, _, _ = np.histogram2d(x1[inside], x2[inside], bins=(region_edges, region_edges))
            region_counts[kind] = hr.astype(np.int64)
    return BinnedEvents(
        pixel_edges=edges,
        counts=counts,
        region_names=detector.region_names(),
        region_counts=region_counts,
    )


def to_records(events: np.ndarray) -> list[EventRecord]:
    return [EventRecord(kind=str(k), x1=float(a), x2=float(b)) for k, a, b in events]


def write_events_csv(events: np.ndarray, path) -> None:
    """Write events as ``pair_index,kind,x1,x2`` with 15 significant digits."""
    with open(path, "w", newline="") as f:
        f.write("pair_index,kind,x1,x2\n")
        for i, (kind, x1, x2) in enumerate(events):
            f.write(f"{i},{kind},{x1:.15g},{x2:.15g}\n")


def load_events_csv(path) -> np.ndarray:
    with open(path, newline="") as f:
        reader = csv.reader(f)
        header = next(reader)
        if header != ["pair_index", "kind", "x1", "x2"]:
            raise InvalidArgumentError(f"unexpected event CSV header: {header}")
        rows = [(kind, float(x1), float(x2)) for _, kind, x1, x2 in reader]
    out = np.empty(len(rows), dtype=EVENT_DTYPE)
    for i, row in enumerate(rows):
        out[i] = row
    return out
