"""Strict YAML scenario configuration for the command-line tools.

One config file is the single source of truth for a run (no environment
overrides).  Parsing is strict: unknown keys anywhere in the tree are
fatal, as are type mismatches, and every constraint of the owning domain
type is enforced at load time.  Command-line flags may override only the
seed and the output directory.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import yaml

from .densities import SourceModel
from .errors import ConfigError
from .estimation import Strategy
from .fisher import QuadratureSpec
from .sampling import DetectorSpec

__all__ = ["ScenarioConfig", "load_config"]

_NUMBER = (int, float)

# section -> key -> expected type(s); None marks sections handled specially
_SCHEMA: dict[str, dict[str, tuple]] = {
    "scene": {
        "x0": (_NUMBER,),
        "eps": (_NUMBER, list),
        "visibility": (_NUMBER, list),
        "sigma": (_NUMBER,),
    },
    "model": {"variant": (str,)},
    "strategies": None,  # top-level list
    "quadrature": {
        "half_width": (_NUMBER,),
        "nodes_1d": (int,),
        "nodes_2d": (int,),
        "floor": (_NUMBER,),
    },
    "sampling": {
        "seed": (int,),
        "n_pairs": (int,),
        "batch_size": (int,),
        "n_batches": (int,),
        "count_mode": (str,),
    },
    "grid": {"half_width": (_NUMBER,), "points": (int,)},
    "detector": {
        "pixel_width": (_NUMBER,),
        "lo": (_NUMBER,),
        "hi": (_NUMBER,),
        "regions": (list,),
    },
    "output": {"dir": (str,)},
}


def _is_number(v) -> bool:
    return isinstance(v, _NUMBER) and not isinstance(v, bool)


def _check_number(v, path: str) -> float:
    if not _is_number(v):
        raise ConfigError(f"{path}: expected a number, got {v!r}")
    return float(v)


def _number_list(v, path: str) -> tuple[float, ...]:
    if _is_number(v):
        return (float(v),)
    if isinstance(v, list) and v and all(_is_number(x) for x in v):
        return tuple(float(x) for x in v)
    raise ConfigError(f"{path}: expected a number or a nonempty list of numbers, got {v!r}")


@dataclass(frozen=True)
class ScenarioConfig:
    """Validated scenario: scene sweep, model, strategies and run controls."""

    x0: float = 0.0
    eps_list: tuple[float, ...] = ()
    visibility_list: tuple[float, ...] = (1.0,)
    sigma: float = 1.0
    model: SourceModel = SourceModel.THERMAL_PAIR
    strategies: tuple[Strategy, ...] = ()
    quadrature: QuadratureSpec = field(default_factory=QuadratureSpec)
    seed: int | None = None
    n_pairs: int | None = None
    batch_size: int | None = None
    n_batches: int | None = None
    count_mode: str = "pairs"
    grid_half_width: float | None = None
    grid_points: int = 201
    detector: DetectorSpec | None = None
    output_dir: str | None = None


def _validate_tree(doc: dict) -> None:
    if not isinstance(doc, dict):
        raise ConfigError("config root must be a mapping")
    for section, value in doc.items():
        if section not in _SCHEMA:
            raise ConfigError(f"unknown key: {section}")
        if section == "strategies":
            if not isinstance(value, list) or not value:
                raise ConfigError("strategies: expected a nonempty list of strategy names")
            continue
        keys = _SCHEMA[section]
        if not isinstance(value, dict):
            raise ConfigError(f"{section}: expected a mapping")
        for key, item in value.items():
            if key not in keys:
                raise ConfigError(f"unknown key: {section}.{key}")
            allowed = keys[key]
            ok = False
            for t in allowed:
                if t is list:
                    ok = ok or isinstance(item, list)
                elif t is _NUMBER:
                    ok = ok or _is_number(item)
                elif t is int:
                    ok = ok or (isinstance(item, int) and not isinstance(item, bool))
                else:
                    ok = ok or isinstance(item, t)
            if not ok:
                raise ConfigError(f"{section}.{key}: unexpected type {type(item).__name__}")


def load_config(path) -> ScenarioConfig:
    """Load and strictly validate a scenario YAML file."""
    try:
        with open(path) as f:
            doc = yaml.safe_load(f)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse config {path}: {exc}") from exc
    if doc is None:
        raise ConfigError(f"config {path} is empty")
    _validate_tree(doc)

    scene = doc.get("scene", {})
    x0 = _check_number(scene.get("x0", 0.0), "scene.x0")
    sigma = _check_number(scene.get("sigma", 1.0), "scene.sigma")
    if sigma <= 0:
        raise ConfigError("scene.sigma must be > 0")
    eps_list = _number_list(scene["eps"], "scene.eps") if "eps" in scene else ()
    for e in eps_list:
        if e < 0:
            raise ConfigError(f"scene.eps values must be >= 0, got {e}")
    vis_list = (
        _number_list(scene["visibility"], "scene.visibility")
        if "visibility" in scene
        else (1.0,)
    )
    for v in vis_list:
        if not 0.0 <= v <= 1.0:
            raise ConfigError(f"scene.visibility values must lie in [0, 1], got {v}")

    variant = doc.get("model", {}).get("variant", SourceModel.THERMAL_PAIR.value)
    try:
        model = SourceModel(variant)
    except ValueError:
        raise ConfigError(
            f"model.variant must be one of {[m.value for m in SourceModel]}, got {variant!r}"
        ) from None

    strategies: list[Strategy] = []
    for name in doc.get("strategies", []):
        try:
            strategies.append(Strategy(name))
        except ValueError:
            raise ConfigError(
                f"strategies: unknown strategy {name!r}; "
                f"expected one of {[s.value for s in Strategy]}"
            ) from None

    quad_doc = doc.get("quadrature", {})
    try:
        quadrature = QuadratureSpec(
            half_width=quad_doc.get("half_width"),
            nodes_1d=quad_doc.get("nodes_1d", QuadratureSpec.nodes_1d),
            nodes_2d=quad_doc.get("nodes_2d", QuadratureSpec.nodes_2d),
            floor=quad_doc.get("floor", QuadratureSpec.floor),
        )
    except Exception as exc:
        raise ConfigError(f"quadrature: {exc}") from exc

    sampling = doc.get("sampling", {})
    seed = sampling.get("seed")
    if seed is not None and seed < 0:
        raise ConfigError("sampling.seed must be a nonnegative integer")
    count_mode = sampling.get("count_mode", "pairs")
    if count_mode not in ("pairs", "coincidences"):
        raise ConfigError(f"sampling.count_mode must be 'pairs' or 'coincidences', got {count_mode!r}")

    grid_doc = doc.get("grid", {})
    grid_half_width = grid_doc.get("half_width")
    if grid_half_width is not None and grid_half_width <= 0:
        raise ConfigError("grid.half_width must be > 0")
    grid_points = grid_doc.get("points", 201)
    if grid_points < 2:
        raise ConfigError("grid.points must be >= 2")

    detector = None
    if "detector" in doc:
        det = doc["detector"]
        for req in ("pixel_width", "lo", "hi"):
            if req not in det:
                raise ConfigError(f"detector.{req} is required when a detector is configured")
        regions = det.get("regions")
        try:
            detector = DetectorSpec(
                pixel_width=float(det["pixel_width"]),
                span=(float(det["lo"]), float(det["hi"])),
                region_boundaries=tuple(float(b) for b in regions) if regions else None,
            )
        except Exception as exc:
            raise ConfigError(f"detector: {exc}") from exc

    return ScenarioConfig(
        x0=x0,
        eps_list=eps_list,
        visibility_list=vis_list,
        sigma=sigma,
        model=model,
        strategies=tuple(strategies),
        quadrature=quadrature,
        seed=seed,
        n_pairs=sampling.get("n_pairs"),
        batch_size=sampling.get("batch_size"),
        n_batches=sampling.get("n_batches"),
        count_mode=count_mode,
        grid_half_width=grid_half_width,
        grid_points=grid_points,
        detector=detector,
        output_dir=doc.get("output", {}).get("dir"),
    )
