"""Command-line entry point: parameter scans, simulation and estimation runs.

Subcommands
-----------
fisher-scan     one CSV row of information/bound columns per (eps, visibility,
                strategy) combination
density-map     coordinate-labelled CSV grids of the two outcome densities
simulate        event stream CSV (plus optional detector binning artifacts)
reproduce-fig2  Monte Carlo precision CSV (batched MLE fits vs the CRB/qCRB)

All data go to files in --out; diagnostics go to stderr only.  Given the
same config and seed, every command writes byte-identical output.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .config import ScenarioConfig, load_config
from .densities import outcome_densities, total_coincidence_prob
from .errors import ConfigError, HomsrError
from .estimation import (
    PRECISION_CSV_HEADER,
    Strategy,
    batch_precision,
    derive_seed,
    precision_csv_row,
)
from .fisher import (
    fi_direct_imaging,
    fi_twophoton_binary,
    fi_twophoton_spatial,
    qfi_reference,
)
from .sampling import bin_events, sample_events, write_events_csv
from .scene import SourceScene

FISHER_SCAN_HEADER = (
    "eps,visibility,strategy,fi_x0x0,fi_x0eps,fi_epseps,"
    "inv_var_x0,inv_var_eps,crb_x0,crb_eps,qcrb_x0,qcrb_eps"
)


def _fmt(v: float) -> str:
    return "nan" if not np.isfinite(v) else f"{v:.12g}"


def _info_or_nan(v: float) -> str:
    # zero information marks a non-identifiable parameter in output tables
    return _fmt(v) if v > 0 else "nan"


def _write_lines(path: Path, lines: list[str]) -> None:
    with open(path, "w", newline="\n") as f:
        f.write("\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# fisher-scan
# ---------------------------------------------------------------------------

def _scan_row(payload) -> str:
    cfg, eps, vis, strategy = payload
    scene = SourceScene(x0=cfg.x0, eps=eps, visibility=vis, sigma=cfg.sigma)
    if strategy is Strategy.DIRECT_IMAGING:
        fi = fi_direct_imaging(scene, cfg.quadrature)
    elif strategy is Strategy.TWO_PHOTON_SPATIAL:
        fi = fi_twophoton_spatial(scene, cfg.model, cfg.quadrature)
    else:
        fi = fi_twophoton_binary(scene, cfg.model)
    qcrb = qfi_reference(scene)
    return ",".join(
        [
            _fmt(eps),
            _fmt(vis),
            strategy.value,
            _fmt(fi.x0x0),
            _fmt(fi.x0eps),
            _fmt(fi.epseps),
            _info_or_nan(fi.x0x0),
            _info_or_nan(fi.epseps),
            _info_or_nan(fi.x0x0),
            _info_or_nan(fi.epseps),
            _fmt(qcrb.x0x0),
            _fmt(qcrb.epseps),
        ]
    )


def cmd_fisher_scan(cfg: ScenarioConfig, out_dir: Path, threads: int) -> int:
    if not cfg.eps_list:
        raise ConfigError("fisher-scan requires scene.eps (scalar or list)")
    if not cfg.strategies:
        raise ConfigError("fisher-scan requires a strategies list")
    payloads = [
        (cfg, eps, vis, strat)
        for eps in cfg.eps_list
        for vis in cfg.visibility_list
        for strat in cfg.strategies
    ]
    if threads == 1:
        rows = [_scan_row(p) for p in payloads]
    else:
        workers = threads if threads > 0 else None
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_scan_row, payloads))
    _write_lines(out_dir / "fisher_scan.csv", [FISHER_SCAN_HEADER, *rows])
    return 0


# ---------------------------------------------------------------------------
# density-map
# ---------------------------------------------------------------------------

def _grid_csv(path: Path, x: np.ndarray, values: np.ndarray) -> None:
    lines = ["x," + ",".join(_fmt(v) for v in x)]
    for i, xi in enumerate(x):
        lines.append(_fmt(xi) + "," + ",".join(_fmt(v) for v in values[i]))
    _write_lines(path, lines)


def cmd_density_map(cfg: ScenarioConfig, out_dir: Path, threads: int) -> int:
    if len(cfg.eps_list) != 1:
        raise ConfigError("density-map requires a single scene.eps value")
    if len(cfg.visibility_list) != 1:
        raise ConfigError("density-map requires a single scene.visibility value")
    eps = cfg.eps_list[0]
    scene = SourceScene(x0=cfg.x0, eps=eps, visibility=cfg.visibility_list[0], sigma=cfg.sigma)
    half = cfg.grid_half_width if cfg.grid_half_width is not None else 6.0 * cfg.sigma + eps
    x = np.linspace(scene.x0 - half, scene.x0 + half, cfg.grid_points)
    dens = outcome_densities(scene, cfg.model)
    pc = dens.pc(x[:, None], x[None, :])
    pd = dens.pd(x[:, None], x[None, :])
    _grid_csv(out_dir / "density_pc.csv", x, pc)
    _grid_csv(out_dir / "density_pd.csv", x, pd)
    return 0


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------

def cmd_simulate(cfg: ScenarioConfig, out_dir: Path, threads: int) -> int:
    if len(cfg.eps_list) != 1 or len(cfg.visibility_list) != 1:
        raise ConfigError("simulate requires single scene.eps and scene.visibility values")
    if cfg.n_pairs is None:
        raise ConfigError("simulate requires sampling.n_pairs")
    if cfg.seed is None:
        raise ConfigError("simulate requires a seed (sampling.seed or --seed)")
    scene = SourceScene(
        x0=cfg.x0, eps=cfg.eps_list[0], visibility=cfg.visibility_list[0], sigma=cfg.sigma
    )
    events = sample_events(scene, cfg.model, cfg.n_pairs, cfg.seed)
    write_events_csv(events, out_dir / "events.csv")
    if cfg.detector is not None:
        binned = bin_events(events, cfg.detector)
        centers = 0.5 * (binned.pixel_edges[1:] + binned.pixel_edges[:-1])
        labels = ["-inf", *(_fmt(c) for c in centers), "inf"]
        for kind, name in (("C", "binned_coincidences.csv"), ("D", "binned_doubles.csv")):
            counts = binned.counts[kind]
            lines = ["x," + ",".join(labels)]
            for i, lab in enumerate(labels):
                lines.append(lab + "," + ",".join(str(int(v)) for v in counts[i]))
            _write_lines(out_dir / name, lines)
        if binned.region_counts is not None:
            lines = ["kind,region_1,region_2,count"]
            for kind in ("C", "D"):
                mat = binned.region_counts[kind]
                for i, ri in enumerate(binned.region_names):
                    for j, rj in enumerate(binned.region_names):
                        lines.append(f"{kind},{ri},{rj},{int(mat[i, j])}")
            _write_lines(out_dir / "region_counts.csv", lines)
    return 0


# ---------------------------------------------------------------------------
# reproduce-fig2
# ---------------------------------------------------------------------------

def cmd_reproduce_fig2(cfg: ScenarioConfig, out_dir: Path, threads: int) -> int:
    if not cfg.eps_list:
        raise ConfigError("reproduce-fig2 requires scene.eps (scalar or list)")
    if len(cfg.visibility_list) != 1:
        raise ConfigError("reproduce-fig2 requires a single scene.visibility value")
    if not cfg.strategies:
        raise ConfigError("reproduce-fig2 requires a strategies list")
    if cfg.batch_size is None or cfg.n_batches is None:
        raise ConfigError("reproduce-fig2 requires sampling.batch_size and sampling.n_batches")
    if cfg.seed is None:
        raise ConfigError("reproduce-fig2 requires a seed (sampling.seed or --seed)")

    vis = cfg.visibility_list[0]
    rows: list[str] = []
    failures = 0
    jobs = [(eps, strat) for eps in cfg.eps_list for strat in cfg.strategies]
    for index, (eps, strat) in enumerate(jobs):
        scene = SourceScene(x0=cfg.x0, eps=eps, visibility=vis, sigma=cfg.sigma)
        try:
            report = batch_precision(
                scene,
                cfg.model,
                strat,
                batch_size=cfg.batch_size,
                n_batches=cfg.n_batches,
                seed=derive_seed(cfg.seed, index),
                count_mode=cfg.count_mode,
                n_jobs=threads,
            )
        except HomsrError as exc:
            failures += 1
            print(f"homsr: row {index} (eps={eps}, {strat.value}) failed: {exc}", file=sys.stderr)
            continue
        rows.append(precision_csv_row(report, qfi_reference(scene)))
        print(f"homsr: row {index + 1}/{len(jobs)} done (eps={eps}, {strat.value})", file=sys.stderr)
    _write_lines(out_dir / "precision.csv", [PRECISION_CSV_HEADER, *rows])
    return 0 if rows else 1


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

_COMMANDS = {
    "fisher-scan": cmd_fisher_scan,
    "density-map": cmd_density_map,
    "simulate": cmd_simulate,
    "reproduce-fig2": cmd_reproduce_fig2,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="homsr",
        description="Two-photon interference superresolution toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="scenario YAML file")
        p.add_argument("--out", default=".", help="output directory (created if missing)")
        p.add_argument("--seed", type=int, default=None, help="override sampling.seed")
        p.add_argument("--threads", type=int, default=1, help="worker processes; 0 = auto")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            if args.seed < 0:
                raise ConfigError("--seed must be a nonnegative integer")
            cfg = ScenarioConfig(**{**cfg.__dict__, "seed": args.seed})
        out_dir = Path(args.out if args.out != "." or cfg.output_dir is None else cfg.output_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        return _COMMANDS[args.command](cfg, out_dir, args.threads)
    except HomsrError as exc:
        print(f"homsr: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
