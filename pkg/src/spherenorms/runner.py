"""Sweep driver: computes the requested functionals for every degree in a
config, writes deterministic CSV results plus a timing sidecar, and reshapes
result CSVs into plot-ready series.

Determinism contract: the results CSV depends only on the config (hash, seed
included); wall times live in a separate timings file so reruns are
byte-identical.  Jobs are independent per (L, functional) and may run in a
process pool; rows are sorted by key before writing, so worker count does not
affect output.
"""

from __future__ import annotations

import concurrent.futures
import csv
import math
import time
from dataclasses import dataclass

import numpy as np

from .concentration import default_rule, lambda_min, sup_norm_ratios, worst_case_lp
from .basis import BasisSpec, basis_dim
from .config import ExperimentConfig, config_hash, parse_config, serialize_config
from .errors import ConfigError
from .functionals import (
    ainfty_check,
    density_profile,
    doubling_constant,
    harmonic_infimum,
    regularize_set,
    relative_density,
    rhinfty_check,
)
from .geometry import candidate_centers
from .measures import Lebesgue, measure_from_dict
from .quadrature import build_quadrature
from .sets import CapUnion, min_feature_scale, realize_family

__all__ = ["ResultRow", "run_experiment", "write_results", "read_results", "plotdata", "RESULT_COLUMNS"]

SCHEMA = "1"
RESULT_COLUMNS = ["schema", "config_hash", "L", "functional", "value", "witness"]
TIMING_COLUMNS = ["schema", "config_hash", "L", "functional", "wall_time_s"]


@dataclass(frozen=True)
class ResultRow:
    schema: str
    config_hash: str
    L: int
    functional: str
    value: float
    witness: str
    wall_time_s: float


def _fmt_point(p: np.ndarray) -> str:
    return "(" + " ".join(f"{x:.6f}" for x in p) + ")"


def _eval_grid(cfg: ExperimentConfig, E, L: int) -> np.ndarray:
    per_circle = cfg.resolution_factor * L
    scale = min_feature_scale(E)
    per_circle = max(per_circle, int(math.ceil(2.0 * math.pi / (scale / 2.0))))
    return candidate_centers(cfg.d, L, per_circle)


def _compute(cfg: ExperimentConfig, L: int, fn) -> tuple[float, str]:
    E = realize_family(cfg.family, cfg.d, L)
    mu = cfg.measure
    if fn.name == "eigen":
        rule = default_rule(E, cfg.d, L, oversample=cfg.oversample, max_nodes=cfg.max_nodes)
        rep = lambda_min(E, mu, L, rule=rule)
        wit = f"n_masked={rep.diagnostics.get('n_masked', 'na')};residual={rep.diagnostics['residual']:.3e}"
        return rep.lambda_min, wit
    if fn.name == "density":
        rep = relative_density(E, mu, L, r=float(fn.params["r"]), resolution=cfg.resolution_factor * L, d=cfg.d)
        return rep.rho_hat, f"argmin={_fmt_point(rep.argmin_center)}"
    if fn.name == "harmonic":
        rep = harmonic_infimum(E, L, resolution=cfg.resolution_factor * L, d=cfg.d)
        return rep.delta_hat, f"argmin={_fmt_point(rep.argmin_center)}"
    if fn.name == "pnorm":
        rep = worst_case_lp(
            E, mu, L, p=float(fn.params["p"]), restarts=int(fn.params["restarts"]),
            seed=cfg.seed, d=cfg.d,
        )
        return rep.value, f"restarts={len(rep.restarts)};spread={max(rep.restarts) - min(rep.restarts):.3e}"
    if fn.name == "supnorm":
        spec = BasisSpec(cfg.d, L)
        rng = np.random.default_rng([cfg.seed, L])
        grid = _eval_grid(cfg, E, L)
        weight = fn.params.get("weight")
        w = measure_from_dict(weight) if weight is not None else None
        C = rng.standard_normal((basis_dim(spec), int(fn.params["samples"])))
        worst = float(sup_norm_ratios(C, E, grid, weight=w, spec=spec).min())
        return worst, f"samples={fn.params['samples']};grid={grid.shape[0]}"
    if fn.name == "weights":
        drep = doubling_constant(mu, fn.params["scales"], d=cfg.d, seed=int(fn.params["seed"]))
        rrep = rhinfty_check(mu, cfg.d, seed=int(fn.params["seed"]), n_caps=int(fn.params["n_caps"]))
        arep = ainfty_check(mu, cfg.d, seed=int(fn.params["seed"]), n_caps=int(fn.params["n_caps"]))
        wit = (
            f"gamma={drep.doubling_exponent:.4f};rh_C={rrep.rhinfty[0]:.4f};"
            f"ainf_B={arep.ainfty[0]:.4f}@beta={arep.ainfty[1]}"
        )
        return drep.doubling_constant, wit
    if fn.name == "regularize":
        eps = float(fn.params["eps"])
        delta = fn.params.get("delta")
        star = regularize_set(E, L, eps=eps, delta=(None if delta is None else float(delta)),
                              d=cfg.d, default_delta_r=float(fn.params["r"]))
        r = float(fn.params["r"])
        rep = density_profile(star, Lebesgue(), L, num_radius=r / L, den_radius=r / (2 * L), d=cfg.d)
        n_caps = star.centers.shape[0] if isinstance(star, CapUnion) else 0
        return rep.rho_hat, f"good_caps={n_caps};eps={eps}"
    raise ConfigError(f"unknown functional {fn.name!r}")


def _job(args):
    text, L, fn_index = args
    cfg = parse_config(text)
    fn = cfg.functionals[fn_index]
    t0 = time.perf_counter()
    value, witness = _compute(cfg, L, fn)
    elapsed = time.perf_counter() - t0
    return ResultRow(SCHEMA, config_hash(cfg), L, fn.tag, float(value), witness, elapsed)


def run_experiment(cfg: ExperimentConfig, output_dir, workers: int = 1, verbose: bool = False):
    """Run every (L, functional) job, write results.csv and timings.csv, and
    return the sorted rows."""
    from pathlib import Path

    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    text = serialize_config(cfg)
    jobs = [(text, L, i) for L in cfg.L_list for i in range(len(cfg.functionals))]
    if workers > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_job, jobs))
    else:
        rows = []
        for j in jobs:
            row = _job(j)
            if verbose:
                print(f"  L={row.L:4d} {row.functional:12s} value={row.value!r} ({row.wall_time_s:.1f}s)")
            rows.append(row)
    rows.sort(key=lambda r: (r.L, r.functional))
    results_path = out / "results.csv"
    timings_path = out / "timings.csv"
    write_results(rows, results_path)
    with open(timings_path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(TIMING_COLUMNS)
        for r in rows:
            w.writerow([r.schema, r.config_hash, r.L, r.functional, f"{r.wall_time_s:.3f}"])
    return results_path, timings_path, rows


def write_results(rows, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(RESULT_COLUMNS)
        for r in rows:
            w.writerow([r.schema, r.config_hash, r.L, r.functional, repr(r.value), r.witness])


def read_results(path) -> list[dict]:
    with open(path, "r", newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != RESULT_COLUMNS:
            raise ValueError(
                f"results schema mismatch: expected columns {RESULT_COLUMNS}, got {reader.fieldnames}"
            )
        return [dict(row) for row in reader]


def plotdata(csv_paths, kind: str, out_path, labels=None):
    """Pivot result CSVs into one plot-ready file: x = L, one value column per series."""
    series = []
    for i, path in enumerate(csv_paths):
        rows = [r for r in read_results(path) if r["functional"] == kind]
        if not rows:
            raise ValueError(f"{path}: no rows for functional {kind!r}")
        name = labels[i] if labels and i < len(labels) else rows[0]["config_hash"]
        series.append((name, {int(r["L"]): r["value"] for r in rows}))
    all_L = sorted({L for _, data in series for L in data})
    with open(out_path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["L"] + [name for name, _ in series])
        for L in all_L:
            w.writerow([L] + [data.get(L, "") for _, data in series])
    return out_path
