"""
Parameter sweeps over a scenario, written as CSV rows in grid order.

Exit status: 0 success, 1 configuration error (no file written),
2 numeric failure on at least half of the grid points.
"""

from __future__ import annotations

import csv
import logging
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from tqdm import tqdm

from .config import CSV_COLUMNS, get_workers
from .errors import ConfigError, SecrecyError
from .metrics import (
    ScenarioConfig,
    SecrecyResult,
    ip,
    ip_asymptotic,
    sop_exact_quadrature,
    sop_lower,
    sop_lower_asymptotic,
    spsc,
    spsc_asymptotic,
)
from .montecarlo import McConfig, estimate
from .presets import PRESETS, Preset, get_preset
from .scenario import db_to_linear, load_scenario

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERIC = 2

SWEEP_VARIABLES = ("phi_r_db", "u_d_db", "u_e_db", "alpha", "kappa", "mu", "x_shadow", "eps", "a", "b")
METHODS = ("closed", "asymptotic", "quadrature", "mc")

Row = Dict[str, str]


@dataclass(frozen=True)
class SweepSpec:
    variable: str
    grid: Tuple[float, ...]
    methods: Tuple[str, ...]

    def __post_init__(self) -> None:
        if self.variable not in SWEEP_VARIABLES:
            raise ConfigError(f"unknown sweep variable {self.variable!r}; expected one of {', '.join(SWEEP_VARIABLES)}")
        if not self.methods:
            raise ConfigError("methods list is empty")
        unknown = [m for m in self.methods if m not in METHODS]
        if unknown:
            raise ConfigError(f"unknown method {unknown[0]!r}; expected some of {', '.join(METHODS)}")
        if not self.grid:
            raise ConfigError("sweep grid is empty")
        if any(b <= a for a, b in zip(self.grid, self.grid[1:])):
            raise ConfigError("sweep grid must be strictly increasing")

    @classmethod
    def parse(cls, text: str, methods: Union[str, Sequence[str]]) -> "SweepSpec":
        """Build from `var=start:stop:steps` and a comma list (or sequence) of methods."""
        if isinstance(methods, str):
            methods = [m.strip() for m in methods.split(",") if m.strip()]
        variable, sep, bounds = text.partition("=")
        parts = bounds.split(":")
        if not sep or len(parts) != 3:
            raise ConfigError(f"sweep must look like var=start:stop:steps, got {text!r}")
        try:
            start, stop, steps = float(parts[0]), float(parts[1]), int(parts[2])
        except ValueError as exc:
            raise ConfigError(f"bad sweep bounds in {text!r}: {exc}") from exc
        if steps < 1:
            raise ConfigError(f"sweep needs at least one step, got {steps}")
        grid = tuple(float(v) for v in np.linspace(start, stop, steps))
        return cls(variable=variable.strip(), grid=grid, methods=tuple(methods))


def apply_sweep_value(cfg: ScenarioConfig, variable: str, value: float) -> ScenarioConfig:
    """Operating point with one parameter replaced; dB variables are converted here.

    Turbulence and pointing parameters (a, b, eps) change both FSO links and
    leave their electrical SNRs untouched.
    """
    if variable == "phi_r_db":
        return replace(cfg, rf=cfg.rf.with_phi(db_to_linear(value)))
    if variable == "u_d_db":
        return replace(cfg, fso_d=cfg.fso_d.with_u(db_to_linear(value)))
    if variable == "u_e_db":
        return replace(cfg, fso_e=cfg.fso_e.with_u(db_to_linear(value)))
    if variable in ("alpha", "kappa", "mu", "x_shadow"):
        return replace(cfg, rf=replace(cfg.rf, **{variable: value}))
    if variable in ("eps", "a", "b"):
        return replace(
            cfg,
            fso_d=replace(cfg.fso_d, **{variable: value}),
            fso_e=replace(cfg.fso_e, **{variable: value}),
        )
    raise ConfigError(f"unknown sweep variable {variable!r}")


def _fmt(value: float) -> str:
    return repr(float(value))


def evaluate_point(cfg: ScenarioConfig, variable: str, value: float, methods: Sequence[str],
                   mc: Optional[McConfig] = None) -> Tuple[Row, bool]:
    """One CSV row; failed cells stay empty and are explained in `note`.

    Returns the row and whether any requested cell failed.
    """
    row: Row = {column: "" for column in CSV_COLUMNS}
    row["sweep_var"] = variable
    row["sweep_value"] = _fmt(value)
    notes: List[str] = []
    failed = False

    try:
        point = apply_sweep_value(cfg, variable, value)
    except SecrecyError as exc:
        row["note"] = f"invalid point: {exc}"
        return row, True

    def fill(column: str, compute) -> None:
        nonlocal failed
        try:
            result: SecrecyResult = compute(point)
        except SecrecyError as exc:
            failed = True
            notes.append(f"{column}: {exc}")
            logger.warning("%s=%s: %s failed: %s", variable, value, column, exc)
            return
        row[column] = _fmt(result.value)
        if not result.in_range:
            notes.append(f"{column} outside [0,1]")

    if "closed" in methods:
        fill("sop_closed", sop_lower)
        fill("spsc_closed", spsc)
        fill("ip_closed", ip)
    if "asymptotic" in methods:
        fill("sop_asym", sop_lower_asymptotic)
        fill("spsc_asym", spsc_asymptotic)
        fill("ip_asym", ip_asymptotic)
    if "quadrature" in methods:
        fill("sop_quad", sop_exact_quadrature)
    if "mc" in methods:
        try:
            est = estimate(point, mc or McConfig())
        except SecrecyError as exc:
            failed = True
            notes.append(f"mc: {exc}")
            logger.warning("%s=%s: monte carlo failed: %s", variable, value, exc)
        else:
            # the bound-form event, comparable to sop_closed
            row["sop_mc"], row["sop_mc_se"] = _fmt(est.sop_lower_hat), _fmt(est.se_sop_lower)
            row["spsc_mc"], row["spsc_mc_se"] = _fmt(est.spsc_hat), _fmt(est.se_spsc)
            row["ip_mc"], row["ip_mc_se"] = _fmt(est.ip_hat), _fmt(est.se_ip)
            if est.degenerate:
                notes.append(f"mc degenerate: {','.join(est.degenerate)}")
    row["note"] = "; ".join(notes)
    return row, failed


def _evaluate_task(args) -> Tuple[Row, bool]:
    return evaluate_point(*args)


def run_sweep(cfg: ScenarioConfig, sweep: SweepSpec, mc: Optional[McConfig] = None,
              workers: Optional[int] = None) -> Tuple[List[Row], int]:
    """Evaluate every grid point; rows come back in grid order with the failure count."""
    workers = workers or get_workers()
    tasks = [(cfg, sweep.variable, value, sweep.methods, mc) for value in sweep.grid]
    rows: List[Optional[Row]] = [None] * len(tasks)
    failures = 0
    progress = dict(total=len(tasks), desc=f"sweep {sweep.variable}", unit="pt", disable=None)
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = {pool.submit(_evaluate_task, task): index for index, task in enumerate(tasks)}
            for future in tqdm(as_completed(futures), **progress):
                rows[futures[future]], failed = future.result()
                failures += failed
    else:
        for index, task in enumerate(tqdm(tasks, **progress)):
            rows[index], failed = _evaluate_task(task)
            failures += failed
    return rows, failures


def write_csv(rows: Sequence[Row], out_path: Union[str, Path]) -> None:
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    with open(out_path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for row in rows:
            writer.writerow([row[column] for column in CSV_COLUMNS])


def _exit_status(failures: int, points: int) -> int:
    if points and 2 * failures >= points:
        logger.error("numeric failure on %d of %d points", failures, points)
        return EXIT_NUMERIC
    return EXIT_OK


def _run(cfg: ScenarioConfig, sweep: SweepSpec, out_path: Union[str, Path], mc: Optional[McConfig],
         workers: Optional[int]) -> int:
    logger.info("sweeping %s over %d points (%s)", sweep.variable, len(sweep.grid), ",".join(sweep.methods))
    rows, failures = run_sweep(cfg, sweep, mc, workers)
    write_csv(rows, out_path)
    logger.info("wrote %s", out_path)
    return _exit_status(failures, len(rows))


def run_scenario(config_path: Union[str, Path], sweep: SweepSpec, out_path: Union[str, Path],
                 seed: Optional[int] = None, trials: Optional[int] = None,
                 workers: Optional[int] = None) -> int:
    """Sweep a scenario file and write the CSV; returns the exit status."""
    workers = workers or get_workers()
    try:
        scenario = load_scenario(config_path)
        cfg = scenario.to_config()
        mc = scenario.mc_config(n_trials=trials, seed=seed) if "mc" in sweep.methods else None
    except ConfigError as exc:
        logger.error("%s", exc)
        return EXIT_CONFIG
    return _run(cfg, sweep, out_path, mc, workers)


def run_preset(name: str, out_path: Union[str, Path], methods: Optional[Sequence[str]] = None,
               seed: Optional[int] = None, trials: Optional[int] = None,
               workers: Optional[int] = None) -> int:
    """Sweep a built-in preset; `methods` overrides the preset's own list."""
    workers = workers or get_workers()
    try:
        preset = get_preset(name)
    except KeyError as exc:
        logger.error("%s", exc.args[0])
        return EXIT_CONFIG
    try:
        sweep = SweepSpec.parse(preset.sweep, methods if methods is not None else preset.methods)
        scenario = preset.scenario()
        cfg = scenario.to_config()
        mc = scenario.mc_config(n_trials=trials, seed=seed) if "mc" in sweep.methods else None
    except ConfigError as exc:
        logger.error("%s", exc)
        return EXIT_CONFIG
    return _run(cfg, sweep, out_path, mc, workers)


def list_presets() -> List[Preset]:
    return list(PRESETS.values())
