"""
Event-level Monte Carlo oracle for the secrecy metrics.

Trials are drawn in fixed blocks of MC_BLOCK_TRIALS; block k uses its own
Philox stream keyed by (seed, k), so an estimate depends only on
(seed, n_trials) and never on the batch size or worker count. Blocks
contribute integer event counts only.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence, Tuple

import numpy as np
from scipy import interpolate, stats

from .config import DEFAULT_BATCH, DEFAULT_SEED, DEFAULT_TRIALS, MC_BLOCK_TRIALS, MIN_TRIALS
from .errors import DomainError
from .fso_channel import fso_sample
from .metrics import Method, ScenarioConfig, SecrecyResult
from .rf_channel import rf_sample

logger = logging.getLogger(__name__)

EVENTS = ("sop", "sop_lower", "spsc", "ip")


@dataclass(frozen=True)
class McConfig:
    n_trials: int = DEFAULT_TRIALS
    seed: int = DEFAULT_SEED
    batch: int = DEFAULT_BATCH
    workers: int = 1

    def __post_init__(self) -> None:
        if self.n_trials < MIN_TRIALS:
            raise DomainError(
                f"n_trials must be >= {MIN_TRIALS} for standard errors to be reported, got {self.n_trials}"
            )
        if not 0 <= self.seed < 2 ** 64:
            raise DomainError(f"seed must be an unsigned 64-bit integer, got {self.seed}")
        if self.batch < 1:
            raise DomainError(f"batch must be >= 1, got {self.batch}")
        if self.workers < 1:
            raise DomainError(f"workers must be >= 1, got {self.workers}")


@dataclass(frozen=True)
class McEstimate:
    """Event frequencies with binomial standard errors.

    sop_hat is the exact event T_SD < T_c and sop_lower_hat the bound event
    {gamma_r <= phi - 1} or {gamma_d < phi gamma_e}. `degenerate` names the
    estimates whose count was 0 or n_trials (zero reported variance).
    """

    n_trials: int
    sop_hat: float
    sop_lower_hat: float
    spsc_hat: float
    ip_hat: float
    se_sop: float
    se_sop_lower: float
    se_spsc: float
    se_ip: float
    degenerate: Tuple[str, ...] = ()

    def as_result(self, metric: str) -> SecrecyResult:
        if metric not in EVENTS:
            raise DomainError(f"unknown metric {metric!r}; expected one of {', '.join(EVENTS)}")
        return SecrecyResult(
            value=getattr(self, f"{metric}_hat"),
            method=Method.MONTE_CARLO,
            error_estimate=getattr(self, f"se_{metric}"),
            metric=metric,
        )


def block_rng(seed: int, block: int) -> np.random.Generator:
    """Random stream of trial block `block`."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(block,))))


def event_counts(gamma_r: np.ndarray, gamma_d: np.ndarray, gamma_e: np.ndarray, target_rate: float) -> np.ndarray:
    """Counts of the (sop, sop_lower, spsc, ip) events over a set of trials."""
    phi = 2.0 ** (2.0 * target_rate)
    half_log2 = 0.5 / math.log(2.0)
    rate_sr = half_log2 * np.log1p(gamma_r)
    rate_rd = np.maximum(half_log2 * (np.log1p(gamma_d) - np.log1p(gamma_e)), 0.0)
    rate_sd = np.minimum(rate_sr, rate_rd)
    events = (
        rate_sd < target_rate,
        (gamma_r <= phi - 1.0) | (gamma_d < phi * gamma_e),
        gamma_d > gamma_e,
        gamma_d < gamma_e,
    )
    return np.array([np.count_nonzero(e) for e in events], dtype=np.int64)


def _block_sizes(n_trials: int) -> Sequence[int]:
    full, rest = divmod(n_trials, MC_BLOCK_TRIALS)
    return [MC_BLOCK_TRIALS] * full + ([rest] if rest else [])


def _run_block(cfg: ScenarioConfig, seed: int, block: int, size: int) -> np.ndarray:
    rng = block_rng(seed, block)
    gamma_r = rf_sample(cfg.rf, rng, size)
    gamma_d = fso_sample(cfg.fso_d, rng, size)
    gamma_e = fso_sample(cfg.fso_e, rng, size)
    return event_counts(gamma_r, gamma_d, gamma_e, cfg.target_rate)


def estimate(cfg: ScenarioConfig, mc: McConfig) -> McEstimate:
    """Monte Carlo estimate of every secrecy event at one operating point."""
    sizes = _block_sizes(mc.n_trials)
    per_batch = max(1, -(-mc.batch // MC_BLOCK_TRIALS))
    batches = [range(start, min(start + per_batch, len(sizes))) for start in range(0, len(sizes), per_batch)]

    def run_batch(blocks: range) -> np.ndarray:
        counts = np.zeros(len(EVENTS), dtype=np.int64)
        for k in blocks:
            counts += _run_block(cfg, mc.seed, k, sizes[k])
        return counts

    if mc.workers > 1 and len(batches) > 1:
        with ThreadPoolExecutor(max_workers=mc.workers) as pool:
            partials = list(pool.map(run_batch, batches))
    else:
        partials = [run_batch(b) for b in batches]
    counts = np.sum(partials, axis=0, dtype=np.int64)
    logger.debug("mc: %d trials in %d blocks, counts %s", mc.n_trials, len(sizes), counts.tolist())

    n = mc.n_trials
    hats = counts / n
    ses = np.sqrt(hats * (1.0 - hats) / n)
    degenerate = tuple(name for name, c in zip(EVENTS, counts) if c == 0 or c == n)
    values = {}
    for name, p, se in zip(EVENTS, hats, ses):
        values[f"{name}_hat"] = float(p)
        values[f"se_{name}"] = float(se)
    return McEstimate(n_trials=n, degenerate=degenerate, **values)


def ks_against(cdf: Callable[[float], float], samples: np.ndarray, n_grid: int = 400):
    """Kolmogorov-Smirnov test of samples against a scalar closed-form CDF.

    The CDF is tabulated on a log grid spanning the samples and interpolated
    with a monotone PCHIP, so the closed form is called n_grid times only.
    """
    samples = np.asarray(samples, dtype=float)
    if samples.size == 0 or np.any(~(samples > 0.0)):
        raise DomainError("ks_against requires positive samples")
    log_grid = np.linspace(math.log(samples.min()), math.log(samples.max()), n_grid)
    table = np.clip([cdf(math.exp(u)) for u in log_grid], 0.0, 1.0)
    table = np.maximum.accumulate(table)
    spline = interpolate.PchipInterpolator(log_grid, table)

    def tabulated(x: np.ndarray) -> np.ndarray:
        u = np.log(np.clip(x, math.exp(log_grid[0]), math.exp(log_grid[-1])))
        return np.clip(spline(u), 0.0, 1.0)

    return stats.kstest(samples, tabulated)
