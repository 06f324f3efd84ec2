"""
Centralized configuration and paths for the RF-FSO secrecy toolkit.

All file paths, environment overrides and numerical policy constants are
defined here for consistency.
"""

import os
from pathlib import Path

# Project root directory
PROJECT_ROOT = Path(__file__).resolve().parent.parent

# Directory paths
OUTPUT_DIR = PROJECT_ROOT / "output"
SCENARIO_DIR = PROJECT_ROOT / "scenarios"

# Environment variable overrides
def get_output_dir() -> Path:
    """Get CSV output directory from env or default."""
    return Path(os.getenv("RFFSO_OUTPUT_DIR", str(OUTPUT_DIR)))

# Monte Carlo defaults
DEFAULT_SEED = 20240601
DEFAULT_TRIALS = 100_000  # realizations per point
MIN_TRIALS = 1_000  # below this, standard errors are not reported
MC_BLOCK_TRIALS = 4_096  # trials per counter-seeded random block
DEFAULT_BATCH = 65_536  # trials per accumulation batch (rounded up to whole blocks)
DEFAULT_WORKERS = 1

def get_default_seed() -> int:
    """Get Monte Carlo seed from env or default."""
    return int(os.getenv("RFFSO_SEED", str(DEFAULT_SEED)))

def get_default_trials() -> int:
    """Get Monte Carlo trial count from env or default."""
    return int(os.getenv("RFFSO_TRIALS", str(DEFAULT_TRIALS)))

def get_workers() -> int:
    """Get number of sweep/sampling workers from env or default."""
    return max(1, int(os.getenv("RFFSO_WORKERS", str(DEFAULT_WORKERS))))

def get_log_level() -> str:
    """Get logging level name from env or default."""
    return os.getenv("RFFSO_LOG_LEVEL", "INFO").upper()

# Special-function kernel policy
HYP_MAX_ITERS = 10_000
G_SERIES_RTOL = 1e-16  # per-term relative contribution counted as negligible
G_SERIES_PATIENCE = 20  # consecutive negligible terms before a family stops
G_SERIES_MAX_TERMS = 10_000  # per pole family
G_CONDITIONING_LIMIT = 1e6  # largest term / |sum| accepted from a residue series
CONTOUR_CUTOFF = 1e-18  # integrand magnitude, relative to its peak, where the contour is cut
CONTOUR_RTOL = 1e-12

# RF i-series truncation
RF_TAIL_RTOL = 1e-12
RF_I_MAX = 200

# Quadrature oracles
QUAD_TOL = 1e-7

# CSV header columns (sweep runner output)
CSV_COLUMNS = [
    "sweep_var",
    "sweep_value",
    "sop_closed",
    "sop_asym",
    "sop_quad",
    "sop_mc",
    "sop_mc_se",
    "spsc_closed",
    "spsc_asym",
    "spsc_mc",
    "spsc_mc_se",
    "ip_closed",
    "ip_asym",
    "ip_mc",
    "ip_mc_se",
    "note",
]
