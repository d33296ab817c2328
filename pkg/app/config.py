"""
Tolerances and runtime settings

Numerical tolerances live here so every service reads the same knobs.
Environment variables (optionally from a .env file) override the defaults.
"""
import os
import logging
from typing import Optional

from dotenv import load_dotenv

load_dotenv()

logger = logging.getLogger(__name__)

# Value-type invariants
NORM_TOL = 1e-12
HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10

# Verdicts
VERDICT_TOL = 1e-8
SATURATION_TOL = 1e-6      # relative (potential - bound) / bound
CLASSIFY_TOL = 1e-6        # purity / Hilbert-Schmidt deviation
PRINTED_DATA_TOL = 1e-4      # 6-decimal printed data
IC_RANK_TOL = 1e-9         # relative singular value cutoff
LOAD_NORM_TOL = 1e-6

# Optimizer
OPTIMIZER_ACCEPT_GAP = 5e-4
DEFAULT_RESTARTS = 32
DEFAULT_MAX_ITERATIONS = 5000
DEFAULT_GRADIENT_TOL = 1e-10


def _env_float(name: str, default: float) -> float:
    raw = os.getenv(name, "").strip()
    if not raw:
        return default
    try:
        return float(raw)
    except ValueError:
        logger.warning(f"Ignoring non-numeric {name}={raw!r}, using {default}")
        return default


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(name, "").strip()
    if not raw:
        return default
    try:
        return int(raw)
    except ValueError:
        logger.warning(f"Ignoring non-integer {name}={raw!r}, using {default}")
        return default


class Settings:
    """Environment-aware accessors for the tunable defaults"""

    @staticmethod
    def saturation_tol() -> float:
        return _env_float("QTIGHT_SATURATION_TOL", SATURATION_TOL)

    @staticmethod
    def classify_tol() -> float:
        return _env_float("QTIGHT_CLASSIFY_TOL", CLASSIFY_TOL)

    @staticmethod
    def load_norm_tol() -> float:
        return _env_float("QTIGHT_LOAD_NORM_TOL", LOAD_NORM_TOL)

    @staticmethod
    def restarts() -> int:
        return _env_int("QTIGHT_RESTARTS", DEFAULT_RESTARTS)

    @staticmethod
    def max_iterations() -> int:
        return _env_int("QTIGHT_MAX_ITERATIONS", DEFAULT_MAX_ITERATIONS)

    @staticmethod
    def workers() -> int:
        return max(1, _env_int("QTIGHT_WORKERS", min(8, os.cpu_count() or 1)))

    @staticmethod
    def log_level() -> str:
        return os.getenv("QTIGHT_LOG_LEVEL", "INFO").upper()

    @staticmethod
    def log_file() -> Optional[str]:
        return os.getenv("QTIGHT_LOG_FILE") or None

    @staticmethod
    def data_dir() -> str:
        """Directory holding the embedded catalog fixtures"""
        default = os.path.join(os.path.dirname(__file__), "data")
        return os.getenv("QTIGHT_DATA_DIR") or default
