import os

from dotenv import load_dotenv

load_dotenv()


def _env_float(name: str, default: float) -> float:
    value = os.getenv(name)
    return float(value) if value not in (None, "") else default


def _env_int(name: str, default: int) -> int:
    value = os.getenv(name)
    return int(value) if value not in (None, "") else default


def max_regularity_terms() -> int:
    """Cap on negatively counted terms for the regularity enumeration."""
    return _env_int("WEAVER_MAX_REG_N", 20)


DEFAULT_SSE_TOLERANCE = _env_float("WEAVER_SSE_TOL", 1e-13)
DEFAULT_MAX_ITERATIONS = _env_int("WEAVER_MAX_ITER", 10000)
WORKER_COUNT = _env_int("WEAVER_WORKERS", 2)
MAX_INPUT_BYTES = _env_int("WEAVER_MAX_INPUT_BYTES", 50 * 1024 * 1024)

# Numeric contract shared by every module
SIMPLEX_TOLERANCE = 1e-12
SINGULAR_THRESHOLD = 1e-300
ZERO_COORDINATE_FILL = 1e-6
CO_THICKNESS_RTOL = 1e-9
