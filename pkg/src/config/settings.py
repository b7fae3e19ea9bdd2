import logging
import os

logger = logging.getLogger(__name__)

VERSION = "0.1.0"
FORMULA_MAP_REVISION = "fm-2"

PRIME_CACHE_DIR = os.getenv("PRIME_CACHE_DIR", ".prime_cache")
# Windows go through the cache only when a directory was chosen
USE_PRIME_CACHE = "PRIME_CACHE_DIR" in os.environ
GOLDEN_DIR = os.getenv("GOLDEN_DIR", "golden")

WORKERS = int(os.getenv("WORKERS", str(os.cpu_count() or 1)))
CHUNK_SIZE = int(os.getenv("CHUNK_SIZE", "64"))

# Truncation defaults for products and series
P_MAX = int(os.getenv("P_MAX", "1000000"))
S_MAX = int(os.getenv("S_MAX", "10000"))

NU_KAPPA = float(os.getenv("NU_KAPPA", "4.42"))
SEED = int(os.getenv("SEED", "42"))
A_DISPLAY = float(os.getenv("A_DISPLAY", "3"))

LOG_LEVEL = os.getenv("LOG_LEVEL", "WARNING")


def validate_config() -> bool:
    """Validate the environment-provided settings"""
    problems = []
    if WORKERS < 1:
        problems.append(f"WORKERS must be >= 1, got {WORKERS}")
    if CHUNK_SIZE < 1:
        problems.append(f"CHUNK_SIZE must be >= 1, got {CHUNK_SIZE}")
    if P_MAX < 3:
        problems.append(f"P_MAX must be >= 3, got {P_MAX}")
    if S_MAX < 1:
        problems.append(f"S_MAX must be >= 1, got {S_MAX}")
    if NU_KAPPA <= 1:
        problems.append(f"NU_KAPPA must be > 1, got {NU_KAPPA}")
    if not isinstance(logging.getLevelName(LOG_LEVEL.upper()), int):
        problems.append(f"Unknown LOG_LEVEL: {LOG_LEVEL}")

    for problem in problems:
        logger.error(problem)
    return not problems


if __name__ == "__main__":
    if validate_config():
        print("Configuration is valid")
    else:
        print("Configuration validation failed")
