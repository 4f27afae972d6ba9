"""Runtime knobs read from the environment."""

import os

DEFAULT_PRECISION_BITS = 256
DEFAULT_SIEVE_LIMIT = 10**8
# Indeterminate comparisons are retried at doubled precision up to this cap.
MAX_PRECISION_BITS = 8192


def _env_int(name: str, default: int) -> int:
    raw = os.environ.get(name)
    if raw is None or raw.strip() == "":
        return default
    value = int(raw.replace("_", ""))
    if value <= 0:
        raise ValueError(f"{name} must be positive, got {raw!r}")
    return value


def precision_bits() -> int:
    return _env_int("PPL_PRECISION_BITS", DEFAULT_PRECISION_BITS)


def sieve_limit() -> int:
    return _env_int("PPL_SIEVE_LIMIT", DEFAULT_SIEVE_LIMIT)
