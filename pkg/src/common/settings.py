import os
from dataclasses import dataclass


def _int_from_env(name: str, default: int, minimum: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = int(raw)
    except ValueError as e:
        raise ValueError(f"{name} must be an integer, got {raw!r}") from e
    if value < minimum:
        raise ValueError(f"{name} must be >= {minimum}, got {value}")
    return value


@dataclass(frozen=True)
class Settings:
    """Runtime configuration read from the environment (see .env.example)"""
    ref_grid: int = 2 ** 17
    bvp_max_n: int = 2 ** 10
    workers: int = 2
    log_level: str = "INFO"
    sup_samples: int = 1001

    @classmethod
    def from_env(cls) -> "Settings":
        log_level = os.getenv("FCGRAM_LOG_LEVEL", cls.log_level).upper()
        if log_level not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
            raise ValueError(f"FCGRAM_LOG_LEVEL must be a logging level name, got {log_level!r}")

        return cls(
            ref_grid=_int_from_env("FCGRAM_REF_GRID", cls.ref_grid, 2),
            bvp_max_n=_int_from_env("FCGRAM_BVP_MAX_N", cls.bvp_max_n, 4),
            workers=_int_from_env("FCGRAM_WORKERS", cls.workers, 1),
            log_level=log_level,
            sup_samples=_int_from_env("FCGRAM_SUP_SAMPLES", cls.sup_samples, 1000),
        )
