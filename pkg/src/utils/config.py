# src/utils/config.py
import os
from functools import lru_cache
from typing import Optional

from dotenv import load_dotenv
from pydantic import BaseModel, Field

# load .env early
load_dotenv()


# ===================== Env helpers =====================

def _env_str(name: str, default: str) -> str:
    v = os.getenv(name)
    return v.strip() if v and v.strip() else default


def _env_int(name: str, default: Optional[int]) -> Optional[int]:
    v = os.getenv(name)
    if v is None or not v.strip():
        return default
    try:
        return int(v.strip(), 0)
    except ValueError:
        return default


def _env_bool(name: str, default: bool = False) -> bool:
    v = os.getenv(name)
    if v is None:
        return default
    return v.strip().lower() in {"1", "true", "yes", "on"}


# ===================== Settings =====================

class Settings(BaseModel):
    seed: Optional[int] = None
    log_level: str = "WARNING"
    debug: bool = False
    threads: int = Field(default=1, ge=1)
    oracle_max_cyc: int = Field(default=9, ge=1)
    oracle_max_rooted: int = Field(default=8, ge=1)
    oracle_max_silh: int = Field(default=12, ge=6)
    exact_table_max: int = Field(default=10000, ge=16)

    def master_seed(self, fallback: int) -> int:
        """MODGROUP_SEED wins over any seed coming from a config file or flag."""
        return self.seed if self.seed is not None else fallback


def load_settings() -> Settings:
    return Settings(
        seed=_env_int("MODGROUP_SEED", None),
        log_level=_env_str("MODGROUP_LOG_LEVEL", "WARNING").upper(),
        debug=_env_bool("MODGROUP_DEBUG", False),
        threads=_env_int("MODGROUP_THREADS", 1) or 1,
        oracle_max_cyc=_env_int("MODGROUP_ORACLE_MAX_CYC", 9) or 9,
        oracle_max_rooted=_env_int("MODGROUP_ORACLE_MAX_ROOTED", 8) or 8,
        oracle_max_silh=_env_int("MODGROUP_ORACLE_MAX_SILH", 12) or 12,
        exact_table_max=_env_int("MODGROUP_EXACT_TABLE_MAX", 10000) or 10000,
    )


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    return load_settings()
