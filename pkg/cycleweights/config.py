# cycleweights/config.py
from pydantic_settings import BaseSettings, SettingsConfigDict
from dotenv import load_dotenv
import os

load_dotenv()


class Settings(BaseSettings):
    model_config = SettingsConfigDict(env_file=".env", env_prefix="CW_", extra="ignore")

    # Exact oracle caps
    ENUMERATION_CAP: int = 60
    SERIES_CAP: int = 200

    CACHE_DIR: str = os.getenv("CW_CACHE_DIR", ".cache/htables")

    # Asymptotics
    TRUNCATION_KV: float = 60.0
    SADDLE_MAX_ITER: int = 200
    SADDLE_RTOL: float = 1e-12
    XI_OFFSET: float = 0.1
    MONOTONICITY_GRID: int = 1000
    BOUNDARY_CONSTANT: float = 0.5

    # Sampler
    SAMPLER_DEBUG: bool = False
    SAMPLER_CHUNK: int = 64
    PROGRESS_EVERY: int = 1000

    # Verification
    REFERENCE_SEED: int = 20240917
    TOL_MEAN_REL: float = 0.15
    TOL_DISPERSION: float = 0.2
    TOL_TV: float = 0.08
    TOL_CORR: float = 0.1
    TOL_KS_GUMBEL: float = 0.1
    TOL_KS_JOINT: float = 0.12
    TOL_BN_FREQ: float = 0.05
    BN_BOUND_FACTOR: float = 3.0
    TOL_PROFILE_REL: float = 0.10
    TOL_PROFILE_ABS: float = 0.05

    LOG_LEVEL: str = "INFO"


settings = Settings()
