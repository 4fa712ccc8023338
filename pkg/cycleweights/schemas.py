# cycleweights/schemas.py
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from typing import Any, Dict, List, Optional, Tuple
from datetime import datetime, timezone
from enum import Enum

from cycleweights.config import settings


class Command(str, Enum):
    HTABLE = "htable"
    ORACLE = "oracle"
    SADDLE = "saddle"
    SAMPLE = "sample"
    VERIFY = "verify"
    EXPANSIONS = "expansions"


class Experiment(str, Enum):
    POISSON = "poisson"
    GUMBEL = "gumbel"
    PROFILE = "profile"
    BN = "bn"


# Verification report schemas
class Check(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    name: str
    observed: float
    target: float
    tol: float = Field(ge=0)
    passed: bool = Field(default=False, alias="pass")

    @model_validator(mode="after")
    def recompute_pass(self):
        # NaN never passes
        self.passed = bool(abs(self.observed - self.target) <= self.tol)
        return self


class VerificationReport(BaseModel):
    model_config = ConfigDict(populate_by_name=True, frozen=True)

    experiment: str
    config: Dict[str, Any] = {}
    checks: List[Check] = []
    distances: Dict[str, float] = {}
    counts: Dict[str, int] = {}
    created_at: datetime = Field(default_factory=lambda: datetime.now(timezone.utc))

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failed_checks(self) -> List[Check]:
        return [c for c in self.checks if not c.passed]

    def to_json(self) -> str:
        return self.model_dump_json(indent=2, by_alias=True)


class DiagnosticsReport(BaseModel):
    """Диагностика допустимости; в JSON только четыре поля"""

    residual: float
    width: float
    monotonicity_violations: int
    bn_ratio: float

    a_n: float = Field(default=0.0, exclude=True)
    b_n: float = Field(default=0.0, exclude=True)
    xi: float = Field(default=0.0, exclude=True)
    delta_n: float = Field(default=0.0, exclude=True)
    width_core: float = Field(default=0.0, exclude=True)
    grid_points: int = Field(default=0, exclude=True)


class SaddleSummary(BaseModel):
    weights: str
    n: int
    v_n: float
    n_star: float
    ell_n: Optional[float] = None
    r_n: float
    a_n: float
    b_n: float
    g_r: float
    truncation_K: int
    residual: float
    tail_bound: float
    iterations: int = 0
    scales: Dict[str, float] = {}
    diagnostics: Optional[DiagnosticsReport] = None


class SampleRecord(BaseModel):
    i: int = Field(ge=0)
    cycles: List[Tuple[int, int]]


# Run configuration schemas
class SamplerConfig(BaseModel):
    n: int = Field(ge=1)
    num_samples: int = Field(ge=1)
    seed: int = Field(ge=0, lt=2 ** 64)
    workers: int = Field(default=1, ge=1)


class Tolerances(BaseModel):
    model_config = ConfigDict(extra="forbid", validate_assignment=True)

    mean_rel: float = Field(default=settings.TOL_MEAN_REL, ge=0)
    dispersion: float = Field(default=settings.TOL_DISPERSION, ge=0)
    tv: float = Field(default=settings.TOL_TV, ge=0)
    corr: float = Field(default=settings.TOL_CORR, ge=0)
    ks_gumbel: float = Field(default=settings.TOL_KS_GUMBEL, ge=0)
    ks_joint: float = Field(default=settings.TOL_KS_JOINT, ge=0)
    bn_freq: float = Field(default=settings.TOL_BN_FREQ, ge=0)
    bn_bound_factor: float = Field(default=settings.BN_BOUND_FACTOR, ge=0)
    profile_rel: float = Field(default=settings.TOL_PROFILE_REL, ge=0)
    profile_abs: float = Field(default=settings.TOL_PROFILE_ABS, ge=0)

    def with_overrides(self, overrides: Dict[str, float]) -> "Tolerances":
        return Tolerances(**{**self.model_dump(), **overrides})


class ExpansionKind(str, Enum):
    POLYLOG = "polylog"
    PARTIAL = "partial"


class RunConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    command: Command
    experiment: Optional[Experiment] = None
    alpha: Optional[float] = Field(default=None, gt=0)
    vartheta: Optional[float] = Field(default=None, gt=0)
    n: Optional[int] = Field(default=None, ge=1)
    n_max: Optional[int] = Field(default=None, ge=0)
    samples: int = Field(default=1000, ge=1)
    seed: int = Field(default=0, ge=0, lt=2 ** 64)
    workers: int = Field(default=1, ge=1)
    y_grid: List[float] = [0.5, 1.0, 2.0]
    x_grid: List[float] = [0.5, 1.0, 2.0]
    k_longest: int = Field(default=3, ge=1)
    # saddle diagnostics
    s: float = 0.0
    y: float = Field(default=1.0, gt=0)
    # expansion sweeps
    kind: ExpansionKind = ExpansionKind.POLYLOG
    deltas: List[float] = [0.0, 0.5, 1.0, 2.0]
    v_grid: List[float] = [0.2, 0.1, 0.05, 0.02]
    xv_grid: List[float] = [5.0, 10.0, 20.0]
    terms: int = Field(default=2, ge=0)
    out: Optional[str] = None
    cache_dir: str = settings.CACHE_DIR
    build: bool = False
    tolerances: Tolerances = Tolerances()

    @field_validator("y_grid")
    @classmethod
    def check_y_grid(cls, v):
        if not v or any(y <= 0 for y in v) or any(b < a for a, b in zip(v, v[1:])):
            raise ValueError("y grid must be positive and nondecreasing")
        return v

    @field_validator("x_grid", "xv_grid")
    @classmethod
    def check_positive_grid(cls, v):
        if not v or any(x <= 0 for x in v):
            raise ValueError("grid must be nonempty and positive")
        return v

    @field_validator("v_grid")
    @classmethod
    def check_v_grid(cls, v):
        if not v or any(not 0 < x < 1 for x in v):
            raise ValueError("v grid must lie in (0, 1)")
        return v

    @model_validator(mode="after")
    def check_family(self):
        if self.alpha is not None and self.vartheta is not None:
            raise ValueError("--alpha and --vartheta are conflicting weight families")
        if self.command != Command.EXPANSIONS and self.alpha is None and self.vartheta is None:
            raise ValueError("one of --alpha or --vartheta is required")
        if self.command == Command.HTABLE and self.n_max is None:
            raise ValueError("htable needs --n-max")
        if self.command in (Command.ORACLE, Command.SADDLE, Command.SAMPLE, Command.VERIFY) and self.n is None:
            raise ValueError(f"{self.command.value} needs --n")
        if self.command == Command.VERIFY and self.experiment is None:
            raise ValueError("verify needs an experiment: poisson, gumbel, profile or bn")
        return self

    def config_echo(self) -> Dict[str, Any]:
        return self.model_dump(mode="json", exclude={"out", "cache_dir", "build", "command"})
