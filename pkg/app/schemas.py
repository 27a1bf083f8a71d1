from pydantic import BaseModel, Field, field_validator, model_validator
from typing import Dict, List, Literal, Optional


def t_label(t: float) -> str:
    """Column suffix for a deviation parameter, e.g. 0.5 -> 't0.5'"""
    return f"t{t:g}"


class RadiusSchedule(BaseModel):
    """
    r(n) = c * ((ln n)^beta / n)^(1/d), decreasing in n once n > e^beta.
    An unset c or beta takes the per-dimension default (c = 1; beta = 2 up to
    d = 2, 1.5 from d = 3).
    """
    c: Optional[float] = Field(None, gt=0)
    beta: Optional[float] = Field(None, ge=1)


class RateEnvelope(BaseModel):
    """Bottleneck-matching rate, constant x (rate in n); epsilon is the d = 1 failure probability"""
    d: int = Field(..., ge=1)
    constant: float = Field(1.0, gt=0)
    epsilon: Optional[float] = Field(None, gt=0, lt=1)


class BoundParams(BaseModel):
    n: int = Field(..., ge=1)
    d: int = Field(..., ge=1)
    r: float = Field(..., gt=0)
    t: float = Field(..., ge=0)
    c_d: float = Field(1.0, gt=0)
    m_plus_over_r: float = Field(0.0, ge=0, lt=0.5)


class CdMode(BaseModel):
    """How experiments choose c_d: a fixed value, or the feasible value at the realised M_n/r"""
    kind: Literal["fixed", "feasible"]
    value: Optional[float] = None

    @classmethod
    def parse(cls, text: str) -> "CdMode":
        text = text.strip()
        if text == "feasible":
            return cls(kind="feasible")
        if text.startswith("fixed:"):
            try:
                value = float(text.split(":", 1)[1])
            except ValueError:
                raise ValueError(f"bad c_d value in {text!r}")
            if value <= 0:
                raise ValueError("fixed c_d must be positive")
            return cls(kind="fixed", value=value)
        raise ValueError(f"c_d mode must be 'fixed:<v>' or 'feasible', got {text!r}")

    def __str__(self):
        return "feasible" if self.kind == "feasible" else f"fixed:{self.value:g}"


class ExperimentConfig(BaseModel):
    dims: List[int] = Field(default_factory=lambda: [2])
    sides: List[int] = Field(default_factory=lambda: [16])
    schedule: Optional[RadiusSchedule] = None  # None: default schedule per dimension
    trials: int = Field(10, ge=1)
    master_seed: int = 0
    c_d_mode: CdMode = Field(default_factory=lambda: CdMode(kind="fixed", value=1.0))
    t_grid: List[float] = Field(default_factory=lambda: [1.0])
    output_path: Optional[str] = None
    workers: Optional[int] = Field(None, ge=1)

    @field_validator("c_d_mode", mode="before")
    @classmethod
    def parse_cd_mode(cls, value):
        if isinstance(value, str):
            return CdMode.parse(value)
        return value

    @field_validator("dims", "sides")
    @classmethod
    def positive_entries(cls, values: List[int]):
        if not values:
            raise ValueError("at least one entry is required")
        if any(v < 1 for v in values):
            raise ValueError("entries must be >= 1")
        return values

    @field_validator("t_grid")
    @classmethod
    def positive_t(cls, values: List[float]):
        if not values:
            raise ValueError("t_grid needs at least one value")
        if any(t <= 0 for t in values):
            raise ValueError("deviation parameters must be positive")
        return values


class RecordBase(BaseModel):
    """Flat CSV rows; dict-valued fields expand into one column per key"""

    def to_row(self) -> dict:
        row = {}
        for name, value in self.model_dump().items():
            if isinstance(value, dict):
                for key, item in value.items():
                    row[f"{name}_{key}"] = item
            else:
                row[name] = value
        return row


class ExperimentRecord(RecordBase):
    trial: int
    seed: int
    d: int
    n: int
    r: float
    a_n: float
    connected: bool
    M_n: float
    M_over_r: float
    hs_dist: float
    w1_dist: float
    mean_gap: float
    conj_stat_identity: float
    lambda2_X: float
    lambda2_D: float
    side: int
    hs_dist_dense: float
    hs_sq_scaled: float
    w1_scaled: float
    ws_bound: Dict[str, float] = Field(default_factory=dict)
    hs_bound: Dict[str, float] = Field(default_factory=dict)
    c_d: Dict[str, float] = Field(default_factory=dict)


class ConjectureRecord(RecordBase):
    trial: int
    seed: int
    d: int
    n: int
    connected: bool
    function: str
    statistic: float
    equidistribution_gap: float


class ConjectureSummary(RecordBase):
    d: int
    n: int
    function: str
    trials_used: int
    median_statistic: float
    median_equidistribution_gap: float


class ReciprocalRecord(RecordBase):
    n: int
    p: float
    mean: float
    t: float
    draws: int
    seed: int
    empirical: float
    std_error: float
    bound: float
    informative: bool
    within_bound: bool
    warning: str = ""


# HTTP payloads

class BoundsRequest(BaseModel):
    n: int = Field(..., ge=2)
    d: int = Field(..., ge=1)
    r: Optional[float] = Field(None, gt=0)
    schedule: RadiusSchedule = Field(default_factory=RadiusSchedule)
    t: float = Field(..., gt=0)
    c_d: float = Field(1.0, gt=0)
    q: float = Field(0.0, ge=0, lt=0.5)


class BoundsResponse(BaseModel):
    n: int
    d: int
    r: float
    t: float
    a_n: float
    hs_bound: float
    hs_informative: bool
    hs_bound_terms: List[float]
    ws_bound: float
    ws_informative: bool
    reciprocal_bound: float
    c_d_feasible: float


class GraphRequest(BaseModel):
    kind: Literal["sampled", "grid"] = "sampled"
    dim: int = Field(2, ge=1, le=6)
    side: int = Field(8, ge=1)
    seed: int = 0
    schedule: Optional[RadiusSchedule] = None
    r: Optional[float] = Field(None, gt=0)

    @model_validator(mode="after")
    def bounded_size(self):
        if self.side ** self.dim > 4096:
            raise ValueError("spectrum requests are limited to 4096 points")
        return self


class SpectrumResponse(BaseModel):
    kind: str
    n: int
    dim: int
    r: float
    connected: bool
    eigenvalues: List[float]


class MatchRequest(BaseModel):
    dim: int = Field(2, ge=1, le=6)
    side: int = Field(8, ge=1)
    seed: int = 0
    schedule: Optional[RadiusSchedule] = None

    @model_validator(mode="after")
    def bounded_size(self):
        if self.side ** self.dim > 1 << 14:
            raise ValueError("matching requests are limited to 16384 points")
        return self


class MatchResponse(BaseModel):
    n: int
    dim: int
    bottleneck: float
    r: float
    M_over_r: float
    forward: List[int]
