from fractions import Fraction
from pathlib import Path
from enum import Enum
from pydantic import BaseModel, ConfigDict, Field, PrivateAttr, field_validator, model_validator


class PatternKind(str, Enum):
    BINARY = "binary"
    M_ARY = "m_ary"
    COMPLEX = "complex"


class SpectrumKind(str, Enum):
    APERIODIC = "aperiodic"
    PERIODIC = "periodic"


class OutputFormat(str, Enum):
    CSV = "csv"
    JSON = "json"


class CorrelationMethod(str, Enum):
    FFT = "fft"
    DIRECT = "direct"


class OracleStatus(str, Enum):
    AGREE = "agree"
    DISAGREE = "disagree"
    SKIPPED = "skipped"


# Plan validation

class PlanFlags(BaseModel):
    count: int
    balanced: bool
    orthogonal: bool
    unimodular: bool
    m_ary: int | None = None
    hadamard: bool


# Metrics

class Aggregate(BaseModel):
    avg: float
    min: float
    max: float

    @classmethod
    def of(cls, values: list[float]) -> "Aggregate | None":
        if not values:
            return None
        return cls(avg=sum(values) / len(values), min=min(values), max=max(values))


class SequenceMetrics(BaseModel):
    index: int
    label: str | None = None
    length: int
    energy: float
    psl: float
    adf: float


class PairMetrics(BaseModel):
    first: int
    second: int
    pcc: float
    cdf: float


class BlockMetrics(BaseModel):
    """Cross block between two codebooks: pairs (f, g) with f from one and g from the other"""

    name: str
    pairs: int
    pcc: Aggregate | None = None
    pair_cdf: Aggregate | None = None


class MetricsSummary(BaseModel):
    name: str
    size: int
    method: CorrelationMethod
    sequences: list[SequenceMetrics]
    pairs: list[PairMetrics] = Field(default_factory=list)
    guc: float
    sdc: float
    guc_ratio: float
    cdf: float
    adjusted_df: float
    pcdf: float | None = None
    psl: Aggregate
    adf: Aggregate
    pcc: Aggregate | None = None
    pair_cdf: Aggregate | None = None
    max_deviation: float | None = None

    _cdf_exact: Fraction | None = PrivateAttr(default=None)

    @property
    def cdf_exact(self) -> Fraction | None:
        """CDF(F) as an exact rational when every sequence has integer entries"""
        return self._cdf_exact

    @property
    def adjusted_exact(self) -> Fraction | None:
        if self._cdf_exact is None:
            return None
        return self.size * (self._cdf_exact - 1)


# Theory reports

class BoundReport(BaseModel):
    name: str
    p: int
    n: int | None = None
    l1_norms: list[float] = Field(default_factory=list)
    l2_norms: list[float] = Field(default_factory=list)
    bound: float
    lower: float | None = None
    measured: float | None = None
    satisfied: bool | None = None

    @model_validator(mode="after")
    def _check_measured(self) -> "BoundReport":
        if self.measured is not None:
            ok = self.measured <= self.bound
            if self.lower is not None:
                ok = ok and self.measured >= self.lower
            self.satisfied = ok
        return self


class DecompositionReport(BaseModel):
    first: int | None = None
    second: int | None = None
    p: int
    r: int
    r_prime: int
    u: float
    v: float
    s: float
    cdf: float
    pcdf: float
    residual: float
    bound: float
    satisfied: bool


class LimitReport(BaseModel):
    n: int
    rho: float
    cdf: float
    adjusted_df: float
    minimum_cdf: float
    minimum_adjusted_df: float
    minimizers: list[float]


class SweepPoint(BaseModel):
    r: int
    adjusted_df: float
    overlay: float


class SweepReport(BaseModel):
    name: str
    p: int
    points: list[SweepPoint]
    minimum: float
    argmin: list[int]
    maximum: float
    argmax: list[int]
    max_overlay_gap: float


class TableRow(BaseModel):
    """One published-table row: peak measures followed by demerit factors"""

    p: int | str
    guc_ratio: float | None = None
    psl_avg: float | None = None
    psl_min: float | None = None
    psl_max: float | None = None
    pcc_avg: float | None = None
    pcc_min: float | None = None
    pcc_max: float | None = None
    adjusted_df: float | None = None
    adf_avg: float | None = None
    adf_min: float | None = None
    adf_max: float | None = None
    cdf_avg: float | None = None
    cdf_min: float | None = None
    cdf_max: float | None = None
    guc_bound: float | None = None
    limit_adjusted_df: float | None = None


# File documents

class PlanDocument(BaseModel):
    n: int
    m: int | None = None
    patterns: list[list[int]] | list[list[tuple[float, float]]]


class SequenceRecord(BaseModel):
    """Entries are exponents k of exp(2 pi i k / m) (-1 for zero) when the codebook carries m"""

    pattern_index: int | None = None
    label: str | None = None
    r: int | None = None
    entries: list[int] | list[tuple[float, float]]


class CodebookDocument(BaseModel):
    name: str
    p: int | None = None
    n: int | None = None
    m: int | None = None
    unimodularized: bool = False
    fill: int | tuple[float, float] = 1
    rotation: str | None = None
    collisions: list[tuple[int, int]] = Field(default_factory=list)
    sequences: list[SequenceRecord]


# Command configuration

class RunConfig(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    command: str
    plan: str | None = None
    rows: list[int] | None = None
    primes: list[int] = Field(default_factory=list)
    preset: str | None = None
    prime_range: tuple[int, int] | None = None
    max_k: int | None = None
    codebook: Path | None = None
    rotate_uniform: int | None = None
    rotate_fraction: Fraction | None = None
    rotate_map: Path | None = None
    unimodularize: bool = False
    fill: int = 1
    format: OutputFormat = OutputFormat.CSV
    output: Path | None = None
    threads: int | None = None
    fft_threshold: float | None = None
    method: CorrelationMethod = CorrelationMethod.FFT
    stride: int = 1
    plot: Path | None = None
    theory: bool = False
    compare: bool = False
    bounds: bool = False
    verify: bool = False
    with_pcdf: bool = False
    n: int | None = None
    rho: float = 0.25
    prns: list[int] | None = None
    fallback: bool = True

    @field_validator("rotate_fraction", mode="before")
    @classmethod
    def _parse_fraction(cls, value):
        if value is None or isinstance(value, Fraction):
            return value
        return Fraction(str(value))

    @field_validator("rotate_fraction")
    @classmethod
    def _reduce_fraction(cls, value: Fraction | None) -> Fraction | None:
        return None if value is None else value % 1

    @field_validator("fill")
    @classmethod
    def _unimodular_fill(cls, value: int) -> int:
        if value not in (1, -1):
            raise ValueError(f"fill must be +1 or -1, got {value}")
        return value

    @field_validator("threads")
    @classmethod
    def _positive_threads(cls, value: int | None) -> int | None:
        if value is not None and value < 1:
            raise ValueError(f"thread count must be positive, got {value}")
        return value

    @model_validator(mode="after")
    def _single_rotation(self) -> "RunConfig":
        given = [
            x for x in (self.rotate_uniform, self.rotate_fraction, self.rotate_map) if x is not None
        ]
        if len(given) > 1:
            raise ValueError("give at most one of --rotate-uniform, --rotate-fraction, --rotate-map")
        return self

    @model_validator(mode="after")
    def _single_prime_source(self) -> "RunConfig":
        given = [x for x in (self.primes or None, self.preset, self.prime_range) if x]
        if len(given) > 1:
            raise ValueError("give at most one of --prime/--primes, --preset, --range")
        return self


class OracleCheck(BaseModel):
    """Direct sums against rounded FFT spectra; skipped above the length cap"""

    status: OracleStatus
    pairs: int = 0
    max_deviation: float | None = None

    @property
    def agrees(self) -> bool | None:
        if self.status == OracleStatus.SKIPPED:
            return None
        return self.status == OracleStatus.AGREE


class AnalysisReport(BaseModel):
    metrics: MetricsSummary
    bounds: list[BoundReport] = Field(default_factory=list)
    oracle: OracleCheck | None = None
