"""Pydantic request/response models for the HTTP service."""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field

from ..runner import DEFAULT_POPSIZES, DEFAULT_SEED


class HealthResponse(BaseModel):
    status: str = "ok"


class TrialModel(BaseModel):
    j: float
    ms: float


class CellModel(BaseModel):
    interface: str
    popsize: int
    method: str
    impl: str
    status: str
    energy_j: Optional[float] = None
    time_ms: Optional[float] = None
    trials: list[TrialModel] = Field(default_factory=list)


class ProfileDocument(BaseModel):
    schema_version: int
    metadata: dict
    cells: list[CellModel]


class UsageSiteModel(BaseModel):
    site_id: str
    interface: str
    current_impl: str
    methods: list[str]
    counts: Optional[dict[str, int]] = None
    workload_size: int


class UsageDocument(BaseModel):
    schema_version: int
    sites: list[UsageSiteModel]


class BenchRequest(BaseModel):
    popsizes: list[int] = Field(default_factory=lambda: list(DEFAULT_POPSIZES))
    repetitions: int = 10
    trim_fraction: float = 0.2
    warmup: bool = True
    cell_timeout_seconds: float = 300.0
    seed: int = DEFAULT_SEED
    interfaces: Optional[list[str]] = None
    impls: Optional[list[str]] = None
    meter: Literal["mock", "rapl"] = "mock"
    mock_power_watts: float = 10.0
    domains: list[str] = Field(default_factory=lambda: ["package"])


class AdviseRequest(BaseModel):
    table: ProfileDocument
    usage: UsageDocument
    weighted: bool = False


class SkippedCandidateModel(BaseModel):
    impl: str
    reason: str


class RecommendationModel(BaseModel):
    site_id: str
    popsize_used: int
    candidate_totals: dict[str, float]
    chosen_impl: str
    current_total: Optional[float] = None
    estimated_improvement: Optional[float] = None
    skipped_candidates: list[SkippedCandidateModel] = Field(default_factory=list)


class AdviseFailure(BaseModel):
    site_id: str
    reason: str


class AdviseResponse(BaseModel):
    recommendations: list[RecommendationModel]
    failures: list[AdviseFailure] = Field(default_factory=list)


class ReportRequest(BaseModel):
    table: ProfileDocument
    format: Literal["html", "csv", "tty"] = "tty"
    exclude_methods: list[str] = Field(default_factory=list)
    include_timestamp: bool = True


class ImplementationModel(BaseModel):
    id: str
    interface: str
    display_name: str
    notes: str
    unsupported: list[str] = Field(default_factory=list)


class RegistryResponse(BaseModel):
    schema_version: int
    implementations: list[ImplementationModel]


class WorkloadModel(BaseModel):
    interface: str
    method: str
    plan: str
    description: str
    reconstructed: bool


class WorkloadsResponse(BaseModel):
    schema_version: int
    workloads: list[WorkloadModel]
