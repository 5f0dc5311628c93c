"""FastAPI service wrapping the benchmark-and-advise pipeline.

Intended to run on the measurement machine: clients submit bench jobs and
fetch profiles or recommendations over HTTP. Benchmarks hold a process-wide
lock because energy counters are shared hardware; a second bench request
gets 409 instead of corrupting the one in flight.
"""

from __future__ import annotations

import threading

from fastapi import FastAPI, HTTPException
from fastapi.responses import JSONResponse, PlainTextResponse

from .. import advisor, profile
from ..adapters import InterfaceKind, registry_document
from ..errors import GreencollError, NoCompleteCandidate
from ..meter import MeterConfig, open_meter
from ..runner import RunConfig, run_suite
from ..workloads import describe_workloads
from .models import (
    AdviseFailure,
    AdviseRequest,
    AdviseResponse,
    BenchRequest,
    HealthResponse,
    ProfileDocument,
    RecommendationModel,
    RegistryResponse,
    ReportRequest,
    SkippedCandidateModel,
    WorkloadsResponse,
)

_bench_lock = threading.Lock()


def create_app() -> FastAPI:
    app = FastAPI(
        title="greencoll",
        description="Energy profiling of collection implementations and "
                    "energy-aware substitution advice.",
        version="0.1.0",
    )

    @app.exception_handler(GreencollError)
    async def handle_domain_error(request, exc: GreencollError):
        return JSONResponse(
            status_code=400,
            content={"error": type(exc).__name__, "detail": str(exc)},
        )

    @app.get("/health", response_model=HealthResponse)
    def health():
        return HealthResponse()

    @app.get("/registry", response_model=RegistryResponse)
    def get_registry():
        return registry_document()

    @app.get("/workloads", response_model=WorkloadsResponse)
    def get_workloads():
        return describe_workloads()

    @app.post("/bench", response_model=ProfileDocument)
    def post_bench(request: BenchRequest):
        interfaces = None
        if request.interfaces is not None:
            try:
                interfaces = [InterfaceKind(name) for name in request.interfaces]
            except ValueError as exc:
                raise HTTPException(status_code=422, detail=str(exc)) from exc
        try:
            config = RunConfig(
                popsizes=tuple(request.popsizes),
                repetitions=request.repetitions,
                trim_fraction=request.trim_fraction,
                warmup=request.warmup,
                cell_timeout_seconds=request.cell_timeout_seconds,
                seed=request.seed,
            )
            meter_config = MeterConfig(
                backend=request.meter,
                domains=tuple(request.domains),
                mock_power_watts=request.mock_power_watts,
            )
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc

        if not _bench_lock.acquire(blocking=False):
            raise HTTPException(status_code=409, detail="a benchmark run is already in progress")
        try:
            meter = open_meter(meter_config)
            table = run_suite(meter, config, interfaces=interfaces, impl_ids=request.impls)
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        finally:
            _bench_lock.release()
        return profile.to_document(table)

    @app.post("/advise", response_model=AdviseResponse)
    def post_advise(request: AdviseRequest):
        table = profile.from_document(request.table.model_dump())
        usage = advisor.parse_usage(request.usage.model_dump())
        recommendations = []
        failures = []
        for site in usage.sites:
            try:
                rec = advisor.recommend_site(site, table, weighted=request.weighted)
            except NoCompleteCandidate as exc:
                failures.append(AdviseFailure(site_id=site.site_id, reason=str(exc)))
                continue
            recommendations.append(RecommendationModel(
                site_id=rec.site_id,
                popsize_used=rec.popsize_used,
                candidate_totals=rec.candidate_totals,
                chosen_impl=rec.chosen_impl,
                current_total=rec.current_total,
                estimated_improvement=rec.estimated_improvement,
                skipped_candidates=[
                    SkippedCandidateModel(impl=impl, reason=reason)
                    for impl, reason in rec.skipped_candidates
                ],
            ))
        return AdviseResponse(recommendations=recommendations, failures=failures)

    @app.post("/report")
    def post_report(request: ReportRequest):
        table = profile.from_document(request.table.model_dump())
        rendered = profile.emit_report(
            table,
            format=request.format,
            exclude_methods=tuple(request.exclude_methods),
            include_timestamp=request.include_timestamp,
        )
        media_type = "text/html" if request.format == "html" else "text/plain"
        return PlainTextResponse(rendered, media_type=media_type)

    return app
