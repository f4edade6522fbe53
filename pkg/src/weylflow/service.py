"""HTTP facade over the engine.

Run with:  uvicorn weylflow.service:app

Every route delegates to a plain handler function that takes and returns
pydantic models, so the CLI can call the same handlers in process without a
server.  User-input failures raise SpecError and map to 400 (404 for an
unknown example name); request-shape failures are FastAPI's usual 422.
"""

from __future__ import annotations

import warnings
from typing import List, Optional

from fastapi import FastAPI
from fastapi.responses import JSONResponse, PlainTextResponse

from . import __version__
from .flows import compute_flow
from .planewaves import builtin_realizations, composition_report, evaluate_flow
from .schemas import (
    BatchEvalRequestModel,
    BatchRowModel,
    ComposeRequestModel,
    CompositionReportModel,
    EvalRequestModel,
    ExampleDetailModel,
    ExamplesModel,
    ExampleSummaryModel,
    FlowResultModel,
    PlaneWaveModel,
    RealizationSpecModel,
    SeriesModel,
    SpecError,
    VerifyReportModel,
)
from .specfile import spec_to_toml
from .weyl import verify_normal_ordering

DEFAULT_KMAX = 4


class DefaultKmaxWarning(UserWarning):
    """No truncation order was given, so the default one is in effect."""


def resolve_kmax(spec_kmax: Optional[int], override: Optional[int]) -> int:
    if override is not None:
        return override
    if spec_kmax is not None:
        return spec_kmax
    warnings.warn(
        f"no kmax given; defaulting to {DEFAULT_KMAX}", DefaultKmaxWarning, stacklevel=3
    )
    return DEFAULT_KMAX


# -- handlers -------------------------------------------------------------------


def expand_spec(
    spec: RealizationSpecModel, kmax: Optional[int] = None
) -> FlowResultModel:
    r = spec.to_realization()
    order = resolve_kmax(spec.kmax, kmax)
    return FlowResultModel.from_result(compute_flow(r, order))


def verify_spec(
    spec: RealizationSpecModel, kmax: Optional[int] = None
) -> VerifyReportModel:
    r = spec.to_realization()
    order = resolve_kmax(spec.kmax, kmax)
    equal, diff = verify_normal_ordering(r, order)
    return VerifyReportModel(kmax=order, equal=equal, discrepancy_terms=len(diff.terms))


def compose_specs(request: ComposeRequestModel) -> CompositionReportModel:
    first = request.first.to_realization()
    second = request.second.to_realization()
    if request.kmax is not None:
        order = request.kmax
    elif request.first.kmax is not None and request.second.kmax is not None:
        if request.first.kmax != request.second.kmax:
            raise SpecError(
                "spec", "the two specs disagree on kmax; pass one explicitly"
            )
        order = request.first.kmax
    else:
        order = resolve_kmax(request.first.kmax or request.second.kmax, None)
    try:
        report = composition_report(first, second, order)
    except ValueError as exc:
        raise SpecError("spec", str(exc)) from exc
    return CompositionReportModel(
        kmax=report.kmax,
        oracle_equal=report.oracle_equal,
        higher_corrections_vanish=report.higher_corrections_vanish,
        composed=[SeriesModel.from_series(s) for s in report.composed],
        generator=[SeriesModel.from_series(s) for s in report.generator],
        first_order=[SeriesModel.from_series(s) for s in report.first_order],
    )


def eval_spec(request: EvalRequestModel) -> PlaneWaveModel:
    r = request.spec.to_realization()
    order = resolve_kmax(request.spec.kmax, request.kmax)
    fr = compute_flow(r, order)
    try:
        image = evaluate_flow(fr, request.k, request.q)
    except ValueError as exc:
        raise SpecError("spec", str(exc)) from exc
    return PlaneWaveModel(J=list(image.momenta), h=image.phase, kmax=image.kmax_used)


def eval_batch(request: BatchEvalRequestModel) -> List[BatchRowModel]:
    r = request.spec.to_realization()
    order = resolve_kmax(request.spec.kmax, request.kmax)
    fr = compute_flow(r, order)
    rows: List[BatchRowModel] = []
    for point in request.points:
        try:
            image = evaluate_flow(fr, point.k, point.q)
        except ValueError as exc:
            raise SpecError("spec", str(exc)) from exc
        rows.append(
            BatchRowModel(
                k=list(point.k),
                q=list(point.q),
                J=list(image.momenta),
                h=image.phase,
                kmax=image.kmax_used,
            )
        )
    return rows


def list_examples() -> ExamplesModel:
    return ExamplesModel(
        examples=[
            ExampleSummaryModel(name=item.name, summary=item.summary)
            for item in builtin_realizations().values()
        ]
    )


def example_detail(name: str) -> ExampleDetailModel:
    item = builtin_realizations().get(name)
    if item is None:
        raise SpecError("unknown-example", f"no built-in realization named {name!r}")
    spec = RealizationSpecModel.from_realization(item.realization, kmax=item.kmax)
    return ExampleDetailModel(
        name=item.name,
        summary=item.summary,
        toml=spec_to_toml(spec),
        spec=spec,
    )


# -- routes ----------------------------------------------------------------------

app = FastAPI(
    title="weylflow",
    version=__version__,
    description="Exact normal-ordered exponential flows, as a service.",
)


@app.exception_handler(SpecError)
async def _spec_error_handler(request, exc: SpecError):
    status = 404 if exc.kind == "unknown-example" else 400
    return JSONResponse(status_code=status, content=exc.payload())


@app.post("/expand", response_model=FlowResultModel)
def expand_route(spec: RealizationSpecModel) -> FlowResultModel:
    return expand_spec(spec)


@app.post("/verify", response_model=VerifyReportModel)
def verify_route(spec: RealizationSpecModel) -> VerifyReportModel:
    return verify_spec(spec)


@app.post("/compose", response_model=CompositionReportModel)
def compose_route(request: ComposeRequestModel) -> CompositionReportModel:
    return compose_specs(request)


@app.post("/eval", response_model=PlaneWaveModel)
def eval_route(request: EvalRequestModel) -> PlaneWaveModel:
    return eval_spec(request)


@app.post("/eval/batch")
def eval_batch_route(request: BatchEvalRequestModel) -> PlainTextResponse:
    rows = eval_batch(request)
    body = "".join(row.model_dump_json() + "\n" for row in rows)
    return PlainTextResponse(body, media_type="application/jsonl")


@app.get("/examples", response_model=ExamplesModel)
def examples_route() -> ExamplesModel:
    return list_examples()


@app.get("/examples/{name}", response_model=ExampleDetailModel)
def example_detail_route(name: str) -> ExampleDetailModel:
    return example_detail(name)
