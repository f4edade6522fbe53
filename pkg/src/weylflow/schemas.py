"""Request and response models shared by the HTTP service and the CLI.

The JSON shape of a series is pinned here: {"n", "kmax", "terms"} with each
term {"k", "p", "re", "im"} and both coefficient parts rendered "num/den".
"""

from __future__ import annotations

from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from .expressions import ExpressionError, parse_to_series, series_to_expression
from .flows import FlowResult, Realization
from .series import GradedSeries


class SpecError(ValueError):
    """A user-input failure: bad file, bad expression, unknown name."""

    def __init__(
        self,
        kind: str,
        message: str,
        offset: Optional[int] = None,
        where: Optional[str] = None,
    ) -> None:
        super().__init__(message)
        self.kind = kind
        self.message = message
        self.offset = offset
        self.where = where

    def payload(self) -> dict:
        body = {"type": self.kind, "message": self.message}
        if self.where is not None:
            body["where"] = self.where
        if self.offset is not None:
            body["offset"] = self.offset
        return {"error": body}


class TermModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    k: List[int]
    p: List[int]
    re: str
    im: str


class SeriesModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    n: int
    kmax: int
    terms: List[TermModel]

    @classmethod
    def from_series(cls, series: GradedSeries) -> "SeriesModel":
        return cls.model_validate(series.to_json_dict())

    def to_series(self) -> GradedSeries:
        return GradedSeries.from_json_dict(self.model_dump())


class FlowResultModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kmax: int
    J: List[SeriesModel]
    phi: List[SeriesModel]
    h: SeriesModel

    @classmethod
    def from_result(cls, fr: FlowResult) -> "FlowResultModel":
        return cls.model_validate(fr.to_json_dict())

    def to_result(self) -> FlowResult:
        return FlowResult.from_json_dict(self.model_dump())


class RealizationSpecModel(BaseModel):
    """A realization as written in a spec file: expressions, not series.

    ``phi`` is the dense n x n table of coefficient expressions and ``chi``
    the n scalar ones; absent entries are the string "0".
    """

    model_config = ConfigDict(extra="forbid")

    dimension: int = Field(ge=1, le=6)
    metric: List[int]
    phi: List[List[str]]
    chi: List[str]
    kmax: Optional[int] = Field(default=None, ge=0, le=16)
    pmax: Optional[int] = Field(default=None, ge=0)

    @model_validator(mode="after")
    def _shapes(self) -> "RealizationSpecModel":
        n = self.dimension
        if len(self.metric) != n or any(e not in (-1, 1) for e in self.metric):
            raise ValueError("metric must list dimension entries, each 1 or -1")
        if len(self.phi) != n or any(len(row) != n for row in self.phi):
            raise ValueError("phi must be a dimension x dimension table")
        if len(self.chi) != n:
            raise ValueError("chi must list dimension entries")
        return self

    def to_realization(self) -> Realization:
        n = self.dimension

        def lower(text: str, where: str) -> GradedSeries:
            try:
                return parse_to_series(text, n, kmax=0, pmax=self.pmax)
            except ExpressionError as exc:
                raise SpecError(
                    "expression", f"{where}: {exc.message}", exc.offset, where
                ) from exc

        phi = tuple(
            tuple(lower(self.phi[a][b], f"phi[{a}][{b}]") for b in range(n))
            for a in range(n)
        )
        chi = tuple(lower(self.chi[b], f"chi[{b}]") for b in range(n))
        return Realization(n=n, metric=tuple(self.metric), phi=phi, chi=chi)

    @classmethod
    def from_realization(
        cls,
        r: Realization,
        kmax: Optional[int] = None,
        pmax: Optional[int] = None,
    ) -> "RealizationSpecModel":
        return cls(
            dimension=r.n,
            metric=list(r.metric),
            phi=[[series_to_expression(e) for e in row] for row in r.phi],
            chi=[series_to_expression(e) for e in r.chi],
            kmax=kmax,
            pmax=pmax,
        )


class VerifyReportModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kmax: int
    equal: bool
    discrepancy_terms: int


class ComposeRequestModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    first: RealizationSpecModel
    second: RealizationSpecModel
    kmax: Optional[int] = Field(default=None, ge=0, le=16)


class CompositionReportModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kmax: int
    oracle_equal: bool
    higher_corrections_vanish: bool
    composed: List[SeriesModel]
    generator: List[SeriesModel]
    first_order: List[SeriesModel]


class EvalRequestModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    spec: RealizationSpecModel
    k: List[float]
    q: List[float]
    kmax: Optional[int] = Field(default=None, ge=0, le=16)


class BatchPointModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    k: List[float]
    q: List[float]


class BatchEvalRequestModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    spec: RealizationSpecModel
    points: List[BatchPointModel]
    kmax: Optional[int] = Field(default=None, ge=0, le=16)


class PlaneWaveModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    J: List[float]
    h: float
    kmax: int


class BatchRowModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    k: List[float]
    q: List[float]
    J: List[float]
    h: float
    kmax: int


class ExampleSummaryModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name: str
    summary: str


class ExamplesModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    examples: List[ExampleSummaryModel]


class ExampleDetailModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name: str
    summary: str
    toml: str
    spec: RealizationSpecModel
