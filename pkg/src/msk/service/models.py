"""Request and response models for the verification service."""

from typing import Optional

from pydantic import BaseModel, Field

from ..scenario import ReportModel, ScenarioModel


class CheckRequest(BaseModel):
    scenario: ScenarioModel
    seed: Optional[int] = None
    samples: Optional[int] = None


class CheckResponse(BaseModel):
    report: ReportModel
    exit_code: int


class CatalogRequest(BaseModel):
    name: str
    params: dict[str, str] = Field(default_factory=dict)


class CatalogResponse(BaseModel):
    scenario: ScenarioModel


class HealthResponse(BaseModel):
    status: str
    version: str
