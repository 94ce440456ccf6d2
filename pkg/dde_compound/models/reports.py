"""Report models written by the certification services."""

from dataclasses import dataclass, field
from typing import Any

import numpy as np
from pydantic import BaseModel, Field

from dde_compound.models.grid import WedgeGrid


class ConeReport(BaseModel):
    """Outcome of a cone membership test."""

    min_value: float
    argmin: tuple[int, ...] | None
    passed: bool
    tolerance: float


class CertReport(BaseModel):
    """Pass/fail certificate with the numbers it rests on."""

    name: str
    passed: bool
    min_value: float | None = None
    argmin: list[int] | None = None
    tolerance: float | None = None
    seed: int | None = None
    exploratory: bool = False
    config_echo: dict[str, Any] = Field(default_factory=dict)
    details: dict[str, Any] = Field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        """Convert report to a JSON-ready dictionary."""
        return self.model_dump(mode="json")


class RatioReport(BaseModel):
    """Interior bounds of A^kφ / u_m."""

    m: int
    k: int
    n_sub: int
    probe: str
    min_ratio: float
    max_ratio: float
    argmin: list[int] | None
    argmax: list[int] | None
    interior_rule: str
    interior_count: int
    ceiling: float
    within_ceiling: bool
    passed: bool
    exploratory: bool = False
    ratios: list[list[float]] = Field(default_factory=list, exclude=True)

    def to_dict(self) -> dict[str, Any]:
        """Convert report to a JSON-ready dictionary."""
        return self.model_dump(mode="json")


class LapRecord(BaseModel):
    """One Floquet multiplier with its eigenfunction's lap number."""

    index: int
    real: float
    imag: float
    modulus: float
    lap: int | None = None
    sign_changes: int | None = None
    reliable: bool = True
    lower_bound: float | None = None


class LapReport(BaseModel):
    """Multipliers, laps and the dominance checks for one system."""

    m: int
    n_sub: int
    parity: str
    kappa: float | None = None
    records: list[LapRecord] = Field(default_factory=list)
    checks: dict[str, bool] = Field(default_factory=dict)
    gaps: dict[str, float] = Field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        """Convert report to a JSON-ready dictionary."""
        return self.model_dump(mode="json")


class HomotopyReport(BaseModel):
    """Per-κ lap reports along α_κ = κα, β_κ = κβ + (1-κ)β₀."""

    m: int
    kappas: list[float]
    points: list[LapReport]
    max_jumps: dict[str, float] = Field(default_factory=dict)
    oracle_error: float | None = None
    passed: bool = False

    def to_dict(self) -> dict[str, Any]:
        """Convert report to a JSON-ready dictionary."""
        return self.model_dump(mode="json")


class RunRecord(BaseModel):
    """Reproducibility record written next to every CLI run's outputs."""

    subcommand: str
    version: str
    config: dict[str, Any]
    started_at: str
    finished_at: str | None = None
    files: list[str] = Field(default_factory=list)
    reports: dict[str, dict[str, bool]] = Field(default_factory=dict)
    passed: bool = False

    def to_dict(self) -> dict[str, Any]:
        """Convert record to a JSON-ready dictionary."""
        return self.model_dump(mode="json")


@dataclass
class CvDecomposition:
    """Bφ = Q₀ν₀ + Q₁ν₁ + ψ with the probe values of ψ near the singular point."""

    q0: float
    q1: float
    psi: WedgeGrid
    probe_eps: list[float]
    probe_values: list[float]
    decaying: bool
    reconstruction_error: float
    details: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        """Convert decomposition to dictionary (ψ summarised by its finite sup-norm)."""
        return {
            "q0": self.q0,
            "q1": self.q1,
            "psi_sup_norm": float(np.nanmax(np.abs(self.psi.values))),
            "probe_eps": self.probe_eps,
            "probe_values": self.probe_values,
            "decaying": self.decaying,
            "reconstruction_error": self.reconstruction_error,
            **self.details,
        }
