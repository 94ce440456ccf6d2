"""Experiment configuration accepted by the CLI and the runner."""

import re
from enum import StrEnum
from pathlib import Path
from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from dde_compound.models.coefficient import DdeSystem, PeriodicCoefficient
from dde_compound.models.grid import Grid
from dde_compound.services.persistence import read_samples_csv

PROBE_PATTERN = re.compile(r"^(const|bump|random(:\d+)?)$")


class Subcommand(StrEnum):
    """Experiments the CLI can run."""

    SIMULATE = "simulate"
    SPECTRUM = "spectrum"
    POSITIVITY = "positivity"
    DETCHECK = "detcheck"
    FLOQUET = "floquet"
    U0CHECK = "u0check"


class CoefficientSpec(BaseModel):
    """Declarative description of a periodic coefficient."""

    model_config = ConfigDict(extra="forbid")

    kind: Literal["constant", "sinusoid", "samples"] = "constant"
    value: float = 0.0
    mean: float = 0.0
    amplitude: float = 0.0
    frequency: int = Field(1, ge=1)
    phase: float = 0.0
    samples: list[float] | None = None
    path: Path | None = None

    @model_validator(mode="after")
    def _samples_present(self) -> "CoefficientSpec":
        if self.kind == "samples" and bool(self.samples) == (self.path is not None):
            msg = "samples: a 'samples' coefficient needs either a non-empty sample list or a sample file path"
            raise ValueError(msg)
        return self

    def build(self, grid: Grid, period: float) -> PeriodicCoefficient:
        """Sample the coefficient on ``grid``."""
        if self.kind == "constant":
            return PeriodicCoefficient.constant(grid, self.value, period)
        if self.kind == "sinusoid":
            return PeriodicCoefficient.sinusoid(grid, self.mean, self.amplitude, self.frequency, period, self.phase)
        samples = self.samples if self.samples else read_samples_csv(self.path)
        return PeriodicCoefficient.from_samples(grid, period, samples)

    @classmethod
    def parse(cls, text: str) -> "CoefficientSpec":
        """Parse the CLI shorthand ``c``, ``mean+amp*sin`` (optionally ``...*sin:freq``) or ``@samples.csv``."""
        text = text.replace(" ", "")
        if text.startswith("@"):
            return cls(kind="samples", path=Path(text[1:]))
        match = re.fullmatch(r"([-+]?[\d.eE+-]*?)([-+][\d.eE]+)\*sin(?::(\d+))?", text)
        if match:
            mean = float(match.group(1)) if match.group(1) not in {"", "+", "-"} else 0.0
            return cls(
                kind="sinusoid", mean=mean, amplitude=float(match.group(2)), frequency=int(match.group(3) or 1)
            )
        try:
            return cls(kind="constant", value=float(text))
        except ValueError as e:
            msg = f"cannot parse coefficient '{text}'; use a number, 'mean+amp*sin' or '@file.csv'"
            raise ValueError(msg) from e


class ExperimentConfig(BaseModel):
    """Everything needed to reproduce one CLI run."""

    model_config = ConfigDict(extra="forbid")

    subcommand: Subcommand
    n_sub: int = Field(32, ge=2)
    gamma: float = Field(1.0, gt=0)
    alpha: CoefficientSpec = Field(default_factory=lambda: CoefficientSpec(kind="constant", value=0.0))
    beta: CoefficientSpec = Field(default_factory=lambda: CoefficientSpec(kind="constant", value=1.0))
    m: int = Field(2, ge=1, le=6)
    k: int = Field(3, ge=1)
    k_max: int = Field(4, ge=1, le=64)
    tau: float = 0.0
    eta: float = Field(1.0, gt=0)
    horizon: float = Field(3.0, gt=0)
    initial: float = 1.0
    trials: int = Field(100, ge=1)
    seed: int = 7
    probe: str = "const"
    homotopy_steps: int = Field(0, ge=0)
    matrix: Path | None = None
    output_dir: Path = Path("runs/latest")
    threads: int = Field(1, ge=1)

    @field_validator("probe")
    @classmethod
    def _probe_known(cls, value: str) -> str:
        if not PROBE_PATTERN.match(value):
            msg = f"probe must be const, bump or random:<seed>, got '{value}'"
            raise ValueError(msg)
        return value

    @model_validator(mode="after")
    def _grid_aligned(self) -> "ExperimentConfig":
        grid = Grid(self.n_sub)
        for name in ("gamma", "eta", "tau", "horizon"):
            grid.steps(getattr(self, name), name)
        if self.subcommand is Subcommand.SPECTRUM and self.matrix is None:
            msg = "matrix: the spectrum subcommand needs a matrix CSV path"
            raise ValueError(msg)
        if self.subcommand is Subcommand.U0CHECK and self.m not in {2, 3, 4}:
            msg = f"m: u0check supports m in {{2, 3, 4}}, got {self.m}"
            raise ValueError(msg)
        return self

    def grid(self) -> Grid:
        """Grid of the run."""
        return Grid(self.n_sub)

    def system(self) -> DdeSystem:
        """Coefficients of the run."""
        grid = self.grid()
        return DdeSystem(self.alpha.build(grid, self.gamma), self.beta.build(grid, self.gamma))

    def probe_seed(self) -> int:
        """Seed carried by ``random:<seed>`` probes (the run seed otherwise)."""
        _, _, seed = self.probe.partition(":")
        return int(seed) if seed else self.seed

    def echo(self) -> dict[str, Any]:
        """JSON-ready copy of the configuration."""
        return self.model_dump(mode="json")
