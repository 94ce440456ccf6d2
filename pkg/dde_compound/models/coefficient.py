"""Periodic coefficients and the scalar delay system they define."""

from collections.abc import Callable
from dataclasses import dataclass
from enum import StrEnum
from typing import Any

import numpy as np

from dde_compound.models.grid import Grid
from dde_compound.utils.errors import InvalidArgumentError


class SignClass(StrEnum):
    """Declared almost-everywhere sign of a coefficient."""

    NONNEGATIVE = "nonneg"
    NONPOSITIVE = "nonpos"
    NONE = "none"


def infer_sign_class(samples: np.ndarray) -> SignClass:
    """Sign class implied by node samples (the zero function counts as nonnegative)."""
    if np.all(samples >= 0):
        return SignClass.NONNEGATIVE
    if np.all(samples <= 0):
        return SignClass.NONPOSITIVE
    return SignClass.NONE


@dataclass(frozen=True, eq=False)
class PeriodicCoefficient:
    """γ-periodic function sampled at t = k·h, k = 0..γ/h - 1, interpolated linearly (with wrap)."""

    grid: Grid
    period: float
    samples: np.ndarray
    sign_class: SignClass = SignClass.NONE

    def __post_init__(self) -> None:
        """Validate period alignment, sample count and declared sign."""
        if not self.period > 0:
            msg = f"period must be positive, got {self.period}"
            raise InvalidArgumentError(msg)
        count = self.grid.steps(self.period, "period")
        samples = np.array(self.samples, dtype=float)
        if samples.shape != (count,):
            msg = f"period {self.period} on n_sub={self.grid.n_sub} needs {count} samples, got shape {samples.shape}"
            raise InvalidArgumentError(msg)
        if not np.all(np.isfinite(samples)):
            msg = "coefficient samples must be finite"
            raise InvalidArgumentError(msg)
        sign_class = SignClass(self.sign_class)
        if sign_class is SignClass.NONNEGATIVE and np.any(samples < 0):
            msg = "coefficient declared nonnegative has negative samples"
            raise InvalidArgumentError(msg)
        if sign_class is SignClass.NONPOSITIVE and np.any(samples > 0):
            msg = "coefficient declared nonpositive has positive samples"
            raise InvalidArgumentError(msg)
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "sign_class", sign_class)

    @classmethod
    def from_samples(
        cls, grid: Grid, period: float, samples: np.ndarray, sign_class: SignClass | None = None
    ) -> "PeriodicCoefficient":
        """Build from node samples, inferring the sign class when not declared."""
        samples = np.asarray(samples, dtype=float)
        return cls(grid, period, samples, sign_class or infer_sign_class(samples))

    @classmethod
    def from_function(
        cls,
        grid: Grid,
        period: float,
        func: Callable[[np.ndarray], np.ndarray],
        sign_class: SignClass | None = None,
    ) -> "PeriodicCoefficient":
        """Sample a vectorized function over one period."""
        times = np.arange(grid.steps(period, "period")) / grid.n_sub
        return cls.from_samples(grid, period, np.broadcast_to(func(times), times.shape), sign_class)

    @classmethod
    def constant(cls, grid: Grid, value: float, period: float = 1.0) -> "PeriodicCoefficient":
        """Constant coefficient."""
        return cls.from_function(grid, period, lambda t: np.full_like(t, float(value)))

    @classmethod
    def sinusoid(
        cls,
        grid: Grid,
        mean: float,
        amplitude: float,
        frequency: int = 1,
        period: float = 1.0,
        phase: float = 0.0,
    ) -> "PeriodicCoefficient":
        """mean + amplitude·sin(2π·frequency·t/period + phase)."""
        return cls.from_function(
            grid,
            period,
            lambda t: mean + amplitude * np.sin(2.0 * np.pi * frequency * t / period + phase),
        )

    @property
    def steps_per_period(self) -> int:
        """Number of samples per period."""
        return self.samples.size

    def node_values(self, start_step: int, count: int) -> np.ndarray:
        """Values at t = (start_step + i)·h, i = 0..count-1."""
        return self.samples[(start_step + np.arange(count)) % self.steps_per_period]

    def __call__(self, t: float | np.ndarray) -> np.ndarray:
        """Evaluate the periodic piecewise-linear interpolant."""
        scaled = np.asarray(t, dtype=float) * self.grid.n_sub
        cell = np.floor(scaled)
        frac = scaled - cell
        left = self.samples[cell.astype(np.int64) % self.steps_per_period]
        right = self.samples[(cell.astype(np.int64) + 1) % self.steps_per_period]
        return left + frac * (right - left)

    def antiderivative(self, t: float | np.ndarray) -> np.ndarray:
        """Exact ∫_0^t of the interpolant, for any real t."""
        h = self.grid.h
        closed = np.append(self.samples, self.samples[0])
        cumulative = np.concatenate([[0.0], np.cumsum(0.5 * h * (closed[:-1] + closed[1:]))])
        total = cumulative[-1]

        scaled = np.asarray(t, dtype=float) * self.grid.n_sub
        cell = np.floor(scaled)
        frac = scaled - cell
        turns, local = np.divmod(cell.astype(np.int64), self.steps_per_period)
        left = closed[local]
        right = closed[local + 1]
        partial = h * (frac * left + 0.5 * frac**2 * (right - left))
        return turns * total + cumulative[local] + partial

    def integral(self, a: float, b: float) -> float:
        """∫_a^b of the interpolant."""
        return float(self.antiderivative(b) - self.antiderivative(a))

    def mean(self) -> float:
        """Average over one period."""
        return self.integral(0.0, self.period) / self.period

    def abs_integral(self) -> float:
        """∫_0^γ |·| by the trapezoid rule on |samples| (exact when the sign is constant on cells)."""
        closed = np.abs(np.append(self.samples, self.samples[0]))
        return float(0.5 * self.grid.h * np.sum(closed[:-1] + closed[1:]))

    def satisfies_parity(self, m: int) -> bool:
        """Whether (-1)^m·f >= 0 at every node."""
        return bool(np.all((-1) ** m * self.samples >= 0))

    def signed_extremum(self, m: int) -> float:
        """The constant c with (-1)^m c = min((-1)^m f): the extreme value on the side of zero."""
        sign = (-1) ** m
        return float(sign * np.min(sign * self.samples))

    def affine(self, scale: float, shift: float = 0.0) -> "PeriodicCoefficient":
        """scale·f + shift on the same grid and period."""
        return PeriodicCoefficient.from_samples(self.grid, self.period, scale * self.samples + shift)

    def to_dict(self) -> dict[str, Any]:
        """Convert coefficient to dictionary."""
        return {
            "n_sub": self.grid.n_sub,
            "period": self.period,
            "sign_class": str(self.sign_class),
            "mean": self.mean(),
            "min": float(self.samples.min()),
            "max": float(self.samples.max()),
        }


@dataclass(frozen=True, eq=False)
class DdeSystem:
    """x'(t) = -α(t)x(t) - β(t)x(t-1) with α, β sharing grid and period."""

    alpha: PeriodicCoefficient
    beta: PeriodicCoefficient
    parity: int | None = None

    def __post_init__(self) -> None:
        """Validate compatibility and the declared sign hypothesis."""
        if self.alpha.grid != self.beta.grid:
            msg = "alpha and beta must share the same grid"
            raise InvalidArgumentError(msg)
        if not np.isclose(self.alpha.period, self.beta.period):
            msg = "alpha and beta must share the same period"
            raise InvalidArgumentError(msg)
        if self.parity is not None and not self.beta.satisfies_parity(self.parity):
            msg = f"beta violates the sign hypothesis (-1)^m beta >= 0 for m={self.parity}"
            raise InvalidArgumentError(msg)

    @classmethod
    def constant(cls, grid: Grid, alpha0: float, beta0: float, period: float = 1.0) -> "DdeSystem":
        """Constant-coefficient system."""
        return cls(
            PeriodicCoefficient.constant(grid, alpha0, period),
            PeriodicCoefficient.constant(grid, beta0, period),
        )

    @property
    def grid(self) -> Grid:
        """Shared grid."""
        return self.alpha.grid

    @property
    def period(self) -> float:
        """Shared period γ."""
        return self.alpha.period

    def is_constant(self) -> bool:
        """Whether both coefficients are constant."""
        return bool(np.ptp(self.alpha.samples) == 0 and np.ptp(self.beta.samples) == 0)

    def to_dict(self) -> dict[str, Any]:
        """Convert system to dictionary."""
        return {"alpha": self.alpha.to_dict(), "beta": self.beta.to_dict(), "parity": self.parity}
