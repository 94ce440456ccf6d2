"""Spectrum and monodromy containers."""

from dataclasses import dataclass
from typing import Any

import numpy as np
import pandas as pd

from dde_compound.models.grid import Grid


@dataclass(frozen=True)
class ComplexSpectrum:
    """Distinct eigenvalues with algebraic multiplicities.

    Ordered by descending modulus; near-equal moduli by descending real,
    then imaginary part. Values with modulus below ``floor`` are not
    trusted (discretization floor).
    """

    values: tuple[complex, ...]
    multiplicities: tuple[int, ...]
    floor: float = 0.0

    def __post_init__(self) -> None:
        """Check that both sequences line up."""
        if len(self.values) != len(self.multiplicities):
            msg = "values and multiplicities must have the same length"
            raise ValueError(msg)

    @property
    def dimension(self) -> int:
        """Sum of multiplicities."""
        return int(sum(self.multiplicities))

    def expanded(self) -> np.ndarray:
        """Eigenvalues repeated by multiplicity, in spectral order."""
        if not self.values:
            return np.zeros(0, dtype=complex)
        return np.repeat(np.array(self.values, dtype=complex), self.multiplicities)

    def truncated(self, count: int) -> "ComplexSpectrum":
        """Keep the first ``count`` eigenvalues counted with multiplicity."""
        values: list[complex] = []
        mults: list[int] = []
        left = count
        for value, mult in zip(self.values, self.multiplicities, strict=True):
            if left <= 0:
                break
            values.append(value)
            mults.append(min(mult, left))
            left -= mult
        return ComplexSpectrum(tuple(values), tuple(mults), self.floor)

    def is_reliable(self, value: complex) -> bool:
        """Whether ``value`` lies above the discretization floor."""
        return abs(value) >= self.floor

    def to_frame(self) -> pd.DataFrame:
        """Tabulate as ``re,im,mult``."""
        values = np.array(self.values, dtype=complex)
        return pd.DataFrame({"re": values.real, "im": values.imag, "mult": np.array(self.multiplicities, dtype=int)})

    def to_dict(self) -> dict[str, Any]:
        """Convert spectrum to dictionary."""
        return {
            "values": [[float(np.real(v)), float(np.imag(v))] for v in self.values],
            "multiplicities": list(self.multiplicities),
            "floor": self.floor,
        }


@dataclass(frozen=True, eq=False)
class MonodromyMatrix:
    """Matrix of the discrete period map U(τ0 + γ, τ0) in the hat-function basis of the grid."""

    grid: Grid
    period: float
    tau0: float
    entries: np.ndarray

    @property
    def dimension(self) -> int:
        """Matrix size n_sub + 1."""
        return self.entries.shape[0]

    @property
    def floor(self) -> float:
        """Multipliers below 10·h² are dominated by discretization error."""
        return 10.0 * self.grid.h**2

    def inf_norm(self) -> float:
        """Operator norm in the nodal sup-norm (maximum absolute row sum)."""
        return float(np.max(np.sum(np.abs(self.entries), axis=1)))
