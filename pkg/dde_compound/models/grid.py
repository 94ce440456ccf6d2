"""Grid, segment, trajectory and simplex-grid types."""

from collections.abc import Callable, Sequence
from dataclasses import dataclass
from functools import cached_property, lru_cache
from itertools import permutations
from typing import Any, Literal

import numpy as np
import pandas as pd
from scipy.special import comb

from dde_compound.config import get_settings
from dde_compound.utils.errors import CapacityError, InvalidArgumentError

# Relative slack when snapping a time onto the grid.
ALIGN_TOLERANCE = 1e-9

SimplexIndex = tuple[int, ...]
CubeFill = Literal["antisymmetric", "symmetric", "sorted"]


def permutation_sign(perm: Sequence[int]) -> int:
    """Sign of a permutation given as a sequence of distinct integers (inversion count)."""
    inversions = sum(1 for i in range(len(perm)) for j in range(i + 1, len(perm)) if perm[i] > perm[j])
    return -1 if inversions % 2 else 1


@dataclass(frozen=True)
class Grid:
    """Uniform grid on the delay interval [-1, 0] with ``n_sub`` cells of width ``h = 1/n_sub``."""

    n_sub: int

    def __post_init__(self) -> None:
        """Validate the subdivision count."""
        if isinstance(self.n_sub, bool) or not isinstance(self.n_sub, int | np.integer) or self.n_sub < 1:
            msg = f"n_sub must be a positive integer, got {self.n_sub!r}"
            raise InvalidArgumentError(msg)

    @property
    def h(self) -> float:
        """Cell width."""
        return 1.0 / self.n_sub

    @cached_property
    def nodes(self) -> np.ndarray:
        """Node abscissae θ_j = -1 + j·h, with both endpoints exact."""
        nodes = (np.arange(self.n_sub + 1, dtype=float) - self.n_sub) / self.n_sub
        nodes.setflags(write=False)
        return nodes

    def steps(self, t: float, name: str = "time") -> int:
        """Return the integer k with t = k·h, or raise when t is not grid-aligned."""
        scaled = float(t) * self.n_sub
        k = round(scaled)
        if not np.isfinite(scaled) or abs(scaled - k) > ALIGN_TOLERANCE * max(1.0, abs(scaled)):
            msg = f"{name}={t} is not a multiple of h=1/{self.n_sub}"
            raise InvalidArgumentError(msg)
        return int(k)

    def index_of(self, theta: float) -> int:
        """Node index j of a grid abscissa θ ∈ [-1, 0]."""
        j = self.steps(theta, "theta") + self.n_sub
        if not 0 <= j <= self.n_sub:
            msg = f"theta={theta} lies outside [-1, 0]"
            raise InvalidArgumentError(msg)
        return j

    def time(self, k: int) -> float:
        """Time of the absolute step index k."""
        return k / self.n_sub

    def to_dict(self) -> dict[str, Any]:
        """Convert grid to dictionary."""
        return {"n_sub": self.n_sub, "h": self.h}


@dataclass(frozen=True, eq=False)
class Segment:
    """Function on [-1, 0] given by its values at the grid nodes, interpolated linearly."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self) -> None:
        """Validate and freeze the node values."""
        values = np.array(self.values, dtype=float)
        if values.shape != (self.grid.n_sub + 1,):
            msg = f"segment needs {self.grid.n_sub + 1} node values, got shape {values.shape}"
            raise InvalidArgumentError(msg)
        if not np.all(np.isfinite(values)):
            msg = "segment values must be finite"
            raise InvalidArgumentError(msg)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_function(cls, grid: Grid, func: Callable[[np.ndarray], np.ndarray]) -> "Segment":
        """Sample a vectorized function of θ at the nodes."""
        return cls(grid, np.broadcast_to(func(grid.nodes), grid.nodes.shape))

    @classmethod
    def constant(cls, grid: Grid, value: float) -> "Segment":
        """Constant segment."""
        return cls(grid, np.full(grid.n_sub + 1, float(value)))

    @property
    def theta(self) -> np.ndarray:
        """Node abscissae."""
        return self.grid.nodes

    def __call__(self, theta: float | np.ndarray) -> float | np.ndarray:
        """Evaluate the piecewise-linear interpolant."""
        return np.interp(theta, self.grid.nodes, self.values)

    def sup_norm(self) -> float:
        """Maximum absolute node value."""
        return float(np.max(np.abs(self.values)))


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Samples x(t0 - 1 + k·h), k = 0, 1, ..., of a solution started at time t0."""

    grid: Grid
    t0: float
    samples: np.ndarray

    def __post_init__(self) -> None:
        """Validate alignment and length."""
        self.grid.steps(self.t0, "t0")
        samples = np.array(self.samples, dtype=float)
        if samples.ndim != 1 or samples.size < self.grid.n_sub + 1:
            msg = "trajectory must hold at least one full segment of samples"
            raise InvalidArgumentError(msg)
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)

    @classmethod
    def from_function(
        cls, grid: Grid, t0: float, t_end: float, func: Callable[[np.ndarray], np.ndarray]
    ) -> "Trajectory":
        """Sample a vectorized function of time on [t0 - 1, t_end]."""
        first = grid.steps(t0, "t0") - grid.n_sub
        last = grid.steps(t_end, "t_end")
        if last < first + grid.n_sub:
            msg = f"t_end={t_end} precedes t0={t0}"
            raise InvalidArgumentError(msg)
        times = np.arange(first, last + 1) / grid.n_sub
        return cls(grid, t0, np.broadcast_to(func(times), times.shape))

    @property
    def first_step(self) -> int:
        """Absolute step index of the first sample."""
        return self.grid.steps(self.t0, "t0") - self.grid.n_sub

    @property
    def times(self) -> np.ndarray:
        """Sample times."""
        return (self.first_step + np.arange(self.samples.size)) / self.grid.n_sub

    @property
    def t_end(self) -> float:
        """Time of the last sample."""
        return (self.first_step + self.samples.size - 1) / self.grid.n_sub

    def segment_at(self, t: float) -> Segment:
        """Return the segment x_t(θ) = x(t + θ)."""
        offset = self.grid.steps(t, "t") - self.grid.n_sub - self.first_step
        if offset < 0 or offset + self.grid.n_sub >= self.samples.size:
            msg = f"t={t} is not covered by the trajectory on [{self.t0 - 1}, {self.t_end}]"
            raise InvalidArgumentError(msg)
        return Segment(self.grid, self.samples[offset : offset + self.grid.n_sub + 1])

    def value_at(self, t: float | np.ndarray) -> float | np.ndarray:
        """Evaluate the piecewise-linear interpolant of the samples."""
        return np.interp(t, self.times, self.samples)

    def to_frame(self) -> pd.DataFrame:
        """Tabulate as ``t,x``."""
        return pd.DataFrame({"t": self.times, "x": self.samples})


@lru_cache(maxsize=32)
def simplex_table(m: int, n_sub: int) -> np.ndarray:
    """All nondecreasing index tuples 0 <= j_1 <= ... <= j_m <= n_sub, lexicographically ordered.

    Returns
    -------
        Read-only integer array of shape (C(n_sub+m, m), m)

    """
    table = np.arange(n_sub + 1, dtype=np.intp)[:, None]
    for _ in range(1, m):
        last = table[:, -1]
        repeats = n_sub + 1 - last
        starts = np.cumsum(repeats) - repeats
        total = int(repeats.sum())
        column = np.arange(total) - np.repeat(starts, repeats) + np.repeat(last, repeats)
        table = np.column_stack([np.repeat(table, repeats, axis=0), column])
    table.setflags(write=False)
    return table


def simplex_size(m: int, n_sub: int) -> int:
    """Number of nodes of the m-simplex grid."""
    return int(comb(n_sub + m, m, exact=True))


def simplex_rank(points: np.ndarray, n_sub: int) -> np.ndarray:
    """Lexicographic position of nondecreasing index tuples inside ``simplex_table``."""
    points = np.atleast_2d(np.asarray(points, dtype=np.intp))
    m = points.shape[1]
    rank = np.zeros(points.shape[0], dtype=float)
    previous = np.zeros(points.shape[0], dtype=np.intp)
    for i in range(m):
        remaining = m - i - 1
        upper = comb(n_sub - previous + remaining + 1, remaining + 1)
        lower = comb(n_sub - points[:, i] + remaining + 1, remaining + 1)
        rank += upper - lower
        previous = points[:, i]
    return np.rint(rank).astype(np.intp)


def validate_simplex_index(index: Sequence[int], m: int, grid: Grid) -> SimplexIndex:
    """Check that ``index`` is a nondecreasing m-tuple of node indices."""
    index = tuple(int(j) for j in index)
    if len(index) != m:
        msg = f"simplex index {index} must have {m} entries"
        raise InvalidArgumentError(msg)
    if any(j < 0 or j > grid.n_sub for j in index) or any(a > b for a, b in zip(index, index[1:], strict=False)):
        msg = f"simplex index {index} is not a nondecreasing tuple in [0, {grid.n_sub}]"
        raise InvalidArgumentError(msg)
    return index


def check_cube_capacity(m: int, grid: Grid) -> None:
    """Raise when a full (n_sub+1)^m cube would exceed the configured ceiling."""
    entries = (grid.n_sub + 1) ** m
    ceiling = get_settings().max_cube_entries
    if entries > ceiling:
        msg = f"cube storage for m={m}, n_sub={grid.n_sub} needs {entries} entries (ceiling {ceiling})"
        raise CapacityError(msg)


@dataclass(frozen=True, eq=False)
class WedgeGrid:
    """Values of a function on the simplex T_m, one per nondecreasing node tuple.

    For an antisymmetric φ on [-1,0]^m the stored values determine φ
    everywhere through φ(θ_σ) = sgn(σ)·φ(θ).
    """

    m: int
    grid: Grid
    values: np.ndarray

    def __post_init__(self) -> None:
        """Validate order and length."""
        max_order = get_settings().max_simplex_order
        if not 1 <= self.m <= max_order:
            msg = f"m must lie in [1, {max_order}], got {self.m}"
            raise InvalidArgumentError(msg)
        values = np.array(self.values, dtype=float)
        expected = simplex_size(self.m, self.grid.n_sub)
        if values.shape != (expected,):
            msg = f"simplex grid for m={self.m}, n_sub={self.grid.n_sub} needs {expected} values, got shape {values.shape}"
            raise InvalidArgumentError(msg)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def zeros(cls, m: int, grid: Grid) -> "WedgeGrid":
        """Zero function."""
        return cls(m, grid, np.zeros(simplex_size(m, grid.n_sub)))

    @classmethod
    def from_function(cls, m: int, grid: Grid, func: Callable[[np.ndarray], np.ndarray]) -> "WedgeGrid":
        """Sample ``func`` at the simplex nodes; ``func`` maps an (N, m) array of θ to N values."""
        theta = grid.nodes[simplex_table(m, grid.n_sub)]
        return cls(m, grid, np.broadcast_to(func(theta), (theta.shape[0],)))

    @classmethod
    def from_cube(cls, cube: np.ndarray, grid: Grid) -> "WedgeGrid":
        """Restrict a full (n_sub+1)^m array to the sorted cells."""
        cube = np.asarray(cube, dtype=float)
        if cube.shape != (grid.n_sub + 1,) * cube.ndim:
            msg = f"cube shape {cube.shape} does not match n_sub={grid.n_sub}"
            raise InvalidArgumentError(msg)
        points = simplex_table(cube.ndim, grid.n_sub)
        return cls(cube.ndim, grid, cube[tuple(points.T)])

    @property
    def points(self) -> np.ndarray:
        """Index tuples of the stored values."""
        return simplex_table(self.m, self.grid.n_sub)

    @property
    def theta(self) -> np.ndarray:
        """Abscissae of the stored values, shape (N, m)."""
        return self.grid.nodes[self.points]

    def with_values(self, values: np.ndarray) -> "WedgeGrid":
        """Same simplex grid, new values."""
        return WedgeGrid(self.m, self.grid, values)

    def value_at(self, index: Sequence[int]) -> float:
        """Stored value at a nondecreasing index tuple."""
        index = validate_simplex_index(index, self.m, self.grid)
        return float(self.values[simplex_rank(np.array([index]), self.grid.n_sub)[0]])

    def sup_norm(self) -> float:
        """Maximum absolute finite value."""
        return float(np.nanmax(np.abs(self.values)))

    def to_cube(self, fill: CubeFill = "antisymmetric") -> np.ndarray:
        """Expand to the full cube [-1,0]^m sampled at the nodes.

        Sorted cells always hold the stored value. The other cells follow the
        antisymmetric extension (zero where indices repeat), the symmetric
        extension, or stay zero for ``fill="sorted"``.
        """
        check_cube_capacity(self.m, self.grid)
        n = self.grid.n_sub
        cube = np.zeros((n + 1,) * self.m)
        points = self.points
        if fill != "sorted" and self.m > 1:
            if fill == "antisymmetric":
                distinct = np.all(np.diff(points, axis=1) > 0, axis=1)
                spread = np.where(distinct, self.values, 0.0)
            else:
                spread = self.values
            for perm in permutations(range(self.m)):
                if perm == tuple(range(self.m)):
                    continue
                sign = permutation_sign(perm) if fill == "antisymmetric" else 1
                cube[tuple(points[:, perm].T)] = sign * spread
        cube[tuple(points.T)] = self.values
        return cube
