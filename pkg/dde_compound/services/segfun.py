"""Grid construction, exact piecewise-linear integration and simplex-grid utilities."""

from collections.abc import Sequence
from itertools import product

import numpy as np
from numpy.polynomial import Polynomial

from dde_compound.models.grid import (
    ALIGN_TOLERANCE,
    Grid,
    Segment,
    SimplexIndex,
    Trajectory,
    WedgeGrid,
    permutation_sign,
    simplex_table,
)
from dde_compound.utils.errors import InvalidArgumentError
from dde_compound.utils.logging import get_logger

logger = get_logger(__name__)


def make_grid(n_sub: int) -> Grid:
    """Create the uniform grid of [-1, 0] with ``n_sub`` cells.

    Args:
    ----
        n_sub: Number of cells, at least 2

    Returns:
    -------
        Grid with nodes θ_j = -1 + j/n_sub

    """
    grid = Grid(n_sub)
    if grid.n_sub < 2:
        msg = f"n_sub must be at least 2, got {n_sub}"
        raise InvalidArgumentError(msg)
    return grid


def integrate_samples(values: np.ndarray, start: float, h: float, a: float, b: float) -> float:
    """Exact ∫_a^b of the piecewise-linear interpolant of ``values`` sampled at start + i·h.

    Partial cells at either end are integrated exactly, so the result is
    additive in the interval for arbitrary real endpoints inside the span.
    """
    values = np.asarray(values, dtype=float)
    span = (values.size - 1) * h
    slack = ALIGN_TOLERANCE * max(1.0, span)
    if a > b:
        return -integrate_samples(values, start, h, b, a)
    if a < start - slack or b > start + span + slack:
        msg = f"interval [{a}, {b}] is outside the sampled span [{start}, {start + span}]"
        raise InvalidArgumentError(msg)

    cumulative = np.concatenate([[0.0], np.cumsum(0.5 * h * (values[:-1] + values[1:]))])

    def primitive(x: float) -> float:
        s = min(max((x - start) / h, 0.0), values.size - 1.0)
        cell = min(int(np.floor(s)), values.size - 2)
        frac = s - cell
        return cumulative[cell] + h * (frac * values[cell] + 0.5 * frac**2 * (values[cell + 1] - values[cell]))

    return float(primitive(b) - primitive(a))


def integrate_partial(f: Segment, a: float, b: float) -> float:
    """∫_a^b f(θ) dθ for -1 <= a <= b <= 0, exact for the piecewise-linear segment."""
    if not -1.0 - ALIGN_TOLERANCE <= a <= b <= ALIGN_TOLERANCE:
        msg = f"need -1 <= a <= b <= 0, got a={a}, b={b}"
        raise InvalidArgumentError(msg)
    return integrate_samples(f.values, -1.0, f.grid.h, a, b)


def product_cell_weights(weight_nodes: np.ndarray, h: float) -> tuple[np.ndarray, np.ndarray]:
    """Cell weights (w_left, w_right) with ∫_cell w·f = w_left·f_c + w_right·f_{c+1}.

    Exact when both the weight and f are linear on the cell.
    """
    w = np.asarray(weight_nodes, dtype=float)
    left = h * (2.0 * w[:-1] + w[1:]) / 6.0
    right = h * (w[:-1] + 2.0 * w[1:]) / 6.0
    return left, right


def trapezoid_cell_weights(n_sub: int) -> tuple[np.ndarray, np.ndarray]:
    """Unweighted cell weights (h/2, h/2)."""
    half = np.full(n_sub, 0.5 / n_sub)
    return half, half


def cumulative_integral(values: np.ndarray, axis: int, w_left: np.ndarray, w_right: np.ndarray) -> np.ndarray:
    """Running cellwise integral along ``axis``: C[0] = 0, C[q] = Σ_{c<q} w_left·F_c + w_right·F_{c+1}."""
    moved = np.moveaxis(values, axis, -1)
    cells = moved[..., :-1] * w_left + moved[..., 1:] * w_right
    out = np.zeros_like(moved)
    np.cumsum(cells, axis=-1, out=out[..., 1:])
    return np.moveaxis(out, -1, axis)


class PrefixTable:
    """Cumulative integrals of a cube along any subset of axes, for batched box integrals.

    A box integral pins some axes at node indices and integrates the others
    over node-aligned intervals, evaluated by inclusion-exclusion on the
    corresponding cumulative table.
    """

    def __init__(self, cube: np.ndarray, w_left: np.ndarray, w_right: np.ndarray) -> None:
        """Initialize with the sampled cube and the per-cell weights shared by all axes."""
        self.cube = cube
        self.w_left = w_left
        self.w_right = w_right
        self._tables: dict[tuple[int, ...], np.ndarray] = {(): cube}

    def table(self, axes: tuple[int, ...]) -> np.ndarray:
        """Cumulative table along ``axes`` (cached)."""
        axes = tuple(sorted(axes))
        if axes not in self._tables:
            parent = self.table(axes[:-1])
            self._tables[axes] = cumulative_integral(parent, axes[-1], self.w_left, self.w_right)
        return self._tables[axes]

    def box(
        self,
        pinned: dict[int, np.ndarray],
        ranges: dict[int, tuple[np.ndarray, np.ndarray]],
    ) -> np.ndarray:
        """Batched box integrals.

        Args:
        ----
            pinned: axis -> node index array (the integrand is evaluated there)
            ranges: axis -> (lo, hi) node index arrays (integrated over [lo, hi])

        Returns:
        -------
            One integral per batch entry

        """
        if len(pinned) + len(ranges) != self.cube.ndim:
            msg = "every cube axis must be either pinned or ranged"
            raise InvalidArgumentError(msg)
        axes = tuple(sorted(ranges))
        table = self.table(axes)
        total = 0.0
        for corner in product((0, 1), repeat=len(axes)):
            index: list[np.ndarray | None] = [None] * self.cube.ndim
            for axis, node in pinned.items():
                index[axis] = node
            sign = 1.0
            for bit, axis in zip(corner, axes, strict=True):
                lo, hi = ranges[axis]
                if bit:
                    index[axis] = hi
                else:
                    index[axis] = lo
                    sign = -sign
            total = total + sign * table[tuple(index)]
        return np.asarray(total, dtype=float)


def integrate_against_polynomial(
    values: np.ndarray, grid: Grid, weight: Polynomial, lo_index: int, hi_index: int
) -> float:
    """Exact ∫ weight(t)·f(t) dt over [θ_lo, θ_hi] for f piecewise linear at the nodes."""
    nodes = grid.nodes
    h = grid.h
    total = 0.0
    for cell in range(lo_index, hi_index):
        x0, x1 = nodes[cell], nodes[cell + 1]
        left = (weight * Polynomial([x1 / h, -1.0 / h])).integ()
        right = (weight * Polynomial([-x0 / h, 1.0 / h])).integ()
        total += values[cell] * (left(x1) - left(x0)) + values[cell + 1] * (right(x1) - right(x0))
    return float(total)


def simplex_points(m: int, grid: Grid) -> list[SimplexIndex]:
    """All nondecreasing node tuples of T_m in lexicographic order."""
    if not 1 <= m <= 6:
        msg = f"m must lie in [1, 6], got {m}"
        raise InvalidArgumentError(msg)
    return [tuple(int(j) for j in row) for row in simplex_table(m, grid.n_sub)]


def sort_with_sign(indices: Sequence[int]) -> tuple[SimplexIndex, int]:
    """Sort an index tuple; the sign is that of the sorting permutation, 0 on a repeat."""
    order = sorted(range(len(indices)), key=lambda i: indices[i])
    ordered = tuple(int(indices[i]) for i in order)
    if len(set(ordered)) < len(ordered):
        return ordered, 0
    return ordered, permutation_sign(order)


def antisym_eval(phi: WedgeGrid, theta: Sequence[float]) -> float:
    """Value of the antisymmetric function at an arbitrary grid point of [-1, 0]^m."""
    if len(theta) != phi.m:
        msg = f"expected {phi.m} coordinates, got {len(theta)}"
        raise InvalidArgumentError(msg)
    indices = [phi.grid.index_of(t) for t in theta]
    ordered, sign = sort_with_sign(indices)
    if sign == 0:
        return 0.0
    return sign * phi.value_at(ordered)


def wedge_from_solutions(trajs: Sequence[Trajectory], t: float) -> WedgeGrid:
    """(x¹ ∧ ... ∧ x^m)_t on T_m: det[x^i(t + θ_j)] at every simplex node."""
    if not trajs:
        msg = "need at least one trajectory"
        raise InvalidArgumentError(msg)
    grid = trajs[0].grid
    if any(traj.grid != grid for traj in trajs):
        msg = "all trajectories must share one grid"
        raise InvalidArgumentError(msg)
    m = len(trajs)
    segments = np.stack([traj.segment_at(t).values for traj in trajs])
    points = simplex_table(m, grid.n_sub)
    matrices = np.transpose(segments[:, points], (1, 0, 2))
    return WedgeGrid(m, grid, np.linalg.det(matrices))
