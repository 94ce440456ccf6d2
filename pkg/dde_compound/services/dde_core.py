"""Transformation to the delay-only form and the method-of-steps solver.

The transformed equation y'(t) = -b(t)y(t-1) is advanced by the explicit step
formula: for θ <= -η the new segment is a shift of the old one, otherwise

    y_{τ+η}(θ) = ψ(0) - ∫_{-1}^{η+θ-1} b(τ+1+t) ψ(t) dt.

With ψ and b piecewise linear on the grid, the integral is exact cellwise, so
the only discretization error is the interpolation of the data itself.
"""

from collections.abc import Callable

import numpy as np

from dde_compound.models.coefficient import DdeSystem, PeriodicCoefficient
from dde_compound.models.grid import Grid, Segment, Trajectory
from dde_compound.services.segfun import cumulative_integral, product_cell_weights
from dde_compound.utils.errors import InvalidArgumentError, NumericFailureError
from dde_compound.utils.logging import get_logger

logger = get_logger(__name__)


def transform(system: DdeSystem) -> tuple[Callable[[np.ndarray], np.ndarray], PeriodicCoefficient]:
    """Remove the instantaneous term.

    Returns
    -------
        (mu, b) with mu(t) = exp(∫_0^t α) and b(t) = β(t)·exp(∫_{t-1}^t α),
        so that y = mu·x solves y'(t) = -b(t)y(t-1). b inherits β's sign class.

    """
    alpha = system.alpha
    times = np.arange(alpha.steps_per_period) / alpha.grid.n_sub
    window = alpha.antiderivative(times) - alpha.antiderivative(times - 1.0)
    b = PeriodicCoefficient(
        alpha.grid, alpha.period, system.beta.samples * np.exp(window), system.beta.sign_class
    )

    def mu(t: np.ndarray) -> np.ndarray:
        return np.exp(alpha.antiderivative(t))

    return mu, b


def step_block(b: PeriodicCoefficient, tau_step: int, eta_steps: int, block: np.ndarray) -> np.ndarray:
    """Advance a batch of segments (last axis = nodes) from τ = tau_step·h by η = eta_steps·h <= 1."""
    grid = b.grid
    n = grid.n_sub
    if not 1 <= eta_steps <= n:
        msg = f"step length must lie in (0, 1], got {eta_steps}/{n}"
        raise InvalidArgumentError(msg)
    w_left, w_right = product_cell_weights(b.node_values(tau_step, n + 1), grid.h)
    table = cumulative_integral(block, -1, w_left, w_right)

    out = np.empty_like(block)
    cut = n - eta_steps
    out[..., : cut + 1] = block[..., eta_steps:]
    out[..., cut + 1 :] = block[..., n : n + 1] - table[..., 1 : eta_steps + 1]
    return out


def _step_schedule(grid: Grid, tau: float, horizon_steps: int) -> list[tuple[int, int]]:
    """(start step, length) pairs: unit steps first, the remainder last."""
    start = grid.steps(tau, "tau")
    n = grid.n_sub
    schedule = []
    whole, rest = divmod(horizon_steps, n)
    for i in range(whole):
        schedule.append((start + i * n, n))
    if rest:
        schedule.append((start + whole * n, rest))
    return schedule


def evolve_block(b: PeriodicCoefficient, tau: float, t_end: float, block: np.ndarray) -> np.ndarray:
    """Final segments at t_end of a batch of initial segments given at τ."""
    grid = b.grid
    horizon = grid.steps(t_end, "t_end") - grid.steps(tau, "tau")
    if horizon < 0:
        msg = f"t_end={t_end} precedes tau={tau}"
        raise InvalidArgumentError(msg)
    current = np.asarray(block, dtype=float)
    for start, length in _step_schedule(grid, tau, horizon):
        current = step_block(b, start, length, current)
    _check_finite(current)
    return current


def step(b: PeriodicCoefficient, tau: float, eta: float, psi: Segment) -> Segment:
    """y_{τ+η} from y_τ = ψ for the transformed equation; η > 1 is a composition of steps.

    Args:
    ----
        b: Transformed coefficient
        tau: Start time (grid-aligned)
        eta: Step length (grid-aligned, positive)
        psi: Segment at τ

    Returns:
    -------
        Segment at τ + η

    """
    grid = b.grid
    if psi.grid != grid:
        msg = "segment and coefficient grids differ"
        raise InvalidArgumentError(msg)
    if grid.steps(eta, "eta") <= 0:
        msg = f"eta must be positive, got {eta}"
        raise InvalidArgumentError(msg)
    return Segment(grid, evolve_block(b, tau, tau + eta, psi.values))


def solve(b: PeriodicCoefficient, tau: float, t_end: float, phi: Segment) -> Trajectory:
    """Trajectory of y'(t) = -b(t)y(t-1), y_τ = φ, sampled on [τ - 1, t_end]."""
    grid = b.grid
    if phi.grid != grid:
        msg = "segment and coefficient grids differ"
        raise InvalidArgumentError(msg)
    horizon = grid.steps(t_end, "T") - grid.steps(tau, "tau")
    if horizon < 0:
        msg = f"T={t_end} precedes tau={tau}"
        raise InvalidArgumentError(msg)

    pieces = [phi.values]
    current = phi.values
    for start, length in _step_schedule(grid, tau, horizon):
        current = step_block(b, start, length, current)
        pieces.append(current[grid.n_sub - length + 1 :])
    samples = np.concatenate(pieces)
    _check_finite(samples)
    logger.debug("Solved on [%s, %s] with %d samples", tau - 1, t_end, samples.size)
    return Trajectory(grid, tau, samples)


def solve_untransformed(system: DdeSystem, tau: float, t_end: float, phi: Segment) -> Trajectory:
    """Trajectory of x'(t) = -α(t)x(t) - β(t)x(t-1), x_τ = φ, via x = y / mu."""
    mu, b = transform(system)
    grid = system.grid
    initial = Segment(grid, mu(tau + grid.nodes) * phi.values)
    transformed = solve(b, tau, t_end, initial)
    return Trajectory(grid, tau, transformed.samples / mu(transformed.times))


def evolve_block_untransformed(system: DdeSystem, tau: float, t_end: float, block: np.ndarray) -> np.ndarray:
    """Batched untransformed evolution of initial segments at τ to their segments at t_end."""
    mu, b = transform(system)
    nodes = system.grid.nodes
    final = evolve_block(b, tau, t_end, np.asarray(block, dtype=float) * mu(tau + nodes))
    return final / mu(t_end + nodes)


def _check_finite(values: np.ndarray) -> None:
    if not np.all(np.isfinite(values)):
        msg = "evolution produced non-finite values"
        raise NumericFailureError(msg)
