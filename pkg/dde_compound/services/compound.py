"""Evolution of m-fold compounds on the simplex grid and cone positivity certificates.

The compound operator W(τ+η, τ) = U(τ+η, τ)^{∧m} acts on antisymmetric
functions of m delay variables. Its value at θ ∈ T_m is given directly by
box integrals of the input weighted by products of b(τ+1+t_i); only values
of the input on T_m (sorted arguments) are ever read, so the cone
K_m = {φ >= 0 on T_m} is visibly preserved when (-1)^m b >= 0.
"""

from collections.abc import Sequence
from typing import Literal

import numpy as np

from dde_compound.config import get_settings
from dde_compound.models.coefficient import DdeSystem, PeriodicCoefficient
from dde_compound.models.grid import Grid, Segment, Trajectory, WedgeGrid, check_cube_capacity, simplex_table
from dde_compound.models.reports import CertReport, ConeReport
from dde_compound.services import dde_core, floquet, u0pos
from dde_compound.services.segfun import PrefixTable, product_cell_weights, wedge_from_solutions
from dde_compound.utils.errors import InvalidArgumentError
from dde_compound.utils.logging import get_logger
from dde_compound.utils.parallel import parallel_map

logger = get_logger(__name__)

ARule = Literal["smallest", "largest"]


def _check_same_grid(b: PeriodicCoefficient, phi: WedgeGrid) -> Grid:
    if b.grid != phi.grid:
        msg = "coefficient and simplex grid differ"
        raise InvalidArgumentError(msg)
    return b.grid


def admissible_a(points: np.ndarray, n_sub: int, eta_steps: int, rule: ARule = "smallest") -> np.ndarray:
    """Integer a with θ_a <= -η <= θ_{a+1}: the smallest or the largest admissible choice."""
    cut = n_sub - eta_steps
    if rule == "smallest":
        return np.count_nonzero(points < cut, axis=1)
    if rule == "largest":
        return np.count_nonzero(points <= cut, axis=1)
    msg = f"unknown rule for a: {rule}"
    raise InvalidArgumentError(msg)


def _wedge_values(
    table: PrefixTable, points: np.ndarray, n: int, e: int, a_values: np.ndarray
) -> np.ndarray:
    """Direct formula for one step of length e·h <= 1 at the given simplex nodes."""
    m = points.shape[1]
    out = np.empty(points.shape[0])
    # nodes sharing a share one box layout
    for a in np.unique(a_values):
        a = int(a)
        sel = a_values == a
        P = points[sel]
        # every shifted argument still lies in the history
        if a == m:
            out[sel] = table.cube[tuple((P + e).T)]
            continue
        shifted = [P[:, i] + e for i in range(a)]
        delayed = P + e - n

        # ∫ over m-a-1 variables of φ(t, η+θ_1..η+θ_a, 0)
        free = m - a - 1
        pinned = {free + i: shifted[i] for i in range(a)}
        pinned[m - 1] = np.full(P.shape[0], n)
        ranges = {r: (delayed[:, a + r], delayed[:, a + r + 1]) for r in range(free)}
        first = table.box(pinned, ranges)

        # ∫ over m-a variables of φ(t, η+θ_1..η+θ_a), first variable from -1
        free = m - a
        pinned = {free + i: shifted[i] for i in range(a)}
        ranges = {0: (np.zeros(P.shape[0], dtype=np.intp), delayed[:, a])}
        for r in range(1, free):
            ranges[r] = (delayed[:, a + r - 1], delayed[:, a + r])
        second = table.box(pinned, ranges)

        out[sel] = (-1) ** (a * m) * first + (-1) ** ((a + 1) * m) * second
    return out


def _single_step(
    b: PeriodicCoefficient, tau_step: int, eta_steps: int, phi: WedgeGrid, rule: ARule = "smallest"
) -> WedgeGrid:
    grid = phi.grid
    n = grid.n_sub
    w_left, w_right = product_cell_weights(b.node_values(tau_step, n + 1), grid.h)
    table = PrefixTable(phi.to_cube(), w_left, w_right)
    points = phi.points
    values = _wedge_values(table, points, n, eta_steps, admissible_a(points, n, eta_steps, rule))
    return phi.with_values(values)


def wedge_step(
    b: PeriodicCoefficient, tau: float, eta: float, phi: WedgeGrid, rule: ARule = "smallest"
) -> WedgeGrid:
    """W(τ+η, τ)φ on T_m for 0 < η <= 1.

    Args:
    ----
        b: Transformed coefficient
        tau: Start time (grid-aligned)
        eta: Step length in (0, 1] (grid-aligned)
        phi: Antisymmetric input given on T_m
        rule: Which admissible a to use; the result does not depend on it

    Returns:
    -------
        Output values on T_m

    """
    grid = _check_same_grid(b, phi)
    eta_steps = grid.steps(eta, "eta")
    if not 1 <= eta_steps <= grid.n_sub:
        msg = f"eta must lie in (0, 1], got {eta}"
        raise InvalidArgumentError(msg)
    check_cube_capacity(phi.m, grid)
    return _single_step(b, grid.steps(tau, "tau"), eta_steps, phi, rule)


def wedge_evolve(b: PeriodicCoefficient, tau: float, t_end: float, phi: WedgeGrid) -> WedgeGrid:
    """W(t_end, τ)φ as unit steps followed by one remainder step."""
    grid = _check_same_grid(b, phi)
    start = grid.steps(tau, "tau")
    horizon = grid.steps(t_end, "t") - start
    if horizon < 0:
        msg = f"t={t_end} precedes tau={tau}"
        raise InvalidArgumentError(msg)
    check_cube_capacity(phi.m, grid)
    whole, rest = divmod(horizon, grid.n_sub)
    current = phi
    for i in range(whole):
        current = _single_step(b, start + i * grid.n_sub, grid.n_sub, current)
    if rest:
        current = _single_step(b, start + whole * grid.n_sub, rest, current)
    logger.debug("Evolved m=%d compound over %d steps", phi.m, horizon)
    return current


def tensor_oracle_step(
    b: PeriodicCoefficient, tau: float, eta: float, cube: np.ndarray, order: Sequence[int] | None = None
) -> np.ndarray:
    """U(τ+η, τ)^{⊗m} on a full cube, applying the scalar step along one axis at a time (m <= 3)."""
    cube = np.asarray(cube, dtype=float)
    m = cube.ndim
    if not 1 <= m <= 3:
        msg = f"the tensor route supports m <= 3, got {m}"
        raise InvalidArgumentError(msg)
    grid = b.grid
    if cube.shape != (grid.n_sub + 1,) * m:
        msg = f"cube shape {cube.shape} does not match n_sub={grid.n_sub}"
        raise InvalidArgumentError(msg)
    tau_step = grid.steps(tau, "tau")
    eta_steps = grid.steps(eta, "eta")
    axes = list(order) if order is not None else list(range(m))
    if sorted(axes) != list(range(m)):
        msg = f"order must be a permutation of the axes, got {axes}"
        raise InvalidArgumentError(msg)
    for axis in axes:
        moved = np.moveaxis(cube, axis, -1)
        cube = np.moveaxis(dde_core.step_block(b, tau_step, eta_steps, moved), -1, axis)
    return cube


def m2_closed_form(b: PeriodicCoefficient, tau: float, phi: WedgeGrid, theta: Sequence[int]) -> float:
    """Two-variable one-step value written with two weighted quadrature vectors.

    [W(τ+1, τ)φ](θ1, θ2) = ∫_{θ1}^{θ2} b^{τ+1}(t) φ(t, 0) dt + v1ᵀ Φ v2, where
    v1 carries the b-weights on [-1, θ1], v2 those on [θ1, θ2] and Φ is the
    node matrix of φ.
    """
    if phi.m != 2:
        msg = f"closed form is for m = 2, got m={phi.m}"
        raise InvalidArgumentError(msg)
    grid = _check_same_grid(b, phi)
    j1, j2 = (int(j) for j in theta)
    if not 0 <= j1 <= j2 <= grid.n_sub:
        msg = f"theta index {theta} is not in T_2"
        raise InvalidArgumentError(msg)
    n = grid.n_sub
    w_left, w_right = product_cell_weights(b.node_values(grid.steps(tau, "tau"), n + 1), grid.h)

    def weight_vector(lo: int, hi: int) -> np.ndarray:
        vector = np.zeros(n + 1)
        vector[lo:hi] += w_left[lo:hi]
        vector[lo + 1 : hi + 1] += w_right[lo:hi]
        return vector

    matrix = phi.to_cube()
    v1 = weight_vector(0, j1)
    v2 = weight_vector(j1, j2)
    return float(v2 @ matrix[:, n] + v1 @ matrix @ v2)


def cone_check(phi: WedgeGrid, tolerance: float) -> ConeReport:
    """Whether φ(θ) >= -tolerance at every node of T_m."""
    finite = np.where(np.isfinite(phi.values), phi.values, np.inf)
    index = int(np.argmin(finite))
    min_value = float(finite[index])
    return ConeReport(
        min_value=min_value,
        argmin=tuple(int(j) for j in phi.points[index]),
        passed=bool(min_value >= -tolerance),
        tolerance=tolerance,
    )


def diagonal_vanishing_weight(theta: np.ndarray) -> np.ndarray:
    """Π_{i<j}(θ_j - θ_i): nonnegative on T_m and zero wherever two arguments coincide."""
    m = theta.shape[1]
    weight = np.ones(theta.shape[0])
    for i in range(m):
        for j in range(i + 1, m):
            weight *= theta[:, j] - theta[:, i]
    return weight


def random_cone_element(m: int, grid: Grid, rng: np.random.Generator, *, antisymmetric: bool = True) -> WedgeGrid:
    """Nonnegative random values on T_m; with ``antisymmetric`` they vanish on the diagonals."""
    theta = grid.nodes[simplex_table(m, grid.n_sub)]
    values = rng.random(theta.shape[0])
    if antisymmetric:
        values = values * diagonal_vanishing_weight(theta)
    return WedgeGrid(m, grid, values)


def _require_parity(b: PeriodicCoefficient, tau: float, eta: float, m: int) -> None:
    grid = b.grid
    window = b.node_values(grid.steps(tau, "tau"), grid.steps(eta, "eta") + 1)
    if np.any((-1) ** m * window < 0):
        msg = f"sign hypothesis (-1)^m b >= 0 fails on [{tau}, {tau + eta}] for m={m}"
        raise InvalidArgumentError(msg)


def positivity_certificate(
    b: PeriodicCoefficient,
    tau: float,
    eta: float,
    m: int,
    trial_count: int,
    seed: int,
    *,
    antisymmetric: bool = True,
    threads: int | None = None,
) -> CertReport:
    """Evolve seeded random cone elements and certify that every output stays in the cone.

    Args:
    ----
        b: Transformed coefficient with (-1)^m b >= 0 on [τ, τ+η]
        tau: Start time
        eta: Evolution time (any positive grid multiple)
        m: Compound order
        trial_count: Number of random inputs
        seed: Seed of the trial family; results do not depend on ``threads``
        antisymmetric: Whether inputs vanish on the diagonals
        threads: Worker threads

    Returns:
    -------
        CertReport with the worst normalized minimum over all trials

    """
    grid = b.grid
    if trial_count < 1:
        msg = f"trial_count must be positive, got {trial_count}"
        raise InvalidArgumentError(msg)
    if grid.steps(eta, "eta") <= 0:
        msg = f"eta must be positive, got {eta}"
        raise InvalidArgumentError(msg)
    _require_parity(b, tau, eta, m)
    check_cube_capacity(m, grid)
    relative = get_settings().cone_tolerance

    def run_trial(seed_sequence: np.random.SeedSequence) -> tuple[ConeReport, float]:
        phi = random_cone_element(m, grid, np.random.default_rng(seed_sequence), antisymmetric=antisymmetric)
        out = wedge_evolve(b, tau, tau + eta, phi)
        scale = max(phi.sup_norm(), out.sup_norm(), np.finfo(float).tiny)
        return cone_check(out, relative * scale), scale

    results = parallel_map(run_trial, np.random.SeedSequence(seed).spawn(trial_count), threads)
    normalized = [report.min_value / scale for report, scale in results]
    worst = int(np.argmin(normalized))
    worst_report = results[worst][0]
    passed = all(report.passed for report, _ in results)
    logger.info("Positivity certificate m=%d over %d trials: passed=%s", m, trial_count, passed)
    return CertReport(
        name="positivity",
        passed=passed,
        min_value=worst_report.min_value,
        argmin=list(worst_report.argmin) if worst_report.argmin is not None else None,
        tolerance=worst_report.tolerance,
        seed=seed,
        config_echo={
            "m": m,
            "tau": tau,
            "eta": eta,
            "n_sub": grid.n_sub,
            "trials": trial_count,
            "antisymmetric": antisymmetric,
        },
        details={"worst_trial": worst, "worst_normalized_min": normalized[worst]},
    )


def dominance_check(
    b1: PeriodicCoefficient,
    b2: PeriodicCoefficient,
    tau: float,
    eta: float,
    m: int,
    trial_count: int,
    seed: int,
) -> CertReport:
    """Certify W₁φ - W₂φ ∈ K_m for cone inputs when (-1)^m b1 >= (-1)^m b2 >= 0."""
    grid = b1.grid
    if b2.grid != grid:
        msg = "both coefficients must share one grid"
        raise InvalidArgumentError(msg)
    _require_parity(b2, tau, eta, m)
    start, count = grid.steps(tau, "tau"), grid.steps(eta, "eta") + 1
    sign = (-1) ** m
    if np.any(sign * b1.node_values(start, count) < sign * b2.node_values(start, count)):
        msg = f"ordering (-1)^m b1 >= (-1)^m b2 fails on [{tau}, {tau + eta}]"
        raise InvalidArgumentError(msg)
    relative = get_settings().cone_tolerance
    worst: ConeReport | None = None
    passed = True
    for seed_sequence in np.random.SeedSequence(seed).spawn(trial_count):
        phi = random_cone_element(m, grid, np.random.default_rng(seed_sequence))
        first = wedge_evolve(b1, tau, tau + eta, phi)
        second = wedge_evolve(b2, tau, tau + eta, phi)
        scale = max(first.sup_norm(), second.sup_norm(), np.finfo(float).tiny)
        report = cone_check(first.with_values(first.values - second.values), relative * scale)
        passed = passed and report.passed
        if worst is None or report.min_value < worst.min_value:
            worst = report
    return CertReport(
        name="dominance",
        passed=passed,
        min_value=worst.min_value,
        argmin=list(worst.argmin) if worst.argmin is not None else None,
        tolerance=worst.tolerance,
        seed=seed,
        config_echo={"m": m, "tau": tau, "eta": eta, "n_sub": grid.n_sub, "trials": trial_count},
    )


def determinant_sign_check(trajs: Sequence[Trajectory], times: Sequence[float]) -> CertReport:
    """Check that det[x^i(t + θ_j)] keeps one sign on T_m and never vanishes identically."""
    tolerance = get_settings().determinant_tolerance
    sign = 0.0
    worst = np.inf
    worst_at: list[int] | None = None
    worst_time = None
    vanishing_times: list[float] = []
    for t in times:
        wedge = wedge_from_solutions(trajs, t)
        scale = float(np.max(np.abs(wedge.values)))
        if scale == 0.0 or not np.isfinite(scale):
            vanishing_times.append(float(t))
            continue
        if sign == 0.0:
            sign = float(np.sign(wedge.values[np.argmax(np.abs(wedge.values))]))
        normalized = sign * wedge.values / scale
        index = int(np.argmin(normalized))
        if normalized[index] < worst:
            worst = float(normalized[index])
            worst_at = [int(j) for j in wedge.points[index]]
            worst_time = float(t)
    nonvanishing = not vanishing_times
    passed = bool(nonvanishing and sign != 0.0 and worst >= -tolerance)
    return CertReport(
        name="determinant_sign",
        passed=passed,
        min_value=float(worst) if np.isfinite(worst) else None,
        argmin=worst_at,
        tolerance=tolerance,
        details={
            "sign": sign,
            "worst_time": worst_time,
            "nonvanishing": nonvanishing,
            "vanishing_times": vanishing_times[:10],
            "times_checked": len(times),
        },
    )


def _leading_real_functions(pairs: Sequence[tuple[complex, object]], m: int) -> tuple[list[tuple[str, object]], bool]:
    """Pick m real generators (Re, Im parts) from eigen-pairs in spectral order.

    Returns the generators and whether a complex pair had to be split.
    """
    chosen: list[tuple[str, object]] = []
    split = False
    for value, vector in pairs:
        if len(chosen) >= m:
            break
        if abs(np.imag(value)) <= 1e-12 * max(1.0, abs(value)):
            chosen.append(("re", vector))
        elif np.imag(value) > 0:
            chosen.append(("re", vector))
            if len(chosen) < m:
                chosen.append(("im", vector))
            else:
                split = True
    return chosen, split


def leading_det_check(
    system: DdeSystem | tuple[float, float],
    m: int,
    window: tuple[float, float],
    grid: Grid | None = None,
) -> CertReport:
    """Sign and nonvanishing of the determinant built from the leading m-dimensional solution space.

    For constant coefficients (α₀, β₀) the leading solutions are Re/Im of
    e^{ζt} over the rightmost characteristic roots; for periodic systems they
    come from the leading monodromy eigenvectors at the window start.
    """
    if m < 1:
        msg = f"m must be positive, got {m}"
        raise InvalidArgumentError(msg)
    t_start, t_end = window
    settings = get_settings()

    if isinstance(system, DdeSystem):
        grid = system.grid
        monodromy = floquet.monodromy(system, t_start)
        spectrum = floquet.floquet_multipliers(monodromy, m + 2)
        leading = spectrum.expanded()
        pairs = [(value, floquet.eigenvector(monodromy, value)) for value in leading]
        chosen, split = _leading_real_functions(pairs, m)
        trajs = []
        for part, vector in chosen:
            initial = np.real(vector) if part == "re" else np.imag(vector)
            segment = Segment(grid, initial)
            trajs.append(dde_core.solve_untransformed(system, t_start, t_end, segment))
        moduli = np.abs(leading)
    else:
        if grid is None:
            msg = "a grid is needed for constant-coefficient determinant checks"
            raise InvalidArgumentError(msg)
        alpha0, beta0 = system
        roots = floquet.char_roots(alpha0, beta0, m + 2)
        chosen, split = _leading_real_functions([(root, root) for root in roots], m)
        trajs = []
        for part, root in chosen:
            if part == "re":
                trajs.append(Trajectory.from_function(grid, t_start, t_end, lambda t, z=root: np.real(np.exp(z * t))))
            else:
                trajs.append(Trajectory.from_function(grid, t_start, t_end, lambda t, z=root: np.imag(np.exp(z * t))))
        moduli = np.exp(np.real(np.asarray(roots)))

    if len(trajs) < m:
        msg = f"could not build {m} leading solutions"
        raise InvalidArgumentError(msg)
    gap = float(moduli[m - 1] - moduli[m]) if moduli.size > m else float("inf")
    ill_conditioned = split or gap < settings.spectral_gap_warning
    if ill_conditioned:
        logger.warning("Leading %d-dimensional space is ill-conditioned (gap %.3e, split pair %s)", m, gap, split)

    first, last = grid.steps(t_start, "window start"), grid.steps(t_end, "window end")
    times = [grid.time(k) for k in range(first, last + 1)]
    report = determinant_sign_check(trajs, times)
    report.name = "leading_determinant"
    report.config_echo = {"m": m, "window": [t_start, t_end], "n_sub": grid.n_sub}
    report.details.update({"gap": gap, "ill_conditioned": ill_conditioned, "split_pair": split})

    if m in {2, 3}:
        wedge = wedge_from_solutions(trajs, t_end)
        interior = u0pos.interior_mask(wedge.points, grid.n_sub)
        if np.any(interior):
            ratio = wedge.values[interior] / u0pos.u_m_values(wedge.theta[interior], m)
            ratio = report.details["sign"] * ratio
            report.details["u_m_ratio_min"] = float(np.min(ratio))
            report.details["u_m_ratio_max"] = float(np.max(ratio))
    logger.info("Leading determinant check m=%d: passed=%s", m, report.passed)
    return report
