"""The operators A = A₀ + A₁ on C(T_m), their conjugates B = A(u_m·)/u_m, and u0-positivity checks.

A₀ integrates over the box [θ1,θ2]×…×[θ_{m-1},θ_m] with the last argument
pinned at 0; A₁ integrates over [-1,θ1]×[θ1,θ2]×…×[θ_{m-1},θ_m]. Discrete
versions integrate the nodal values with the trapezoid rule, and B is
computed from the nodal products u_m·φ so that B^k(φ/u_m)·u_m = A^kφ holds
exactly at interior nodes.
"""

from collections.abc import Sequence
from itertools import product
from typing import Literal

import numpy as np
from numpy.polynomial import Polynomial
from numpy.polynomial.legendre import leggauss
from scipy.interpolate import RegularGridInterpolator

from dde_compound.models.grid import Grid, WedgeGrid, simplex_rank, simplex_table
from dde_compound.models.reports import CertReport, CvDecomposition, RatioReport
from dde_compound.services.segfun import PrefixTable, integrate_against_polynomial, trapezoid_cell_weights
from dde_compound.utils.errors import InvalidArgumentError, UnsupportedError
from dde_compound.utils.logging import get_logger

logger = get_logger(__name__)

Parts = Literal["both", "A0", "A1", "B0", "B1"]

INTERIOR_RULE = "gaps >= 2 cells, j1 >= 2, jm <= n_sub - 2"
GAUSS_ORDER = 4
DEFAULT_PROBE_EPS = (1e-1, 1e-2, 1e-3)


def u_m_values(theta: np.ndarray, m: int) -> np.ndarray:
    """u_m(θ) = Π_{i<j}(θ_j - θ_i) · Π_{i<j<=m-1}(1 + θ_i - θ_j) for rows of θ."""
    return u_m_q_values(theta, m, m - 1)


def u_m_q_values(theta: np.ndarray, m: int, q: int) -> np.ndarray:
    """u_m^q: the first product over 1 <= j-i <= q, the second over j-i >= m-q (indices <= m-1)."""
    theta = np.atleast_2d(np.asarray(theta, dtype=float))
    value = np.ones(theta.shape[0])
    for i in range(m):
        for j in range(i + 1, m):
            if j - i <= q:
                value = value * (theta[:, j] - theta[:, i])
            if j <= m - 2 and j - i >= m - q:
                value = value * (1.0 + theta[:, i] - theta[:, j])
    return value


def _v0_values(theta: np.ndarray, m: int) -> np.ndarray:
    """u_m divided by the box volume Π(θ_{i+1} - θ_i), as a polynomial."""
    value = np.ones(theta.shape[0])
    for i in range(m):
        for j in range(i + 1, m):
            if j - i >= 2:
                value = value * (theta[:, j] - theta[:, i])
            if j <= m - 2:
                value = value * (1.0 + theta[:, i] - theta[:, j])
    return value


def _checked_theta(theta: Sequence[float], m: int) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (m,):
        msg = f"expected {m} coordinates, got {theta.shape}"
        raise InvalidArgumentError(msg)
    if theta[0] < -1.0 - 1e-12 or theta[-1] > 1e-12 or np.any(np.diff(theta) < -1e-12):
        msg = f"theta={tuple(theta)} is not in T_{m}"
        raise InvalidArgumentError(msg)
    return theta


def u_m_eval(theta: Sequence[float], m: int) -> float:
    """u_m at one point of T_m."""
    return float(u_m_values(_checked_theta(theta, m)[None, :], m)[0])


def u_m_q_eval(theta: Sequence[float], m: int, q: int) -> float:
    """u_m^q at one point of T_m, for 0 <= q <= m-1 (u_m^{m-1} = u_m, u_m^0 = 1)."""
    if not 0 <= q <= m - 1:
        msg = f"q must lie in [0, {m - 1}], got {q}"
        raise InvalidArgumentError(msg)
    return float(u_m_q_values(_checked_theta(theta, m)[None, :], m, q)[0])


def interior_mask(points: np.ndarray, n_sub: int) -> np.ndarray:
    """Nodes at least two cells away from every face of T_m."""
    gaps_ok = np.all(np.diff(points, axis=1) >= 2, axis=1) if points.shape[1] > 1 else True
    return (points[:, 0] >= 2) & (points[:, -1] <= n_sub - 2) & gaps_ok


def _a_tables(phi: WedgeGrid) -> PrefixTable:
    w_left, w_right = trapezoid_cell_weights(phi.grid.n_sub)
    return PrefixTable(phi.to_cube("sorted"), w_left, w_right)


def _a0_box(table: PrefixTable, points: np.ndarray, n: int) -> np.ndarray:
    m = points.shape[1]
    ranges = {r: (points[:, r], points[:, r + 1]) for r in range(m - 1)}
    return table.box({m - 1: np.full(points.shape[0], n)}, ranges)


def _a1_box(table: PrefixTable, points: np.ndarray) -> np.ndarray:
    m = points.shape[1]
    ranges = {0: (np.zeros(points.shape[0], dtype=np.intp), points[:, 0])}
    for r in range(1, m):
        ranges[r] = (points[:, r - 1], points[:, r])
    return table.box({}, ranges)


def apply_A(phi: WedgeGrid, parts: Parts = "both") -> WedgeGrid:
    """A₀φ, A₁φ or Aφ = A₀φ + A₁φ on the simplex grid."""
    if phi.m < 2:
        msg = f"A is defined for m >= 2, got m={phi.m}"
        raise InvalidArgumentError(msg)
    if parts not in {"both", "A0", "A1"}:
        msg = f"parts must be both, A0 or A1, got {parts}"
        raise InvalidArgumentError(msg)
    table = _a_tables(phi)
    points = phi.points
    total = np.zeros(points.shape[0])
    if parts in {"both", "A0"}:
        total += _a0_box(table, points, phi.grid.n_sub)
    if parts in {"both", "A1"}:
        total += _a1_box(table, points)
    return phi.with_values(total)


def singular_index(m: int, grid: Grid) -> int | None:
    """Position of (-1, 0, 0) in the m = 3 simplex grid."""
    if m != 3:
        return None
    return int(simplex_rank(np.array([[0, grid.n_sub, grid.n_sub]]), grid.n_sub)[0])


def _filled_values(phi: WedgeGrid) -> np.ndarray:
    """Node values with the unset value at (-1, 0, 0) replaced by the limit along the (t, 0, 0) slice."""
    values = np.array(phi.values)
    corner = singular_index(phi.m, phi.grid)
    if corner is not None and not np.isfinite(values[corner]):
        n = phi.grid.n_sub
        near = simplex_rank(np.array([[1, n, n], [2, n, n]]), n)
        values[corner] = 2.0 * values[near[0]] - values[near[1]]
    if not np.all(np.isfinite(values)):
        msg = "function values must be finite away from (-1, 0, 0)"
        raise InvalidArgumentError(msg)
    return values


def _averaged_box(
    table: PrefixTable,
    pinned: dict[int, np.ndarray],
    ranges: dict[int, tuple[np.ndarray, np.ndarray]],
    h: float,
) -> np.ndarray:
    """Box averages where zero-length sides collapse to evaluation at their node."""
    axes = sorted(ranges)
    flags = np.column_stack([ranges[a][1] > ranges[a][0] for a in axes])
    out = np.empty(flags.shape[0])
    for pattern in product((False, True), repeat=len(axes)):
        sel = np.all(flags == np.array(pattern, dtype=bool), axis=1)
        if not np.any(sel):
            continue
        sub_pinned = {axis: node[sel] for axis, node in pinned.items()}
        sub_ranges = {}
        volume = np.ones(int(sel.sum()))
        for axis, open_side in zip(axes, pattern, strict=True):
            lo, hi = ranges[axis][0][sel], ranges[axis][1][sel]
            if open_side:
                sub_ranges[axis] = (lo, hi)
                volume = volume * (hi - lo) * h
            else:
                sub_pinned[axis] = lo
        out[sel] = table.box(sub_pinned, sub_ranges) / volume
    return out


def apply_B(phi: WedgeGrid, parts: Parts = "both") -> WedgeGrid:
    """B₀φ, B₁φ or Bφ for m ∈ {2, 3}; for m = 3 the value at (-1, 0, 0) is NaN (unset)."""
    m = phi.m
    if m not in {2, 3}:
        msg = f"B is implemented for m in {{2, 3}}, got m={m}"
        raise UnsupportedError(msg)
    if parts not in {"both", "B0", "B1"}:
        msg = f"parts must be both, B0 or B1, got {parts}"
        raise InvalidArgumentError(msg)
    grid = phi.grid
    n, h = grid.n_sub, grid.h
    points = phi.points
    theta = phi.theta
    values = _filled_values(phi)
    u = u_m_values(theta, m)
    v0 = _v0_values(theta, m)

    # A(uφ) tables; B is A(uφ) / u with the box volume cancelled
    table = _a_tables(phi.with_values(u * values))
    triple = np.all(points == points[:, :1], axis=1) if m == 3 else np.zeros(points.shape[0], bool)
    corner = singular_index(m, grid)
    regular = ~triple
    if corner is not None:
        regular[corner] = False

    out = np.zeros(points.shape[0])
    P = points[regular]
    # box averages over v0 wherever θ has at least two distinct entries
    if parts in {"both", "B0"}:
        ranges = {r: (P[:, r], P[:, r + 1]) for r in range(m - 1)}
        out[regular] += _averaged_box(table, {m - 1: np.full(P.shape[0], n)}, ranges, h) / v0[regular]
    if parts in {"both", "B1"}:
        ranges = {0: (np.zeros(P.shape[0], dtype=np.intp), P[:, 0])}
        for r in range(1, m):
            ranges[r] = (P[:, r - 1], P[:, r])
        averaged = _averaged_box(table, {}, ranges, h)
        out[regular] += (1.0 + theta[regular, 0]) * averaged / v0[regular]

    # θ1 = θ2 = θ3: one-variable integrals against polynomial weights
    if np.any(triple):
        cube = phi.with_values(values).to_cube("sorted")
        for index in np.flatnonzero(triple):
            j = int(points[index, 0])
            c = grid.nodes[j]
            if parts in {"both", "B0"}:
                out[index] += 0.5 * c**2 * cube[j, j, n]
            if parts in {"both", "B1"} and j > 0:
                weight = Polynomial([c, -1.0]) ** 2 * Polynomial([1.0 - c, 1.0])
                out[index] += 0.5 * integrate_against_polynomial(cube[: j + 1, j, j], grid, weight, 0, j)
    # no limit at (-1, 0, 0)
    if corner is not None:
        out[corner] = np.nan
    return phi.with_values(out)


def nu_eval(theta: Sequence[float]) -> tuple[float, float]:
    """(ν₀, ν₁) = (-(θ2+θ3), 1+θ1) / (1 + θ1 - θ2), defined on T_3 minus (-1, 0, 0)."""
    t1, t2, t3 = _checked_theta(theta, 3)
    denominator = 1.0 + t1 - t2
    if denominator <= 1e-14:
        msg = "nu is undefined at (-1, 0, 0)"
        raise InvalidArgumentError(msg)
    return float(-(t2 + t3) / denominator), float((1.0 + t1) / denominator)


def _nu_values(theta: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    denominator = 1.0 + theta[:, 0] - theta[:, 1]
    with np.errstate(divide="ignore", invalid="ignore"):
        nu0 = -(theta[:, 1] + theta[:, 2]) / denominator
        nu1 = (1.0 + theta[:, 0]) / denominator
    return nu0, nu1


def _gauss_average(lo: float, hi: float, grid: Grid) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre nodes on [lo, hi] split at grid nodes; weights sum to 1."""
    if hi - lo <= 1e-15:
        return np.array([lo]), np.array([1.0])
    inner = grid.nodes[(grid.nodes > lo) & (grid.nodes < hi)]
    breaks = np.concatenate([[lo], inner, [hi]])
    x, w = leggauss(GAUSS_ORDER)
    mid = 0.5 * (breaks[:-1] + breaks[1:])
    half = 0.5 * (breaks[1:] - breaks[:-1])
    points = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return points, weights / weights.sum()


def b_at_point(phi: WedgeGrid, theta: Sequence[float]) -> float:
    """(Bφ)(θ) for m = 3 at an arbitrary point, for the continuous multilinear extension of φ.

    Uses the bounded kernels of B₀ and B₁, so the evaluation stays well
    conditioned close to (-1, 0, 0).
    """
    if phi.m != 3:
        msg = "off-grid evaluation is implemented for m = 3"
        raise UnsupportedError(msg)
    t1, t2, t3 = _checked_theta(theta, 3)
    grid = phi.grid
    spread = t3 - t1
    if spread <= 0:
        msg = "off-grid evaluation needs theta1 < theta3"
        raise InvalidArgumentError(msg)
    nu0_den = 1.0 + t1 - t2
    interpolate = RegularGridInterpolator((grid.nodes,) * 3, phi.with_values(_filled_values(phi)).to_cube("symmetric"))

    s1, w1 = _gauss_average(t1, t2, grid)
    s2, w2 = _gauss_average(t2, t3, grid)
    a, c = np.meshgrid(s1, s2, indexing="ij")
    kernel0 = ((c - a) / spread) * a * (c / nu0_den) * (1.0 + a - c)
    values0 = interpolate(np.stack([a, c, np.zeros_like(a)], axis=-1))
    b0 = float(np.einsum("i,j,ij->", w1, w2, kernel0 * values0))

    s0, w0 = _gauss_average(-1.0, t1, grid)
    z, a, c = np.meshgrid(s0, s1, s2, indexing="ij")
    kernel1 = (a - z) * ((c - a) / spread) * (c - z) * (1.0 + z - a)
    values1 = interpolate(np.stack([z, a, c], axis=-1))
    b1 = (1.0 + t1) / nu0_den * float(np.einsum("i,j,k,ijk->", w0, w1, w2, kernel1 * values1))
    return b0 + b1


def decompose_CV(phi: WedgeGrid, probe_eps: Sequence[float] = DEFAULT_PROBE_EPS) -> CvDecomposition:
    """Split Bφ = Q₀ν₀ + Q₁ν₁ + ψ for m = 3 and probe ψ along θ_ε = (-1+ε, -ε², 0)."""
    if phi.m != 3:
        msg = f"decompose_CV needs m = 3, got m={phi.m}"
        raise InvalidArgumentError(msg)
    grid = phi.grid
    n = grid.n_sub
    if n < 4:
        msg = f"decompose_CV needs n_sub >= 4, got {n}"
        raise InvalidArgumentError(msg)
    filled = phi.with_values(_filled_values(phi))
    cube = filled.to_cube("sorted")
    weight = Polynomial([0.0, 0.0, 1.0, 1.0])
    q0 = 0.5 * integrate_against_polynomial(cube[:, n, n], grid, weight, 0, n)
    q1 = integrate_against_polynomial(cube[0, :, n], grid, weight, 0, n)

    b_phi = apply_B(phi)
    nu0, nu1 = _nu_values(b_phi.theta)
    psi = b_phi.values - q0 * nu0 - q1 * nu1
    corner = singular_index(3, grid)
    psi[corner] = np.nan
    rebuilt = q0 * nu0 + q1 * nu1 + psi
    mask = interior_mask(b_phi.points, n)
    reconstruction = float(np.max(np.abs(rebuilt[mask] - b_phi.values[mask]), initial=0.0))

    probe_values = []
    for eps in probe_eps:
        point = (-1.0 + eps, -(eps**2), 0.0)
        p_nu0, p_nu1 = nu_eval(point)
        probe_values.append(float(b_at_point(filled, point) - q0 * p_nu0 - q1 * p_nu1))
    magnitudes = np.abs(probe_values)
    decaying = bool(np.all(np.diff(magnitudes) <= 0))
    logger.info("C_V decomposition: Q0=%.6g Q1=%.6g probes=%s", q0, q1, probe_values)
    return CvDecomposition(
        q0=float(q0),
        q1=float(q1),
        psi=b_phi.with_values(psi),
        probe_eps=[float(e) for e in probe_eps],
        probe_values=probe_values,
        decaying=decaying,
        reconstruction_error=reconstruction,
        details={"n_sub": n},
    )


def make_probe(kind: str, m: int, grid: Grid, seed: int | None = None) -> WedgeGrid:
    """Nonnegative test functions: ``const``, ``bump`` (a hat at an interior node) or ``random[:seed]``."""
    name, _, suffix = kind.partition(":")
    if name == "const":
        return WedgeGrid(m, grid, np.ones(simplex_table(m, grid.n_sub).shape[0]))
    if name == "bump":
        node = [round((i + 1) * grid.n_sub / (m + 1)) for i in range(m)]
        values = np.zeros(simplex_table(m, grid.n_sub).shape[0])
        values[simplex_rank(np.array([node]), grid.n_sub)[0]] = 1.0
        return WedgeGrid(m, grid, values)
    if name == "random":
        rng = np.random.default_rng(int(suffix) if suffix else seed)
        return WedgeGrid(m, grid, rng.random(simplex_table(m, grid.n_sub).shape[0]))
    msg = f"unknown probe '{kind}'"
    raise InvalidArgumentError(msg)


def _require_nonnegative(phi: WedgeGrid) -> None:
    finite = phi.values[np.isfinite(phi.values)]
    if finite.size == 0 or np.any(finite < 0) or not np.any(finite > 0):
        msg = "input must be nonnegative and not identically zero"
        raise InvalidArgumentError(msg)


def u0_ratio(phi: WedgeGrid, m: int, k: int, probe: str = "custom") -> RatioReport:
    """Interior bounds of (A^kφ)/u_m; positivity of the lower bound is the u0-positivity claim."""
    if phi.m != m:
        msg = f"function is on T_{phi.m}, expected T_{m}"
        raise InvalidArgumentError(msg)
    if k < 1:
        msg = f"k must be positive, got {k}"
        raise InvalidArgumentError(msg)
    _require_nonnegative(phi)
    if k < m - 1:
        logger.warning("k=%d < m-1=%d: the lower bound is not expected to be positive", k, m - 1)
    exploratory = m >= 4
    if exploratory:
        logger.warning("m=%d ratio runs are exploratory", m)

    current = phi
    for _ in range(k):
        current = apply_A(current)
    points = current.points
    mask = interior_mask(points, phi.grid.n_sub)
    if not np.any(mask):
        msg = f"n_sub={phi.grid.n_sub} leaves no interior nodes for m={m}"
        raise InvalidArgumentError(msg)
    ratio = current.values[mask] / u_m_values(current.theta[mask], m)
    interior_points = points[mask]
    low, high = int(np.argmin(ratio)), int(np.argmax(ratio))
    min_ratio, max_ratio = float(ratio[low]), float(ratio[high])
    ceiling = float(2.0**k * phi.sup_norm())
    passed = bool(np.isfinite(max_ratio) and 0 < min_ratio <= max_ratio)
    return RatioReport(
        m=m,
        k=k,
        n_sub=phi.grid.n_sub,
        probe=probe,
        min_ratio=min_ratio,
        max_ratio=max_ratio,
        argmin=[int(j) for j in interior_points[low]],
        argmax=[int(j) for j in interior_points[high]],
        interior_rule=INTERIOR_RULE,
        interior_count=int(mask.sum()),
        ceiling=ceiling,
        within_ceiling=bool(max_ratio <= ceiling * (1 + 1e-12)),
        passed=passed,
        exploratory=exploratory,
        ratios=[[*map(float, p), float(r)] for p, r in zip(interior_points, ratio, strict=True)],
    )


def _exact_box_images(m: int, q: int, theta: np.ndarray) -> dict[str, np.ndarray]:
    """A₀u_m^q and A₁u_m^q at the rows of θ by tensor Gauss-Legendre, exact for these polynomials."""
    # degree in each variable is at most 2m - 3
    x, w = leggauss(m)
    rows = theta.shape[0]
    a0_lo, a0_hi = theta[:, :-1], theta[:, 1:]
    a1_lo = np.column_stack([np.full(rows, -1.0), theta[:, :-1]])
    a1_hi = theta
    images = {}
    for part, lo, hi, pinned in (("A0", a0_lo, a0_hi, True), ("A1", a1_lo, a1_hi, False)):
        half = 0.5 * (hi - lo)
        jacobian = np.prod(half, axis=1)
        total = np.zeros(rows)
        for index in product(range(m), repeat=lo.shape[1]):
            s = lo + half * (1.0 + x[list(index)])
            if pinned:
                s = np.column_stack([s, np.zeros(rows)])
            total += np.prod(w[list(index)]) * jacobian * u_m_q_values(s, m, q)
        images[part] = total
    return images


def pointwise_bound_check(m: int, q: int, grid: Grid, tolerance: float | None = None) -> CertReport:
    """0 <= A_i u_m^q <= u_m^{q+1} and A_i u_m <= u_m at every node, for i = 0, 1.

    The images are integrated exactly, so the default tolerance is 1e-9 times
    the size of the bounding polynomials. The gap between the trapezoid
    operator and the exact image is reported alongside.
    """
    if not 0 <= q <= m - 2:
        msg = f"q must lie in [0, {m - 2}], got {q}"
        raise InvalidArgumentError(msg)
    theta = grid.nodes[simplex_table(m, grid.n_sub)]
    upper = u_m_q_values(theta, m, q + 1)
    full = u_m_values(theta, m)
    if tolerance is None:
        tolerance = 1e-9 * max(float(np.max(np.abs(upper))), float(np.max(np.abs(full))), 1e-300)
    base_images = _exact_box_images(m, q, theta)
    full_images = _exact_box_images(m, m - 1, theta)
    trapezoid = WedgeGrid(m, grid, u_m_q_values(theta, m, q))
    margins = {}
    for part in ("A0", "A1"):
        image = base_images[part]
        margins[f"{part}_lower"] = float(np.min(image))
        margins[f"{part}_upper"] = float(np.min(upper - image))
        margins[f"{part}_u_m"] = float(np.min(full - full_images[part]))
    worst = min(margins.values())
    for part in ("A0", "A1"):
        gap = np.max(np.abs(apply_A(trapezoid, part).values - base_images[part]))
        margins[f"{part}_trapezoid_gap"] = float(gap)
    return CertReport(
        name="pointwise_bound",
        passed=bool(worst >= -tolerance),
        min_value=worst,
        tolerance=tolerance,
        config_echo={"m": m, "q": q, "n_sub": grid.n_sub},
        details=margins,
    )


def _finite_min(phi: WedgeGrid) -> tuple[float, list[int]]:
    values = np.where(np.isfinite(phi.values), phi.values, np.inf)
    index = int(np.argmin(values))
    return float(values[index]), [int(j) for j in phi.points[index]]


def b_floor_check(phi: WedgeGrid, m: int, k: int) -> CertReport:
    """min over T_m (minus (-1,0,0) for m = 3) of B^kφ, positive for k >= 3 (m = 2) or k >= 5 (m = 3)."""
    if m not in {2, 3}:
        msg = f"B floors are implemented for m in {{2, 3}}, got m={m}"
        raise UnsupportedError(msg)
    minimum_k = 3 if m == 2 else 5
    if k < minimum_k:
        msg = f"k must be at least {minimum_k} for m={m}, got {k}"
        raise InvalidArgumentError(msg)
    if phi.m != m:
        msg = f"function is on T_{phi.m}, expected T_{m}"
        raise InvalidArgumentError(msg)
    _require_nonnegative(phi)
    current = phi
    for _ in range(k):
        current = apply_B(current)
    floor, where = _finite_min(current)
    logger.info("B floor m=%d k=%d n_sub=%d: %.3e", m, k, phi.grid.n_sub, floor)
    return CertReport(
        name="b_floor",
        passed=bool(floor > 0),
        min_value=floor,
        argmin=where,
        tolerance=0.0,
        config_echo={"m": m, "k": k, "n_sub": phi.grid.n_sub},
    )


def b_floor_trend(m: int, k: int, n_subs: Sequence[int] = (16, 24, 32), probe: str = "const") -> CertReport:
    """Track the B^k floor across grids; informational for m = 3."""
    floors = {}
    for n_sub in n_subs:
        grid = Grid(n_sub)
        floors[str(n_sub)] = b_floor_check(make_probe(probe, m, grid, seed=0), m, k).min_value
    values = list(floors.values())
    return CertReport(
        name="b_floor_trend",
        passed=all(v > 0 for v in values),
        min_value=min(values),
        exploratory=True,
        config_echo={"m": m, "k": k, "probe": probe},
        details={"floors": floors},
    )


def conjugacy_check(psi: WedgeGrid, k: int, tolerance: float = 1e-10) -> CertReport:
    """max over interior nodes of |u_m·B^kψ - A^k(u_m·ψ)|, relative to max|A^k(u_m·ψ)|."""
    m = psi.m
    mask = interior_mask(psi.points, psi.grid.n_sub)
    u = u_m_values(psi.theta, m)
    via_b = psi
    via_a = psi.with_values(u * _filled_values(psi))
    for _ in range(k):
        via_b = apply_B(via_b)
        via_a = apply_A(via_a)
    scale = max(float(np.max(np.abs(via_a.values[mask]), initial=0.0)), np.finfo(float).tiny)
    gap = float(np.max(np.abs(via_b.values[mask] * u[mask] - via_a.values[mask]), initial=0.0)) / scale
    return CertReport(
        name="conjugacy",
        passed=bool(gap <= tolerance),
        min_value=-gap,
        tolerance=tolerance,
        config_echo={"m": m, "k": k, "n_sub": psi.grid.n_sub},
    )


def b_norm_probe(m: int, trials: int, seed: int, grid: Grid) -> dict[str, float]:
    """Largest observed ‖B₀φ‖, ‖B₁φ‖, ‖Bφ‖ over seeded φ with ‖φ‖ = 1 (values in [-1, 1])."""
    norms = {"B0": 0.0, "B1": 0.0, "B": 0.0}
    for seed_sequence in np.random.SeedSequence(seed).spawn(trials):
        rng = np.random.default_rng(seed_sequence)
        values = rng.uniform(-1.0, 1.0, simplex_table(m, grid.n_sub).shape[0])
        phi = WedgeGrid(m, grid, values / np.max(np.abs(values)))
        for key, part in (("B0", "B0"), ("B1", "B1"), ("B", "both")):
            norms[key] = max(norms[key], apply_B(phi, part).sup_norm())
    return norms
