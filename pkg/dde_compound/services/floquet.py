"""Monodromy matrices, Floquet multipliers, lap numbers and the multiplier bounds."""

from enum import StrEnum

import numpy as np
import scipy.linalg
from scipy.special import lambertw

from dde_compound.models.coefficient import DdeSystem, PeriodicCoefficient
from dde_compound.models.grid import Grid, Segment
from dde_compound.models.reports import CertReport, HomotopyReport, LapRecord, LapReport
from dde_compound.models.spectrum import ComplexSpectrum, MonodromyMatrix
from dde_compound.services import dde_core
from dde_compound.services.tensor_spectra import eigenvalues
from dde_compound.utils.errors import InvalidArgumentError, NumericFailureError
from dde_compound.utils.logging import get_logger
from dde_compound.utils.parallel import parallel_map

logger = get_logger(__name__)

NEWTON_MAX_ITERATIONS = 200
ROOT_RESIDUAL = 1e-12
ROOT_DEDUP = 1e-8


class LapParity(StrEnum):
    """Rounding of the sign-change count: V⁻ to odd, V⁺ to even."""

    MINUS = "V-"
    PLUS = "V+"


def parity_for(m: int) -> LapParity:
    """The lap function with ±(-1)^m = -1: V⁻ for even m, V⁺ for odd m."""
    return LapParity.MINUS if m % 2 == 0 else LapParity.PLUS


def monodromy(system: DdeSystem | PeriodicCoefficient, tau0: float = 0.0) -> MonodromyMatrix:
    """Matrix of the period map U(τ0 + γ, τ0); column j is the image of the j-th hat function."""
    grid = system.grid
    identity = np.eye(grid.n_sub + 1)
    if isinstance(system, PeriodicCoefficient):
        images = dde_core.evolve_block(system, tau0, tau0 + system.period, identity)
    else:
        images = dde_core.evolve_block_untransformed(system, tau0, tau0 + system.period, identity)
    logger.debug("Built %dx%d monodromy at tau0=%s", grid.n_sub + 1, grid.n_sub + 1, tau0)
    return MonodromyMatrix(grid, system.period, tau0, images.T)


def floquet_multipliers(M: MonodromyMatrix, k_max: int) -> ComplexSpectrum:
    """Leading k_max multipliers with multiplicity; those below 10·h² are flagged unreliable."""
    if k_max < 1:
        msg = f"k_max must be positive, got {k_max}"
        raise InvalidArgumentError(msg)
    spectrum = eigenvalues(M.entries)
    leading = ComplexSpectrum(spectrum.values, spectrum.multiplicities, M.floor).truncated(k_max)
    unreliable = [v for v in leading.values if not leading.is_reliable(v)]
    if unreliable:
        logger.info("%d multipliers lie below the discretization floor %.2e", len(unreliable), M.floor)
    return leading


def multiplier_shift(system: DdeSystem) -> float:
    """Factor e^{γα₀} relating transformed and original multipliers (λ̃ = e^{γα₀}λ)."""
    return float(np.exp(system.period * system.alpha.mean()))


def sign_changes(phi: Segment | np.ndarray) -> int:
    """Number of sign changes of the node values, skipping zeros."""
    values = np.asarray(phi.values if isinstance(phi, Segment) else phi, dtype=float)
    scale = float(np.max(np.abs(values))) if values.size else 0.0
    if scale == 0.0:
        msg = "sign changes are undefined for the zero function"
        raise InvalidArgumentError(msg)
    nonzero = values[np.abs(values) > 1e-14 * scale]
    return int(np.count_nonzero(np.diff(np.sign(nonzero)) != 0))


def lap(phi: Segment | np.ndarray, parity: LapParity) -> int:
    """V⁻ (sign changes rounded up to odd) or V⁺ (rounded up to even)."""
    count = sign_changes(phi)
    if parity is LapParity.MINUS:
        return count if count % 2 == 1 else count + 1
    return count if count % 2 == 0 else count + 1


def _newton(seed: complex, alpha0: float, beta0: float, branch: int) -> complex:
    zeta = seed
    for _ in range(NEWTON_MAX_ITERATIONS):
        exponential = beta0 * np.exp(-zeta)
        residual = zeta + alpha0 + exponential
        if abs(residual) < ROOT_RESIDUAL:
            return complex(zeta)
        zeta = zeta - residual / (1.0 - exponential)
        if not np.isfinite(zeta):
            break
    msg = f"Newton polishing of the characteristic root on branch {branch} did not converge"
    raise NumericFailureError(msg)


def char_roots(alpha0: float, beta0: float, count: int) -> list[complex]:
    """Rightmost roots of ζ + α₀ + β₀e^{-ζ} = 0, by descending real part.

    Roots are seeded from the Lambert W branches of -β₀e^{α₀} and polished
    by Newton's method. The list is closed under conjugation, so it holds
    ``count + 1`` entries when the cut would split a conjugate pair.
    """
    if beta0 == 0:
        msg = "beta0 must be nonzero"
        raise InvalidArgumentError(msg)
    if count < 1:
        msg = f"count must be positive, got {count}"
        raise InvalidArgumentError(msg)
    z = -beta0 * np.exp(alpha0)
    reach = count // 2 + 2
    found: list[complex] = []
    for branch in range(-reach - 1, reach + 1):
        seed = complex(lambertw(z, branch)) - alpha0
        root = _newton(seed, alpha0, beta0, branch)
        if abs(root.imag) <= 1e-10 * max(1.0, abs(root)):
            root = complex(root.real, 0.0)
        if root.imag < 0:
            root = root.conjugate()
        if all(abs(root - other) > ROOT_DEDUP for other in found):
            found.append(root)

    roots = []
    for root in found:
        roots.append(root)
        if root.imag > 0:
            roots.append(root.conjugate())
    roots.sort(key=lambda r: (-r.real, -r.imag))
    kept = roots[:count]
    if kept[-1].imag > 0:
        kept.append(kept[-1].conjugate())
    return kept


def multiplier_lower_bounds(system: DdeSystem, m: int, k_max: int) -> list[tuple[int, float]]:
    """Lower bounds Q^{-(k-1)}·exp(-γα₀ + γ Σ_{j<=k} Re ζ_j) on |λ_k| for k <= k_max with k - m even."""
    _, b = dde_core.transform(system)
    sign = (-1) ** m
    b0 = b.signed_extremum(m)
    if sign * b0 <= 0:
        msg = f"need (-1)^m b >= (-1)^m b0 > 0 for m={m}"
        raise InvalidArgumentError(msg)
    gamma = system.period
    alpha0 = system.alpha.mean()
    log_q = b.abs_integral()
    roots = char_roots(0.0, b0, k_max)
    bounds = []
    for k in range(1, k_max + 1):
        if (k - m) % 2:
            continue
        real_sum = sum(root.real for root in roots[:k])
        bounds.append((k, float(np.exp(-(k - 1) * log_q - gamma * alpha0 + gamma * real_sum))))
    return bounds


def eigenvector(M: MonodromyMatrix | np.ndarray, value: complex, seed: int = 0, sweeps: int = 3) -> np.ndarray:
    """Unit eigenvector for an eigenvalue, by shifted inverse iteration.

    The largest-modulus component is made real and positive.

    Raises
    ------
        NumericFailureError: if ``value`` is not (numerically) an eigenvalue

    """
    entries = M.entries if isinstance(M, MonodromyMatrix) else np.asarray(M)
    n = entries.shape[0]
    value = complex(value)
    scale = max(float(np.linalg.norm(entries, 2)), np.finfo(float).tiny)
    shift = value + 1e-10 * max(1.0, abs(value))
    dtype = complex if value.imag != 0 else float
    shifted = entries.astype(dtype) - (shift if dtype is complex else shift.real) * np.eye(n)
    rng = np.random.default_rng(seed)
    vector = rng.standard_normal(n).astype(dtype)
    if dtype is complex:
        vector = vector + 1j * rng.standard_normal(n)
    try:
        factors = scipy.linalg.lu_factor(shifted, check_finite=True)
        for _ in range(sweeps):
            vector = scipy.linalg.lu_solve(factors, vector)
            vector = vector / np.linalg.norm(vector)
    except (np.linalg.LinAlgError, ValueError) as e:
        msg = f"inverse iteration broke down at {value}"
        raise NumericFailureError(msg) from e
    if not np.all(np.isfinite(vector)):
        msg = f"inverse iteration broke down at {value}"
        raise NumericFailureError(msg)

    peak = int(np.argmax(np.abs(vector)))
    vector = vector * (np.conj(vector[peak]) / abs(vector[peak]))
    residual = float(np.linalg.norm(entries @ vector - value * vector))
    if residual > 1e-6 * scale:
        msg = f"{value} is not an eigenvalue (residual {residual:.3e})"
        raise NumericFailureError(msg)
    return vector


def eigenfunction(M: MonodromyMatrix, value: complex, seed: int = 0) -> Segment:
    """Real part of the normalized eigenvector of ``value`` as a segment."""
    return Segment(M.grid, np.real(eigenvector(M, value, seed)))


def _require_beta_sign(system: DdeSystem, m: int) -> float:
    sign = (-1) ** m
    beta0 = system.beta.signed_extremum(m)
    if sign * beta0 <= 0:
        msg = f"need (-1)^m beta >= (-1)^m beta0 > 0 for m={m}"
        raise InvalidArgumentError(msg)
    return beta0


def lap_dominance_report(system: DdeSystem, m: int, k_max: int) -> tuple[LapReport, CertReport]:
    """Dominance gap, lap numbers and products of the leading multipliers for k - m even.

    For each admissible k: |λ_k| > |λ_{k+1}|, the eigenfunctions of λ_{k-1}
    and λ_k have lap k - 1, and λ_{k-1}λ_k is real and positive; for k = 1
    (m odd) λ₁ is real positive with lap 0. Multipliers below the
    discretization floor are skipped.
    """
    _require_beta_sign(system, m)
    if k_max < 1:
        msg = f"k_max must be positive, got {k_max}"
        raise InvalidArgumentError(msg)
    M = monodromy(system)
    spectrum = eigenvalues(M.entries)
    values = spectrum.expanded()[: k_max + 1]
    parity = parity_for(m)
    bounds = dict(multiplier_lower_bounds(system, m, k_max))

    # per multiplier: modulus, lower bound and eigenfunction lap
    records: list[LapRecord] = []
    laps: dict[int, int] = {}
    for index, value in enumerate(values[:k_max], start=1):
        reliable = abs(value) >= M.floor
        record = LapRecord(
            index=index,
            real=float(value.real),
            imag=float(value.imag),
            modulus=float(abs(value)),
            reliable=reliable,
            lower_bound=bounds.get(index),
        )
        if reliable:
            segment = eigenfunction(M, value)
            if segment.sup_norm() > 0:
                record.sign_changes = sign_changes(segment)
                record.lap = lap(segment, parity)
                laps[index] = record.lap
        records.append(record)

    checks: dict[str, bool] = {}
    gaps: dict[str, float] = {}
    # gap, product and lap checks for k - m even
    for k in range(1, k_max + 1):
        if (k - m) % 2 or k >= values.size:
            continue
        if abs(values[k - 1]) < M.floor:
            continue
        gap = float(abs(values[k - 1]) - abs(values[k]))
        gaps[str(k)] = gap
        checks[f"gap_{k}"] = gap > 0
        if k in bounds:
            checks[f"bound_{k}"] = bool(abs(values[k - 1]) >= bounds[k] - M.floor)
        if k == 1:
            lead = values[0]
            checks["lambda1_real_positive"] = bool(abs(lead.imag) <= 1e-6 * abs(lead) and lead.real > 0)
            checks["lap_1"] = laps.get(1) == 0
            continue
        product = values[k - 2] * values[k - 1]
        checks[f"product_{k}"] = bool(abs(product.imag) <= 1e-6 * abs(product) and product.real > 0)
        checks[f"lap_{k}"] = laps.get(k - 1) == k - 1 and laps.get(k) == k - 1

    passed = bool(checks) and all(checks.values())
    lap_report = LapReport(m=m, n_sub=M.grid.n_sub, parity=str(parity), records=records, checks=checks, gaps=gaps)
    cert = CertReport(
        name="floquet_dominance",
        passed=passed,
        min_value=min(gaps.values()) if gaps else None,
        tolerance=0.0,
        config_echo={"m": m, "k_max": k_max, "n_sub": M.grid.n_sub, "period": system.period},
        details={"checks": checks, "floor": M.floor},
    )
    logger.info("Floquet dominance report m=%d k_max=%d: passed=%s", m, k_max, passed)
    return lap_report, cert


def homotopy_system(system: DdeSystem, kappa: float, beta0: float) -> DdeSystem:
    """α_κ = κα, β_κ = κβ + (1-κ)β₀."""
    return DdeSystem(system.alpha.affine(kappa), system.beta.affine(kappa, (1.0 - kappa) * beta0))


def homotopy_scan(system: DdeSystem, m: int, steps: int, k_max: int = 4, threads: int | None = None) -> HomotopyReport:
    """Run the dominance report along the homotopy κ = 0, 1/steps, ..., 1 and track continuity."""
    if steps < 1:
        msg = f"steps must be positive, got {steps}"
        raise InvalidArgumentError(msg)
    beta0 = _require_beta_sign(system, m)
    kappas = [i / steps for i in range(steps + 1)]

    def at_kappa(kappa: float) -> tuple[LapReport, bool]:
        lap_report, cert = lap_dominance_report(homotopy_system(system, kappa, beta0), m, k_max)
        lap_report.kappa = kappa
        return lap_report, cert.passed

    results = parallel_map(at_kappa, kappas, threads)
    points = [lap_report for lap_report, _ in results]

    max_jumps: dict[str, float] = {}
    for k in range(1, k_max + 1):
        moduli = [p.records[k - 1].modulus for p in points if len(p.records) >= k]
        if len(moduli) == len(points) and len(points) > 1:
            max_jumps[str(k)] = float(np.max(np.abs(np.diff(moduli))))

    oracle = np.exp(system.period * np.array(char_roots(0.0, beta0, k_max + 2)))
    errors = [
        float(np.min(np.abs(oracle - complex(r.real, r.imag)))) for r in points[0].records if r.reliable
    ]
    oracle_error = float(max(errors)) if errors else None

    passed = all(ok for _, ok in results)
    return HomotopyReport(
        m=m, kappas=kappas, points=points, max_jumps=max_jumps, oracle_error=oracle_error, passed=passed
    )


def gronwall_check(system: DdeSystem, tau0: float = 0.0) -> CertReport:
    """‖M‖ <= exp(∫_0^γ |α| + |β|) in the nodal sup-norm."""
    M = monodromy(system, tau0)
    norm = M.inf_norm()
    bound = float(np.exp(system.alpha.abs_integral() + system.beta.abs_integral()))
    slack = bound * M.floor
    return CertReport(
        name="gronwall",
        passed=bool(norm <= bound + slack),
        min_value=bound - norm,
        tolerance=slack,
        details={"norm": norm, "bound": bound},
    )


def smooth_random_segment(grid: Grid, rng: np.random.Generator, modes: int = 6) -> Segment:
    """Random trigonometric polynomial of low degree on [-1, 0]."""
    theta = grid.nodes
    cosines = rng.standard_normal(modes)
    sines = rng.standard_normal(modes)
    frequencies = np.arange(modes)[:, None] * np.pi * theta[None, :]
    values = cosines @ np.cos(frequencies) + sines @ np.sin(frequencies)
    return Segment(grid, values)


def lap_monotonicity_check(b: PeriodicCoefficient, count: int, horizon: float, seed: int) -> CertReport:
    """Lap numbers of seeded solutions never increase along the flow.

    The lap function is V⁻ when b >= 0 and V⁺ when b <= 0.
    """
    if np.all(b.samples >= 0):
        parity = LapParity.MINUS
    elif np.all(b.samples <= 0):
        parity = LapParity.PLUS
    else:
        msg = "lap monotonicity needs a coefficient of one sign"
        raise InvalidArgumentError(msg)
    grid = b.grid
    steps = grid.steps(horizon, "horizon")
    increases = []
    for index, seed_sequence in enumerate(np.random.SeedSequence(seed).spawn(count)):
        initial = smooth_random_segment(grid, np.random.default_rng(seed_sequence))
        traj = dde_core.solve(b, 0.0, horizon, initial)
        previous = None
        for k in range(steps + 1):
            segment = traj.segment_at(grid.time(k))
            if segment.sup_norm() == 0:
                break
            current = lap(segment, parity)
            if previous is not None and current > previous:
                increases.append({"trajectory": index, "time": grid.time(k), "from": previous, "to": current})
            previous = current
    return CertReport(
        name="lap_monotonicity",
        passed=not increases,
        seed=seed,
        config_echo={"count": count, "horizon": horizon, "n_sub": grid.n_sub, "parity": str(parity)},
        details={"increases": increases[:20]},
    )


def compare_multiplier_products(system: DdeSystem, system_hat: DdeSystem, m: int, k_max: int) -> CertReport:
    """|λ_1⋯λ_k| >= |λ̂_1⋯λ̂_k| for k - m even, when (-1)^m β >= (-1)^m β̂ >= 0 and α is shared."""
    sign = (-1) ** m
    if not np.allclose(system.alpha.samples, system_hat.alpha.samples):
        msg = "both systems must share alpha"
        raise InvalidArgumentError(msg)
    if np.any(sign * system.beta.samples < sign * system_hat.beta.samples) or np.any(sign * system_hat.beta.samples < 0):
        msg = f"ordering (-1)^m beta >= (-1)^m beta_hat >= 0 fails for m={m}"
        raise InvalidArgumentError(msg)
    first = np.abs(eigenvalues(monodromy(system).entries).expanded()[:k_max])
    second = np.abs(eigenvalues(monodromy(system_hat).entries).expanded()[:k_max])
    margins = {}
    for k in range(1, min(k_max, first.size, second.size) + 1):
        if (k - m) % 2:
            continue
        margins[str(k)] = float(np.prod(first[:k]) - np.prod(second[:k]))
    floor = system.grid.h**2
    return CertReport(
        name="multiplier_products",
        passed=all(margin >= -floor for margin in margins.values()),
        min_value=min(margins.values()) if margins else None,
        tolerance=floor,
        details={"margins": margins},
    )
