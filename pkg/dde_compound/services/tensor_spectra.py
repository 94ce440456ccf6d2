"""Eigenvalues with multiplicities, tensor products, antisymmetrizers and compound matrices."""

from collections.abc import Sequence
from itertools import combinations, permutations, product
from math import factorial

import numpy as np
import scipy.linalg
from scipy.cluster.hierarchy import fcluster, linkage
from scipy.special import comb

from dde_compound.config import get_settings
from dde_compound.models.grid import permutation_sign
from dde_compound.models.reports import CertReport
from dde_compound.models.spectrum import ComplexSpectrum
from dde_compound.utils.errors import CapacityError, InvalidArgumentError, NumericFailureError
from dde_compound.utils.logging import get_logger

logger = get_logger(__name__)


def _as_square(A: np.ndarray, name: str = "A") -> np.ndarray:
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] == 0:
        msg = f"{name} must be a non-empty square matrix, got shape {A.shape}"
        raise InvalidArgumentError(msg)
    if A.shape[0] > get_settings().max_matrix_dim:
        msg = f"{name} has dimension {A.shape[0]} above the ceiling {get_settings().max_matrix_dim}"
        raise CapacityError(msg)
    if not np.all(np.isfinite(A)):
        msg = f"{name} has non-finite entries"
        raise InvalidArgumentError(msg)
    return A


def spectral_order(values: np.ndarray) -> np.ndarray:
    """Permutation sorting by descending modulus, near-ties by descending real then imaginary part."""
    values = np.asarray(values, dtype=complex)
    if values.size == 0:
        return np.zeros(0, dtype=np.intp)
    scale = max(float(np.max(np.abs(values))), 1.0)
    tie = get_settings().modulus_tie_tolerance * scale
    modulus = np.abs(values)
    keyed = np.round(modulus / tie) * tie if tie > 0 else modulus
    return np.lexsort((-values.imag, -values.real, -keyed))


def _cluster(values: np.ndarray, tolerance: float) -> np.ndarray:
    """Single-linkage cluster labels of points in the complex plane."""
    if values.size == 1:
        return np.ones(1, dtype=int)
    points = np.column_stack([values.real, values.imag])
    tree = linkage(points, method="single")
    return fcluster(tree, t=tolerance, criterion="distance")


def eigenvalues(A: np.ndarray) -> ComplexSpectrum:
    """Spectrum of a square matrix with multiplicities.

    Eigenvalues come from LAPACK's nonsymmetric driver (balancing, Hessenberg
    reduction, shifted QR). Each one is verified by a singular-value residual
    for moderate sizes; eigenvalues within the cluster tolerance of each
    other are merged into one entry with their combined multiplicity.

    Args:
    ----
        A: Real or complex square matrix

    Returns:
    -------
        ComplexSpectrum in spectral order

    Raises:
    ------
        NumericFailureError: when LAPACK does not converge or a residual check fails

    """
    settings = get_settings()
    A = _as_square(A)
    try:
        raw = scipy.linalg.eigvals(A, check_finite=False)
    except (np.linalg.LinAlgError, ValueError) as e:
        msg = f"eigenvalue iteration failed for a {A.shape[0]}x{A.shape[0]} matrix"
        raise NumericFailureError(msg) from e
    if not np.all(np.isfinite(raw)):
        msg = "eigenvalue iteration produced non-finite values"
        raise NumericFailureError(msg)

    scale = float(np.linalg.norm(A, 2)) if A.shape[0] <= settings.eigen_verify_max_dim else float(np.linalg.norm(A))
    if A.shape[0] <= settings.eigen_verify_max_dim and scale > 0:
        identity = np.eye(A.shape[0])
        for value in raw:
            residual = scipy.linalg.svdvals(A - value * identity, check_finite=False)[-1]
            if residual > settings.eigen_residual_tolerance * scale:
                msg = f"eigenvalue {value} failed the residual check ({residual:.3e} > {settings.eigen_residual_tolerance * scale:.3e})"
                raise NumericFailureError(msg)

    if np.isrealobj(A):
        mirrored = np.sort_complex(np.conj(raw))
        if np.max(np.abs(np.sort_complex(raw) - mirrored), initial=0.0) > settings.eigen_cluster_tolerance * max(scale, 1.0):
            logger.warning("Spectrum of a real matrix is not closed under conjugation to tolerance")

    labels = _cluster(raw, settings.eigen_cluster_tolerance * max(scale, np.finfo(float).tiny))
    values = []
    mults = []
    for label in np.unique(labels):
        members = raw[labels == label]
        values.append(complex(np.mean(members)))
        mults.append(int(members.size))
    values_arr = np.array(values, dtype=complex)
    order = spectral_order(values_arr)
    logger.debug("Computed %d eigenvalues (%d distinct)", raw.size, len(values))
    return ComplexSpectrum(tuple(values_arr[order].tolist()), tuple(int(mults[i]) for i in order))


def kron(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Kronecker product (A ⊗ B)[(i,k),(j,l)] = A[i,j]·B[k,l]."""
    A = np.asarray(A)
    B = np.asarray(B)
    if A.ndim != 2 or B.ndim != 2:
        msg = "kron needs two matrices"
        raise InvalidArgumentError(msg)
    rows = A.shape[0] * B.shape[0]
    cols = A.shape[1] * B.shape[1]
    ceiling = get_settings().max_matrix_dim
    if rows * cols > ceiling * ceiling:
        msg = f"kron result {rows}x{cols} exceeds the ceiling {ceiling}x{ceiling}"
        raise CapacityError(msg)
    return np.kron(A, B)


def kron_power(A: np.ndarray, m: int) -> np.ndarray:
    """A ⊗ ... ⊗ A (m factors)."""
    result = np.asarray(A)
    for _ in range(m - 1):
        result = kron(result, A)
    return result


def antisymmetrizer(n: int, m: int) -> np.ndarray:
    """(1/m!) Σ_σ sgn(σ) P_σ on (R^n)^{⊗m}; an idempotent of rank C(n, m)."""
    if n < 1 or m < 1:
        msg = f"need n >= 1 and m >= 1, got n={n}, m={m}"
        raise InvalidArgumentError(msg)
    dim = n**m
    ceiling = get_settings().max_tensor_dim
    if dim > ceiling:
        msg = f"antisymmetrizer dimension {dim} exceeds the ceiling {ceiling}"
        raise CapacityError(msg)
    multi = np.array(np.unravel_index(np.arange(dim), (n,) * m))
    result = np.zeros((dim, dim))
    columns = np.arange(dim)
    for perm in permutations(range(m)):
        rows = np.ravel_multi_index(multi[list(perm)], (n,) * m)
        result[rows, columns] += permutation_sign(perm)
    return result / factorial(m)


def compound_matrix(A: np.ndarray, m: int) -> np.ndarray:
    """m-th compound: the matrix of m×m minors indexed by lexicographic m-subsets."""
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        msg = f"compound_matrix needs a square matrix, got shape {A.shape}"
        raise InvalidArgumentError(msg)
    n = A.shape[0]
    if not 1 <= m <= n:
        msg = f"m must lie in [1, {n}], got {m}"
        raise InvalidArgumentError(msg)
    subsets = np.array(list(combinations(range(n), m)), dtype=np.intp)
    size = subsets.shape[0]
    if size > get_settings().max_matrix_dim:
        msg = f"compound of order {m} of a {n}x{n} matrix has dimension {size}"
        raise CapacityError(msg)
    result = np.empty((size, size), dtype=np.result_type(A.dtype, float))
    for r, rows in enumerate(subsets):
        blocks = np.transpose(A[rows][:, subsets], (1, 0, 2))
        result[r] = np.linalg.det(blocks)
    return result


def antisymmetric_basis(n: int, m: int) -> np.ndarray:
    """Columns e_{i1} ∧ ... ∧ e_{im} = Σ_σ sgn(σ) e_{iσ(1)} ⊗ ... for i1 < ... < im."""
    subsets = list(combinations(range(n), m))
    basis = np.zeros((n**m, len(subsets)))
    for col, subset in enumerate(subsets):
        for perm in permutations(range(m)):
            row = np.ravel_multi_index([subset[p] for p in perm], (n,) * m)
            basis[row, col] += permutation_sign(perm)
    return basis


def compound_via_tensor(A: np.ndarray, m: int) -> np.ndarray:
    """Compound matrix computed as Eᵀ A^{⊗m} E / m! on the antisymmetric basis E."""
    A = _as_square(A)
    n = A.shape[0]
    if n**m > get_settings().max_tensor_dim:
        msg = f"tensor route needs dimension {n**m} above the ceiling"
        raise CapacityError(msg)
    basis = antisymmetric_basis(n, m)
    return basis.T @ kron_power(A, m) @ basis / factorial(m)


def _close(a: complex, b: complex, rel_tol: float) -> bool:
    return abs(a - b) <= rel_tol * max(1.0, abs(b))


def predicted_tensor_multiplicity(
    factor_spectra: Sequence[ComplexSpectrum], lambda0: complex, rel_tol: float = 1e-8
) -> int:
    """Σ over tuples (λ_1, ..., λ_m), λ_j ∈ spec(A_j), with Π λ_j = λ0 of Π mult(λ_j)."""
    lambda0 = complex(lambda0)
    total = 0
    for choice in product(*(zip(s.values, s.multiplicities, strict=True) for s in factor_spectra)):
        value = complex(np.prod([v for v, _ in choice]))
        if _close(value, lambda0, rel_tol):
            total += int(np.prod([mult for _, mult in choice]))
    return total


def predicted_wedge_multiplicity(
    factor_spectra: Sequence[ComplexSpectrum], lambda0: complex, m: int, rel_tol: float = 1e-8
) -> int:
    """Predicted multiplicity of λ0 for the m-fold exterior (or tensor) power.

    With one spectrum, counts unordered factorizations λ0 = Π λ_i^{κ_i} with
    Σκ_i = m and κ_i <= d_i, weighted by Π C(d_i, κ_i). With m spectra (one
    per factor), uses the tensor count of ``predicted_tensor_multiplicity``.
    """
    lambda0 = complex(lambda0)
    if lambda0 == 0:
        msg = "lambda0 must be nonzero"
        raise InvalidArgumentError(msg)
    if m < 1:
        msg = f"m must be positive, got {m}"
        raise InvalidArgumentError(msg)
    if len(factor_spectra) == m and m > 1:
        return predicted_tensor_multiplicity(factor_spectra, lambda0, rel_tol)
    if len(factor_spectra) != 1:
        msg = f"expected one spectrum or {m} factor spectra, got {len(factor_spectra)}"
        raise InvalidArgumentError(msg)

    pairs = [(v, d) for v, d in zip(factor_spectra[0].values, factor_spectra[0].multiplicities, strict=True) if v != 0]

    def count(start: int, remaining: int, partial: complex) -> int:
        if remaining == 0:
            return 1 if _close(partial, lambda0, rel_tol) else 0
        total = 0
        for i in range(start, len(pairs)):
            value, mult = pairs[i]
            for kappa in range(1, min(mult, remaining) + 1):
                weight = int(comb(mult, kappa, exact=True))
                total += weight * count(i + 1, remaining - kappa, partial * value**kappa)
        return total

    return count(0, m, 1.0 + 0.0j)


def match_spectra(a: np.ndarray, b: np.ndarray) -> float:
    """Largest distance in a greedy matching of two equal-size multisets (descending modulus first)."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.size != b.size:
        msg = f"multisets differ in size: {a.size} vs {b.size}"
        raise InvalidArgumentError(msg)
    unused = list(b)
    worst = 0.0
    for value in a[spectral_order(a)]:
        distances = np.abs(np.array(unused) - value)
        best = int(np.argmin(distances))
        worst = max(worst, float(distances[best]))
        unused.pop(best)
    return worst


def tensor_spectrum_check(A: np.ndarray, B: np.ndarray, tolerance: float = 1e-8) -> CertReport:
    """spec(A ⊗ B) equals {λμ} with tensor multiplicities."""
    A = _as_square(A, "A")
    B = _as_square(B, "B")
    observed = scipy.linalg.eigvals(kron(A, B))
    predicted = np.outer(scipy.linalg.eigvals(A), scipy.linalg.eigvals(B)).ravel()
    scale = max(1.0, float(np.linalg.norm(A, 2) * np.linalg.norm(B, 2)))
    mismatch = match_spectra(observed, predicted)

    spec_a, spec_b = eigenvalues(A), eigenvalues(B)
    spec_ab = eigenvalues(kron(A, B))
    counted = {
        complex(v): (mult, predicted_tensor_multiplicity([spec_a, spec_b], v, 1e-6))
        for v, mult in zip(spec_ab.values, spec_ab.multiplicities, strict=True)
    }
    multiplicities_ok = all(mult == predicted for mult, predicted in counted.values())
    return CertReport(
        name="tensor_spectrum",
        passed=bool(mismatch <= tolerance * scale and multiplicities_ok),
        min_value=-mismatch,
        tolerance=tolerance * scale,
        details={"mismatch": mismatch, "multiplicities_ok": multiplicities_ok, "dimension": int(observed.size)},
    )


def compound_spectrum_check(A: np.ndarray, m: int, tolerance: float = 1e-8) -> CertReport:
    """spec(A^{∧m}) = products of m-subsets of spec(A), via minors and (when small) the tensor route."""
    A = _as_square(A)
    n = A.shape[0]
    base = scipy.linalg.eigvals(A)
    predicted = np.array([np.prod(base[list(s)]) for s in combinations(range(n), m)], dtype=complex)
    compound = compound_matrix(A, m)
    observed = scipy.linalg.eigvals(compound)
    scale = max(1.0, float(np.linalg.norm(A, 2)) ** m)
    mismatch = match_spectra(observed, predicted)
    details: dict[str, float | bool | int] = {"mismatch": mismatch, "dimension": int(observed.size)}
    route_gap = 0.0
    if n**m <= get_settings().max_tensor_dim:
        route_gap = float(np.max(np.abs(compound_via_tensor(A, m) - compound)))
        details["tensor_route_gap"] = route_gap
    return CertReport(
        name="compound_spectrum",
        passed=bool(mismatch <= tolerance * scale and route_gap <= tolerance * scale),
        min_value=-mismatch,
        tolerance=tolerance * scale,
        details=details,
    )


def wedge_spectral_radius(A: np.ndarray, m: int) -> float:
    """Spectral radius of the m-th compound, |λ_1 ⋯ λ_m| for the leading eigenvalues of A."""
    return float(np.max(np.abs(scipy.linalg.eigvals(compound_matrix(A, m)))))

