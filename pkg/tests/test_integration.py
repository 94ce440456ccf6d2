"""End-to-end checks of the analytic anchors and certified properties."""

import numpy as np
import pytest

from dde_compound.models.coefficient import DdeSystem, PeriodicCoefficient
from dde_compound.models.grid import Grid, WedgeGrid
from dde_compound.services import compound, floquet, tensor_spectra, u0pos

LEADING_MODULUS = float(np.exp(floquet.char_roots(0.0, 1.0, 1)[0].real))


def leading_error(n_sub: int) -> float:
    """|λ1| error for x' = -x(t-1) on a grid with ``n_sub`` cells."""
    system = DdeSystem.constant(Grid(n_sub), 0.0, 1.0)
    spectrum = floquet.floquet_multipliers(floquet.monodromy(system), 1)
    return abs(abs(spectrum.values[0]) - LEADING_MODULUS)


class TestSpectralAnchors:
    """Tensor and compound spectra of small matrices."""

    def test_tensor_products_of_random_pairs(self) -> None:
        """Test the spectrum of A ⊗ B over 50 seeded pairs."""
        rng = np.random.default_rng(2024)
        for _ in range(50):
            report = tensor_spectra.tensor_spectrum_check(
                rng.standard_normal((4, 4)), rng.standard_normal((3, 3)), tolerance=1e-7
            )
            assert report.details["mismatch"] <= report.tolerance

    def test_compound_multiplicity(self) -> None:
        """Test {4, 6, 6} with the predicted multiplicities."""
        base = np.diag([2.0, 2.0, 3.0])
        observed = tensor_spectra.eigenvalues(tensor_spectra.compound_matrix(base, 2))
        predicted = [tensor_spectra.predicted_wedge_multiplicity([tensor_spectra.eigenvalues(base)], v, 2) for v in (4.0, 6.0)]
        assert dict(zip(observed.values, observed.multiplicities, strict=True)) == {6.0: 2, 4.0: 1}
        assert predicted == [1, 2]


class TestFloquetAnchors:
    """Multipliers of constant and periodic systems."""

    def test_leading_multiplier_converges(self) -> None:
        """Test the n_sub = 64 error and its second-order decay."""
        coarse = leading_error(64)
        fine = leading_error(128)
        assert coarse <= 2e-3
        assert 3.0 <= coarse / fine <= 5.0

    def test_periodic_structure(self) -> None:
        """Test the gap, laps and real product for β = 1 + 0.5 sin 2πt."""
        grid = Grid(64)
        system = DdeSystem(PeriodicCoefficient.constant(grid, 0.0), PeriodicCoefficient.sinusoid(grid, 1.0, 0.5))
        lap_report, cert = floquet.lap_dominance_report(system, 2, 4)
        records = lap_report.records
        assert records[1].modulus - records[2].modulus >= 1e-3
        assert records[0].lap == 1
        assert records[1].lap == 1
        product = complex(records[0].real, records[0].imag) * complex(records[1].real, records[1].imag)
        assert abs(product.imag) <= 1e-6 * abs(product)
        assert product.real > 0
        for record in records:
            if record.lower_bound is not None:
                assert record.modulus >= record.lower_bound
        assert cert.passed

    def test_constant_bounds(self) -> None:
        """Test every admissible bound for b = 1 at n_sub = 64."""
        system = DdeSystem.constant(Grid(64), 0.0, 1.0)
        spectrum = floquet.floquet_multipliers(floquet.monodromy(system), 4).expanded()
        for k, bound in floquet.multiplier_lower_bounds(system, 2, 4):
            assert abs(spectrum[k - 1]) >= bound

    def test_lap_monotonicity(self) -> None:
        """Test V⁻ along 20 seeded trajectories for b = 1."""
        b = PeriodicCoefficient.constant(Grid(32), 1.0)
        assert floquet.lap_monotonicity_check(b, 20, 5.0, seed=7).passed


class TestPositivityAnchors:
    """Cone invariance and the direct compound formula."""

    @pytest.mark.parametrize(("m", "sign"), [(2, 1.0), (3, -1.0)])
    @pytest.mark.parametrize("eta", [0.5, 1.0, 2.0])
    def test_cone_invariance(self, m, sign, eta) -> None:
        """Test 100 seeded cone trials."""
        b = PeriodicCoefficient.constant(Grid(24), sign)
        report = compound.positivity_certificate(b, 0.0, eta, m, 100, seed=17)
        assert report.passed

    @pytest.mark.parametrize("m", [2, 3])
    def test_direct_formula_matches_tensor_route(self, m) -> None:
        """Test that wedge_step and the tensor route agree to rounding over 20 inputs on two grids.

        Both apply the same cellwise weights, so the gap is floating-point error only.
        """
        rng = np.random.default_rng(99)
        for n_sub in (16, 32):
            grid = Grid(n_sub)
            b = PeriodicCoefficient.constant(grid, (-1.0) ** m)
            worst = 0.0
            for _ in range(20):
                phi = compound.random_cone_element(m, grid, rng)
                direct = compound.wedge_step(b, 0.0, 1.0, phi)
                oracle = WedgeGrid.from_cube(compound.tensor_oracle_step(b, 0.0, 1.0, phi.to_cube()), grid)
                worst = max(worst, float(np.max(np.abs(direct.values - oracle.values))) / max(phi.sup_norm(), 1.0))
            assert worst <= 1e-11

    @pytest.mark.parametrize(("m", "beta0"), [(2, 1.0), (3, -1.0)])
    def test_leading_determinant(self, m, beta0) -> None:
        """Test the one-signed, nonvanishing determinant over t ∈ [0, 3]."""
        report = compound.leading_det_check((0.0, beta0), m, (0.0, 3.0), grid=Grid(24))
        assert report.passed
        assert report.details["nonvanishing"]


class TestU0Anchors:
    """Interior ratios and the corner constants."""

    def test_corner_constants(self) -> None:
        """Test Q₀ = 1/24 and Q₁ = 1/12."""
        decomposition = u0pos.decompose_CV(u0pos.make_probe("const", 3, Grid(24)))
        assert decomposition.q0 == pytest.approx(1 / 24, abs=1e-9)
        assert decomposition.q1 == pytest.approx(1 / 12, abs=1e-9)

    @pytest.mark.parametrize(("m", "k"), [(2, 3), (3, 5)])
    @pytest.mark.parametrize("probe", ["const", "bump", "random:5"])
    def test_ratio_bounds(self, m, k, probe) -> None:
        """Test 0 < min ratio <= max ratio <= 2^k·‖φ‖."""
        phi = u0pos.make_probe(probe, m, Grid(24))
        report = u0pos.u0_ratio(phi, m, k, probe)
        assert report.passed
        assert report.within_ceiling
