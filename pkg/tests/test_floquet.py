"""Unit tests for monodromy, Floquet multipliers and lap numbers."""

import numpy as np
import pytest

from dde_compound.models.coefficient import DdeSystem, PeriodicCoefficient
from dde_compound.models.grid import Grid, Segment
from dde_compound.services import dde_core, floquet
from dde_compound.services.tensor_spectra import eigenvalues
from dde_compound.utils.errors import InvalidArgumentError, NumericFailureError


def periodic_system(grid: Grid, mean: float = 1.0, amplitude: float = 0.5) -> DdeSystem:
    """α = 0, β = mean + amplitude·sin 2πt."""
    return DdeSystem(
        PeriodicCoefficient.constant(grid, 0.0), PeriodicCoefficient.sinusoid(grid, mean, amplitude)
    )


class TestCharacteristicRoots:
    """Test the characteristic roots of constant systems."""

    def test_leading_pair(self) -> None:
        """Test ζ + e^{-ζ} = 0 near -0.3181 ± 1.3372i."""
        roots = floquet.char_roots(0.0, 1.0, 2)
        assert len(roots) == 2
        assert roots[0].real == pytest.approx(-0.3181315, abs=1e-6)
        assert roots[0].imag == pytest.approx(1.3372357, abs=1e-6)
        assert roots[1] == pytest.approx(roots[0].conjugate())

    def test_residuals(self) -> None:
        """Test that every returned root solves the equation."""
        for root in floquet.char_roots(0.3, -0.7, 7):
            assert abs(root + 0.3 - 0.7 * np.exp(-root)) < 1e-10

    def test_pairs_stay_whole(self) -> None:
        """Test that a cut through a conjugate pair keeps both members."""
        roots = floquet.char_roots(0.0, -1.0, 2)
        assert roots[0] == pytest.approx(0.5671433)
        assert len(roots) == 3
        assert roots[2] == pytest.approx(roots[1].conjugate())

    def test_descending_real_parts(self) -> None:
        """Test the ordering."""
        roots = floquet.char_roots(0.0, 1.0, 6)
        assert all(a.real >= b.real - 1e-12 for a, b in zip(roots, roots[1:], strict=False))

    def test_zero_beta(self) -> None:
        """Test rejection of β₀ = 0."""
        with pytest.raises(InvalidArgumentError):
            floquet.char_roots(1.0, 0.0, 2)


class TestMonodromy:
    """Test the period map and its multipliers."""

    def test_leading_multiplier_constant(self) -> None:
        """Test |λ1| = e^{Re ζ1} for x' = -x(t-1)."""
        system = DdeSystem.constant(Grid(64), 0.0, 1.0)
        spectrum = floquet.floquet_multipliers(floquet.monodromy(system), 4)
        assert abs(spectrum.values[0]) == pytest.approx(0.727616, abs=2e-3)
        assert spectrum.values[0].imag > 0

    def test_transformed_multipliers_shift(self) -> None:
        """Test λ̃ = e^{γα₀}λ between the original and transformed equations."""
        system = DdeSystem.constant(Grid(16), 0.5, 1.0)
        _, b = dde_core.transform(system)
        original = floquet.floquet_multipliers(floquet.monodromy(system), 3)
        transformed = floquet.floquet_multipliers(floquet.monodromy(b), 3)
        shift = floquet.multiplier_shift(system)
        assert shift == pytest.approx(np.exp(0.5))
        assert np.allclose(np.array(original.values) * shift, np.array(transformed.values), atol=1e-10)

    def test_monodromy_columns(self, unit_system) -> None:
        """Test that column j is the image of the j-th hat function."""
        M = floquet.monodromy(unit_system)
        psi = Segment.from_function(unit_system.grid, np.cos)
        image = dde_core.solve_untransformed(unit_system, 0.0, 1.0, psi).segment_at(1.0)
        assert np.allclose(M.entries @ psi.values, image.values, atol=1e-13)

    def test_floor_flags(self) -> None:
        """Test the discretization floor 10·h²."""
        M = floquet.monodromy(DdeSystem.constant(Grid(10), 0.0, 1.0))
        spectrum = floquet.floquet_multipliers(M, 11)
        assert spectrum.floor == pytest.approx(0.1)
        assert not spectrum.is_reliable(spectrum.values[-1])

    def test_k_max_positive(self, unit_system) -> None:
        """Test rejection of k_max = 0."""
        with pytest.raises(InvalidArgumentError):
            floquet.floquet_multipliers(floquet.monodromy(unit_system), 0)

    def test_eigenvector_residual(self, unit_system) -> None:
        """Test eigenvectors and the rejection of non-eigenvalues."""
        M = floquet.monodromy(unit_system)
        value = eigenvalues(M.entries).values[0]
        vector = floquet.eigenvector(M, value)
        assert np.linalg.norm(M.entries @ vector - value * vector) < 1e-8
        with pytest.raises(NumericFailureError):
            floquet.eigenvector(M, 5.0)

    def test_gronwall(self) -> None:
        """Test the exponential norm bound."""
        report = floquet.gronwall_check(periodic_system(Grid(16)))
        assert report.passed
        assert report.details["norm"] <= report.details["bound"] + report.tolerance


class TestLapNumbers:
    """Test sign changes and the lap functions."""

    def test_sign_changes_skip_zeros(self) -> None:
        """Test counting across zeros."""
        assert floquet.sign_changes(np.array([1.0, -1.0, 0.0, 2.0])) == 2
        assert floquet.sign_changes(np.array([1.0, 0.0, 1.0])) == 0

    def test_parity_rounding(self) -> None:
        """Test V⁻ rounds to odd and V⁺ to even."""
        values = np.array([1.0, -1.0, 2.0])
        assert floquet.lap(values, floquet.LapParity.MINUS) == 3
        assert floquet.lap(values, floquet.LapParity.PLUS) == 2
        assert floquet.lap(np.ones(4), floquet.LapParity.MINUS) == 1
        assert floquet.lap(np.ones(4), floquet.LapParity.PLUS) == 0

    def test_parity_for_order(self) -> None:
        """Test the lap function chosen for each m."""
        assert floquet.parity_for(2) is floquet.LapParity.MINUS
        assert floquet.parity_for(3) is floquet.LapParity.PLUS

    def test_zero_function(self) -> None:
        """Test that the zero function has no lap number."""
        with pytest.raises(InvalidArgumentError):
            floquet.sign_changes(np.zeros(5))

    def test_monotone_along_flow(self) -> None:
        """Test that V⁻ never increases for b = 1."""
        b = PeriodicCoefficient.constant(Grid(16), 1.0)
        report = floquet.lap_monotonicity_check(b, 4, 3.0, seed=1)
        assert report.passed, report.details

    def test_mixed_sign_rejected(self) -> None:
        """Test that a sign-changing coefficient has no lap function."""
        b = PeriodicCoefficient.sinusoid(Grid(16), 0.0, 1.0)
        with pytest.raises(InvalidArgumentError):
            floquet.lap_monotonicity_check(b, 1, 1.0, seed=1)


class TestMultiplierBounds:
    """Test lower bounds and the dominance report."""

    def test_lower_bound_value(self) -> None:
        """Test the bound for b = 1, m = 2, k = 2."""
        system = DdeSystem.constant(Grid(32), 0.0, 1.0)
        bounds = dict(floquet.multiplier_lower_bounds(system, 2, 2))
        assert list(bounds) == [2]
        assert bounds[2] == pytest.approx(0.1947, abs=1e-4)
        spectrum = floquet.floquet_multipliers(floquet.monodromy(system), 2)
        assert abs(spectrum.expanded()[1]) >= bounds[2]

    def test_bound_needs_sign(self) -> None:
        """Test rejection when (-1)^m b is not bounded away from zero."""
        system = DdeSystem.constant(Grid(16), 0.0, 1.0)
        with pytest.raises(InvalidArgumentError):
            floquet.multiplier_lower_bounds(system, 3, 3)

    def test_dominance_report_periodic(self) -> None:
        """Test gaps, laps and products for β = 1 + 0.5 sin 2πt."""
        lap_report, cert = floquet.lap_dominance_report(periodic_system(Grid(32)), 2, 4)
        assert cert.passed, cert.details
        assert lap_report.checks["lap_2"]
        assert lap_report.records[0].lap == 1
        assert lap_report.parity == "V-"

    def test_dominance_report_odd(self) -> None:
        """Test λ1 real and positive with lap 0 for β = -1."""
        system = DdeSystem.constant(Grid(32), 0.0, -1.0)
        lap_report, cert = floquet.lap_dominance_report(system, 3, 3)
        assert lap_report.checks["lambda1_real_positive"]
        assert lap_report.checks["lap_1"]
        assert cert.passed, cert.details

    def test_report_needs_sign(self) -> None:
        """Test the sign hypothesis on β."""
        with pytest.raises(InvalidArgumentError):
            floquet.lap_dominance_report(periodic_system(Grid(16)), 3, 3)

    def test_products_monotone_in_beta(self) -> None:
        """Test |λ1λ2| grows with β for m = 2."""
        grid = Grid(16)
        report = floquet.compare_multiplier_products(
            DdeSystem.constant(grid, 0.0, 2.0), DdeSystem.constant(grid, 0.0, 1.0), 2, 4
        )
        assert report.passed
        assert set(report.details["margins"]) == {"2", "4"}

    def test_products_need_ordering(self) -> None:
        """Test rejection of a reversed ordering."""
        grid = Grid(16)
        with pytest.raises(InvalidArgumentError):
            floquet.compare_multiplier_products(
                DdeSystem.constant(grid, 0.0, 1.0), DdeSystem.constant(grid, 0.0, 2.0), 2, 2
            )


class TestHomotopy:
    """Test the continuation from constant β₀."""

    def test_homotopy_system_endpoints(self) -> None:
        """Test κ = 0 gives β₀ and κ = 1 the original system."""
        system = periodic_system(Grid(16))
        start = floquet.homotopy_system(system, 0.0, 0.5)
        end = floquet.homotopy_system(system, 1.0, 0.5)
        assert np.allclose(start.beta.samples, 0.5)
        assert np.allclose(end.beta.samples, system.beta.samples)

    def test_scan(self) -> None:
        """Test a short scan against the characteristic-root oracle."""
        report = floquet.homotopy_scan(periodic_system(Grid(16)), 2, 2, k_max=2)
        assert report.kappas == [0.0, 0.5, 1.0]
        assert len(report.points) == 3
        assert report.oracle_error is not None
        assert report.oracle_error < 5e-2
        assert report.passed

    def test_scan_steps(self) -> None:
        """Test rejection of an empty scan."""
        with pytest.raises(InvalidArgumentError):
            floquet.homotopy_scan(periodic_system(Grid(16)), 2, 0)
