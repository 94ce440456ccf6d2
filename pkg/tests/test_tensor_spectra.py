"""Unit tests for spectra of tensor products and compound matrices."""

import numpy as np
import pytest

from dde_compound.models.spectrum import ComplexSpectrum
from dde_compound.services import tensor_spectra
from dde_compound.utils.errors import CapacityError, InvalidArgumentError


class TestEigenvalues:
    """Test eigenvalues with multiplicities."""

    def test_diagonal_multiplicities(self) -> None:
        """Test clustering of repeated eigenvalues."""
        spectrum = tensor_spectra.eigenvalues(np.diag([2.0, 3.0, 2.0]))
        assert spectrum.values == (3.0, 2.0)
        assert spectrum.multiplicities == (1, 2)

    def test_complex_pair_order(self) -> None:
        """Test that equal moduli are ordered by descending imaginary part."""
        rotation = np.array([[0.0, -1.0], [1.0, 0.0]])
        spectrum = tensor_spectra.eigenvalues(rotation)
        assert spectrum.values[0] == pytest.approx(1j)
        assert spectrum.values[1] == pytest.approx(-1j)

    def test_spectral_order(self) -> None:
        """Test descending modulus with real-part tie-break."""
        values = np.array([1.0, -2.0, 2.0, 0.5j])
        order = tensor_spectra.spectral_order(values)
        assert list(values[order]) == [2.0, -2.0, 1.0, 0.5j]

    def test_rejects_non_square(self) -> None:
        """Test input validation."""
        with pytest.raises(InvalidArgumentError):
            tensor_spectra.eigenvalues(np.ones((2, 3)))
        with pytest.raises(InvalidArgumentError):
            tensor_spectra.eigenvalues(np.array([[np.nan]]))

    def test_capacity(self, mock_settings) -> None:
        """Test the matrix dimension ceiling."""
        with pytest.raises(CapacityError):
            tensor_spectra.eigenvalues(np.eye(20))


class TestTensorProducts:
    """Test Kronecker products and antisymmetrizers."""

    def setup_method(self) -> None:
        """Set up test fixtures."""
        self.rng = np.random.default_rng(3)

    def test_tensor_spectrum_products(self) -> None:
        """Test spec(A ⊗ B) = {λμ} over seeded random pairs."""
        for _ in range(20):
            A = self.rng.standard_normal((4, 4))
            B = self.rng.standard_normal((3, 3))
            report = tensor_spectra.tensor_spectrum_check(A, B, tolerance=1e-7)
            assert report.passed, report.details

    def test_kron_layout(self) -> None:
        """Test the index convention of the Kronecker product."""
        A = np.array([[1.0, 2.0], [3.0, 4.0]])
        B = np.eye(2)
        product = tensor_spectra.kron(A, B)
        assert product[2, 0] == 3.0
        assert product[3, 1] == 3.0

    def test_kron_capacity(self, mock_settings) -> None:
        """Test the Kronecker product ceiling."""
        with pytest.raises(CapacityError):
            tensor_spectra.kron(np.eye(5), np.eye(5))

    def test_antisymmetrizer_is_projection(self) -> None:
        """Test idempotence and rank C(n, m)."""
        P = tensor_spectra.antisymmetrizer(3, 2)
        assert np.allclose(P @ P, P)
        assert np.linalg.matrix_rank(P) == 3

    def test_antisymmetrizer_commutes_with_power(self) -> None:
        """Test that A^{⊗m} preserves antisymmetric tensors."""
        A = self.rng.standard_normal((3, 3))
        P = tensor_spectra.antisymmetrizer(3, 2)
        power = tensor_spectra.kron_power(A, 2)
        assert np.allclose(P @ power, power @ P)


class TestCompoundMatrix:
    """Test compound matrices and predicted multiplicities."""

    def test_compound_of_repeated_diagonal(self) -> None:
        """Test spec(diag(2,2,3)^{∧2}) = {4, 6, 6}."""
        compound = tensor_spectra.compound_matrix(np.diag([2.0, 2.0, 3.0]), 2)
        spectrum = tensor_spectra.eigenvalues(compound)
        assert spectrum.values == (6.0, 4.0)
        assert spectrum.multiplicities == (2, 1)

    def test_predicted_wedge_multiplicity(self) -> None:
        """Test multiplicities predicted from one spectrum."""
        base = ComplexSpectrum((3.0, 2.0), (1, 2))
        assert tensor_spectra.predicted_wedge_multiplicity([base], 4.0, 2) == 1
        assert tensor_spectra.predicted_wedge_multiplicity([base], 6.0, 2) == 2
        assert tensor_spectra.predicted_wedge_multiplicity([base], 9.0, 2) == 0

    def test_predicted_tensor_multiplicity(self) -> None:
        """Test the tensor count over distinct factor spectra."""
        first = ComplexSpectrum((2.0, 1.0), (1, 1))
        second = ComplexSpectrum((3.0, 6.0), (1, 1))
        assert tensor_spectra.predicted_tensor_multiplicity([first, second], 6.0) == 2
        assert tensor_spectra.predicted_wedge_multiplicity([first, second], 12.0, 2) == 1

    def test_zero_lambda_rejected(self) -> None:
        """Test that λ0 = 0 is rejected."""
        with pytest.raises(InvalidArgumentError):
            tensor_spectra.predicted_wedge_multiplicity([ComplexSpectrum((1.0,), (1,))], 0.0, 1)

    def test_compound_routes_agree(self) -> None:
        """Test minors against the antisymmetrized tensor power."""
        A = np.random.default_rng(5).standard_normal((4, 4))
        for m in (2, 3):
            assert np.allclose(tensor_spectra.compound_via_tensor(A, m), tensor_spectra.compound_matrix(A, m))

    def test_compound_spectrum_check(self) -> None:
        """Test spectral containment for the compound."""
        A = np.random.default_rng(9).standard_normal((5, 5))
        report = tensor_spectra.compound_spectrum_check(A, 3)
        assert report.passed
        assert "tensor_route_gap" in report.details

    def test_compound_order_range(self) -> None:
        """Test rejection of m > n."""
        with pytest.raises(InvalidArgumentError):
            tensor_spectra.compound_matrix(np.eye(2), 3)

    def test_wedge_spectral_radius(self) -> None:
        """Test ρ(A^{∧2}) = |λ1 λ2|."""
        A = np.diag([4.0, -3.0, 1.0])
        assert tensor_spectra.wedge_spectral_radius(A, 2) == pytest.approx(12.0)

    def test_match_spectra(self) -> None:
        """Test greedy multiset matching."""
        assert tensor_spectra.match_spectra(np.array([1.0, 2.0]), np.array([2.0, 1.0 + 1e-3])) == pytest.approx(1e-3)
        with pytest.raises(InvalidArgumentError):
            tensor_spectra.match_spectra(np.array([1.0]), np.array([1.0, 2.0]))
