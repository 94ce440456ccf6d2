"""Unit tests for the method-of-steps solver."""

import numpy as np
import pytest

from dde_compound.models.coefficient import DdeSystem, PeriodicCoefficient
from dde_compound.models.grid import Grid, Segment
from dde_compound.services import dde_core
from dde_compound.utils.errors import InvalidArgumentError, NumericFailureError


class TestTransform:
    """Test removal of the instantaneous term."""

    def setup_method(self) -> None:
        """Set up test fixtures."""
        self.grid = Grid(16)

    def test_zero_alpha_keeps_beta(self) -> None:
        """Test that b = beta when alpha vanishes."""
        system = DdeSystem(
            PeriodicCoefficient.constant(self.grid, 0.0), PeriodicCoefficient.sinusoid(self.grid, 1.0, 0.5)
        )
        mu, b = dde_core.transform(system)
        assert np.allclose(b.samples, system.beta.samples)
        assert mu(np.array([2.0]))[0] == pytest.approx(1.0)

    def test_constant_alpha_scales_beta(self) -> None:
        """Test b = beta·e^{alpha} for constant alpha."""
        system = DdeSystem.constant(self.grid, 0.5, -2.0)
        mu, b = dde_core.transform(system)
        assert np.allclose(b.samples, -2.0 * np.exp(0.5))
        assert mu(np.array([1.5]))[0] == pytest.approx(np.exp(0.75))
        assert str(b.sign_class) == "nonpos"


class TestStep:
    """Test the explicit step formula."""

    def setup_method(self) -> None:
        """Set up test fixtures."""
        self.grid = Grid(16)
        self.b = PeriodicCoefficient.constant(self.grid, 1.0)
        self.ones = Segment.constant(self.grid, 1.0)

    def test_unit_step_of_constant(self) -> None:
        """Test y_1(θ) = -θ for b = 1 and ψ = 1."""
        out = dde_core.step(self.b, 0.0, 1.0, self.ones)
        assert np.allclose(out.values, -self.grid.nodes, atol=1e-14)

    def test_short_step_shifts(self) -> None:
        """Test that θ <= -η is a pure shift."""
        psi = Segment.from_function(self.grid, np.cos)
        out = dde_core.step(self.b, 0.0, 0.25, psi)
        assert np.allclose(out.values[:13], psi.values[4:])

    def test_process_property(self) -> None:
        """Test U(1, 0.5)U(0.5, 0) = U(1, 0) on the discrete grid."""
        b = PeriodicCoefficient.sinusoid(self.grid, 1.0, 0.5)
        psi = Segment.from_function(self.grid, lambda theta: np.sin(3 * theta) + 0.2)
        half = dde_core.step(b, 0.0, 0.5, psi)
        composed = dde_core.step(b, 0.5, 0.5, half)
        direct = dde_core.step(b, 0.0, 1.0, psi)
        assert np.allclose(composed.values, direct.values, atol=1e-13)

    def test_long_step_is_composition(self) -> None:
        """Test that η > 1 composes unit steps."""
        psi = Segment.from_function(self.grid, np.exp)
        long_step = dde_core.step(self.b, 0.0, 2.5, psi)
        stepwise = dde_core.step(self.b, 2.0, 0.5, dde_core.step(self.b, 0.0, 2.0, psi))
        assert np.allclose(long_step.values, stepwise.values, atol=1e-13)

    def test_nonpositive_eta(self) -> None:
        """Test rejection of empty steps."""
        with pytest.raises(InvalidArgumentError):
            dde_core.step(self.b, 0.0, 0.0, self.ones)

    def test_misaligned_tau(self) -> None:
        """Test rejection of off-grid start times."""
        with pytest.raises(InvalidArgumentError, match="tau"):
            dde_core.step(self.b, 0.01, 1.0, self.ones)

    def test_step_block_length(self) -> None:
        """Test the step-length bounds of the batched kernel."""
        with pytest.raises(InvalidArgumentError):
            dde_core.step_block(self.b, 0, 17, np.ones((2, 17)))

    def test_overflow_is_numeric_failure(self) -> None:
        """Test that non-finite evolution is reported."""
        b = PeriodicCoefficient.constant(self.grid, 1e300)
        with pytest.raises(NumericFailureError):
            dde_core.step(b, 0.0, 2.0, Segment.constant(self.grid, 1e300))


class TestSolve:
    """Test trajectories."""

    def setup_method(self) -> None:
        """Set up test fixtures."""
        self.grid = Grid(16)

    def test_piecewise_polynomial_solution(self) -> None:
        """Test x' = -x(t-1), x ≡ 1 on [-1, 0] against the exact solution."""
        b = PeriodicCoefficient.constant(self.grid, 1.0)
        traj = dde_core.solve(b, 0.0, 2.0, Segment.constant(self.grid, 1.0))
        assert traj.samples.size == 49
        assert traj.value_at(0.5) == pytest.approx(0.5)
        assert traj.value_at(1.5) == pytest.approx(-0.375)

    def test_untransformed_pure_decay(self) -> None:
        """Test x' = -x with no delayed feedback."""
        system = DdeSystem.constant(self.grid, 1.0, 0.0)
        traj = dde_core.solve_untransformed(system, 0.0, 2.0, Segment.constant(self.grid, 1.0))
        assert traj.value_at(2.0) == pytest.approx(np.exp(-2.0))
        assert traj.value_at(-0.5) == pytest.approx(1.0)

    def test_batched_evolution_matches_single(self) -> None:
        """Test that the batched kernel agrees with single solves."""
        system = DdeSystem(
            PeriodicCoefficient.constant(self.grid, 0.3), PeriodicCoefficient.sinusoid(self.grid, 1.0, 0.5)
        )
        block = np.stack([np.cos(self.grid.nodes), self.grid.nodes**2])
        batched = dde_core.evolve_block_untransformed(system, 0.0, 1.5, block)
        for row, initial in zip(batched, block, strict=True):
            single = dde_core.solve_untransformed(system, 0.0, 1.5, Segment(self.grid, initial))
            assert np.allclose(row, single.segment_at(1.5).values)

    def test_end_before_start(self) -> None:
        """Test rejection of reversed windows."""
        b = PeriodicCoefficient.constant(self.grid, 1.0)
        with pytest.raises(InvalidArgumentError):
            dde_core.solve(b, 1.0, 0.0, Segment.constant(self.grid, 1.0))
