import numpy as np
import pytest

from quasibohm import (
    CapabilityError,
    InvalidParameterError,
    PiecewiseBox,
    build_harmonic,
    build_infinite_well,
    build_numeric,
)


def single_box(grid_points, width=np.pi, count=3):
    pot = PiecewiseBox(0.0, width, [((0.0, width), 0.0)])
    return build_numeric(pot, grid_points, count)


def symmetric_double_well(grid_points=4096, count=5):
    pot = PiecewiseBox(
        0.0, 10.0, [((0.0, 4.5), 0.0), ((4.5, 5.5), 5.0), ((5.5, 10.0), 0.0)]
    )
    return build_numeric(pot, grid_points, count)


class TestInfiniteWell:
    def test_energies_analytic(self):
        b = build_infinite_well(np.pi, 2)
        assert b.energies[0] == pytest.approx(0.5, abs=1e-14)
        assert b.energies[1] == pytest.approx(2.0, abs=1e-14)

    def test_ground_state_normalized(self):
        b = build_infinite_well(np.pi, 1)
        xs = np.linspace(0, np.pi, 20001)
        vals = np.sqrt(2 / np.pi) * np.sin(xs)
        assert np.trapezoid(vals**2, xs) == pytest.approx(1.0, abs=1e-12)

    def test_invalid_parameters(self):
        with pytest.raises(InvalidParameterError):
            build_infinite_well(-1.0, 2)
        with pytest.raises(InvalidParameterError):
            build_infinite_well(np.pi, 0)

    def test_scaled_energies(self):
        b = build_infinite_well(2.0, 3, hbar=2.0, m=0.5)
        k = np.arange(1, 4)
        expect = (2.0 * np.pi * k / 2.0) ** 2
        np.testing.assert_allclose(b.energies, expect, rtol=1e-14)


class TestHarmonic:
    def test_ground_energy(self):
        b = build_harmonic(1.0, 1.0, 3)
        assert b.energies[0] == pytest.approx(0.5, abs=1e-14)
        np.testing.assert_allclose(np.diff(b.energies), 1.0, rtol=1e-14)

    def test_ground_value_at_origin(self):
        b = build_harmonic(1.0, 1.0, 2)
        assert b.phi(0, 0.0) == pytest.approx(np.pi**-0.25, abs=1e-12)

    def test_first_excited_odd(self):
        b = build_harmonic(1.0, 1.0, 2)
        assert b.phi(1, 0.0) == pytest.approx(0.0, abs=1e-14)

    def test_count_cap(self):
        with pytest.raises(CapabilityError):
            build_harmonic(1.0, 1.0, 65)

    def test_high_state_stable(self):
        # recurrence must not blow up for k = 50 out to 10 natural lengths
        b = build_harmonic(1.0, 1.0, 51)
        vals = b.phi(50, np.linspace(-10, 10, 101))
        assert np.all(np.isfinite(vals))
        assert np.max(np.abs(vals)) < 2.0


class TestNumeric:
    def test_single_box_matches_analytic(self):
        b = single_box(4096)
        assert b.energies[0] == pytest.approx(0.5, abs=1e-5)

    def test_orthogonality(self):
        b = single_box(2048, count=4)
        gram = b.orthonormality_matrix()
        assert np.max(np.abs(gram - np.eye(4))) < 1e-8

    def test_double_well_parity(self):
        b = symmetric_double_well()
        xs = b.grid_x
        mid = 0.5 * (xs[0] + xs[-1])
        even = b.grid_phi[0]
        odd = b.grid_phi[1]
        assert np.max(np.abs(even - even[::-1])) < 1e-6
        assert np.max(np.abs(odd + odd[::-1])) < 1e-6
        assert abs(mid - 5.0) < 1e-12

    def test_preconditions(self):
        pot = PiecewiseBox(0.0, 1.0, [((0.0, 1.0), 0.0)])
        with pytest.raises(InvalidParameterError):
            build_numeric(pot, 256, 2)
        with pytest.raises(InvalidParameterError):
            build_numeric(pot, 512, 100)

    def test_segment_validation(self):
        with pytest.raises(InvalidParameterError):
            PiecewiseBox(0.0, 2.0, [((0.0, 1.0), 0.0), ((1.2, 2.0), 1.0)])
        with pytest.raises(InvalidParameterError):
            PiecewiseBox(0.0, 2.0, [((0.0, 1.0), 0.0)])

    def test_second_order_energy_convergence(self):
        e_ref = single_box(16384).energies
        err_coarse = abs(single_box(1024).energies[1] - e_ref[1])
        err_fine = abs(single_box(2048).energies[1] - e_ref[1])
        assert 3.0 < err_coarse / err_fine < 5.0

    def test_schrodinger_residual_second_order(self):
        # probe the interpolated evaluator off-grid with a half-grid stencil;
        # on-grid second differences reproduce the discrete eigenproblem
        # identically, and the V=0 box is degenerate (eigenvectors are exact
        # sines), so use the double well
        def residual(n):
            b = symmetric_double_well(n, count=2)
            dx = b.grid_x[1] - b.grid_x[0]
            h = 0.5 * dx
            xm = b.grid_x[50:-50:4] + 0.37 * dx
            phi = b.phi(0, xm)
            lap = (b.phi(0, xm + h) - 2 * phi + b.phi(0, xm - h)) / h**2
            v = b.potential_value(xm)
            return np.max(np.abs(-0.5 * lap + (v - b.energies[0]) * phi))

        assert 2.5 < residual(1024) / residual(2048) < 6.0


@pytest.mark.parametrize(
    "factory",
    [
        lambda: build_infinite_well(np.pi, 5),
        lambda: build_harmonic(1.0, 1.0, 8),
        lambda: symmetric_double_well(2048),
    ],
    ids=["well", "harmonic", "numeric"],
)
class TestBasisInvariants:
    def test_orthonormality(self, factory):
        b = factory()
        gram = b.orthonormality_matrix(16385)
        assert np.max(np.abs(gram - np.eye(b.count))) < 1e-8

    def test_energies_strictly_increasing(self, factory):
        b = factory()
        assert np.all(np.diff(b.energies) > 0)

    def test_node_counts(self, factory):
        b = factory()
        assert b.node_counts() == list(range(b.count))

    def test_sign_convention_left_boundary(self, factory):
        b = factory()
        x = b.x_lo + 1e-3 * (b.x_hi - b.x_lo)
        for i in range(b.count):
            assert b.phi(i, x) > 0
