"""Interaction kernel: origin-cell regularization against independent
quadrature oracles, hand-computed pairings, and fast-path/direct-path
equivalence."""

import numpy as np
import pytest
from scipy import integrate

from fhnlse import (
    Field,
    Grid,
    HartreeKernel,
    hartree_direct,
    hartree_potential,
    hartree_quadratic,
    origin_cell_average,
    random_band_limited,
)
from fhnlse.kernel import DIRECT_SITE_LIMIT, kernel_spectrum


# ---------------------------------------------------------------------------
# Independent quadrature oracles for the average of |x|^(-gamma) over the
# unit cell.  None of them share machinery with the implementation: d=1 uses
# adaptive quadrature with a declared interior singularity, d=2 reduces the
# square to a smooth 1-D integral in polar coordinates, and d=3 nests that
# reduction inside an outer 1-D quadrature over the third axis.


def _oracle_1d(gamma: float) -> float:
    val, _ = integrate.quad(
        lambda x: abs(x) ** (-gamma), -0.5, 0.5, points=[0.0], limit=200
    )
    return val


def _oracle_2d(gamma: float) -> float:
    # 8 * int_0^{pi/4} int_0^{1/(2 cos t)} r^(1-gamma) dr dt, radial part closed form
    val, _ = integrate.quad(
        lambda t: (2.0 * np.cos(t)) ** (gamma - 2.0),
        0.0,
        np.pi / 4.0,
        epsabs=1e-14,
        epsrel=1e-13,
        limit=200,
    )
    return 8.0 / (2.0 - gamma) * val


def _oracle_3d(gamma: float) -> float:
    # slice by z: the square cross-section integral of (rho^2+z^2)^(-gamma/2)
    # reduces to a smooth theta integral exactly as in 2-D
    def cross_section(z: float) -> float:
        def integrand(t: float) -> float:
            a = 1.0 / (4.0 * np.cos(t) ** 2) + z * z
            return a ** ((2.0 - gamma) / 2.0) - (z * z) ** ((2.0 - gamma) / 2.0)

        val, _ = integrate.quad(
            integrand, 0.0, np.pi / 4.0, epsabs=1e-13, epsrel=1e-12, limit=200
        )
        return 8.0 / (2.0 - gamma) * val

    val, _ = integrate.quad(cross_section, 0.0, 0.5, epsabs=1e-12, epsrel=1e-11, limit=400)
    return 2.0 * val


class TestOriginCellAverage:
    @pytest.mark.parametrize("gamma", [0.3, 0.5, 0.7, 0.9])
    def test_matches_1d_quadrature_oracle(self, gamma):
        oracle = _oracle_1d(gamma)
        assert origin_cell_average(1, gamma) == pytest.approx(oracle, rel=1e-10)

    @pytest.mark.parametrize("gamma", [0.3, 0.5, 1.0, 1.5, 1.9])
    def test_matches_2d_polar_oracle(self, gamma):
        oracle = _oracle_2d(gamma)
        assert origin_cell_average(2, gamma) == pytest.approx(oracle, rel=1e-12)

    @pytest.mark.parametrize("gamma", [0.5, 1.0, 1.5])
    def test_matches_3d_nested_oracle(self, gamma):
        oracle = _oracle_3d(gamma)
        assert origin_cell_average(3, gamma) == pytest.approx(oracle, rel=1e-10)

    def test_rejects_gamma_outside_integrable_range(self):
        with pytest.raises(ValueError, match="integrability"):
            origin_cell_average(2, 2.0)
        with pytest.raises(ValueError, match="integrability"):
            origin_cell_average(1, 0.0)


class TestKernelSamples:
    def test_off_origin_samples_are_min_image_power_law(self):
        grid = Grid(d=1, n=16, L=8.0)
        kernel = HartreeKernel(grid, 0.5)
        # displacement layout: index m holds |m*h|^(-gamma) for small m
        assert kernel.samples[3] == pytest.approx((3 * grid.h) ** -0.5, rel=1e-15)
        # aliased index n-1 is displacement -h
        assert kernel.samples[15] == pytest.approx(grid.h**-0.5, rel=1e-15)

    def test_origin_sample_scales_like_h_to_minus_gamma(self):
        gamma = 0.5
        a = HartreeKernel(Grid(d=2, n=16, L=8.0), gamma)
        b = HartreeKernel(Grid(d=2, n=16, L=16.0), gamma)
        ratio = a.samples[0, 0] / b.samples[0, 0]
        expected = (a.grid.h / b.grid.h) ** (-gamma)
        assert ratio == pytest.approx(expected, rel=1e-14)
        assert a.samples[0, 0] == pytest.approx(
            origin_cell_average(2, gamma) * a.grid.h ** (-gamma), rel=1e-14
        )

    def test_samples_and_spectrum_are_frozen(self):
        kernel = HartreeKernel(Grid(d=1, n=8, L=4.0), 0.5)
        with pytest.raises(ValueError):
            kernel.samples[0] = 1.0
        with pytest.raises(ValueError):
            kernel.spectrum[0] = 1.0

    def test_spectrum_zero_mode_is_sample_sum(self):
        kernel = HartreeKernel(Grid(d=2, n=16, L=8.0), 0.5)
        assert kernel.spectrum[0, 0] == pytest.approx(np.sum(kernel.samples), rel=1e-13)

    def test_rejects_gamma_outside_range(self):
        grid = Grid(d=2, n=16, L=8.0)
        with pytest.raises(ValueError, match="gamma"):
            HartreeKernel(grid, 2.0)
        with pytest.raises(ValueError, match="gamma"):
            HartreeKernel(grid, 0.0)

    def test_spectrum_transform_rejects_uneven_samples(self):
        asymmetric = np.zeros(8)
        asymmetric[1] = 1.0  # no matching value at index -1
        with pytest.raises(ValueError, match="imaginary"):
            kernel_spectrum(asymmetric)


class TestHartreePairings:
    def test_two_site_pairing_matches_hand_sum(self):
        """Place density on two sites and expand the double sum by hand."""
        grid = Grid(d=1, n=8, L=4.0)
        kernel = HartreeKernel(grid, 0.5)
        vals = np.zeros(8, dtype=complex)
        vals[2] = 1.5
        vals[6] = 0.5j  # magnitude matters, phase must not
        u = Field(grid, vals)
        rho_a, rho_b = 1.5**2, 0.5**2
        k0 = kernel.samples[0]
        k_sep = kernel.samples[(2 - 6) % 8]
        hand = (rho_a**2 + rho_b**2) * k0 + 2.0 * rho_a * rho_b * k_sep
        hand *= grid.cell_volume**2
        assert hartree_quadratic(u, kernel) == pytest.approx(hand, rel=1e-13)
        assert hartree_direct(u, kernel) == pytest.approx(hand, rel=1e-13)

    @pytest.mark.parametrize(
        "grid",
        [Grid(d=1, n=64, L=40.0), Grid(d=2, n=16, L=20.0), Grid(d=3, n=8, L=10.0)],
        ids=["d1", "d2", "d3"],
    )
    def test_fast_path_matches_direct_double_sum(self, grid):
        kernel = HartreeKernel(grid, 0.5)
        for rep in range(4):
            u = random_band_limited(grid, seed=50 + rep)
            fast = hartree_quadratic(u, kernel)
            direct = hartree_direct(u, kernel)
            assert fast == pytest.approx(direct, rel=1e-10)

    def test_direct_path_refuses_large_grids(self):
        grid = Grid(d=2, n=128, L=40.0)
        kernel = HartreeKernel(grid, 0.5)
        u = random_band_limited(grid, seed=1)
        assert grid.size > DIRECT_SITE_LIMIT
        with pytest.raises(ValueError, match=str(DIRECT_SITE_LIMIT)):
            hartree_direct(u, kernel)

    def test_pairing_is_positive_for_nonzero_fields(self):
        grid = Grid(d=2, n=16, L=10.0)
        kernel = HartreeKernel(grid, 0.5)
        for rep in range(3):
            u = random_band_limited(grid, seed=80 + rep)
            assert hartree_quadratic(u, kernel) > 0.0

    def test_convolving_a_lattice_delta_reproduces_the_samples(self):
        grid = Grid(d=2, n=16, L=8.0)
        kernel = HartreeKernel(grid, 0.5)
        delta = np.zeros(grid.shape)
        delta[0, 0] = 1.0
        conv = kernel.convolve_density(delta)
        assert np.allclose(conv, kernel.samples * grid.cell_volume, rtol=1e-12, atol=1e-12)

    def test_potential_is_translation_covariant(self):
        grid = Grid(d=2, n=16, L=10.0)
        kernel = HartreeKernel(grid, 0.5)
        u = random_band_limited(grid, seed=7)
        shifted = Field(grid, np.roll(u.values, shift=(3, -5), axis=(0, 1)))
        pot_shifted = hartree_potential(shifted, kernel)
        expected = np.roll(hartree_potential(u, kernel), shift=(3, -5), axis=(0, 1))
        assert np.allclose(pot_shifted, expected, rtol=1e-12, atol=1e-12)

    def test_rejects_field_from_another_grid(self):
        kernel = HartreeKernel(Grid(d=2, n=16, L=10.0), 0.5)
        u = random_band_limited(Grid(d=2, n=16, L=12.0), seed=1)
        with pytest.raises(ValueError, match="different grids"):
            hartree_quadratic(u, kernel)
