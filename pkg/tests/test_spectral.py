"""Spectral operators and energy functionals: eigenvalue and closed-form
oracles, Parseval and adjointness identities, the kernel-vs-Sobolev ratio
under refinement, and the exact two-parameter rescaling of all functionals."""

import numpy as np
import pytest

from fhnlse import (
    Field,
    Grid,
    HartreeKernel,
    PhysicsParams,
    energy,
    energy_gradient,
    frac_laplacian,
    gaussian,
    h_alpha_inner,
    h_alpha_norm,
    hardy_sup_ratio,
    hartree_quadratic,
    l2_inner,
    lagrange_multiplier,
    mass,
    plane_wave,
    random_band_limited,
    sobolev_seminorm_sq,
)

ALPHA = 0.6
GAMMA = 0.5


def kernel_mean(kernel: HartreeKernel) -> float:
    """Box average of the sampled kernel: sum K * cell_volume / L^d."""
    g = kernel.grid
    return float(np.sum(kernel.samples)) * g.cell_volume / g.L**g.d


def spectral_refine(u: Field, n_new: int) -> Field:
    """Same trigonometric polynomial sampled on a finer grid (zero padding)."""
    grid = u.grid
    big = Grid(d=grid.d, n=n_new, L=grid.L)
    pad = (n_new - grid.n) // 2
    shifted = np.fft.fftshift(np.fft.fftn(u.values))
    padded = np.pad(shifted, [(pad, pad)] * grid.d)
    scale = (n_new / grid.n) ** grid.d
    return Field(big, np.fft.ifftn(np.fft.ifftshift(padded)) * scale)


class TestFractionalLaplacian:
    @pytest.mark.parametrize("mode", [(1, 0), (0, 3), (2, -5), (-7, 4)])
    def test_plane_waves_are_eigenvectors(self, mode):
        grid = Grid(d=2, n=32, L=17.0)
        u = plane_wave(grid, mode)
        k_sq = sum((2.0 * np.pi * m / grid.L) ** 2 for m in mode)
        eig = k_sq**ALPHA
        out = frac_laplacian(u, ALPHA)
        assert np.allclose(out.values, eig * u.values, rtol=1e-12, atol=1e-12 * eig)

    @pytest.mark.parametrize("d", [1, 2])
    def test_alpha_one_matches_analytic_gaussian_laplacian(self, d):
        grid = Grid(d=d, n=64, L=20.0)
        w = 1.2
        u = gaussian(grid, width=w)
        out = frac_laplacian(u, 1.0)
        rsq = grid.point_distance**2
        expected = u.values * (d / w**2 - rsq / w**4)
        assert np.max(np.abs(out.values - expected)) < 1e-12

    def test_annihilates_constants(self):
        grid = Grid(d=2, n=16, L=10.0)
        u = Field(grid, np.full(grid.shape, 2.0 + 1.0j))
        out = frac_laplacian(u, ALPHA)
        assert np.max(np.abs(out.values)) < 1e-13

    def test_self_adjoint_in_l2(self):
        grid = Grid(d=2, n=16, L=10.0)
        u = random_band_limited(grid, seed=1)
        v = random_band_limited(grid, seed=2)
        left = l2_inner(frac_laplacian(u, ALPHA), v)
        right = l2_inner(u, frac_laplacian(v, ALPHA))
        assert abs(left - right) < 1e-12 * abs(left)


class TestNormsAndIdentities:
    def test_gaussian_mass_closed_form(self):
        # integral of exp(-r^2/w^2) over the plane is pi w^2; periodic tails
        # are below roundoff at this box size
        grid = Grid(d=2, n=64, L=20.0)
        u = gaussian(grid, width=1.0)
        assert mass(u) == pytest.approx(np.pi, rel=1e-12)

    def test_parseval_mass_identity(self):
        grid = Grid(d=2, n=32, L=13.0)
        u = random_band_limited(grid, seed=3)
        uhat = np.fft.fftn(u.values)
        spectral_mass = float(
            np.sum(np.abs(uhat) ** 2) * grid.cell_volume / grid.size
        )
        assert spectral_mass == pytest.approx(mass(u), rel=1e-12)

    def test_h_alpha_norm_decomposes_into_mass_plus_seminorm(self):
        grid = Grid(d=2, n=32, L=13.0)
        u = random_band_limited(grid, seed=4)
        total = h_alpha_norm(u, ALPHA) ** 2
        assert total == pytest.approx(mass(u) + sobolev_seminorm_sq(u, ALPHA), rel=1e-13)
        assert h_alpha_inner(u, u, ALPHA).real == pytest.approx(total, rel=1e-13)

    def test_seminorm_invariant_under_shift_and_phase(self):
        grid = Grid(d=2, n=32, L=13.0)
        u = random_band_limited(grid, seed=5)
        s = sobolev_seminorm_sq(u, ALPHA)
        shifted = Field(grid, np.roll(u.values, shift=(4, -7), axis=(0, 1)))
        rotated = Field(grid, np.exp(1.3j) * u.values)
        assert sobolev_seminorm_sq(shifted, ALPHA) == pytest.approx(s, rel=1e-12)
        assert sobolev_seminorm_sq(rotated, ALPHA) == pytest.approx(s, rel=1e-12)

    def test_plane_wave_h_alpha_norm_closed_form(self):
        grid = Grid(d=2, n=32, L=17.0)
        u = plane_wave(grid, (2, 1))
        k_sq = (2.0 * np.pi / grid.L) ** 2 * 5.0
        expected = np.sqrt((1.0 + k_sq**ALPHA) * grid.L**2)
        assert h_alpha_norm(u, ALPHA) == pytest.approx(expected, rel=1e-12)


class TestEnergyFunctionals:
    def _setup(self, n=32, L=25.0):
        p = PhysicsParams(alpha=ALPHA, gamma=GAMMA, d=2)
        grid = Grid(d=2, n=n, L=L)
        return p, grid, HartreeKernel(grid, GAMMA)

    def test_plane_wave_energy_and_multiplier_closed_form(self):
        p, grid, kernel = self._setup()
        q = 1.7
        pw = plane_wave(grid, (2, -1))
        u = pw * float(np.sqrt(q / mass(pw)))
        k_sq = (2.0 * np.pi / grid.L) ** 2 * 5.0
        mean_k = kernel_mean(kernel)
        expected_energy = 0.5 * k_sq**ALPHA * q - 0.25 * q**2 * mean_k
        expected_omega = k_sq**ALPHA - q * mean_k
        assert energy(u, p, kernel) == pytest.approx(expected_energy, rel=1e-12)
        assert lagrange_multiplier(u, p, kernel) == pytest.approx(expected_omega, rel=1e-12)

    def test_constant_state_energy_is_quarter_q_squared_kernel_mean(self):
        p, grid, kernel = self._setup()
        q = 1.0
        u = Field(grid, np.full(grid.shape, np.sqrt(q) / grid.L, dtype=complex))
        expected = -0.25 * q**2 * kernel_mean(kernel)
        assert energy(u, p, kernel) == pytest.approx(expected, rel=1e-12)

    def test_gradient_matches_finite_difference_directional_derivative(self):
        p, grid, kernel = self._setup(n=16, L=12.0)
        eps = 1e-5
        for rep in range(3):
            u = random_band_limited(grid, seed=20 + rep)
            v = random_band_limited(grid, seed=120 + rep)
            plus = Field(grid, u.values + eps * v.values)
            minus = Field(grid, u.values - eps * v.values)
            fd = (energy(plus, p, kernel) - energy(minus, p, kernel)) / (2.0 * eps)
            pairing = float(
                np.real(np.sum(np.conj(energy_gradient(u, p, kernel).values) * v.values))
                * grid.cell_volume
            )
            assert fd == pytest.approx(pairing, rel=1e-6)

    def test_multiplier_consistent_with_gradient_pairing(self):
        p, grid, kernel = self._setup(n=16, L=12.0)
        u = random_band_limited(grid, seed=31)
        grad = energy_gradient(u, p, kernel)
        pairing = float(np.real(np.sum(np.conj(grad.values) * u.values)) * grid.cell_volume)
        assert lagrange_multiplier(u, p, kernel) == pytest.approx(pairing / mass(u), rel=1e-12)

    def test_rejects_mismatched_kernel_exponent(self):
        p, grid, _ = self._setup(n=16, L=12.0)
        wrong = HartreeKernel(grid, 0.4)
        u = random_band_limited(grid, seed=1)
        with pytest.raises(ValueError, match="gamma"):
            energy(u, p, wrong)

    def test_rejects_mismatched_dimension(self):
        p = PhysicsParams(alpha=ALPHA, gamma=GAMMA, d=1)
        grid = Grid(d=2, n=16, L=12.0)
        kernel = HartreeKernel(grid, GAMMA)
        u = random_band_limited(grid, seed=1)
        with pytest.raises(ValueError, match="d="):
            energy(u, p, kernel)

    def test_multiplier_rejects_zero_field(self):
        p, grid, kernel = self._setup(n=16, L=12.0)
        zero = Field(grid, np.zeros(grid.shape, dtype=complex))
        with pytest.raises(ValueError, match="zero field"):
            lagrange_multiplier(zero, p, kernel)


class TestHardyRatio:
    def test_plane_wave_ratio_closed_form(self):
        grid = Grid(d=2, n=32, L=25.0)
        kernel = HartreeKernel(grid, GAMMA)
        u = plane_wave(grid, (3, 1))
        k_sq = (2.0 * np.pi / grid.L) ** 2 * 10.0
        expected = kernel_mean(kernel) / (1.0 + k_sq**ALPHA)
        assert hardy_sup_ratio(u, ALPHA, kernel) == pytest.approx(expected, rel=1e-12)

    def test_random_sweep_is_stable_under_spectral_refinement(self):
        """The sup of the ratio over a band-limited population must be a
        discretization-converged quantity: re-evaluating the same fields on a
        twice-finer grid moves the maximum by well under ten percent."""
        coarse = Grid(d=2, n=64, L=40.0)
        fine_n = 128
        k_coarse = HartreeKernel(coarse, GAMMA)
        k_fine = HartreeKernel(Grid(d=2, n=fine_n, L=40.0), GAMMA)
        ratios_coarse = []
        ratios_fine = []
        for s in range(40):
            u = random_band_limited(coarse, seed=300 + s)
            ratios_coarse.append(hardy_sup_ratio(u, ALPHA, k_coarse))
            ratios_fine.append(hardy_sup_ratio(spectral_refine(u, fine_n), ALPHA, k_fine))
        m_coarse, m_fine = max(ratios_coarse), max(ratios_fine)
        assert all(r > 0.0 and np.isfinite(r) for r in ratios_coarse)
        assert abs(m_fine - m_coarse) / m_coarse < 0.10

    def test_refinement_helper_preserves_band_limited_fields(self):
        grid = Grid(d=2, n=32, L=13.0)
        u = random_band_limited(grid, seed=9)
        refined = spectral_refine(u, 64)
        assert mass(refined) == pytest.approx(mass(u), rel=1e-12)
        # the refined lattice contains the coarse one at even indices
        assert np.allclose(
            refined.values[::2, ::2], u.values, rtol=1e-12, atol=1e-12
        )

    def test_rejects_zero_field(self):
        grid = Grid(d=2, n=16, L=10.0)
        kernel = HartreeKernel(grid, GAMMA)
        zero = Field(grid, np.zeros(grid.shape, dtype=complex))
        with pytest.raises(ValueError, match="zero field"):
            hardy_sup_ratio(zero, ALPHA, kernel)


class TestExactRescaling:
    def test_all_three_functionals_scale_exactly(self):
        """Re-reading one sample array on a box shrunk by mu realizes the
        continuum rescaling exactly on the lattice: mass picks up mu^d,
        the seminorm mu^(d-2 alpha), and the interaction mu^(2d-gamma)."""
        mu, c = 0.37, 2.3
        base = Grid(d=2, n=32, L=20.0)
        small = Grid(d=2, n=32, L=20.0 * mu)
        k_base = HartreeKernel(base, GAMMA)
        k_small = HartreeKernel(small, GAMMA)
        u = random_band_limited(base, seed=9)
        v = Field(small, c * u.values)
        assert mass(v) == pytest.approx(c**2 * mu**2 * mass(u), rel=1e-13)
        assert sobolev_seminorm_sq(v, ALPHA) == pytest.approx(
            c**2 * mu ** (2.0 - 2.0 * ALPHA) * sobolev_seminorm_sq(u, ALPHA), rel=1e-13
        )
        assert hartree_quadratic(v, k_small) == pytest.approx(
            c**4 * mu ** (4.0 - GAMMA) * hartree_quadratic(u, k_base), rel=1e-13
        )
