"""Spectral operators and energy functionals on periodic fields.

All transforms use numpy's unnormalized DFT together with explicit
quadrature weights: real-space sums carry ``cell_volume`` and Fourier-space
sums carry ``cell_volume / size``, which makes the discrete Parseval
identity ``mass(u) == spectral mass(u)`` hold to roundoff.  Every identity
asserted about these functionals (multiplier action, self-adjointness,
gradient pairing) is independent of the transform normalization.

Sign conventions: the energy is ``E(u) = 1/2 |u|_{H^alpha-dot}^2 -
1/4 * hartree_quadratic(u)`` (focusing), and its L^2 gradient is
``G(u) = (-Lap)^alpha u - (K * |u|^2) u`` so that
``d/de E(u + e v)|_0 = Re <G(u), v>_{L^2}``.
"""

from __future__ import annotations

import numpy as np

from .fields import Field
from .grid import Grid, PhysicsParams
from .kernel import HartreeKernel, hartree_potential, hartree_quadratic

__all__ = [
    "mass",
    "l2_inner",
    "l2_norm",
    "frac_laplacian",
    "sobolev_seminorm_sq",
    "h_alpha_norm",
    "h_alpha_inner",
    "energy",
    "energy_gradient",
    "lagrange_multiplier",
    "hardy_sup_ratio",
]


def _check_params(u: Field, p: PhysicsParams, kernel: HartreeKernel) -> None:
    if p.d != u.grid.d:
        raise ValueError(f"params have d={p.d} but field lives in d={u.grid.d}")
    if kernel.grid != u.grid:
        raise ValueError("field and kernel live on different grids")
    if kernel.gamma != p.gamma:
        raise ValueError(
            f"kernel exponent {kernel.gamma} does not match params gamma {p.gamma}"
        )


def mass(u: Field) -> float:
    """``sum |u|^2 * cell_volume`` (squared L^2 norm)."""
    return float(np.sum(np.abs(u.values) ** 2) * u.grid.cell_volume)


def l2_inner(u: Field, v: Field) -> complex:
    """``sum conj(u) v * cell_volume``, conjugate-linear in the first slot."""
    u._check_same_grid(v)
    return complex(np.sum(np.conj(u.values) * v.values) * u.grid.cell_volume)


def l2_norm(u: Field) -> float:
    return float(np.sqrt(mass(u)))


def frac_laplacian(u: Field, alpha: float) -> Field:
    """Fractional Laplacian: Fourier multiplier ``|k|^(2*alpha)``, zero mode -> 0."""
    mult = u.grid.fractional_multiplier(alpha)
    return Field(u.grid, np.fft.ifftn(mult * np.fft.fftn(u.values)))


def _spectral_weight(grid: Grid) -> float:
    return grid.cell_volume / grid.size


def sobolev_seminorm_sq(u: Field, alpha: float) -> float:
    """Squared homogeneous seminorm ``sum |k|^(2*alpha) |u_hat|^2`` (Parseval weight)."""
    mult = u.grid.fractional_multiplier(alpha)
    uhat = np.fft.fftn(u.values)
    return float(np.sum(mult * np.abs(uhat) ** 2) * _spectral_weight(u.grid))


def h_alpha_norm(u: Field, alpha: float) -> float:
    """Inhomogeneous norm ``sqrt(|u|_2^2 + |u|_{H^alpha-dot}^2)``."""
    return float(np.sqrt(mass(u) + sobolev_seminorm_sq(u, alpha)))


def h_alpha_inner(u: Field, v: Field, alpha: float) -> complex:
    """Weighted pairing ``sum (1 + |k|^(2*alpha)) conj(u_hat) v_hat`` (Parseval weight)."""
    u._check_same_grid(v)
    weight = 1.0 + u.grid.fractional_multiplier(alpha)
    uhat = np.fft.fftn(u.values)
    vhat = np.fft.fftn(v.values)
    return complex(np.sum(weight * np.conj(uhat) * vhat) * _spectral_weight(u.grid))


def energy(u: Field, p: PhysicsParams, kernel: HartreeKernel) -> float:
    """``E(u) = 1/2 |u|_{H^alpha-dot}^2 - 1/4 hartree_quadratic(u)``."""
    _check_params(u, p, kernel)
    return 0.5 * sobolev_seminorm_sq(u, p.alpha) - 0.25 * hartree_quadratic(u, kernel)


def energy_gradient(u: Field, p: PhysicsParams, kernel: HartreeKernel) -> Field:
    """L^2 gradient ``G(u) = (-Lap)^alpha u - (K * |u|^2) u``."""
    _check_params(u, p, kernel)
    lin = frac_laplacian(u, p.alpha)
    pot = hartree_potential(u, kernel)
    return Field(u.grid, lin.values - pot * u.values)


def lagrange_multiplier(u: Field, p: PhysicsParams, kernel: HartreeKernel) -> float:
    """Frequency ``omega = (|u|_{H^alpha-dot}^2 - hartree_quadratic(u)) / mass(u)``.

    Pairing the gradient with ``u`` shows ``omega * mass == Re <G(u), u>``,
    so at a constrained critical point ``G(u) = omega * u``.
    """
    m = mass(u)
    if m == 0.0:
        raise ValueError("lagrange_multiplier undefined for the zero field")
    _check_params(u, p, kernel)
    return (sobolev_seminorm_sq(u, p.alpha) - hartree_quadratic(u, kernel)) / m


def hardy_sup_ratio(u: Field, alpha: float, kernel: HartreeKernel) -> float:
    """``sup_y (K * |u|^2)(y) / |u|_{H^alpha}^2`` — a translation-invariant
    diagnostic for the kernel-vs-Sobolev bound; finite uniformly in u."""
    if kernel.grid != u.grid:
        raise ValueError("field and kernel live on different grids")
    denom_sq = mass(u) + sobolev_seminorm_sq(u, alpha)
    if denom_sq == 0.0:
        raise ValueError("hardy_sup_ratio undefined for the zero field")
    return float(np.max(hartree_potential(u, kernel))) / denom_sq
