"""Time evolution by Strang splitting.

The evolution equation, written with the time derivative isolated, is
``psi_t = i (-Lap)^alpha psi - i (K * |psi|^2) psi``.  One step of size
``dt`` composes

1. half a linear step: ``psi_hat <- exp(+i |k|^(2 alpha) dt/2) psi_hat``,
2. a full nonlinear step ``psi <- exp(-i (K * |psi|^2) dt) psi`` — exact,
   because the substep leaves ``|psi|`` (hence the potential) unchanged,
3. half a linear step again.

``sign=-1`` selects the complex-conjugate convention (both phases flipped),
for comparison with codes that write the equation with the opposite sign.
Every substep is pointwise unimodular, so the scheme conserves mass to
roundoff; the energy error is second order in ``dt``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .errors import NumericalAbort
from .fields import Field
from .grid import PhysicsParams
from .kernel import HartreeKernel
from .spectral import energy, mass, sobolev_seminorm_sq

__all__ = ["step", "evolve", "Trajectory", "conservation_report", "ConservationReport"]

logger = logging.getLogger(__name__)


def _check_setup(psi: Field, p: PhysicsParams, kernel: HartreeKernel | None) -> None:
    if p.d != psi.grid.d:
        raise ValueError(f"params have d={p.d} but field lives in d={psi.grid.d}")
    if kernel is not None:
        if kernel.grid != psi.grid:
            raise ValueError("field and kernel live on different grids")
        if kernel.gamma != p.gamma:
            raise ValueError("kernel exponent does not match params gamma")


def _step_values(
    vals: np.ndarray,
    half_linear: np.ndarray,
    kernel: HartreeKernel | None,
    dt: float,
    sign: int,
) -> np.ndarray:
    out = np.fft.ifftn(half_linear * np.fft.fftn(vals))
    if kernel is not None:
        pot = kernel.convolve_density(np.abs(out) ** 2)
        out = out * np.exp(-1j * sign * dt * pot)
    return np.fft.ifftn(half_linear * np.fft.fftn(out))


def step(
    psi: Field,
    p: PhysicsParams,
    kernel: HartreeKernel | None,
    dt: float,
    sign: int = 1,
) -> Field:
    """One Strang step of size ``dt``.  ``kernel=None`` switches the
    nonlinearity off (free fractional evolution)."""
    _check_setup(psi, p, kernel)
    if not dt > 0:
        raise ValueError(f"dt must be positive (got {dt})")
    if sign not in (1, -1):
        raise ValueError(f"sign must be +1 or -1 (got {sign})")
    mult = psi.grid.fractional_multiplier(p.alpha)
    half_linear = np.exp(0.5j * sign * dt * mult)
    return Field(psi.grid, _step_values(psi.values, half_linear, kernel, dt, sign))


@dataclass
class Trajectory:
    """Recorded states and conserved-quantity series of one evolution.

    ``times``, ``mass_series``, ``energy_series`` and ``snapshots`` all have
    one entry per recorded instant (t = 0, every ``stride``-th step, and the
    final time).
    """

    times: np.ndarray
    snapshots: list[Field]
    mass_series: np.ndarray
    energy_series: np.ndarray
    dt: float
    steps: int

    def __post_init__(self) -> None:
        k = len(self.times)
        if not (len(self.snapshots) == len(self.mass_series) == len(self.energy_series) == k):
            raise ValueError("trajectory series lengths differ")


def evolve(
    psi0: Field,
    p: PhysicsParams,
    kernel: HartreeKernel | None,
    T: float,
    dt: float,
    stride: int = 1,
    sign: int = 1,
) -> Trajectory:
    """Advance from t = 0 to ``T`` in steps of ``dt``.

    States are recorded at t = 0, after every ``stride``-th step, and at the
    final time; the final partial step is shortened so the run ends exactly
    at ``T`` (within one ``dt``).  Raises :class:`NumericalAbort` on
    non-finite values.
    """
    _check_setup(psi0, p, kernel)
    if not dt > 0:
        raise ValueError(f"dt must be positive (got {dt})")
    if T < 0:
        raise ValueError(f"T must be nonnegative (got {T})")
    if stride < 1:
        raise ValueError(f"stride must be >= 1 (got {stride})")
    if sign not in (1, -1):
        raise ValueError(f"sign must be +1 or -1 (got {sign})")

    grid = psi0.grid
    mult = grid.fractional_multiplier(p.alpha)
    half_linear = np.exp(0.5j * sign * dt * mult)

    n_full = int(np.floor(T / dt + 1e-9))
    remainder = T - n_full * dt
    if remainder <= 1e-9 * dt:
        remainder = 0.0

    times: list[float] = []
    snapshots: list[Field] = []
    masses: list[float] = []
    energies: list[float] = []

    def record(t: float, vals: np.ndarray) -> None:
        f = Field(grid, vals.copy())
        times.append(t)
        masses.append(mass(f))
        energies.append(
            energy(f, p, kernel)
            if kernel is not None
            else 0.5 * sobolev_seminorm_sq(f, p.alpha)
        )
        snapshots.append(f)

    vals = psi0.values.copy()
    record(0.0, vals)
    total_steps = n_full + (1 if remainder else 0)
    for k in range(1, n_full + 1):
        vals = _step_values(vals, half_linear, kernel, dt, sign)
        if not np.all(np.isfinite(vals.view(np.float64))):
            raise NumericalAbort(f"non-finite state at step {k} (t = {k * dt:g})")
        if k % stride == 0 or k == total_steps:
            record(k * dt, vals)
    if remainder:
        partial = np.exp(0.5j * sign * remainder * mult)
        vals = _step_values(vals, partial, kernel, remainder, sign)
        if not np.all(np.isfinite(vals.view(np.float64))):
            raise NumericalAbort(f"non-finite state at final partial step (t = {T:g})")
        record(T, vals)

    return Trajectory(
        times=np.asarray(times),
        snapshots=snapshots,
        mass_series=np.asarray(masses),
        energy_series=np.asarray(energies),
        dt=dt,
        steps=total_steps,
    )


@dataclass(frozen=True)
class ConservationReport:
    mass_drift: float
    energy_drift: float


def conservation_report(traj: Trajectory) -> ConservationReport:
    """Maximum relative drift of mass and energy over the recorded series."""
    m0 = traj.mass_series[0]
    e0 = traj.energy_series[0]
    if len(traj.times) == 1:
        return ConservationReport(0.0, 0.0)
    mass_drift = float(np.max(np.abs(traj.mass_series - m0)) / abs(m0))
    scale = abs(e0) if e0 != 0.0 else 1.0
    energy_drift = float(np.max(np.abs(traj.energy_series - e0)) / scale)
    return ConservationReport(mass_drift, energy_drift)
