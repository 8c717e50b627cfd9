"""Complex scalar fields on a periodic grid, plus standard constructors."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import Grid

__all__ = ["Field", "gaussian", "plane_wave", "random_band_limited"]


@dataclass
class Field:
    """A complex-valued sample array bound to its grid.

    ``values`` has shape ``grid.shape`` (row-major over axes) and dtype
    complex128.  Arithmetic between fields requires identical grids.
    """

    grid: Grid
    values: np.ndarray

    def __post_init__(self) -> None:
        vals = np.asarray(self.values)
        if vals.shape != self.grid.shape:
            raise ValueError(
                f"field shape {vals.shape} does not match grid shape {self.grid.shape}"
            )
        if vals.dtype != np.complex128:
            vals = vals.astype(np.complex128)
        self.values = np.ascontiguousarray(vals)

    def copy(self) -> "Field":
        return Field(self.grid, self.values.copy())

    def _check_same_grid(self, other: "Field") -> None:
        if self.grid != other.grid:
            raise ValueError("fields live on different grids")

    def __add__(self, other: "Field") -> "Field":
        self._check_same_grid(other)
        return Field(self.grid, self.values + other.values)

    def __sub__(self, other: "Field") -> "Field":
        self._check_same_grid(other)
        return Field(self.grid, self.values - other.values)

    def __mul__(self, factor) -> "Field":
        if isinstance(factor, Field):
            self._check_same_grid(factor)
            return Field(self.grid, self.values * factor.values)
        return Field(self.grid, self.values * factor)

    __rmul__ = __mul__

    def __neg__(self) -> "Field":
        return Field(self.grid, -self.values)


def gaussian(
    grid: Grid,
    width: float | None = None,
    center: tuple[float, ...] | None = None,
    mass: float | None = None,
) -> Field:
    """Real Gaussian bump ``exp(-|x - c|^2 / (2 width^2))``.

    ``width`` defaults to ``L/8`` and ``center`` to the coordinate origin
    (the box center).  If ``mass`` is given the result is rescaled so that
    ``sum |u|^2 * cell_volume == mass``.
    """
    w = grid.L / 8.0 if width is None else float(width)
    if not w > 0:
        raise ValueError(f"width must be positive (got {w})")
    c = (0.0,) * grid.d if center is None else tuple(center)
    if len(c) != grid.d:
        raise ValueError("center must have one component per axis")
    rsq = np.zeros(grid.shape)
    for axis in range(grid.d):
        view = [1] * grid.d
        view[axis] = grid.n
        rsq = rsq + ((grid.axis_coords - c[axis]) ** 2).reshape(view)
    vals = np.exp(-rsq / (2.0 * w * w)).astype(np.complex128)
    field = Field(grid, vals)
    if mass is not None:
        current = np.sum(np.abs(field.values) ** 2) * grid.cell_volume
        field = field * np.sqrt(mass / current)
    return field


def plane_wave(grid: Grid, mode: tuple[int, ...]) -> Field:
    """Lattice plane wave ``exp(i k . x)`` with ``k = 2*pi*mode/L``.

    ``mode`` has one integer per axis; modes are aliased modulo ``n``, so
    distinct waves correspond to components in ``-n/2 .. n/2 - 1``.
    """
    m = tuple(int(c) for c in mode)
    if len(m) != grid.d:
        raise ValueError("mode must have one integer per axis")
    phase = np.zeros(grid.shape)
    for axis in range(grid.d):
        view = [1] * grid.d
        view[axis] = grid.n
        k = 2.0 * np.pi * m[axis] / grid.L
        phase = phase + (k * grid.axis_coords).reshape(view)
    return Field(grid, np.exp(1j * phase))


def random_band_limited(
    grid: Grid,
    seed: int,
    keep_fraction: float = 1.0 / 3.0,
    kind: str = "complex",
) -> Field:
    """Smooth random field with Fourier support in the low modes.

    Fourier coefficients are i.i.d. standard complex normals on the modes
    whose per-axis index satisfies ``|m| <= keep_fraction * (n/2)``; all
    other modes are zeroed.  The result is normalized to unit mass.

    ``kind``: "complex" (default), "real" (real part), or "nonneg"
    (absolute value of the real part; useful for rearrangement inputs).
    """
    if not 0.0 < keep_fraction <= 1.0:
        raise ValueError(f"keep_fraction must lie in (0, 1] (got {keep_fraction})")
    if kind not in ("complex", "real", "nonneg"):
        raise ValueError(f"unknown kind {kind!r}")
    rng = np.random.default_rng(seed)
    coeff = rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)
    m = np.fft.fftfreq(grid.n) * grid.n
    keep = np.abs(m) <= keep_fraction * (grid.n / 2.0)
    for axis in range(grid.d):
        view = [1] * grid.d
        view[axis] = grid.n
        coeff = coeff * keep.reshape(view)
    vals = np.fft.ifftn(coeff)
    if kind == "real":
        vals = vals.real.astype(np.complex128)
    elif kind == "nonneg":
        vals = np.abs(vals.real).astype(np.complex128)
    norm_sq = np.sum(np.abs(vals) ** 2) * grid.cell_volume
    if norm_sq == 0.0:
        raise ValueError("degenerate random field (all retained modes zero)")
    return Field(grid, vals / np.sqrt(norm_sq))
