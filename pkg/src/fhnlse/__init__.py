"""Spectral laboratory for a fractional Schrodinger equation with a
Hartree-type nonlocal interaction on a periodic box.

The package computes mass-constrained energy minimizers by projected
gradient descent, checks their qualitative properties (negative energy,
mass-scaling law, radial symmetry via rearrangement, subadditivity), and
probes orbital stability by evolving perturbed minimizers with a Strang
splitting integrator.
"""

from .dynamics import ConservationReport, Trajectory, conservation_report, evolve, step
from .errors import NonConvergenceError, NumericalAbort
from .fields import Field, gaussian, plane_wave, random_band_limited
from .grid import Grid, PhysicsParams
from .groundstate import (
    AlignResult,
    GroundState,
    ScalingResult,
    ScalingRow,
    SolveOptions,
    SubadditivityResult,
    align,
    minimize,
    orbit_representative_distance,
    require_converged,
    scaling_experiment,
    scaling_exponent,
    subadditivity_check,
)
from .kernel import (
    HartreeKernel,
    hartree_direct,
    hartree_potential,
    hartree_quadratic,
    origin_cell_average,
)
from .rearrange import levy_concentration, radial_order, riesz_check, symmetric_rearrange
from .snapshots import read_field, write_csv, write_field, write_json
from .spectral import (
    energy,
    energy_gradient,
    frac_laplacian,
    h_alpha_inner,
    h_alpha_norm,
    hardy_sup_ratio,
    l2_inner,
    l2_norm,
    lagrange_multiplier,
    mass,
    sobolev_seminorm_sq,
)
from .stability import StabilityReport, orbit_distance, perturb, stability_run
from .verify import CheckResult, run_checks

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "AlignResult",
    "CheckResult",
    "ConservationReport",
    "Field",
    "Grid",
    "GroundState",
    "HartreeKernel",
    "NonConvergenceError",
    "NumericalAbort",
    "PhysicsParams",
    "ScalingResult",
    "ScalingRow",
    "SolveOptions",
    "StabilityReport",
    "SubadditivityResult",
    "Trajectory",
    "align",
    "conservation_report",
    "energy",
    "energy_gradient",
    "evolve",
    "frac_laplacian",
    "gaussian",
    "h_alpha_inner",
    "h_alpha_norm",
    "hardy_sup_ratio",
    "hartree_direct",
    "hartree_potential",
    "hartree_quadratic",
    "l2_inner",
    "l2_norm",
    "lagrange_multiplier",
    "levy_concentration",
    "mass",
    "minimize",
    "orbit_distance",
    "orbit_representative_distance",
    "origin_cell_average",
    "perturb",
    "plane_wave",
    "radial_order",
    "random_band_limited",
    "read_field",
    "require_converged",
    "riesz_check",
    "run_checks",
    "scaling_experiment",
    "scaling_exponent",
    "sobolev_seminorm_sq",
    "stability_run",
    "step",
    "subadditivity_check",
    "symmetric_rearrange",
    "write_csv",
    "write_field",
    "write_json",
]
