"""Rotational dynamics of polar asymmetric tops in parallel dc and
non-resonant laser fields: field-dressed spectra, short-iterative-
Lanczos propagation, adiabatic-basis populations and adiabaticity
diagnostics."""

from ._kernels import BACKEND
from .basis import Basis, BasisFunction, SymmetryBlock, basis_dimension, build_basis
from .errors import (
    ConfigError,
    EigensolverError,
    NumericalError,
    PendularError,
    PropagationError,
)
from .fields import DcSpec, PulseSpec, dc_field, pulse_intensity
from .molecule import BENZONITRILE, MoleculeSpec, get_molecule, molecule_from_file
from .operators import (
    OperatorSet,
    build_operators,
    cos2_theta_matrix,
    cos_theta_matrix,
    rotor_matrix,
    sin2theta_sin2chi_matrix,
    total_hamiltonian,
)
from .propagator import (
    HamiltonianProvider,
    SilControls,
    WaveFunction,
    default_dt_fs,
    propagate_window,
    sil_step,
)
from .quadrature import quadrature_oracle
from .runner import RunConfig, Trajectory, adiabatic_reference, prepare_initial, run, sweep
from .spectrum import (
    AdiabaticScan,
    CrossingReport,
    StateLabel,
    adiabaticity_eta,
    detect_crossings,
    diagonalize,
    label_by_field_free,
    max_eta_over_pulse,
    scan_intensity,
)
from .units import polarizability_coupling, stark_coupling

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BENZONITRILE",
    "AdiabaticScan",
    "Basis",
    "BasisFunction",
    "ConfigError",
    "CrossingReport",
    "DcSpec",
    "EigensolverError",
    "HamiltonianProvider",
    "MoleculeSpec",
    "NumericalError",
    "OperatorSet",
    "PendularError",
    "PropagationError",
    "PulseSpec",
    "RunConfig",
    "SilControls",
    "StateLabel",
    "SymmetryBlock",
    "Trajectory",
    "WaveFunction",
    "adiabatic_reference",
    "adiabaticity_eta",
    "basis_dimension",
    "build_basis",
    "build_operators",
    "cos2_theta_matrix",
    "cos_theta_matrix",
    "dc_field",
    "default_dt_fs",
    "detect_crossings",
    "diagonalize",
    "get_molecule",
    "label_by_field_free",
    "max_eta_over_pulse",
    "molecule_from_file",
    "polarizability_coupling",
    "prepare_initial",
    "propagate_window",
    "pulse_intensity",
    "quadrature_oracle",
    "rotor_matrix",
    "run",
    "scan_intensity",
    "sil_step",
    "sin2theta_sin2chi_matrix",
    "stark_coupling",
    "sweep",
    "total_hamiltonian",
    "__version__",
]
