"""Time propagation with the short-iterative-Lanczos stepper.

The stepper approximates ``exp(-i * 2pi*1e-3 * H[MHz] * dt[ns])`` in an
adaptively sized Krylov space; the Hamiltonian is evaluated at each step
midpoint (exponential midpoint rule), the step size is fixed over a
window and the last step is shortened to land exactly on the boundary.
Each accepted step is unitary, so the norm is conserved to roundoff and
drift is only monitored, never repaired.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np

from . import _kernels
from .basis import Basis
from .errors import PropagationError
from .fields import DcSpec, PulseSpec, dc_field, pulse_intensity
from .operators import OperatorSet, SymmetricMatrix
from .units import DIPOLE_FIELD_TO_MHZ, polarizability_coupling, stark_coupling

#: dt schedule in fs versus pulse FWHM in ns (capped).
DT_FS_PER_TAU_NS = 7.0
DT_FS_CAP = 150.0


def default_dt_fs(tau_ns: float) -> float:
    """Default SIL time step for a pulse of FWHM ``tau_ns``."""
    return min(DT_FS_CAP, DT_FS_PER_TAU_NS * tau_ns)


@dataclass(frozen=True)
class SilControls:
    """Stepper controls: fixed dt, adaptive Krylov order, error tolerance."""

    dt_fs: float
    max_krylov: int = 25
    min_krylov: int = 4
    step_error_tol: float = 1e-9

    def __post_init__(self) -> None:
        if self.dt_fs <= 0.0:
            raise ValueError(f"dt must be > 0, got {self.dt_fs} fs")
        if not 2 <= self.min_krylov <= self.max_krylov:
            raise ValueError(
                f"need 2 <= min_krylov <= max_krylov, got "
                f"{self.min_krylov}, {self.max_krylov}"
            )
        if self.step_error_tol <= 0.0:
            raise ValueError(f"step error tolerance must be > 0, got {self.step_error_tol}")

    @property
    def dt_ns(self) -> float:
        return self.dt_fs * 1e-6


@dataclass
class WaveFunction:
    """Complex coefficient vector over a basis; norm monitored, not repaired."""

    coefficients: np.ndarray
    basis: Basis

    def __post_init__(self) -> None:
        self.coefficients = np.asarray(self.coefficients, dtype=np.complex128)
        if self.coefficients.shape != (self.basis.dim,):
            raise ValueError(
                f"coefficient vector of length {self.coefficients.shape} does not "
                f"match basis dimension {self.basis.dim}"
            )

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.coefficients))

    def copy(self) -> "WaveFunction":
        return WaveFunction(self.coefficients.copy(), self.basis)


@dataclass
class StepLog:
    """Per-step diagnostics of one propagation window."""

    t_ns: np.ndarray
    orders: np.ndarray
    errors: np.ndarray

    @property
    def n_steps(self) -> int:
        return self.t_ns.shape[0]

    def to_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("t_ns,krylov_order,error_estimate\n")
            for t, k, e in zip(self.t_ns, self.orders, self.errors):
                fh.write(f"{t:.12g},{k},{e:.12g}\n")


class HamiltonianProvider:
    """H(t) = static + drive(t) * coupling on a shared CSR pattern (MHz).

    Read-only after construction; safe to share between concurrent
    propagations.
    """

    def __init__(self, indptr, indices, data_static, data_drive,
                 drive: Optional[Callable] = None, dim: Optional[int] = None):
        self.indptr = indptr
        self.indices = indices
        self.data_static = data_static
        self.data_drive = data_drive
        self._drive = drive
        self.dim = dim if dim is not None else indptr.shape[0] - 1

    def drive_values(self, t_ns: np.ndarray) -> np.ndarray:
        if self._drive is None:
            return np.zeros_like(t_ns)
        return np.asarray(self._drive(t_ns), dtype=float)

    @classmethod
    def for_pulse(cls, ops: OperatorSet, Es: float, pulse: PulseSpec) -> "HamiltonianProvider":
        """dc field held at ``Es`` while the Gaussian pulse drives the
        polarizability couplings."""
        indptr, indices, d_rot, d_cos, d_cos2, d_sin = ops.csr_parts()
        mol = ops.molecule
        static = d_rot - stark_coupling(mol.mu, Es) * d_cos
        drive_data = -(
            polarizability_coupling(mol.alpha_zx, 1.0) * d_cos2
            + polarizability_coupling(mol.alpha_yx, 1.0) * d_sin
        )

        def drive(t):
            return pulse_intensity(t, pulse)[0]

        return cls(indptr, indices, static, drive_data, drive)

    @classmethod
    def for_dc_ramp(cls, ops: OperatorSet, dc: DcSpec) -> "HamiltonianProvider":
        """Laser off; the dc field follows the ramp profile."""
        indptr, indices, d_rot, d_cos, _, _ = ops.csr_parts()
        mu = ops.molecule.mu

        def drive(t):
            return -mu * DIPOLE_FIELD_TO_MHZ * np.asarray(dc_field(t, dc), dtype=float)

        return cls(indptr, indices, d_rot, d_cos, drive)

    @classmethod
    def static(cls, h: Union[np.ndarray, SymmetricMatrix]) -> "HamiltonianProvider":
        """Time-independent Hamiltonian from a dense or symmetric matrix."""
        dense = h.to_dense() if isinstance(h, SymmetricMatrix) else np.asarray(h, dtype=float)
        if dense.ndim != 2 or dense.shape[0] != dense.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {dense.shape}")
        if not np.allclose(dense, dense.T, atol=1e-12 * max(1.0, np.abs(dense).max())):
            raise ValueError("Hamiltonian must be symmetric")
        n = dense.shape[0]
        mask = dense != 0.0
        np.fill_diagonal(mask, True)  # keep every row non-empty
        indptr = np.zeros(n + 1, dtype=np.int64)
        indptr[1:] = np.cumsum(mask.sum(axis=1))
        indices = np.nonzero(mask)[1].astype(np.int64)
        data = dense[mask].astype(float)
        return cls(indptr, indices, data, np.zeros_like(data))


def propagate_window(
    provider: HamiltonianProvider,
    psi0: WaveFunction,
    t0_ns: float,
    t1_ns: float,
    controls: SilControls,
) -> tuple[WaveFunction, StepLog]:
    """March ``psi0`` from ``t0_ns`` to ``t1_ns`` with fixed-dt SIL steps.

    Backward windows (t1 < t0) are marched with negative steps.  A
    rejected step (order cap with error above tolerance) raises
    :class:`PropagationError` carrying the time stamp.
    """
    span = t1_ns - t0_ns
    if span == 0.0:
        empty = np.empty(0)
        return psi0.copy(), StepLog(empty, np.empty(0, dtype=np.int64), empty.copy())
    direction = 1.0 if span > 0 else -1.0
    dt = controls.dt_ns
    n_full = int(abs(span) / dt)
    remainder = abs(span) - n_full * dt
    dts = np.full(n_full, dt)
    if remainder > 1e-12 * dt:
        dts = np.append(dts, remainder)
    dts *= direction
    ends = t0_ns + np.cumsum(dts)
    mids = ends - dts / 2.0
    drive_mid = provider.drive_values(mids)

    psi = psi0.coefficients.copy()
    orders, errors, status = _kernels.sil_segment(
        provider.indptr, provider.indices, provider.data_static, provider.data_drive,
        drive_mid, dts, psi,
        controls.step_error_tol, controls.min_krylov, controls.max_krylov,
    )
    if status >= 0:
        raise PropagationError(
            f"SIL step rejected at t = {ends[status] - dts[status]:.6f} ns: "
            f"error estimate {errors[status]:.3e} above tolerance "
            f"{controls.step_error_tol:.1e} at order cap {controls.max_krylov}; "
            f"shrink dt (currently {controls.dt_fs} fs)"
        )
    return WaveFunction(psi, psi0.basis), StepLog(ends, orders, errors)


def sil_step(
    h: Union[np.ndarray, SymmetricMatrix],
    psi: WaveFunction,
    controls: SilControls,
) -> tuple[WaveFunction, int, float]:
    """Single SIL step under a frozen Hamiltonian.

    Returns ``(psi', krylov_order_used, error_estimate)``.
    """
    provider = HamiltonianProvider.static(h)
    if provider.dim != psi.basis.dim:
        raise ValueError(
            f"Hamiltonian dim {provider.dim} does not match basis dim {psi.basis.dim}"
        )
    out = psi.coefficients.copy()
    dts = np.array([controls.dt_ns])
    orders, errors, status = _kernels.sil_segment(
        provider.indptr, provider.indices, provider.data_static, provider.data_drive,
        np.zeros(1), dts, out,
        controls.step_error_tol, controls.min_krylov, controls.max_krylov,
    )
    if status >= 0:
        raise PropagationError(
            f"SIL step rejected: error estimate {errors[0]:.3e} above tolerance "
            f"{controls.step_error_tol:.1e} at order cap {controls.max_krylov}; shrink dt"
        )
    return WaveFunction(out, psi.basis), int(orders[0]), float(errors[0])
