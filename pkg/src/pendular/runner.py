"""Orchestration of a full mixed-field run.

A run prepares the initial state in the dc field, marches the
wavefunction through the Gaussian pulse's rising edge, and at sample
times spaced geometrically in intensity freezes the Hamiltonian,
diagonalizes it, and projects the wavefunction onto the instantaneous
(adiabatic) states.  Observables are evaluated at the peak, t = 0.
"""

from __future__ import annotations

import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np
from scipy.optimize import linear_sum_assignment

from .basis import SymmetryBlock, build_basis
from .errors import ConfigError
from .fields import DcSpec, PulseSpec, pulse_intensity
from .molecule import MoleculeSpec
from .operators import OperatorSet, build_operators, total_hamiltonian
from .propagator import (
    HamiltonianProvider,
    SilControls,
    WaveFunction,
    default_dt_fs,
    propagate_window,
)
from .spectrum import StateLabel, diagonalize, label_by_field_free
from .units import polarizability_coupling, stark_coupling

#: tracked-population threshold below which leakage is flagged
LEAK_WARN = 0.999


@dataclass(frozen=True)
class RunConfig:
    """Complete description of one mixed-field experiment."""

    molecule: MoleculeSpec
    block: SymmetryBlock
    initial_label: StateLabel
    dc: DcSpec
    pulse: PulseSpec
    J_max: int = 30
    sil: Optional[SilControls] = None
    n_track: int = 12
    sample_count: int = 600

    def __post_init__(self) -> None:
        if isinstance(self.initial_label, str):
            object.__setattr__(self, "initial_label", StateLabel.parse(self.initial_label))
        if self.initial_label.M != self.block.M:
            raise ConfigError(
                f"initial label {self.initial_label} has M != block M={self.block.M}"
            )
        k_par = "even" if self.initial_label.Ka % 2 == 0 else "odd"
        if k_par != self.block.k_parity:
            raise ConfigError(
                f"initial label {self.initial_label} has Ka parity {k_par!r}, "
                f"block is K-{self.block.k_parity}"
            )
        if self.sample_count < 2:
            raise ConfigError(f"sample_count must be >= 2, got {self.sample_count}")
        if self.pulse.t_end_ns > 0.0:
            raise ConfigError(
                "runs sample the rising edge of the pulse; t_end must be <= 0 "
                f"(peak), got {self.pulse.t_end_ns} ns"
            )
        if self.J_max < self.block.M:
            raise ConfigError(f"J_max={self.J_max} below block M={self.block.M}")
        if self.n_track < 1:
            raise ConfigError("n_track must be >= 1")

    def controls(self) -> SilControls:
        return self.sil if self.sil is not None else SilControls(default_dt_fs(self.pulse.tau_ns))

    def describe(self) -> str:
        return (
            f"{self.initial_label}|Es={self.dc.Es_max:g}Vcm|I0={self.pulse.I0:g}Wcm2"
            f"|tau={self.pulse.tau_ns:g}ns"
        )


@dataclass
class Trajectory:
    """Sampled observables of one run plus the final wavefunction."""

    labels: tuple[StateLabel, ...]
    t_ns: np.ndarray
    intensity: np.ndarray
    Es: np.ndarray
    cos_theta: np.ndarray
    norm: np.ndarray
    energy_MHz: np.ndarray
    populations: dict[str, np.ndarray]
    leakage: np.ndarray
    final_psi: WaveFunction
    flags: list[str] = field(default_factory=list)
    n_steps: int = 0
    max_order: int = 0
    max_step_error: float = 0.0
    runtime_s: float = 0.0

    @property
    def cos_theta_final(self) -> float:
        return float(self.cos_theta[-1])

    def population(self, label: Union[StateLabel, str]) -> np.ndarray:
        return self.populations[str(label)]

    def final_population(self, label: Union[StateLabel, str]) -> float:
        return float(self.population(label)[-1])

    def to_csv(self, path) -> None:
        cols = ["t_ns", "I_Wcm2", "Es_Vcm", "cos_theta", "norm", "energy_MHz"]
        cols += [f"pop_{lab}" for lab in self.labels]
        with open(path, "w") as fh:
            fh.write(",".join(cols) + "\n")
            for k in range(self.t_ns.shape[0]):
                row = [
                    f"{self.t_ns[k]:.12g}", f"{self.intensity[k]:.12g}",
                    f"{self.Es[k]:.12g}", f"{self.cos_theta[k]:.12g}",
                    f"{self.norm[k]:.12g}", f"{self.energy_MHz[k]:.12g}",
                ]
                row += [f"{self.populations[str(lab)][k]:.12g}" for lab in self.labels]
                fh.write(",".join(row) + "\n")


def _setup(config: RunConfig):
    basis = build_basis(config.block, config.J_max)
    ops = build_operators(basis, config.molecule)
    labels = label_by_field_free(basis, config.molecule, config.n_track)
    if config.initial_label not in labels:
        raise ConfigError(
            f"initial label {config.initial_label} is not among the lowest "
            f"{config.n_track} states of block {config.block} "
            f"(found: {', '.join(map(str, labels))}); raise n_track"
        )
    return basis, ops, labels


def prepare_initial(
    config: RunConfig,
    ops: Optional[OperatorSet] = None,
    labels: Optional[tuple[StateLabel, ...]] = None,
) -> WaveFunction:
    """Initial state in the dc field, before the pulse.

    In ``instantaneous`` mode this is the dc-dressed eigenstate whose
    adiabatic continuation from zero field carries ``initial_label``
    (same energy rank, since curves of one block do not cross).  In
    ``ramp`` mode the field-free eigenstate is propagated through the
    linear ramp and a final overlap with the target below 0.99 raises a
    warning (ramp not adiabatic).
    """
    if ops is None or labels is None:
        _, ops, labels = _setup(config)
    idx = labels.index(config.initial_label)
    h_dressed = total_hamiltonian(ops, Es=config.dc.Es_max, intensity=0.0)
    _, v_dressed = diagonalize(h_dressed, idx + 1)
    target = v_dressed[:, idx]
    if config.dc.mode == "instantaneous":
        return WaveFunction(target.astype(np.complex128), ops.basis)

    h_free = total_hamiltonian(ops, Es=0.0, intensity=0.0)
    _, v_free = diagonalize(h_free, idx + 1)
    psi = WaveFunction(v_free[:, idx].astype(np.complex128), ops.basis)
    provider = HamiltonianProvider.for_dc_ramp(ops, config.dc)
    t0 = config.dc.t_ramp_start_ns
    psi, _ = propagate_window(provider, psi, t0, t0 + config.dc.ramp_duration_ns,
                              config.controls())
    overlap = abs(np.vdot(target, psi.coefficients))
    if overlap < 0.99:
        warnings.warn(
            f"dc ramp is not adiabatic: overlap with {config.initial_label} "
            f"is {overlap:.4f} < 0.99 (rate {config.dc.ramp_rate} V/cm/ns)",
            stacklevel=2,
        )
    return psi


def _sample_times(pulse: PulseSpec, count: int) -> np.ndarray:
    """Sample times spaced geometrically in intensity over the window.

    Falls back to uniform time spacing when the pulse is off (I0 = 0).
    """
    i_start = pulse_intensity(pulse.t_start_ns, pulse)[0]
    i_end = pulse_intensity(pulse.t_end_ns, pulse)[0]
    if i_start <= 0.0 or i_end <= 0.0:
        return np.linspace(pulse.t_start_ns, pulse.t_end_ns, count)
    grid = np.geomspace(i_start, i_end, count)
    with np.errstate(invalid="ignore"):
        ts = -pulse.sigma_ns * np.sqrt(2.0 * np.log(np.maximum(pulse.I0 / grid, 1.0)))
    ts[0] = pulse.t_start_ns
    ts[-1] = pulse.t_end_ns
    return np.unique(ts)


def run(config: RunConfig) -> Trajectory:
    """Propagate through the pulse and sample adiabatic-basis observables."""
    t_begin = time.perf_counter()
    basis, ops, labels = _setup(config)
    psi = prepare_initial(config, ops, labels)
    controls = config.controls()
    es = config.dc.Es_max
    mol = config.molecule

    static_dense = ops.dense("h_rot") - stark_coupling(mol.mu, es) * ops.dense("cos")
    drive_dense = -(
        polarizability_coupling(mol.alpha_zx, 1.0) * ops.dense("cos2")
        + polarizability_coupling(mol.alpha_yx, 1.0) * ops.dense("sin2sin2")
    )
    m_cos = ops.dense("cos")
    provider = HamiltonianProvider.for_pulse(ops, es, config.pulse)

    ts = _sample_times(config.pulse, config.sample_count)
    n = ts.shape[0]
    n_track = config.n_track
    out = Trajectory(
        labels=labels,
        t_ns=ts,
        intensity=np.empty(n),
        Es=np.full(n, es),
        cos_theta=np.empty(n),
        norm=np.empty(n),
        energy_MHz=np.empty(n),
        populations={str(lab): np.empty(n) for lab in labels},
        leakage=np.empty(n),
        final_psi=psi,
    )

    v_prev: Optional[np.ndarray] = None
    leak_flagged = False
    for k in range(n):
        if k > 0:
            psi, log = propagate_window(provider, psi, ts[k - 1], ts[k], controls)
            out.n_steps += log.n_steps
            if log.n_steps:
                out.max_order = max(out.max_order, int(log.orders.max()))
                out.max_step_error = max(out.max_step_error, float(log.errors.max()))
        intensity = pulse_intensity(ts[k], config.pulse)[0]
        h = static_dense + intensity * drive_dense
        w, v = diagonalize(h, n_track)
        if v_prev is not None:
            overlap = v_prev.T @ v
            rows, cols = linear_sum_assignment(-np.abs(overlap))
            perm = np.empty(n_track, dtype=np.int64)
            perm[rows] = cols
            if np.any(perm != np.arange(n_track)):
                out.flags.append(
                    f"sample {k} (t={ts[k]:.4f} ns): track order changed, "
                    f"tracking ambiguity"
                )
            v = v[:, perm]
            signs = np.sign(np.einsum("ij,ij->j", v_prev, v))
            signs[signs == 0.0] = 1.0
            v = v * signs[None, :]
        v_prev = v

        c = v.T @ psi.coefficients
        pops = np.abs(c) ** 2
        for t, lab in enumerate(labels):
            out.populations[str(lab)][k] = pops[t]
        tracked = float(pops.sum())
        out.leakage[k] = max(0.0, 1.0 - tracked)
        if tracked < LEAK_WARN and not leak_flagged:
            out.flags.append(
                f"sample {k} (t={ts[k]:.4f} ns): tracked population {tracked:.6f} "
                f"< {LEAK_WARN}; raise n_track"
            )
            leak_flagged = True
        out.intensity[k] = intensity
        out.cos_theta[k] = float(np.real(np.vdot(psi.coefficients, m_cos @ psi.coefficients)))
        out.energy_MHz[k] = float(np.real(np.vdot(psi.coefficients, h @ psi.coefficients)))
        out.norm[k] = psi.norm
    out.final_psi = psi
    out.runtime_s = time.perf_counter() - t_begin
    return out


def adiabatic_reference(config: RunConfig) -> float:
    """<cos(theta)> of the tracked adiabatic state at peak intensity.

    One diagonalization at (Es, I0); independent of the pulse FWHM.
    """
    _, ops, labels = _setup(config)
    idx = labels.index(config.initial_label)
    h = total_hamiltonian(ops, Es=config.dc.Es_max, intensity=config.pulse.I0)
    _, v = diagonalize(h, idx + 1)
    vec = v[:, idx]
    return float(vec @ (ops.dense("cos") @ vec))


@dataclass
class SweepRow:
    """Per-configuration summary line of a sweep."""

    config_id: str
    cos_theta_t0: Optional[float]
    top_populations: tuple[tuple[str, float], ...]
    error: Optional[str] = None


def sweep(configs: Sequence[RunConfig], threads: int = 1, top_k: int = 4) -> list[SweepRow]:
    """Run each configuration and summarize the observables at t = 0.

    Failures are isolated per row; rows keep the input ordering.
    """
    def one(config: RunConfig) -> SweepRow:
        try:
            traj = run(config)
        except Exception as exc:  # noqa: BLE001 - row-isolated failures
            return SweepRow(config.describe(), None, (), error=str(exc))
        finals = sorted(
            ((lab, traj.populations[lab][-1]) for lab in map(str, traj.labels)),
            key=lambda t: -t[1],
        )
        return SweepRow(config.describe(), traj.cos_theta_final, tuple(finals[:top_k]))

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(one, configs))
    return [one(c) for c in configs]


def sweep_to_csv(rows: Sequence[SweepRow], path, top_k: int = 4) -> None:
    header = ["config_id", "cos_theta_t0"]
    for k in range(top_k):
        header += [f"pop{k + 1}_label", f"pop{k + 1}_value"]
    header.append("error")
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            cells = [row.config_id]
            cells.append("" if row.cos_theta_t0 is None else f"{row.cos_theta_t0:.12g}")
            for k in range(top_k):
                if k < len(row.top_populations):
                    lab, val = row.top_populations[k]
                    cells += [lab, f"{val:.12g}"]
                else:
                    cells += ["", ""]
            cells.append(row.error or "")
            fh.write(",".join(cells) + "\n")
