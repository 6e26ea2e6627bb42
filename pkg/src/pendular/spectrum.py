"""Field-dressed spectra: eigenpairs on field grids, state tracking,
field-free labels, avoided crossings and the adiabaticity parameter.

Within one symmetry block the adiabatic curves of the real symmetric
Hamiltonian do not cross as a field parameter varies, so tracking
labeled states reduces to following eigenvectors by maximal overlap
between neighboring grid points (which stays the identity permutation
on adequately fine grids) plus a global sign fix that keeps projections
continuous.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
import scipy.linalg
from scipy.optimize import linear_sum_assignment

from .basis import Basis
from .errors import EigensolverError
from .fields import PulseSpec
from .molecule import MoleculeSpec
from .operators import OperatorSet, pulse_coupling_dense, total_hamiltonian


@dataclass(frozen=True)
class StateLabel:
    """Field-free asymmetric-top label J_{Ka,Kc} with projection M."""

    J: int
    Ka: int
    Kc: int
    M: int

    def __post_init__(self) -> None:
        if self.Ka + self.Kc not in (self.J, self.J + 1):
            raise ValueError(f"Ka+Kc must be J or J+1, got {self}")
        if not (0 <= self.Ka <= self.J and 0 <= self.Kc <= self.J and abs(self.M) <= self.J):
            raise ValueError(f"invalid label {self}")

    def __str__(self) -> str:
        return f"{self.J}_{self.Ka}_{self.Kc}_M{self.M}"

    @classmethod
    def parse(cls, text: str) -> "StateLabel":
        """Parse the canonical form ``J_Ka_Kc_MM``, e.g. ``3_0_3_M3``."""
        parts = text.strip().split("_")
        try:
            if len(parts) != 4 or not parts[3].startswith("M"):
                raise ValueError
            return cls(int(parts[0]), int(parts[1]), int(parts[2]), int(parts[3][1:]))
        except ValueError:
            raise ValueError(
                f"cannot parse state label {text!r}; expected e.g. '3_0_3_M3'"
            ) from None


def diagonalize(h: np.ndarray, n_lowest: int) -> tuple[np.ndarray, np.ndarray]:
    """Lowest eigenpairs of a real symmetric matrix, ascending.

    Returns ``(w, v)`` with ``v[:, k]`` the k-th eigenvector.  Residuals
    are verified against ``1e-8 * ||H||``; failure raises
    :class:`EigensolverError` with diagnostics.
    """
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {h.shape}")
    if not np.all(np.isfinite(h)):
        raise EigensolverError("Hamiltonian contains non-finite entries")
    n_lowest = min(n_lowest, h.shape[0])
    try:
        if n_lowest == h.shape[0]:
            w, v = scipy.linalg.eigh(h)
        else:
            w, v = scipy.linalg.eigh(h, subset_by_index=(0, n_lowest - 1), driver="evr")
    except scipy.linalg.LinAlgError as exc:
        raise EigensolverError(f"eigensolver failed on dim {h.shape[0]}: {exc}") from exc
    scale = np.abs(h).sum(axis=1).max()
    residual = np.linalg.norm(h @ v - v * w[None, :], axis=0).max()
    if residual > 1e-8 * max(scale, 1.0):
        raise EigensolverError(
            f"eigenpair residual {residual:.3e} exceeds 1e-8 * ||H|| = {1e-8 * scale:.3e}"
        )
    return w, v


def _rotor_dense_for_J(basis: Basis, ops_h_rot: np.ndarray, J: int) -> tuple[np.ndarray, list[int]]:
    idx = [i for i, f in enumerate(basis.functions) if f.J == J]
    sub = ops_h_rot[np.ix_(idx, idx)]
    return sub, idx


def _full_manifold_levels(molecule: MoleculeSpec, J: int) -> list[tuple[float, int, int]]:
    """All 2J+1 rotor levels of one J as (E, Ka, Kc), ascending."""
    Ks = np.arange(-J, J + 1)
    h = np.zeros((2 * J + 1, 2 * J + 1))
    for i, K in enumerate(Ks):
        h[i, i] = 0.5 * (molecule.B_x + molecule.B_y) * (J * (J + 1) - K * K) + molecule.B_z * K * K
        if K + 2 <= J:
            v = 0.25 * (molecule.B_x - molecule.B_y) * math.sqrt(
                (J * (J + 1) - K * (K + 1)) * (J * (J + 1) - (K + 1) * (K + 2))
            )
            h[i, i + 2] = h[i + 2, i] = v
    energies = np.linalg.eigvalsh(h)
    out = []
    for rank, e in enumerate(energies):
        tau = -J + rank  # energies ascend with Ka - Kc
        out.append((float(e), (J + tau + 1) // 2, (J - tau + 1) // 2))
    return out


def label_by_field_free(
    basis: Basis, molecule: MoleculeSpec, n_labels: int
) -> tuple[StateLabel, ...]:
    """Assign J_{Ka,Kc}M labels to the block's states by zero-field energy.

    Block levels are matched per J against the full 2J+1 rotor manifold
    (the block spectrum is an exact subset).  Near-degenerate matches
    within 1e-6 MHz are tie-broken toward the lower Ka.
    """
    from .operators import rotor_matrix

    h_rot = rotor_matrix(basis, molecule.B_x, molecule.B_y, molecule.B_z).to_dense()
    labeled: list[tuple[float, StateLabel]] = []
    M = basis.block.M
    J = basis.block.M
    while True:
        if J > basis.J_max:
            # labels describe the block's own states within its truncation
            if len(labeled) >= n_labels:
                break
            raise ValueError(
                f"J_max={basis.J_max} provides fewer than {n_labels} labeled states"
            )
        sub, idx = _rotor_dense_for_J(basis, h_rot, J)
        if len(idx) > 0:
            block_levels = np.linalg.eigvalsh(sub)
            manifold = _full_manifold_levels(molecule, J)
            used = [False] * len(manifold)
            for e in block_levels:
                best = None
                for c, (em, Ka, Kc) in enumerate(manifold):
                    if used[c]:
                        continue
                    de = abs(em - e)
                    if best is None or de < best[0] - 1e-6 or (de < best[0] + 1e-6 and Ka < best[1]):
                        best = (de, Ka, Kc, c)
                used[best[3]] = True
                labeled.append((float(e), StateLabel(J, best[1], best[2], M)))
        # stop once every remaining J enters above the n-th collected level;
        # H_R >= B_x J^2 bounds the lowest level of manifold J+1 from below
        labeled.sort(key=lambda t: t[0])
        if len(labeled) >= n_labels:
            next_j_floor = molecule.B_x * (J + 1) * (J + 2)
            if next_j_floor > labeled[n_labels - 1][0]:
                break
        J += 1
    return tuple(lab for _, lab in labeled[:n_labels])


@dataclass
class AdiabaticScan:
    """Eigenvalue/eigenvector curves over a grid of (Es, I) points.

    ``energies[p]`` are the ascending lowest eigenvalues at point p;
    ``vectors[p][:, t]`` is the eigenvector of track t (label
    ``labels[t]``), which occupies ascending position
    ``track_position[p, t]``.
    """

    points: np.ndarray                 # (n, 2): Es [V/cm], I [W/cm^2]
    energies: np.ndarray               # (n, n_track), ascending
    vectors: np.ndarray                # (n, dim, n_track), track-aligned
    track_position: np.ndarray         # (n, n_track) int
    labels: tuple[StateLabel, ...]
    flags: list[str] = field(default_factory=list)

    @property
    def n_points(self) -> int:
        return self.points.shape[0]

    @property
    def n_track(self) -> int:
        return self.energies.shape[1]

    def track_energies(self) -> np.ndarray:
        """Energies re-ordered per track, shape (n, n_track)."""
        return np.take_along_axis(self.energies, self.track_position, axis=1)

    def to_csv(self, path) -> None:
        cols = ["I_Wcm2", "Es_Vcm"] + [f"E_track{t}_MHz" for t in range(self.n_track)]
        te = self.track_energies()
        with open(path, "w") as fh:
            fh.write(",".join(cols) + "\n")
            for p in range(self.n_points):
                row = [f"{self.points[p, 1]:.12g}", f"{self.points[p, 0]:.12g}"]
                row += [f"{e:.12g}" for e in te[p]]
                fh.write(",".join(row) + "\n")


@dataclass(frozen=True)
class CrossingReport:
    """A local minimum of the gap between two neighboring tracks."""

    track_i: int
    track_j: int
    label_i: StateLabel
    label_j: StateLabel
    Es: float
    I_star: float
    gap_MHz: float

    def __post_init__(self) -> None:
        if self.gap_MHz <= 0.0:
            raise ValueError(f"avoided-crossing gap must be > 0, got {self.gap_MHz}")


def scan_field(
    ops: OperatorSet,
    points: Sequence[tuple[float, float]],
    n_track: int = 12,
    labels: Optional[tuple[StateLabel, ...]] = None,
) -> AdiabaticScan:
    """Diagonalize along an ordered list of (Es, I) grid points and track.

    Tracking uses maximal-overlap assignment between consecutive points
    with a global sign fix making consecutive overlaps positive.
    Overlaps below 0.5 or assignment ambiguities within 1e-6 are flagged
    (grid refinement needed), never silently accepted.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError("points must be a sequence of (Es, I) pairs")
    if labels is None:
        labels = label_by_field_free(ops.basis, ops.molecule, n_track)
    dim = ops.dim
    n = pts.shape[0]
    energies = np.empty((n, n_track))
    vectors = np.empty((n, dim, n_track))
    track_position = np.empty((n, n_track), dtype=np.int64)
    flags: list[str] = []

    prev: Optional[np.ndarray] = None
    for p, (Es, intensity) in enumerate(pts):
        h = total_hamiltonian(ops, Es=Es, intensity=intensity)
        w, v = diagonalize(h, n_track)
        energies[p] = w
        if prev is None:
            aligned = v
            pos = np.arange(n_track)
        else:
            overlap = prev.T @ v
            rows, cols = linear_sum_assignment(-np.abs(overlap))
            pos = np.empty(n_track, dtype=np.int64)
            pos[rows] = cols
            aligned = v[:, pos].copy()
            for t in range(n_track):
                o = overlap[t, pos[t]]
                if abs(o) < 0.5:
                    flags.append(
                        f"point {p}: track {t} overlap {abs(o):.3f} < 0.5, refine grid"
                    )
                others = np.abs(np.delete(overlap[t], pos[t]))
                if others.size and others.max() > abs(o) - 1e-6:
                    flags.append(
                        f"point {p}: track {t} assignment ambiguous, refine grid"
                    )
                if o < 0.0:
                    aligned[:, t] *= -1.0
        vectors[p] = aligned
        track_position[p] = pos
        prev = aligned
    return AdiabaticScan(
        points=pts,
        energies=energies,
        vectors=vectors,
        track_position=track_position,
        labels=labels,
        flags=flags,
    )


def scan_intensity(
    ops: OperatorSet,
    Es: float,
    intensity_grid: Sequence[float],
    n_track: int = 12,
    labels: Optional[tuple[StateLabel, ...]] = None,
) -> AdiabaticScan:
    """Scan over laser intensities at fixed dc field strength."""
    grid = np.asarray(intensity_grid, dtype=float)
    if grid.ndim != 1 or grid.size < 1 or np.any(np.diff(grid) <= 0.0):
        raise ValueError("intensity grid must be strictly increasing")
    points = np.column_stack([np.full_like(grid, Es), grid])
    return scan_field(ops, points, n_track=n_track, labels=labels)


def default_intensity_grid(
    I_min: float = 1e9, I_max: float = 7e11, n_points: int = 400
) -> np.ndarray:
    """Log-spaced intensity grid; crossings concentrate at low intensity."""
    return np.geomspace(I_min, I_max, n_points)


def detect_crossings(scan: AdiabaticScan) -> list[CrossingReport]:
    """Local minima of neighboring-level gaps, parabolically refined.

    Minima are located on the scanned coordinate (intensity when it
    varies, otherwise Es); the refinement uses a 3-point parabola in
    log10(I) for intensity scans.
    """
    if scan.n_points < 3:
        raise ValueError("crossing detection needs at least 3 grid points")
    i_varies = not np.allclose(scan.points[:, 1], scan.points[0, 1])
    x = np.log10(scan.points[:, 1]) if i_varies else scan.points[:, 0]
    inv_pos = np.argsort(scan.track_position, axis=1)  # ascending slot -> track
    reports: list[CrossingReport] = []
    for k in range(scan.n_track - 1):
        gap = scan.energies[:, k + 1] - scan.energies[:, k]
        for p in range(1, scan.n_points - 1):
            if not (gap[p] < gap[p - 1] and gap[p] <= gap[p + 1]):
                continue
            x0, x1, x2 = x[p - 1], x[p], x[p + 1]
            g0, g1, g2 = gap[p - 1], gap[p], gap[p + 1]
            denom = (x0 - x1) * (x0 - x2) * (x1 - x2)
            a = (x2 * (g1 - g0) + x1 * (g0 - g2) + x0 * (g2 - g1)) / denom
            b = (x2 * x2 * (g0 - g1) + x1 * x1 * (g2 - g0) + x0 * x0 * (g1 - g2)) / denom
            if a > 0.0:
                xs = -b / (2.0 * a)
                xs = min(max(xs, x0), x2)
                c = g1 - a * x1 * x1 - b * x1
                gs = max(a * xs * xs + b * xs + c, 1e-300)
            else:
                xs, gs = x1, g1
            ti, tj = int(inv_pos[p, k]), int(inv_pos[p, k + 1])
            reports.append(
                CrossingReport(
                    track_i=min(ti, tj),
                    track_j=max(ti, tj),
                    label_i=scan.labels[min(ti, tj)],
                    label_j=scan.labels[max(ti, tj)],
                    Es=float(scan.points[p, 0]),
                    I_star=float(10.0 ** xs) if i_varies else float(scan.points[p, 1]),
                    gap_MHz=float(gs),
                )
            )
    return reports


def crossings_to_csv(reports: Sequence[CrossingReport], path, etas=None) -> None:
    """Write crossing reports; ``etas`` optionally adds a max-eta column."""
    header = "track_i,track_j,I_star_Wcm2,gap_MHz,label_i,label_j,Es_Vcm"
    if etas is not None:
        header += ",eta_max"
    with open(path, "w") as fh:
        fh.write(header + "\n")
        for n, r in enumerate(reports):
            row = (
                f"{r.track_i},{r.track_j},{r.I_star:.12g},{r.gap_MHz:.12g},"
                f"{r.label_i},{r.label_j},{r.Es:.12g}"
            )
            if etas is not None:
                row += f",{etas[n]:.12g}"
            fh.write(row + "\n")


def adiabaticity_eta(
    scan: AdiabaticScan,
    point_index: int,
    pair: tuple[int, int],
    dI_dt: float,
    ops: OperatorSet,
    coupling_dense: Optional[np.ndarray] = None,
) -> float:
    """Adiabaticity parameter hbar |<i| dH_L/dt |j>| / |E_i - E_j|^2.

    ``dI_dt`` in W/cm^2 per ns; tracks with coincident energies give
    ``inf`` (flagged on the scan).  Scales linearly with ``dI_dt``.
    """
    i, j = pair
    if i == j:
        raise ValueError("adiabaticity parameter needs two distinct tracks")
    if coupling_dense is None:
        coupling_dense = pulse_coupling_dense(ops)
    pi = scan.track_position[point_index, i]
    pj = scan.track_position[point_index, j]
    e_i = scan.energies[point_index, pi]
    e_j = scan.energies[point_index, pj]
    gap = abs(e_i - e_j)
    if gap == 0.0:
        scan.flags.append(f"point {point_index}: tracks {i},{j} coincident, eta infinite")
        return math.inf
    v_i = scan.vectors[point_index][:, i]
    v_j = scan.vectors[point_index][:, j]
    element = abs(v_i @ (coupling_dense @ v_j)) * abs(dI_dt)  # MHz/ns
    # hbar (h * element * 1e15 J/s) / (h * gap * 1e6 J)^2 = 1e3 element / (2 pi gap^2)
    return 1e3 * element / (2.0 * math.pi * gap * gap)


def max_eta_over_pulse(
    scan: AdiabaticScan,
    pair: tuple[int, int],
    pulse: PulseSpec,
    ops: OperatorSet,
) -> tuple[float, float]:
    """Maximum of the adiabaticity parameter along the pulse's rising edge.

    Each scanned intensity I < I0 is visited by the pulse at a time
    where |dI/dt| = I sqrt(2 ln(I0/I)) / sigma.  Returns
    ``(eta_max, I_at_max)``.
    """
    coupling = pulse_coupling_dense(ops)
    sigma = pulse.sigma_ns
    best = (0.0, float(scan.points[0, 1]))
    for p in range(scan.n_points):
        intensity = scan.points[p, 1]
        if not 0.0 < intensity < pulse.I0:
            continue
        dI_dt = intensity * math.sqrt(2.0 * math.log(pulse.I0 / intensity)) / sigma
        eta = adiabaticity_eta(scan, p, pair, dI_dt, ops, coupling_dense=coupling)
        if eta > best[0]:
            best = (eta, float(intensity))
    return best
