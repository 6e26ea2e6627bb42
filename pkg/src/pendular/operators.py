"""Hamiltonian and observable matrices on a symmetry-adapted basis.

All four operators (rigid rotor, cos(theta), cos^2(theta),
sin^2(theta) sin^2(chi)) are real symmetric and sparse under the
selection rules |dJ| <= 2, dK in {0, +-2}.  Elements between
symmetrized M = 0 pairs are obtained by expanding the combinations into
primitive signed-K kets, so a single primitive-element code path covers
every block; the angular-quadrature oracle provides an independent
check of that path.

Primitive elements (Wigner D-function matrix elements):

    <J' K' M| D^k_0q |J K M> = (-1)^(M-K') sqrt((2J+1)(2J'+1))
                               * (J k J'; M 0 -M) (J k J'; K q -K')

with cos(theta) = D^1_00, cos^2(theta) = (1 + 2 D^2_00)/3 and
sin^2(theta) sin^2(chi) = (1 - cos^2 theta)/2
                          - sqrt(2/3)/2 (D^2_02 + D^2_0-2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .basis import Basis, BasisFunction
from .molecule import MoleculeSpec
from .units import polarizability_coupling, stark_coupling
from .wigner import wigner3j

_SQRT23_HALF = 0.5 * math.sqrt(2.0 / 3.0)


@dataclass(frozen=True)
class SymmetricMatrix:
    """Upper-triangle coordinate storage of a real symmetric matrix."""

    dim: int
    rows: np.ndarray
    cols: np.ndarray
    vals: np.ndarray

    def to_dense(self) -> np.ndarray:
        out = np.zeros((self.dim, self.dim))
        out[self.rows, self.cols] = self.vals
        lower = self.rows != self.cols
        out[self.cols[lower], self.rows[lower]] = self.vals[lower]
        return out

    def dump_text(self) -> str:
        """Upper-triangle (row, col, value) triplets, one per line."""
        lines = [
            f"{r} {c} {v:.16e}"
            for r, c, v in zip(self.rows, self.cols, self.vals)
        ]
        return "\n".join(lines) + "\n"


def _collect(basis: Basis, element: Callable[[BasisFunction, BasisFunction], float],
             keep_diagonal: bool = False) -> SymmetricMatrix:
    """Assemble the upper triangle of an operator over the basis."""
    rows: list[int] = []
    cols: list[int] = []
    vals: list[float] = []
    funcs = basis.functions
    for i, fi in enumerate(funcs):
        for j in range(i, len(funcs)):
            fj = funcs[j]
            if abs(fi.J - fj.J) > 2:
                continue
            dk = abs(fi.K - fj.K)
            if dk > 2 and abs(fi.K + fj.K) > 2:
                continue
            v = element(fi, fj)
            if v != 0.0 or (keep_diagonal and i == j):
                rows.append(i)
                cols.append(j)
                vals.append(v)
    return SymmetricMatrix(
        dim=len(funcs),
        rows=np.asarray(rows, dtype=np.int64),
        cols=np.asarray(cols, dtype=np.int64),
        vals=np.asarray(vals, dtype=np.float64),
    )


def _rotor_primitive(J1: int, K1: int, J2: int, K2: int,
                     B_x: float, B_y: float, B_z: float) -> float:
    if J1 != J2:
        return 0.0
    J = J1
    if K1 == K2:
        return 0.5 * (B_x + B_y) * (J * (J + 1) - K1 * K1) + B_z * K1 * K1
    if K1 == K2 + 2 or K1 == K2 - 2:
        K = min(K1, K2)  # element between K and K+2
        return 0.25 * (B_x - B_y) * math.sqrt(
            (J * (J + 1) - K * (K + 1)) * (J * (J + 1) - (K + 1) * (K + 2))
        )
    return 0.0


def _d_primitive(k: int, q: int, J1: int, K1: int, J2: int, K2: int, M: int) -> float:
    """<J1 K1 M| D^k_0q |J2 K2 M>, real by construction."""
    if K1 != K2 + q or abs(J1 - J2) > k:
        return 0.0
    return (
        (-1) ** ((M - K1) % 2)
        * math.sqrt((2 * J1 + 1) * (2 * J2 + 1))
        * wigner3j(J2, k, J1, M, 0, -M)
        * wigner3j(J2, k, J1, K2, q, -K1)
    )


def _cos_primitive(J1, K1, J2, K2, M) -> float:
    return _d_primitive(1, 0, J1, K1, J2, K2, M)


def _cos2_primitive(J1, K1, J2, K2, M) -> float:
    v = (2.0 / 3.0) * _d_primitive(2, 0, J1, K1, J2, K2, M)
    if J1 == J2 and K1 == K2:
        v += 1.0 / 3.0
    return v


def _sin2sin2_primitive(J1, K1, J2, K2, M) -> float:
    v = 0.0
    if K1 == K2:
        v += 0.5 * ((1.0 if J1 == J2 else 0.0) - _cos2_primitive(J1, K1, J2, K2, M))
    for q in (2, -2):
        if K1 == K2 + q:
            v -= _SQRT23_HALF * _d_primitive(2, q, J1, K1, J2, K2, M)
    return v


def _expand(primitive: Callable, M: int) -> Callable[[BasisFunction, BasisFunction], float]:
    def element(fi: BasisFunction, fj: BasisFunction) -> float:
        total = 0.0
        for J1, K1, c1 in fi.primitives():
            for J2, K2, c2 in fj.primitives():
                total += c1 * c2 * primitive(J1, K1, J2, K2, M)
        return total

    return element


def rotor_matrix(basis: Basis, B_x: float, B_y: float, B_z: float) -> SymmetricMatrix:
    """Rigid-rotor Hamiltonian B_x Jx^2 + B_y Jy^2 + B_z Jz^2 in MHz.

    The full diagonal is stored structurally (even where it vanishes) so
    that combined sparsity patterns always contain every row.
    """
    def primitive(J1, K1, J2, K2, M):
        return _rotor_primitive(J1, K1, J2, K2, B_x, B_y, B_z)

    return _collect(basis, _expand(primitive, basis.block.M), keep_diagonal=True)


def cos_theta_matrix(basis: Basis) -> SymmetricMatrix:
    """Orientation operator cos(theta); couples dJ in {0,+-1}, dK = 0."""
    return _collect(basis, _expand(_cos_primitive, basis.block.M))


def cos2_theta_matrix(basis: Basis) -> SymmetricMatrix:
    """Alignment operator cos^2(theta); couples dJ in {0,+-1,+-2}, dK = 0."""
    return _collect(basis, _expand(_cos2_primitive, basis.block.M))


def sin2theta_sin2chi_matrix(basis: Basis) -> SymmetricMatrix:
    """Operator sin^2(theta) sin^2(chi); couples dK in {0,+-2}."""
    return _collect(basis, _expand(_sin2sin2_primitive, basis.block.M))


@dataclass(frozen=True)
class OperatorSet:
    """The four operator matrices of one basis, plus dense/CSR views.

    Immutable after construction; the dense and CSR caches are built
    lazily and shared, so matrix products may be issued concurrently.
    """

    basis: Basis
    molecule: MoleculeSpec
    h_rot: SymmetricMatrix
    m_cos: SymmetricMatrix
    m_cos2: SymmetricMatrix
    m_sin2sin2: SymmetricMatrix
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def dim(self) -> int:
        return self.basis.dim

    def dense(self, name: str) -> np.ndarray:
        """Dense copy of one operator ('h_rot', 'cos', 'cos2', 'sin2sin2')."""
        key = f"dense_{name}"
        if key not in self._cache:
            mat = {
                "h_rot": self.h_rot,
                "cos": self.m_cos,
                "cos2": self.m_cos2,
                "sin2sin2": self.m_sin2sin2,
            }[name]
            self._cache[key] = mat.to_dense()
        return self._cache[key]

    def csr_parts(self):
        """Shared full-pattern CSR arrays for the propagator kernels.

        Returns ``(indptr, indices, d_rot, d_cos, d_cos2, d_sin)`` where
        the data vectors are aligned on the union sparsity pattern
        (both triangles, full diagonal included).
        """
        if "csr" not in self._cache:
            self._cache["csr"] = _union_csr(
                self.dim, [self.h_rot, self.m_cos, self.m_cos2, self.m_sin2sin2]
            )
        return self._cache["csr"]


def _union_csr(dim: int, mats: list[SymmetricMatrix]):
    pattern: dict[tuple[int, int], int] = {}
    for i in range(dim):
        pattern[(i, i)] = len(pattern)
    for m in mats:
        for r, c in zip(m.rows, m.cols):
            for key in ((int(r), int(c)), (int(c), int(r))):
                if key not in pattern:
                    pattern[key] = len(pattern)
    entries = sorted(pattern.keys())
    nnz = len(entries)
    indptr = np.zeros(dim + 1, dtype=np.int64)
    indices = np.empty(nnz, dtype=np.int64)
    slot: dict[tuple[int, int], int] = {}
    for p, (r, c) in enumerate(entries):
        indptr[r + 1] += 1
        indices[p] = c
        slot[(r, c)] = p
    indptr = np.cumsum(indptr)
    datas = []
    for m in mats:
        d = np.zeros(nnz)
        for r, c, v in zip(m.rows, m.cols, m.vals):
            d[slot[(int(r), int(c))]] = v
            if r != c:
                d[slot[(int(c), int(r))]] = v
        datas.append(d)
    return (indptr, indices, *datas)


def build_operators(basis: Basis, molecule: MoleculeSpec) -> OperatorSet:
    """Assemble all four operator matrices for a basis."""
    return OperatorSet(
        basis=basis,
        molecule=molecule,
        h_rot=rotor_matrix(basis, molecule.B_x, molecule.B_y, molecule.B_z),
        m_cos=cos_theta_matrix(basis),
        m_cos2=cos2_theta_matrix(basis),
        m_sin2sin2=sin2theta_sin2chi_matrix(basis),
    )


def total_hamiltonian(
    ops: OperatorSet,
    molecule: Optional[MoleculeSpec] = None,
    Es: float = 0.0,
    intensity: float = 0.0,
) -> np.ndarray:
    """Dense total Hamiltonian at frozen field values, in MHz.

    H = H_rot - mu Es cos(theta) - (I/2 eps0 c) (alpha_zx cos^2 theta
    + alpha_yx sin^2 theta sin^2 chi).
    """
    mol = molecule if molecule is not None else ops.molecule
    if mol != ops.molecule:
        raise ValueError(
            f"operator set was built for {ops.molecule.name!r}, got {mol.name!r}"
        )
    h = ops.dense("h_rot").copy()
    w_cos = stark_coupling(mol.mu, Es)
    if w_cos != 0.0:
        h -= w_cos * ops.dense("cos")
    if intensity != 0.0:
        h -= polarizability_coupling(mol.alpha_zx, intensity) * ops.dense("cos2")
        h -= polarizability_coupling(mol.alpha_yx, intensity) * ops.dense("sin2sin2")
    return h


def pulse_coupling_dense(ops: OperatorSet) -> np.ndarray:
    """Laser coupling per unit intensity, dense, in MHz/(W/cm^2).

    This is -dH/dI; its product with dI/dt gives the time derivative of
    the laser term used by the adiabaticity diagnostics.
    """
    mol = ops.molecule
    return (
        polarizability_coupling(mol.alpha_zx, 1.0) * ops.dense("cos2")
        + polarizability_coupling(mol.alpha_yx, 1.0) * ops.dense("sin2sin2")
    )
