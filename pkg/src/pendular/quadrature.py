"""Angular-quadrature oracle for operator matrix elements.

Independent reference path for the 3j-based matrix builders: the basis
functions are evaluated explicitly as Wigner D-functions on a
(theta, chi) product grid and the operator is integrated numerically.
Gauss-Legendre nodes in cos(theta) and a uniform periodic grid in chi
make the quadrature exact for the trigonometric-polynomial integrands
that occur here, so the oracle is accurate to ~1e-13 for J <= 10.

The phi integral is analytic (the operators are phi-independent and the
bra/ket share M).
"""

from __future__ import annotations

import math

import numpy as np

from .basis import BasisFunction
from .wigner import wigner_d

OPERATOR_KINDS = ("cos_theta", "cos2_theta", "sin2theta_sin2chi")


def _operator_values(kind: str, theta: np.ndarray, chi: np.ndarray) -> np.ndarray:
    """Operator on the (theta x chi) grid, shape (n_theta, n_chi)."""
    if kind == "cos_theta":
        return np.cos(theta)[:, None] * np.ones_like(chi)[None, :]
    if kind == "cos2_theta":
        return np.cos(theta)[:, None] ** 2 * np.ones_like(chi)[None, :]
    if kind == "sin2theta_sin2chi":
        return np.sin(theta)[:, None] ** 2 * np.sin(chi)[None, :] ** 2
    raise ValueError(f"unsupported operator kind {kind!r}; expected one of {OPERATOR_KINDS}")


def quadrature_oracle(
    kind: str,
    bra: BasisFunction,
    ket: BasisFunction,
    n_theta: int = 80,
    n_chi: int = 64,
) -> float:
    """Matrix element <bra| O |ket> by direct angular integration."""
    _ = _operator_values(kind, np.zeros(1), np.zeros(1))  # validate kind early
    if bra.M != ket.M:
        return 0.0
    x, w_x = np.polynomial.legendre.leggauss(n_theta)
    theta = np.arccos(x)
    chi = np.arange(n_chi) * (2.0 * math.pi / n_chi)
    w_chi = 2.0 * math.pi / n_chi
    op = _operator_values(kind, theta, chi)

    total = 0.0 + 0.0j
    for Jb, Kb, cb in bra.primitives():
        for Jk, Kk, ck in ket.primitives():
            # psi_JKM ~ sqrt((2J+1)/8pi^2) D^J*_MK; conj(bra)*ket leaves
            # exp(i (Kk - Kb) chi) times the real d-functions.
            d_b = wigner_d(Jb, bra.M, Kb, theta)
            d_k = wigner_d(Jk, ket.M, Kk, theta)
            phase = np.exp(1j * (Kk - Kb) * chi)
            chi_sum = op @ phase
            norm = math.sqrt((2 * Jb + 1) * (2 * Jk + 1)) / (8.0 * math.pi**2)
            total += cb * ck * norm * 2.0 * math.pi * w_chi * np.dot(w_x * d_b * d_k, chi_sum)
    if abs(total.imag) > 1e-10:
        raise AssertionError(f"oracle integral is not real: {total}")
    return float(total.real)
