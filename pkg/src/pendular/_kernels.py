"""Short-iterative-Lanczos propagation kernels.

Two interchangeable implementations of the same stepping loop:

* ``sil_segment_numba`` -- explicit loops compiled with ``numba.njit``
  (nogil, cached); the default hot path.
* ``sil_segment_numpy`` -- vectorized NumPy fallback.

Set the environment variable ``PENDULAR_NO_NUMBA=1`` before import to
select the fallback (or it is selected automatically when numba is not
importable).  ``sil_segment`` is the active backend; both paths must
agree to ~1e-13, which the test suite enforces.

Contract of ``sil_segment(indptr, indices, data_static, data_drive,
drive_mid, dts_ns, psi, tol, kmin, kmax)``:

* step ``n`` propagates ``psi`` by ``exp(-i * 2pi*1e-3 * H_n * dt_n)``
  with ``H_n = data_static + drive_mid[n] * data_drive`` on the shared
  CSR pattern (MHz) and ``dt_n = dts_ns[n]``;
* the Krylov order grows from ``kmin`` until the magnitude of the last
  component of the tridiagonal exponential applied to e1 drops below
  ``tol`` (full reorthogonalization, unitary small-space exponential);
* a Lanczos breakdown (vanishing coupling) means the Krylov space is
  invariant and the step is exact;
* ``psi`` is updated in place; returns ``(orders, errors, status)``
  with ``status = -1`` on success or the index of the first rejected
  step (order cap reached with error above tolerance).
"""

from __future__ import annotations

import math
import os

import numpy as np

from .units import PHASE_PER_MHZ_NS

_BREAKDOWN_REL = 1e-14


def _expm_tridiag_e1(alpha: np.ndarray, beta: np.ndarray, theta: float) -> np.ndarray:
    """exp(-i theta T) e1 for the real symmetric tridiagonal T."""
    k = alpha.shape[0]
    T = np.zeros((k, k))
    for i in range(k):
        T[i, i] = alpha[i]
    for i in range(k - 1):
        T[i, i + 1] = beta[i]
        T[i + 1, i] = beta[i]
    lam, q = np.linalg.eigh(T)
    qc = q.astype(np.complex128)
    weights = np.exp(-1j * theta * lam) * qc[0, :]
    return qc @ weights


def _csr_matvec(indptr, indices, data, x, out) -> None:
    n = indptr.shape[0] - 1
    for i in range(n):
        acc = 0.0 + 0.0j
        for p in range(indptr[i], indptr[i + 1]):
            acc += data[p] * x[indices[p]]
        out[i] = acc


def _segment_impl(indptr, indices, data_static, data_drive, drive_mid, dts_ns,
                  psi, tol, kmin, kmax):
    n_steps = dts_ns.shape[0]
    dim = psi.shape[0]
    nnz = data_static.shape[0]
    k_cap = min(kmax, dim)
    data = np.empty(nnz)
    V = np.empty((k_cap, dim), dtype=np.complex128)
    w = np.empty(dim, dtype=np.complex128)
    alpha = np.zeros(k_cap)
    beta = np.zeros(k_cap)
    orders = np.zeros(n_steps, dtype=np.int64)
    errors = np.zeros(n_steps)
    status = np.int64(-1)

    for n in range(n_steps):
        f = drive_mid[n]
        for p in range(nnz):
            data[p] = data_static[p] + f * data_drive[p]
        theta = PHASE_PER_MHZ_NS * dts_ns[n]

        nrm2 = 0.0
        for i in range(dim):
            nrm2 += psi[i].real ** 2 + psi[i].imag ** 2
        nrm = math.sqrt(nrm2)
        for i in range(dim):
            V[0, i] = psi[i] / nrm

        _csr_matvec(indptr, indices, data, V[0], w)
        a = 0.0
        for i in range(dim):
            a += (V[0, i].conjugate() * w[i]).real
        alpha[0] = a
        for i in range(dim):
            w[i] -= a * V[0, i]
        c = 0.0 + 0.0j
        for i in range(dim):
            c += V[0, i].conjugate() * w[i]
        for i in range(dim):
            w[i] -= c * V[0, i]

        scale = max(1.0, abs(a))
        k = 1
        est = math.inf
        u = np.empty(0, dtype=np.complex128)
        accepted = False
        while True:
            b2 = 0.0
            for i in range(dim):
                b2 += w[i].real ** 2 + w[i].imag ** 2
            b = math.sqrt(b2)
            if b <= _BREAKDOWN_REL * scale:
                # invariant Krylov subspace: the small exponential is exact
                u = _expm_tridiag_e1(alpha[:k], beta[: k - 1], theta)
                est = 0.0
                accepted = True
                break
            if k == k_cap:
                u = _expm_tridiag_e1(alpha[:k], beta[: k - 1], theta)
                est = abs(u[k - 1])
                accepted = est <= tol or k == dim
                if k == dim:
                    est = 0.0
                break
            beta[k - 1] = b
            scale = max(scale, b)
            for i in range(dim):
                V[k, i] = w[i] / b
            _csr_matvec(indptr, indices, data, V[k], w)
            for i in range(dim):
                w[i] -= b * V[k - 1, i]
            a = 0.0
            for i in range(dim):
                a += (V[k, i].conjugate() * w[i]).real
            alpha[k] = a
            scale = max(scale, abs(a))
            for i in range(dim):
                w[i] -= a * V[k, i]
            for m in range(k + 1):
                c = 0.0 + 0.0j
                for i in range(dim):
                    c += V[m, i].conjugate() * w[i]
                for i in range(dim):
                    w[i] -= c * V[m, i]
            k += 1
            if k >= kmin:
                u = _expm_tridiag_e1(alpha[:k], beta[: k - 1], theta)
                est = abs(u[k - 1])
                if est <= tol:
                    accepted = True
                    break
        orders[n] = k
        errors[n] = est
        if not accepted:
            status = np.int64(n)
            break
        for i in range(dim):
            acc = 0.0 + 0.0j
            for m in range(k):
                acc += u[m] * V[m, i]
            psi[i] = nrm * acc
    return orders, errors, status


def sil_segment_numpy(indptr, indices, data_static, data_drive, drive_mid, dts_ns,
                      psi, tol, kmin, kmax):
    """Vectorized NumPy implementation of the segment contract."""
    n_steps = dts_ns.shape[0]
    dim = psi.shape[0]
    k_cap = min(kmax, dim)
    starts = indptr[:-1]
    orders = np.zeros(n_steps, dtype=np.int64)
    errors = np.zeros(n_steps)
    V = np.empty((k_cap, dim), dtype=np.complex128)
    expm = _EXPM_PY

    def matvec(data, x):
        # no empty rows: the operator pattern always carries the diagonal
        return np.add.reduceat(data * x[indices], starts)

    for n in range(n_steps):
        data = data_static + drive_mid[n] * data_drive
        theta = PHASE_PER_MHZ_NS * dts_ns[n]
        nrm = np.linalg.norm(psi)
        V[0] = psi / nrm
        alpha = np.zeros(k_cap)
        beta = np.zeros(k_cap)
        w = matvec(data, V[0])
        alpha[0] = np.vdot(V[0], w).real
        w = w - alpha[0] * V[0]
        w = w - np.vdot(V[0], w) * V[0]
        scale = max(1.0, abs(alpha[0]))
        k = 1
        est = math.inf
        u = None
        accepted = False
        while True:
            b = np.linalg.norm(w)
            if b <= _BREAKDOWN_REL * scale:
                u = expm(alpha[:k], beta[: k - 1], theta)
                est = 0.0
                accepted = True
                break
            if k == k_cap:
                u = expm(alpha[:k], beta[: k - 1], theta)
                est = abs(u[k - 1])
                accepted = est <= tol or k == dim
                if k == dim:
                    est = 0.0
                break
            beta[k - 1] = b
            scale = max(scale, b)
            V[k] = w / b
            w = matvec(data, V[k]) - b * V[k - 1]
            alpha[k] = np.vdot(V[k], w).real
            scale = max(scale, abs(alpha[k]))
            w = w - alpha[k] * V[k]
            coeffs = V[: k + 1].conj() @ w
            w = w - V[: k + 1].T @ coeffs
            k += 1
            if k >= kmin:
                u = expm(alpha[:k], beta[: k - 1], theta)
                est = abs(u[k - 1])
                if est <= tol:
                    accepted = True
                    break
        orders[n] = k
        errors[n] = est
        if not accepted:
            # rejected: do not advance the state through a bad step
            return orders, errors, np.int64(n)
        psi[:] = nrm * (V[:k].T @ u)
    return orders, errors, np.int64(-1)


_EXPM_PY = _expm_tridiag_e1

_want_numba = os.environ.get("PENDULAR_NO_NUMBA", "").strip() in ("", "0", "false", "no")

if _want_numba:
    try:
        import numba

        _expm_tridiag_e1 = numba.njit(cache=True, nogil=True)(_expm_tridiag_e1)
        _csr_matvec = numba.njit(cache=True, nogil=True)(_csr_matvec)
        sil_segment_numba = numba.njit(cache=True, nogil=True)(_segment_impl)
        BACKEND = "numba"
        sil_segment = sil_segment_numba
    except ImportError:
        BACKEND = "numpy"
        sil_segment = sil_segment_numpy
else:
    BACKEND = "numpy"
    sil_segment = sil_segment_numpy
