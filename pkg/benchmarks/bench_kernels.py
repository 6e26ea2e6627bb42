#!/usr/bin/env python3
"""Benchmark the SIL stepping kernels: numba JIT vs NumPy fallback.

The workload is a representative production segment: the M=3 even-K
block of benzonitrile at J_max=30 (dim 476), marched through a slice of
the Gaussian pulse's rising edge at the production time step.

Run:  python benchmarks/bench_kernels.py [n_steps]
"""

import sys
import time

import numpy as np

import pendular as pd
from pendular import _kernels
from pendular.propagator import HamiltonianProvider


def build_workload(n_steps):
    mol = pd.BENZONITRILE
    basis = pd.build_basis(pd.SymmetryBlock(3, "even"), 30)
    ops = pd.build_operators(basis, mol)
    pulse = pd.PulseSpec(7e11, 2.0)
    provider = HamiltonianProvider.for_pulse(ops, 300.0, pulse)
    h = pd.total_hamiltonian(ops, Es=300.0, intensity=0.0)
    w, v = pd.diagonalize(h, 1)
    psi0 = v[:, 0].astype(np.complex128)
    dt_ns = pd.default_dt_fs(pulse.tau_ns) * 1e-6
    t0 = pulse.t_start_ns
    mids = t0 + (np.arange(n_steps) + 0.5) * dt_ns
    drive_mid = provider.drive_values(mids)
    dts = np.full(n_steps, dt_ns)
    return basis.dim, provider, drive_mid, dts, psi0


def bench(fn, provider, drive_mid, dts, psi0, repeats=3):
    best = np.inf
    result = None
    for _ in range(repeats):
        psi = psi0.copy()
        t0 = time.perf_counter()
        orders, errors, status = fn(
            provider.indptr, provider.indices, provider.data_static,
            provider.data_drive, drive_mid, dts, psi, 1e-9, 4, 25,
        )
        elapsed = time.perf_counter() - t0
        assert status == -1
        best = min(best, elapsed)
        result = psi
    return best, result, orders.max()


def main():
    n_steps = int(sys.argv[1]) if len(sys.argv) > 1 else 20_000
    dim, provider, drive_mid, dts, psi0 = build_workload(n_steps)
    print(f"workload: dim={dim}, nnz={provider.indices.shape[0]}, steps={n_steps}")

    t_np, psi_np, kmax_np = bench(
        _kernels.sil_segment_numpy, provider, drive_mid, dts, psi0, repeats=1
    )
    print(f"numpy fallback : {t_np:8.3f} s  ({n_steps / t_np:9.0f} steps/s, max order {kmax_np})")

    if hasattr(_kernels, "sil_segment_numba"):
        # warm up the JIT outside the timed region
        bench(_kernels.sil_segment_numba, provider, drive_mid[:10], dts[:10], psi0, repeats=1)
        t_nb, psi_nb, kmax_nb = bench(
            _kernels.sil_segment_numba, provider, drive_mid, dts, psi0
        )
        print(f"numba kernels  : {t_nb:8.3f} s  ({n_steps / t_nb:9.0f} steps/s, max order {kmax_nb})")
        print(f"speedup        : {t_np / t_nb:8.1f}x")
        agreement = np.abs(psi_np - psi_nb).max()
        print(f"paths agree to : {agreement:.2e}")
    else:
        print("numba backend unavailable (PENDULAR_NO_NUMBA set or numba missing)")


if __name__ == "__main__":
    main()
