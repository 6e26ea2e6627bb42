"""Physical constants and unit conversions.

Internal unit system used throughout the package:

* energies are expressed as frequencies, E/h, in MHz
* time in ns (propagator time steps in fs)
* laser intensity in W/cm^2
* dc field strength in V/cm
* dipole moments in Debye, polarizability volumes in Angstrom^3

With these choices every molecule constant can be used as tabulated in
the spectroscopic literature and the time-evolution phase is
``exp(-i * 2*pi*1e-3 * E[MHz] * t[ns])``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class PhysicalConstants:
    """Fundamental constants (CODATA 2018, SI units).

    Pinned to fixed literals rather than taken from a library so that
    regression numbers are bit-for-bit reproducible.
    """

    h: float = 6.62607015e-34        # Planck constant, J s (exact)
    c: float = 299792458.0           # speed of light, m/s (exact)
    epsilon_0: float = 8.8541878128e-12  # vacuum permittivity, F/m

    @property
    def hbar(self) -> float:
        return self.h / (2.0 * math.pi)


CODATA2018 = PhysicalConstants()

# 1 Debye in C m; the Debye is defined as 1e-21/c C m.
DEBYE = 1e-21 / CODATA2018.c

# Conversion factor: (1 D) * (1 V/cm) as a frequency in MHz.
# mu*E / h = DEBYE * 100 V/m / h, folded to MHz.
DIPOLE_FIELD_TO_MHZ = DEBYE * 100.0 / CODATA2018.h / 1e6

# Conversion factor: (1 A^3 polarizability volume) * (1 W/cm^2) as MHz.
# The induced-dipole energy is (I/2 eps0 c) * alpha_SI with
# alpha_SI = 4 pi eps0 alpha_vol, i.e. 2 pi alpha_vol I / (c h) in Hz.
POLARIZABILITY_INTENSITY_TO_MHZ = (
    2.0 * math.pi * 1e-30 * 1e4 / (CODATA2018.c * CODATA2018.h) / 1e6
)

# Phase accumulated per MHz of energy per ns of time, in radians.
PHASE_PER_MHZ_NS = 2.0 * math.pi * 1e-3


def stark_coupling(mu_debye: float, field_vcm: float) -> float:
    """Stark coupling prefactor mu*E in MHz.

    The returned value multiplies the cos(theta) matrix in the
    Hamiltonian (with a minus sign applied by the caller).
    """
    if mu_debye < 0.0 or field_vcm < 0.0:
        raise ValueError(
            f"stark_coupling requires mu >= 0 and field >= 0, "
            f"got mu={mu_debye} D, field={field_vcm} V/cm"
        )
    return mu_debye * field_vcm * DIPOLE_FIELD_TO_MHZ


def polarizability_coupling(alpha_vol_a3: float, intensity_wcm2: float) -> float:
    """Laser coupling prefactor (I/2 eps0 c)*alpha in MHz.

    ``alpha_vol_a3`` is a polarizability volume (or anisotropy of
    volumes) in Angstrom^3, ``intensity_wcm2`` the laser intensity.
    """
    if intensity_wcm2 < 0.0:
        raise ValueError(f"intensity must be >= 0, got {intensity_wcm2} W/cm^2")
    return alpha_vol_a3 * intensity_wcm2 * POLARIZABILITY_INTENSITY_TO_MHZ


def joules_to_mhz(energy_j: float) -> float:
    """Energy in J to frequency in MHz."""
    return energy_j / CODATA2018.h / 1e6


def mhz_to_joules(freq_mhz: float) -> float:
    """Frequency in MHz to energy in J."""
    return freq_mhz * 1e6 * CODATA2018.h
