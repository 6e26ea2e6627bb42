"""Time-dependent field profiles: Gaussian laser pulse and dc field."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

# FWHM tau and Gaussian sigma of the intensity profile: tau = 2 sqrt(2 ln 2) sigma
FWHM_TO_SIGMA = 1.0 / (2.0 * math.sqrt(2.0 * math.log(2.0)))

# Default propagation start: intensity down by 1e-4 from the peak,
# t_start = -sigma * sqrt(2 ln 1e4) ~ -4.29 sigma.
_START_SIGMAS = math.sqrt(2.0 * math.log(1e4))


@dataclass(frozen=True)
class PulseSpec:
    """Gaussian laser pulse, peak at t = 0.

    ``I(t) = I0 exp(-t^2 / 2 sigma^2)`` with ``sigma = tau/(2 sqrt(2 ln 2))``.
    The propagation window defaults to [-sigma*sqrt(2 ln 1e4), 0], i.e.
    it opens where the intensity is 1e-4 of the peak and closes at the
    peak, where observables are evaluated.
    """

    I0: float                       # peak intensity, W/cm^2
    tau_ns: float                   # FWHM of the intensity profile, ns
    t_start_ns: float = field(default=math.nan)
    t_end_ns: float = 0.0

    def __post_init__(self) -> None:
        if self.I0 < 0.0:
            raise ValueError(f"peak intensity must be >= 0, got {self.I0}")
        if self.tau_ns <= 0.0:
            raise ValueError(f"pulse FWHM must be > 0, got {self.tau_ns} ns")
        if math.isnan(self.t_start_ns):
            object.__setattr__(
                self, "t_start_ns", -self.sigma_ns * _START_SIGMAS
            )
        if not self.t_start_ns < self.t_end_ns:
            raise ValueError(
                f"need t_start < t_end, got [{self.t_start_ns}, {self.t_end_ns}] ns"
            )

    @property
    def sigma_ns(self) -> float:
        return self.tau_ns * FWHM_TO_SIGMA


@dataclass(frozen=True)
class DcSpec:
    """Static electric field along the laser polarization axis.

    In ``instantaneous`` mode the field is always at ``Es_max`` and the
    initial state is taken as an eigenstate of the dc-dressed
    Hamiltonian.  In ``ramp`` mode the field rises linearly from zero at
    ``ramp_rate`` (V/cm per ns) and is then held constant, which allows
    checking that the turn-on is adiabatic.
    """

    Es_max: float                   # V/cm
    mode: str = "instantaneous"
    ramp_rate: float = 10.0         # V/cm per ns, ramp mode only
    t_ramp_start_ns: float = 0.0

    def __post_init__(self) -> None:
        if self.Es_max < 0.0:
            raise ValueError(f"dc field strength must be >= 0, got {self.Es_max}")
        if self.mode not in ("instantaneous", "ramp"):
            raise ValueError(f"dc mode must be 'instantaneous' or 'ramp', got {self.mode!r}")
        if self.mode == "ramp" and self.ramp_rate <= 0.0:
            raise ValueError(f"ramp rate must be > 0, got {self.ramp_rate}")

    @property
    def ramp_duration_ns(self) -> float:
        if self.mode != "ramp":
            return 0.0
        return self.Es_max / self.ramp_rate


def pulse_intensity(t_ns, pulse: PulseSpec):
    """Intensity and its time derivative at ``t_ns``.

    Returns ``(I, dI_dt)`` in W/cm^2 and W/cm^2 per ns; accepts scalars
    or arrays.
    """
    sigma = pulse.sigma_ns
    t = np.asarray(t_ns, dtype=float)
    intensity = pulse.I0 * np.exp(-(t * t) / (2.0 * sigma * sigma))
    d_intensity = -t / (sigma * sigma) * intensity
    if np.isscalar(t_ns):
        return float(intensity), float(d_intensity)
    return intensity, d_intensity


def dc_field(t_ns, dc: DcSpec):
    """dc field strength at ``t_ns`` in V/cm; accepts scalars or arrays."""
    if dc.mode == "instantaneous":
        if np.isscalar(t_ns):
            return dc.Es_max
        return np.full_like(np.asarray(t_ns, dtype=float), dc.Es_max)
    t = np.asarray(t_ns, dtype=float)
    value = np.clip(dc.ramp_rate * (t - dc.t_ramp_start_ns), 0.0, dc.Es_max)
    if np.isscalar(t_ns):
        return float(value)
    return value
