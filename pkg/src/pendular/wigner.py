"""Wigner 3j symbols and rotation matrix elements for integer momenta.

The 3j symbols are evaluated with the Racah sum carried out in exact
rational arithmetic (Python integers / ``fractions.Fraction``) and
folded to a float only through a single square root at the end.  This
avoids the catastrophic cancellation of naive floating-point factorial
formulas and stays exact well beyond J = 40.

Rotation conventions: z-y-z Euler angles (phi, theta, chi) with
``D^j_mk(phi, theta, chi) = exp(-i m phi) d^j_mk(theta) exp(-i k chi)``.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import factorial

import numpy as np


@lru_cache(maxsize=200_000)
def wigner3j(j1: int, j2: int, j3: int, m1: int, m2: int, m3: int) -> float:
    """Wigner 3j symbol (j1 j2 j3; m1 m2 m3) for integer arguments."""
    for name, j in (("j1", j1), ("j2", j2), ("j3", j3)):
        if j < 0:
            raise ValueError(f"{name} must be a non-negative integer, got {j}")
    if m1 + m2 + m3 != 0:
        return 0.0
    if abs(m1) > j1 or abs(m2) > j2 or abs(m3) > j3:
        return 0.0
    if j3 < abs(j1 - j2) or j3 > j1 + j2:
        return 0.0
    t_min = max(0, j2 - j3 - m1, j1 - j3 + m2)
    t_max = min(j1 + j2 - j3, j1 - m1, j2 + m2)
    if t_min > t_max:
        return 0.0
    total = Fraction(0)
    for t in range(t_min, t_max + 1):
        denom = (
            factorial(t)
            * factorial(j3 - j2 + t + m1)
            * factorial(j3 - j1 + t - m2)
            * factorial(j1 + j2 - j3 - t)
            * factorial(j1 - t - m1)
            * factorial(j2 - t + m2)
        )
        total += Fraction((-1) ** t, denom)
    if total == 0:
        return 0.0
    prefactor = Fraction(
        factorial(j1 + j2 - j3) * factorial(j1 - j2 + j3) * factorial(-j1 + j2 + j3),
        factorial(j1 + j2 + j3 + 1),
    )
    prefactor *= (
        factorial(j1 + m1) * factorial(j1 - m1)
        * factorial(j2 + m2) * factorial(j2 - m2)
        * factorial(j3 + m3) * factorial(j3 - m3)
    )
    # value = phase * sqrt(prefactor) * total; fold the exact rational
    # prefactor * total^2 through one sqrt.
    magnitude = float(prefactor * total * total) ** 0.5
    sign = (-1) ** (j1 - j2 - m3) * (1 if total > 0 else -1)
    return sign * magnitude


def wigner_d(j: int, m: int, k: int, theta) -> np.ndarray:
    """Small Wigner d^j_mk(theta); ``theta`` may be a scalar or array."""
    if abs(m) > j or abs(k) > j:
        raise ValueError(f"need |m|,|k| <= j, got j={j}, m={m}, k={k}")
    theta = np.asarray(theta, dtype=float)
    c = np.cos(theta / 2.0)
    s = np.sin(theta / 2.0)
    pref = float(
        factorial(j + m) * factorial(j - m) * factorial(j + k) * factorial(j - k)
    ) ** 0.5
    out = np.zeros_like(theta)
    for t in range(max(0, k - m), min(j + k, j - m) + 1):
        denom = (
            factorial(j + k - t)
            * factorial(t)
            * factorial(m - k + t)
            * factorial(j - m - t)
        )
        out = out + ((-1) ** (m - k + t) / denom) * c ** (2 * j + k - m - 2 * t) * s ** (
            m - k + 2 * t
        )
    return pref * out
