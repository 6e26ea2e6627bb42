import math

import pytest
import scipy.constants

from pendular.units import (
    CODATA2018,
    DIPOLE_FIELD_TO_MHZ,
    POLARIZABILITY_INTENSITY_TO_MHZ,
    joules_to_mhz,
    mhz_to_joules,
    polarizability_coupling,
    stark_coupling,
)


def test_constants_match_codata():
    assert CODATA2018.h == scipy.constants.h
    assert CODATA2018.c == scipy.constants.c
    assert CODATA2018.epsilon_0 == pytest.approx(scipy.constants.epsilon_0, rel=1e-9)
    assert CODATA2018.hbar == pytest.approx(scipy.constants.hbar, rel=1e-12)


def test_stark_coupling_reference_value():
    # independent recomputation from CODATA: (1 D)(1 V/cm)/h in MHz
    debye = 1e-21 / scipy.constants.c
    expected = debye * 100.0 / scipy.constants.h / 1e6
    assert stark_coupling(1.0, 1.0) == pytest.approx(expected, rel=1e-12)
    assert stark_coupling(1.0, 1.0) == pytest.approx(0.503412, rel=1e-6)


def test_stark_coupling_examples():
    assert stark_coupling(0.0, 300.0) == 0.0
    # benzonitrile dipole at 300 V/cm
    assert stark_coupling(4.515, 300.0) == pytest.approx(681.87, abs=5e-3)


def test_polarizability_coupling_reference_value():
    # 2 pi alpha_vol I / (c h): 1 A^3 = 1e-30 m^3, 1e11 W/cm^2 = 1e15 W/m^2
    expected_hz = 2.0 * math.pi * 1e-30 * 1e15 / (scipy.constants.c * scipy.constants.h)
    assert polarizability_coupling(1.0, 1e11) == pytest.approx(expected_hz / 1e6, rel=1e-12)
    # ~3.163e4 MHz
    assert polarizability_coupling(1.0, 1e11) == pytest.approx(3.163e4, rel=1e-3)


def test_polarizability_coupling_anisotropy_scaling():
    base = polarizability_coupling(1.0, 1e11)
    assert polarizability_coupling(11.15, 7e11) == pytest.approx(base * 11.15 * 7.0, rel=1e-12)
    assert polarizability_coupling(5.0, 0.0) == 0.0


@pytest.mark.parametrize("factor", [0.5, 2.0, 7.3, 1e4])
def test_couplings_linear_to_machine_precision(factor):
    ulp = 4e-16
    assert stark_coupling(1.3 * factor, 220.0) == pytest.approx(
        stark_coupling(1.3, 220.0) * factor, rel=ulp)
    assert stark_coupling(1.3, 220.0 * factor) == pytest.approx(
        stark_coupling(1.3, 220.0) * factor, rel=ulp)
    assert polarizability_coupling(2.2 * factor, 3e10) == pytest.approx(
        polarizability_coupling(2.2, 3e10) * factor, rel=ulp)
    assert polarizability_coupling(2.2, 3e10 * factor) == pytest.approx(
        polarizability_coupling(2.2, 3e10) * factor, rel=ulp)


def test_negative_inputs_rejected():
    with pytest.raises(ValueError):
        stark_coupling(-1.0, 10.0)
    with pytest.raises(ValueError):
        stark_coupling(1.0, -10.0)
    with pytest.raises(ValueError):
        polarizability_coupling(1.0, -1.0)


def test_energy_roundtrip_identity():
    for value in (1.0, 1214.0, 7.7e6):
        assert joules_to_mhz(mhz_to_joules(value)) == pytest.approx(value, rel=1e-12)


def test_conversion_factors_positive():
    assert DIPOLE_FIELD_TO_MHZ > 0
    assert POLARIZABILITY_INTENSITY_TO_MHZ > 0
