import math

import numpy as np
import pytest

from pendular.fields import DcSpec, PulseSpec, dc_field, pulse_intensity


class TestPulse:
    def test_peak_and_fwhm(self):
        pulse = PulseSpec(I0=7e11, tau_ns=2.0)
        i0, di0 = pulse_intensity(0.0, pulse)
        assert i0 == 7e11
        assert di0 == 0.0
        for t in (-1.0, 1.0):  # +- tau/2
            i, _ = pulse_intensity(t, pulse)
            assert i == pytest.approx(7e11 / 2.0, rel=1e-12)

    def test_at_minus_sigma(self):
        pulse = PulseSpec(I0=1e11, tau_ns=1.0)
        s = pulse.sigma_ns
        i, di = pulse_intensity(-s, pulse)
        assert i == pytest.approx(1e11 * math.exp(-0.5), rel=1e-12)
        assert di == pytest.approx(1e11 * math.exp(-0.5) / s, rel=1e-12)

    def test_derivative_matches_central_differences(self):
        pulse = PulseSpec(I0=7e11, tau_ns=1.7)
        s = pulse.sigma_ns
        grid = np.linspace(-4 * s, 4 * s, 201)
        h = 1e-6 * s
        _, di = pulse_intensity(grid, pulse)
        fd = (pulse_intensity(grid + h, pulse)[0] - pulse_intensity(grid - h, pulse)[0]) / (2 * h)
        scale = np.abs(di) + pulse.I0 / s * 1e-10
        assert np.max(np.abs(di - fd) / scale) < 1e-8

    def test_default_window_opens_at_1em4_peak(self):
        pulse = PulseSpec(I0=7e11, tau_ns=3.0)
        i_start, _ = pulse_intensity(pulse.t_start_ns, pulse)
        assert i_start == pytest.approx(7e11 * 1e-4, rel=1e-10)
        assert pulse.t_end_ns == 0.0
        assert pulse.t_start_ns == pytest.approx(-pulse.sigma_ns * math.sqrt(2 * math.log(1e4)))

    def test_sigma_definition(self):
        pulse = PulseSpec(I0=1.0, tau_ns=5.0)
        assert pulse.sigma_ns == pytest.approx(5.0 / (2.0 * math.sqrt(2.0 * math.log(2.0))))

    def test_invariants(self):
        with pytest.raises(ValueError):
            PulseSpec(I0=-1.0, tau_ns=1.0)
        with pytest.raises(ValueError):
            PulseSpec(I0=1.0, tau_ns=0.0)
        with pytest.raises(ValueError):
            PulseSpec(I0=1.0, tau_ns=1.0, t_start_ns=1.0, t_end_ns=0.0)


class TestDcField:
    def test_instantaneous_mode_constant(self):
        dc = DcSpec(Es_max=300.0)
        assert dc_field(-1e3, dc) == 300.0
        assert dc_field(57.0, dc) == 300.0

    def test_ramp_profile(self):
        dc = DcSpec(Es_max=300.0, mode="ramp", ramp_rate=100.0)
        assert dc_field(-5.0, dc) == 0.0
        assert dc_field(1.5, dc) == pytest.approx(150.0)
        assert dc_field(1e4, dc) == 300.0
        assert dc.ramp_duration_ns == pytest.approx(3.0)

    def test_ramp_vector(self):
        dc = DcSpec(Es_max=200.0, mode="ramp", ramp_rate=50.0)
        t = np.array([-1.0, 0.0, 2.0, 100.0])
        np.testing.assert_allclose(dc_field(t, dc), [0.0, 0.0, 100.0, 200.0])

    def test_invariants(self):
        with pytest.raises(ValueError):
            DcSpec(Es_max=-5.0)
        with pytest.raises(ValueError):
            DcSpec(Es_max=5.0, mode="ramp", ramp_rate=0.0)
        with pytest.raises(ValueError):
            DcSpec(Es_max=5.0, mode="bogus")
