import math

import numpy as np
import pytest
from sympy.physics.wigner import wigner_3j as sympy_3j

from pendular.wigner import wigner3j, wigner_d


class TestWigner3j:
    def test_against_sympy_exhaustive_low_j(self):
        for j1 in range(4):
            for j2 in range(4):
                for j3 in range(abs(j1 - j2), j1 + j2 + 1):
                    for m1 in range(-j1, j1 + 1):
                        for m2 in range(-j2, j2 + 1):
                            m3 = -m1 - m2
                            if abs(m3) > j3:
                                continue
                            ref = float(sympy_3j(j1, j2, j3, m1, m2, m3))
                            assert wigner3j(j1, j2, j3, m1, m2, m3) == pytest.approx(
                                ref, abs=1e-14
                            )

    def test_against_sympy_random_medium_j(self):
        rng = np.random.default_rng(7)
        for _ in range(150):
            j1, j2 = rng.integers(0, 13, 2)
            j3 = rng.integers(abs(j1 - j2), j1 + j2 + 1)
            m1 = rng.integers(-j1, j1 + 1)
            m2 = rng.integers(-j2, j2 + 1)
            m3 = -m1 - m2
            if abs(m3) > j3:
                continue
            ref = float(sympy_3j(int(j1), int(j2), int(j3), int(m1), int(m2), int(m3)))
            got = wigner3j(int(j1), int(j2), int(j3), int(m1), int(m2), int(m3))
            assert got == pytest.approx(ref, abs=1e-13)

    def test_large_j_no_cancellation(self):
        ref = float(sympy_3j(40, 2, 40, 20, 2, -22))
        assert wigner3j(40, 2, 40, 20, 2, -22) == pytest.approx(ref, rel=1e-13)
        ref = float(sympy_3j(40, 1, 39, -7, 0, 7))
        assert wigner3j(40, 1, 39, -7, 0, 7) == pytest.approx(ref, rel=1e-13)

    def test_selection_rules(self):
        assert wigner3j(1, 1, 3, 0, 0, 0) == 0.0  # triangle violation
        assert wigner3j(2, 1, 2, 1, 0, 0) == 0.0  # m sum nonzero
        assert wigner3j(2, 1, 2, 3, 0, -3) == 0.0  # |m| > j
        assert wigner3j(1, 1, 1, 0, 0, 0) == 0.0  # odd sum at zero m

    def test_known_closed_forms(self):
        assert wigner3j(0, 1, 1, 0, 0, 0) == pytest.approx(-1 / math.sqrt(3))
        assert wigner3j(1, 1, 2, 0, 0, 0) == pytest.approx(math.sqrt(2.0 / 15.0))
        # (j 1 j; m 0 -m) = (-1)^(j-m) (-m) / sqrt(j(j+1)(2j+1))
        for j, m in ((3, 2), (5, -4), (8, 0)):
            expected = (-1) ** (j - m) * (-m) / math.sqrt(j * (j + 1) * (2 * j + 1))
            assert wigner3j(j, 1, j, m, 0, -m) == pytest.approx(expected, abs=1e-15)

    def test_negative_j_rejected(self):
        with pytest.raises(ValueError):
            wigner3j(-1, 0, 1, 0, 0, 0)


class TestWignerD:
    theta = np.linspace(0.0, math.pi, 31)

    def test_known_elements(self):
        np.testing.assert_allclose(wigner_d(1, 0, 0, self.theta), np.cos(self.theta), atol=1e-14)
        np.testing.assert_allclose(
            wigner_d(2, 0, 0, self.theta), 0.5 * (3 * np.cos(self.theta) ** 2 - 1), atol=1e-14
        )
        np.testing.assert_allclose(
            wigner_d(2, 0, 2, self.theta),
            math.sqrt(3.0 / 8.0) * np.sin(self.theta) ** 2,
            atol=1e-14,
        )
        np.testing.assert_allclose(
            wigner_d(1, 1, 0, self.theta), -np.sin(self.theta) / math.sqrt(2.0), atol=1e-14
        )

    def test_symmetry_m_k_swap(self):
        # d^j_mk = (-1)^(m-k) d^j_km
        for j, m, k in ((2, 1, -1), (3, 2, 0), (4, -3, 1)):
            lhs = wigner_d(j, m, k, self.theta)
            rhs = (-1) ** (m - k) * wigner_d(j, k, m, self.theta)
            np.testing.assert_allclose(lhs, rhs, atol=1e-13)

    def test_orthogonality_in_j(self):
        # int d^j_mk d^j'_mk sin(theta) dtheta = 2 delta_jj' / (2j+1)
        x, w = np.polynomial.legendre.leggauss(64)
        th = np.arccos(x)
        for m, k in ((0, 0), (1, 1), (2, -2)):
            for j1 in range(max(abs(m), abs(k)), 6):
                for j2 in range(max(abs(m), abs(k)), 6):
                    val = np.sum(w * wigner_d(j1, m, k, th) * wigner_d(j2, m, k, th))
                    expected = 2.0 / (2 * j1 + 1) if j1 == j2 else 0.0
                    assert val == pytest.approx(expected, abs=1e-13)

    def test_invalid_arguments(self):
        with pytest.raises(ValueError):
            wigner_d(1, 2, 0, 0.3)
