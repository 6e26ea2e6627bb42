import math

import pytest

from pendular.basis import BasisFunction
from pendular.quadrature import quadrature_oracle


def test_diagonal_bounds():
    for f in (
        BasisFunction(0, 0, 0, None),
        BasisFunction(3, 2, 0, 1),
        BasisFunction(3, 2, 0, -1),
        BasisFunction(4, -2, 2, None),
    ):
        cos2 = quadrature_oracle("cos2_theta", f, f)
        ss = quadrature_oracle("sin2theta_sin2chi", f, f)
        assert 0.0 <= cos2 <= 1.0
        assert 0.0 <= ss <= 1.0
        assert cos2 + ss <= 1.0 + 1e-12
        assert abs(quadrature_oracle("cos_theta", f, f)) <= 1.0


def test_known_analytic_values():
    f000 = BasisFunction(0, 0, 0, None)
    f100 = BasisFunction(1, 0, 0, None)
    assert quadrature_oracle("cos_theta", f000, f100) == pytest.approx(
        1.0 / math.sqrt(3.0), abs=1e-12
    )
    assert quadrature_oracle("cos2_theta", f000, f000) == pytest.approx(1.0 / 3.0, abs=1e-12)
    assert quadrature_oracle("sin2theta_sin2chi", f000, f000) == pytest.approx(
        1.0 / 3.0, abs=1e-12
    )
    assert quadrature_oracle("cos2_theta", f100, f100) == pytest.approx(0.6, abs=1e-12)
    f323 = BasisFunction(3, 2, 3, None)
    assert quadrature_oracle("cos_theta", f323, f323) == pytest.approx(0.5, abs=1e-12)


def test_symmetrized_pair_magnitude():
    plus = BasisFunction(2, 2, 0, 1)
    f000 = BasisFunction(0, 0, 0, None)
    val = quadrature_oracle("sin2theta_sin2chi", plus, f000)
    assert abs(val) == pytest.approx(1.0 / math.sqrt(15.0), abs=1e-12)


def test_hermiticity_of_oracle():
    a = BasisFunction(3, 1, 1, None)
    b = BasisFunction(4, -1, 1, None)
    for kind in ("cos_theta", "cos2_theta", "sin2theta_sin2chi"):
        assert quadrature_oracle(kind, a, b) == pytest.approx(
            quadrature_oracle(kind, b, a), abs=1e-12
        )


def test_different_m_orthogonal():
    a = BasisFunction(2, 0, 1, None)
    b = BasisFunction(2, 0, 2, None)
    assert quadrature_oracle("cos_theta", a, b) == 0.0


def test_unsupported_kind_rejected():
    f = BasisFunction(0, 0, 0, None)
    with pytest.raises(ValueError, match="unsupported operator kind"):
        quadrature_oracle("sin_theta", f, f)
