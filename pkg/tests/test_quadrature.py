import math

import pytest
from hypothesis import given, strategies as st

from fdesed.entropy import MultiplierPair, fde_pdf
from fdesed.errors import QuadratureNonConvergence
from fdesed.quadrature import QuadratureConfig, integrate
from fdesed.series import TruncationConfig, series_integral_f


def test_polynomial_exact():
    # Simpson is exact for cubics
    assert integrate(lambda x: x**3 - 2 * x + 1, 0.0, 2.0) == pytest.approx(4 - 4 + 2, abs=1e-14)


def test_transcendental():
    assert integrate(math.sin, 0.0, math.pi) == pytest.approx(2.0, abs=1e-10)
    assert integrate(math.exp, -1.0, 1.0) == pytest.approx(math.e - 1 / math.e, abs=1e-10)


def test_sharp_peak_adapts():
    value = integrate(lambda x: 1.0 / (1e-4 + x * x), -1.0, 1.0)
    assert value == pytest.approx(2 / 1e-2 * math.atan(1 / 1e-2), rel=1e-9)


def test_empty_and_reversed_interval():
    assert integrate(math.exp, 1.0, 1.0) == 0.0
    with pytest.raises(ValueError):
        integrate(math.exp, 1.0, 0.0)


def test_non_convergence_raises():
    with pytest.raises(QuadratureNonConvergence):
        integrate(lambda x: 1.0 / x if x > 0 else 1e300, 0.0, 1.0, QuadratureConfig(1e-12, 8))


@pytest.mark.parametrize("kwargs", [{"abs_tol": 0}, {"max_depth": 0}, {"max_depth": 2.5}])
def test_config_validation(kwargs):
    with pytest.raises(ValueError):
        QuadratureConfig(**kwargs)


def test_pdf_quadrature_matches_series_in_convergence_region():
    lam = MultiplierPair(0.1, 0.5)
    quad = integrate(lambda c: fde_pdf(c, lam), 0.0, 1.0)
    series = series_integral_f(lam, 0.0, 1.0, TruncationConfig(20, 20))
    assert abs(quad - series) < 1e-6


@given(st.floats(-3, 3), st.floats(-3, 3))
def test_linear_functions(a, b):
    assert integrate(lambda x: a * x + b, 0.0, 1.0) == pytest.approx(a / 2 + b, abs=1e-12)
