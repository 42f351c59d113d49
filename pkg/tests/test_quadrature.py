import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dilacoh.config import ConvergenceError
from dilacoh.quadrature import adaptive_gk, lorentz_pair_fourier


def test_gk_polynomial_exact():
    assert adaptive_gk(lambda x: x**5 - 3 * x**2, -1.0, 2.0) == pytest.approx(10.5 - 9.0, abs=1e-13)


def test_gk_complex_oscillatory():
    val = adaptive_gk(lambda x: np.exp(1j * 40 * x), 0.0, 1.0, tol=1e-12)
    assert val == pytest.approx((cmath.exp(40j) - 1) / 40j, abs=1e-11)


def test_gk_handles_endpoint_singularity_within_budget():
    val = adaptive_gk(lambda x: 1 / np.sqrt(x), 0.0, 1.0, tol=1e-8, max_depth=60)
    assert val == pytest.approx(2.0, abs=1e-7)


def test_gk_reports_failure():
    with pytest.raises(ConvergenceError):
        adaptive_gk(lambda x: 1 / x, 0.0, 1.0, tol=1e-12, max_depth=8)


def test_gk_empty_interval():
    assert adaptive_gk(np.cos, 1.0, 1.0) == 0.0


def _exact(a, b, s):
    # close in the upper half plane (pole v = i a) for s > 0, lower (v = -i b) otherwise
    if s >= 0:
        return 2 * math.pi * cmath.exp(-a * s) / (a + b)
    return 2 * math.pi * cmath.exp(b * s) / (a + b)


@settings(max_examples=40)
@given(a=st.floats(0.2, 5.0), br=st.floats(0.2, 5.0), bi=st.floats(-5.0, 5.0),
       s=st.one_of(st.floats(-30.0, 30.0), st.floats(-1e-4, 1e-4), st.just(0.0)))
def test_lorentz_pair_fourier_against_residues(a, br, bi, s):
    b = complex(br, bi)
    assert abs(lorentz_pair_fourier(a, b, s) - _exact(a, b, s)) < 1e-9


def test_lorentz_pair_rejects_growing_factors():
    with pytest.raises(ValueError):
        lorentz_pair_fourier(-1.0, 1.0, 0.1)
