import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rootmoments.bumps import (BumpSpec, base_g, bump_value, derivative_norm, family_condition_check,
                               finite_difference_norm, fourier_coefficients, fourier_tail_index, ramp,
                               ramp_derivative_norm, shrinking_family_threshold, spectral_derivative_norm)
from rootmoments.errors import DomainError, PreconditionError

SPEC = BumpSpec(0.1, 0.0, 0.5)


def test_base_ramp_endpoints():
    assert base_g(0.0) == 0 and base_g(0.5) == 1 and base_g(1.0) == 0
    assert ramp(0.0) == 0 and ramp(1.0) == 1 and ramp(0.5) == pytest.approx(0.5)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.01, 1.0), st.floats(0, 1), st.floats(0.05, 1.0), st.floats(-2, 3))
def test_minorant_and_support(beta, a, mu, x):
    s = BumpSpec.centered(beta, a, mu)
    v = bump_value(s, x)
    assert 0 <= v <= 1
    if not s.contains(x):
        assert v == 0


def test_plateau_and_norm():
    assert bump_value(SPEC, 0.25) == 1 and bump_value(SPEC, 0.75) == 0
    x = np.arange(2**16) / 2**16
    f = bump_value(SPEC, x)
    assert f.mean() >= (1 - SPEC.beta) * SPEC.mu
    assert f.mean() == pytest.approx(SPEC.integral(), rel=1e-9)


def test_fourier_coefficients():
    c = fourier_coefficients(SPEC, 40)
    assert c[40].real == pytest.approx(SPEC.integral(), rel=1e-9)
    norm20 = derivative_norm(SPEC, 20)
    for k in (10, 20, 40):
        assert abs(c[40 + k]) * k**20 / norm20 <= 1
    one = fourier_coefficients(BumpSpec.constant(), 5)
    assert np.array_equal(one, np.eye(11)[5])
    assert 1000 < fourier_tail_index(SPEC) < 5000
    with pytest.raises(PreconditionError):
        fourier_coefficients(BumpSpec(0.1, 0, 0.5, samples=64), 20)


def test_derivative_norms_agree():
    assert derivative_norm(SPEC, 1) == pytest.approx(2.0)
    assert finite_difference_norm(SPEC) == pytest.approx(2.0, rel=1e-6)
    for J in (1, 2, 3, 4):
        assert spectral_derivative_norm(SPEC, J) == pytest.approx(derivative_norm(SPEC, J), rel=1e-3)


def test_ramp_derivative_norm_growth():
    v = [ramp_derivative_norm(J) for J in (1, 2, 5, 10)]
    assert v[0] == pytest.approx(1.0)  # monotone ramp from 0 to 1
    assert all(b > a for a, b in zip(v, v[1:]))


def test_condition_checks():
    fixed = family_condition_check(SPEC, 10**4000, 0.01)
    assert fixed.passed and fixed.cond2_ratio == 1
    assert not family_condition_check(SPEC, 1009, 0.01).passed
    log10q = shrinking_family_threshold(0.1, 1.0, 1 / 960, 0.0, J=20)
    assert math.isfinite(log10q) and log10q > 0
    q = 10 ** math.ceil(log10q + 1)
    mu = math.exp(-math.log(q) / 960)
    assert family_condition_check(BumpSpec.centered(0.1, 0.5, mu), q, 0.0).passed
    assert shrinking_family_threshold(0.1, 1.0, 1 / 400, 0.0, J=20) == math.inf


def test_invalid_specs():
    with pytest.raises(DomainError):
        BumpSpec(0.1, 0.3, 0.3)
    with pytest.raises(PreconditionError):
        BumpSpec(0.0, 0.0, 0.5)
