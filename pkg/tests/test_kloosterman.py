import cmath
import math

import numpy as np
import pytest
from sympy import primerange

from rootmoments.arith import get_context
from rootmoments.errors import DomainError, PreconditionError, ResourceError
from rootmoments.kloosterman import (classical_kloosterman, completed_inverse_sum, correlation_diagnostics,
                                     incomplete_inverse_sum, inverse_sum_bound, kl_all, kl_point,
                                     kl_table_direct)

# brute-force sum over x1 x2 x3 = 2 mod 7 with mpmath, normalized by 1/7
KL3_2_MOD7 = 0.642857142857142857142857142858 - 0.566946709513840840821774804351j


def test_kl_examples():
    assert abs(kl_point(2, 1, 5) - (2 + 2 * math.cos(4 * math.pi / 5)) / math.sqrt(5)) < 1e-12
    assert abs(kl_point(3, 2, 7) - KL3_2_MOD7) < 1e-12
    assert abs(kl_all(3, get_context(7))(2) - KL3_2_MOD7) < 1e-12


def test_kl1_row_exact():
    q = 101
    t = kl_all(1, get_context(q))
    x = np.arange(1, q)
    assert np.array_equal(t.values, np.exp(2j * np.pi * x / q)) or np.max(np.abs(t.values - np.exp(2j * np.pi * x / q))) == 0


@pytest.mark.parametrize("q", list(primerange(3, 60)))
def test_fft_matches_direct_recursion(q):
    ctx = get_context(q)
    for k in range(1, 5):
        assert np.max(np.abs(kl_all(k, ctx).values - kl_table_direct(k, q).values)) < 1e-9


def test_deligne_and_conjugation():
    ctx = get_context(101)
    assert kl_all(5, ctx).max_abs() <= 5 + 1e-9
    for k in (2, 3, 4):
        t = kl_all(k, ctx)
        x = np.arange(1, 101)
        assert np.max(np.abs(np.conj(t(x)) - t(((-1) ** k * x) % 101))) < 1e-12


def test_kl_errors():
    with pytest.raises(DomainError):
        kl_all(2, get_context(7))(0)
    with pytest.raises(ResourceError):
        kl_point(6, 1, 1009)


def test_classical_kloosterman():
    assert abs(classical_kloosterman(1, 1, 5) - (2 + 2 * math.cos(4 * math.pi / 5))) < 1e-12
    assert abs(classical_kloosterman(3, 8, 101) - classical_kloosterman(8, 3, 101)) < 1e-10
    assert abs(classical_kloosterman(1, 3, 101)) <= 2 * math.sqrt(101)


def test_inverse_sums():
    ctx = get_context(1009)
    assert abs(incomplete_inverse_sum(5, 1008, ctx) + 1) < 1e-9
    assert abs(incomplete_inverse_sum(5, 1, ctx) - cmath.exp(2j * math.pi * 5 / 1009)) < 1e-12
    for T in (100, 1000):
        s = incomplete_inverse_sum(5, T, ctx)
        assert abs(s - completed_inverse_sum(5, T, ctx)) < 1e-8
        assert abs(s) <= T / 1009 + 3 * math.sqrt(1009) * (1 + math.log(1009 / 2))
        assert abs(s) <= inverse_sum_bound(T, 1009)


def test_correlation_diagnostics():
    ctx = get_context(101)
    r1 = correlation_diagnostics(ctx, 3, 1, 1, 101**0.55, 101**0.45)
    assert r1.W <= 9 * 101 + 1e-9
    r = correlation_diagnostics(ctx, 3, 1, 10, 101**0.55, 101**0.45)
    assert r.w_ratio < 1 and r.v2_ratio < 5
    with pytest.raises(PreconditionError):
        correlation_diagnostics(ctx, 3, 1, 11, 10, 10)
