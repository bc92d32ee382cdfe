import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from sympy import factorint, primerange

from rootmoments.arith import get_context
from rootmoments.characters import Character
from rootmoments.errors import PreconditionError
from rootmoments.mollifier import (a_partial_sum, a_values, arithmetic_sieve, build_mollifier, g_asymptotic_check,
                                   g_direct, mollifier_constant, mollifier_value, mollifier_values,
                                   unitary_convolution)

# gamma + sum_p log p/(p(p-1)) from -sum_{j>=2} P'(j) with the mpmath prime zeta P (independent oracle)
C_ORACLE = 1.3325822757332209


def _brute_coeffs(q, M):
    """Direct definition with sympy arithmetic, no shared code with the module."""
    def sqf(n):
        return all(e == 1 for e in factorint(n).values())

    def mu(n):
        f = factorint(n)
        return 0 if any(e > 1 for e in f.values()) else (-1) ** len(f)

    def phi(n):
        return math.prod((p - 1) * p ** (e - 1) for p, e in factorint(n).items()) if n > 1 else 1

    good = [k for k in range(1, M + 1) if k % q and sqf(k)]
    G = sum(Fraction(1, phi(k)) for k in good)
    out = {}
    for m in good:
        s = sum(Fraction(1, phi(k)) for k in range(1, M // m + 1) if k % q and sqf(k) and math.gcd(k, m) == 1)
        out[m] = Fraction(mu(m) * m, phi(m)) * s / G
    return G, out


@pytest.mark.parametrize("q,alpha", [(1009, 0.25), (101, 0.45), (10007, 0.3), (7, 0.49)])
def test_coefficients_match_brute_force(q, alpha):
    ms = build_mollifier(q, alpha)
    G, ref = _brute_coeffs(q, ms.M)
    assert ms.G == G and ms.coeffs == ref
    assert ms.coeff(1) == 1 and all(abs(x) <= 1 for x in ms.coeffs.values())
    assert ms.reciprocal_sum() == 1 / ms.G
    if ms.M >= 4:
        assert ms.coeff(4) == 0


def test_length_one():
    ms = build_mollifier(7, 0.01)
    assert ms.M == 1 and ms.G == 1 and ms.coeffs == {1: Fraction(1)}
    assert g_direct(7, 1) == 1
    assert mollifier_value(ms, Character(get_context(7), 2)) == 1


def test_bad_alpha():
    with pytest.raises(PreconditionError):
        build_mollifier(101, 0.5)


def test_mollifier_values_bounds_and_conjugation():
    q = 1009
    ms = build_mollifier(q, 0.4)
    ctx = get_context(q)
    a = np.arange(2, q - 1, 2)
    v = mollifier_values(ms, ctx, a)
    assert np.max(np.abs(v)) <= sum(m**-0.5 for m in range(1, ms.M + 1))
    conj = mollifier_values(ms, ctx, (q - 1 - a))
    assert np.max(np.abs(v.conj() - conj)) < 1e-12
    assert abs(v[5] - mollifier_value(ms, Character(ctx, int(a[5])))) < 1e-12


def test_sieve_against_sympy():
    t = arithmetic_sieve(500)
    from sympy import divisor_count, mobius, totient
    for n in range(1, 501):
        assert (int(t.mu[n]), int(t.phi[n]), int(t.tau[n])) == (int(mobius(n)), int(totient(n)), int(divisor_count(n)))
    assert list(t.primes) == list(primerange(2, 501))


def test_mollifier_constant():
    c, tail = mollifier_constant()
    assert abs(c - C_ORACLE) < 2e-6 and tail < 2e-6


@pytest.mark.parametrize("q", [7, 1009])
def test_g_asymptotic(q):
    for M in (100, 1000, 10000):
        assert g_asymptotic_check(q, M).residual_ratio <= 5


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 3000), st.sampled_from([7, 101, 1009]))
def test_unitary_identities(n, q):
    d = Fraction(int(n == 1))
    assert unitary_convolution(["mu/phi", "mu^2/phi"], n, q) == d
    assert unitary_convolution(["mu*tau/phi", "mu^2/phi", "mu^2/phi"], n, q) == d


def test_unitary_small_values():
    for p in (2, 3, 5, 11):
        assert unitary_convolution(["mu/phi", "mu^2/phi"], p, 7) == 0
    assert unitary_convolution(["mu/phi", "mu^2/phi"], 1, 7) == 1


def test_a_function():
    a = a_values(100)
    assert a[1] == 1 and a[2] == pytest.approx(math.sqrt(2) + 3) and a[4] == 0
    assert a[6] == pytest.approx(a[2] * a[3])
    r = [a_partial_sum(M)[1] for M in (10**3, 10**4, 10**5)]
    # bounded: successive increments shrink
    assert abs(r[2] - r[1]) < abs(r[1] - r[0])
