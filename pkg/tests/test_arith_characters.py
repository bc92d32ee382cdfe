import cmath

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from sympy import primerange

from rootmoments.arith import build_context, find_primitive_root, get_context, mod_inverse
from rootmoments.characters import (Character, enumerate_even_primitive, evaluate, gauss_sum_and_angle,
                                    orthogonality_sum, phi_plus, root_numbers)
from rootmoments.errors import DomainError, PrimalityError

SMALL_PRIMES = list(primerange(3, 200))


@pytest.mark.parametrize("q,g", [(3, 2), (5, 2), (7, 3)])
def test_primitive_root_small(q, g):
    assert find_primitive_root(q) == g


def test_discrete_log_q5_q7():
    c5 = get_context(5)
    assert [int(c5.ind[n]) for n in (1, 2, 4, 3)] == [0, 1, 2, 3]
    assert int(get_context(7).ind[2]) == 2


@pytest.mark.parametrize("n,q,inv", [(2, 5, 3), (1, 101, 1), (6, 7, 6)])
def test_mod_inverse(n, q, inv):
    assert mod_inverse(n, q) == inv


@pytest.mark.parametrize("q", SMALL_PRIMES)
def test_context_tables(q):
    ctx = build_context(q)
    n = np.arange(1, q)
    assert all(pow(ctx.g, int(ctx.ind[x]), q) == x for x in n)
    assert sorted(ctx.ind[n]) == list(range(q - 1))
    assert np.all(n * ctx.inv[n] % q == 1)


@pytest.mark.parametrize("q", [1, 2, 9, 15, 100])
def test_rejects_non_odd_primes(q):
    with pytest.raises(PrimalityError):
        build_context(q)


def test_even_primitive_enumeration():
    assert [c.a for c in enumerate_even_primitive(get_context(5))] == [2]
    assert [c.a for c in enumerate_even_primitive(get_context(7))] == [2, 4]
    assert enumerate_even_primitive(get_context(3)) == []
    assert (phi_plus(5), phi_plus(7), phi_plus(3), phi_plus(101)) == (1, 2, 0, 49)


def test_character_values_q5():
    chi = Character(get_context(5), 2)
    assert evaluate(chi, 4) == pytest.approx(1)
    assert evaluate(chi, 2) == pytest.approx(-1)
    assert evaluate(chi, 10) == 0


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(SMALL_PRIMES), st.integers(0, 10**6), st.integers(1, 10**6), st.integers(1, 10**6))
def test_character_multiplicative(q, a, m, n):
    chi = Character(get_context(q), a)
    if m % q and n % q:
        assert abs(chi(m * n) - chi(m) * chi(n)) < 1e-12
        assert abs(abs(chi(m)) - 1) < 1e-12
    assert abs(chi(q - 1) - (-1) ** (chi.a % 2)) < 1e-12


def test_gauss_sums_quadratic():
    g5 = gauss_sum_and_angle(Character(get_context(5), 2))
    assert abs(g5.tau - 5**0.5) < 1e-12 and abs(g5.eps - 1) < 1e-12 and g5.theta == pytest.approx(0, abs=1e-12)
    g13 = gauss_sum_and_angle(Character(get_context(13), 6))
    assert abs(g13.eps - 1) < 1e-12 and min(g13.theta, 1 - g13.theta) < 1e-12


@pytest.mark.parametrize("q", [7, 13, 101, 1009])
def test_root_numbers_fft_match_direct(q):
    ctx = get_context(q)
    eps, theta = root_numbers(ctx)
    assert np.max(np.abs(np.abs(eps) - 1)) < 1e-10
    for a in (1, 2, (q - 1) // 2, q - 2):
        g = gauss_sum_and_angle(Character(ctx, a))
        assert abs(g.eps - eps[a - 1]) < 1e-10
        assert abs(cmath.exp(2j * cmath.pi * theta[a - 1]) - eps[a - 1]) < 1e-10
    # conjugate character carries the conjugate root number for even chi
    a = np.arange(2, q - 1, 2)
    assert np.max(np.abs(eps[a - 1].conj() - eps[(q - 1 - a) - 1])) < 1e-10


@pytest.mark.parametrize("q,m,expected", [(7, 1, 2), (7, 6, 2), (7, 2, -1)])
def test_orthogonality_values(q, m, expected):
    got, pred = orthogonality_sum(get_context(q), m)
    assert abs(got - expected) < 1e-9 and pred == expected


def test_orthogonality_rejects_multiple_of_q():
    with pytest.raises(DomainError):
        orthogonality_sum(get_context(7), 14)
