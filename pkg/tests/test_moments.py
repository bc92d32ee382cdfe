import math

import numpy as np
import pytest

from rootmoments.arith import get_context
from rootmoments.bumps import BumpSpec
from rootmoments.central import central_family
from rootmoments.errors import DomainError, PreconditionError
from rootmoments.kloosterman import kl_tables
from rootmoments.mollifier import build_mollifier
from rootmoments.moments import (afe_decomposition, first_moment, first_moment_split, hyperbola_sum,
                                 mollified_first, mollified_second, second_moment, smoothed_moments)

Q = 1009


@pytest.fixture(scope="module")
def fam():
    return central_family(Q)


def test_first_moment_main_terms(fam):
    r = first_moment(fam, 1, 0)
    assert r.predicted_main == 503 and r.residual == r.computed - r.predicted_main
    assert first_moment(fam, 4, -1).predicted_main == 503 / 2
    assert abs(r.computed.imag) < 1e-9 and r.computed.real > 0


def test_first_moment_k5_envelope():
    for q in (101, 401, 1009):
        r = first_moment(central_family(q), 1, 5)
        assert abs(r.computed) <= 10 * 5 * 2 * q**0.75


def test_first_moment_split_sums(fam):
    for k in (0, -1, 2):
        A1, A2 = first_moment_split(fam, 3, k)
        assert abs(A1 + A2 - first_moment(fam, 3, k).computed) < 1e-8


def test_unit_check(fam):
    with pytest.raises(DomainError):
        first_moment(fam, Q, 0)


def test_second_moment(fam):
    b0 = second_moment(fam, 1, 1, 0)
    assert 0.6 <= b0.computed.real / b0.predicted_main.real <= 1.4
    assert abs(second_moment(fam, 1, 1, 3).computed) < b0.computed.real
    # chi -> conj(chi) makes every B real; swapping m1, m2 then flips the sign of k
    for k in (0, 1, 2):
        b = second_moment(fam, 2, 3, k).computed
        assert abs(b.imag) < 1e-9
        assert abs(b.conjugate() - second_moment(fam, 3, 2, -k).computed) < 1e-9
    assert abs(second_moment(fam, 2, 3, 0).computed - second_moment(fam, 3, 2, 0).computed) < 1e-9


@pytest.mark.parametrize("k", [-3, -1, 0, 1, 2, 3])
def test_decomposition_recombines(k):
    fam = central_family(101)
    tabs = kl_tables(get_context(101), [abs(k - 1), abs(k), abs(k + 1)])
    d = afe_decomposition(fam, 1, 2, k, tables=tabs)
    assert abs(d.recombined - d.direct) < 1e-8 * (1 + abs(d.direct))
    assert abs(d.direct - second_moment(fam, 1, 2, k).computed) < 1e-9


def test_decomposition_needs_tables():
    with pytest.raises(PreconditionError):
        afe_decomposition(central_family(101), 1, 1, 2, tables={})


def test_b1_at_k1_is_hyperbola_sum():
    fam = central_family(101)
    d = afe_decomposition(fam, 1, 1, 1, tables=kl_tables(get_context(101), [0, 1, 2]))
    assert abs(d.B1 - hyperbola_sum(fam, 1, 1)) < 1e-9


def test_mollified_first(fam):
    ms = build_mollifier(Q, 0.2)
    r0 = mollified_first(fam, ms, 0)
    assert 0.8 <= r0.computed.real / 503 <= 1.2
    for q in (101, 1009, 4001):
        r = mollified_first(central_family(q), build_mollifier(q, 0.2), -1)
        assert abs(r.computed) <= 5 * q / (0.2 * math.log(q))
    one = build_mollifier(Q, 0.2, length=1)
    for k in (-1, 0, 2):
        assert abs(mollified_first(fam, one, k).computed - first_moment(fam, 1, k).computed) < 1e-9


def test_mollified_second_real_nonnegative(fam):
    r = mollified_second(fam, build_mollifier(Q, 0.2), 0)
    assert r.computed.imag == 0 and r.computed.real >= 0


def test_smoothed_moments(fam):
    ms = build_mollifier(Q, 0.2)
    sm = smoothed_moments(fam, ms, BumpSpec(0.1, 0.0, 0.5))
    assert abs(sm.C.computed - sm.C.params["fourier"]) <= 1e-6 * abs(sm.C.computed)
    assert abs(sm.D.computed - sm.D.params["fourier"]) <= 1e-6 * abs(sm.D.computed)
    assert sm.D.params["plateau_sum"] <= sm.D.computed.real <= sm.D.params["arc_sum"]
    full = smoothed_moments(fam, ms, BumpSpec.constant())
    assert full.C.computed == mollified_first(fam, ms, 0).computed
    assert full.D.computed == mollified_second(fam, ms, 0).computed


def test_mollifier_family_mismatch(fam):
    with pytest.raises(PreconditionError):
        mollified_first(fam, build_mollifier(101, 0.2), 0)
