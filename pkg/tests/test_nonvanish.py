import math

import numpy as np
import pytest

from rootmoments.central import central_family
from rootmoments.errors import DomainError
from rootmoments.nonvanish import angle_equidistribution, c_eta, nonvanishing_count, shrinking_sweep

L_CHI5 = 0.23175094750401576  # mpmath.dirichlet oracle


def test_c_eta():
    assert c_eta(0) == pytest.approx(0.04)
    assert c_eta(1 / 960) == pytest.approx(0.02)
    with pytest.raises(DomainError):
        c_eta(1 / 480)


def test_count_q5():
    r = nonvanishing_count(central_family(5), (0.0, 1.0), 0.01)
    assert r.count == int(L_CHI5 > 0.01 / math.sqrt(math.log(5)))
    assert nonvanishing_count(central_family(5), (0.0, 1.0), 1e6).count == 0


def test_count_bounds_and_partition():
    fam = central_family(1009)
    total = 0
    for i in range(10):
        r = nonvanishing_count(fam, (i / 10, (i + 1) / 10), 0.01)
        assert 0 <= r.count <= r.family_in_window <= 503
        total += r.family_in_window
    assert total == 503
    with pytest.raises(DomainError):
        nonvanishing_count(fam, (0.3, 0.3), 0.01)


def test_wrapping_window():
    fam = central_family(1009)
    r = nonvanishing_count(fam, (0.9, 1.1), 0.01)
    direct = int(np.count_nonzero((fam.theta >= 0.9) | (fam.theta < 0.1)))
    assert r.family_in_window == direct and r.mu == pytest.approx(0.2)


def test_shrinking_sweep():
    reps = shrinking_sweep(central_family(1009), 1 / 960, [0.1, 0.6], 0.01)
    assert all(r.mu == pytest.approx(1009 ** (-1 / 960)) and r.proportion > 0 for r in reps)


def test_equidistribution():
    e = angle_equidistribution(central_family(1009))
    assert abs(e.mean_vector) < 0.2 and e.counts.sum() == 503
    assert 0 <= angle_equidistribution(central_family(5)).ks_statistic <= 1
