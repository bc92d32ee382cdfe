"""Non-vanishing counts with the root angle restricted to an arc, and angle statistics."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np
from scipy.stats import kstest

from .central import CentralFamily
from .characters import phi_plus
from .errors import DomainError, PreconditionError

ETA_MAX = Fraction(1, 480)


def arc_length(a: float, b: float) -> float:
    """Length of the half-open arc ``[a, b)``; ``b - a = 1`` is the full circle."""
    mu = b - a
    if not 0 < mu <= 1:
        mu = (b - a) % 1.0
    if mu == 0:
        raise DomainError(f"interval [{a}, {b}) is empty")
    return float(mu)


def in_arc(theta, a: float, b: float) -> np.ndarray:
    return np.mod(np.asarray(theta, dtype=float) - a, 1.0) < arc_length(a, b)


def c_eta(eta: float) -> float:
    """``c(eta) = 1/25 - 96 eta / 5`` on ``0 <= eta < 1/480``."""
    # compare through 480 * eta so the float 1/480 counts as the boundary
    if not (0 <= eta and 480 * eta < 1):
        raise DomainError(f"eta must lie in [0, 1/480), got {eta}")
    return 1 / 25 - 96 * eta / 5


@dataclass(frozen=True)
class NonvanishReport:
    q: int
    a: float
    b: float
    mu: float
    epsilon: float
    threshold: float
    count: int
    family_in_window: int
    proportion: float
    c_eta_bound: float

    CSV_COLUMNS = ("q", "a", "b", "mu", "epsilon", "threshold", "N", "family_in_window",
                   "proportion", "c_eta_bound")

    def row(self) -> list:
        return [self.q, self.a, self.b, self.mu, self.epsilon, self.threshold, self.count,
                self.family_in_window, self.proportion, self.c_eta_bound]


def count_above(family: CentralFamily, interval: tuple[float, float], threshold: float) -> tuple[int, int]:
    """``(#{theta in I, |L| > threshold}, #{theta in I})``."""
    inside = in_arc(family.theta, *interval)
    return int(np.count_nonzero(inside & (np.abs(family.lval) > threshold))), int(np.count_nonzero(inside))


def nonvanishing_count(family: CentralFamily, interval: tuple[float, float], epsilon: float,
                       eta: float = 0.0) -> NonvanishReport:
    """``N(q, I, eps)`` with threshold ``eps mu(I) (log q)^{-1/2}``.

    ``c_eta_bound`` is ``c(eta)``; the asymptotic guarantee for windows of
    length about ``q^{-eta}`` is a proportion of at least ``(1 - eps) c(eta)``.
    """
    if family.parity != "even":
        raise PreconditionError("non-vanishing counts use the even primitive family")
    if epsilon <= 0:
        raise PreconditionError("epsilon must be positive")
    a, b = interval
    mu = arc_length(a, b)
    q = family.q
    threshold = epsilon * mu / math.sqrt(math.log(q))
    N, window = count_above(family, (a, b), threshold)
    pp = phi_plus(q)
    proportion = N / (mu * pp) if pp else 0.0
    return NonvanishReport(q, float(a), float(b), mu, float(epsilon), threshold, N, window,
                           proportion, c_eta(eta))


def shrinking_sweep(family: CentralFamily, eta: float, centers, epsilon: float, C: float = 1.0) -> list[NonvanishReport]:
    """Reports for windows of length ``C q^{-eta}`` centred at each of ``centers``."""
    mu = min(1.0, C * family.q ** (-eta))
    out = []
    for c in centers:
        a = (c - mu / 2) % 1.0
        out.append(nonvanishing_count(family, (a, a + mu), epsilon, eta))
    return out


class Equidistribution(NamedTuple):
    ks_statistic: float
    mean_vector: complex
    counts: np.ndarray


def angle_equidistribution(family: CentralFamily, bins: int = 20) -> Equidistribution:
    """Kolmogorov--Smirnov distance of the angles to uniform, ``mean e(theta)`` and bin counts."""
    if bins < 2:
        raise PreconditionError("bins must be at least 2")
    if len(family) == 0:
        raise DomainError("empty family")
    theta = np.asarray(family.theta)
    ks = float(kstest(theta, "uniform").statistic)
    mean = complex(np.mean(np.exp(2j * np.pi * theta)))
    counts, _ = np.histogram(theta, bins=bins, range=(0.0, 1.0))
    return Equidistribution(ks, mean, counts)
