"""Smooth bump functions on R/Z, their Fourier coefficients and derivative norms.

The base ramp is ``s(t) = h(t) / (h(t) + h(1-t))`` with ``h(x) = exp(-1/x)``.
``g(x) = s(2x)`` on ``[0, 1/2]``, reflected about ``1/2``; ``g_beta`` keeps a
plateau of width ``1 - beta`` and compresses ``g`` into the two edges; and
``f_{beta,I}`` rescales ``g_beta`` onto the arc ``I = [a, a + mu)``.

Because ``s(t) + s(1-t) = 1``, the two edges integrate to ``beta/2`` in
normalized coordinates, so ``int f = mu (1 - beta/2)`` exactly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import mpmath
import numpy as np
from scipy.special import expit

from .errors import DomainError, PreconditionError

#: Default threshold standing in for the implied constants of ``<<``.
CONDITION_THRESHOLD = 10.0
DEFAULT_J = 20


def ramp(t):
    """``s(t)``: 0 for ``t <= 0``, 1 for ``t >= 1``, smooth and flat at both ends."""
    t = np.asarray(t, dtype=float)
    inside = (t > 0) & (t < 1)
    tt = np.where(inside, t, 0.5)
    with np.errstate(over="ignore"):
        z = 1.0 / (1.0 - tt) - 1.0 / tt
    out = np.where(inside, expit(z), np.where(t >= 1, 1.0, 0.0))
    return float(out) if out.ndim == 0 else out


def base_g(x):
    """``g`` on ``[0, 1]``: ``s(2x)`` on the left half, mirrored on the right."""
    x = np.asarray(x, dtype=float)
    return ramp(2.0 * np.minimum(x, 1.0 - x))


@dataclass(frozen=True)
class BumpSpec:
    """``f_{beta, I}`` for the arc ``I = [a, b)`` of ``R/Z``.

    ``beta = 0`` is allowed only for the full circle and gives ``f = 1``.
    """

    beta: float
    a: float = 0.0
    b: float = 1.0
    samples: int = 2**16

    def __post_init__(self):
        mu = self.b - self.a
        if not 0 < mu <= 1:
            mu = (self.b - self.a) % 1.0
        if mu == 0:
            raise DomainError("bump interval has zero length")
        object.__setattr__(self, "_mu", float(mu))
        if not 0 <= self.beta <= 1:
            raise PreconditionError(f"beta must lie in [0, 1], got {self.beta}")
        if self.beta == 0 and mu != 1:
            raise PreconditionError("beta = 0 is only defined for the full circle")
        if self.samples < 8 or self.samples & (self.samples - 1):
            raise PreconditionError("samples must be a power of two >= 8")

    @classmethod
    def constant(cls, samples: int = 2**16) -> BumpSpec:
        """``f = 1`` on the whole circle."""
        return cls(0.0, 0.0, 1.0, samples)

    @classmethod
    def centered(cls, beta: float, center: float, mu: float, samples: int = 2**16) -> BumpSpec:
        a = (center - mu / 2) % 1.0
        return cls(beta, a, a + mu, samples)

    @property
    def mu(self) -> float:
        return self._mu

    @property
    def is_constant(self) -> bool:
        return self.beta == 0

    def integral(self) -> float:
        """``int_0^1 f = mu (1 - beta/2)``."""
        return self.mu * (1.0 - self.beta / 2.0)

    def contains(self, x) -> np.ndarray:
        """Membership in the half-open arc ``[a, b)`` mod 1."""
        y = np.mod(np.asarray(x, dtype=float) - self.a, 1.0)
        return y < self.mu

    def inner(self) -> tuple[float, float]:
        """The plateau ``[a + beta mu/2, b - beta mu/2)`` where ``f = 1``."""
        h = self.beta * self.mu / 2
        return self.a + h, self.a + self.mu - h

    def label(self) -> str:
        return f"f[beta={self.beta:g},a={self.a:g},b={self.b:g}]"


def g_beta(y, beta: float):
    """``g_beta`` on ``[0, 1]``."""
    y = np.asarray(y, dtype=float)
    if beta == 0:
        return np.ones_like(y)
    d = np.minimum(y, 1.0 - y)
    return np.where(d < beta / 2, base_g(d / beta), 1.0)


def bump_value(spec: BumpSpec, x):
    """``f_{beta,I}(x)`` for points of ``R/Z``."""
    if spec.is_constant:
        out = np.ones_like(np.asarray(x, dtype=float))
        return float(out) if out.ndim == 0 else out
    y = np.mod(np.asarray(x, dtype=float) - spec.a, 1.0)
    inside = y < spec.mu
    out = np.where(inside, g_beta(np.where(inside, y / spec.mu, 0.0), spec.beta), 0.0)
    return float(out) if out.ndim == 0 else out


def sample_grid(spec: BumpSpec) -> tuple[np.ndarray, np.ndarray]:
    x = np.arange(spec.samples) / spec.samples
    return x, bump_value(spec, x)


@lru_cache(maxsize=32)
def _dft(spec: BumpSpec) -> np.ndarray:
    if spec.is_constant:
        c = np.zeros(spec.samples, dtype=complex)
        c[0] = 1.0
    else:
        c = np.fft.fft(sample_grid(spec)[1]) / spec.samples
    c.setflags(write=False)
    return c


def fourier_coefficients(spec: BumpSpec, K_max: int) -> np.ndarray:
    """``c_k = int_0^1 f(x) e(-kx) dx`` for ``k = -K_max..K_max`` (index ``K_max + k``)."""
    if K_max < 0:
        raise PreconditionError("K_max must be nonnegative")
    if spec.samples < 8 * K_max:
        raise PreconditionError(f"{spec.samples} samples cannot resolve |k| <= {K_max}; need >= 8 K_max")
    c = _dft(spec)
    k = np.arange(-K_max, K_max + 1)
    return c[k % spec.samples].copy()


def fourier_tail_index(spec: BumpSpec, rel: float = 1e-14) -> int:
    """Smallest ``K`` with ``|c_k| <= rel * c_0`` for all ``K < |k| <= samples/8``."""
    c = np.abs(_dft(spec))
    half = spec.samples // 8
    above = np.flatnonzero(np.maximum(c[1 : half + 1], c[::-1][: half]) > rel * c[0])
    return int(above[-1] + 1) if above.size else 0


# ---------------------------------------------------------------- derivative norms

def _series_ramp(t, order: int) -> list:
    """Taylor coefficients of ``s`` at ``0 < t < 1`` up to ``order``, in mpmath."""

    def exp_series(g):
        f = [mpmath.exp(g[0])]
        for n in range(1, len(g)):
            f.append(mpmath.fsum(k * g[k] * f[n - k] for k in range(1, n + 1)) / n)
        return f

    n = range(order + 1)
    left = exp_series([-((-1) ** i) / t ** (i + 1) for i in n])  # exp(-1/x)
    right = exp_series([-1 / (1 - t) ** (i + 1) for i in n])  # exp(-1/(1-x))
    den = [u + v for u, v in zip(left, right)]
    s = []
    for i in n:
        s.append((left[i] - mpmath.fsum(den[j] * s[i - j] for j in range(1, i + 1))) / den[0])
    return s


def ramp_derivative(t: float, J: int):
    """``s^{(J)}(t)`` evaluated through exact Taylor arithmetic (mpmath)."""
    if not 0 < t < 1:
        return mpmath.mpf(0)
    with mpmath.workdps(30 + 3 * J):
        return _series_ramp(mpmath.mpf(t), J)[J] * mpmath.factorial(J)


@lru_cache(maxsize=64)
def ramp_derivative_norm(J: int, grid: int = 400) -> float:
    """``||s^{(J)}||_{L^1[0,1]}`` as the total variation of ``s^{(J-1)}``.

    Sign changes of ``s^{(J)}`` are bracketed on a grid over ``(0, 1/2]``
    and refined by bisection; symmetry ``|s^{(J)}(1-t)| = |s^{(J)}(t)|``
    doubles the half-interval variation.
    """
    if J < 1:
        raise PreconditionError("J must be at least 1")
    with mpmath.workdps(30 + 3 * J):
        def both(t):
            c = _series_ramp(mpmath.mpf(t), J)
            return c[J - 1] * mpmath.factorial(J - 1), c[J] * mpmath.factorial(J)

        ts = [mpmath.mpf(i) / (2 * grid) for i in range(1, grid + 1)]
        vals = [both(t) for t in ts]
        nodes = [mpmath.mpf(0)]  # s^{(J-1)}(0) = 0
        for (t0, (_, d0)), (t1, (_, d1)) in zip(zip(ts, vals), zip(ts[1:], vals[1:])):
            if d0 == 0 or d0 * d1 < 0:
                lo, hi, dlo = t0, t1, d0
                for _ in range(60):
                    mid = (lo + hi) / 2
                    dm = both(mid)[1]
                    if dm * dlo <= 0:
                        hi = mid
                    else:
                        lo, dlo = mid, dm
                nodes.append(both((lo + hi) / 2)[0])
        nodes.append(vals[-1][0])  # value at t = 1/2
        tv = mpmath.fsum(abs(b - a) for a, b in zip(nodes, nodes[1:]))
        return float(2 * tv)


def derivative_norm(spec: BumpSpec, J: int) -> float:
    """``||f^{(J)}||_1`` from the exact edge scaling ``2 (2/(beta mu))^{J-1} ||s^{(J)}||_1``."""
    if J < 0:
        raise PreconditionError("J must be nonnegative")
    if J == 0:
        return spec.integral()
    if spec.is_constant:
        return 0.0
    return 2.0 * (2.0 / (spec.beta * spec.mu)) ** (J - 1) * ramp_derivative_norm(J)


def log_derivative_norm(spec: BumpSpec, J: int) -> float:
    """Natural log of :func:`derivative_norm`, safe when the norm overflows a float."""
    if spec.is_constant or J == 0:
        v = derivative_norm(spec, J)
        return -math.inf if v == 0 else math.log(v)
    return math.log(2.0) + (J - 1) * math.log(2.0 / (spec.beta * spec.mu)) + math.log(ramp_derivative_norm(J))


def spectral_derivative(spec: BumpSpec, J: int, rel: float = 1e-13) -> np.ndarray:
    """``f^{(J)}`` on the sample grid from ``(2 pi i k)^J c_k``.

    Coefficients below ``rel * c_0`` are dropped first; beyond that noise
    floor the multiplier only amplifies roundoff, which limits this route
    to small ``J``.
    """
    c = np.array(_dft(spec))
    c[np.abs(c) < rel * abs(c[0])] = 0.0
    k = np.fft.fftfreq(spec.samples, d=1.0 / spec.samples)
    return np.fft.ifft(c * (2j * np.pi * k) ** J).real * spec.samples


def spectral_derivative_norm(spec: BumpSpec, J: int) -> float:
    return float(np.mean(np.abs(spectral_derivative(spec, J))))


def finite_difference_norm(spec: BumpSpec) -> float:
    """``||f'||_1`` as the discrete total variation on the sample grid."""
    f = sample_grid(spec)[1]
    return float(np.sum(np.abs(np.diff(np.append(f, f[0])))))


# ---------------------------------------------------------------- family conditions

class ConditionCheck(NamedTuple):
    cond1_ratio: float
    cond2_ratio: float
    passed: bool


def family_condition_check(spec: BumpSpec, q: int, alpha: float, J: int = DEFAULT_J,
                           threshold: float = CONDITION_THRESHOLD) -> ConditionCheck:
    """Ratios for the two size conditions on a family of weights at modulus ``q``.

    ``cond1 = ||f^{(J)}||_1 / (q^{1/24 - alpha} |int f|)`` and
    ``cond2 = ||f||_1 / |int f|``.  Ratios are formed in log space, so ``q``
    may be astronomically large; an overflowing ratio is returned as ``inf``.
    """
    if J < 2:
        raise PreconditionError("J must be at least 2")
    I = spec.integral()
    if I == 0:
        raise DomainError("degenerate family: int f = 0")
    log_r1 = log_derivative_norm(spec, J) - (1 / 24 - alpha) * math.log(q) - math.log(abs(I))
    r1 = 0.0 if log_r1 == -math.inf else (math.exp(log_r1) if log_r1 < 700 else math.inf)
    r2 = I / abs(I)  # f >= 0, so ||f||_1 = int f
    return ConditionCheck(r1, r2, r1 <= threshold and r2 <= threshold)


def shrinking_family_threshold(beta: float, C: float, eta: float, alpha: float, J: int = DEFAULT_J,
                               threshold: float = CONDITION_THRESHOLD) -> float:
    """``log10`` of the smallest ``q`` from which ``mu(I_q) = C q^{-eta}`` passes the derivative condition.

    With ``mu = C q^{-eta}`` the ratio is ``K q^{J eta + alpha - 1/24}``; a
    negative exponent is required, otherwise ``inf`` is returned.
    """
    expo = 1 / 24 - alpha - J * eta
    if expo <= 0:
        return math.inf
    logK = (math.log(2.0) + (J - 1) * math.log(2.0 / (beta * C)) + math.log(ramp_derivative_norm(J))
            - math.log(C * (1 - beta / 2)))
    need = (logK - math.log(threshold)) / expo
    return max(need, 0.0) / math.log(10)
