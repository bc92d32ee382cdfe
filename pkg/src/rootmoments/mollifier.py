"""Iwaniec--Sarnak mollifier with exact rational coefficients.

    M(chi) = sum_{m <= M} x_m chi(m) m^{-1/2},
    x_m    = mu(m) m / phi(m) * (1/G) * sum_{l <= M/m, (l, mq) = 1} mu(l)^2 / phi(l),
    G      = sum_{k <= M, (k, q) = 1} mu(k)^2 / phi(k).

All sums of ``mu^2/phi`` are carried as integers over the common denominator
``D = lcm{phi(l)}``, so exact arithmetic costs one big-integer addition per
term instead of a ``Fraction`` normalization.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple, Sequence

import numpy as np
from sympy import factorint

from .arith import PrimeContext, check_odd_prime
from .characters import Character, character_transform
from .errors import ConsistencyError, PreconditionError

#: Configuration cap on the mollifier length.
MAX_LENGTH = 10**6


# ---------------------------------------------------------------- sieve

@dataclass(frozen=True, eq=False)
class SieveTables:
    """``mu``, ``phi``, ``tau`` and the primes up to ``N`` (index 0 unused)."""

    N: int
    mu: np.ndarray = field(repr=False)
    phi: np.ndarray = field(repr=False)
    tau: np.ndarray = field(repr=False)
    primes: np.ndarray = field(repr=False)

    @property
    def squarefree(self) -> np.ndarray:
        return self.mu != 0


def prime_sieve(N: int) -> np.ndarray:
    """Primes ``<= N`` by the sieve of Eratosthenes."""
    if N < 2:
        return np.zeros(0, dtype=np.int64)
    is_p = np.ones(N + 1, dtype=bool)
    is_p[:2] = False
    for p in range(2, math.isqrt(N) + 1):
        if is_p[p]:
            is_p[p * p :: p] = False
    return np.flatnonzero(is_p).astype(np.int64)


@lru_cache(maxsize=8)
def arithmetic_sieve(N: int) -> SieveTables:
    if N < 1:
        raise PreconditionError("sieve length must be positive")
    primes = prime_sieve(N)
    mu = np.ones(N + 1, dtype=np.int64)
    phi = np.arange(N + 1, dtype=np.int64)
    tau = np.ones(N + 1, dtype=np.int64)
    mu[0] = phi[0] = tau[0] = 0
    for p in primes.tolist():
        idx = np.arange(p, N + 1, p, dtype=np.int64)
        mu[idx] *= -1
        phi[idx] -= phi[idx] // p
        # p-adic valuation of the multiples of p
        val = np.ones(idx.size, dtype=np.int64)
        rest = idx // p
        hit = rest % p == 0
        while hit.any():
            val += hit
            rest = np.where(hit, rest // p, rest)
            hit &= rest % p == 0
        tau[idx] *= val + 1
        if p * p <= N:
            mu[p * p :: p * p] = 0
    for arr in (mu, phi, tau, primes):
        arr.setflags(write=False)
    return SieveTables(N, mu, phi, tau, primes)


# ---------------------------------------------------------------- constant c

@lru_cache(maxsize=4)
def mollifier_constant(N: int = 10**7) -> tuple[float, float]:
    """``c = gamma + sum_p log p / (p (p-1))`` and an upper bound on the truncation error.

    The tail over ``p > N`` is dominated by the same sum over all integers,
    bounded in turn by ``int_{N-1}^inf log t / t^2 dt``.
    """
    p = prime_sieve(N).astype(float)
    s = math.fsum(np.log(p) / (p * (p - 1)))
    tail = (math.log(N - 1) + 1) / (N - 1)
    return float(np.euler_gamma) + s, tail


# ---------------------------------------------------------------- exact sums

def _length(q: int, alpha: float) -> int:
    # guard against q^alpha landing a hair below an integer
    return math.floor(q**alpha * (1 + 1e-12))


class _Harmonic:
    """``mu(l)^2 / phi(l)`` on ``l <= N`` coprime to ``q`` as integers over ``D``."""

    def __init__(self, N: int, q: int):
        t = arithmetic_sieve(max(N, 1))
        l = np.arange(1, N + 1, dtype=np.int64)
        keep = (t.mu[1:] != 0) & (l % q != 0)
        self.l = l[keep]
        phis = t.phi[self.l].tolist()
        self.D = math.lcm(*phis) if phis else 1
        self.num = [self.D // f for f in phis]

    def total(self, upto: int, coprime_to: int = 1) -> int:
        n = int(np.searchsorted(self.l, upto, side="right"))
        if coprime_to == 1:
            return sum(self.num[:n])
        mask = np.gcd(self.l[:n], coprime_to) == 1
        return sum(v for v, ok in zip(self.num[:n], mask.tolist()) if ok)


def g_direct(q: int, M: int) -> Fraction:
    """Exact ``G = sum_{k <= M, (k, q) = 1} mu(k)^2 / phi(k)``."""
    h = _Harmonic(M, q)
    return Fraction(h.total(M), h.D)


class GCheck(NamedTuple):
    direct: Fraction
    predicted: float
    residual_ratio: float


def theta_q(q: int) -> int:
    """``2^omega(q)``."""
    return 2 ** len(factorint(q))


def g_predicted(q: int, M: float) -> float:
    c, _ = mollifier_constant()
    fac = factorint(q)
    phi_q = q * math.prod(1 - 1 / p for p in fac)
    return phi_q / q * (math.log(M) + c + sum(math.log(p) / p for p in fac))


def g_asymptotic_check(q: int, M: int) -> GCheck:
    """Exact ``G`` against its logarithmic asymptotic; ratio is ``|diff| sqrt(M) / theta(q)``."""
    q = check_odd_prime(q)
    if M < 2:
        raise PreconditionError("asymptotic check needs M >= 2")
    direct = g_direct(q, M)
    pred = g_predicted(q, M)
    ratio = abs(float(direct) - pred) * math.sqrt(M) / theta_q(q)
    return GCheck(direct, pred, ratio)


# ---------------------------------------------------------------- mollifier

@dataclass(frozen=True, eq=False)
class MollifierSet:
    """Exact coefficients ``x_m`` on squarefree ``m <= M`` coprime to ``q``."""

    q: int
    alpha: float
    M: int
    G: Fraction
    coeffs: dict = field(repr=False)

    def coeff(self, m: int) -> Fraction:
        return self.coeffs.get(int(m), Fraction(0))

    def support(self) -> np.ndarray:
        return np.array(sorted(self.coeffs), dtype=np.int64)

    def as_array(self) -> np.ndarray:
        """Float coefficients indexed ``0..M`` (entry 0 is zero)."""
        out = np.zeros(self.M + 1)
        for m, x in self.coeffs.items():
            out[m] = float(x)
        out.setflags(write=False)
        return out

    def reciprocal_sum(self) -> Fraction:
        """``sum_m x_m / m``; equals ``1/G`` exactly."""
        return sum((x / m for m, x in self.coeffs.items()), Fraction(0))

    def to_json(self) -> dict:
        first = sorted(self.coeffs)[:100]
        return {
            "q": self.q,
            "alpha": self.alpha,
            "M": self.M,
            "G": [self.G.numerator, self.G.denominator],
            "coeffs": [[m, self.coeffs[m].numerator, self.coeffs[m].denominator] for m in first],
        }


def build_mollifier(q: int, alpha: float, length: int | None = None) -> MollifierSet:
    """Exact mollifier of length ``M = floor(q^alpha)`` (or ``length`` when given)."""
    q = check_odd_prime(q)
    if not 0 < alpha < 0.5:
        raise PreconditionError(f"need 0 < alpha < 1/2, got {alpha}")
    M = _length(q, alpha) if length is None else int(length)
    if M < 1:
        raise PreconditionError("mollifier length M must be at least 1")
    if M > MAX_LENGTH:
        raise PreconditionError(f"M={M} exceeds the configured cap {MAX_LENGTH}")
    return _build(q, float(alpha), M)


@lru_cache(maxsize=32)
def _build(q: int, alpha: float, M: int) -> MollifierSet:
    t = arithmetic_sieve(M)
    h = _Harmonic(M, q)
    G_num = h.total(M)
    coeffs = {}
    for m in h.l.tolist():
        inner = h.total(M // m, coprime_to=m)
        coeffs[m] = Fraction(int(t.mu[m]) * m * inner, int(t.phi[m]) * G_num)
    if coeffs.get(1) != 1:
        raise ConsistencyError("x_1 != 1")
    if any(abs(x) > 1 for x in coeffs.values()):
        raise ConsistencyError("|x_m| > 1 for some m")
    return MollifierSet(q, alpha, M, Fraction(G_num, h.D), coeffs)


def mollifier_weights(mset: MollifierSet) -> np.ndarray:
    """Residue-folded ``w[r] = sum_{m = r (mod q)} x_m m^{-1/2}``."""
    m = mset.support()
    x = mset.as_array()[m]
    return np.bincount(m % mset.q, weights=x / np.sqrt(m), minlength=mset.q)


def mollifier_value(mset: MollifierSet, chi: Character) -> complex:
    if chi.q != mset.q:
        raise PreconditionError(f"character modulus {chi.q} != mollifier modulus {mset.q}")
    m = mset.support()
    x = mset.as_array()[m]
    return complex(np.sum(x * chi(m) / np.sqrt(m)))


def mollifier_values(mset: MollifierSet, ctx: PrimeContext, a=None) -> np.ndarray:
    """``M(chi_a)`` for all ``a`` (or the selected ones) with one transform."""
    if ctx.q != mset.q:
        raise PreconditionError(f"context modulus {ctx.q} != mollifier modulus {mset.q}")
    vals = character_transform(ctx, mollifier_weights(mset))
    return vals if a is None else vals[np.asarray(a, dtype=np.int64) % ctx.order]


# ---------------------------------------------------------------- unitary convolution

def _named_value(name: str, p_exps: dict, q: int) -> Fraction:
    if any(p == q for p in p_exps):
        return Fraction(0)
    squarefree = all(e == 1 for e in p_exps.values())
    phi = math.prod((p - 1) * p ** (e - 1) for p, e in p_exps.items())
    if name == "mu^2/phi":
        return Fraction(1, phi) if squarefree else Fraction(0)
    if not squarefree:
        return Fraction(0)
    mu = (-1) ** len(p_exps)
    if name == "mu/phi":
        return Fraction(mu, phi)
    if name == "mu*tau/phi":
        return Fraction(mu * 2 ** len(p_exps), phi)
    raise PreconditionError(f"unsupported multiplicative spec {name!r}")


UNITARY_SPECS = ("mu/phi", "mu*tau/phi", "mu^2/phi")


def unitary_convolution(specs: Sequence[str], n: int, q: int) -> Fraction:
    """``(f_1 *_1 f_2 *_1 ... )(n)`` over factorizations into pairwise coprime parts.

    Each ``f_i`` is one of :data:`UNITARY_SPECS`, supported on ``(n, q) = 1``.
    """
    for s in specs:
        if s not in UNITARY_SPECS:
            raise PreconditionError(f"unsupported multiplicative spec {s!r}")
    if not specs:
        raise PreconditionError("at least one factor required")
    if n < 1:
        raise PreconditionError("n must be positive")
    comps = list(factorint(int(n)).items())
    return _unitary(tuple(specs), tuple(comps), q)


def _unitary(specs, comps, q) -> Fraction:
    if len(specs) == 1:
        return _named_value(specs[0], dict(comps), q)
    total = Fraction(0)
    k = len(comps)
    for mask in range(1 << k):
        head = {p: e for i, (p, e) in enumerate(comps) if mask >> i & 1}
        rest = tuple(c for i, c in enumerate(comps) if not mask >> i & 1)
        v = _named_value(specs[0], head, q)
        if v:
            total += v * _unitary(specs[1:], rest, q)
    return total


# ---------------------------------------------------------------- a(n)

def a_values(M: int) -> np.ndarray:
    """Multiplicative ``a`` on squarefree ``n <= M`` with ``a(p) = (sqrt p + 3)/(p - 1)``."""
    a = np.ones(M + 1)
    a[0] = 0.0
    for p in prime_sieve(M).tolist():
        a[p::p] *= (math.sqrt(p) + 3) / (p - 1)
        a[p * p :: p * p] = 0.0
    return a


def a_partial_sum(M: int) -> tuple[float, float]:
    """``sum_{n <= M} a(n)`` and its ratio to ``sqrt(M)``."""
    if M < 1:
        raise PreconditionError("M must be at least 1")
    s = math.fsum(a_values(M))
    return s, s / math.sqrt(M)
