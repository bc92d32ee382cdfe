"""Dirichlet characters modulo a prime, Gauss sums and root-number angles.

Characters are indexed by an exponent ``a`` in ``Z/(q-1)``:

    chi_a(n) = e(a * ind(n) / (q - 1))   for (n, q) = 1,   0 otherwise,

where ``ind`` is the discrete log to the base of the context's primitive
root.  ``chi_a(-1) = (-1)^a``, so even characters are those with ``a`` even,
and for prime ``q`` every ``a != 0`` gives a primitive character.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from sympy import divisors, mobius, totient

from .arith import PrimeContext
from .errors import DomainError, PreconditionError

TWO_PI = 2.0 * np.pi

#: Angles within this distance of 1 are snapped to 0.
THETA_SNAP = 1e-12


def e(x):
    """Additive character ``e(x) = exp(2 pi i x)``."""
    return np.exp(TWO_PI * 1j * np.asarray(x, dtype=float))


@lru_cache(maxsize=32)
def _roots(n: int) -> np.ndarray:
    out = np.exp(TWO_PI * 1j * np.arange(n) / n)
    out.setflags(write=False)
    return out


def unit_roots(q: int) -> np.ndarray:
    """``e(j/(q-1))`` for ``j = 0..q-2``."""
    return _roots(q - 1)


def additive_roots(q: int) -> np.ndarray:
    """``e(t/q)`` for ``t = 0..q-1``."""
    return _roots(q)


def phi_plus(q: int) -> int:
    """Number of even primitive characters modulo the prime ``q``."""
    return max((q - 3) // 2, 0)


def normalize_angle(theta):
    """Reduce to ``[0, 1)``, snapping values within ``THETA_SNAP`` of 1 to 0."""
    t = np.mod(np.asarray(theta, dtype=float), 1.0)
    t = np.where(t > 1.0 - THETA_SNAP, 0.0, t)
    return float(t) if t.ndim == 0 else t


@dataclass(frozen=True)
class Character:
    ctx: PrimeContext
    a: int

    def __post_init__(self):
        object.__setattr__(self, "a", int(self.a) % self.ctx.order)

    @property
    def q(self) -> int:
        return self.ctx.q

    @property
    def delta(self) -> int:
        """Parity bit ``(1 - chi(-1)) / 2``."""
        return self.a % 2

    @property
    def is_primitive(self) -> bool:
        return self.a != 0

    @property
    def is_even(self) -> bool:
        return self.delta == 0

    def conj(self) -> Character:
        return Character(self.ctx, -self.a)

    def __call__(self, n):
        return evaluate(self, n)

    def __repr__(self):
        return f"Character(q={self.q}, a={self.a})"


def enumerate_primitive(ctx: PrimeContext, parity: str | None = None) -> list[Character]:
    """All primitive characters, optionally restricted to ``'even'`` or ``'odd'``."""
    if parity not in (None, "even", "odd"):
        raise PreconditionError(f"parity must be 'even', 'odd' or None, got {parity!r}")
    start, step = {None: (1, 1), "even": (2, 2), "odd": (1, 2)}[parity]
    return [Character(ctx, a) for a in range(start, ctx.order, step)]


def enumerate_even_primitive(ctx: PrimeContext) -> list[Character]:
    return enumerate_primitive(ctx, "even")


def even_primitive_indices(q: int) -> np.ndarray:
    return np.arange(2, q - 1, 2, dtype=np.int64)


def evaluate(chi: Character, n):
    """``chi(n)`` for a scalar or integer array ``n``."""
    ctx = chi.ctx
    r = np.asarray(n, dtype=np.int64) % ctx.q
    unit = r != 0
    expo = (chi.a * ctx.ind[np.where(unit, r, 1)]) % ctx.order
    out = np.where(unit, unit_roots(ctx.q)[expo], 0.0 + 0.0j)
    return complex(out) if out.ndim == 0 else out


def character_values(ctx: PrimeContext, a, n) -> np.ndarray:
    """Matrix ``chi_a(n)`` with rows indexed by ``a`` and columns by ``n``."""
    a = np.atleast_1d(np.asarray(a, dtype=np.int64))
    r = np.atleast_1d(np.asarray(n, dtype=np.int64)) % ctx.q
    unit = r != 0
    expo = (a[:, None] * ctx.ind[np.where(unit, r, 1)][None, :]) % ctx.order
    vals = unit_roots(ctx.q)[expo]
    vals[:, ~unit] = 0.0
    return vals


def character_transform(ctx: PrimeContext, weights) -> np.ndarray:
    """``S[a] = sum_{r=1}^{q-1} weights[r] chi_a(r)`` for every ``a`` at once.

    ``weights`` is indexed by residue (length ``q``; entry 0 is ignored).
    Moving to discrete-log coordinates turns this into one length ``q-1``
    discrete Fourier transform.
    """
    w = np.asarray(weights)
    if w.shape != (ctx.q,):
        raise PreconditionError(f"weights must have length q={ctx.q}, got {w.shape}")
    return ctx.order * np.fft.ifft(w[ctx.powers])


@dataclass(frozen=True)
class GaussData:
    tau: complex
    eps: complex
    theta: float


def gauss_sum_and_angle(chi: Character) -> GaussData:
    """Gauss sum by direct summation, root number ``tau / (i^delta sqrt q)`` and its angle."""
    if not chi.is_primitive:
        raise DomainError("Gauss sum root number requires a primitive character")
    q = chi.q
    t = np.arange(1, q)
    tau = complex(np.sum(evaluate(chi, t) * additive_roots(q)[t]))
    eps = tau / ((1j) ** chi.delta * np.sqrt(q))
    theta = normalize_angle(np.angle(eps) / TWO_PI)
    return GaussData(tau=tau, eps=eps, theta=theta)


def gauss_sums(ctx: PrimeContext) -> np.ndarray:
    """``tau(chi_a)`` for all ``a`` via one transform (entry 0 is the principal sum, -1)."""
    w = np.zeros(ctx.q, dtype=complex)
    w[1:] = additive_roots(ctx.q)[1:]
    return character_transform(ctx, w)


def root_numbers(ctx: PrimeContext, a=None):
    """Root numbers and angles for the characters ``a`` (default: all primitive)."""
    if a is None:
        a = np.arange(1, ctx.order)
    a = np.asarray(a, dtype=np.int64) % ctx.order
    if np.any(a == 0):
        raise DomainError("root number of the principal character is undefined")
    tau = gauss_sums(ctx)[a]
    eps = tau / (np.where(a % 2 == 1, 1j, 1.0) * np.sqrt(ctx.q))
    theta = normalize_angle(np.angle(eps) / TWO_PI)
    return eps, theta


def orthogonality_prediction(q: int, m: int) -> float:
    """Divisor-sum value of ``sum^+ chi(m)`` for ``(m, q) = 1``."""
    total = 0.0
    for w in divisors(q):
        v = q // w
        weight = int(mobius(v)) * int(totient(w))
        total += 0.5 * weight * ((m - 1) % w == 0)
        total += 0.5 * weight * ((m + 1) % w == 0)
    return total


def orthogonality_sum(ctx: PrimeContext, m: int) -> tuple[complex, float]:
    """Return ``(sum over even primitive chi of chi(m), divisor-sum prediction)``."""
    if m % ctx.q == 0:
        raise DomainError(f"m={m} is not coprime to q={ctx.q}")
    a = even_primitive_indices(ctx.q)
    if a.size == 0:
        computed = 0j
    else:
        computed = complex(np.sum(character_values(ctx, a, [m])[:, 0]))
    return computed, orthogonality_prediction(ctx.q, m)
