"""Modular arithmetic substrate for a prime modulus.

A :class:`PrimeContext` carries the smallest primitive root ``g`` of ``q``
together with dense discrete-log and inverse tables.  Every character sum
and Kloosterman computation in the package works in these coordinates:
the unit group ``(Z/qZ)^*`` is identified with ``Z/(q-1)`` via ``n = g^ind(n)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from sympy import isprime, primefactors

from .errors import DomainError, PrimalityError, ResourceError

#: Largest modulus for which dense tables are built.  Three int64 arrays of
#: length q are kept, so the default costs about 48 MB at the cap.
MAX_Q = 2_000_000


def check_odd_prime(q: int) -> int:
    q = int(q)
    if q < 3 or not isprime(q):
        raise PrimalityError(f"modulus must be an odd prime, got {q}")
    return q


def find_primitive_root(q: int) -> int:
    """Smallest generator of ``(Z/qZ)^*``."""
    q = check_odd_prime(q)
    cofactors = [(q - 1) // p for p in primefactors(q - 1)]
    for g in range(2, q):
        if all(pow(g, e, q) != 1 for e in cofactors):
            return g
    raise AssertionError("unreachable: every prime has a primitive root")


def mod_inverse(n: int, q: int) -> int:
    if n % q == 0:
        raise DomainError(f"{n} is not invertible modulo {q}")
    return pow(int(n), -1, int(q))


def _power_table(g: int, q: int) -> np.ndarray:
    # g^j mod q for j = 0..q-2, computed in sqrt(q) blocks so the Python loop
    # stays short; products stay below q^2 < 2^63 for q under the cap.
    n = q - 1
    block = max(1, int(np.sqrt(n)))
    base = np.empty(block, dtype=np.int64)
    acc = 1
    for j in range(block):
        base[j] = acc
        acc = acc * g % q
    step = acc  # g^block
    rows = -(-n // block)
    heads = np.empty(rows, dtype=np.int64)
    acc = 1
    for i in range(rows):
        heads[i] = acc
        acc = acc * step % q
    table = (heads[:, None] * base[None, :]) % q
    return table.ravel()[:n]


@dataclass(frozen=True, eq=False)
class PrimeContext:
    """Primitive root, discrete-log and inverse tables for an odd prime ``q``.

    ``ind`` and ``inv`` have length ``q`` and are indexed by residue; slot 0
    holds the sentinel ``-1`` since zero has neither a log nor an inverse.
    ``powers[j] = g^j mod q`` for ``j = 0..q-2``.
    """

    q: int
    g: int
    ind: np.ndarray = field(repr=False)
    inv: np.ndarray = field(repr=False)
    powers: np.ndarray = field(repr=False)

    def __post_init__(self):
        for arr in (self.ind, self.inv, self.powers):
            arr.setflags(write=False)

    @property
    def order(self) -> int:
        """Order ``q - 1`` of the unit group."""
        return self.q - 1

    def dlog(self, n):
        """Discrete log of ``n`` (scalar or array); ``n`` must be a unit."""
        r = np.asarray(n, dtype=np.int64) % self.q
        if np.any(r == 0):
            raise DomainError(f"discrete log undefined for multiples of {self.q}")
        out = self.ind[r]
        return int(out) if out.ndim == 0 else out

    def inverse(self, n):
        r = np.asarray(n, dtype=np.int64) % self.q
        if np.any(r == 0):
            raise DomainError(f"{self.q} divides the argument")
        out = self.inv[r]
        return int(out) if out.ndim == 0 else out


def context_from_tables(q: int, g: int, ind_units: np.ndarray, inv_units: np.ndarray) -> PrimeContext:
    """Assemble a context from the length ``q-1`` tables stored in a cache file."""
    ind = np.empty(q, dtype=np.int64)
    inv = np.empty(q, dtype=np.int64)
    ind[0] = inv[0] = -1
    ind[1:] = ind_units
    inv[1:] = inv_units
    powers = np.empty(q - 1, dtype=np.int64)
    powers[ind[1:]] = np.arange(1, q, dtype=np.int64)
    return PrimeContext(q=q, g=g, ind=ind, inv=inv, powers=powers)


def build_context(q: int, max_q: int = MAX_Q) -> PrimeContext:
    q = check_odd_prime(q)
    if q > max_q:
        raise ResourceError(f"q={q} exceeds the table cap {max_q}")
    g = find_primitive_root(q)
    powers = _power_table(g, q)
    ind = np.full(q, -1, dtype=np.int64)
    ind[powers] = np.arange(q - 1, dtype=np.int64)
    inv = np.full(q, -1, dtype=np.int64)
    # g^{-j} = g^{(q-1-j) mod (q-1)}
    inv[powers] = powers[(-np.arange(q - 1)) % (q - 1)]
    return PrimeContext(q=q, g=g, ind=ind, inv=inv, powers=powers)


@lru_cache(maxsize=16)
def get_context(q: int) -> PrimeContext:
    """Memoized :func:`build_context`; contexts are immutable so sharing is safe."""
    return build_context(q)
