"""Hyper-Kloosterman sums, classical Kloosterman sums and related diagnostics.

Normalization follows

    Kl_k(x; q) = q^{-(k-1)/2} sum_{x_1 ... x_k = x (mod q)} e((x_1 + ... + x_k)/q),

so Deligne's bound reads ``|Kl_k(x; q)| <= k`` for prime ``q``.  The
constraint ``x_1 ... x_k = x`` is a k-fold convolution on the unit group;
in discrete-log coordinates that is a cyclic convolution of length ``q-1``,
done with FFTs in :func:`kl_all`.  Values at ``x = 0 (mod q)`` are never
needed and never computed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .arith import PrimeContext, check_odd_prime, get_context
from .central import afe_weights
from .characters import additive_roots
from .errors import DomainError, PreconditionError, ResourceError

#: Cost guard for the brute-force reference ``kl_point``.
MAX_DIRECT_TERMS = 10**8


@dataclass(frozen=True, eq=False)
class KlTable:
    """``values[x-1] = Kl_k(x; q)`` for ``x = 1..q-1``."""

    q: int
    k: int
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.values.setflags(write=False)

    def __call__(self, x):
        r = np.asarray(x, dtype=np.int64) % self.q
        if np.any(r == 0):
            raise DomainError("Kl_k(x; q) is only tabulated for units x")
        out = self.values[r - 1]
        return complex(out) if out.ndim == 0 else out

    def padded(self) -> np.ndarray:
        """Length-``q`` array indexed by residue with 0 in the (unused) slot for ``x = 0``."""
        return np.concatenate([[0j], self.values])

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values)))


def kl_point(k: int, x: int, q: int) -> complex:
    """Brute-force ``Kl_k(x; q)``: sum over ``x_1..x_{k-1}`` with ``x_k`` solved for."""
    q = check_odd_prime(q)
    if k < 1:
        raise PreconditionError("k must be at least 1")
    if x % q == 0:
        raise DomainError("Kl_k(x; q) requires (x, q) = 1")
    if (q - 1) ** (k - 1) > MAX_DIRECT_TERMS:
        raise ResourceError(f"direct Kl_{k} mod {q} needs {(q - 1) ** (k - 1)} terms")
    ctx = get_context(q)
    roots = additive_roots(q)
    if k == 1:
        return complex(roots[x % q])
    units = np.arange(1, q, dtype=np.int64)
    # tuples over x_2..x_{k-1} as (sum, product) pairs, x_1 looped in Python
    s = np.zeros(1, dtype=np.int64)
    p = np.ones(1, dtype=np.int64)
    for _ in range(k - 2):
        s = ((s[:, None] + units[None, :]) % q).ravel()
        p = ((p[:, None] * units[None, :]) % q).ravel()
    total = 0j
    for x1 in range(1, q):
        prod = p * x1 % q
        last = (x % q) * ctx.inv[prod] % q
        total += np.sum(roots[(s + x1 + last) % q])
    return complex(total / q ** ((k - 1) / 2))


def kl_table_direct(k: int, q: int) -> KlTable:
    """Reference table by recursion in residue coordinates.

    ``K_k(x) = sum_t e(t/q) K_{k-1}(x / t)`` with unnormalized ``K``; cost
    ``O(k q^2)``.  Shares no code path with the FFT construction.
    """
    q = check_odd_prime(q)
    if k < 1:
        raise PreconditionError("k must be at least 1")
    if q > 5000:
        raise ResourceError("kl_table_direct is quadratic in q; use kl_all")
    ctx = get_context(q)
    roots = additive_roots(q)
    units = np.arange(1, q, dtype=np.int64)
    K = np.zeros(q, dtype=complex)
    K[1:] = roots[1:]
    # idx[x-1, t-1] = x * t^{-1} mod q
    idx = (units[:, None] * ctx.inv[units][None, :]) % q
    for _ in range(k - 1):
        nxt = np.zeros(q, dtype=complex)
        nxt[1:] = (K[idx] * roots[units][None, :]).sum(axis=1)
        K = nxt
    return KlTable(q, k, K[1:] / q ** ((k - 1) / 2))


def kl_all(k: int, ctx: PrimeContext) -> KlTable:
    """``Kl_k(x; q)`` for every unit ``x`` via an FFT of length ``q-1``."""
    if k < 1:
        raise PreconditionError("k must be at least 1")
    q = ctx.q
    roots = additive_roots(q)
    if k == 1:
        return KlTable(q, 1, roots[1:].copy())
    f = roots[ctx.powers]  # e(g^j / q)
    spec = np.fft.fft(f) / math.sqrt(q)  # unit-modulus except the principal slot
    conv = math.sqrt(q) * np.fft.ifft(spec**k)
    values = np.empty(q - 1, dtype=complex)
    values[ctx.powers - 1] = conv
    return KlTable(q, k, values)


def kl_convolve(table: KlTable, ctx: PrimeContext) -> KlTable:
    """``Kl_{k+1} = q^{-1/2} (Kl_k * e(./q))``, the multiplicative convolution step."""
    q = ctx.q
    a = table.values[ctx.powers - 1]
    b = additive_roots(q)[ctx.powers]
    conv = np.fft.ifft(np.fft.fft(a) * np.fft.fft(b)) / math.sqrt(q)
    values = np.empty(q - 1, dtype=complex)
    values[ctx.powers - 1] = conv
    return KlTable(q, table.k + 1, values)


def kl_signed(table: KlTable, x) -> np.ndarray:
    """``Kl_k(x) + Kl_k(-x)``, the symmetrized value that orthogonality over even characters produces."""
    return table(x) + table(-np.asarray(x, dtype=np.int64))


def classical_kloosterman(a: int, b: int, q: int) -> complex:
    """Unnormalized ``S(a, b; q) = sum_{x unit} e((a x + b / x) / q)``."""
    q = check_odd_prime(q)
    ctx = get_context(q)
    x = np.arange(1, q, dtype=np.int64)
    arg = (a * x + b * ctx.inv[x]) % q
    return complex(np.sum(additive_roots(q)[arg]))


def kloosterman_row(m: int, q: int) -> np.ndarray:
    """``S(a, m; q)`` for ``a = 0..q-1`` with one transform."""
    q = check_odd_prime(q)
    ctx = get_context(q)
    h = np.zeros(q, dtype=complex)
    x = np.arange(1, q, dtype=np.int64)
    h[x] = additive_roots(q)[(m * ctx.inv[x]) % q]
    return q * np.fft.ifft(h)


def incomplete_inverse_sum(m: int, T: int, ctx: PrimeContext) -> complex:
    """``S_m(T) = sum_{n <= T, (n, q) = 1} e(m / n (mod q) / q)`` by direct summation."""
    if m % ctx.q == 0:
        raise DomainError("S_m(T) requires (m, q) = 1")
    if T < 1:
        raise PreconditionError("T must be at least 1")
    q = ctx.q
    n = np.arange(1, int(T) + 1, dtype=np.int64) % q
    n = n[n != 0]
    return complex(np.sum(additive_roots(q)[(m * ctx.inv[n]) % q]))


def completed_inverse_sum(m: int, T: int, ctx: PrimeContext) -> complex:
    """``S_m(T)`` through completion: ``(1/q) sum_a lambda(a/q) S(-a, m; q)``."""
    q = ctx.q
    a = np.arange(q)
    # lambda(a/q) = sum_{n<=T} e(an/q), geometric series for a != 0
    z = additive_roots(q)[a]
    lam = np.empty(q, dtype=complex)
    lam[0] = T
    zr = z[1:]
    lam[1:] = zr * (1 - zr**T) / (1 - zr)
    S = kloosterman_row(m, q)[(-a) % q]
    return complex(np.sum(lam * S) / q)


def inverse_sum_bound(T: int, q: int) -> float:
    """Completion bound ``T/q + 2 sqrt(q) sum_{1 <= a <= q/2} 1/a`` for prime ``q``."""
    harmonic = float(np.sum(1.0 / np.arange(1, q // 2 + 1)))
    return T / q + 2.0 * math.sqrt(q) * harmonic


@dataclass(frozen=True)
class CorrelationReport:
    q: int
    k: int
    c: int
    H: int
    N1: float
    N2: float
    V2: float
    W: float

    @property
    def v2_ratio(self) -> float:
        """``V2 / (log q)^2``."""
        return self.V2 / math.log(self.q) ** 2

    @property
    def w_ratio(self) -> float:
        """``W / (k^2 H q)``."""
        return self.W / (self.k**2 * self.H * self.q)


def lattice_nu(ctx: PrimeContext, N1: float, N2: float) -> np.ndarray:
    """``nu(x) = sum_{n1/n2 = x} (n1 n2)^{-1/2} V(n1/N1) V(n2/N2)`` for ``x = 0..q-1``."""
    q = ctx.q
    A = afe_weights(q, float(N1), 0)
    B = afe_weights(q, float(N2), 0)
    a = A[ctx.powers]
    b = B[ctx.powers]
    # nu(g^j) = sum_i a_{i+j} b_i: circular cross-correlation
    corr = np.fft.ifft(np.fft.fft(a) * np.conj(np.fft.fft(b))).real
    nu = np.empty(q)
    nu[ctx.powers] = corr
    nu[0] = A[0] * np.sum(B[1:])
    return nu


def correlation_diagnostics(ctx: PrimeContext, k: int, c: int, H: int, N1: float, N2: float,
                            table: KlTable | None = None) -> CorrelationReport:
    """The two factors of the Cauchy--Schwarz step for shifted sums.

    ``V2 = sum_x nu(x)^2`` and ``W = sum_x |sum_{1<=h<=H} Kl_k(c(x+h); q)|^2``;
    terms with ``c(x+h) = 0 (mod q)`` are dropped.
    """
    q = ctx.q
    if H < 1 or H > math.sqrt(q):
        raise PreconditionError(f"need 1 <= H <= sqrt(q), got H={H}")
    if c % q == 0:
        raise DomainError("c must be coprime to q")
    if table is None:
        table = kl_all(k, ctx)
    elif table.q != q or table.k != k:
        raise PreconditionError("KlTable does not match (q, k)")
    nu = lattice_nu(ctx, N1, N2)
    V2 = float(np.sum(nu * nu))
    padded = table.padded()
    x = np.arange(q, dtype=np.int64)
    acc = np.zeros(q, dtype=complex)
    for h in range(1, H + 1):
        acc += padded[(c * (x + h)) % q]
    W = float(np.sum(np.abs(acc) ** 2))
    return CorrelationReport(q, k, c, H, float(N1), float(N2), V2, W)


def _smooth_window(x: np.ndarray) -> np.ndarray:
    # C-infinity bump supported on (1/2, 2)
    t = np.log2(np.clip(x, 1e-300, None))
    out = np.zeros_like(t)
    inside = np.abs(t) < 1
    out[inside] = np.exp(1 - 1 / (1 - t[inside] ** 2))
    return out


def smoothed_bilinear_sum(table: KlTable, c: int, N1: float, N2: float) -> tuple[complex, float]:
    """Type I_2 sum ``sum Kl_k(c n1 n2) U(n1/N1) U(n2/N2)`` and its ratio to ``X(1+q/X)^{1/2} q^{-1/8}``.

    ``U`` is a fixed smooth bump on ``[1/2, 2]`` and ``X = N1 N2``; the ratio
    is a diagnostic only, no constant is asserted.
    """
    q = table.q
    n1 = np.arange(max(1, int(N1 / 2)), int(2 * N1) + 1, dtype=np.int64)
    n2 = np.arange(max(1, int(N2 / 2)), int(2 * N2) + 1, dtype=np.int64)
    u1 = _smooth_window(n1 / N1)
    u2 = _smooth_window(n2 / N2)
    padded = table.padded()
    total = 0j
    for a, wa in zip(n1, u1):
        if wa == 0:
            continue
        total += wa * np.sum(padded[(c * a * n2) % q] * u2)
    X = N1 * N2
    return complex(total), abs(total) / (X * math.sqrt(1 + q / X) * q ** (-1 / 8))


def kl_tables(ctx: PrimeContext, orders) -> dict[int, KlTable]:
    return {k: kl_all(k, ctx) for k in sorted(set(orders)) if k >= 1}

