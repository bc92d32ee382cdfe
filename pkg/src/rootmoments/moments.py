"""Weighted, mollified and smoothed moments over the even primitive family.

All sums run over the characters of a :class:`~rootmoments.central.CentralFamily`
in ascending index order and are reduced with ``math.fsum`` on the real and
imaginary parts, so results do not depend on chunking or worker count.

For prime ``q`` the even-family orthogonality relation, combined with the
Gauss-sum expansion of ``eps(chi)^j``, gives for every unit ``y``

    sum^+ eps(chi)^j chi(y) = phi(q)/(2 sqrt q) * Kl_|j|(+-y^{-sgn j}) - (-1)^j q^{-|j|/2},

with ``Kl_0(x) = sqrt(q) [x = 1]``.  :func:`afe_decomposition` uses it to
split the second moment into the four Kloosterman-weighted sums plus an
explicit remainder, so the recombination is exact up to AFE truncation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

import numpy as np
from scipy.special import digamma

from .arith import PrimeContext, get_context
from .bumps import BumpSpec, bump_value, fourier_coefficients, fourier_tail_index
from .central import CentralFamily, afe_weights
from .characters import character_transform, character_values, phi_plus
from .errors import ConsistencyError, ConvergenceError, DomainError, PreconditionError
from .kloosterman import KlTable
from .mollifier import MollifierSet, mollifier_values

#: Relative agreement demanded between the two evaluation paths.
DUAL_PATH_RTOL = 1e-6
#: Relative size of the last Fourier term tolerated by the smoothed moments.
FOURIER_TAIL_RTOL = 1e-8

REPORT_COLUMNS = (
    "q", "kind", "params", "computed_re", "computed_im", "predicted_re", "predicted_im",
    "residual_re", "residual_im", "normalizer", "envelope", "envelope_value", "fitted_constant",
)


@dataclass(frozen=True, eq=False)
class MomentReport:
    """One moment with its predicted main term and the recorded error envelope.

    ``fitted_constant = |residual| / envelope_value`` is the implied constant
    the data would need; no absolute value for it is asserted.
    """

    q: int
    kind: str
    params: dict = field(repr=False)
    computed: complex
    predicted_main: complex
    normalizer: float
    envelope: str = ""
    envelope_value: float = math.nan

    @property
    def residual(self) -> complex:
        return self.computed - self.predicted_main

    @property
    def fitted_constant(self) -> float:
        return abs(self.residual) / self.envelope_value

    @property
    def ratio(self) -> float:
        """``|computed / predicted_main|`` (``nan`` when no main term is predicted)."""
        p = self.predicted_main
        return abs(self.computed / p) if p != 0 else math.nan

    def row(self) -> list:
        params = ";".join(f"{k}={v}" for k, v in sorted(self.params.items()))
        c, p, r = self.computed, self.predicted_main, self.residual
        return [self.q, self.kind, params, c.real, c.imag, p.real, p.imag, r.real, r.imag,
                self.normalizer, self.envelope, self.envelope_value, self.fitted_constant]


def csum(z) -> complex:
    """Compensated, order-fixed sum of a complex array."""
    z = np.asarray(z, dtype=complex).ravel()
    return complex(math.fsum(z.real), math.fsum(z.imag))


def _ctx(family: CentralFamily) -> PrimeContext:
    if family.parity != "even":
        raise PreconditionError("moments are defined over the even primitive family")
    return get_context(family.q)


def _check_unit(q: int, *ms: int):
    for m in ms:
        if m % q == 0:
            raise DomainError(f"q={q} divides {m}")


def _eps_power(family: CentralFamily, k: int) -> np.ndarray:
    return family.eps**k if k >= 0 else np.conj(family.eps) ** (-k)


def _chi(family: CentralFamily, m) -> np.ndarray:
    """``chi_a(m)`` with rows ordered as the family and one column per ``m``."""
    return character_values(_ctx(family), family.a, np.atleast_1d(m))


# divisor count tau(q); omega(q) = 1 for the prime moduli handled here
TAU_Q = 2


# ---------------------------------------------------------------- first moment

def first_moment(family: CentralFamily, m: int, k: int) -> MomentReport:
    """``A(m, k) = sum^+ chi(m) eps^k L(1/2, chi)`` by direct summation."""
    q = family.q
    _check_unit(q, m)
    computed = csum(_chi(family, m)[:, 0] * _eps_power(family, k) * family.lval)
    pp = phi_plus(q)
    if k == 0:
        pred = float(pp) if m == 1 else 0.0
        env, ev = "tau(q) sqrt(m q)", TAU_Q * math.sqrt(m * q)
    elif k == -1:
        pred = pp / math.sqrt(m)
        env, ev = "tau(q) sqrt(q)", TAU_Q * math.sqrt(q)
    else:
        pred = 0.0
        env, ev = "|k|^omega(q) tau(q) q^(3/4)", abs(k) * TAU_Q * q**0.75
    return MomentReport(q, "first", {"m": m, "k": k}, computed, complex(pred), float(pp), env, ev)


def default_first_X(q: int, k: int) -> float:
    """Balancing choice: ``q^{1/2}`` for ``k = 0``, ``q^{-1/2}`` for ``k = -1``, else 1."""
    return math.sqrt(q) if k == 0 else (1 / math.sqrt(q) if k == -1 else 1.0)


def first_moment_split(family: CentralFamily, m: int, k: int, X: float | None = None) -> tuple[complex, complex]:
    """``(A_1(m,k), A_2(m,k))``: the two AFE halves with ``V(n/(X sqrt q))`` and ``V(nX/sqrt q)``."""
    q = family.q
    _check_unit(q, m)
    ctx = _ctx(family)
    X = default_first_X(q, k) if X is None else X
    rq = math.sqrt(q)
    T1 = character_transform(ctx, afe_weights(q, X * rq, 0))
    T2 = character_transform(ctx, afe_weights(q, rq / X, 0))
    c = _chi(family, m)[:, 0]
    A1 = csum(c * _eps_power(family, k) * T1[family.a])
    A2 = csum(c * _eps_power(family, k + 1) * T2[(-family.a) % ctx.order])
    return A1, A2


# ---------------------------------------------------------------- second moment

def log_L(q: int) -> float:
    """``log L = 1/2 log(q/pi) + 1/2 psi(1/4) + gamma + eta(q)`` with ``eta(q) = log q/(q-1)``."""
    return 0.5 * math.log(q / math.pi) + 0.5 * float(digamma(0.25)) + float(np.euler_gamma) + math.log(q) / (q - 1)


def second_moment(family: CentralFamily, m1: int, m2: int, k: int) -> MomentReport:
    """``B(m1, m2, k) = sum^+ chi(m1) conj(chi(m2)) eps^k |L(1/2, chi)|^2``."""
    q = family.q
    _check_unit(q, m1, m2)
    c = _chi(family, [m1, m2])
    w = c[:, 0] * np.conj(c[:, 1]) * _eps_power(family, k) * np.abs(family.lval) ** 2
    computed = csum(w)
    pp = phi_plus(q)
    if k == 0:
        pred = pp * (q - 1) / (q * math.sqrt(m1 * m2)) * (2 * log_L(q) - math.log(m1 * m2))
        env, ev = "sqrt(q) (assumed)", math.sqrt(q)
    elif abs(k) == 1:
        pred = 0.0
        env, ev = "q", float(q)
    else:
        pred = 0.0
        env, ev = "|k|^18 q^(23/24)", abs(k) ** 18 * q ** (23 / 24)
    return MomentReport(q, "second", {"m1": m1, "m2": m2, "k": k}, computed, complex(pred), float(pp), env, ev)


def second_moment_matrix(family: CentralFamily, ms, k: int) -> np.ndarray:
    """``B(m_i, m_j, k)`` for all pairs of ``ms`` (one matrix product)."""
    c = _chi(family, ms)
    w = _eps_power(family, k) * np.abs(family.lval) ** 2
    return c.T @ (w[:, None] * np.conj(c))


# ---------------------------------------------------------------- AFE decomposition

class AfeDecomposition(NamedTuple):
    B1: complex
    B2: complex
    B3: complex
    B4: complex
    remainder: complex
    recombined: complex
    direct: complex
    X: float


def _multiplicative_conv(ctx: PrimeContext, U1: np.ndarray, U2: np.ndarray) -> np.ndarray:
    """``conv[x] = sum_{s1 s2 = x} U1[s1] U2[s2]`` over units, indexed by residue."""
    f = np.fft.ifft(np.fft.fft(U1[ctx.powers]) * np.fft.fft(U2[ctx.powers]))
    out = np.zeros(ctx.q, dtype=complex)
    out[ctx.powers] = f
    return out


def _sym_kl(ctx: PrimeContext, j: int, tables: dict) -> np.ndarray:
    """``Kl_|j|(y) + Kl_|j|(-y)`` indexed by residue ``y`` (entry 0 unused)."""
    q = ctx.q
    out = np.zeros(q, dtype=complex)
    if j == 0:
        out[1] = out[q - 1] = math.sqrt(q)
        return out
    t = tables.get(abs(j))
    if t is None or t.q != q:
        raise PreconditionError(f"KlTable of order {abs(j)} mod {q} missing; precompute with kloosterman.kl_all")
    y = np.arange(1, q)
    out[1:] = t(y) + t(q - y)
    return out


def _kl_term(ctx: PrimeContext, W1, W2, e1: int, e2: int, c: int, j: int, tables: dict) -> tuple[complex, complex]:
    """Prefactored Kloosterman sum for one piece and its orthogonality remainder.

    The piece is ``phi/(2 sqrt q) sum W1[r1] W2[r2] Kl_|j|(+-(c r1^e1 r2^e2)^s)``
    with ``s = sgn j``; the remainder is ``-(-1)^j q^{-|j|/2} sum W1 sum W2``.
    """
    q = ctx.q
    s = 1 if j >= 0 else -1
    U1 = np.zeros(q)
    U2 = np.zeros(q)
    r = np.arange(1, q)
    U1[r if e1 * s == 1 else ctx.inv[r]] = W1[1:]
    U2[r if e2 * s == 1 else ctx.inv[r]] = W2[1:]
    conv = _multiplicative_conv(ctx, U1, U2)
    cs = c if s == 1 else int(ctx.inv[c])
    K = _sym_kl(ctx, j, tables)
    x = np.arange(1, q)
    piece = (q - 1) / (2 * math.sqrt(q)) * csum(conv[x] * K[(cs * x) % q])
    rem = -((-1) ** (j % 2)) * q ** (-abs(j) / 2) * math.fsum(W1[1:]) * math.fsum(W2[1:])
    return piece, rem


def afe_decomposition(family: CentralFamily, m1: int, m2: int, k: int, theta_exp: float = 1 / 12,
                      tables: dict[int, KlTable] | None = None) -> AfeDecomposition:
    """Split ``B(m1, m2, k)`` into the four Kloosterman-weighted pieces.

    With ``X = q^theta_exp``, ``a_n = n^{-1/2} V(nX/sqrt q)`` and
    ``b_n = n^{-1/2} V(n/(X sqrt q))``:

    * ``B1``: ``a a`` weights, ``Kl_{k-1}(+- conj(m1) m2 conj(n1 n2))``
    * ``B2``: ``a b`` weights, ``Kl_k(+- conj(m1) m2 conj(n1) n2)``
    * ``B3``: ``b a`` weights, ``Kl_k(+- conj(m1) m2 n1 conj(n2))``
    * ``B4``: ``b b`` weights, ``Kl_{k+1}(+- conj(m1) m2 n1 n2)``

    ``tables`` maps each needed order ``|k-1|, |k|, |k+1|`` (except 0) to
    its :class:`KlTable`.
    """
    q = family.q
    _check_unit(q, m1, m2)
    ctx = _ctx(family)
    tables = tables or {}
    X = q**theta_exp
    rq = math.sqrt(q)
    A = afe_weights(q, rq / X, 0)
    B = afe_weights(q, rq * X, 0)
    c = (int(ctx.inv[m1 % q]) * m2) % q
    pieces = [
        _kl_term(ctx, A, A, -1, -1, c, k - 1, tables),
        _kl_term(ctx, A, B, -1, 1, c, k, tables),
        _kl_term(ctx, B, A, 1, -1, c, k, tables),
        _kl_term(ctx, B, B, 1, 1, c, k + 1, tables),
    ]
    Bs = [p for p, _ in pieces]
    rem = sum(r for _, r in pieces)
    recombined = complex(math.fsum(b.real for b in Bs) + rem, math.fsum(b.imag for b in Bs))
    direct = second_moment(family, m1, m2, k).computed
    return AfeDecomposition(*Bs, complex(rem), recombined, direct, X)


def hyperbola_sum(family: CentralFamily, m1: int, m2: int, theta_exp: float = 1 / 12) -> complex:
    """``phi(q)/2 sum_{m1 n1 n2 = +-m2 (mod q)} a_{n1} a_{n2}``, the degenerate ``k = 1`` piece."""
    q = family.q
    _check_unit(q, m1, m2)
    ctx = _ctx(family)
    A = afe_weights(q, math.sqrt(q) / q**theta_exp, 0)
    U = np.zeros(q)
    U[1:] = A[1:]
    conv = _multiplicative_conv(ctx, U, U)
    target = (int(ctx.inv[m1 % q]) * m2) % q
    return complex((q - 1) / 2 * (conv[target] + conv[q - target]))


# ---------------------------------------------------------------- mollified moments

def _mollifier_on_family(family: CentralFamily, mset: MollifierSet) -> np.ndarray:
    if mset.q != family.q:
        raise PreconditionError(f"mollifier built for q={mset.q}, family has q={family.q}")
    return mollifier_values(mset, _ctx(family), family.a)


def _check_paths(a: complex, b: complex, scale: float, what: str):
    if abs(a - b) > DUAL_PATH_RTOL * max(scale, 1e-300):
        raise ConsistencyError(f"{what}: paths disagree, {a} vs {b} (scale {scale:.3g})")


def _effective_alpha(mset: MollifierSet) -> float:
    return math.log(mset.M) / math.log(mset.q) if mset.M > 1 else 0.0


def mollified_first(family: CentralFamily, mset: MollifierSet, k: int) -> MomentReport:
    """``C(k) = sum^+ eps^k M(chi) L(1/2, chi)``, checked against ``sum_m x_m m^{-1/2} A(m, k)``."""
    q = family.q
    Mv = _mollifier_on_family(family, mset)
    terms = _eps_power(family, k) * Mv * family.lval
    direct = csum(terms)
    ms = mset.support()
    A = _chi(family, ms).T @ (_eps_power(family, k) * family.lval)
    x = mset.as_array()[ms]
    via_coeffs = csum(x / np.sqrt(ms) * A)
    _check_paths(direct, via_coeffs, float(np.sum(np.abs(terms))), f"mollified first moment k={k}")
    pp = phi_plus(q)
    alpha = mset.alpha
    params = {"k": k, "alpha": alpha, "M": mset.M, "alpha_eff": round(_effective_alpha(mset), 12)}
    if k == 0:
        pred, env, ev = float(pp), "tau(q) q^(1/2+alpha)", TAU_Q * q ** (0.5 + alpha)
    elif k == -1:
        params["secondary_main"] = pp * float(Fraction(1) / mset.G)
        pred, env, ev = 0.0, "q/(alpha log q)", q / (alpha * math.log(q))
    else:
        pred, env, ev = 0.0, "|k| tau(q) q^(3/4+alpha/2)", abs(k) * TAU_Q * q ** (0.75 + alpha / 2)
    return MomentReport(q, "mollified-first", params, direct, complex(pred), float(pp), env, ev)


def mollified_second(family: CentralFamily, mset: MollifierSet, k: int) -> MomentReport:
    """``D(k) = sum^+ eps^k |M(chi) L(1/2, chi)|^2``, checked against ``sum x x B(m1, m2, k)``."""
    q = family.q
    Mv = _mollifier_on_family(family, mset)
    mag = np.abs(Mv * family.lval) ** 2
    terms = _eps_power(family, k) * mag
    direct = csum(terms)
    ms = mset.support()
    Bm = second_moment_matrix(family, ms, k)
    y = mset.as_array()[ms] / np.sqrt(ms)
    via_coeffs = csum(np.outer(y, y) * Bm)
    _check_paths(direct, via_coeffs, float(np.sum(mag)), f"mollified second moment k={k}")
    if k == 0:
        direct = complex(direct.real, 0.0)
    pp = phi_plus(q)
    alpha = mset.alpha
    lq = math.log(q)
    params = {"k": k, "alpha": alpha, "M": mset.M, "alpha_eff": round(_effective_alpha(mset), 12)}
    if k == 0:
        pred = (1 + 1 / alpha) * pp
        env, ev = "phi+ loglog q/(alpha log q)", pp * math.log(lq) / (alpha * lq)
    elif abs(k) == 1:
        pred, env, ev = 0.0, "phi+/(alpha log q)", pp / (alpha * lq)
    else:
        pred, env, ev = 0.0, "|k|^18 q^(23/24+alpha)", abs(k) ** 18 * q ** (23 / 24 + alpha)
    return MomentReport(q, "mollified-second", params, direct, complex(pred), float(pp), env, ev)


# ---------------------------------------------------------------- smoothed moments

def _twisted_sums(theta: np.ndarray, w: np.ndarray, K: int, block: int = 256) -> np.ndarray:
    """``S[K + k] = sum_chi w_chi e(k theta_chi)`` for ``|k| <= K``, compensated per ``k``."""
    ks = np.arange(-K, K + 1)
    out = np.empty(ks.size, dtype=complex)
    for i in range(0, ks.size, block):
        kb = ks[i : i + block]
        ph = np.exp(2j * np.pi * np.outer(theta, kb))
        prod = w[:, None] * ph
        out[i : i + block] = [csum(col) for col in prod.T]
    return out


class SmoothedMoments(NamedTuple):
    C: MomentReport
    D: MomentReport


def smoothed_moments(family: CentralFamily, mset: MollifierSet, bump: BumpSpec,
                     K_max: int | None = None) -> SmoothedMoments:
    """``C = sum^+ f(theta) M L`` and ``D = sum^+ f(theta) |M L|^2``, direct and Fourier paths.

    The Fourier path is ``sum_{|k| <= K_max} c_k C(k)`` with twisted moments
    ``C(k) = sum^+ eps^k (...)``, using ``eps(chi) = e(theta_chi)``.
    """
    q = family.q
    Mv = _mollifier_on_family(family, mset)
    ML = Mv * family.lval
    mag = np.abs(ML) ** 2
    fvals = bump_value(bump, family.theta)
    C_direct = csum(fvals * ML)
    D_direct = csum(fvals * mag).real

    if bump.is_constant:
        K = 0
    else:
        K = fourier_tail_index(bump) if K_max is None else int(K_max)
    c = fourier_coefficients(bump, K)
    eps_theta = np.asarray(family.theta)
    TC = _twisted_sums(eps_theta, ML, K)
    TD = _twisted_sums(eps_theta, mag.astype(complex), K)
    C_fourier = csum(c * TC)
    D_fourier = csum(c * TD)
    if K > 0:
        for name, T, tot in (("C", TC, C_fourier), ("D", TD, D_fourier)):
            last = max(abs(c[0] * T[0]), abs(c[-1] * T[-1]))
            if last > FOURIER_TAIL_RTOL * abs(tot):
                raise ConvergenceError(f"Fourier path for {name} not converged at K_max={K}")
    _check_paths(C_direct, C_fourier, float(np.sum(fvals * np.abs(ML))), "smoothed C")
    _check_paths(D_direct, D_fourier, float(np.sum(fvals * mag)), "smoothed D")

    # D is a sum of nonnegative terms, so it sits between the plateau and full-arc sums
    inner_a, inner_b = bump.inner()
    on_plateau = np.mod(family.theta - inner_a, 1.0) < inner_b - inner_a
    if bump.is_constant:
        on_plateau[:] = True
    in_arc = bump.contains(family.theta)
    pp = phi_plus(q)
    I = bump.integral()
    common = {"alpha": mset.alpha, "M": mset.M, "bump": bump.label(), "K_max": K}
    C = MomentReport(q, "smoothed-first", {**common, "fourier": C_fourier}, C_direct,
                     complex(I * pp), float(pp), "o(phi+)", float(pp))
    D = MomentReport(q, "smoothed-second",
                     {**common, "fourier": D_fourier, "plateau_sum": math.fsum(mag[on_plateau]),
                      "arc_sum": math.fsum(mag[in_arc])},
                     complex(D_direct), complex(I * (1 + 1 / mset.alpha) * pp), float(pp), "o(phi+)", float(pp))
    return SmoothedMoments(C, D)


def fitted_envelope_constant(reports) -> float:
    """Largest ``|residual| / envelope`` across a grid of reports."""
    return max(r.fitted_constant for r in reports)
