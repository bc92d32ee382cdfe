"""Central values ``L(1/2, chi)`` by the smoothed approximate functional equation.

The weight function is

    V(y) = (1/2 pi i) int_(c) y^{-u} G(u) gamma(1/2+u)/gamma(1/2) du/u,
    gamma(s) = pi^{-s/2} Gamma((s+delta)/2),   G(u) = P(u) exp(u^2),

with ``P`` even, ``P(0) = 1`` and ``P`` vanishing at the pole of the gamma
ratio inside ``|Re u| <= 2``.  The dual sum of the functional equation picks
up ``G(-u)``, so an odd ``P`` would break the identity; see
:class:`SmoothingSpec`.

Everything here is checked against an independent route: Dirichlet
L-values from Hurwitz zeta values computed by Euler--Maclaurin summation.
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, field
from functools import lru_cache

import numpy as np
from scipy.interpolate import make_interp_spline
from scipy.special import bernoulli, loggamma

from .arith import PrimeContext, get_context
from .characters import (
    Character,
    character_transform,
    evaluate,
    normalize_angle,
    root_numbers,
)
from .errors import DomainError, PreconditionError

_CHUNK = 1 << 21


@dataclass(frozen=True)
class SmoothingSpec:
    """Choice of ``G(u) = P(u) exp(u^2)`` and of the quadrature that evaluates ``V``.

    ``P`` holds ascending polynomial coefficients.  ``contour_re`` is used for
    ``y >= 1``; for ``y < 1`` the integral is taken on ``left_re`` and the
    residue 1 at ``u = 0`` is added back, which avoids the ``y^{-Re u}``
    amplification of rounding errors.
    """

    delta: int
    P: tuple = (1.0, 0.0, -4.0)
    contour_re: float = 1.5
    contour_T: float = 8.0
    step: float = 0.005
    left_re: float = -2.0

    def __post_init__(self):
        if self.delta not in (0, 1):
            raise PreconditionError("delta must be 0 or 1")
        P = tuple(float(c) for c in self.P)
        object.__setattr__(self, "P", P)
        if abs(P[0] - 1.0) > 1e-15:
            raise PreconditionError("G(0) = 1 requires P(0) = 1")
        if any(abs(c) > 0 for c in P[1::2]):
            raise PreconditionError("P must be even for the functional equation to close")
        for pole in self.gamma_poles():
            if abs(self.poly(pole)) > 1e-12:
                raise PreconditionError(f"P must vanish at the gamma pole u={pole}")
        if not (self.left_re < 0 < self.contour_re):
            raise PreconditionError("need left_re < 0 < contour_re")

    @classmethod
    def for_parity(cls, delta: int) -> SmoothingSpec:
        # zero of 1 - (2u/(1+2 delta))^2 at u = -1/2 - delta
        return cls(delta=delta, P=(1.0, 0.0, -4.0 / (1 + 2 * delta) ** 2))

    def gamma_poles(self, width: float = 2.0) -> list[float]:
        poles = []
        u = -0.5 - self.delta
        while u >= -width:
            poles.append(u)
            u -= 2.0
        return poles

    def poly(self, u):
        return np.polynomial.polynomial.polyval(u, self.P)

    def G(self, u):
        u = np.asarray(u, dtype=complex)
        return self.poly(u) * np.exp(u * u)

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    def digest(self) -> str:
        return hashlib.sha256(self.to_json().encode()).hexdigest()[:16]


def gamma_ratio(u, delta: int):
    """``gamma(1/2+u) / gamma(1/2)`` for complex ``u``."""
    u = np.asarray(u, dtype=complex)
    return np.exp(
        loggamma((0.5 + u + delta) / 2) - loggamma((0.5 + delta) / 2) - 0.5 * u * np.log(np.pi)
    )


def _contour(spec: SmoothingSpec, re: float):
    t = np.arange(-spec.contour_T, spec.contour_T + spec.step / 2, spec.step)
    u = re + 1j * t
    w = spec.G(u) * gamma_ratio(u, spec.delta) / u * (spec.step / (2 * np.pi))
    return u, w


def _integrate(logy: np.ndarray, spec: SmoothingSpec, re: float) -> np.ndarray:
    u, w = _contour(spec, re)
    out = np.empty(logy.shape)
    for i in range(0, logy.size, 1024):
        blk = logy[i : i + 1024]
        out[i : i + 1024] = (np.exp(-np.outer(blk, u)) @ w).real
    if re < 0:
        bad = [p for p in spec.gamma_poles(abs(re)) if abs(spec.poly(p)) > 1e-12]
        if bad:
            raise PreconditionError(f"contour Re u={re} crosses uncancelled poles {bad}")
        out += 1.0
    return out


def smoothing_V(y, spec: SmoothingSpec, contour_re: float | None = None):
    """``V(y)`` by trapezoidal quadrature on a vertical line.

    Without ``contour_re`` the line is chosen by the size of ``y`` (see
    :class:`SmoothingSpec`); passing it forces a particular line, and for a
    negative value the residue at ``u = 0`` is added.
    """
    y_arr = np.asarray(y, dtype=float)
    if np.any(y_arr <= 0):
        raise DomainError("V(y) requires y > 0")
    flat = np.log(np.atleast_1d(y_arr)).ravel()
    if contour_re is not None:
        out = _integrate(flat, spec, contour_re)
    else:
        out = np.empty_like(flat)
        small = flat < 0
        if small.any():
            out[small] = _integrate(flat[small], spec, spec.left_re)
        if (~small).any():
            out[~small] = _integrate(flat[~small], spec, spec.contour_re)
    out = out.reshape(y_arr.shape)
    return float(out) if out.ndim == 0 else out


class VTable:
    """Quintic spline of ``V`` in ``log y`` over ``[e^lo, e^hi]``.

    Below the grid ``V`` is 1 to within ``O(y^2)``; above it ``|V| < 1e-20``.
    """

    def __init__(self, spec: SmoothingSpec, lo: float = -17.0, hi: float = 14.0, dx: float = 0.01):
        self.spec = spec
        self.lo, self.hi = lo, hi
        x = np.arange(lo, hi + dx / 2, dx)
        v = smoothing_V(np.exp(x), spec)
        self._spline = make_interp_spline(x, v, k=5)
        self.x, self.v = x, v
        # tail[i] = int_{e^x_i}^{inf} t^{-1/2} |V(t)| dt, trapezoid in log t
        dens = np.exp(x / 2) * np.abs(v)
        seg = 0.5 * (dens[1:] + dens[:-1]) * dx
        self.tail = np.concatenate([np.cumsum(seg[::-1])[::-1], [0.0]])

    def __call__(self, y):
        y = np.asarray(y, dtype=float)
        ly = np.log(y)
        out = self._spline(np.clip(ly, self.lo, self.hi))
        out = np.where(ly > self.hi, 0.0, out)
        return np.where(ly < self.lo, 1.0, out)

    def cutoff(self, scale: float, target: float) -> float:
        """Smallest grid ``y_c`` with ``sqrt(scale) * int_{y_c}^inf t^{-1/2}|V| dt < target``.

        Truncating ``sum_n n^{-1/2} V(n/scale)`` at ``n = y_c * scale`` then
        drops less than about ``target``.
        """
        ok = np.sqrt(scale) * self.tail < target
        i = int(np.argmax(ok)) if ok.any() else len(self.x) - 1
        return float(np.exp(self.x[i]))

    def decay_constant(self, A: float, ys) -> float:
        """Fitted ``C_A = max |V(y)| (1+y)^A`` over the sample points."""
        ys = np.asarray(ys, dtype=float)
        return float(np.max(np.abs(self(ys)) * (1 + ys) ** A))


@lru_cache(maxsize=8)
def v_table(spec: SmoothingSpec) -> VTable:
    return VTable(spec)


def default_spec(delta: int) -> SmoothingSpec:
    return SmoothingSpec.for_parity(delta)


@dataclass(frozen=True)
class AfeParams:
    """Balance parameter ``X`` and truncation control for the two AFE sums.

    ``tail_cut`` fixes the cutoff ``y_c`` (sums run to ``n <= y_c * scale``);
    when ``None`` it is derived from ``target_abs_err`` and the decay of ``V``.
    """

    X: float = 1.0
    target_abs_err: float = 1e-11
    tail_cut: float | None = None

    def __post_init__(self):
        if not self.X > 0:
            raise PreconditionError("X must be positive")
        if not self.target_abs_err > 0:
            raise PreconditionError("target_abs_err must be positive")


def truncation_point(scale: float, params: AfeParams, spec: SmoothingSpec) -> int:
    y_c = params.tail_cut if params.tail_cut is not None else v_table(spec).cutoff(scale, params.target_abs_err)
    return max(1, math.ceil(y_c * scale))


@lru_cache(maxsize=32)
def afe_weights(q: int, scale: float, delta: int, params: AfeParams = AfeParams(),
                spec: SmoothingSpec | None = None) -> np.ndarray:
    """``W[r] = sum_{n <= N, n = r mod q} n^{-1/2} V(n / scale)``, indexed by residue."""
    spec = spec or default_spec(delta)
    vt = v_table(spec)
    N = truncation_point(scale, params, spec)
    W = np.zeros(q)
    for start in range(1, N + 1, _CHUNK):
        n = np.arange(start, min(N, start + _CHUNK - 1) + 1, dtype=np.int64)
        W += np.bincount(n % q, weights=vt(n / scale) / np.sqrt(n), minlength=q)
    W.setflags(write=False)
    return W


def central_value_afe(chi: Character, params: AfeParams = AfeParams(),
                      spec: SmoothingSpec | None = None) -> complex:
    """``L(1/2, chi)`` by direct evaluation of both truncated AFE sums."""
    if not chi.is_primitive:
        raise DomainError("central_value_afe requires a primitive character")
    spec = spec or default_spec(chi.delta)
    if spec.delta != chi.delta:
        raise PreconditionError("smoothing spec parity does not match the character")
    vt = v_table(spec)
    q = chi.q
    rq = math.sqrt(q)
    eps = _root_number(chi)

    def side(scale, conj):
        N = truncation_point(scale, params, spec)
        total = 0j
        for start in range(1, N + 1, _CHUNK):
            n = np.arange(start, min(N, start + _CHUNK - 1) + 1, dtype=np.int64)
            c = evaluate(chi, n)
            if conj:
                c = np.conj(c)
            total += np.sum(c * (vt(n / scale) / np.sqrt(n)))
        return total

    return complex(side(params.X * rq, False) + eps * side(rq / params.X, True))


def _root_number(chi: Character) -> complex:
    eps, _ = root_numbers(chi.ctx, [chi.a])
    return complex(eps[0])


def central_values_afe(ctx: PrimeContext, a, params: AfeParams = AfeParams(),
                       spec: SmoothingSpec | None = None) -> np.ndarray:
    """Batch AFE: central values for the characters ``a`` (all of one parity)."""
    a = np.atleast_1d(np.asarray(a, dtype=np.int64)) % ctx.order
    if a.size == 0:
        return np.zeros(0, dtype=complex)
    if np.any(a == 0):
        raise DomainError("central values require primitive characters")
    parities = np.unique(a % 2)
    if parities.size != 1:
        raise PreconditionError("batch evaluation needs characters of a single parity")
    delta = int(parities[0])
    spec = spec or default_spec(delta)
    rq = math.sqrt(ctx.q)
    first = character_transform(ctx, afe_weights(ctx.q, params.X * rq, delta, params, spec))
    dual = character_transform(ctx, afe_weights(ctx.q, rq / params.X, delta, params, spec))
    eps, _ = root_numbers(ctx, a)
    return first[a] + eps * dual[(-a) % ctx.order]


# ---------------------------------------------------------------------------
# Hurwitz zeta oracle

_EM_SHIFT = 25
_EM_TERMS = 12  # Bernoulli corrections B_2 .. B_24
_BERN = bernoulli(2 * _EM_TERMS + 2)


def hurwitz_zeta(s: complex, a) -> np.ndarray:
    """``zeta(s, a)`` for ``a > 0`` by Euler--Maclaurin after shifting to ``N = 25``."""
    s = complex(s)
    if s == 1:
        raise DomainError("zeta(s, a) has a pole at s = 1")
    a = np.atleast_1d(np.asarray(a, dtype=float))
    N = _EM_SHIFT
    n = np.arange(N)
    head = np.sum((n[None, :] + a[:, None]) ** (-s), axis=1)
    x = N + a
    total = head + x ** (1 - s) / (s - 1) + 0.5 * x ** (-s)
    rising = s  # s(s+1)...(s+2j-2)
    xpow = x ** (-s - 1)
    for j in range(1, _EM_TERMS + 1):
        total += _BERN[2 * j] / math.factorial(2 * j) * rising * xpow
        rising *= (s + 2 * j - 1) * (s + 2 * j)
        xpow = xpow / (x * x)
    return total


def hurwitz_error_bound(s: complex, a_min: float) -> float:
    """Size of the first omitted Euler--Maclaurin term, inflated by ``|s+2p+1|/(Re s+2p+1)``."""
    s = complex(s)
    p = _EM_TERMS
    rising = 1.0 + 0j
    for i in range(2 * p + 1):
        rising *= s + i
    x = _EM_SHIFT + a_min
    term = abs(_BERN[2 * p + 2]) / math.factorial(2 * p + 2) * abs(rising) * x ** (-(s.real + 2 * p + 1))
    return float(term * abs(s + 2 * p + 1) / (s.real + 2 * p + 1))


@lru_cache(maxsize=64)
def _hurwitz_row(q: int, s: complex) -> np.ndarray:
    out = hurwitz_zeta(s, np.arange(1, q) / q)
    out.setflags(write=False)
    return out


def central_value_hurwitz(chi: Character, s: complex = 0.5) -> complex:
    """``L(s, chi) = q^{-s} sum_{r=1}^{q-1} chi(r) zeta(s, r/q)``."""
    if not chi.is_primitive:
        raise DomainError("central_value_hurwitz requires a non-principal character")
    q = chi.q
    s = complex(s)
    return complex(q ** (-s) * np.sum(evaluate(chi, np.arange(1, q)) * _hurwitz_row(q, s)))


def completed_lambda(chi: Character, s: complex) -> complex:
    """``Lambda(s, chi) = q^{s/2} pi^{-s/2} Gamma((s+delta)/2) L(s, chi)``."""
    s = complex(s)
    z = (s + chi.delta) / 2
    if z.imag == 0 and z.real <= 0 and z.real == round(z.real):
        raise DomainError(f"Gamma pole at s={s}")
    log_fac = 0.5 * s * math.log(chi.q) - 0.5 * s * math.log(math.pi) + complex(loggamma(z))
    return complex(np.exp(log_fac) * central_value_hurwitz(chi, s))


def completed_lambda_residual(chi: Character, s: complex) -> float:
    """``|Lambda(s, chi) - eps(chi) Lambda(1-s, conj chi)|``."""
    if not chi.is_primitive:
        raise DomainError("functional equation needs a primitive character")
    s = complex(s)
    return abs(completed_lambda(chi, s) - _root_number(chi) * completed_lambda(chi.conj(), 1 - s))


# ---------------------------------------------------------------------------
# Per-character records


@dataclass(frozen=True)
class CentralRecord:
    a: int
    eps: complex
    theta: float
    lval: complex


@dataclass(frozen=True, eq=False)
class CentralFamily:
    """Root numbers, angles and central values of a family of characters mod ``q``.

    Arrays are aligned and ordered by ascending character index ``a``.
    """

    q: int
    parity: str
    a: np.ndarray = field(repr=False)
    eps: np.ndarray = field(repr=False)
    theta: np.ndarray = field(repr=False)
    lval: np.ndarray = field(repr=False)
    spec_digest: str = ""

    def __len__(self) -> int:
        return int(self.a.size)

    def records(self) -> list[CentralRecord]:
        return [CentralRecord(int(a), complex(e), float(t), complex(v))
                for a, e, t, v in zip(self.a, self.eps, self.theta, self.lval)]

    def index_of(self, a: int) -> int:
        i = int(np.searchsorted(self.a, a % (self.q - 1)))
        if i >= self.a.size or self.a[i] != a % (self.q - 1):
            raise KeyError(a)
        return i


def central_family(q: int, parity: str = "even", params: AfeParams = AfeParams()) -> CentralFamily:
    """Cached per ``(q, parity, params)``; the default smoothing spec is implied."""
    return _central_family(int(q), parity, params)


@lru_cache(maxsize=16)
def _central_family(q: int, parity: str, params: AfeParams) -> CentralFamily:
    ctx = get_context(q)
    if parity == "even":
        a = np.arange(2, q - 1, 2, dtype=np.int64)
    elif parity == "odd":
        a = np.arange(1, q - 1, 2, dtype=np.int64)
    else:
        raise PreconditionError(f"parity must be 'even' or 'odd', got {parity!r}")
    delta = 0 if parity == "even" else 1
    a.setflags(write=False)
    if a.size == 0:
        empty = np.zeros(0)
        return CentralFamily(q, parity, a, empty.astype(complex), empty, empty.astype(complex),
                             default_spec(delta).digest())
    eps, theta = root_numbers(ctx, a)
    lval = central_values_afe(ctx, a, params)
    theta = normalize_angle(theta)
    for arr in (eps, theta, lval):
        arr.setflags(write=False)
    return CentralFamily(q, parity, a, eps, theta, lval, default_spec(delta).digest())
