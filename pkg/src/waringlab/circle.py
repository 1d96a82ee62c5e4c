"""Weighted power sequences, exponential sums, and arc decomposition.

Transform convention: f_hat(alpha) = sum_n f(n) e(-n alpha), matching
numpy's forward FFT, so grid values come straight out of fft after
zero-padding. The local sums V_q and the weighted sum G_b carry their
own positive phases e_M(x) = exp(2 pi i x / M); only moduli of the
measured quantities enter any acceptance gate, so the convention is a
bookkeeping choice, fixed here once.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import CapacityError, PreconditionError
from .primes import factorize_int
from .residues import WContext, _modpow_vec

_VQ_ENUM_CAP = 10**7


def integer_kth_root(x: int, k: int) -> int:
    """Largest t with t^k <= x, exact."""
    if x < 0:
        raise PreconditionError("x must be nonnegative")
    if x == 0:
        return 0
    t = int(round(x ** (1.0 / k)))
    while t**k > x:
        t -= 1
    while (t + 1) ** k <= x:
        t += 1
    return t


@dataclass(frozen=True)
class SequenceMeta:
    kind: str  # f_b | nu_b | indicator | dense_model | custom
    k: int | None = None
    w: int | None = None
    W: int | None = None
    b: int | None = None


@dataclass
class WeightedSequence:
    """Nonnegative weights on 1..N; slot 0 is kept and always zero."""

    N: int
    values: np.ndarray
    meta: SequenceMeta = field(default_factory=lambda: SequenceMeta("custom"))

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.shape != (self.N + 1,):
            raise PreconditionError(f"values must have shape ({self.N + 1},)")
        if self.values[0] != 0.0:
            raise PreconditionError("slot 0 must be zero")
        if not np.all(np.isfinite(self.values)) or np.any(self.values < 0):
            raise PreconditionError("values must be finite and nonnegative")

    @classmethod
    def indicator(cls, N: int) -> "WeightedSequence":
        vals = np.ones(N + 1)
        vals[0] = 0.0
        return cls(N, vals, SequenceMeta("indicator"))

    def total(self) -> float:
        return float(self.values.sum())

    def mean(self) -> float:
        return self.total() / self.N

    def support(self) -> np.ndarray:
        return np.flatnonzero(self.values[1:]) + 1


@dataclass(frozen=True)
class SpectrumGrid:
    """values[j] = sum_n f(n) e(-n j / M)."""

    M: int
    values: np.ndarray

    def frequencies(self) -> np.ndarray:
        return np.arange(self.M) / self.M


def build_f_b(A: set[int], N: int, ctx: WContext, b: int) -> WeightedSequence:
    """Weights (k/sigma_W(b)) t^{k-1} at n where W n + b = t^k lands in A."""
    W, k = ctx.W.value, ctx.k
    if not (0 <= b < W):
        raise PreconditionError(f"b={b} outside [0, W)")
    sig = ctx.sigma(b)
    if sig == 0:
        raise PreconditionError(f"sigma_W({b}) = 0: no k-th power is {b} mod {W}")
    vals = np.zeros(N + 1)
    scale = k / sig
    t_max = integer_kth_root(W * N + b, k)
    for t in range(1, t_max + 1):
        m = t**k
        if m % W == b and m in A:
            n = (m - b) // W
            if 1 <= n <= N:
                vals[n] = scale * t ** (k - 1)
    kind = "nu_b" if A is _ALL_POWERS_SENTINEL else "f_b"
    return WeightedSequence(N, vals, SequenceMeta(kind, k, ctx.w, W, b))


class _AllPowers(set):
    """Membership-only stand-in for the full set of k-th powers."""

    def __contains__(self, item: object) -> bool:  # noqa: D105
        return True


_ALL_POWERS_SENTINEL = _AllPowers()


def build_nu_b(N: int, ctx: WContext, b: int) -> WeightedSequence:
    return build_f_b(_ALL_POWERS_SENTINEL, N, ctx, b)


def all_kth_powers(limit: int, k: int) -> set[int]:
    return {t**k for t in range(1, integer_kth_root(limit, k) + 1)}


def dft_grid(f: WeightedSequence, M: int) -> SpectrumGrid:
    if M < 4 * f.N:
        raise PreconditionError(f"grid M={M} below 4N={4 * f.N}")
    if M & (M - 1):
        raise PreconditionError(f"grid M={M} is not a power of two")
    return SpectrumGrid(M, np.fft.fft(f.values, M))


def dft_direct(f: WeightedSequence, j: int, M: int) -> complex:
    """Slow reference transform at a single frequency j/M."""
    n = np.flatnonzero(f.values)
    return complex(np.sum(f.values[n] * np.exp(-2j * np.pi * n * j / M)))


def pseudorandomness_eta(ctx: WContext, b: int, N: int, M: int) -> float:
    """max_j |nu_hat_b - ind_hat|(j/M) / N over the grid."""
    W = ctx.W.value
    if math.gcd(b, W) != 1:
        raise PreconditionError(
            f"gcd(b, W) = {math.gcd(b, W)} > 1: majorant comparison needs a unit class"
        )
    if ctx.sigma(b) == 0:
        raise PreconditionError(f"sigma_W({b}) = 0")
    nu = dft_grid(build_nu_b(N, ctx, b), M)
    ind = dft_grid(WeightedSequence.indicator(N), M)
    return float(np.max(np.abs(nu.values - ind.values)) / N)


def restriction_constant(f: WeightedSequence, q_exp: float, M: int) -> float:
    """K_hat = (mean_j |f_hat|^q)^{1/q} / N^{1-1/q}, Riemann sum on the grid."""
    if q_exp <= 1:
        raise PreconditionError("q_exp must exceed 1")
    grid = dft_grid(f, M)
    lq = float(np.mean(np.abs(grid.values) ** q_exp)) ** (1.0 / q_exp)
    return lq / f.N ** (1.0 - 1.0 / q_exp)


@dataclass(frozen=True)
class ArcDecomposition:
    N: int
    rho: float
    Q: int
    T: int
    arcs: tuple[tuple[int, int, float, float], ...]  # (q, a, center, radius)

    def classify(self, alpha: float) -> tuple[int, int] | None:
        """The (q, a) whose arc contains alpha, or None for the minor arcs."""
        alpha %= 1.0
        for q in range(1, self.Q + 1):
            a = round(alpha * q) % q
            if math.gcd(a, q) != 1:
                continue  # reduced fraction was already tried at a smaller q
            d = abs(alpha - a / q)
            if min(d, 1.0 - d) <= 1.0 / self.T:
                return q, a
        return None

    def major_measure(self) -> float:
        return sum(2 * radius for _, _, _, radius in self.arcs)


def decompose_arcs(N: int, rho: float) -> ArcDecomposition:
    if not (0 < rho <= 1.0 / 3.0):
        raise PreconditionError(f"rho={rho} outside (0, 1/3]")
    Q = int(N**rho)
    T = int(N ** (1.0 - rho))
    if T <= 2 * Q * Q:
        raise PreconditionError(
            f"arcs overlap: T={T} <= 2Q^2={2 * Q * Q}; shrink rho or raise N"
        )
    arcs = []
    for q in range(1, Q + 1):
        for a in range(q):
            if math.gcd(a, q) == 1:
                arcs.append((q, a, a / q, 1.0 / T))
    # |a/q - a'/q'| >= 1/(qq') >= 1/Q^2 > 2/T, so radius-1/T arcs are disjoint
    return ArcDecomposition(N, rho, Q, T, tuple(arcs))


def V_q(a: int, b: int, q: int, ctx: WContext) -> complex:
    """sum over h mod Wq with h^k = b mod W of exp(2 pi i a h^k / (Wq))."""
    if q < 1:
        raise PreconditionError("q must be >= 1")
    W, k = ctx.W.value, ctx.k
    Mq = W * q
    if Mq > _VQ_ENUM_CAP:
        raise CapacityError(f"Wq = {Mq} exceeds enumeration cap {_VQ_ENUM_CAP}")
    h = np.arange(Mq, dtype=np.int64)
    sel = h[_modpow_vec(h, k, W) == b % W]
    powers_Mq = _modpow_vec(sel, k, Mq)
    args = (a % Mq) * powers_Mq % Mq
    return complex(np.exp(2j * np.pi * args / Mq).sum())


def V_q_crt(a: int, b: int, q: int, ctx: WContext) -> complex:
    """V_q again, through the prime-power factorization of Wq.

    Uses 1/M = sum_i c_i/m_i (mod 1) with c_i the inverse of M/m_i mod
    m_i, so the full sum factors into one local sum per prime power;
    the k-th power constraint applies at primes dividing W only, to the
    W-part of the exponent. Must match V_q to 10^-9.
    """
    if q < 1:
        raise PreconditionError("q must be >= 1")
    W, k = ctx.W.value, ctx.k
    M = W * q
    out = complex(1.0, 0.0)
    for p, e in factorize_int(M):
        m_i = p**e
        c_i = pow(M // m_i, -1, m_i)
        kp = min(k, e) if W % p == 0 else 0
        p_kp = p**kp
        h = np.arange(m_i, dtype=np.int64)
        if kp:
            h = h[_modpow_vec(h, k, p_kp) == b % p_kp]
        powers = _modpow_vec(h, k, m_i)
        args = (a % m_i) * c_i % m_i * powers % m_i
        out *= complex(np.exp(2j * np.pi * args / m_i).sum())
    return out


def G_b(alpha: float, N: int, ctx: WContext, b: int) -> complex:
    """sum over t with t^k <= N, t^k = b mod W of k t^{k-1} e_W(alpha t^k).

    The phase alpha t^k / W is reduced mod 1 in exact integer
    arithmetic: a float alpha is the dyadic rational num/den with den a
    power of two, so num * t^k mod (den * W) is exact and the only
    rounding is the final division. Periodic in alpha with period W.
    """
    W, k = ctx.W.value, ctx.k
    num, den = float(alpha).as_integer_ratio()
    mod = den * W
    total = 0j
    for t in range(1, integer_kth_root(N, k) + 1):
        tk = t**k
        if tk % W != b % W:
            continue
        phase = (num * tk) % mod
        # scaled integer division: mod can exceed float range for
        # alphas with very large dyadic denominators
        angle = ((phase << 64) // mod) / float(1 << 64)
        total += k * t ** (k - 1) * cmath.exp(2j * cmath.pi * angle)
    return total


def mean_g(A: set[int], ctx: WContext, b: int, M_len: int) -> float:
    """E_{n in [M_len]} f_b(n)."""
    return build_f_b(A, M_len, ctx, b).mean()


_VINOGRADOV_CAPS = {"X": 30, "t": 4, "k": 3}


def _power_vector_key(x: np.ndarray, k: int, base: int) -> np.ndarray:
    """Pack (sum x, sum x^2, ..., sum x^k) rows into single int64 keys."""
    key = np.zeros(x.shape[0], dtype=np.int64)
    for j in range(1, k + 1):
        key = key * base + (x**j).sum(axis=1)
    return key


def _count_by_enumeration(t: int, k: int, X: int) -> int:
    grids = np.meshgrid(*([np.arange(1, X + 1)] * t), indexing="ij")
    tuples = np.stack([g.ravel() for g in grids], axis=1).astype(np.int64)
    base = t * X**k + 1
    keys = _power_vector_key(tuples, k, base)
    _, counts = np.unique(keys, return_counts=True)
    return int((counts.astype(object) ** 2).sum())


def _count_by_dp(t: int, k: int, X: int) -> int:
    layer: dict[tuple[int, ...], int] = {(0,) * k: 1}
    for _ in range(t):
        nxt: dict[tuple[int, ...], int] = {}
        for vec, c in layer.items():
            for x in range(1, X + 1):
                key = tuple(v + x**j for v, j in zip(vec, range(1, k + 1)))
                nxt[key] = nxt.get(key, 0) + c
        layer = nxt
    return sum(c * c for c in layer.values())


def vinogradov_count(t: int, k: int, X: int) -> int:
    """Solutions of sum x_i^j = sum x_{t+i}^j (j = 1..k) in [1,X]^{2t}.

    Counted twice: a layered dictionary walk and a flat numpy
    enumeration with packed keys. The two totals must agree exactly.
    """
    caps = _VINOGRADOV_CAPS
    if X > caps["X"] or t > caps["t"] or k > caps["k"]:
        raise CapacityError(f"(t={t}, k={k}, X={X}) beyond toy caps {caps}")
    if X < 1 or t < 1 or k < 1:
        raise PreconditionError("t, k, X must be >= 1")
    a = _count_by_dp(t, k, X)
    b = _count_by_enumeration(t, k, X)
    assert a == b, f"counting routes disagree: {a} != {b}"
    return a
