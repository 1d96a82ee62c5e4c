"""Cyclic sumsets and the quantitative Cauchy-Davenport checks.

ResidueSet sumsets run on big-integer bitsets (rotate-or), so a single
sumset costs |A| word-shifted ORs of q-bit integers. Convolution counts
for the thresholded variants are exact integers.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .errors import PreconditionError
from .primes import factorize_int, is_prime
from .residues import FactoredModulus, ResidueSet


def sumset(A: ResidueSet, B: ResidueSet) -> ResidueSet:
    """A + B in Z_q."""
    A._check_same(B)
    q = A.modulus.value
    mask = (1 << q) - 1
    bits_b = B.bits
    acc = 0
    bits = A.bits
    while bits:
        low = bits & -bits
        a = low.bit_length() - 1
        bits ^= low
        acc |= ((bits_b << a) | (bits_b >> (q - a))) & mask if a else bits_b
    return ResidueSet(A.modulus, acc)


def iterated_sumset(A: ResidueSet, s: int) -> ResidueSet:
    """s-fold sumset A + ... + A via binary doubling."""
    if s < 1:
        raise PreconditionError("s must be >= 1")
    acc = ResidueSet(A.modulus, 1)  # {0}, the additive identity for sumsets
    base = A
    while s:
        if s & 1:
            acc = sumset(acc, base)
        s >>= 1
        if s:
            base = sumset(base, base)
    return acc


def cyclic_convolution_counts(A: ResidueSet, B: ResidueSet) -> np.ndarray:
    """Exact counts (1_A * 1_B)(n) = #{(a,b) in A x B : a+b = n mod q}."""
    A._check_same(B)
    q = A.modulus.value
    ia, ib = A.to_indicator(), B.to_indicator()
    if q <= 4096:
        full = np.convolve(ia, ib)
    else:
        # counts <= q <= 2^26 are exactly recoverable from a float FFT
        size = 1 << (2 * q - 2).bit_length()
        full = np.rint(
            np.fft.irfft(np.fft.rfft(ia, size) * np.fft.rfft(ib, size), size)
        ).astype(np.int64)[: 2 * q - 1]
    out = full[:q].copy()
    out[: q - 1] += full[q:]
    return out


def thresholded_sumset(A: ResidueSet, B: ResidueSet, eta: float) -> ResidueSet:
    """Popular sums in Z_q: {n : (1_A * 1_B)(n) >= eta * q}.

    The threshold scales with the group order q (cyclic setting). For
    sets of integers in [N] see thresholded_sumset_interval.
    """
    if not (0 < eta < 1):
        raise PreconditionError("eta must lie in (0,1)")
    q = A.modulus.value
    counts = cyclic_convolution_counts(A, B)
    hits = np.flatnonzero(counts >= eta * q - 1e-9)
    bits = 0
    for n in hits.tolist():
        bits |= 1 << int(n)
    return ResidueSet(A.modulus, bits)


def thresholded_sumset_interval(
    A: set[int], B: set[int], N: int, eta: float
) -> set[int]:
    """Popular sums of integer sets A, B inside [1, N]: counts >= eta * N."""
    if not (0 < eta < 1):
        raise PreconditionError("eta must lie in (0,1)")
    if not all(1 <= a <= N for a in A) or not all(1 <= b <= N for b in B):
        raise PreconditionError("blocks must lie in [1, N]")
    ia = np.zeros(N + 1, dtype=np.int64)
    ib = np.zeros(N + 1, dtype=np.int64)
    ia[list(A)] = 1
    ib[list(B)] = 1
    counts = np.convolve(ia, ib)
    return {int(n) for n in np.flatnonzero(counts >= eta * N - 1e-9)}


class CdCheck(NamedTuple):
    holds: bool
    lhs: int
    rhs: int


def verify_quantitative_cd(p: int, A: ResidueSet, B: ResidueSet, eta: float) -> CdCheck:
    """Check the popular-sumset lower bound in Z_p.

    With S = {n : (1_A * 1_B)(n) >= eta p}, tests
        |S| >= min(p, |A| + |B| - 1) - ceil(3 sqrt(eta) p).
    Preconditions: p prime, |A|, |B| >= sqrt(eta) p.
    """
    if not is_prime(p):
        raise PreconditionError(f"p={p} is not prime")
    if A.modulus.value != p or B.modulus.value != p:
        raise PreconditionError("sets must live in Z_p")
    if not (0 < eta < 1):
        raise PreconditionError("eta must lie in (0,1)")
    root = math.sqrt(eta) * p
    if len(A) < root - 1e-9 or len(B) < root - 1e-9:
        raise PreconditionError(
            f"|A|={len(A)}, |B|={len(B)} below sqrt(eta)*p={root:.3f}"
        )
    counts = cyclic_convolution_counts(A, B)
    lhs = int(np.count_nonzero(counts >= eta * p - 1e-9))
    rhs = min(p, len(A) + len(B) - 1) - math.ceil(3 * math.sqrt(eta) * p - 1e-9)
    return CdCheck(lhs >= rhs, lhs, rhs)


def verify_quantitative_cd_batch(
    p: int, A_ind: np.ndarray, B_ind: np.ndarray, eta: float
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized verify_quantitative_cd over many pairs at once.

    A_ind, B_ind: (m, p) 0/1 arrays, one row per pair. Rows must already
    satisfy the size precondition. Returns (holds, lhs, rhs) arrays.
    Semantics match the scalar op exactly; the batch is cross-checked
    against it in the tests.
    """
    A_ind = np.asarray(A_ind, dtype=np.float64)
    B_ind = np.asarray(B_ind, dtype=np.float64)
    fa = np.fft.rfft(A_ind, n=p, axis=1)
    fb = np.fft.rfft(B_ind, n=p, axis=1)
    counts = np.rint(np.fft.irfft(fa * fb, n=p, axis=1))
    lhs = (counts >= eta * p - 1e-9).sum(axis=1).astype(np.int64)
    sa = A_ind.sum(axis=1).astype(np.int64)
    sb = B_ind.sum(axis=1).astype(np.int64)
    rhs = np.minimum(p, sa + sb - 1) - math.ceil(3 * math.sqrt(eta) * p - 1e-9)
    return lhs >= rhs, lhs, rhs


class GenCdCheck(NamedTuple):
    min_convolution: int
    reported_bound: float
    holds: bool


def verify_gen_cd(p: int, blocks: list[ResidueSet], eps: float) -> GenCdCheck:
    """s-fold popular-sumset check in Z_p.

    Preconditions (gated): p prime, eps in (2s/p, 1), sum of block sizes
    >= (1+eps) p, each block size > (eps/s) p. Computes the exact s-fold
    cyclic convolution and asserts it is positive everywhere. The
    quantitative lower bound eps' * eta^(2(s-2)) * p^(s-1) with
    eta = eps/(6 s^2), eps' = eps/4 is reported, not asserted: the
    constant tracks a proof chain and is far from tight at desk scale.
    """
    s = len(blocks)
    if s < 2:
        raise PreconditionError("need at least two blocks")
    if not is_prime(p):
        raise PreconditionError(f"p={p} is not prime")
    if any(b.modulus.value != p for b in blocks):
        raise PreconditionError("blocks must live in Z_p")
    if not (2 * s / p < eps < 1):
        raise PreconditionError(f"eps={eps} outside (2s/p, 1) = ({2*s/p:.4g}, 1)")
    sizes = [len(b) for b in blocks]
    if sum(sizes) <= (1 + eps) * p + 1e-9:
        raise PreconditionError(f"sum of sizes {sum(sizes)} <= (1+eps)p = {(1+eps)*p:.3f}")
    if any(sz <= eps / s * p + 1e-9 for sz in sizes):
        raise PreconditionError(f"some block size <= (eps/s)p = {eps/s*p:.3f}")
    acc = blocks[0].to_indicator()
    for b in blocks[1:]:
        full = np.convolve(acc, b.to_indicator())
        acc = full[:p].copy()
        acc[: p - 1] += full[p:]
    eta = eps / (6 * s * s)
    bound = (eps / 4) * eta ** (2 * (s - 2)) * float(p) ** (s - 1)
    min_conv = int(acc.min())
    return GenCdCheck(min_conv, bound, min_conv > 0)


class CochraneCheck(NamedTuple):
    holds: bool
    lhs: int
    rhs: int


def _coset_witness(q: int, members: list[int]) -> int | None:
    """Smallest prime divisor d of q with the block inside a coset of dZ_q, else None."""
    b0 = members[0]
    g = q
    for b in members[1:]:
        g = math.gcd(g, (b - b0) % q)
    if g == 1:
        return None
    return factorize_int(g)[0][0]


def cochrane_check(q: int, blocks: list[ResidueSet]) -> CochraneCheck:
    """Sumset growth for blocks not trapped in a coset.

    Each block, translated to contain 0, must generate Z_q (gcd of
    differences with q equal 1); a violating block raises with its
    witness divisor. Tests |A_1 + ... + A_n| >= min(q, ceil((1/2 +
    1/(2n)) * sum |A_i|)).
    """
    n = len(blocks)
    if n < 1:
        raise PreconditionError("need at least one block")
    if any(b.modulus.value != q for b in blocks):
        raise PreconditionError("blocks must live in Z_q")
    for i, b in enumerate(blocks):
        members = b.members()
        if not members:
            raise PreconditionError(f"block {i} is empty")
        d = _coset_witness(q, members)
        if d is not None:
            raise PreconditionError(
                f"block {i} lies in a coset of {d}*Z_{q} (witness divisor {d})"
            )
    acc = blocks[0]
    for b in blocks[1:]:
        acc = sumset(acc, b)
    total = sum(len(b) for b in blocks)
    rhs = min(q, math.ceil((0.5 + 0.5 / n) * total - 1e-9))
    lhs = len(acc)
    return CochraneCheck(lhs >= rhs, lhs, rhs)


def solve_representation(A: ResidueSet, s: int, n: int) -> list[int] | None:
    """Some (a_1, ..., a_s) in A^s with sum = n mod q, or None.

    Forward reachability by repeated sumset, then greedy backtracking,
    so the cost is s sumsets plus s * |A| membership probes.
    """
    if s < 1:
        raise PreconditionError("s must be >= 1")
    q = A.modulus.value
    n %= q
    layers = [ResidueSet(A.modulus, 1)]  # 0-fold sums = {0}
    for _ in range(s):
        layers.append(sumset(layers[-1], A))
    if n not in layers[s]:
        return None
    out: list[int] = []
    cur = n
    members = A.members()
    for j in range(s, 0, -1):
        for a in members:
            if (cur - a) % q in layers[j - 1]:
                out.append(a)
                cur = (cur - a) % q
                break
        else:  # pragma: no cover - reachability guarantees a step exists
            raise AssertionError("backtracking lost a reachable target")
    out.reverse()
    return out
