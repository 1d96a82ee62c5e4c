"""Linear convolutions: exact big-integer path and float FFT path."""

from __future__ import annotations

import numpy as np


def convolve_exact(a: np.ndarray, b: np.ndarray, clip: int | None = None) -> np.ndarray:
    """Exact integer convolution of nonnegative sequences.

    Packs each sequence into one big integer with fixed-width limbs and
    multiplies; limb width is chosen from the coefficient bound
    ||a||_1 * max(b) so no carries cross limbs. clip truncates the result
    to indices [0, clip], which is sound whenever only those indices are
    consumed (contributions come from smaller indices only).
    """
    a = np.asarray(a)
    b = np.asarray(b)
    if a.ndim != 1 or b.ndim != 1:
        raise ValueError("1-d sequences required")
    if len(a) == 0 or len(b) == 0:
        return np.zeros(0, dtype=np.int64)
    amax, bmax = int(a.max(initial=0)), int(b.max(initial=0))
    if a.min(initial=0) < 0 or b.min(initial=0) < 0:
        raise ValueError("nonnegative coefficients required")
    # sum in object dtype: the int64 total can wrap even when every
    # element fits, and a wrapped bound under-sizes the limbs
    bound = min(int(a.sum(dtype=object)) * bmax, int(b.sum(dtype=object)) * amax) + 1
    limb = max(64, ((bound.bit_length() + 63) // 64) * 64)
    ia = _pack(a, limb)
    ib = _pack(b, limb)
    prod = ia * ib
    n_out = len(a) + len(b) - 1
    if clip is not None:
        n_out = min(n_out, clip + 1)
        prod &= (1 << (limb * n_out)) - 1
    return _unpack(prod, n_out, limb, bound)


def _pack(arr: np.ndarray, limb: int) -> int:
    if limb == 64:
        return int.from_bytes(
            np.ascontiguousarray(arr, dtype="<u8").tobytes(), "little"
        )
    step = limb // 64
    wide = np.zeros(len(arr) * step, dtype="<u8")
    vals = np.ascontiguousarray(arr)
    if vals.dtype == object:
        out = 0
        for i, v in enumerate(vals.tolist()):
            out |= int(v) << (limb * i)
        return out
    wide[::step] = vals.astype("<u8")
    return int.from_bytes(wide.tobytes(), "little")


def _unpack(x: int, n: int, limb: int, bound: int) -> np.ndarray:
    nbytes = n * (limb // 8)
    buf = x.to_bytes(max(nbytes, (x.bit_length() + 7) // 8), "little")[:nbytes]
    words = np.frombuffer(buf, dtype="<u8")
    step = limb // 64
    if bound < 2**63:
        if step == 1:
            return words.astype(np.int64)
        return words.reshape(n, step)[:, 0].astype(np.int64)
    # counts exceed int64: return exact Python ints
    chunks = words.reshape(n, step)
    out = np.empty(n, dtype=object)
    for i in range(n):
        v = 0
        for j in range(step - 1, -1, -1):
            v = (v << 64) | int(chunks[i, j])
        out[i] = v
    return out


def convolve_fft(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Float linear convolution via zero-padded real FFT."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    n = len(a) + len(b) - 1
    size = 1 << (n - 1).bit_length()
    fa = np.fft.rfft(a, size)
    fb = np.fft.rfft(b, size)
    return np.fft.irfft(fa * fb, size)[:n]


def convolve_many_exact(seqs: list[np.ndarray], clip: int | None = None) -> np.ndarray:
    """Left fold of convolve_exact over seqs."""
    if not seqs:
        raise ValueError("need at least one sequence")
    acc = np.asarray(seqs[0])
    if clip is not None:
        acc = acc[: clip + 1]
    for s in seqs[1:]:
        acc = convolve_exact(acc, s, clip=clip)
    return acc


def booleanize(counts: np.ndarray) -> np.ndarray:
    return (counts > 0).astype(np.int64)


def iterated_support(indicator: np.ndarray, s: int, clip: int | None = None) -> np.ndarray:
    """0/1 support of the s-fold additive convolution of a 0/1 sequence.

    Binary decomposition with re-booleanization between stages keeps
    every multiply exact at small coefficients.
    """
    if s < 1:
        raise ValueError("s must be >= 1")
    base = booleanize(np.asarray(indicator))
    acc: np.ndarray | None = None
    while s:
        if s & 1:
            acc = base if acc is None else booleanize(convolve_exact(acc, base, clip=clip))
            if clip is not None:
                acc = acc[: clip + 1]
        s >>= 1
        if s:
            base = booleanize(convolve_exact(base, base, clip=clip))
    assert acc is not None
    return acc
