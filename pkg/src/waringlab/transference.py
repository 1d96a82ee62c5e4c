"""Bohr averaging, dense models, and the desk-scale transfer pipeline.

The dense model of f is its double average over a Bohr set B of the
delta-large spectrum: f*(n) = E_{a,b in B} f(n+a-b), with f zero
outside [N]. The average genuinely spills over the edges of [N]; the
spilled values are kept internally so that transforms see the whole
object (the contraction identity f*_hat = f_hat |E_B e(a gamma)|^2
holds exactly only for the untruncated model), while the published
f_star sequence lives on [N] like everything else.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .convolve import convolve_fft
from .errors import CapacityError, EmptyBohrSetError, PreconditionError
from .circle import (
    SequenceMeta,
    WeightedSequence,
    build_nu_b,
    dft_grid,
    restriction_constant,
)
from .residues import build_w_context

_CONV_LEN_CAP = 1 << 26


@dataclass(frozen=True)
class BohrSet:
    delta: float
    frequencies: tuple[float, ...]
    elements: np.ndarray  # sorted, inside [1, floor(delta*N)]

    def __len__(self) -> int:
        return len(self.elements)


@dataclass
class DenseModel:
    f_star: WeightedSequence
    f_unf: np.ndarray  # signed, indexed like f.values
    bohr: BohrSet
    _ext: np.ndarray = field(repr=False)  # model on [lo, lo+len-1], lo <= 1
    _lo: int = field(repr=False, default=0)

    def __post_init__(self) -> None:
        assert self.f_star.values.shape == self.f_unf.shape


def large_spectrum(f: WeightedSequence, delta: float, M: int) -> np.ndarray:
    """Grid frequencies j/M where |f_hat| >= delta * N."""
    if not (0 < delta < 1):
        raise PreconditionError("delta must lie in (0,1)")
    grid = dft_grid(f, M)
    js = np.flatnonzero(np.abs(grid.values) >= delta * f.N)
    return js / M


def bohr_set(frequencies, delta: float, N: int) -> BohrSet:
    """{1 <= b <= delta N : ||b gamma|| < delta/(2 pi) for all gamma}."""
    if not (0 < delta < 1):
        raise PreconditionError("delta must lie in (0,1)")
    top = int(delta * N)
    if top < 1:
        raise PreconditionError("delta * N below 1: no candidates at all")
    b = np.arange(1, top + 1, dtype=np.float64)
    freqs = tuple(float(g) for g in frequencies)
    keep = np.ones(top, dtype=bool)
    radius = delta / (2 * math.pi)
    for g in freqs:
        x = b * g
        keep &= np.abs(x - np.round(x)) < radius
    elements = b[keep].astype(np.int64)
    if len(elements) == 0:
        raise EmptyBohrSetError(
            f"no b <= {top} lies within {radius:.4g} of integrality "
            f"at all {len(freqs)} frequencies"
        )
    return BohrSet(delta, freqs, elements)


def _difference_counts(elements: np.ndarray) -> tuple[np.ndarray, int]:
    """c(d) = #{(a,b) in B^2 : a - b = d}, d from -(max-min) .. +(max-min).

    Returned as an array c_arr with c_arr[i] = c(i - D). Counts are
    recovered from a float FFT by rounding; they are bounded by |B|^2,
    far inside the 2^53 window.
    """
    lo, hi = int(elements[0]), int(elements[-1])
    width = hi - lo + 1
    ind = np.zeros(width)
    ind[elements - lo] = 1.0
    corr = convolve_fft(ind, ind[::-1])
    c_arr = np.rint(corr).astype(np.int64)
    assert c_arr.sum() == len(elements) ** 2
    return c_arr, width - 1


def dense_model(f: WeightedSequence, delta: float, M: int) -> DenseModel:
    spectrum = large_spectrum(f, delta, M)
    B = bohr_set(spectrum, delta, f.N)
    c_arr, D = _difference_counts(B.elements)
    ext = convolve_fft(f.values, c_arr.astype(np.float64)) / len(B) ** 2
    # ext index m holds f*(m - D); clamp FFT dust so weights stay >= 0
    assert float(ext.min()) > -1e-9 * max(1.0, float(f.values.max()))
    ext = np.maximum(ext, 0.0)
    star_vals = np.zeros(f.N + 1)
    star_vals[1:] = ext[1 + D : f.N + 1 + D]
    f_star = WeightedSequence(f.N, star_vals, SequenceMeta("dense_model"))
    f_unf = f.values - star_vals
    return DenseModel(f_star, f_unf, B, _ext=ext, _lo=-D)


class UniformityCheck(NamedTuple):
    sup_norm_ratio: float
    holds: bool


def check_uniformity(model: DenseModel, delta: float, M: int) -> UniformityCheck:
    """max_j |f_unf_hat(j/M)|/N against the delta gate.

    The transform runs over the whole unbalanced part, spilled edges
    included: f is rebuilt as f_star + f_unf on [N], the extended model
    is subtracted in place, and negative positions wrap to the top of
    the length-M frame (M >= 4N keeps them clear of the block at the
    bottom).
    """
    N = model.f_star.N
    if M < 4 * N or M & (M - 1):
        raise PreconditionError("grid must be a power of two with M >= 4N")
    buf = np.zeros(M)
    ext, lo = model._ext, model._lo
    idx = np.arange(lo, lo + len(ext)) % M
    np.subtract.at(buf, idx, ext)
    buf[1 : N + 1] += model.f_unf[1:] + model.f_star.values[1:]
    ratio = float(np.max(np.abs(np.fft.fft(buf))) / N)
    return UniformityCheck(ratio, ratio <= delta * (1 + 1e-6))


def convolution(fs: list[WeightedSequence]) -> np.ndarray:
    """Exact-length linear convolution of the value arrays.

    Index n of the result is the weighted count of ways to write n as
    an ordered sum of one support point per sequence. Float transform;
    integer inputs round-trip exactly at these sizes (tested against
    direct computation).
    """
    if len(fs) < 2:
        raise PreconditionError("need at least two sequences")
    total = sum(f.N for f in fs) + 1
    if total > _CONV_LEN_CAP:
        raise CapacityError(f"convolution length {total} exceeds cap {_CONV_LEN_CAP}")
    acc = fs[0].values
    for f in fs[1:]:
        acc = convolve_fft(acc, f.values)
    return acc


class DenseSumsetCheck(NamedTuple):
    holds: bool
    window: tuple[float, float]
    min_count: int


def dense_sumset_check(
    blocks: list[set[int]],
    eps: float,
    N: int,
    enforce_preconditions: bool = True,
) -> DenseSumsetCheck:
    """Positivity of the s-fold convolution on the central window.

    Window: ((1 - eps^2/16) sN/2, (1 + eps/4) sN/2), open. The mean
    precondition sum |A_i| > s(1+eps)N/2 is what rules out parity-type
    obstructions; enforce_preconditions=False exists solely so the
    negative control (all-odd blocks at exactly half density) can be
    run and observed to fail.
    """
    s = len(blocks)
    if s < 2:
        raise PreconditionError("need at least two blocks")
    sizes = [len(b) for b in blocks]
    if enforce_preconditions:
        if not (0 < eps < 1):
            raise PreconditionError("eps must lie in (0,1)")
        if sum(sizes) <= s * (1 + eps) / 2 * N:
            raise PreconditionError(
                f"sum of sizes {sum(sizes)} <= s(1+eps)N/2 = {s * (1 + eps) / 2 * N:.1f}"
            )
        if any(sz <= eps / 2 * N for sz in sizes):
            raise PreconditionError(f"some block size <= (eps/2)N = {eps / 2 * N:.1f}")
    for blk in blocks:
        if any(not (1 <= a <= N) for a in blk):
            raise PreconditionError("blocks must lie in [1, N]")
    acc = np.zeros(N + 1, dtype=np.int64)
    acc[sorted(blocks[0])] = 1
    for blk in blocks[1:]:
        ind = np.zeros(N + 1, dtype=np.int64)
        ind[sorted(blk)] = 1
        acc = np.convolve(acc, ind)
    lo = (1 - eps * eps / 16) * s * N / 2
    hi = (1 + eps / 4) * s * N / 2
    n_lo, n_hi = int(math.floor(lo)) + 1, int(math.ceil(hi)) - 1
    window_counts = acc[n_lo : n_hi + 1]
    min_count = int(window_counts.min()) if len(window_counts) else 0
    return DenseSumsetCheck(min_count > 0, (lo, hi), min_count)


@dataclass(frozen=True)
class TransferenceReport:
    s: int
    N: int
    eps: float
    delta_requested: float
    delta_used: float
    retries: int
    etas: tuple[float, ...]
    means: tuple[float, ...]
    K_hat: float
    q_exp: float
    bohr_sizes: tuple[int, ...]
    window: tuple[float, float]
    min_convolution: float
    model_deviation: float
    holder_bound: float
    deviation_within_bound: bool
    holds: bool
    notes: tuple[str, ...]


def _measured_eta(f: WeightedSequence, M: int) -> float:
    """Pseudorandomness of the natural majorant of f.

    Power-weight sequences are majorized by their nu_b; anything else
    is measured against the interval indicator directly.
    """
    ind = dft_grid(WeightedSequence.indicator(f.N), M)
    if f.meta.kind in ("f_b", "nu_b"):
        ctx = build_w_context(f.meta.k, f.meta.w)
        nu = dft_grid(build_nu_b(f.N, ctx, f.meta.b), M)
        return float(np.max(np.abs(nu.values - ind.values)) / f.N)
    grid = dft_grid(f, M)
    return float(np.max(np.abs(grid.values - ind.values)) / f.N)


def transference_demo(
    fs: list[WeightedSequence], eps: float, delta: float, M: int
) -> TransferenceReport:
    """End-to-end pipeline: gates, models, decomposition error, window.

    kappa = eps/32; positivity of the s-fold convolution is asserted on
    ((1-kappa^2) sN/2, (1+kappa) sN/2). The Holder term
    2^s delta^{s-q} K^q N^{s-1} with q = s - 1/2 bounds the measured
    deviation between the true convolution and the dense-model one.
    """
    s = len(fs)
    if s < 2:
        raise PreconditionError("need at least two sequences")
    N = fs[0].N
    if any(f.N != N for f in fs):
        raise PreconditionError("all sequences must share N")
    if not (0 < eps < 1):
        raise PreconditionError("eps must lie in (0,1)")
    means = tuple(f.mean() for f in fs)
    if any(m <= eps / 2 for m in means):
        raise PreconditionError(f"a mean fails the eps/2 gate: means = {means}")
    if sum(means) <= s * (1 + eps) / 2:
        raise PreconditionError(
            f"mean total {sum(means):.4f} <= s(1+eps)/2 = {s * (1 + eps) / 2:.4f}"
        )
    etas = tuple(_measured_eta(f, M) for f in fs)

    notes: list[str] = []
    d = delta
    retries = 0
    models: list[DenseModel] = []
    while True:
        try:
            models = [dense_model(f, d, M) for f in fs]
            break
        except EmptyBohrSetError:
            # doubling past 1 would fail the spectrum gate, not help
            if retries >= 3 or 2 * d >= 1:
                raise
            retries += 1
            d *= 2
            notes.append(f"empty Bohr set; delta doubled to {d}")

    q_exp = s - 0.5
    K_hat = max(restriction_constant(f, q_exp, M) for f in fs)
    conv_f = convolution(fs)
    conv_star = convolution([m.f_star for m in models])

    kappa = eps / 32
    lo = (1 - kappa * kappa) * s * N / 2
    hi = (1 + kappa) * s * N / 2
    n_lo, n_hi = int(math.floor(lo)) + 1, int(math.ceil(hi)) - 1
    win_f = conv_f[n_lo : n_hi + 1]
    win_star = conv_star[n_lo : n_hi + 1]
    tol = 1e-12 * max(1.0, float(conv_f.max()))
    min_conv = float(win_f.min())
    holds = bool(min_conv > tol)
    deviation = float(np.max(np.abs(win_f - win_star)))
    bound = 2.0**s * d ** (s - q_exp) * K_hat**q_exp * float(N) ** (s - 1)
    if not holds:
        argmin = n_lo + int(np.argmin(win_f))
        notes.append(f"convolution vanishes inside the window, e.g. at n = {argmin}")
    return TransferenceReport(
        s=s,
        N=N,
        eps=eps,
        delta_requested=delta,
        delta_used=d,
        retries=retries,
        etas=etas,
        means=means,
        K_hat=K_hat,
        q_exp=q_exp,
        bohr_sizes=tuple(len(m.bohr) for m in models),
        window=(lo, hi),
        min_convolution=min_conv,
        model_deviation=deviation,
        holder_bound=bound,
        deviation_within_bound=bool(deviation <= bound),
        holds=holds,
        notes=tuple(notes),
    )
