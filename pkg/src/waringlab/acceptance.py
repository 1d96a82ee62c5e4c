"""The twelve acceptance gates, runnable from pytest or the CLI.

Each criterion function is self-contained, returns a CriterionResult,
and never raises on a mathematical failure: red outcomes carry the
measured counterexample in `details`. Runtime budgets are recorded so
a slow regression shows up as its own kind of failure.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass

import numpy as np

from .circle import (
    V_q,
    all_kth_powers,
    build_f_b,
    pseudorandomness_eta,
    restriction_constant,
    vinogradov_count,
)
from .downsets import downset_transform, is_downset, to_crt_coords, u_of
from .harness import representation_count
from .residues import (
    ResidueSet,
    build_k_context,
    build_w_context,
    factorize,
    kth_power_classes,
    size_Z_formula,
    tau,
    unit_kth_power_classes,
)
from .sumsets import sumset
from .transference import dense_sumset_check, transference_demo
from .waring import minimal_waring_s, waring_pair_exhaustive
from .zk import REFERENCE_VALUES, zeta_sandwich, zk_estimate

MASTER_SEED = 20250816


@dataclass(frozen=True)
class CriterionResult:
    number: int
    name: str
    passed: bool
    details: str
    elapsed: float
    budget: float

    @property
    def within_budget(self) -> bool:
        return self.elapsed < self.budget

    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return (
            f"criterion {self.number:02d} {verdict} [{self.elapsed:6.1f}s / "
            f"{self.budget:.0f}s] {self.name}: {self.details}"
        )


def criterion_1() -> CriterionResult:
    """Constant table enclosures, width 1e-3, sandwich for k >= 5."""
    t0 = time.perf_counter()
    problems = []
    for k in range(2, 10):
        est = zk_estimate(k, 1e-3)
        ref = REFERENCE_VALUES[k]
        if est.width > 1e-3:
            problems.append(f"k={k}: width {est.width:.2e}")
        if not (est.lower - 0.01 <= ref <= est.upper + 0.01):
            problems.append(
                f"k={k}: reference {ref} outside [{est.lower:.6f}, {est.upper:.6f}] +-0.01"
            )
        if k >= 5:
            lo, hi = zeta_sandwich(k)
            if not (est.lower >= lo - 1e-9 and hi is not None and est.upper <= hi + 1e-9):
                problems.append(
                    f"k={k}: enclosure [{est.lower:.6f},{est.upper:.6f}] "
                    f"escapes sandwich [{lo:.6f},{hi}]"
                )
    details = "; ".join(problems) if problems else "8 enclosures, all within reference and sandwich"
    return CriterionResult(1, "constant-table", not problems, details, time.perf_counter() - t0, 60)


def criterion_2() -> CriterionResult:
    """Exact residue identities: |Z|, sigma totals, coset fiber counts."""
    t0 = time.perf_counter()
    problems = []
    from .primes import primes_up_to

    checked = 0
    for p in primes_up_to(10_000):
        pe = p
        e = 1
        while pe <= 10_000:
            for k in range(2, 7):
                expect = size_Z_formula(p, e, k)
                got = len(unit_kth_power_classes(factorize(pe), k))
                checked += 1
                if expect != got:
                    problems.append(f"|Z({p}^{e})| k={k}: formula {expect} != {got}")
            e += 1
            pe *= p
    for w in (2, 3, 4, 5):
        for k in (2, 3, 4):
            ctx = build_w_context(k, w)
            total = int(ctx.sigma_table().sum())
            checked += 1
            if total != ctx.W.value:
                problems.append(f"sigma total w={w} k={k}: {total} != {ctx.W.value}")
    for p in (3, 5, 7):
        for k in (2, 3, 4):
            pk = factorize(p**k)
            classes = kth_power_classes(pk, k).members()
            expect = p ** (k - 1 - tau(k, p))
            for a in unit_kth_power_classes(factorize(p), k).members():
                got = sum(1 for b in classes if b % p == a)
                checked += 1
                if got != expect:
                    problems.append(f"fiber p={p} k={k} a={a}: {got} != {expect}")
    details = "; ".join(problems) if problems else f"{checked} integer identities, all exact"
    return CriterionResult(2, "residue-formulas", not problems, details, time.perf_counter() - t0, 30)


def criterion_3() -> CriterionResult:
    """Named local pairs certified, (5,3) failing with its witness."""
    t0 = time.perf_counter()
    ctx = build_k_context(2)
    problems = []
    for q, s in ((9, 2), (5, 4), (25, 16), (45, 6)):
        rep = waring_pair_exhaustive(factorize(q), s, ctx)
        if not rep.holds:
            problems.append(f"({q},{s}) unexpectedly fails: {rep.counterexample}")
    rep53 = waring_pair_exhaustive(factorize(5), 3, ctx)
    if rep53.holds:
        problems.append("(5,3) unexpectedly certified")
    elif rep53.counterexample != ((1, 4), 0):
        problems.append(f"(5,3) witness {rep53.counterexample} != ((1,4),0)")
    s_min, _, _ = minimal_waring_s(factorize(5), ctx)
    if s_min != 4:
        problems.append(f"minimal s for q=5 is {s_min}, expected 4")
    details = "; ".join(problems) if problems else "pairs (9,2),(5,4),(25,16),(45,6) hold; (5,3) fails at A={1,4} missing 0; minimal s = 4"
    return CriterionResult(3, "waring-pairs", not problems, details, time.perf_counter() - t0, 60)


def criterion_4() -> CriterionResult:
    """1000 random downset-transform instances, four properties each."""
    t0 = time.perf_counter()
    rng = np.random.Generator(np.random.PCG64(MASTER_SEED))
    moduli = [15, 21, 33, 35, 105]
    problems = []
    for trial in range(1000):
        q = factorize(int(rng.choice(moduli)))
        s = int(rng.integers(2, 4))
        units = [a for a in range(1, q.value) if math.gcd(a, q.value) == 1]
        blocks = []
        for _ in range(s):
            mask = rng.random(len(units)) < 0.5
            chosen = [u for u, m in zip(units, mask) if m] or [int(rng.choice(units))]
            bits = 0
            for u in chosen:
                bits |= 1 << u
            blocks.append(ResidueSet(q, bits))
        out = downset_transform(blocks)
        for orig, new in zip(blocks, out):
            if len(orig) != len(new):
                problems.append(f"trial {trial}: cardinality {len(orig)} -> {len(new)}")
            if not is_downset(new):
                problems.append(f"trial {trial}: output not a downset: {new.members()}")
            u_vec = u_of(orig)
            for bmem in new.members():
                coords = to_crt_coords(bmem, q).coords
                if not all(c < u for c, u in zip(coords, u_vec.coords)):
                    problems.append(
                        f"trial {trial}: member {bmem} coords {coords} not below {u_vec.coords}"
                    )
        before = blocks[0]
        after = out[0]
        for b_blk, a_blk in zip(blocks[1:], out[1:]):
            before = sumset(before, b_blk)
            after = sumset(after, a_blk)
        if len(after) > len(before):
            problems.append(f"trial {trial}: sumset grew {len(before)} -> {len(after)}")
        if problems:
            break
    details = "; ".join(problems) if problems else "1000 instances: sizes kept, downsets closed, bounds strict, sumsets never grew"
    return CriterionResult(4, "downset-transform", not problems, details, time.perf_counter() - t0, 60)


def _all_subsets_bool(p: int) -> np.ndarray:
    idx = np.arange(1 << p, dtype=np.uint32)
    return ((idx[:, None] >> np.arange(p)) & 1).astype(np.float64)


def _cd_batch_holds(A: np.ndarray, B: np.ndarray, p: int, eta: float) -> np.ndarray:
    fa = np.fft.rfft(A, n=p, axis=1)
    fb = np.fft.rfft(B, n=p, axis=1)
    counts = np.rint(np.fft.irfft(fa * fb, n=p, axis=1))
    lhs = (counts >= eta * p - 1e-9).sum(axis=1)
    sa = A.sum(axis=1)
    sb = B.sum(axis=1)
    rhs = np.minimum(p, sa + sb - 1) - math.ceil(3 * math.sqrt(eta) * p - 1e-9)
    return lhs >= rhs


def criterion_5() -> CriterionResult:
    """Popular-sumset bound: exhaustive small p, sampled larger p."""
    t0 = time.perf_counter()
    etas = (0.25, 0.04, 0.01)
    problems = []
    pairs_checked = 0
    for p in (5, 7, 11):
        subsets = _all_subsets_bool(p)
        sizes = subsets.sum(axis=1)
        fhat = np.fft.rfft(subsets, n=p, axis=1)
        for eta in etas:
            root = math.sqrt(eta) * p
            rows = np.flatnonzero(sizes >= root - 1e-9)
            fa = fhat[rows]
            sa = sizes[rows]
            ceil_term = math.ceil(3 * math.sqrt(eta) * p - 1e-9)
            for i in range(len(rows)):
                counts = np.rint(np.fft.irfft(fa[i] * fa, n=p, axis=1))
                lhs = (counts >= eta * p - 1e-9).sum(axis=1)
                rhs = np.minimum(p, sa[i] + sa - 1) - ceil_term
                bad = np.flatnonzero(lhs < rhs)
                pairs_checked += len(rows)
                if len(bad):
                    j = int(bad[0])
                    problems.append(
                        f"p={p} eta={eta}: pair rows ({int(rows[i])},{int(rows[j])}) "
                        f"lhs={int(lhs[j])} < rhs={int(rhs[j])}"
                    )
                    break
            if problems:
                break
        if problems:
            break
    if not problems:
        rng = np.random.Generator(np.random.PCG64(MASTER_SEED + 5))
        per_prime = 100_000 // 6 + 1
        for p in (13, 17, 19, 23, 29, 31):
            A = (rng.random((per_prime, p)) < 0.5).astype(np.float64)
            B = (rng.random((per_prime, p)) < 0.5).astype(np.float64)
            for eta in etas:
                root = math.sqrt(eta) * p
                ok_rows = (A.sum(axis=1) >= root - 1e-9) & (B.sum(axis=1) >= root - 1e-9)
                holds = _cd_batch_holds(A[ok_rows], B[ok_rows], p, eta)
                pairs_checked += int(ok_rows.sum())
                if not holds.all():
                    problems.append(f"p={p} eta={eta}: {int((~holds).sum())} random failures")
    details = "; ".join(problems) if problems else f"{pairs_checked} precondition-satisfying pairs, bound held every time"
    return CriterionResult(5, "popular-sumset-bound", not problems, details, time.perf_counter() - t0, 300)


def criterion_6() -> CriterionResult:
    """Local sum vanishing for 1 < q <= w, and the exact q=1 identity."""
    t0 = time.perf_counter()
    problems = []
    for k in (2, 3):
        ctx = build_w_context(k, 3)
        W = ctx.W.value
        Z = ctx.unit_classes().members()
        for b in Z:
            for a in range(W):
                expect = ctx.sigma(b) * complex(
                    math.cos(2 * math.pi * a * b / W), math.sin(2 * math.pi * a * b / W)
                )
                got = V_q(a, b, 1, ctx)
                if abs(got - expect) > 1e-9:
                    problems.append(f"k={k} b={b} a={a}: V_1 off by {abs(got - expect):.2e}")
                    break
            for q in (2, 3):
                for a in range(1, q):
                    if math.gcd(a, q) != 1:
                        continue
                    val = abs(V_q(a, b, q, ctx))
                    if val >= 1e-6:
                        problems.append(f"k={k} q={q} b={b} a={a}: |V_q| = {val:.6g}")
    # collapse repeated magnitude failures into one line per (k, q)
    uniq = sorted(set(problems))
    details = "; ".join(uniq[:6]) + (f"; ... {len(uniq)} failing sub-cases total" if len(uniq) > 6 else "")
    if not problems:
        details = "V_1 identity exact and V_q vanishes for q in {2,3}, k in {2,3}, all b"
    return CriterionResult(6, "local-sum-vanishing", not problems, details, time.perf_counter() - t0, 10)


def criterion_7() -> CriterionResult:
    """Majorant transform distance eta(N) strictly decreasing on the triple."""
    t0 = time.perf_counter()
    ctx = build_w_context(2, 2)
    etas = []
    for N in (1 << 10, 1 << 14, 1 << 18):
        etas.append(pseudorandomness_eta(ctx, 1, N, 4 * N))
    ok = etas[0] > etas[1] > etas[2]
    details = f"eta(2^10)={etas[0]:.8f}, eta(2^14)={etas[1]:.8f}, eta(2^18)={etas[2]:.8f}" + (
        "" if ok else " -- not decreasing"
    )
    return CriterionResult(7, "pseudorandomness-decay", ok, details, time.perf_counter() - t0, 300)


def criterion_8() -> CriterionResult:
    """Restriction constant stays bounded under N doubling."""
    t0 = time.perf_counter()
    ctx = build_w_context(2, 2)
    ks = []
    for N in (1 << 12, 1 << 14, 1 << 16):
        A = all_kth_powers(4 * N + 1, 2)
        f = build_f_b(A, N, ctx, 1)
        ks.append(restriction_constant(f, 6.5, 4 * N))
    ratios = [ks[1] / ks[0], ks[2] / ks[1]]
    ok = all(r <= 1.5 for r in ratios)
    details = f"K_hat = {ks[0]:.4f}, {ks[1]:.4f}, {ks[2]:.4f}; ratios {ratios[0]:.3f}, {ratios[1]:.3f}"
    return CriterionResult(8, "restriction-bounded", ok, details, time.perf_counter() - t0, 300)


def criterion_9() -> CriterionResult:
    """Exact counting machinery: five squares cover, tuple cross-check."""
    t0 = time.perf_counter()
    problems = []
    squares = all_kth_powers(100_000, 2)
    counts = representation_count(squares, 5, 100_000)
    window = counts[34:]
    if (window <= 0).any():
        first = 34 + int(np.argmax(window <= 0))
        problems.append(f"n={first} has no 5-square representation")
    rng = np.random.Generator(np.random.PCG64(MASTER_SEED + 9))
    for _ in range(40):
        size = int(rng.integers(1, 21))
        A = set(int(x) for x in rng.choice(np.arange(1, 60), size=size, replace=False))
        s = int(rng.integers(1, 4))
        n_max = s * 60
        fast = representation_count(A, s, n_max)
        slow = np.zeros(n_max + 1, dtype=np.int64)
        for combo in itertools.product(sorted(A), repeat=s):
            slow[sum(combo)] += 1
        if not np.array_equal(np.asarray(fast, dtype=np.int64), slow):
            problems.append(f"tuple cross-check failed for |A|={size}, s={s}")
            break
    details = "; ".join(problems) if problems else "all n in [34, 1e5] are sums of 5 positive squares; 40 tuple cross-checks exact"
    return CriterionResult(9, "counting-ground-truth", not problems, details, time.perf_counter() - t0, 60)


def criterion_10() -> CriterionResult:
    """Dense-block convolution positive on the window; parity control fails."""
    t0 = time.perf_counter()
    N, s, eps = 2000, 3, 0.2
    rng = np.random.Generator(np.random.PCG64(MASTER_SEED + 10))
    problems = []
    for trial in range(100):
        blocks = []
        for _ in range(s):
            size = int(rng.integers(1250, 1601))
            blocks.append(set(rng.choice(np.arange(1, N + 1), size=size, replace=False).tolist()))
        res = dense_sumset_check(blocks, eps, N)
        if not res.holds:
            problems.append(f"trial {trial}: min count {res.min_count} in window {res.window}")
            break
    odd = set(range(1, N + 1, 2))
    control = dense_sumset_check([odd, odd, odd], eps, N, enforce_preconditions=False)
    if control.holds:
        problems.append("parity negative control unexpectedly held")
    details = "; ".join(problems) if problems else f"100 instances positive on window; parity control fails as predicted (min={control.min_count})"
    return CriterionResult(10, "dense-sumset-window", not problems, details, time.perf_counter() - t0, 60)


def criterion_11() -> CriterionResult:
    """Full pipeline at s=8, N=2^14: gates plus window positivity."""
    t0 = time.perf_counter()
    N, s, eps, delta = 1 << 14, 8, 0.5, 0.3
    ctx = build_w_context(2, 2)
    A = all_kth_powers(4 * N + 1, 2)
    f = build_f_b(A, N, ctx, 1)
    fs = [f] * s
    report = transference_demo(fs, eps, delta, 4 * N)
    ok = report.holds and max(report.etas) <= 0.5
    details = (
        f"means ~ {report.means[0]:.4f}, eta = {report.etas[0]:.6f}, "
        f"K_hat = {report.K_hat:.3f}, bohr |B| = {report.bohr_sizes[0]}, "
        f"min conv on window = {report.min_convolution:.3g}"
    )
    if report.notes:
        details += "; " + "; ".join(report.notes)
    return CriterionResult(11, "transference-demo", ok, details, time.perf_counter() - t0, 600)


def criterion_12() -> CriterionResult:
    """Both solution counters agree on the whole toy grid."""
    t0 = time.perf_counter()
    problems = []
    combos = 0
    for t in range(1, 5):
        for k in range(1, 4):
            for X in range(1, 31):
                try:
                    J = vinogradov_count(t, k, X)
                except AssertionError as exc:
                    problems.append(f"(t={t},k={k},X={X}): {exc}")
                    break
                combos += 1
                if t == 1 and J != X:
                    problems.append(f"(t=1,k={k},X={X}): diagonal {J} != {X}")
            if problems:
                break
        if problems:
            break
    details = "; ".join(problems) if problems else f"{combos} grid points, both counters agree; t=1 diagonal exact"
    return CriterionResult(12, "solution-counters", not problems, details, time.perf_counter() - t0, 60)


ALL_CRITERIA = {
    1: criterion_1,
    2: criterion_2,
    3: criterion_3,
    4: criterion_4,
    5: criterion_5,
    6: criterion_6,
    7: criterion_7,
    8: criterion_8,
    9: criterion_9,
    10: criterion_10,
    11: criterion_11,
    12: criterion_12,
}


def run_all(numbers: list[int] | None = None, echo: bool = True) -> list[CriterionResult]:
    results = []
    for num in sorted(numbers or ALL_CRITERIA):
        res = ALL_CRITERIA[num]()
        results.append(res)
        if echo:
            print(res.line(), flush=True)
    return results
