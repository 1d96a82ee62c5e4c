"""The local problem: majority subsets of Z(q) and their s-fold sumsets.

(q, s) is certified when every A with |A| > |Z(q)|/2 satisfies
sA = {a in Z_q : a == s mod gcd(R_k, q)}. Every member of Z(q) is
1 mod gcd(R_k, q), which makes the target class the best possible and
the verdict monotone in s; both facts are exploited by minimal_waring_s
and re-proved in the tests rather than assumed here.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError, WaringlabError
from .residues import (
    FactoredModulus,
    KContext,
    ResidueSet,
    WContext,
    unit_kth_power_classes,
)
from .sumsets import iterated_sumset, solve_representation

EXHAUSTIVE_Z_CAP = 24


@dataclass(frozen=True)
class WaringPairReport:
    q: FactoredModulus
    s: int
    k: int
    holds: bool
    counterexample: tuple[tuple[int, ...], int] | None
    sets_checked: int

    def __post_init__(self) -> None:
        if not self.holds:
            assert self.counterexample is not None


def target_class(q: FactoredModulus, s: int, ctx: KContext) -> ResidueSet:
    """{a in Z_q : a == s mod gcd(R_k, q)} as a bitset."""
    d = math.gcd(ctx.R, q.value)
    bits = 0
    for a in range(s % d, q.value, d):
        bits |= 1 << a
    return ResidueSet(q, bits)


def _subset_holds(
    members: list[int], idxs: tuple[int, ...], s: int, target: ResidueSet, q: FactoredModulus
) -> int | None:
    """None when sA = target, else a missing (or surplus) witness residue."""
    bits = 0
    for i in idxs:
        bits |= 1 << members[i]
    reach = iterated_sumset(ResidueSet(q, bits), s)
    if reach == target:
        return None
    diff = reach.bits ^ target.bits
    return (diff & -diff).bit_length() - 1


def _majority_index_tuples(m: int):
    for size in range(m // 2 + 1, m + 1):
        yield from itertools.combinations(range(m), size)


def waring_pair_exhaustive(
    q: FactoredModulus,
    s: int,
    ctx: KContext,
    threads: int = 1,
    shuffle_seed: int | None = None,
) -> WaringPairReport:
    """Check every majority subset of Z(q).

    Enumeration order is by size then lexicographic; shuffle_seed
    permutes it (the verdict must not care, and a test insists). The
    subset stream is partitioned round-robin across threads and merged
    deterministically: the counterexample earliest in the enumeration
    wins.
    """
    Z = unit_kth_power_classes(q, ctx.k)
    members = Z.members()
    m = len(members)
    if m > EXHAUSTIVE_Z_CAP:
        raise PreconditionError(
            f"|Z({q.value})| = {m} exceeds exhaustive cap {EXHAUSTIVE_Z_CAP}; "
            "use waring_pair_random"
        )
    if s < 1:
        raise PreconditionError("s must be >= 1")
    target = target_class(q, s, ctx)
    order = list(_majority_index_tuples(m))
    if shuffle_seed is not None:
        rng = np.random.Generator(np.random.PCG64(shuffle_seed))
        rng.shuffle(order)

    def scan(offset: int) -> tuple[int, tuple[int, ...], int] | None:
        for pos in range(offset, len(order), max(1, threads)):
            missing = _subset_holds(members, order[pos], s, target, q)
            if missing is not None:
                return pos, order[pos], missing
        return None

    if threads <= 1:
        hits = [scan(0)]
    else:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            hits = list(ex.map(scan, range(threads)))
    hits = [h for h in hits if h is not None]
    if not hits:
        return WaringPairReport(q, s, ctx.k, True, None, len(order))
    pos, idxs, missing = min(hits)
    A = tuple(members[i] for i in idxs)
    return WaringPairReport(q, s, ctx.k, False, (A, missing), len(order))


def waring_pair_random(
    q: FactoredModulus, s: int, ctx: KContext, trials: int, seed: int
) -> WaringPairReport:
    """One-sided randomized check over `trials` majority subsets.

    Subsets are uniform over all majority subsets: the size is drawn
    proportionally to binomial weight, then a uniform combination of
    that size. PCG64 stream, fully determined by `seed`.
    """
    if trials < 1:
        raise PreconditionError("trials must be >= 1")
    Z = unit_kth_power_classes(q, ctx.k)
    members = np.array(Z.members(), dtype=np.int64)
    m = len(members)
    target = target_class(q, s, ctx)
    sizes = np.arange(m // 2 + 1, m + 1)
    weights = np.array([math.comb(m, int(t)) for t in sizes], dtype=np.float64)
    weights /= weights.sum()
    rng = np.random.Generator(np.random.PCG64(seed))
    for trial in range(trials):
        size = int(rng.choice(sizes, p=weights))
        chosen = rng.choice(members, size=size, replace=False)
        bits = 0
        for a in chosen.tolist():
            bits |= 1 << a
        reach = iterated_sumset(ResidueSet(q, bits), s)
        if reach != target:
            diff = reach.bits ^ target.bits
            missing = (diff & -diff).bit_length() - 1
            return WaringPairReport(
                q, s, ctx.k, False, (tuple(sorted(chosen.tolist())), missing), trial + 1
            )
    return WaringPairReport(q, s, ctx.k, True, None, trials)


def combine_waring_pairs_check(
    q: FactoredModulus,
    r: FactoredModulus,
    s: int,
    t: int,
    ctx: KContext,
    trials: int = 2000,
    seed: int = 0,
) -> bool:
    """Coprime composition: verified (q,s) and (r,t) should yield (qr, s+t).

    Both inputs are re-verified exhaustively and rejected if they fail;
    the composite is checked exhaustively when small enough, else by
    seeded sampling.
    """
    if math.gcd(q.value, r.value) != 1:
        raise PreconditionError(f"moduli {q.value}, {r.value} share a factor")
    for mod, fold in ((q, s), (r, t)):
        rep = waring_pair_exhaustive(mod, fold, ctx)
        if not rep.holds:
            raise PreconditionError(
                f"({mod.value},{fold}) is not a verified pair: "
                f"counterexample {rep.counterexample}"
            )
    from .residues import factorize

    qr = factorize(q.value * r.value)
    Z_qr = unit_kth_power_classes(qr, ctx.k)
    if len(Z_qr) <= EXHAUSTIVE_Z_CAP:
        return waring_pair_exhaustive(qr, s + t, ctx).holds
    return waring_pair_random(qr, s + t, ctx, trials, seed).holds


def minimal_waring_s(
    q: FactoredModulus, ctx: KContext, s_max: int = 64
) -> tuple[int, WaringPairReport, WaringPairReport | None]:
    """Smallest s with (q, s) certified, by upward scan.

    Once (q,s) holds, (q,s+1) holds too: adding one more summand from
    Z(q) shifts the full congruence class by a unit that is 1 mod
    gcd(R_k, q), which is again the full class. So the first hit is
    minimal. Returns (s, holding report, failing report at s-1 or None
    when s=1).
    """
    prev: WaringPairReport | None = None
    for s in range(1, s_max + 1):
        rep = waring_pair_exhaustive(q, s, ctx)
        if rep.holds:
            return s, rep, prev
        prev = rep
    raise WaringlabError(f"no s <= {s_max} certifies q={q.value}")


def hensel_solvable(a: int, c: int, q: FactoredModulus, e: int, k: int) -> bool:
    """Solubility of x^k = a + c*q (mod q^e) for square-free q coprime to k.

    Root found by search mod p, then Newton-lifted; since p divides
    neither k nor the root, each lift is exact and the final root is
    re-verified. Under the stated preconditions this returns True for
    every c; the point of the function is to witness that numerically.
    """
    if not q.is_squarefree():
        raise PreconditionError(f"q={q.value} is not square-free")
    if math.gcd(q.value, k) != 1:
        raise PreconditionError(f"gcd(q,k) = {math.gcd(q.value, k)} != 1")
    if e < 1:
        raise PreconditionError("e must be >= 1")
    if not (0 <= c < q.value ** (e - 1)):
        raise PreconditionError(f"c={c} outside [0, q^(e-1))")
    Z = unit_kth_power_classes(q, k)
    if a % q.value not in Z:
        raise PreconditionError(f"a={a} is not an invertible k-th power class mod {q.value}")
    m = a + c * q.value
    for p, _ in q.factors:
        root = None
        for x in range(1, p):
            if pow(x, k, p) == m % p:
                root = x
                break
        if root is None:
            return False
        pe = p
        for _ in range(e - 1):
            pe *= p
            fx = (pow(root, k, pe) - m) % pe
            dfx = k * pow(root, k - 1, pe) % pe
            root = (root - fx * pow(dfx, -1, pe)) % pe
        if pow(root, k, pe) != m % pe:
            return False
    return True


def mean_condition_selector(
    f: dict[int, float], n: int, s: int, ctx: WContext, kctx: KContext
) -> list[int]:
    """Pick b_1..b_s in Z(W) with sum = n mod W, each f(b_i) > 0, and
    sum of f-values above s/2.

    Construction: mu = max f forces the threshold set A = {f > 1-mu}
    to be a majority of Z(W); s' = 8k*omega(k)+2k+2 summands come from
    A via representation search, the rest are copies of the argmax.
    A failed representation search would contradict the local pair
    (W, s') and is raised as a hard internal error.
    """
    W = ctx.W.value
    Z = ctx.unit_classes()
    members = Z.members()
    if not members:
        raise PreconditionError("Z(W) is empty")
    vals = {b: float(f.get(b, 0.0)) for b in members}
    if any(not (0.0 <= v < 1.0) for v in vals.values()):
        raise PreconditionError("f must map Z(W) into [0,1)")
    mean = sum(vals.values()) / len(members)
    if not mean > 0.5:
        raise PreconditionError(f"mean condition fails: E f = {mean:.4f} <= 1/2")
    k, omega = kctx.k, kctx.omega_k
    s_min = 16 * k * omega + 4 * k + 4
    if s < s_min:
        raise PreconditionError(f"s={s} below threshold {s_min}")
    d = math.gcd(kctx.R, W)
    if n % d != s % d:
        raise PreconditionError(f"n={n} not congruent to s={s} mod {d}")
    mu = max(vals.values())
    b_star = min(b for b, v in vals.items() if v == mu)
    lam = 1.0 - mu
    A_members = [b for b in members if vals[b] > lam]
    # mean > 1/2 with values in [0,1) forces a strict majority above 1-mu
    assert 2 * len(A_members) > len(members)
    s_prime = 8 * k * omega + 2 * k + 2
    s_rest = s - s_prime
    bits = 0
    for b in A_members:
        bits |= 1 << b
    target = (n - s_rest * b_star) % W
    rep = solve_representation(ResidueSet(ctx.W, bits), s_prime, target)
    if rep is None:
        raise WaringlabError(
            f"representation search failed: target {target} not in "
            f"{s_prime}-fold sumset of the threshold set {A_members} mod {W}; "
            f"this contradicts the certified local pair"
        )
    out = rep + [b_star] * s_rest
    assert sum(out) % W == n % W
    assert all(vals[b] > 0.0 for b in out)
    assert sum(vals[b] for b in out) > s / 2
    return out
