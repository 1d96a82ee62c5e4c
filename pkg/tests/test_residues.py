import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from waringlab.errors import CapacityError, PreconditionError
from waringlab.residues import (
    FactoredModulus,
    ResidueSet,
    build_k_context,
    build_w_context,
    crt_combine,
    eta,
    factorize,
    kth_power_classes,
    sigma_W,
    size_Z_formula,
    tau,
    unit_kth_power_classes,
)

SMALL_PRIMES = [2, 3, 5, 7, 11, 13]


# ---------------------------------------------------------------- oracles


def brute_power_classes(q: int, k: int, units_only: bool) -> set[int]:
    out = set()
    for z in range(q):
        if units_only and math.gcd(z, q) != 1:
            continue
        out.add(pow(z, k, q))
    return out


def brute_sigma(b: int, W: int, k: int) -> int:
    return sum(1 for z in range(W) if pow(z, k, W) == b % W)


# ------------------------------------------------------- small constants


def test_tau_is_p_adic_valuation_of_k():
    assert tau(2, 2) == 1
    assert tau(4, 2) == 2
    assert tau(12, 2) == 2
    assert tau(12, 3) == 1
    assert tau(5, 3) == 0


def test_eta_table():
    # defined when (p-1) | k; tau + 2 at p = 2 with 2 | k, else tau + 1
    assert eta(2, 2) == 3
    assert eta(4, 2) == 4
    assert eta(3, 2) == 1  # odd k: tau = 0, no 2-adic bump
    assert eta(2, 3) == 1
    assert eta(6, 3) == 2
    assert eta(4, 3) == 1
    assert eta(6, 7) == 1
    assert eta(12, 5) == 1
    with pytest.raises(PreconditionError):
        eta(3, 3)  # (p-1) = 2 does not divide 3


def test_forced_modulus_values():
    assert build_k_context(2).R == 24
    assert build_k_context(3).R == 2
    assert build_k_context(4).R == 240


def test_omega_counts_distinct_primes():
    assert build_k_context(2).omega_k == 1
    assert build_k_context(6).omega_k == 2
    assert build_k_context(12).omega_k == 2


def test_k_context_range_gate():
    with pytest.raises(PreconditionError):
        build_k_context(1)
    with pytest.raises(PreconditionError):
        build_k_context(13)


# ------------------------------------------------------------ residue sets


def test_residue_set_round_trip():
    q = factorize(30)
    A = ResidueSet.from_members(q, [0, 7, 29])
    assert A.members() == [0, 7, 29]
    assert len(A) == 3


def test_residue_set_ops_match_set_algebra():
    q = factorize(21)
    A = ResidueSet.from_members(q, [1, 2, 5, 20])
    B = ResidueSet.from_members(q, [2, 3, 5])
    assert set(A.union(B).members()) == {1, 2, 3, 5, 20}
    assert set(A.intersection(B).members()) == {2, 5}
    assert set(A.complement().members()) == set(range(21)) - {1, 2, 5, 20}


def test_residue_set_members_reduce_mod_q():
    q = factorize(10)
    assert ResidueSet.from_members(q, [10, -1, 23]).members() == [0, 3, 9]
    with pytest.raises(PreconditionError):
        ResidueSet(q, -1)
    with pytest.raises(PreconditionError):
        ResidueSet(q, 1 << 10)


def test_residue_set_mixed_moduli_rejected():
    A = ResidueSet.from_members(factorize(10), [1])
    B = ResidueSet.from_members(factorize(12), [1])
    with pytest.raises(PreconditionError):
        A.union(B)


def test_indicator_shape():
    q = factorize(6)
    ind = ResidueSet.from_members(q, [0, 4]).to_indicator()
    assert ind.tolist() == [1, 0, 0, 0, 1, 0]


# ------------------------------------------------------------------- CRT


def test_crt_combine_worked():
    # x = 2 mod 3, x = 3 mod 5 -> 8 mod 15
    assert crt_combine([(2, factorize(3)), (3, factorize(5))]) == 8


def test_crt_combine_rejects_common_factor():
    with pytest.raises(PreconditionError):
        crt_combine([(1, factorize(6)), (2, factorize(10))])


@given(st.integers(min_value=0, max_value=10**6))
def test_crt_round_trip(x):
    mods = [7, 11, 13, 27]
    r = crt_combine([(x % m, factorize(m)) for m in mods])
    assert r == x % (7 * 11 * 13 * 27)


# ---------------------------------------------------------- power classes


@given(
    st.sampled_from([4, 8, 9, 15, 16, 25, 27, 35, 36, 49]),
    st.integers(min_value=2, max_value=6),
)
def test_power_classes_match_enumeration(q, k):
    fq = factorize(q)
    assert set(kth_power_classes(fq, k).members()) == brute_power_classes(q, k, False)
    assert set(unit_kth_power_classes(fq, k).members()) == brute_power_classes(q, k, True)


def test_size_formula_matches_enumeration_everywhere_small():
    for p in SMALL_PRIMES:
        e = 1
        while p**e <= 3000:
            for k in range(2, 8):
                got = size_Z_formula(p, e, k)
                want = len(brute_power_classes(p**e, k, True))
                assert got == want, (p, e, k)
            e += 1


def test_size_formula_two_adic_branch():
    # (Z/2^e)* is not cyclic for e >= 3: squares mod 8 are just {1}
    assert size_Z_formula(2, 3, 2) == 1
    assert size_Z_formula(2, 4, 2) == 2
    assert size_Z_formula(2, 4, 4) == 1
    assert size_Z_formula(5, 2, 2) == 10  # phi(25)/2


def test_size_formula_gates():
    with pytest.raises(PreconditionError):
        size_Z_formula(4, 1, 2)
    with pytest.raises(CapacityError):
        size_Z_formula(2, 64, 2)


# ------------------------------------------------------------- W context


def test_w_values():
    assert build_w_context(2, 2).W.value == 4
    assert build_w_context(2, 3).W.value == 36
    assert build_w_context(3, 3).W.value == 216
    assert build_w_context(2, 5).W.value == 900


@given(st.integers(min_value=2, max_value=4), st.integers(min_value=2, max_value=4))
def test_sigma_matches_brute_count(k, w):
    ctx = build_w_context(k, w)
    W = ctx.W.value
    for b in range(0, W, max(1, W // 17)):
        assert ctx.sigma(b) == brute_sigma(b, W, k)


def test_sigma_total_is_W():
    for k, w in ((2, 2), (2, 3), (3, 2), (3, 3), (4, 2)):
        ctx = build_w_context(k, w)
        assert int(ctx.sigma_table().sum()) == ctx.W.value


def test_sigma_W_free_function():
    ctx = build_w_context(2, 3)
    assert sigma_W(1, ctx) == brute_sigma(1, 36, 2)
    assert sigma_W(2, ctx) == 0


def test_unit_classes_of_w_context():
    ctx = build_w_context(2, 3)  # W = 36
    assert set(ctx.unit_classes().members()) == brute_power_classes(36, 2, True)


def test_forced_modulus_divides_W_only_for_k_at_least_3():
    # v_2(W) = k is below eta(k,2) = tau+2 exactly when k = 2
    k2 = build_k_context(2)
    W = build_w_context(2, 3).W.value  # w = k+1 = 3
    assert W % k2.R != 0
    for k in (3, 4):
        ctx = build_k_context(k)
        W = build_w_context(k, k + 1).W.value
        assert W % ctx.R == 0


def test_factored_modulus_structure():
    q = factorize(360)
    assert q.value == 360
    assert q.primes == (2, 3, 5)
    assert not q.is_squarefree()
    assert q.radical() == 30
    assert factorize(105).is_squarefree()
    with pytest.raises(PreconditionError):
        FactoredModulus(12, ((2, 1), (3, 1)))


def test_factorize_rejects_nonpositive():
    with pytest.raises(CapacityError):
        factorize(0)
