import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from waringlab.primes import factorize_int, is_prime, primes_up_to, sieve_bools


def trial_division_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def test_primes_up_to_matches_trial_division():
    want = [n for n in range(2, 3000) if trial_division_prime(n)]
    assert primes_up_to(2999) == want


def test_sieve_small_edges():
    assert primes_up_to(1) == []
    assert primes_up_to(2) == [2]
    bools = sieve_bools(10)
    assert list(np.flatnonzero(bools)) == [2, 3, 5, 7]


@given(st.integers(min_value=0, max_value=200_000))
def test_is_prime_agrees_with_trial_division(n):
    assert is_prime(n) == trial_division_prime(n)


def test_is_prime_strong_pseudoprimes():
    # Carmichael numbers and the classic base-2..7 strong pseudoprime
    for n in (561, 1729, 294409, 3215031751, 3825123056546413051):
        assert not is_prime(n)
    for n in (2**31 - 1, 999999937, 67280421310721):
        assert is_prime(n)


def test_factorize_int_semiprime_via_rho():
    n = 1000003 * 1000033
    assert factorize_int(n) == [(1000003, 1), (1000033, 1)]


def test_factorize_int_prime_powers():
    assert factorize_int(2**20) == [(2, 20)]
    assert factorize_int(3**5 * 7**2) == [(3, 5), (7, 2)]


@given(st.integers(min_value=2, max_value=10**9))
def test_factorize_int_reconstructs(n):
    fac = factorize_int(n)
    prod = 1
    for p, e in fac:
        assert is_prime(p)
        assert e >= 1
        prod *= p**e
    assert prod == n
    assert [p for p, _ in fac] == sorted(p for p, _ in fac)


def test_factorize_int_unit_and_zero():
    assert factorize_int(1) == []
    with pytest.raises(ValueError):
        factorize_int(0)
