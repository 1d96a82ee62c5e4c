import numpy as np
from hypothesis import given
from hypothesis import strategies as st

from waringlab.convolve import (
    booleanize,
    convolve_exact,
    convolve_fft,
    convolve_many_exact,
    iterated_support,
)


def slow_convolve(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


@given(
    st.lists(st.integers(min_value=0, max_value=1000), min_size=1, max_size=40),
    st.lists(st.integers(min_value=0, max_value=1000), min_size=1, max_size=40),
)
def test_exact_matches_schoolbook(a, b):
    got = convolve_exact(np.array(a, dtype=object), np.array(b, dtype=object))
    assert list(got) == slow_convolve(a, b)


def test_exact_handles_huge_counts_without_overflow():
    a = np.full(200, 10**9, dtype=object)
    got = convolve_exact(a, a)
    want = slow_convolve(list(a), list(a))
    assert list(got) == want
    assert max(got) == 200 * 10**18


def test_exact_int64_sum_past_wraparound():
    # every element fits in int64 but their int64 sum wraps; a wrapped
    # coefficient bound would under-size the limbs and alias outputs
    a = np.full(3, 2**62, dtype=np.int64)
    got = convolve_exact(a, np.array([1, 1], dtype=np.int64))
    assert list(got) == [2**62, 2**63, 2**63, 2**62]
    assert got.dtype == object


def test_clip_truncates_output():
    a = np.array([1, 1, 1, 1], dtype=object)
    full = convolve_exact(a, a)
    clipped = convolve_exact(a, a, clip=3)
    assert list(clipped) == list(full[:4])


@given(
    st.lists(st.floats(min_value=0, max_value=100), min_size=1, max_size=64),
    st.lists(st.floats(min_value=0, max_value=100), min_size=1, max_size=64),
)
def test_fft_close_to_exact(a, b):
    ia = np.array([round(x) for x in a], dtype=object)
    ib = np.array([round(x) for x in b], dtype=object)
    got = convolve_fft(np.array(ia, dtype=float), np.array(ib, dtype=float))
    want = np.array(convolve_exact(ia, ib), dtype=float)
    assert np.allclose(got, want, rtol=1e-9, atol=1e-6)


def test_many_exact_is_left_fold():
    seqs = [np.array(x, dtype=object) for x in ([1, 2], [0, 1, 3], [5])]
    got = convolve_many_exact(seqs)
    want = convolve_exact(convolve_exact(seqs[0], seqs[1]), seqs[2])
    assert list(got) == list(want)


def test_booleanize():
    assert booleanize(np.array([0, 3, 0, 1], dtype=object)).tolist() == [0, 1, 0, 1]


def test_iterated_support_matches_brute():
    ind = np.zeros(8, dtype=np.int64)
    ind[[1, 4]] = 1
    sup = iterated_support(ind, 3)
    sums = {a + b + c for a in (1, 4) for b in (1, 4) for c in (1, 4)}
    assert set(np.flatnonzero(sup).tolist()) == sums


def test_iterated_support_clip():
    ind = np.zeros(5, dtype=np.int64)
    ind[[1, 4]] = 1
    sup = iterated_support(ind, 4, clip=9)
    assert len(sup) == 10
    assert set(np.flatnonzero(sup).tolist()) == {4, 7}  # 16 clipped away
