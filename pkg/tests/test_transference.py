import numpy as np
import pytest

from waringlab.circle import all_kth_powers, build_f_b, build_nu_b, dft_grid
from waringlab.convolve import convolve_exact
from waringlab.errors import EmptyBohrSetError, PreconditionError
from waringlab.residues import build_w_context
from waringlab.transference import (
    WeightedSequence,
    bohr_set,
    check_uniformity,
    convolution,
    dense_model,
    dense_sumset_check,
    large_spectrum,
    transference_demo,
)

CTX = build_w_context(2, 2)
N12 = 1 << 12


def squares_f(N):
    return build_f_b(all_kth_powers(4 * N + 1, 2), N, CTX, 1)


# ----------------------------------------------------------- spectrum/Bohr


def test_spectrum_contains_zero_for_mean_one():
    f = squares_f(N12)
    spec = large_spectrum(f, 0.5, 4 * N12)
    assert 0.0 in spec
    assert 0.5 in spec  # all support is even: full mass at 1/2


def test_bohr_set_elements_satisfy_constraints():
    f = squares_f(N12)
    spec = large_spectrum(f, 0.6, 4 * N12)
    B = bohr_set(spec, 0.6, N12)
    assert len(B) > 0
    for g in B.frequencies:
        x = B.elements * g
        assert np.all(np.abs(x - np.round(x)) < 0.6 / (2 * np.pi))
    assert B.elements.max() <= 0.6 * N12


def test_bohr_set_empty_at_nominal_delta():
    # at delta = 0.3 the spectrum has over a hundred frequencies and no
    # common near-integer point survives; the pipeline handles it by retrying
    f = squares_f(N12)
    spec = large_spectrum(f, 0.3, 4 * N12)
    assert len(spec) > 100
    with pytest.raises(EmptyBohrSetError):
        bohr_set(spec, 0.3, N12)


def test_bohr_gates():
    with pytest.raises(PreconditionError):
        bohr_set([0.5], 0.3, 2)  # delta*N below 1


# ------------------------------------------------------------- dense model


def test_model_mass_and_positivity():
    f = squares_f(N12)
    m = dense_model(f, 0.6, 4 * N12)
    assert float(m._ext.sum()) == pytest.approx(f.total(), rel=1e-9)
    assert np.all(m.f_star.values >= 0)
    assert np.allclose(m.f_star.values + m.f_unf, f.values, atol=1e-12)


def test_model_transform_is_pointwise_contraction():
    # f_star_hat = f_hat * |E_B|^2 / |B|^2 exactly, on the full grid,
    # which forces |f_star_hat| <= |f_hat| everywhere
    f = squares_f(N12)
    M = 4 * N12
    m = dense_model(f, 0.6, M)
    buf = np.zeros(M)
    idx = (np.arange(m._lo, m._lo + len(m._ext))) % M
    np.add.at(buf, idx, m._ext)
    star_hat = np.fft.fft(buf)
    f_hat = np.fft.fft(f.values, M)
    bohr_ind = np.zeros(M)
    bohr_ind[m.bohr.elements % M] = 1.0
    e_hat = np.fft.fft(bohr_ind)
    want = f_hat * np.abs(e_hat) ** 2 / len(m.bohr) ** 2
    scale = float(np.abs(f_hat).max())
    assert np.allclose(star_hat, want, atol=1e-9 * scale)
    assert np.all(np.abs(star_hat) <= np.abs(f_hat) + 1e-9 * scale)


def test_model_sup_measured_value():
    # measured once and pinned: the model at delta = 0.6 doubles up on the
    # even numbers, so its sup is near 2, not near 1
    f = squares_f(N12)
    m = dense_model(f, 0.6, 4 * N12)
    sup = float(m.f_star.values.max())
    assert sup == pytest.approx(2.0102432610985015, abs=1e-6)
    assert sup > 1.2


# -------------------------------------------------------------- uniformity


def test_uniformity_of_unbalanced_part():
    f = squares_f(N12)
    m = dense_model(f, 0.6, 4 * N12)
    res = check_uniformity(m, 0.6, 4 * N12)
    assert res.holds
    assert res.sup_norm_ratio == pytest.approx(0.583402576243652, abs=1e-9)
    tight = check_uniformity(m, 0.01, 4 * N12)
    assert not tight.holds


# ------------------------------------------------------------- convolution


def test_convolution_matches_exact_on_indicators():
    rng = np.random.Generator(np.random.PCG64(3))
    seqs = []
    for _ in range(3):
        v = np.zeros(41)
        v[rng.choice(np.arange(1, 41), size=12, replace=False)] = 1.0
        seqs.append(WeightedSequence(40, v, None))
    got = convolution(seqs)
    want = convolve_exact(
        convolve_exact(
            seqs[0].values.astype(object), seqs[1].values.astype(object)
        ),
        seqs[2].values.astype(object),
    )
    assert np.allclose(got, np.array(want, dtype=float), atol=1e-6)


def test_convolution_needs_two():
    f = squares_f(64)
    with pytest.raises(PreconditionError):
        convolution([f])


# ------------------------------------------------------------ dense blocks


def test_dense_sumset_positive_instance():
    N = 400
    rng = np.random.Generator(np.random.PCG64(5))
    blocks = [
        set(rng.choice(np.arange(1, N + 1), size=260, replace=False).tolist())
        for _ in range(3)
    ]
    res = dense_sumset_check(blocks, 0.2, N)
    assert res.holds
    assert res.min_count > 0
    lo, hi = res.window
    assert lo == (1 - 0.2**2 / 16) * 3 * N / 2
    assert hi == (1 + 0.2 / 4) * 3 * N / 2


def test_dense_sumset_parity_control():
    N = 400
    odd = set(range(1, N + 1, 2))
    res = dense_sumset_check([odd] * 3, 0.2, N, enforce_preconditions=False)
    assert not res.holds
    assert res.min_count == 0


def test_dense_sumset_gates():
    N = 400
    odd = set(range(1, N + 1, 2))
    with pytest.raises(PreconditionError):
        dense_sumset_check([odd] * 3, 0.2, N)  # fails the mean precondition
    with pytest.raises(PreconditionError):
        dense_sumset_check([{0, 1}], 0.2, N)  # single block
    with pytest.raises(PreconditionError):
        dense_sumset_check([{0, 1, 2}, {1, 2}], 0.2, N, enforce_preconditions=False)


# ------------------------------------------------------------ the pipeline


def test_demo_measured_outcome():
    # frozen end-to-end result at N = 2^12: the even-support obstruction
    # zeroes the convolution at odd points inside the window
    f = squares_f(N12)
    rep = transference_demo([f] * 8, 0.5, 0.3, 4 * N12)
    assert not rep.holds
    assert rep.min_convolution == 0.0
    assert rep.delta_used == pytest.approx(0.6)
    assert rep.retries == 1
    assert rep.etas[0] == pytest.approx(1 - 1 / N12, abs=1e-12)
    assert rep.K_hat == pytest.approx(1.0067915521692503, rel=1e-9)
    assert rep.bohr_sizes == (391,) * 8
    assert rep.deviation_within_bound
    assert any("vanishes" in note for note in rep.notes)
    assert any("16381" in note for note in rep.notes)


def test_demo_mean_gate():
    f = squares_f(N12)
    thin = WeightedSequence(N12, 0.3 * f.values, f.meta)
    with pytest.raises(PreconditionError, match="mean"):
        transference_demo([thin] * 8, 0.7, 0.3, 4 * N12)


def test_demo_rejects_mixed_lengths():
    with pytest.raises(PreconditionError):
        transference_demo([squares_f(64), squares_f(128)], 0.5, 0.3, 1024)
