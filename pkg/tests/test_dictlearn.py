import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gapfill.dictlearn import (Deformation, LearnConfig, apply_deformation,
                               apply_deformation_adjoint, l11, learn_deformation)
from gapfill.errors import InvalidArgument
from gapfill.gabor import analyze, hann_frame, synthesize
from oracles import block_matrix, givens_sweep_optimum, random_banded_unitary


def _random_X(rng, rows, cols):
    return rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))


def _band_ok(D, d):
    i, j = np.nonzero(D)
    return np.all(np.abs(i - j) <= d)


def test_two_by_two_analytic():
    X = np.array([[1.0], [1.0]]) / np.sqrt(2)
    opt, _ = givens_sweep_optimum(X)
    assert abs(opt - 1.0) < 1e-6
    D = learn_deformation(X, LearnConfig(band_d=1))
    val = l11(D.matrix @ X)
    assert val <= 1.01 * opt
    assert D.report.initial_l11 == pytest.approx(np.sqrt(2))
    assert D.report.final_l11 == pytest.approx(val, rel=1e-12)


def test_two_row_real_data_near_sweep_optimum(rng):
    for _ in range(5):
        X = rng.standard_normal((2, 6))
        opt, _ = givens_sweep_optimum(X)
        D = learn_deformation(X, LearnConfig(band_d=1))
        assert l11(D.matrix @ X) <= 1.01 * opt


@pytest.mark.parametrize("seed", range(20))
def test_learning_contracts(seed):
    rng = np.random.default_rng(seed)
    Mh = int(rng.integers(2, 33))
    d = int(rng.integers(1, 4))
    X = _random_X(rng, Mh, int(rng.integers(1, 12)))
    D = learn_deformation(X, LearnConfig(band_d=d, iter_max=8))
    assert D.unitarity_error() <= 1e-8
    assert _band_ok(D.matrix, d)
    assert l11(D.matrix @ X) <= l11(X)
    assert D.report.final_l11 <= D.report.initial_l11


def test_structured_signal_gets_sparser(rng):
    # X is a hidden rotation of a sparse matrix, so learning must gain something
    S = np.zeros((8, 30), complex)
    S[rng.integers(0, 8, 30), np.arange(30)] = rng.standard_normal(30)
    U = random_banded_unitary(rng, 8, 1)
    X = U.conj().T @ S
    D = learn_deformation(X, LearnConfig(band_d=1), even_M=False)
    assert D.report.final_l11 < 0.95 * D.report.initial_l11


def test_dc_and_nyquist_rows_stay_real(rng):
    X = _random_X(rng, 6, 10)
    D = learn_deformation(X, LearnConfig(band_d=1))
    M = D.matrix
    assert np.all(M[0].imag == 0) and np.all(M[:, 0].imag == 0)
    assert np.all(M[-1].imag == 0) and np.all(M[:, -1].imag == 0)


def test_single_nonzero_row(rng):
    X = np.zeros((5, 7), complex)
    X[2] = _random_X(rng, 1, 7)
    D = learn_deformation(X)
    assert l11(D.matrix @ X) == pytest.approx(l11(X), rel=1e-12)


def test_zero_X_and_bad_input():
    D = learn_deformation(np.zeros((4, 3)))
    assert D.is_identity()
    with pytest.raises(InvalidArgument):
        learn_deformation(np.zeros((0, 3)))
    with pytest.raises(InvalidArgument):
        learn_deformation(np.array([[np.nan]]))
    with pytest.raises(InvalidArgument):
        LearnConfig(iter_max=0)


def test_single_outer_pass(rng):
    X = _random_X(rng, 6, 9)
    D = learn_deformation(X, LearnConfig(iter_max=1))
    assert D.report.iterations == 1
    assert D.report.final_l11 <= D.report.initial_l11


def test_deterministic(rng):
    X = _random_X(rng, 10, 6)
    a = learn_deformation(X, LearnConfig(band_d=2))
    b = learn_deformation(X, LearnConfig(band_d=2))
    assert np.array_equal(a.matrix, b.matrix)


def test_apply_matches_block_oracle(rng):
    Mh, N = 5, 4
    D = Deformation(random_banded_unitary(rng, Mh, 2), 2)
    c = _random_X(rng, 1, Mh * N)[0]
    B = block_matrix(D.matrix, N)
    assert np.max(np.abs(apply_deformation(D, c) - B @ c)) <= 1e-13
    assert np.max(np.abs(apply_deformation_adjoint(D, c) - B.conj().T @ c)) <= 1e-13
    q = _random_X(rng, 1, Mh * N)[0]
    lhs = np.vdot(q, apply_deformation(D, c))
    rhs = np.vdot(apply_deformation_adjoint(D, q), c)
    assert abs(lhs - rhs) <= 1e-12
    assert abs(np.linalg.norm(apply_deformation(D, c)) - np.linalg.norm(c)) <= 1e-10 * np.linalg.norm(c)
    back = apply_deformation_adjoint(D, apply_deformation(D, c))
    assert np.max(np.abs(back - c)) <= 1e-10


def test_identity_is_exact(rng):
    D = Deformation.identity(6, band_d=2)
    c = _random_X(rng, 1, 24)[0]
    assert np.array_equal(apply_deformation(D, c), c)
    assert np.array_equal(apply_deformation_adjoint(D, c), c)


def test_roundtrip_realness(rng):
    f = hann_frame(16, 4, 16, 64)
    x = rng.standard_normal(64)
    X = f.to_grid(analyze(f, x))
    D = learn_deformation(X, LearnConfig(band_d=2))
    c = apply_deformation_adjoint(D, apply_deformation(D, analyze(f, x)))
    y = synthesize(f, c)
    assert y.dtype == float
    assert np.linalg.norm(y - x) <= 1e-10 * np.linalg.norm(x)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.integers(2, 12), st.integers(1, 3))
def test_energy_invariance(seed, Mh, d):
    r = np.random.default_rng(seed)
    D = Deformation(random_banded_unitary(r, Mh, d), d)
    c = _random_X(r, 1, Mh * 3)[0]
    assert abs(np.linalg.norm(apply_deformation(D, c)) - np.linalg.norm(c)) <= 1e-10 * np.linalg.norm(c)


def test_band_validation_and_mismatch():
    M = np.eye(4, dtype=complex)
    M[0, 3] = 1.0
    with pytest.raises(InvalidArgument):
        Deformation(M, 1)
    with pytest.raises(InvalidArgument):
        apply_deformation(Deformation.identity(4), np.zeros(10))


def test_save_load(tmp_path, rng):
    D = learn_deformation(_random_X(rng, 6, 8), LearnConfig(band_d=2))
    D.save(tmp_path / "d.npz")
    E = Deformation.load(tmp_path / "d.npz")
    assert np.array_equal(D.matrix, E.matrix)
    assert E.band_d == 2 and E.report == D.report
    (tmp_path / "junk").write_bytes(b"nope")
    with pytest.raises(InvalidArgument):
        Deformation.load(tmp_path / "junk")
