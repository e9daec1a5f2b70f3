"""Contract tests for the dense matrix kernel."""

import numpy as np
import pytest

from qloss import numerics
from qloss.errors import NotHermitianError, NotPSDError

from oracles import kron_oracle, random_hermitian, random_unitary_oracle

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SZ = np.diag([1.0, -1.0]).astype(complex)

# partial transpose of the four-term 2x3x3 state's residual, used as a golden
# matrix: entries 1/4 on a fixed sparsity pattern, spectrum known in closed form
EX4_PT = np.zeros((9, 9))
for _r, _c in [(0, 4), (4, 0), (1, 1), (3, 3), (5, 5), (7, 7), (4, 8), (8, 4)]:
    EX4_PT[_r, _c] = 0.25
EX4_PT_SPECTRUM = np.sort([-1 / (2 * np.sqrt(2)), 1 / (2 * np.sqrt(2)),
                           0.25, 0.25, 0.25, 0.25, 0.0, 0.0, 0.0])


def test_kron_identity():
    np.testing.assert_allclose(numerics.kron(np.eye(2), np.eye(2)), np.eye(4))


def test_kron_diagonal():
    got = numerics.kron(np.diag([1.0, 2.0]), np.diag([3.0, 4.0]))
    np.testing.assert_allclose(got, np.diag([3.0, 4.0, 6.0, 8.0]))


def test_kron_pauli_corner_entries():
    got = numerics.kron(SX, SX)
    assert got[0, 3] == 1 and got[3, 0] == 1
    assert got[0, 0] == 0


def test_kron_matches_loop_oracle():
    rng = np.random.default_rng(11)
    a = rng.normal(size=(3, 2)) + 1j * rng.normal(size=(3, 2))
    b = rng.normal(size=(2, 4)) + 1j * rng.normal(size=(2, 4))
    np.testing.assert_allclose(numerics.kron(a, b), kron_oracle(a, b), atol=1e-14)


def test_eigh_pauli_z_spectrum():
    w, _ = numerics.eigh(SZ)
    np.testing.assert_allclose(w, [-1.0, 1.0])


def test_eigh_identity():
    w, _ = numerics.eigh(np.eye(5))
    np.testing.assert_allclose(w, np.ones(5))


def test_eigh_golden_pt_spectrum():
    w, _ = numerics.eigh(EX4_PT)
    np.testing.assert_allclose(w, EX4_PT_SPECTRUM, atol=1e-12)


def test_eigh_rejects_non_hermitian():
    with pytest.raises(NotHermitianError):
        numerics.eigh(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_eigh_reconstruction_random():
    rng = np.random.default_rng(0)
    for dim in (2, 3, 8, 17, 32):
        h = random_hermitian(rng, dim)
        w, v = numerics.eigh(h)
        assert np.all(np.diff(w) >= 0)
        np.testing.assert_allclose((v * w) @ v.conj().T, h, atol=1e-10)
        np.testing.assert_allclose(v.conj().T @ v, np.eye(dim), atol=1e-10)


def test_svd_diagonal():
    _, s, _ = numerics.svd(np.diag([3.0, 1.0, 2.0]))
    np.testing.assert_allclose(s, [3.0, 2.0, 1.0])


def test_svd_zero_matrix():
    _, s, _ = numerics.svd(np.zeros((4, 4)))
    np.testing.assert_allclose(s, np.zeros(4))


def test_svd_reconstruction_random():
    rng = np.random.default_rng(1)
    for shape in ((8, 8), (5, 9), (64, 64)):
        m = rng.normal(size=shape) + 1j * rng.normal(size=shape)
        u, s, v = numerics.svd(m)
        k = min(shape)
        np.testing.assert_allclose(u @ np.diag(s) @ v.conj().T, m, atol=1e-10)
        np.testing.assert_allclose(u.conj().T @ u, np.eye(k), atol=1e-10)
        np.testing.assert_allclose(v.conj().T @ v, np.eye(k), atol=1e-10)
        assert np.all(np.diff(s) <= 0) and np.all(s >= 0)


def test_svd_non_finite_input_raises_convergence_failure():
    from qloss.errors import ConvergenceFailureError
    with pytest.raises(ConvergenceFailureError):
        numerics.svd(np.array([[np.nan, 0.0], [0.0, 1.0]]))


def test_trace_norm_hermitian_diagonal():
    assert numerics.trace_norm(np.diag([1.0, -2.0, 3.0])) == pytest.approx(6.0)


def test_trace_norm_density_matrix_is_one():
    rng = np.random.default_rng(2)
    u = random_unitary_oracle(rng, 5)
    rho = (u * rng.dirichlet(np.ones(5))) @ u.conj().T
    assert numerics.trace_norm(rho) == pytest.approx(1.0, abs=1e-12)


def test_trace_norm_golden_pt():
    assert numerics.trace_norm(EX4_PT) == pytest.approx(1.0 + 1.0 / np.sqrt(2), abs=1e-12)


def test_ky_fan_examples():
    assert numerics.ky_fan_norm(np.diag([1.0, 2.0, 3.0])) == pytest.approx(6.0)
    assert numerics.ky_fan_norm(np.zeros((3, 3))) == 0.0


def test_ky_fan_is_trace_norm():
    assert numerics.ky_fan_norm is numerics.trace_norm
    rng = np.random.default_rng(3)
    m = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
    assert numerics.ky_fan_norm(m) == pytest.approx(numerics.trace_norm(m), abs=1e-12)


def test_trace_norm_unitary_invariance():
    rng = np.random.default_rng(4)
    m = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
    base = numerics.trace_norm(m)
    for _ in range(5):
        u = random_unitary_oracle(rng, 6)
        w = random_unitary_oracle(rng, 6)
        assert numerics.trace_norm(u @ m @ w) == pytest.approx(base, abs=1e-10)


def test_inv_sqrt_psd_identity():
    np.testing.assert_allclose(numerics.inv_sqrt_psd(np.eye(3)), np.eye(3), atol=1e-12)


def test_inv_sqrt_psd_diagonal():
    got = numerics.inv_sqrt_psd(np.diag([4.0, 1.0]))
    np.testing.assert_allclose(got, np.diag([0.5, 1.0]), atol=1e-12)


def test_inv_sqrt_psd_support_projection():
    got = numerics.inv_sqrt_psd(np.diag([1.0, 0.0]))
    np.testing.assert_allclose(got, np.diag([1.0, 0.0]), atol=1e-12)


def test_inv_sqrt_psd_rejects_negative():
    with pytest.raises(NotPSDError):
        numerics.inv_sqrt_psd(np.diag([1.0, -1e-6]))


def test_sqrt_psd_squares_back():
    rng = np.random.default_rng(5)
    u = random_unitary_oracle(rng, 4)
    h = (u * [0.5, 0.3, 0.2, 0.0]) @ u.conj().T
    root = numerics.sqrt_psd(h)
    np.testing.assert_allclose(root @ root, h, atol=1e-12)
