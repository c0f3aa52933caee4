import numpy as np
import pytest

from conjtensor.linalg import hermitian_eig

from oracles import random_hermitian


def test_two_by_two_by_hand():
    w, V = hermitian_eig(np.array([[1, 1j], [-1j, 1]]))
    np.testing.assert_allclose(w, [0, 2], atol=1e-14)
    np.testing.assert_allclose(abs(V[:, 1]), [2**-0.5] * 2, atol=1e-14)


def test_diagonal_is_sorted():
    w, V = hermitian_eig(np.diag([3.0, -1.0, 2.0]))
    np.testing.assert_array_equal(w, [-1, 2, 3])
    np.testing.assert_allclose(abs(V), np.eye(3)[:, [1, 2, 0]], atol=0)


def test_one_by_one():
    w, V = hermitian_eig(np.array([[5.0]]))
    assert w[0] == 5 and V[0, 0] == 1


@pytest.mark.parametrize("n", [2, 5, 12, 30])
def test_against_reference(n):
    A = random_hermitian(np.random.default_rng(n), n)
    w, V = hermitian_eig(A)
    np.testing.assert_allclose(w, np.linalg.eigvalsh(A), atol=1e-11 * n)
    np.testing.assert_allclose(V.conj().T @ V, np.eye(n), atol=1e-12)
    np.testing.assert_allclose(A @ V, V * w, atol=1e-11 * n)


def test_repeated_eigenvalues():
    rng = np.random.default_rng(9)
    Q, _ = np.linalg.qr(rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4)))
    A = Q @ np.diag([1.0, 1.0, 1.0, -2.0]) @ Q.conj().T
    w, V = hermitian_eig((A + A.conj().T) / 2)
    np.testing.assert_allclose(w, [-2, 1, 1, 1], atol=1e-12)
