import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conjtensor.bijection import (
    cps_decompose,
    css_project,
    embed_cps_to_css,
    flatten_square,
    g_forward,
    g_inverse,
    is_flattening_psd,
    s_forward,
    s_inverse,
)
from conjtensor.core import is_css, is_partial_symmetric, is_symmetric, multilinear_eval, tensor_norm
from conjtensor.errors import ArgumentError, StructureError
from conjtensor.forms import ConjugatePolynomial, MonomialKey, check_real_valued, eval_poly, parse_poly, print_poly

from oracles import (
    QUARTIC_TEXT,
    MIXED_TEXT,
    brute_conj_form,
    brute_g_coefficients,
    brute_s_coefficients,
    brute_stacked_form,
    crandn,
    quartic_tensor,
    mixed_matrix,
    random_cps,
    random_css,
    random_partial_symmetric,
    random_psd_cps,
    random_symmetric,
)

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def as_dict(p):
    return {(k.conj, k.plain): v for k, v in p.terms.items()}


def close_dicts(a, b, tol):
    return set(a) == set(b) and all(abs(a[k] - b[k]) <= tol * max(1, abs(b[k])) for k in a)


class TestS:
    def test_quartic_inverse(self):
        T = s_inverse(parse_poly(QUARTIC_TEXT))
        np.testing.assert_array_equal(T, quartic_tensor())

    def test_quartic_forward(self):
        assert print_poly(s_forward(quartic_tensor())) == QUARTIC_TEXT

    def test_hermitian_quadratic(self):
        A = np.array([[2, 1 - 1j], [1 + 1j, 0]])
        p = s_forward(A)
        assert p.terms == {MonomialKey.make([1], [1]): 2, MonomialKey.make([1], [2]): 1 - 1j, MonomialKey.make([2], [1]): 1 + 1j}

    def test_rejects_non_partial_symmetric(self):
        F = np.zeros((2,) * 4)
        F[0, 1, 0, 0] = 1
        with pytest.raises(StructureError):
            s_forward(F)

    def test_inverse_rejects_general_forms(self):
        with pytest.raises(StructureError):
            s_inverse(parse_poly(MIXED_TEXT))
        with pytest.raises(StructureError):
            s_inverse(parse_poly("~x1*x1"), d=2)

    def test_zero_polynomial(self):
        with pytest.raises(ArgumentError):
            s_inverse(ConjugatePolynomial(2))
        assert not s_inverse(ConjugatePolynomial(2), d=1).any()

    @settings(max_examples=40, deadline=None)
    @given(seeds)
    def test_forward_matches_brute_force(self, seed):
        rng = np.random.default_rng(seed)
        n, d = int(rng.integers(1, 4)), int(rng.integers(1, 3))
        F = random_partial_symmetric(rng, n, d)
        assert close_dicts(as_dict(s_forward(F)), brute_s_coefficients(F), 1e-12)

    @settings(max_examples=40, deadline=None)
    @given(seeds)
    def test_round_trips(self, seed):
        rng = np.random.default_rng(seed)
        n, d = int(rng.integers(1, 4)), int(rng.integers(1, 3))
        F = random_partial_symmetric(rng, n, d)
        p = s_forward(F)
        np.testing.assert_allclose(s_inverse(p), F, atol=1e-12)
        assert close_dicts(as_dict(s_forward(s_inverse(p))), as_dict(p), 1e-12)
        x = crandn(rng, n)
        assert abs(eval_poly(p, x) - brute_conj_form(F, x)) <= 1e-10 * max(1, abs(eval_poly(p, x)))

    @settings(max_examples=30, deadline=None)
    @given(seeds)
    def test_cps_iff_real_valued(self, seed):
        rng = np.random.default_rng(seed)
        n, d = int(rng.integers(1, 4)), int(rng.integers(1, 3))
        assert check_real_valued(s_forward(random_cps(rng, n, d)), tol=1e-10)
        assert not check_real_valued(s_forward(random_partial_symmetric(rng, n, d)), tol=1e-10)


class TestG:
    def test_mixed_forward(self):
        assert print_poly(g_forward(mixed_matrix())) == MIXED_TEXT

    def test_mixed_inverse(self):
        np.testing.assert_array_equal(g_inverse(parse_poly(MIXED_TEXT)), mixed_matrix())

    def test_rejects(self):
        with pytest.raises(StructureError):
            g_forward(np.array([[0, 1], [0, 0]]))
        with pytest.raises(StructureError):
            g_forward(np.eye(3))
        with pytest.raises(StructureError):
            g_inverse(parse_poly("x1 + x1^2"))

    @settings(max_examples=40, deadline=None)
    @given(seeds)
    def test_forward_matches_brute_force(self, seed):
        rng = np.random.default_rng(seed)
        n, d = int(rng.integers(1, 3)), int(rng.integers(1, 4))
        G = random_symmetric(rng, 2 * n, d)
        assert close_dicts(as_dict(g_forward(G)), brute_g_coefficients(G), 1e-12)

    @settings(max_examples=40, deadline=None)
    @given(seeds)
    def test_round_trips_and_evaluation(self, seed):
        rng = np.random.default_rng(seed)
        n, d = int(rng.integers(1, 3)), int(rng.integers(1, 4))
        G = random_symmetric(rng, 2 * n, d)
        p = g_forward(G)
        np.testing.assert_allclose(g_inverse(p), G, atol=1e-12)
        x = crandn(rng, n)
        v = eval_poly(p, x)
        assert abs(v - brute_stacked_form(G, x)) <= 1e-10 * max(1, abs(v))

    @settings(max_examples=30, deadline=None)
    @given(seeds)
    def test_css_iff_real_valued(self, seed):
        rng = np.random.default_rng(seed)
        n, d = int(rng.integers(1, 3)), int(rng.integers(1, 4))
        G = random_css(rng, n, d)
        assert is_css(G)
        assert check_real_valued(g_forward(G), tol=1e-10)
        assert is_css(g_inverse(g_forward(G)), 1e-10)
        H = random_symmetric(rng, 2 * n, d)
        assert not check_real_valued(g_forward(H), tol=1e-10)

    def test_css_project(self):
        rng = np.random.default_rng(3)
        G = random_symmetric(rng, 4, 3)
        P = css_project(G)
        assert is_css(P) and is_symmetric(P)
        np.testing.assert_allclose(css_project(P), P, atol=1e-15)


class TestDecompose:
    def test_hermitian_matches_eigendecomposition(self):
        A = np.array([[1, 1j], [-1j, 1]])
        dec = cps_decompose(A)
        np.testing.assert_allclose(dec.alphas, [2])
        np.testing.assert_allclose(dec.reconstruct(), A, atol=1e-14)
        assert dec.residual <= 1e-14

    def test_ordering_and_phase(self):
        rng = np.random.default_rng(4)
        dec = cps_decompose(random_cps(rng, 3, 2))
        assert list(dec.alphas) == sorted(dec.alphas, reverse=True)
        for H in dec.components:
            assert tensor_norm(H) == pytest.approx(1, abs=1e-14)
            assert is_symmetric(H)
            k = np.argmax(abs(H))
            assert abs(H.flat[k].imag) <= 1e-15 and H.flat[k].real > 0

    def test_rejects_non_cps(self):
        with pytest.raises(StructureError):
            cps_decompose(quartic_tensor())

    @settings(max_examples=25, deadline=None)
    @given(seeds)
    def test_sum_of_squared_moduli(self, seed):
        rng = np.random.default_rng(seed)
        n, d = int(rng.integers(1, 4)), int(rng.integers(1, 3))
        F = random_cps(rng, n, d)
        dec = cps_decompose(F)
        assert dec.residual <= 1e-9 * tensor_norm(F)
        x = crandn(rng, n)
        direct = brute_conj_form(F, x).real
        via = sum(a * abs(multilinear_eval(H, [x] * d)) ** 2 for a, H in zip(dec.alphas, dec.components))
        assert abs(direct - via) <= 1e-9 * max(1, abs(direct))

    def test_psd_flattening(self):
        rng = np.random.default_rng(5)
        assert is_flattening_psd(random_psd_cps(rng, 2, 2))
        assert not is_flattening_psd(np.diag([1.0, -1.0]))
        assert not np.linalg.eigvalsh(flatten_square(random_psd_cps(rng, 3, 2))).min() < -1e-12


class TestEmbedding:
    def test_hermitian_block_form(self):
        rng = np.random.default_rng(6)
        A = np.array([[1, 2 - 1j], [2 + 1j, -3]])
        G = embed_cps_to_css(A)
        np.testing.assert_allclose(G, [[0, 0, 0.5, 1 - 0.5j], [0, 0, 1 + 0.5j, -1.5], [0.5, 1 + 0.5j, 0, 0], [1 - 0.5j, -1.5, 0, 0]])
        x = crandn(rng, 2)
        assert brute_stacked_form(G, x) == pytest.approx(np.vdot(x, A @ x), abs=1e-12)

    @settings(max_examples=20, deadline=None)
    @given(seeds)
    def test_evaluation_identity(self, seed):
        rng = np.random.default_rng(seed)
        n, d = int(rng.integers(1, 3)), int(rng.integers(1, 3))
        F = random_cps(rng, n, d)
        G = embed_cps_to_css(F)
        assert is_css(G, 1e-12)
        assert is_partial_symmetric(F)
        x = crandn(rng, n)
        a, b = brute_stacked_form(G, x), brute_conj_form(F, x)
        assert abs(a - b) <= 1e-10 * max(1, abs(b))
