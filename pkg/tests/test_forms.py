import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conjtensor.errors import DimensionError, ParseError
from conjtensor.forms import (
    ConjugatePolynomial,
    FormClass,
    MonomialKey,
    check_real_valued,
    classify_form,
    conjugate_key,
    eval_poly,
    parse_poly,
    print_poly,
)

from oracles import QUARTIC_TEXT, MIXED_TEXT, crandn, random_real_valued_poly, random_violating_poly

K = MonomialKey.make
seeds = st.integers(min_value=0, max_value=2**32 - 1)


class TestParse:
    def test_quartic(self):
        p = parse_poly(QUARTIC_TEXT)
        assert p.n == 2
        assert p.terms == {
            K([1, 1], [1, 1]): 1 - 1j,
            K([1, 2], [1, 2]): 4,
            K([1, 2], [2, 2]): 6,
        }

    def test_mixed(self):
        p = parse_poly(MIXED_TEXT)
        assert p.terms == {
            K([1, 1], []): 1j,
            K([1], [1]): 2,
            K([2], [1]): 4,
            K([], [2, 2]): 3,
        }

    def test_cancellation(self):
        assert parse_poly("x1 - x1").is_zero()

    def test_like_terms_merge_across_orderings(self):
        p = parse_poly("x2*~x1 + ~x1*x2 + 2*x2*~x1")
        assert p.terms == {K([1], [2]): 4}

    def test_complex_literals(self):
        assert parse_poly("(2+3i)*x1").terms == {K([], [1]): 2 + 3j}
        assert parse_poly("(2-i)*x1").terms == {K([], [1]): 2 - 1j}
        assert parse_poly("(0.5)*x1").terms == {K([], [1]): 0.5}
        assert parse_poly("2*i*x1").terms == {K([], [1]): 2j}

    def test_powers_of_factors(self):
        assert parse_poly("(1+1i)^2").terms == {K([], []): 2j}
        assert parse_poly("~x1^2^2").terms == {K([1] * 4, []): 1}

    def test_leading_sign(self):
        assert parse_poly("-x1 + 2").terms == {K([], []): 2, K([], [1]): -1}

    def test_declared_dimension(self):
        assert parse_poly("x1", n=3).n == 3
        with pytest.raises(ParseError):
            parse_poly("x4", n=3)

    @pytest.mark.parametrize(
        "text, line, column",
        [
            ("x1 + * x2", 1, 6),
            ("x0", 1, 1),
            ("x1 +\n  y", 2, 3),
            ("(1+2i", 1, 6),
            ("x1^x2", 1, 4),
            ("~3", 1, 2),
            ("", 1, 1),
        ],
    )
    def test_errors_carry_position(self, text, line, column):
        with pytest.raises(ParseError) as info:
            parse_poly(text)
        assert (info.value.line, info.value.column) == (line, column)


class TestPrint:
    def test_zero(self):
        assert print_poly(ConjugatePolynomial(2)) == "0"

    def test_unit_coefficient_omitted(self):
        assert print_poly(parse_poly("~x1*x2")) == "~x1*x2"
        assert print_poly(parse_poly("-~x1*x2")) == "-~x1*x2"

    def test_fixtures_round_trip_verbatim(self):
        assert print_poly(parse_poly(QUARTIC_TEXT)) == QUARTIC_TEXT
        assert print_poly(parse_poly(MIXED_TEXT)) == MIXED_TEXT

    def test_ordering(self):
        p = parse_poly("x1*x2 + 3 + ~x1 + x2 + ~x1*~x1")
        assert print_poly(p) == "3 + ~x1 + x2 + ~x1^2 + x1*x2"

    @settings(max_examples=200, deadline=None)
    @given(seeds)
    def test_round_trip_exact(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(1, 4))
        pairs = []
        for _ in range(int(rng.integers(0, 6))):
            deg = int(rng.integers(0, 5))
            k = int(rng.integers(0, deg + 1))
            key = K(rng.integers(1, n + 1, size=k).tolist(), rng.integers(1, n + 1, size=deg - k).tolist())
            re, im = rng.standard_normal(2) * 10.0 ** rng.integers(-6, 6, size=2)
            c = complex([re, 0.0, float(round(re))][rng.integers(3)], [im, 0.0, 1.0, -1.0][rng.integers(4)])
            pairs.append((key, c))
        p = ConjugatePolynomial.from_terms(n, pairs)
        q = parse_poly(print_poly(p), n=n)
        assert q.terms == p.terms


class TestEval:
    def test_squared_modulus(self):
        z = 3 - 4j
        assert eval_poly(parse_poly("~x1*x1"), [z]) == 25

    def test_mixed_at_e1(self):
        assert eval_poly(parse_poly(MIXED_TEXT), [1, 0]) == 2 + 1j

    def test_origin_gives_constant(self):
        assert eval_poly(parse_poly("(2-1i) + x1*~x2 + x2"), [0, 0]) == 2 - 1j

    def test_dimension(self):
        with pytest.raises(DimensionError):
            eval_poly(parse_poly("x1"), [1, 2])

    @settings(max_examples=50, deadline=None)
    @given(seeds)
    def test_sum_with_conjugate_is_real(self, seed):
        rng = np.random.default_rng(seed)
        p = random_violating_poly(rng, 3, 4)
        x = crandn(rng, 3)
        total = eval_poly(p, x) + eval_poly(p.conjugate(), x)
        assert abs(total.imag) <= 1e-12 * max(1.0, abs(total))


class TestConjugateKey:
    def test_swap(self):
        assert conjugate_key(K([1, 1], [2, 2])) == K([2, 2], [1, 1])

    def test_self_conjugate(self):
        assert conjugate_key(K([1], [1])) == K([1], [1])

    def test_involution(self):
        k = K([1, 3], [2])
        assert conjugate_key(conjugate_key(k)) == k


class TestRealValued:
    def test_hermitian_quadratic(self):
        assert check_real_valued(parse_poly("~x1*x1 + (1+2i)*~x1*x2 + (1-2i)*~x2*x1"))

    def test_pure_complex_linear(self):
        v = check_real_valued(parse_poly("x1"))
        assert not v
        w = v.witnesses[0]
        assert (w.key, w.partner) == (K([], [1]), K([1], []))
        assert (w.coeff, w.partner_coeff) == (1, 0)

    def test_self_conjugate_nonreal(self):
        v = check_real_valued(parse_poly("i*~x1*x1"))
        assert not v
        assert v.witnesses[0].violation == pytest.approx(2.0)

    def test_witness_cap_and_order(self):
        text = " + ".join(f"{k}*x{k}" for k in range(1, 31))
        v = check_real_valued(parse_poly(text))
        assert v.violations == 30
        assert len(v.witnesses) == 20
        mags = [w.violation for w in v.witnesses]
        assert mags == sorted(mags, reverse=True)
        assert mags[0] == 30

    def test_tolerance(self):
        p = parse_poly("~x1*x2 + (1+1e-13i)*~x2*x1")
        assert not check_real_valued(p, tol=0.0)
        assert check_real_valued(p, tol=1e-12)

    @settings(max_examples=40, deadline=None)
    @given(seeds)
    def test_condition_gives_real_values(self, seed):
        rng = np.random.default_rng(seed)
        p = random_real_valued_poly(rng, int(rng.integers(1, 4)), 4)
        assert check_real_valued(p)
        for _ in range(10):
            x = crandn(rng, p.n)
            assert abs(eval_poly(p, x).imag) <= 1e-10 * (1 + np.linalg.norm(x)) ** max(p.degree, 1)

    @settings(max_examples=40, deadline=None)
    @given(seeds)
    def test_violation_is_detected(self, seed):
        rng = np.random.default_rng(seed)
        p = random_violating_poly(rng, int(rng.integers(1, 4)), 4)
        assert not check_real_valued(p)
        assert any(abs(eval_poly(p, crandn(rng, p.n)).imag) > 1e-6 for _ in range(50))


class TestClassify:
    def test_fixtures(self):
        assert classify_form(parse_poly(QUARTIC_TEXT)) == FormClass("symmetric_conjugate", 2)
        assert classify_form(parse_poly(MIXED_TEXT)) == FormClass("general_conjugate", 2)

    def test_mixed_degree(self):
        assert classify_form(parse_poly("x1 + ~x1*x1")).kind == "general"

    def test_complex_form(self):
        assert classify_form(parse_poly("x1*x2 + 3*x2^2")) == FormClass("complex", 2)

    def test_zero(self):
        assert classify_form(ConjugatePolynomial(1)).kind == "general"
