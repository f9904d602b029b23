import itertools

import numpy as np
import pytest
import sympy
from hypothesis import given, settings, strategies as st
from scipy.stats import chisquare

from mubqss.errors import ParameterError
from mubqss.field import (
    BivariatePolynomial,
    SchemeParams,
    eval_univariate,
    inverse,
    is_prime,
    lagrange_at_zero,
    otp_decrypt,
    otp_encrypt,
    pairwise_key,
    poly_eval,
    poly_random,
    share_generate,
)

WORKED = [[1, 3], [2, 4]]


@pytest.fixture
def worked():
    return BivariatePolynomial.from_matrix(WORKED, 5), SchemeParams(5, 2, 2)


def brute_eval(coeffs, x, y, d):
    return sum(a * x**i * y**j for i, row in enumerate(coeffs) for j, a in enumerate(row)) % d


def sympy_restrictions(coeffs, xi, d):
    """Coefficients of F(xi, y) in y and F(x, xi) in x by symbolic substitution."""
    x, y = sympy.symbols("x y")
    F = sum(a * x**i * y**j for i, row in enumerate(coeffs) for j, a in enumerate(row))
    t = len(coeffs)
    row = sympy.Poly(sympy.expand(F.subs(x, xi)), y)
    col = sympy.Poly(sympy.expand(F.subs(y, xi)), x)
    return (tuple(int(row.coeff_monomial(y**k)) % d for k in range(t)),
            tuple(int(col.coeff_monomial(x**k)) % d for k in range(t)))


def brute_constant_term(points, d):
    """Constant term of the unique degree < len(points) polynomial through points, by search."""
    t = len(points)
    hits = [c for c in itertools.product(range(d), repeat=t)
            if all(eval_univariate(c, x, d) == q % d for x, q in points)]
    assert len(hits) == 1
    return hits[0][0]


class TestSchemeParams:
    def test_defaults_points(self):
        assert SchemeParams(7, 3, 4).public_points == (1, 2, 3, 4)

    @pytest.mark.parametrize("d,t,n,pts", [
        (4, 2, 2, ()), (9, 2, 2, ()), (2, 2, 2, ()), (5, 1, 2, ()), (5, 3, 2, ()),
        (5, 2, 5, ()), (5, 2, 2, (1, 1)), (5, 2, 2, (0, 1)), (5, 2, 2, (1, 5)), (5, 2, 3, (1, 2)),
    ])
    def test_rejects(self, d, t, n, pts):
        with pytest.raises(ParameterError):
            SchemeParams(d, t, n, pts)

    def test_is_prime_small(self):
        assert [p for p in range(30) if is_prime(p)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]

    def test_index_range(self):
        with pytest.raises(ParameterError):
            SchemeParams(5, 2, 3).point(4)


def test_inverse_exhaustive():
    for d in (3, 5, 7, 11):
        for a in range(1, d):
            assert a * inverse(a, d) % d == 1
    with pytest.raises(ParameterError):
        inverse(0, 5)


class TestPolyRandom:
    def test_range(self):
        F = poly_random(SchemeParams(5, 2, 2), np.random.default_rng(42))
        assert F.size == 2 and all(0 <= a < 5 for row in F.coeffs for a in row)

    def test_deterministic(self):
        P = SchemeParams(3, 2, 2)
        assert poly_random(P, np.random.default_rng(0)) == poly_random(P, np.random.default_rng(0))

    def test_cells_uniform(self):
        P = SchemeParams(5, 3, 3)
        rng = np.random.default_rng(2024)
        draws = np.array([poly_random(P, rng).to_list() for _ in range(10_000)])
        for i in range(3):
            for j in range(3):
                counts = np.bincount(draws[:, i, j], minlength=5)
                assert chisquare(counts).pvalue > 0.001

    def test_rejects_bad_params(self):
        with pytest.raises(ParameterError):
            poly_random((5, 2, 2), np.random.default_rng(0))


class TestPolyEval:
    @pytest.mark.parametrize("x,y,expected", [(0, 0, 1), (1, 1, 0), (2, 2, 2)])
    def test_worked(self, worked, x, y, expected):
        F, _ = worked
        assert poly_eval(F, x, y) == expected == brute_eval(WORKED, x, y, 5)

    @settings(max_examples=200)
    @given(st.sampled_from([3, 5, 7, 11]), st.integers(2, 4), st.data())
    def test_matches_brute_force(self, d, t, data):
        coeffs = data.draw(st.lists(st.lists(st.integers(0, d - 1), min_size=t, max_size=t), min_size=t, max_size=t))
        x, y = data.draw(st.integers(0, d - 1)), data.draw(st.integers(0, d - 1))
        v = poly_eval(BivariatePolynomial.from_matrix(coeffs, d), x, y)
        assert 0 <= v < d and v == brute_eval(coeffs, x, y, d)

    def test_reduces_entries(self):
        assert BivariatePolynomial.from_matrix([[6, -1], [0, 12]], 5).to_list() == [[1, 4], [0, 2]]

    def test_rejects_nonsquare(self):
        with pytest.raises(ParameterError):
            BivariatePolynomial.from_matrix([[1, 2, 3], [4, 5, 6]], 5)


class TestShares:
    def test_worked_rows(self, worked):
        F, P = worked
        assert share_generate(F, P, 1).row_poly == (3, 2)
        assert share_generate(F, P, 2).row_poly == (0, 1)

    def test_zero_polynomial(self):
        P = SchemeParams(7, 3, 4)
        zero = BivariatePolynomial.from_matrix([[0] * 3] * 3, 7)
        for i in range(1, 5):
            sh = share_generate(zero, P, i)
            assert sh.row_poly == sh.col_poly == (0, 0, 0)

    def test_against_symbolic_substitution(self):
        rng = np.random.default_rng(5)
        P = SchemeParams(7, 3, 6)
        for _ in range(10):
            F = poly_random(P, rng)
            for i in range(1, 7):
                sh = share_generate(F, P, i)
                assert (sh.row_poly, sh.col_poly) == sympy_restrictions(F.to_list(), P.point(i), 7)
                assert sh.row_at(sh.point) == sh.col_at(sh.point) == poly_eval(F, sh.point, sh.point)

    def test_bad_index(self, worked):
        F, P = worked
        with pytest.raises(ParameterError):
            share_generate(F, P, 3)


class TestPairwiseKey:
    def test_worked(self, worked):
        F, P = worked
        k = pairwise_key(share_generate(F, P, 1), P, 2)
        assert k.holder_pair == (1, 2) and k.key == 2

    def test_zero_polynomial(self):
        P = SchemeParams(5, 2, 4)
        zero = BivariatePolynomial.from_matrix([[0, 0], [0, 0]], 5)
        for i, j in itertools.permutations(range(1, 5), 2):
            assert pairwise_key(share_generate(zero, P, i), P, j).key == 0

    def test_agreement_random(self):
        rng = np.random.default_rng(11)
        P = SchemeParams(7, 3, 6)
        for _ in range(100):
            F = poly_random(P, rng)
            shares = {i: share_generate(F, P, i) for i in range(1, 7)}
            for i, j in itertools.permutations(shares, 2):
                sent = pairwise_key(shares[i], P, j, "send")
                recv = pairwise_key(shares[j], P, i, "receive")
                assert sent.holder_pair == recv.holder_pair == (i, j)
                assert sent.key == recv.key == poly_eval(F, P.point(i), P.point(j))

    def test_self_key_rejected(self, worked):
        F, P = worked
        with pytest.raises(ParameterError):
            pairwise_key(share_generate(F, P, 1), P, 1)


class TestLagrange:
    def test_worked(self):
        assert lagrange_at_zero([(1, 3), (2, 0)], 5) == 1 == brute_constant_term([(1, 3), (2, 0)], 5)

    def test_single_point(self):
        assert lagrange_at_zero([(3, 4)], 7) == 4

    @pytest.mark.parametrize("pts", [[(1, 2), (1, 3)], [(0, 1), (2, 3)], []])
    def test_bad_points(self, pts):
        with pytest.raises(ParameterError):
            lagrange_at_zero(pts, 5)

    def test_recovers_bivariate_constant(self):
        rng = np.random.default_rng(3)
        P = SchemeParams(7, 3, 6)
        for _ in range(100):
            F = poly_random(P, rng)
            xs = rng.choice(np.arange(1, 7), size=3, replace=False)
            pts = [(int(x), poly_eval(F, int(x), 0)) for x in xs]
            assert lagrange_at_zero(pts, 7) == poly_eval(F, 0, 0)

    def test_matches_search_oracle(self):
        rng = np.random.default_rng(8)
        for _ in range(50):
            pts = [(int(x), int(rng.integers(5))) for x in rng.choice(np.arange(1, 5), 3, replace=False)]
            assert lagrange_at_zero(pts, 5) == brute_constant_term(pts, 5)

    def test_exact_over_all_polynomials(self):
        d = 3
        for coeffs in itertools.product(range(d), repeat=2):
            for xs in itertools.permutations(range(1, d), 2):
                assert lagrange_at_zero([(x, eval_univariate(coeffs, x, d)) for x in xs], d) == coeffs[0]


@pytest.mark.parametrize("d,t", [(3, 2), (5, 2), (3, 3), (5, 3)])
def test_hiding_univariate(d, t):
    """t-1 evaluations leave every constant term equally likely."""
    polys = list(itertools.product(range(d), repeat=t))
    for xs in itertools.combinations(range(1, d), t - 1):
        for values in itertools.product(range(d), repeat=t - 1):
            counts = [0] * d
            for c in polys:
                if all(eval_univariate(c, x, d) == v for x, v in zip(xs, values)):
                    counts[c[0]] += 1
            assert len(set(counts)) == 1 and counts[0] > 0


class TestOTP:
    def test_examples(self):
        assert otp_encrypt(2, 3, 5) == 0 and otp_decrypt(0, 3, 5) == 2
        assert otp_encrypt(0, 0, 5) == 0

    def test_round_trip_exhaustive(self):
        for m, k in itertools.product(range(5), repeat=2):
            assert otp_decrypt(otp_encrypt(m, k, 5), k, 5) == m

    def test_ciphertext_uniform(self):
        rng = np.random.default_rng(17)
        keys = rng.integers(0, 7, size=20_000)
        counts = np.bincount([otp_encrypt(3, int(k), 7) for k in keys], minlength=7)
        assert chisquare(counts).pvalue > 0.001
