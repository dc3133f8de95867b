import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from frozen_constants import PELLER_C
from htlab.besov import besov_lp_norm
from htlab.errors import ResourceError
from htlab.hankel import (
    SingularSpectrum,
    hankel_matrix,
    schatten_norm,
    singular_values,
    truncation_dimension,
)
from htlab.symbols import FourierSymbol, lacunary, monomial


def faddeev_leverrier(M):
    """Characteristic polynomial coefficients of a square matrix (highest degree first)."""
    n = M.shape[0]
    coeffs = [1.0]
    B = np.zeros_like(M)
    eye = np.eye(n)
    for k in range(1, n + 1):
        B = M @ B + coeffs[-1] * eye
        coeffs.append(-np.trace(M @ B) / k)
    return np.array(coeffs)


class TestMatrix:
    def test_examples(self):
        assert np.array_equal(hankel_matrix(monomial(1), 2).entries, [[1, 0], [0, 0]])
        A = hankel_matrix(monomial(3), 3).entries
        assert np.array_equal(A, np.fliplr(np.eye(3)))
        assert not np.any(hankel_matrix(FourierSymbol({}), 4).entries)

    def test_antidiagonal_structure(self, rng):
        f = FourierSymbol.from_real(rng.uniform(-1, 1, 9), start=1)
        A = hankel_matrix(f, 12).entries
        for j in range(12):
            for k in range(12):
                assert A[j, k] == f[j + k + 1]

    def test_complex_symbol(self):
        A = hankel_matrix(FourierSymbol({2: 1j}), 3).entries
        assert A.dtype == complex and A[0, 1] == 1j

    def test_exact_flag(self):
        assert hankel_matrix(monomial(4), 4).exact
        assert not hankel_matrix(monomial(4), 3).exact

    def test_bounds(self):
        with pytest.raises(ValueError):
            hankel_matrix(monomial(1), 0)
        with pytest.raises(ResourceError):
            hankel_matrix(monomial(1), 2**13 + 1)


class TestSingularValues:
    @pytest.mark.parametrize("n", [1, 2, 7, 64])
    def test_monomial(self, n):
        s = singular_values(hankel_matrix(monomial(n), n + 3)).values
        assert np.allclose(s[:n], 1.0, atol=1e-12, rtol=0)
        assert np.allclose(s[n:], 0.0, atol=1e-12)

    def test_zero(self):
        s = singular_values(hankel_matrix(FourierSymbol({}), 5))
        assert np.all(s.values == 0)

    def test_characteristic_polynomial_oracle(self):
        A = hankel_matrix(lacunary(1, (1, 1), 2), 4).entries
        roots = np.roots(faddeev_leverrier(A.T @ A))
        oracle = np.sort(np.sqrt(np.clip(roots.real, 0, None)))[::-1]
        got = singular_values(hankel_matrix(lacunary(1, (1, 1), 2), 4)).values
        assert np.allclose(got, oracle, atol=1e-7)
        # closed form: eigenvalues of [[1, 1/2], [1/2, 0]] are (1 +- sqrt 2)/2
        assert got[0] == pytest.approx((1 + math.sqrt(2)) / 2, rel=1e-14)
        assert got[1] == pytest.approx((math.sqrt(2) - 1) / 2, rel=1e-13)

    def test_backward_error(self, rng):
        f = FourierSymbol({k: complex(*rng.uniform(-1, 1, 2)) for k in range(1, 40)})
        A = hankel_matrix(f, 40).entries
        s = singular_values(hankel_matrix(f, 40)).values
        U, s_ref, Vh = np.linalg.svd(A)
        assert np.linalg.norm(A - (U * s) @ Vh, 2) <= 1e-12 * s[0] * 40

    def test_reproducible(self, rng):
        f = FourierSymbol.from_real(rng.uniform(-1, 1, 50), start=1)
        a = singular_values(hankel_matrix(f, 50)).values
        b = singular_values(hankel_matrix(f, 50)).values
        assert a.tobytes() == b.tobytes()

    def test_interlacing_under_truncation(self, rng):
        for _ in range(3):
            f = lacunary(1.0, rng.uniform(0, 1, 8))
            prev = None
            for N in (8, 16, 32, 64):
                s = singular_values(hankel_matrix(f, N)).values
                if prev is not None:
                    assert np.all(prev <= s[: len(prev)] + 1e-12)
                prev = s


class TestSpectrum:
    def test_rejects_unordered(self):
        with pytest.raises(ValueError):
            SingularSpectrum(np.array([3.0, 4.0]))

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            SingularSpectrum(np.array([1.0, -1.0]))

    def test_length_bound(self):
        with pytest.raises(ValueError):
            SingularSpectrum(np.array([1.0, 1.0]), dimension=1)


class TestSchatten:
    @pytest.mark.parametrize("n", [1, 3, 10])
    @pytest.mark.parametrize("q", [1.0, 1.5, 2.0, 4.0])
    def test_monomial(self, n, q):
        s = singular_values(hankel_matrix(monomial(n), n))
        assert schatten_norm(s, q) == pytest.approx(n ** (1 / q), rel=1e-12)

    def test_zero(self):
        assert schatten_norm(SingularSpectrum(np.zeros(3)), 2.0) == 0.0

    def test_rejects_q(self):
        with pytest.raises(ValueError):
            schatten_norm(SingularSpectrum(np.ones(2)), 0.5)

    @settings(max_examples=50)
    @given(st.lists(st.floats(0, 1), min_size=1, max_size=30))
    def test_monotone_in_q(self, vals):
        s = SingularSpectrum(np.sort(vals)[::-1])
        norms = [schatten_norm(s, q) for q in (1.0, 1.5, 2.0, 3.0, 8.0)]
        assert all(b <= a * (1 + 1e-12) for a, b in zip(norms, norms[1:]))
        assert all(n >= s.values[0] * (1 - 1e-12) for n in norms)

    def test_peller_scale(self):
        for j in range(0, 9):
            f = monomial(2**j)
            s = singular_values(hankel_matrix(f, f.degree))
            for q in np.linspace(1, 3, 9):
                r = schatten_norm(s, q) / besov_lp_norm(f, q)
                assert 1 / PELLER_C <= r <= PELLER_C


class TestTruncation:
    def test_examples(self):
        assert truncation_dimension(monomial(5), 1e-12) == 5
        assert truncation_dimension(lacunary(1, (1, 1, 1), 3), 1e-12) == 4
        assert truncation_dimension(FourierSymbol({}), 1.0) == 1

    def test_tolerance_drops_small_tail(self):
        f = FourierSymbol({1: 1.0, 3: 1e-3, 10: 1e-9})
        assert truncation_dimension(f, 1e-6) == 3
        assert truncation_dimension(f, 1e-2) == 1

    def test_constant_term_ignored(self):
        assert truncation_dimension(FourierSymbol({0: 1.0, 2: 1.0}), 1e-12) == 2
