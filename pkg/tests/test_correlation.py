import math

import numpy as np
import pytest

from tribell.correlation import (
    correlation_tensor,
    fold,
    mermin_bound,
    pair_bound,
    singular_triple,
    unfold,
)
from tribell.qalg import kron3
from tribell.states import ad_ghz, ghz, noisy_ghz, psi_pi8_state

from _support import (
    ad_pair_scale,
    ad_third_unfiltered,
    noisy_ghz_folded,
    random_density,
    random_unitary,
)

SQRT2 = math.sqrt(2.0)


class TestCorrelationTensor:
    def test_ghz_entries(self):
        t = correlation_tensor(ghz())
        expected = np.zeros((3, 3, 3))
        expected[0, 0, 0] = 1.0
        expected[0, 1, 1] = -1.0
        expected[1, 0, 1] = -1.0
        expected[1, 1, 0] = -1.0
        assert np.allclose(t, expected, atol=1e-14)

    def test_maximally_mixed_is_zero(self):
        t = correlation_tensor(np.eye(8, dtype=complex) / 8)
        assert np.max(np.abs(t)) < 1e-15

    def test_noisy_ghz_top_entry(self):
        t = correlation_tensor(noisy_ghz(0.6))
        assert t[0, 0, 0] == pytest.approx(0.6, abs=1e-14)

    def test_entries_bounded_by_one(self):
        rng = np.random.default_rng(41)
        for _ in range(20):
            t = correlation_tensor(random_density(rng))
            assert np.max(np.abs(t)) <= 1.0 + 1e-9


class TestFold:
    def test_ghz_matches_displayed_matrix(self):
        m = fold(correlation_tensor(ghz()))
        assert np.allclose(m, noisy_ghz_folded(1.0), atol=1e-14)

    def test_noisy_ghz_matrix(self):
        m = fold(correlation_tensor(noisy_ghz(0.37)))
        assert np.allclose(m, noisy_ghz_folded(0.37), atol=1e-14)

    def test_zero_tensor(self):
        assert np.array_equal(fold(np.zeros((3, 3, 3))), np.zeros((3, 9)))

    def test_unfold_inverts_fold(self):
        rng = np.random.default_rng(42)
        t = rng.standard_normal((3, 3, 3))
        assert np.array_equal(unfold(fold(t)), t)

    def test_product_vector_column_convention(self):
        # A product vector a (x) c must have component a_i c_k at column 3i+k.
        t = np.zeros((3, 3, 3))
        t[2, 0, 1] = 1.0  # i=2, j=0, k=1
        m = fold(t)
        assert m[0, 3 * 2 + 1] == 1.0


class TestSingularTriple:
    def test_ghz_values(self):
        st = singular_triple(fold(correlation_tensor(ghz())))
        assert st.values[0] == pytest.approx(SQRT2, abs=1e-12)
        assert st.values[1] == pytest.approx(SQRT2, abs=1e-12)
        assert st.values[2] == pytest.approx(0.0, abs=1e-12)

    def test_ad_ghz_closed_form(self):
        for gamma in (0.1, 0.37, 0.6, 0.9):
            st = singular_triple(fold(correlation_tensor(ad_ghz(gamma))))
            pair = SQRT2 * ad_pair_scale(gamma)
            third = ad_third_unfiltered(gamma)
            expected = sorted([pair, pair, third], reverse=True)
            assert np.allclose(st.values, expected, atol=1e-12)

    def test_zero_matrix(self):
        st = singular_triple(np.zeros((3, 9)))
        assert st.values == (0.0, 0.0, 0.0)

    def test_right_vectors_are_singular_vectors(self):
        rng = np.random.default_rng(43)
        m = rng.standard_normal((3, 9))
        st = singular_triple(m)
        # m v = lambda u for the top vector: |m v| should equal lambda.
        assert np.linalg.norm(m @ st.vector_top) == pytest.approx(
            st.values[0], abs=1e-10
        )
        assert np.linalg.norm(st.vector_top) == pytest.approx(1.0, abs=1e-12)

    def test_gram_matches_independent_nine_by_nine_solve(self):
        rng = np.random.default_rng(44)
        for _ in range(25):
            m = fold(correlation_tensor(random_density(rng)))
            st = singular_triple(m)
            big = np.linalg.eigvalsh(m.T @ m)
            top3 = np.sqrt(np.clip(big[::-1][:3], 0.0, None))
            assert np.allclose(st.values, top3, atol=1e-10)


class TestLocalUnitaryInvariance:
    def test_singular_values_invariant(self):
        rng = np.random.default_rng(45)
        for _ in range(15):
            rho = random_density(rng)
            u = kron3(*(random_unitary(rng) for _ in range(3)))
            rotated = u @ rho @ u.conj().T
            a = singular_triple(fold(correlation_tensor(rho))).values
            b = singular_triple(fold(correlation_tensor(rotated))).values
            assert np.allclose(a, b, atol=1e-9)


class TestMerminBound:
    def test_ghz_is_exactly_four(self):
        assert mermin_bound(ghz()) == 4.0

    def test_noisy_ghz_linear(self):
        for p in (0.2, 0.55, 0.83):
            assert mermin_bound(noisy_ghz(p)) == pytest.approx(4 * p, abs=1e-12)

    def test_maximally_mixed_is_zero(self):
        assert mermin_bound(np.eye(8, dtype=complex) / 8) == pytest.approx(0.0, abs=1e-12)

    def test_psi_pi8_pure(self):
        assert mermin_bound(psi_pi8_state(1.0)) == pytest.approx(2 * SQRT2, abs=1e-12)


class TestPairBound:
    def test_ghz(self):
        pb = pair_bound(ghz())
        assert pb.value == 4.0
        assert pb.pair_is_max
        assert pb.gap == pytest.approx(0.0, abs=1e-12)

    def test_product_state_pair_not_max(self):
        rho = np.zeros((8, 8), dtype=complex)
        rho[0, 0] = 1.0
        pb = pair_bound(rho)
        assert not pb.pair_is_max

    def test_maximally_mixed(self):
        pb = pair_bound(np.eye(8, dtype=complex) / 8)
        assert pb.value == pytest.approx(0.0, abs=1e-12)
        assert pb.pair_is_max
        assert pb.gap == pytest.approx(0.0, abs=1e-12)
