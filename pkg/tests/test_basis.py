import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from perisem import basis

SQRT2 = np.sqrt(2.0)


class TestPhi:
    def test_constant_element(self):
        assert basis.phi(1, 0.37) == 1.0

    def test_first_cosine_at_zero(self):
        assert basis.phi(2, 0.0) == pytest.approx(SQRT2, abs=1e-15)

    def test_first_sine_at_quarter(self):
        # sin(pi/2) = 1 scaled by sqrt(2)
        assert basis.phi(3, 0.25) == pytest.approx(SQRT2, abs=1e-12)

    def test_invalid_index(self):
        with pytest.raises(ValueError):
            basis.phi(0, 0.5)
        with pytest.raises(ValueError):
            basis.phi(-3, 0.5)

    def test_vectorized(self):
        t = np.linspace(0, 1, 17, endpoint=False)
        vals = basis.phi(4, t)
        assert vals.shape == t.shape
        assert np.allclose(vals, [basis.phi(4, float(x)) for x in t])

    @settings(max_examples=200, derandomize=True)
    @given(st.integers(1, 300), st.floats(-50, 50, allow_nan=False))
    def test_bounded_and_periodic(self, j, t):
        v = basis.phi(j, t)
        assert abs(v) <= SQRT2 + 1e-12
        assert v == pytest.approx(basis.phi(j, t + 1.0), abs=1e-9)

    def test_periodicity_at_large_arguments(self):
        t = np.array([0.125, 0.5, 0.875])
        for j in (1, 2, 3, 10, 101):
            assert np.allclose(basis.phi(j, t), basis.phi(j, t + 9999.0), atol=1e-9)


class TestGram:
    def test_diagonal(self):
        assert basis.gram(2, 2, 4096) == pytest.approx(1.0, abs=1e-10)

    def test_off_diagonal(self):
        assert basis.gram(2, 3, 4096) == pytest.approx(0.0, abs=1e-10)

    def test_against_constant(self):
        assert basis.gram(1, 5, 4096) == pytest.approx(0.0, abs=1e-10)

    def test_quad_points_floor(self):
        with pytest.raises(ValueError):
            basis.gram(1, 1, 32)

    def test_matrix_matches_pairwise(self):
        g = basis.gram_matrix(12, 1024)
        for i in (1, 3, 8):
            for j in (2, 8, 12):
                assert g[i - 1, j - 1] == pytest.approx(basis.gram(i, j, 1024), abs=1e-12)

    def test_orthonormality_block(self):
        g = basis.gram_matrix(64, 4096)
        assert np.max(np.abs(g - np.eye(64))) < 1e-9


class TestWeightedSums:
    def test_matches_direct_evaluation(self):
        rng = np.random.default_rng(3)
        t = rng.random(200) * 7.0
        w = rng.standard_normal(200)
        got = basis.phi_weighted_sums(t, w, 25)
        want = np.array([np.sum(w * basis.phi(j, t)) for j in range(1, 26)])
        assert np.allclose(got, want, atol=1e-10)

    def test_segments_match_separate_calls(self):
        rng = np.random.default_rng(4)
        counts = np.array([13, 0, 57, 1])
        t = rng.random(counts.sum()) * 3.0
        w = rng.standard_normal(counts.sum())
        got = basis.phi_weighted_sums_batch(t, w, counts, 9)
        starts = np.concatenate([[0], np.cumsum(counts)])
        for i in range(counts.size):
            sl = slice(starts[i], starts[i + 1])
            want = basis.phi_weighted_sums(t[sl], w[sl], 9)
            assert np.allclose(got[i], want, atol=1e-12)

    def test_empty_input(self):
        out = basis.phi_weighted_sums(np.array([]), np.array([]), 5)
        assert np.all(out == 0.0)

    def test_chunking_is_invisible(self):
        rng = np.random.default_rng(5)
        counts = np.array([40, 40, 40, 40])
        t = rng.random(160)
        w = rng.standard_normal(160)
        a = basis.phi_weighted_sums_batch(t, w, counts, 12, chunk_elems=41)
        b = basis.phi_weighted_sums_batch(t, w, counts, 12, chunk_elems=10_000)
        assert np.array_equal(a, b)

    def test_bad_counts(self):
        with pytest.raises(ValueError):
            basis.phi_weighted_sums_batch(np.zeros(3), np.zeros(3), np.array([2]), 4)
