import math

import numpy as np
import pytest
from hypothesis import given, settings

from thermoform.errors import (
    BudgetExceeded,
    NonBinaryEntry,
    NonSquare,
    NotPrimitive,
    ZeroColumn,
    ZeroRow,
)
from thermoform.sft import (
    count_admissible,
    count_fixed,
    enumerate_admissible,
    enumerate_periodic,
    is_admissible,
    is_primitive,
    topological_entropy,
    validate,
)

from conftest import GOLDEN, full_shift, primitive_matrices, random_primitive


class TestValidate:
    def test_full_and_golden(self):
        assert validate([[1, 1], [1, 1]]).size == 2
        assert validate([[1, 1], [1, 0]]).size == 2

    def test_zero_column(self):
        with pytest.raises(ZeroColumn) as exc:
            validate([[1, 0], [1, 0]])
        assert exc.value.index == 1

    def test_zero_row(self):
        with pytest.raises(ZeroRow):
            validate([[1, 1], [0, 0]])

    def test_non_binary(self):
        with pytest.raises(NonBinaryEntry):
            validate([[1, 2], [1, 0]])

    def test_non_square(self):
        with pytest.raises(NonSquare):
            validate([[1, 1, 1], [1, 0, 1]])

    def test_equality_by_entries(self):
        assert validate([[1, 1], [1, 0]]) == validate([[1, 1], [1, 0]])
        assert validate([[1, 1], [1, 0]]) != validate([[1, 1], [1, 1]])


class TestPrimitive:
    def test_examples(self, full2, golden):
        assert is_primitive(full2) == (True, 1)
        assert is_primitive(golden) == (True, 2)
        assert is_primitive(validate([[0, 1], [1, 0]]))[0] is False

    def test_entropy_rejects_imprimitive(self):
        with pytest.raises(NotPrimitive):
            topological_entropy(validate([[0, 1], [1, 0]]))

    @given(primitive_matrices(max_n=5))
    @settings(max_examples=60, deadline=None)
    def test_wielandt_bound_and_witness_is_least(self, A):
        flag, p = is_primitive(A)
        n = A.size
        assert p <= (n - 1) ** 2 + 1
        P = np.linalg.matrix_power(A.entries.astype(np.int64), p)
        assert np.all(P > 0)
        if p > 1:
            Q = np.linalg.matrix_power(A.entries.astype(np.int64), p - 1)
            assert not np.all(Q > 0)


class TestEntropy:
    def test_closed_forms(self, full2, golden):
        assert topological_entropy(full2) == pytest.approx(math.log(2), abs=1e-12)
        assert topological_entropy(golden) == pytest.approx(math.log(GOLDEN), abs=1e-12)
        assert topological_entropy(full_shift(5)) == pytest.approx(math.log(5), abs=1e-12)

    def test_golden_word_growth(self, golden):
        # log |W_n| - log |W_(n-1)| -> entropy; independent of any eigen-solver
        counts = [len(enumerate_admissible(golden, n)) for n in range(20, 26)]
        rate = math.log(counts[-1] / counts[-2])
        assert rate == pytest.approx(topological_entropy(golden), abs=1e-3)

    def test_matches_dense_eigenvalues(self):
        for seed in range(5):
            A = random_primitive(5, seed)
            rho = max(abs(np.linalg.eigvals(A.entries.astype(float))))
            assert topological_entropy(A) == pytest.approx(math.log(rho), abs=1e-11)


class TestCounting:
    def test_count_fixed_examples(self, full2, golden):
        assert count_fixed(full2, 3) == 8
        assert count_fixed(golden, 4) == 7
        assert count_fixed(full_shift(5), 2) == 25

    def test_count_fixed_is_exact_for_huge_n(self, full2):
        assert count_fixed(full2, 200) == 2**200

    def test_enumerate_admissible_examples(self, full2, golden):
        assert enumerate_admissible(full2, 2) == [(0, 0), (0, 1), (1, 0), (1, 1)]
        assert enumerate_admissible(golden, 2) == [(0, 0), (0, 1), (1, 0)]
        assert len(enumerate_admissible(golden, 3)) == 5

    def test_enumerate_periodic_examples(self, full2, golden):
        assert enumerate_periodic(full2, 2) == [(0, 0), (0, 1), (1, 0), (1, 1)]
        assert enumerate_periodic(golden, 2) == [(0, 0), (0, 1), (1, 0)]
        assert enumerate_periodic(golden, 1) == [(0,)]

    def test_budget(self, full2):
        with pytest.raises(BudgetExceeded):
            enumerate_admissible(full2, 12, cap=1000)
        with pytest.raises(BudgetExceeded):
            enumerate_periodic(full2, 12, cap=1000)

    @given(primitive_matrices(max_n=4))
    @settings(max_examples=25, deadline=None)
    def test_periodic_count_matches_trace(self, A):
        for n in range(1, 9):
            words = enumerate_periodic(A, n)
            assert len(words) == count_fixed(A, n)
            assert len(set(words)) == len(words)
            for w in words:
                assert is_admissible(A, w + w[:1])

    @given(primitive_matrices(max_n=4))
    @settings(max_examples=25, deadline=None)
    def test_admissible_words_sorted_and_complete(self, A):
        for k in range(1, 5):
            words = enumerate_admissible(A, k)
            assert words == sorted(words)
            assert len(words) == count_admissible(A, k)
            assert all(is_admissible(A, w) for w in words)
