import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from thermoform.errors import InadmissibleWord, InputError, RangeShrink, WordTooShort
from thermoform.potentials import (
    CylinderPotential,
    HolderMeta,
    birkhoff_sum,
    coboundary,
    constant_potential,
    extend_range,
    from_function,
    symbol_potential,
    truncation_bound,
    variation_profile,
    zero_potential,
)
from thermoform.sft import enumerate_admissible
from thermoform.transfer import cylinder_weights, gibbs_weights, build_operator, leading_triple, pressure

from conftest import GOLDEN, primitive_matrices


def test_constant_potential(full2, catmap_coding):
    assert np.all(zero_potential(full2).values == 0)
    phi = constant_potential(catmap_coding, -2 * math.log(GOLDEN))
    assert phi.range == 1
    assert np.allclose(phi.values, -0.9624236501192069)
    assert np.all(constant_potential(full2, 1.0).values == 1.0)


def test_value_count_checked(golden):
    with pytest.raises(InputError):
        CylinderPotential(golden, 2, [0.0, 1.0])
    with pytest.raises(InputError):
        CylinderPotential(golden, 1, [0.0, math.inf])


def test_value_lookup(golden):
    phi = from_function(golden, 2, lambda w: 10 * w[0] + w[1])
    assert phi.value((1, 0)) == 10.0
    with pytest.raises(InadmissibleWord):
        phi.value((1, 1))


class TestBirkhoff:
    def test_examples(self, full2):
        assert birkhoff_sum(zero_potential(full2), (0, 1, 1, 0, 1, 0, 1), 7) == 0.0
        assert birkhoff_sum(constant_potential(full2, 0.3), (0, 1, 1, 0, 1), 5) == pytest.approx(1.5)
        phi = from_function(full2, 2, lambda w: 1.0 if w == (0, 1) else 0.0)
        assert birkhoff_sum(phi, (0, 1, 0, 1), 4, periodic=True) == 2.0

    def test_empty_sum(self, full2):
        assert birkhoff_sum(constant_potential(full2, 5.0), (), 0) == 0.0

    def test_errors(self, golden):
        phi = from_function(golden, 2, lambda w: 1.0)
        with pytest.raises(WordTooShort):
            birkhoff_sum(phi, (0, 1, 0), 3)
        with pytest.raises(InadmissibleWord):
            birkhoff_sum(phi, (0, 1, 1, 0), 2)
        with pytest.raises(InadmissibleWord):
            birkhoff_sum(phi, (1, 1), 2, periodic=True)

    @given(primitive_matrices(max_n=3), st.integers(1, 3), st.integers(0, 2**31))
    @settings(max_examples=30, deadline=None)
    def test_cocycle_additivity(self, A, k, seed):
        rng = np.random.default_rng(seed)
        phi = CylinderPotential(A, k, rng.normal(size=len(enumerate_admissible(A, k))))
        for total in range(1, 9):
            for w in enumerate_admissible(A, total + k - 1)[:20]:
                for m in range(total + 1):
                    n = total - m
                    lhs = birkhoff_sum(phi, w, m + n)
                    rhs = birkhoff_sum(phi, w, m) + birkhoff_sum(phi, w[m:], n)
                    assert lhs == pytest.approx(rhs, abs=1e-12)


class TestExtendRange:
    def test_constant(self, full2):
        phi = extend_range(constant_potential(full2, 0.7), 3)
        assert phi.range == 3 and np.all(phi.values == 0.7)

    def test_copies_by_first_symbol(self, golden):
        phi = extend_range(symbol_potential(golden, [0.1, -0.2]), 2)
        assert list(phi.values) == [0.1, 0.1, -0.2]

    def test_shrink_rejected(self, golden):
        with pytest.raises(RangeShrink):
            extend_range(from_function(golden, 2, lambda w: 0.0), 1)

    @given(primitive_matrices(max_n=3), st.integers(0, 2**31))
    @settings(max_examples=20, deadline=None)
    def test_pressure_and_gibbs_invariant(self, A, seed):
        rng = np.random.default_rng(seed)
        phi = CylinderPotential(A, 1, rng.normal(size=A.size))
        ext = extend_range(phi, 3)
        assert pressure(A, ext, 3) == pytest.approx(pressure(A, phi, 3), abs=1e-10)
        mu1 = gibbs_weights(leading_triple(build_operator(A, phi, 3)))
        mu2 = gibbs_weights(leading_triple(build_operator(A, ext, 3)))
        assert np.allclose(cylinder_weights(mu1, 3), cylinder_weights(mu2, 3), atol=1e-10)


class TestVariation:
    def test_constant(self, full2):
        prof, meta = variation_profile(constant_potential(full2, 2.0))
        assert all(v == 0 for _, v in prof) and meta.seminorm == 0

    def test_range_one(self, full2):
        prof, _ = variation_profile(symbol_potential(full2, [1.0, 3.0]))
        assert prof == [(0, 2.0), (1, 0.0)]

    def test_range_two_brute_force(self, golden):
        table = {(0, 0): 0.3, (0, 1): -1.1, (1, 0): 0.8}
        phi = from_function(golden, 2, table.__getitem__)
        prof, meta = variation_profile(phi, HolderMeta(1.0, 0.5))
        words, vals = phi.words, phi.values
        for j, var in prof:
            brute = max(abs(a - b) for (u, a), (v, b) in itertools.product(zip(words, vals), repeat=2)
                        if u[:j] == v[:j])
            assert var == pytest.approx(brute)
        assert meta.seminorm == pytest.approx(max(prof[0][1], 2 * prof[1][1]))

    @given(primitive_matrices(max_n=3), st.integers(1, 3), st.integers(0, 2**31))
    @settings(max_examples=30, deadline=None)
    def test_variation_vanishes_beyond_range(self, A, k, seed):
        rng = np.random.default_rng(seed)
        phi = CylinderPotential(A, k, rng.normal(size=len(enumerate_admissible(A, k))))
        prof, _ = variation_profile(phi)
        assert prof[-1] == (k, 0.0)

    def test_truncation_bound(self):
        assert truncation_bound(HolderMeta(1.0, 0.5, 4.0), 3) == pytest.approx(1.0)

    def test_meta_validation(self):
        with pytest.raises(InputError):
            HolderMeta(exponent=0.0)
        with pytest.raises(InputError):
            HolderMeta(metric_base=1.0)


def test_coboundary_sums_telescope(golden):
    psi = from_function(golden, 2, lambda w: 0.4 * w[0] - 0.9 * w[1])
    g = coboundary(psi)
    assert g.range == 3
    for w in enumerate_admissible(golden, 9):
        n = 6
        expected = psi.value(w[:2]) - psi.value(w[n:n + 2])
        assert birkhoff_sum(g, w, n) == pytest.approx(expected, abs=1e-12)


def test_arithmetic(golden):
    a = symbol_potential(golden, [1.0, 2.0])
    b = from_function(golden, 2, lambda w: float(w[1]))
    c = a + b
    assert c.range == 2
    assert list(c.values) == [1.0, 2.0, 2.0]
    assert list((2 * a - 1).values) == [1.0, 3.0]
    assert (-a).sup_norm() == 2.0
