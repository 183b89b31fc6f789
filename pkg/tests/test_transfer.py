import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from thermoform.errors import DepthTooSmall, NotPrimitive, RangeTooLarge
from thermoform.potentials import (
    CylinderPotential,
    constant_potential,
    from_function,
    symbol_potential,
    zero_potential,
)
from thermoform.sft import enumerate_admissible, validate
from thermoform.transfer import (
    build_operator,
    check_normalized,
    cylinder_weights,
    gibbs_constants,
    gibbs_weights,
    leading_triple,
    normalize,
    pressure,
    rpf_convergence,
    spectral_gap,
    spectral_report,
)

from conftest import CATMAP_CODING, GOLDEN, full_shift, primitive_matrices, random_primitive


def random_potential(A, k, seed, scale=1.0):
    rng = np.random.default_rng(seed)
    return CylinderPotential(A, k, scale * rng.normal(size=len(enumerate_admissible(A, k))))


def markov_oracle(A, phi):
    """Stationary law and transitions of the Gibbs measure of a range-<=2 potential.

    Built from a dense eigen-decomposition of ``W_ab = A_ab exp(phi(ab))``,
    independent of the power iteration used by the package.
    """
    N = A.size
    W = np.zeros((N, N))
    for a in range(N):
        for b in A.successors[a]:
            W[a, b] = math.exp(phi.value((a, b)[: phi.range]))
    vals, R = np.linalg.eig(W)
    i = np.argmax(vals.real)
    lam = vals[i].real
    r = np.abs(R[:, i].real)
    vals_l, L = np.linalg.eig(W.T)
    l = np.abs(L[:, np.argmax(vals_l.real)].real)
    P = W * r[None, :] / (lam * r[:, None])
    pi = l * r / (l @ r)
    return lam, pi, P


class TestOperator:
    def test_small_examples(self, full2, golden):
        assert np.array_equal(build_operator(full2, zero_potential(full2), 1).matrix, np.ones((2, 2)))
        assert np.array_equal(build_operator(golden, zero_potential(golden), 1).matrix, [[1, 1], [1, 0]])
        M = build_operator(full2, symbol_potential(full2, [math.log(2), math.log(3)]), 1).matrix
        assert np.allclose(M, [[2, 3], [2, 3]])

    def test_depth_too_small(self, full2):
        with pytest.raises(DepthTooSmall):
            build_operator(full2, from_function(full2, 3, lambda w: 0.0), 2)

    @given(primitive_matrices(max_n=3), st.integers(1, 2), st.integers(0, 2**31))
    @settings(max_examples=25, deadline=None)
    def test_matrix_matches_defining_sum(self, A, k, seed):
        m = 3
        phi = random_potential(A, k, seed)
        op = build_operator(A, phi, m)
        words = enumerate_admissible(A, m)
        idx = {w: i for i, w in enumerate(words)}
        g = np.random.default_rng(seed + 1).normal(size=len(words))
        Lg = op.apply(g)
        assert np.all(op.matrix >= 0)
        for v in words:
            direct = 0.0
            for j in range(A.size):
                if A.entries[j, v[0]]:
                    y = (j,) + v
                    direct += math.exp(phi.value(y[:k])) * g[idx[y[:m]]]
            assert Lg[idx[v]] == pytest.approx(direct, rel=1e-12, abs=1e-12)

    def test_lift_rejects_long_observable(self, golden):
        op = build_operator(golden, zero_potential(golden), 2)
        with pytest.raises(RangeTooLarge):
            op.lift(from_function(golden, 3, lambda w: 0.0))


class TestTriple:
    def test_full2(self, full2):
        tr = leading_triple(build_operator(full2, zero_potential(full2), 1))
        assert tr.lam == pytest.approx(2.0, abs=1e-14)
        assert np.allclose(tr.h, 1.0) and np.allclose(tr.nu, 0.5)

    def test_normalized_full5(self):
        A = full_shift(5)
        assert leading_triple(build_operator(A, constant_potential(A, -math.log(5)))).lam == pytest.approx(1.0, abs=1e-14)

    def test_golden(self, golden):
        tr = leading_triple(build_operator(golden, zero_potential(golden)))
        assert tr.lam == pytest.approx(GOLDEN, abs=1e-13)

    def test_not_primitive(self):
        A = validate([[0, 1], [1, 0]])
        with pytest.raises(NotPrimitive):
            leading_triple(build_operator(A, zero_potential(A)))

    @given(primitive_matrices(max_n=4), st.integers(1, 2), st.integers(0, 2**31))
    @settings(max_examples=30, deadline=None)
    def test_triple_invariants(self, A, k, seed):
        op = build_operator(A, random_potential(A, k, seed), 3)
        tr = leading_triple(op)
        M = op.matrix
        assert np.max(np.abs(M @ tr.h - tr.lam * tr.h)) <= 1e-10 * tr.lam * np.max(tr.h)
        assert np.max(np.abs(M.T @ tr.nu - tr.lam * tr.nu)) <= 1e-10 * tr.lam * np.max(tr.nu)
        assert tr.nu.sum() == pytest.approx(1.0, abs=1e-13)
        assert tr.nu @ tr.h == pytest.approx(1.0, abs=1e-13)
        assert np.all(tr.h > 0)
        assert tr.gap_info[1] < 1
        dense = max(abs(np.linalg.eigvals(M)))
        assert tr.lam == pytest.approx(dense, rel=1e-11)


class TestPressure:
    def test_examples(self, full2, catmap_coding):
        assert pressure(full2, zero_potential(full2)) == pytest.approx(math.log(2), abs=1e-12)
        assert pressure(full2, constant_potential(full2, 0.37)) == pytest.approx(math.log(2) + 0.37, abs=1e-12)
        phi_u = constant_potential(catmap_coding, -2 * math.log(GOLDEN))
        assert abs(pressure(catmap_coding, phi_u)) < 1e-8

    @given(primitive_matrices(max_n=4), st.integers(0, 2**31))
    @settings(max_examples=30, deadline=None)
    def test_monotone_lipschitz_constant_shift(self, A, seed):
        phi1 = random_potential(A, 2, seed)
        delta = random_potential(A, 2, seed + 7, scale=0.5)
        phi2 = phi1 + CylinderPotential(A, 2, np.abs(delta.values))
        p1, p2 = pressure(A, phi1), pressure(A, phi2)
        assert p1 <= p2 + 1e-12
        assert abs(p2 - p1) <= (phi2 - phi1).sup_norm() + 1e-10
        assert pressure(A, phi1 + 0.9) == pytest.approx(p1 + 0.9, abs=1e-10)

    @given(primitive_matrices(max_n=3), st.integers(1, 3), st.integers(0, 2**31))
    @settings(max_examples=25, deadline=None)
    def test_depth_invariance(self, A, k, seed):
        phi = random_potential(A, k, seed)
        m = max(k, 2)
        assert pressure(A, phi, m) == pytest.approx(pressure(A, phi, m + 1), abs=1e-10)


class TestGibbs:
    def test_bernoulli_half(self, full2):
        mu = gibbs_weights(leading_triple(build_operator(full2, zero_potential(full2), 1)))
        assert np.allclose(mu.weights, 0.5) and np.allclose(mu.chain, 0.5)

    def test_parry(self, golden):
        mu = gibbs_weights(leading_triple(build_operator(golden, zero_potential(golden), 1)))
        expected = np.array([GOLDEN**2, 1.0]) / (1 + GOLDEN**2)
        assert np.allclose(mu.weights, expected, atol=1e-13)
        # stationary law of the chain, from its own eigenvector
        vals, vecs = np.linalg.eig(mu.chain.T)
        pi = np.abs(vecs[:, np.argmin(abs(vals - 1))].real)
        assert np.allclose(pi / pi.sum(), expected, atol=1e-12)

    def test_bernoulli_p(self, full2):
        p = 0.3
        phi = symbol_potential(full2, [math.log(p), math.log(1 - p)])
        mu = gibbs_weights(leading_triple(build_operator(full2, phi, 2)))
        w3 = cylinder_weights(mu, 3)
        for word, mass in zip(enumerate_admissible(full2, 3), w3):
            ones = sum(word)
            assert mass == pytest.approx(p ** (3 - ones) * (1 - p) ** ones, abs=1e-13)

    @given(primitive_matrices(max_n=4), st.integers(1, 2), st.integers(0, 2**31))
    @settings(max_examples=30, deadline=None)
    def test_matches_markov_oracle(self, A, k, seed):
        phi = random_potential(A, k, seed)
        mu = gibbs_weights(leading_triple(build_operator(A, phi, 2)))
        lam, pi, P = markov_oracle(A, phi)
        for n in (1, 2, 3, 4):
            for w, mass in zip(enumerate_admissible(A, n), cylinder_weights(mu, n)):
                ref = pi[w[0]] * np.prod([P[a, b] for a, b in zip(w, w[1:])])
                assert mass == pytest.approx(ref, abs=1e-11)

    @given(primitive_matrices(max_n=4), st.integers(1, 3), st.integers(0, 2**31))
    @settings(max_examples=30, deadline=None)
    def test_invariants(self, A, k, seed):
        op = build_operator(A, random_potential(A, k, seed), 3)
        mu = gibbs_weights(leading_triple(op))
        assert mu.weights.sum() == pytest.approx(1.0, abs=1e-12)
        assert np.allclose(mu.chain.sum(axis=1), 1.0, atol=1e-13)
        assert mu.stationarity_defect() <= 1e-10
        # shift invariance: mu[a u] summed over a equals mu[u b] summed over b
        w2 = cylinder_weights(mu, 2)
        w3 = cylinder_weights(mu, 3)
        words3 = enumerate_admissible(A, 3)
        idx2 = {w: i for i, w in enumerate(enumerate_admissible(A, 2))}
        left = np.zeros(len(w2))
        right = np.zeros(len(w2))
        for w, x in zip(words3, w3):
            left[idx2[w[1:]]] += x
            right[idx2[w[:2]]] += x
        assert np.allclose(left, right, atol=1e-10)
        assert np.allclose(right, w2, atol=1e-12)

    def test_deep_cylinders_sum_to_one(self, random4):
        mu = gibbs_weights(leading_triple(build_operator(random4, random_potential(random4, 2, 3))))
        for n in range(1, 8):
            assert cylinder_weights(mu, n).sum() == pytest.approx(1.0, abs=1e-12)

    def test_gibbs_constants_finite(self, golden):
        tr = leading_triple(build_operator(golden, from_function(golden, 2, lambda w: 0.3 * w[1] - 0.1 * w[0]), 3))
        for n in (1, 2, 3, 5):
            c1, c2 = gibbs_constants(tr, n)
            assert 0 < c1 <= c2 < math.inf


class TestNormalization:
    def test_examples(self, full2):
        A5 = full_shift(5)
        flag, defect = check_normalized(A5, constant_potential(A5, -math.log(5)))
        assert flag and defect < 1e-15
        flag, defect = check_normalized(full2, zero_potential(full2))
        assert not flag and defect == pytest.approx(1.0)

    @given(primitive_matrices(max_n=4), st.integers(1, 2), st.integers(0, 2**31))
    @settings(max_examples=30, deadline=None)
    def test_normalize_gives_normalized(self, A, k, seed):
        tr = leading_triple(build_operator(A, random_potential(A, k, seed)))
        psi = normalize(tr)
        flag, defect = check_normalized(A, psi)
        assert flag and defect < 1e-8
        assert abs(pressure(A, psi)) < 1e-10


class TestRPF:
    def test_eigenfunction_has_zero_error(self, golden):
        op = build_operator(golden, zero_potential(golden))
        tr = leading_triple(op)
        rows, _, _ = rpf_convergence(op, tr, tr.h, 10)
        assert max(e for _, e in rows) < 1e-13

    def test_rank_one_full_shift(self, full2):
        op = build_operator(full2, zero_potential(full2), 1)
        tr = leading_triple(op)
        rows, rate, _ = rpf_convergence(op, tr, [1.0, 0.0], 5)
        assert rows[1][1] < 1e-15 and rate == 0.0

    def test_golden_rate(self, golden):
        op = build_operator(golden, zero_potential(golden))
        tr = leading_triple(op)
        g = np.random.default_rng(4).normal(size=op.dim)
        _, rate, _ = rpf_convergence(op, tr, g, 40)
        assert rate == pytest.approx(1 / GOLDEN**2, abs=1e-3)


class TestGap:
    def test_full2_infinite(self, full2):
        gap = spectral_gap(build_operator(full2, zero_potential(full2), 1))
        assert gap.lambda2_mag == 0.0 and gap.gap == math.inf

    def test_golden(self, golden):
        gap = spectral_gap(build_operator(golden, zero_potential(golden)))
        assert gap.gap == pytest.approx(2 * math.log(GOLDEN), abs=1e-10)
        assert gap.gap_lower_bound == pytest.approx(math.log(2))

    def test_catmap_coding_ratio(self, catmap_coding):
        gap = spectral_gap(build_operator(catmap_coding, zero_potential(catmap_coding), 1))
        ev = np.sort(np.abs(np.linalg.eigvals(np.array(CATMAP_CODING, float))))[::-1]
        assert gap.ratio_gap == pytest.approx(1 - ev[1] / ev[0], abs=1e-10)

    @given(st.integers(0, 10**6))
    @settings(max_examples=15, deadline=None)
    def test_against_dense_eigenvalues(self, seed):
        A = random_primitive(4, seed)
        op = build_operator(A, random_potential(A, 2, seed), 3)
        gap = spectral_gap(op)
        ev = np.sort(np.abs(np.linalg.eigvals(op.matrix)))[::-1]
        assert gap.lambda2_mag == pytest.approx(ev[1], rel=1e-8, abs=1e-12)
        assert gap.gap >= 0

    def test_report_keys(self, golden):
        rep = spectral_report(build_operator(golden, zero_potential(golden)))
        assert {"lambda", "pressure", "lambda2_mag", "gap", "iterations", "residual"} <= set(rep)
