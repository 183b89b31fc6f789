"""Discretized Ruelle transfer operator, its leading spectral data and the Gibbs measure.

For a range-``k`` potential and depth ``m >= k`` the operator

    (L g)(v) = sum_{j : A[j, v0] = 1} exp(phi(j v)) g(j v)

maps functions of the first ``m`` symbols to functions of the first ``m``
symbols, so the dense matrix over admissible ``m``-words represents it
exactly.  Row ``v``, column ``w`` holds ``exp(phi(w[:k]))`` whenever ``w`` is
``v`` with a symbol prepended and its last symbol dropped.
"""

from dataclasses import dataclass, field
from functools import cached_property
import math

import numpy as np

from ._linalg import DEFAULT_MAX_ITER, perron_pair, second_eigenvalue_magnitude
from .errors import (
    DepthTooSmall,
    DimensionTooLarge,
    InputError,
    NoConvergence,
    ZeroMassCylinder,
)
from .potentials import DEFAULT_METRIC_BASE, CylinderPotential
from .sft import DEFAULT_WORD_CAP, enumerate_admissible, require_primitive, word_index

DENSE_LIMIT = 2000
ZERO_MASS = 1e-15
NORMALIZED_TOL = 1e-10


def default_depth(phi):
    return max(phi.range, 2)


def _structure(A, k, m, cap):
    """Cached sparsity data for depth ``m``: (shift matrix S, prefix index of each m-word)."""
    key = ("op", k, m)
    if key not in A._cache:
        words = enumerate_admissible(A, m, cap)
        idx = word_index(A, m, cap)
        n = len(words)
        S = np.zeros((n, n))
        for vi, v in enumerate(words):
            for j in range(A.size):
                if A.entries[j, v[0]]:
                    S[vi, idx[(j,) + v[:-1]]] = 1.0
        kidx = word_index(A, k)
        prefix = np.array([kidx[w[:k]] for w in words], dtype=np.int64)
        A._cache[key] = (S, prefix)
    return A._cache[key]


@dataclass(frozen=True, eq=False)
class DiscretizedOperator:
    sft: object
    potential: CylinderPotential
    depth: int
    matrix: np.ndarray

    @property
    def words(self):
        return enumerate_admissible(self.sft, self.depth)

    @property
    def dim(self):
        return self.matrix.shape[0]

    @cached_property
    def lifted_potential(self):
        """Potential values on the ``depth``-words."""
        _, prefix = _structure(self.sft, self.potential.range, self.depth, DEFAULT_WORD_CAP)
        return self.potential.values[prefix]

    def apply(self, g):
        return self.matrix @ np.asarray(g, dtype=float)

    def lift(self, obs):
        """Observable (range ``<= depth``) as a vector over ``depth``-words."""
        if obs.range > self.depth:
            from .errors import RangeTooLarge

            raise RangeTooLarge(
                f"observable range {obs.range} exceeds operator depth {self.depth}"
            )
        _, prefix = _structure(self.sft, obs.range, self.depth, DEFAULT_WORD_CAP)
        return obs.values[prefix]


def build_operator(A, phi, m=None, cap=DEFAULT_WORD_CAP):
    if phi.sft != A:
        raise InputError("potential is defined on a different shift")
    m = default_depth(phi) if m is None else int(m)
    if m < phi.range:
        raise DepthTooSmall(f"depth {m} is smaller than potential range {phi.range}")
    S, prefix = _structure(A, phi.range, m, cap)
    weights = np.exp(phi.values[prefix])
    M = S * weights[None, :]
    M.setflags(write=False)
    return DiscretizedOperator(A, phi, m, M)


@dataclass(frozen=True, eq=False)
class SpectralTriple:
    """Leading eigendata: ``L h = lam h``, ``L^T nu = lam nu``, ``sum(nu) = 1``, ``nu @ h = 1``."""

    lam: float
    h: np.ndarray
    nu: np.ndarray
    iterations: int
    residual: float
    op: DiscretizedOperator = field(repr=False)

    @property
    def pressure(self):
        return math.log(self.lam)

    @cached_property
    def gap_info(self):
        """``(lambda2_magnitude, lambda2_magnitude / lam)``."""
        mag, _ = _second_magnitude(self.op.matrix, self)
        return mag, mag / self.lam


def leading_triple(op, tol=1e-12, max_iter=DEFAULT_MAX_ITER):
    require_primitive(op.sft)
    lam, r, l, it, res = perron_pair(op.matrix, tol=tol, max_iter=max_iter)
    nu = l / l.sum()
    h = r / (nu @ r)
    return SpectralTriple(float(lam), h, nu, it, float(res), op)


def pressure(A, phi, m=None):
    """Topological pressure ``log lam`` of ``phi``."""
    return leading_triple(build_operator(A, phi, m)).pressure


def _second_magnitude(M, triple):
    try:
        return second_eigenvalue_magnitude(M, triple.lam, triple.h, triple.nu)[0], "deflated"
    except NoConvergence:
        if M.shape[0] > DENSE_LIMIT:
            raise
        ev = np.sort(np.abs(np.linalg.eigvals(M)))[::-1]
        return float(ev[1]) if len(ev) > 1 else 0.0, "dense"


# --- Gibbs measure -------------------------------------------------------------


def _successor_table(A, m):
    """``succ[u, a]`` = index of the m-word ``u[1:] + (a,)``, or -1 if inadmissible."""
    key = ("succ", m)
    if key not in A._cache:
        words = enumerate_admissible(A, m)
        idx = word_index(A, m)
        succ = np.full((len(words), A.size), -1, dtype=np.int64)
        for ui, u in enumerate(words):
            for a in A.successors[u[-1]]:
                succ[ui, a] = idx[u[1:] + (a,)]
        succ.setflags(write=False)
        A._cache[key] = succ
    return A._cache[key]


@dataclass(frozen=True, eq=False)
class GibbsDistribution:
    """Cylinder weights of the Gibbs measure at a fixed depth plus its Markov chain.

    ``chain[u, u']`` is the probability that the word window ``u`` is followed
    by ``u'`` (its shift-successor); ``successors[u, a]`` names the state
    reached by appending symbol ``a``.
    """

    sft: object
    depth: int
    weights: np.ndarray
    chain: np.ndarray
    successors: np.ndarray

    @property
    def words(self):
        return enumerate_admissible(self.sft, self.depth)

    def stationarity_defect(self):
        return float(np.abs(self.weights @ self.chain - self.weights).sum())

    def expectation(self, obs):
        _, prefix = _structure(self.sft, obs.range, self.depth, DEFAULT_WORD_CAP)
        return float(self.weights @ obs.values[prefix])


def gibbs_weights(triple, op=None):
    """Gibbs measure ``mu = h nu`` at the operator depth, with its sampling chain.

    Depth ``m + 1`` masses come in closed form from conformality of ``nu``:
    ``mu[a0..am] = exp(phi(a0..)) h[a0..a(m-1)] nu[a1..am] / lam``.
    """
    op = op or triple.op
    A, m = op.sft, op.depth
    w = triple.h * triple.nu
    w = w / w.sum()
    if np.any(w < ZERO_MASS):
        raise ZeroMassCylinder(f"cylinder weight {w.min():.3e} below {ZERO_MASS}")
    succ = _successor_table(A, m)
    ephi = np.exp(op.lifted_potential)
    n = len(w)
    chain = np.zeros((n, n))
    rows, cols = np.nonzero(succ >= 0)
    targets = succ[rows, cols]
    # mu[u a] / mu[u] = exp(phi(u)) nu[u'] / (lam nu[u])
    chain[rows, targets] = ephi[rows] * triple.nu[targets] / (triple.lam * triple.nu[rows])
    chain /= chain.sum(axis=1, keepdims=True)
    w.setflags(write=False)
    chain.setflags(write=False)
    return GibbsDistribution(A, m, w, chain, succ)


def cylinder_weights(gibbs, n):
    """Gibbs masses of all admissible ``n``-words, in canonical order.

    Depths below the stored depth are marginals; deeper cylinders extend the
    stored weights along the Markov chain.
    """
    A, m = gibbs.sft, gibbs.depth
    if n == m:
        return gibbs.weights
    if n < m:
        out = np.zeros(len(enumerate_admissible(A, n)))
        idx = word_index(A, n)
        for w, p in zip(gibbs.words, gibbs.weights):
            out[idx[w[:n]]] += p
        return out
    # n > m: extend parent words (lex order) by successor symbols (ascending)
    succ = gibbs.successors
    chain = gibbs.chain
    state = np.arange(len(gibbs.weights))
    mass = gibbs.weights.copy()
    for _ in range(n - m):
        nxt = succ[state]
        ok = nxt >= 0
        step = chain[state[:, None], np.where(ok, nxt, 0)]
        mass = (mass[:, None] * step)[ok]
        state = nxt[ok]
    return mass


# --- normalization -------------------------------------------------------------


def check_normalized(A, phi, m=None):
    """Whether ``L_phi 1 = 1`` at depth ``m``; returns ``(flag, max_row_defect)``."""
    op = build_operator(A, phi, m)
    defect = float(np.max(np.abs(op.apply(np.ones(op.dim)) - 1.0)))
    return defect <= NORMALIZED_TOL, defect


def normalize(triple, op=None):
    """The cohomologous potential ``phi + log h - log h o sigma - log lam``.

    Its range is ``depth + 1`` and its transfer operator fixes constants.
    """
    op = op or triple.op
    A, m = op.sft, op.depth
    idx = word_index(A, m)
    logh = np.log(triple.h)
    phim = op.lifted_potential
    loglam = math.log(triple.lam)
    words = enumerate_admissible(A, m + 1)
    vals = np.array(
        [phim[idx[w[:m]]] + logh[idx[w[:m]]] - logh[idx[w[1:]]] - loglam for w in words]
    )
    return CylinderPotential(A, m + 1, vals)


# --- convergence and gap ---------------------------------------------------------


def _geometric_fit(errors, floor_rel=1e-11):
    """Fit ``e_n ~ C rate^n`` over the last half of the resolvable range."""
    e = np.asarray(errors, dtype=float)
    scale = max(float(e[0]), float(np.max(e)), 1e-300)
    usable = np.flatnonzero(e > floor_rel * scale)
    if len(usable) < 2 or usable[-1] == 0:
        return 0.0, 0.0
    last = usable[-1]
    first = last // 2
    n = np.arange(first, last + 1)
    y = e[first:last + 1]
    good = y > 0
    if good.sum() < 2:
        return 0.0, 0.0
    slope, icpt = np.polyfit(n[good], np.log(y[good]), 1)
    return float(math.exp(slope)), float(math.exp(icpt))


def rpf_convergence(op, triple, g, n_max=60):
    """Sup-norm distance of ``lam^-n L^n g`` from ``nu(g) h`` for ``n = 0..n_max``.

    Returns ``(rows, fitted_rate, fitted_constant)`` with ``rows`` a list of
    ``(n, error)``.  The constant is relative to ``|g|_inf``.
    """
    g = np.asarray(g, dtype=float)
    target = (triple.nu @ g) * triple.h
    x = g.copy()
    rows = []
    for n in range(n_max + 1):
        rows.append((n, float(np.max(np.abs(x - target)))))
        x = op.matrix @ x / triple.lam
    rate, C = _geometric_fit([e for _, e in rows])
    gnorm = float(np.max(np.abs(g))) or 1.0
    return rows, rate, C / gnorm


@dataclass(frozen=True)
class SpectralGap:
    lam: float
    lambda2_mag: float
    gap: float
    ratio_gap: float
    gap_lower_bound: float
    method: str


def spectral_gap(op, alpha=1.0, metric_base=DEFAULT_METRIC_BASE, triple=None):
    """Spectral gap ``log lam - log |lambda_2|`` (``inf`` when ``lambda_2 = 0``).

    ``ratio_gap`` is ``1 - |lambda_2| / lam``.  ``gap_lower_bound`` is the
    essential-radius bound ``alpha * log(1 / metric_base)``, informational only.
    """
    if op.dim > DENSE_LIMIT:
        raise DimensionTooLarge(f"dimension {op.dim} exceeds {DENSE_LIMIT}")
    triple = triple or leading_triple(op)
    mag, method = _second_magnitude(op.matrix, triple)
    gap = math.inf if mag == 0.0 else math.log(triple.lam) - math.log(mag)
    bound = alpha * math.log(1.0 / metric_base)
    return SpectralGap(triple.lam, mag, gap, 1.0 - mag / triple.lam, bound, method)


def gibbs_constants(triple, n):
    """Empirical Gibbs constants ``(c1, c2)`` over admissible cylinders.

    For each admissible word ``w`` of length ``n + range - 1`` the ratio
    ``mu[w] / exp(S_n phi(w) - n P)`` is formed; the extremes are returned.
    """
    op = triple.op
    phi = op.potential
    k = phi.range
    L = n + k - 1
    gibbs = gibbs_weights(triple, op)
    mu = cylinder_weights(gibbs, L)
    kidx = word_index(op.sft, k)
    P = triple.pressure
    ratios = []
    for w, mass in zip(enumerate_admissible(op.sft, L), mu):
        s = sum(phi.values[kidx[w[j:j + k]]] for j in range(n))
        ratios.append(mass / math.exp(s - n * P))
    return float(min(ratios)), float(max(ratios))


def spectral_report(op, triple=None):
    """Flat record for key-value output."""
    triple = triple or leading_triple(op)
    gap = spectral_gap(op, triple=triple)
    return {
        "lambda": triple.lam,
        "pressure": triple.pressure,
        "lambda2_mag": gap.lambda2_mag,
        "gap": gap.gap,
        "ratio_gap": gap.ratio_gap,
        "iterations": triple.iterations,
        "residual": triple.residual,
        "depth": op.depth,
        "dimension": op.dim,
    }
