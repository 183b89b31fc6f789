"""Statistical properties of Gibbs measures.

Correlation decay and Green-Kubo variances are computed exactly (up to
floating point) by iterating the transfer operator; the CLT is checked by
Monte Carlo on the Gibbs Markov chain; pressure derivatives by finite
differences; and Wasserstein distances with the cylinder-tree formula for
the ultrametric ``d(x, y) = theta ** separation``.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
import math

import numpy as np

from . import kernels
from .errors import NegativeVariance, RangeTooLarge, ShiftMismatch
from .potentials import DEFAULT_METRIC_BASE
from .transfer import (
    _geometric_fit,
    build_operator,
    cylinder_weights,
    gibbs_weights,
    leading_triple,
)

SERIES_CUTOFF = 1e-12
NEG_VARIANCE_TOL = 1e-10


@dataclass
class CorrelationReport:
    lags: list
    values: list
    fitted_rate: float
    predicted_rate: float
    mean_g: float
    mean_h: float

    def rows(self):
        return list(zip(self.lags, self.values))


@dataclass
class VarianceEstimate:
    var0: float
    covariances: list
    sigma2: float
    truncation_k: int
    tail_bound: float
    mean_removed: float


def _vector(op, obs):
    if obs.range > op.depth:
        raise RangeTooLarge(f"observable range {obs.range} exceeds operator depth {op.depth}")
    return op.lift(obs)


def _centered(triple, op, obs):
    g = _vector(op, obs)
    mu = triple.h * triple.nu
    mean = float(mu @ g)
    return g - mean, mean


def correlation(triple, g, h, n_max=40, op=None):
    """Correlations ``C_n = int g (h o sigma^n) dmu - int g dmu int h dmu``.

    Uses ``C_n = lam^-n  nu( h~ . L^n(h_phi g~) )`` with centered ``g~, h~``.
    """
    op = op or triple.op
    gc, mg = _centered(triple, op, g)
    hc, mh = _centered(triple, op, h)
    u = triple.h * gc
    values = []
    for _ in range(n_max + 1):
        values.append(float(triple.nu @ (hc * u)))
        u = op.matrix @ u / triple.lam
    rate, _ = _geometric_fit(np.abs(values))
    _, predicted = triple.gap_info
    return CorrelationReport(list(range(n_max + 1)), values, rate, predicted, mg, mh)


def green_kubo(triple, g, op=None, max_lag=100_000):
    """Asymptotic variance ``Var(g) + 2 sum_k Cov(g, g o sigma^k)`` under ``mu_phi``.

    The series stops once three consecutive covariances fall below 1e-12;
    ``tail_bound`` is a geometric estimate of what was dropped.
    """
    op = op or triple.op
    gc, mean = _centered(triple, op, g)
    u = triple.h * gc
    var0 = float(triple.nu @ (gc * u))
    covs = []
    small = 0
    for _ in range(max_lag):
        u = op.matrix @ u / triple.lam
        c = float(triple.nu @ (gc * u))
        covs.append(c)
        small = small + 1 if abs(c) < SERIES_CUTOFF else 0
        if small >= 3:
            break
    sigma2 = var0 + 2.0 * math.fsum(covs)
    rate, _ = _geometric_fit(np.abs([var0] + covs), floor_rel=1e-14)
    last = abs(covs[-1]) if covs else 0.0
    tail = 2.0 * last * rate / (1.0 - rate) if 0.0 < rate < 1.0 else 2.0 * last
    if sigma2 < 0:
        if sigma2 < -NEG_VARIANCE_TOL:
            raise NegativeVariance(f"Green-Kubo sum is {sigma2:.3e} < 0")
        sigma2 = 0.0
    return VarianceEstimate(var0, covs, sigma2, len(covs), tail, mean)


def chain_variance(gibbs, g, max_lag=100_000):
    """Asymptotic variance computed from the sampling chain alone.

    Independent of the transfer-operator route: ``Cov_k = pi . (g~ * P^k g~)``.
    """
    gv = _state_values(gibbs, g)
    pi = gibbs.weights
    gc = gv - pi @ gv
    var0 = float(pi @ (gc * gc))
    x = gc.copy()
    total, small = 0.0, 0
    for _ in range(max_lag):
        x = gibbs.chain @ x
        c = float(pi @ (gc * x))
        total += c
        small = small + 1 if abs(c) < SERIES_CUTOFF else 0
        if small >= 3:
            break
    return max(var0 + 2.0 * total, 0.0)


def _state_values(gibbs, obs):
    if obs.range > gibbs.depth:
        raise RangeTooLarge(f"observable range {obs.range} exceeds chain depth {gibbs.depth}")
    from .transfer import _structure
    from .sft import DEFAULT_WORD_CAP

    _, prefix = _structure(gibbs.sft, obs.range, gibbs.depth, DEFAULT_WORD_CAP)
    return np.ascontiguousarray(obs.values[prefix], dtype=float)


# --- Monte Carlo CLT ---------------------------------------------------------------


@dataclass
class CLTResult:
    sample_mean: float
    sample_var: float
    sigma2_ref: float
    frac_beyond_196: float
    n: int
    trials: int
    mean_removed: float
    batches: list = field(default_factory=list)
    backend: str = ""


def _sampling_tables(gibbs):
    succ = np.ascontiguousarray(gibbs.successors, dtype=np.int64)
    S, N = succ.shape
    cum = np.zeros((S, N))
    for s in range(S):
        acc, last = 0.0, -1
        for a in range(N):
            t = succ[s, a]
            if t >= 0:
                acc += gibbs.chain[s, t]
                last = a
            cum[s, a] = acc
        cum[s, last:] = 2.0
    cum0 = np.cumsum(gibbs.weights)
    cum0[-1] = 2.0
    return succ, np.ascontiguousarray(cum), np.ascontiguousarray(cum0)


def sample_birkhoff(gibbs, g, n, trials, seed, workers=1, backend=None, center=True):
    """``S_n g`` along ``trials`` stationary chain paths (uncentered unless ``center``).

    Trial ``i`` always uses random stream ``i`` of ``seed``, so the output
    does not depend on ``workers`` or on the backend.
    """
    impl = kernels.backend(backend)
    succ, cum, cum0 = _sampling_tables(gibbs)
    gv = _state_values(gibbs, g)
    mean = float(gibbs.weights @ gv) if center else 0.0
    gv = np.ascontiguousarray(gv - mean)
    workers = max(1, int(workers))
    bounds = np.linspace(0, trials, workers + 1).astype(int)

    def run(i):
        return impl.chain_birkhoff_sums(succ, cum, cum0, gv, n, int(bounds[i]), int(bounds[i + 1]), seed)

    if workers == 1:
        parts = [run(0)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(run, range(workers)))
    return np.concatenate(parts), mean


def clt_monte_carlo(gibbs, g, n, trials, seed, sigma2_ref=None, workers=1, backend=None,
                    n_batches=10):
    """Monte Carlo check of ``S_n g / sqrt(n) -> N(0, sigma^2)``.

    ``g`` is centered under the Gibbs measure first.  Without an explicit
    ``sigma2_ref`` the reference variance comes from :func:`chain_variance`.
    """
    sums, mean = sample_birkhoff(gibbs, g, n, trials, seed, workers, backend)
    z = sums / math.sqrt(n)
    ref = chain_variance(gibbs, g) if sigma2_ref is None else float(sigma2_ref)
    if ref > 0:
        frac = float(np.mean(np.abs(z) > 1.96 * math.sqrt(ref)))
    else:
        frac = float(np.mean(np.abs(z) > 0))
    batches = []
    for i, chunk in enumerate(np.array_split(z, min(n_batches, trials))):
        batches.append((i, len(chunk), float(chunk.mean()), float(chunk.var(ddof=1)) if len(chunk) > 1 else 0.0))
    name = backend or kernels.BACKEND
    return CLTResult(float(z.mean()), float(z.var(ddof=1)) if trials > 1 else 0.0, ref, frac,
                     n, trials, mean, batches, name)


# --- pressure derivatives --------------------------------------------------------


@dataclass
class DerivativeCheck:
    numeric_first: float
    analytic_first: float
    numeric_second: float
    analytic_second: float

    @property
    def first_rel_error(self):
        return abs(self.numeric_first - self.analytic_first) / max(abs(self.analytic_first), 1e-300)

    @property
    def second_rel_error(self):
        return abs(self.numeric_second - self.analytic_second) / max(abs(self.analytic_second), 1e-300)


def pressure_derivative_check(A, phi, psi, step=1e-3, m=None):
    """First and second derivatives of ``t -> P(phi + t psi)`` at 0, two ways.

    Numeric values are Richardson-extrapolated central differences at
    ``step`` and ``step / 2``; analytic values are ``int psi dmu_phi`` and the
    Green-Kubo variance of ``psi``.
    """
    if not 1e-6 <= step <= 1e-2:
        raise ValueError("step must lie in [1e-6, 1e-2]")
    m = m if m is not None else max(phi.range, psi.range, 2)

    def P(t):
        return leading_triple(build_operator(A, phi + t * psi, m)).pressure

    p0 = P(0.0)
    vals = {}
    for h in (step, step / 2):
        vals[h] = (P(h), P(-h))

    def d1(h):
        a, b = vals[h]
        return (a - b) / (2 * h)

    def d2(h):
        a, b = vals[h]
        return (a - 2 * p0 + b) / (h * h)

    num1 = (4 * d1(step / 2) - d1(step)) / 3
    num2 = (4 * d2(step / 2) - d2(step)) / 3
    triple = leading_triple(build_operator(A, phi, m))
    gibbs = gibbs_weights(triple)
    an1 = gibbs.expectation(psi)
    an2 = green_kubo(triple, psi).sigma2
    return DerivativeCheck(float(num1), an1, float(num2), an2)


# --- Wasserstein -------------------------------------------------------------------


def wasserstein_ultrametric(mu1, mu2, depth, metric_base=DEFAULT_METRIC_BASE):
    """W1 between the depth-``depth`` marginals under ``d = metric_base ** separation``.

    Cylinder-tree formula
    ``sum_{j<d} (t^j - t^(j+1)) TV_(j+1) + t^d TV_d``, where ``TV_i`` is the
    total variation of the length-``i`` marginals.  This is the exact optimal
    transport cost between the two measures on the finite ultrametric space
    of depth-``d`` cylinders.
    """
    if mu1.sft != mu2.sft:
        raise ShiftMismatch("measures live on different shifts")
    t = float(metric_base)
    total = 0.0
    tv = 0.0
    for j in range(depth):
        w1 = cylinder_weights(mu1, j + 1)
        w2 = cylinder_weights(mu2, j + 1)
        tv = 0.5 * float(np.abs(w1 - w2).sum())
        total += (t**j - t ** (j + 1)) * tv
    return total + t**depth * tv


@dataclass
class StabilityProbe:
    rows: list
    slope: float


def equilibrium_stability_probe(A, phi, perturbations, m=None, depth=8,
                                metric_base=DEFAULT_METRIC_BASE):
    """Table of ``(|dphi|_inf, W1(mu_phi, mu_(phi + dphi)))``, largest perturbation first.

    ``slope`` is the least-squares constant through the origin, an empirical
    Lipschitz constant for the equilibrium-state map.
    """
    m = m if m is not None else max(phi.range, 2)
    base = gibbs_weights(leading_triple(build_operator(A, phi, m)))
    rows = []
    for d in perturbations:
        mu = gibbs_weights(leading_triple(build_operator(A, phi + d, m)))
        rows.append((d.sup_norm(), wasserstein_ultrametric(base, mu, depth, metric_base)))
    rows.sort(key=lambda r: -r[0])
    x = np.array([r[0] for r in rows])
    y = np.array([r[1] for r in rows])
    slope = float(x @ y / (x @ x)) if np.any(x > 0) else 0.0
    return StabilityProbe(rows, slope)
