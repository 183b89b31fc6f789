"""Hyperbolic toral automorphisms of the 2-torus and their C1-small perturbations.

Covers closed-form eigendata, the geometric potential on a symbolic coding,
Lyapunov exponents from cocycle products along orbits, and the product
formula for unstable conditional densities.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
import math

import numpy as np

from . import kernels
from .errors import (
    CodingMismatch,
    ConeMarginViolated,
    DomainError,
    InputError,
    NewtonDivergence,
    NotHyperbolic,
    NotOnCommonLeaf,
    NotUnimodular,
)
from .potentials import constant_potential
from .sft import topological_entropy
from .transfer import pressure

TWO_PI = 2.0 * math.pi
CODING_TOL = 1e-6
PULLBACK_STEPS = 30

# Fixed perturbation shape used by the reports: (frequency, amplitude) pairs.
DEFAULT_MODES = (
    ((1, 0), (1.0, 0.0)),
    ((0, 1), (0.5, 1.0)),
    ((1, 1), (0.3, -0.4)),
)


@dataclass(frozen=True, eq=False)
class ToralAutomorphism:
    matrix: np.ndarray

    def __post_init__(self):
        M = np.asarray(self.matrix)
        if M.shape != (2, 2):
            raise InputError("only 2x2 toral automorphisms are supported")
        if not np.all(np.equal(np.mod(M, 1), 0)):
            raise InputError("matrix entries must be integers")
        M = M.astype(np.int64)
        d = int(round(np.linalg.det(M)))
        if abs(d) != 1:
            raise NotUnimodular(f"determinant {d} is not +-1")
        if abs(int(np.trace(M))) <= 2:
            raise NotHyperbolic(f"|trace| = {abs(int(np.trace(M)))} <= 2")
        M.setflags(write=False)
        object.__setattr__(self, "matrix", M)

    @property
    def det(self):
        M = self.matrix
        return int(M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0])

    @property
    def trace(self):
        return int(self.matrix[0, 0] + self.matrix[1, 1])

    @property
    def inverse(self):
        """Integer inverse ``adj(M) / det``."""
        (a, b), (c, d) = self.matrix
        return np.array([[d, -b], [-c, a]], dtype=np.int64) * self.det

    def __call__(self, x):
        return np.mod(np.asarray(x, dtype=float) @ self.matrix.T, 1.0)


def _as_automorphism(M):
    return M if isinstance(M, ToralAutomorphism) else ToralAutomorphism(np.asarray(M))


@dataclass(frozen=True)
class HyperbolicToralData:
    matrix: np.ndarray
    lambda_u: float
    lambda_s: float
    v_u: np.ndarray
    v_s: np.ndarray
    h_top: float
    phi_u: float
    chi_plus: float
    det: int


def _eigvec(M, r):
    (a, b), (c, d) = M
    # pick the better-conditioned row of (M - rI) v = 0
    v = np.array([b, r - a]) if abs(b) + abs(r - a) >= abs(r - d) + abs(c) else np.array([r - d, c])
    v = v / np.hypot(*v)
    return v if v[np.argmax(np.abs(v))] > 0 else -v


def _growth_rate(M, steps=200):
    """``log |M v|`` for ``v`` pushed forward ``steps`` times from a fixed seed."""
    v = np.array([1.0, math.sqrt(2.0) - 1.0])
    for _ in range(steps):
        w = M @ v
        v = w / np.hypot(*w)
    return math.log(np.hypot(*(M @ v)))


def analyze(M):
    """Eigendata of a hyperbolic toral automorphism from its characteristic polynomial."""
    f = _as_automorphism(M)
    t, d = f.trace, f.det
    disc = math.sqrt(t * t - 4 * d)
    big = (t + math.copysign(disc, t)) / 2
    small = d / big  # product of roots is det; avoids cancellation
    Mf = f.matrix.astype(float)
    lam_u = abs(big)
    return HyperbolicToralData(
        matrix=f.matrix,
        lambda_u=lam_u,
        lambda_s=abs(small),
        v_u=_eigvec(Mf, big),
        v_s=_eigvec(Mf, small),
        h_top=math.log(lam_u),
        phi_u=-math.log(lam_u),
        chi_plus=_growth_rate(Mf),
        det=d,
    )


def pesin_check(data):
    """``(h_top, chi_plus, |h_top - chi_plus|)``; the two come from separate computations."""
    return data.h_top, data.chi_plus, abs(data.h_top - data.chi_plus)


@dataclass(frozen=True)
class ConjugacyEstimate:
    gamma: float
    displacement_bound_exponent: float
    lambda_s: float
    dg_sup: float


def holder_exponent(lambda_s, dg_sup):
    """``gamma = log lambda_s / (log lambda_s - log dg_sup)`` for the conjugacy.

    The displacement ``d(h(x), x)`` scales like ``|f - g|_C1 ** gamma``.
    """
    if not 0.0 < lambda_s < 1.0:
        raise DomainError("lambda_s must lie in (0, 1)")
    if not dg_sup > 1.0:
        raise DomainError("dg_sup must exceed 1")
    ls = math.log(lambda_s)
    g = ls / (ls - math.log(dg_sup))
    return ConjugacyEstimate(g, g, lambda_s, dg_sup)


def holonomy_constant(c0, c, alpha, lam):
    """Holonomy Jacobian bound ``K = c0 c^alpha / (1 - lam^alpha)``."""
    if not 0.0 < lam < 1.0 or alpha <= 0:
        raise DomainError("need 0 < lam < 1 and alpha > 0")
    return c0 * c**alpha / (1.0 - lam**alpha)


# --- perturbed maps ------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class PerturbedMap:
    """``g(x) = M x + eps * sum_j amp_j sin(2 pi k_j . x)  (mod 1)``."""

    base: ToralAutomorphism
    modes: tuple = DEFAULT_MODES
    epsilon: float = 0.0
    kvec: np.ndarray = field(init=False, repr=False)
    amp: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "base", _as_automorphism(self.base))
        k = np.array([m[0] for m in self.modes], dtype=float).reshape(-1, 2)
        a = np.array([m[1] for m in self.modes], dtype=float).reshape(-1, 2)
        if not np.all(np.equal(np.mod(k, 1), 0)):
            raise InputError("frequencies must be integer vectors")
        object.__setattr__(self, "kvec", np.ascontiguousarray(k))
        object.__setattr__(self, "amp", np.ascontiguousarray(a))
        data = analyze(self.base)
        margin = (data.lambda_u - data.lambda_s) / 4
        if self.derivative_bound >= margin:
            raise ConeMarginViolated(
                f"sup |D perturbation| <= {self.derivative_bound:.4g} is not below the margin {margin:.4g}"
            )

    @property
    def derivative_bound(self):
        """Upper bound on ``sup |D(g - M)|`` (operator norm)."""
        return abs(self.epsilon) * TWO_PI * float(
            np.sum(np.hypot(*self.amp.T) * np.hypot(*self.kvec.T))
        )

    @property
    def c1_norm_bound(self):
        """``|g - f|_C1 <= eps * sum_j |amp_j| (1 + 2 pi |k_j|)``."""
        amp = np.hypot(*self.amp.T)
        return abs(self.epsilon) * float(np.sum(amp * (1 + TWO_PI * np.hypot(*self.kvec.T))))

    @property
    def dg_sup(self):
        """Upper bound on ``sup |Dg|``."""
        return float(np.linalg.norm(self.base.matrix, 2)) + self.derivative_bound

    def lift(self, x):
        """``M x + displacement`` without reducing mod 1."""
        x = np.asarray(x, dtype=float)
        s = np.sin(TWO_PI * (x @ self.kvec.T))
        return x @ self.base.matrix.T + self.epsilon * (s @ self.amp)

    def __call__(self, x):
        return np.mod(self.lift(x), 1.0)

    def jacobian(self, x):
        """``Dg(x)``; shape ``(2, 2)`` or ``(P, 2, 2)``."""
        x = np.asarray(x, dtype=float)
        c = TWO_PI * np.cos(TWO_PI * (x @ self.kvec.T))
        D = np.einsum("...j,ja,jb->...ab", c, self.amp, self.kvec)
        return self.base.matrix + self.epsilon * D


def _wrap(d):
    return d - np.round(d)


def torus_distance(x, y):
    return np.hypot(*_wrap(np.asarray(x, float) - np.asarray(y, float)).T)


def invert(pmap, y, tol=1e-12, max_steps=50):
    """Preimage of ``y`` under ``pmap`` by Newton's method from the linear inverse."""
    y = np.mod(np.asarray(y, dtype=float), 1.0)
    x = np.mod(y @ pmap.base.inverse.T.astype(float), 1.0)
    if pmap.epsilon == 0:
        return x
    for _ in range(max_steps):
        r = _wrap(pmap.lift(x) - y)
        done = np.max(np.abs(r)) <= tol
        # one extra step after the residual test so the preimage error is also below tol
        x = x - np.linalg.solve(pmap.jacobian(x), r[..., None])[..., 0]
        if done:
            return np.mod(x, 1.0)
    raise NewtonDivergence(f"inverse not found to {tol} in {max_steps} Newton steps")


def backward_orbit(pmap, x, n):
    """``[x_{-1}, ..., x_{-n}]`` with ``x_{-k} = g^{-k}(x)``."""
    out = []
    for _ in range(n):
        x = invert(pmap, x)
        out.append(x)
    return out


def _expansions_along(pmap, points, seed_vec):
    """Push ``seed_vec`` forward through ``points`` (in order), returning ``|Dg v|`` at each."""
    v = np.asarray(seed_vec, dtype=float)
    growth = []
    for p in points:
        w = pmap.jacobian(p) @ v
        n = float(np.hypot(*w))
        growth.append(n)
        v = w / n
    return growth, v


def unstable_direction(pmap, x, steps=PULLBACK_STEPS):
    """Unit vector spanning ``E^u(x)``: a seed pushed forward from ``g^{-steps}(x)``."""
    data = analyze(pmap.base)
    back = backward_orbit(pmap, x, steps)
    _, v = _expansions_along(pmap, back[::-1], data.v_u)
    return v


def unstable_jacobian(pmap, x, steps=PULLBACK_STEPS):
    """``|Dg(x)|_{E^u}|``."""
    v = unstable_direction(pmap, x, steps)
    return float(np.hypot(*(pmap.jacobian(x) @ v)))


def leaf_neighbor(pmap, x, offset, depth=20):
    """A point about ``offset`` away from ``x`` on its local unstable leaf.

    Offsets ``g^{-depth}(x)`` along ``E^u`` by ``offset * lambda_u^-depth`` and
    pushes the result forward ``depth`` steps.
    """
    data = analyze(pmap.base)
    x = np.asarray(x, dtype=float)
    back = backward_orbit(pmap, x, depth)
    start = back[-1]
    e = unstable_direction(pmap, start)
    y = start + offset * data.lambda_u ** (-depth) * e
    for _ in range(depth):
        y = pmap(y)
    return y


@dataclass
class DensityProduct:
    density: float
    log_terms: list
    fitted_rate: float
    fitted_constant: float
    partial_products: list


def _check_common_leaf(pmap, x, y, max_dist=0.05, angle_tol=1e-2):
    d0 = torus_distance(x, y)
    if d0 == 0:
        return
    if d0 >= max_dist:
        raise NotOnCommonLeaf(f"points are {d0:.3g} apart (limit {max_dist})")
    # forward: the separation should line up with E^u (stop before it wraps)
    fx, fy = x, y
    for _ in range(10):
        nx, ny = pmap(fx), pmap(fy)
        if torus_distance(nx, ny) > 0.1:
            break
        fx, fy = nx, ny
    sep = _wrap(fy - fx)
    # compare with E^u at the chord midpoint so leaf curvature cancels to first order
    e = unstable_direction(pmap, np.mod(fx + 0.5 * sep, 1.0))
    sin_angle = abs(sep[0] * e[1] - sep[1] * e[0]) / np.hypot(*sep)
    if sin_angle > angle_tol:
        raise NotOnCommonLeaf(f"separation is {sin_angle:.3g} rad off the unstable direction")
    # backward: points on one unstable leaf converge in the past
    bx, by = backward_orbit(pmap, x, 10)[-1], backward_orbit(pmap, y, 10)[-1]
    if torus_distance(bx, by) > 1e-2 * d0:
        raise NotOnCommonLeaf("backward orbits do not converge")


def _step_difference(pmap, x, d):
    """``g(x + d) - g(x)`` evaluated without cancellation for small ``d``."""
    kd = np.pi * (d @ pmap.kvec.T)
    s = 2.0 * np.cos(TWO_PI * (x @ pmap.kvec.T) + kd) * np.sin(kd)
    return pmap.base.matrix @ d + pmap.epsilon * (s @ pmap.amp)


def _stable_directions(pmap, x, back, steps=PULLBACK_STEPS):
    """``E^s`` at ``x`` and at each point of ``back``, by pulling a seed back from ``g^steps(x)``."""
    data = analyze(pmap.base)
    fwd = [x]
    for _ in range(steps):
        fwd.append(pmap(fwd[-1]))
    v = data.v_s
    for p in fwd[-2::-1]:
        v = np.linalg.solve(pmap.jacobian(p), v)
        v = v / np.hypot(*v)
    out = [v]
    for p in back:
        v = np.linalg.solve(pmap.jacobian(p), v)
        v = v / np.hypot(*v)
        out.append(v)
    return out


def _drop_stable(d, eu, es):
    # d = a eu + b es; keep a eu
    a = (d[0] * es[1] - d[1] * es[0]) / (eu[0] * es[1] - eu[1] * es[0])
    return a * eu


def partner_orbit(pmap, back, d0, eu, es, max_steps=50):
    """Offsets ``d_k = g^-k(y) - g^-k(x)`` for ``y`` on the unstable leaf of ``x``.

    ``back`` is the backward orbit ``x_-1, x_-2, ...``; ``eu`` and ``es`` hold
    the unstable and stable directions at ``x, x_-1, ...``.  Solving for the
    offset directly keeps its relative accuracy as it shrinks.  Any stable
    component (roundoff, or ``y`` lying slightly off the leaf) would grow
    under backward iteration, so it is projected out at every step; this
    moves ``y`` by far less than its floating-point spacing.
    """
    inv = pmap.base.inverse.astype(float)
    d = _drop_stable(np.asarray(d0, dtype=float), eu[0], es[0])
    out = []
    for k, x in enumerate(back, 1):
        target = d
        d = inv @ target
        for _ in range(max_steps):
            r = _step_difference(pmap, x, d) - target
            step = np.linalg.solve(pmap.jacobian(x + d), r)
            d = d - step
            if np.max(np.abs(step)) <= 1e-12 * np.max(np.abs(d)) or not np.any(r):
                break
        else:
            raise NewtonDivergence("offset along the backward orbit did not converge")
        d = _drop_stable(d, eu[k], es[k])
        out.append(d)
    return out


def unstable_density_product(pmap, x, y, n_terms=30, check=True):
    """Conditional density ratio ``rho(x, y)`` on an unstable leaf.

    ``rho = prod_{k >= 1} J^u(g^-k x) / J^u(g^-k y)`` with ``J^u`` the unstable
    expansion factor.  Points on one unstable leaf approach each other under
    backward iteration, so the log-terms decay like ``lambda_s ** k``.
    """
    x = np.mod(np.asarray(x, dtype=float), 1.0)
    y = np.mod(np.asarray(y, dtype=float), 1.0)
    if check:
        _check_common_leaf(pmap, x, y)
    data = analyze(pmap.base)
    K = n_terms + PULLBACK_STEPS
    bx = backward_orbit(pmap, x, K + PULLBACK_STEPS)
    # unstable directions at x_-K .. x_0 (pushed up from x_-(K + PULLBACK))
    gx, _ = _expansions_along(pmap, bx[::-1], data.v_u)
    eu = [data.v_u]
    v = data.v_u
    for p in bx[::-1]:
        w = pmap.jacobian(p) @ v
        v = w / np.hypot(*w)
        eu.append(v)
    eu = eu[::-1][: K + 1]  # eu[k] is E^u at x_-k
    es = _stable_directions(pmap, x, bx[:K])
    by = [p + d for p, d in zip(bx[:K], partner_orbit(pmap, bx[:K], _wrap(y - x), eu, es))]
    # J^u along y, seeded with E^u(x_-K) so both orbits get the same number of pushes
    gy, _ = _expansions_along(pmap, by[::-1], eu[K])
    gx = gx[::-1][:n_terms]  # gx[k-1] = J^u(x_-k)
    gy = gy[::-1][:n_terms]
    logs = [math.log(a / b) for a, b in zip(gx, gy)]
    partial = list(np.exp(np.cumsum(logs)))
    rate, C = _fit_decay(np.abs(logs))
    return DensityProduct(float(math.exp(math.fsum(logs))), logs, rate, C, partial)


def _fit_decay(vals, floor=1e-14):
    """Geometric fit ``|t_k| ~ C rate^k`` over terms above ``floor``; zeros give rate 0."""
    vals = np.asarray(vals, dtype=float)
    k = np.arange(1, len(vals) + 1)
    ok = vals > floor
    if ok.sum() < 3:
        return 0.0, float(vals.max(initial=0.0))
    slope, icpt = np.polyfit(k[ok], np.log(vals[ok]), 1)
    return float(math.exp(slope)), float(math.exp(icpt))


# --- Lyapunov exponents ---------------------------------------------------------------


@dataclass
class LyapunovEstimate:
    chi: float
    std_err: float
    per_point: np.ndarray = field(repr=False)


def lyapunov_cocycle(pmap, orbit_len, n_points, seed, n_burn=100, workers=1, backend=None):
    """Top Lyapunov exponent from renormalized tangent-vector growth.

    Each of ``n_points`` uniformly random starts runs ``n_burn`` warm-up
    steps and then ``orbit_len`` counted steps.
    """
    impl = kernels.backend(backend)
    data = analyze(pmap.base)
    x0 = np.random.default_rng(seed).random((n_points, 2))
    M = np.ascontiguousarray(pmap.base.matrix, dtype=float)
    workers = max(1, int(workers))
    chunks = np.array_split(np.arange(n_points), workers)

    def run(idx):
        return impl.lyapunov_sums(M, pmap.kvec, pmap.amp, float(pmap.epsilon),
                                  np.ascontiguousarray(x0[idx]), data.v_u, n_burn, orbit_len)

    if workers == 1:
        sums = run(chunks[0])
    else:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            sums = np.concatenate(list(ex.map(run, chunks)))
    chi = sums / orbit_len
    err = float(chi.std(ddof=1) / math.sqrt(n_points)) if n_points > 1 else math.nan
    return LyapunovEstimate(float(chi.mean()), err, chi)


# --- symbolic side ----------------------------------------------------------------------


@dataclass
class GeometricPotential:
    potential: object
    pressure: float
    spectral_radius: float


def geometric_potential_symbolic(data, coding):
    """Constant potential ``-log lambda_u`` on a coding shift, with its pressure.

    The coding matrix is accepted only if its spectral radius equals
    ``lambda_u`` to 1e-6.
    """
    h = topological_entropy(coding)
    if abs(h - math.log(data.lambda_u)) >= CODING_TOL:
        raise CodingMismatch(
            f"coding matrix has spectral radius {math.exp(h):.9g}, expected {data.lambda_u:.9g}"
        )
    phi = constant_potential(coding, data.phi_u)
    return GeometricPotential(phi, pressure(coding, phi), math.exp(h))


def catmap_report(matrix, coding, dg_sup=3.0):
    """Summary table of the constants of a hyperbolic toral automorphism, in print order."""
    data = analyze(matrix)
    geo = geometric_potential_symbolic(data, coding)
    _, _, defect = pesin_check(data)
    return {
        "dimension": 2,
        "alphabet_size": coding.size,
        "lambda_u": data.lambda_u,
        "lambda_s": data.lambda_s,
        "h_top": data.h_top,
        "phi_u": data.phi_u,
        "pressure_phi_u": geo.pressure,
        "pesin_defect": defect,
        "gamma": holder_exponent(data.lambda_s, dg_sup).gamma,
    }
