"""Dynamical zeta function, Fredholm determinant and its leading zero.

For a locally constant potential the zeta function of the discretized
operator ``M`` is rational: ``zeta(z) = 1 / det(I - z M)``, and the
weighted periodic-orbit sums are exactly ``a_n = tr(M^n)``.
"""

from dataclasses import dataclass
import math
import warnings

import numpy as np

from ._linalg import perron_pair
from .errors import (
    DimensionTooLarge,
    NumericalError,
    NewtonDivergence,
    NoRootInRadius,
    RangeTooLarge,
)
from .sft import DEFAULT_WORD_CAP, count_fixed, enumerate_periodic, require_primitive
from .transfer import DENSE_LIMIT, build_operator

POLY_LIMIT = 64
DEFAULT_NMAX = 20


@dataclass(frozen=True)
class ZetaTruncation:
    n_max: int
    coefficients: tuple  # a_1 .. a_n_max
    radius_estimate: float
    growth_constant: float

    def nth_roots(self):
        return tuple(a ** (1.0 / n) for n, a in enumerate(self.coefficients, 1))

    def rows(self):
        """``(n, a_n, a_n^(1/n))`` table."""
        return [(n, a, a ** (1.0 / n)) for n, a in enumerate(self.coefficients, 1)]


def _fit_growth(coeffs):
    """Exponential growth ``a_n ~ C r^n`` fitted on the second half of the sequence."""
    a = np.asarray(coeffs, dtype=float)
    n = np.arange(1, len(a) + 1)
    # a_n can vanish for n below the primitivity exponent
    tail = [(i, x) for i, x in zip(n[len(a) // 2:], a[len(a) // 2:]) if x > 0]
    if len(tail) >= 2:
        r = math.exp(np.polyfit([i for i, _ in tail], np.log([x for _, x in tail]), 1)[0])
    elif tail:
        r = tail[0][1] ** (1.0 / tail[0][0])
    else:
        raise NumericalError("no positive orbit sum in the fitting window; raise n_max")
    C = float(np.max(a / r**n))
    return r, C


def _make_truncation(coeffs):
    r, C = _fit_growth(coeffs)
    return ZetaTruncation(len(coeffs), tuple(coeffs), 1.0 / r, C)


def _window_values(phi, words):
    """Cyclic Birkhoff sums of ``phi`` over an ``(P, n)`` array of periodic blocks."""
    N, k = phi.sft.size, phi.range
    table = np.full(N**k, np.nan)
    for w, v in zip(phi.words, phi.values):
        table[sum(s * N ** (k - 1 - i) for i, s in enumerate(w))] = v
    n = words.shape[1]
    total = np.zeros(words.shape[0])
    for j in range(n):
        code = np.zeros(words.shape[0], dtype=np.int64)
        for i in range(k):
            code = code * N + words[:, (j + i) % n]
        total += table[code]
    return total


def orbit_sums(A, phi, n_max=DEFAULT_NMAX, method="enumerate", cap=DEFAULT_WORD_CAP):
    """Weighted periodic-orbit sums ``a_n = sum_{Fix(sigma^n)} exp(S_n phi)``.

    ``method='enumerate'`` lists every periodic block (subject to ``cap``);
    ``method='trace'`` uses ``tr(M^n)`` of the discretized operator, which
    is exact for locally constant potentials and has no budget.
    """
    if phi.sft != A:
        raise ValueError("potential is defined on a different shift")
    if method == "trace":
        M = build_operator(A, phi).matrix
        P = np.eye(M.shape[0])
        coeffs = []
        for _ in range(n_max):
            P = P @ M
            coeffs.append(float(np.trace(P)))
        return _make_truncation(coeffs)
    if method != "enumerate":
        raise ValueError(f"unknown method {method!r}")
    coeffs = []
    for n in range(1, n_max + 1):
        words = np.array(enumerate_periodic(A, n, cap), dtype=np.int64).reshape(-1, n)
        coeffs.append(math.fsum(np.exp(_window_values(phi, words))))
    return _make_truncation(coeffs)


@dataclass(frozen=True)
class ZetaValue:
    value: complex
    bound: float  # bound on |zeta(z) - value| from the dropped tail


def zeta_eval(trunc, z):
    """Truncated ``exp(sum_{n <= n_max} z^n a_n / n)`` with a tail bound.

    The dropped log-tail is bounded by ``2 C (|z| r)^(N+1) / ((N+1)(1 - |z| r))``
    using the fitted growth ``a_n <= C r^n`` (factor 2 as a fit margin).
    """
    N = trunc.n_max
    s = sum(z**n * a / n for n, a in enumerate(trunc.coefficients, 1))
    value = np.exp(s)
    if isinstance(z, complex) or np.iscomplexobj(value):
        value = complex(value)
    else:
        value = float(value)
    q = abs(z) / trunc.radius_estimate
    if q >= 1:
        warnings.warn("z lies outside the estimated radius of convergence", RuntimeWarning)
        return ZetaValue(value, math.inf)
    tail = 2.0 * trunc.growth_constant * q ** (N + 1) / ((N + 1) * (1 - q))
    return ZetaValue(value, abs(value) * math.expm1(tail))


def _weighted_adjacency(A, phi):
    if phi.range > 2:
        raise RangeTooLarge("trace identity needs a potential of range at most 2")
    N = A.size
    W = np.zeros((N, N))
    for a in range(N):
        for b in A.successors[a]:
            W[a, b] = math.exp(phi.value((a, b)[: phi.range]))
    return W


def trace_identity_check(A, phi, n_max=12, cap=DEFAULT_WORD_CAP):
    """Largest ``|a_n - tr(W^n)| / a_n`` for ``n <= n_max``, ``W_ab = A_ab exp(phi(ab))``.

    Where ``a_n = 0`` (no period-n points) the absolute defect is used.

    The orbit side is enumerated; the zero potential is compared in exact
    integer arithmetic.
    """
    W = _weighted_adjacency(A, phi)
    if not np.any(phi.values):
        worst = 0.0
        for n in range(1, n_max + 1):
            listed = len(enumerate_periodic(A, n, cap))
            worst = max(worst, abs(listed - count_fixed(A, n)) / max(listed, 1))
        return worst
    trunc = orbit_sums(A, phi, n_max, cap=cap)
    P = np.eye(A.size)
    worst = 0.0
    for a in trunc.coefficients:
        P = P @ W
        worst = max(worst, abs(a - np.trace(P)) / a if a > 0 else abs(np.trace(P)))
    return float(worst)


# --- Fredholm determinant -------------------------------------------------------------


@dataclass(frozen=True)
class FredholmPoly:
    coefficients: np.ndarray  # ascending powers of z, constant term 1
    spectral_radius: float = math.nan

    @property
    def degree(self):
        return len(self.coefficients) - 1

    def __call__(self, z):
        return np.polynomial.polynomial.polyval(z, self.coefficients)

    def derivative(self, z):
        d = np.polynomial.polynomial.polyder(self.coefficients)
        return np.polynomial.polynomial.polyval(z, d)


def _matrix(op):
    M = op.matrix if hasattr(op, "matrix") else np.asarray(op, dtype=float)
    if M.shape[0] > DENSE_LIMIT:
        raise DimensionTooLarge(f"dimension {M.shape[0]} exceeds dense limit {DENSE_LIMIT}")
    return M


def fredholm_det(op, z):
    """``det(I - z M)`` by LU factorization."""
    M = _matrix(op)
    sign, logabs = np.linalg.slogdet(np.eye(M.shape[0]) - z * M)
    return sign * np.exp(logabs)


def fredholm_poly(op):
    """Coefficients of ``det(I - z M)``, lowest degree first (dimension <= 64)."""
    M = _matrix(op)
    if M.shape[0] > POLY_LIMIT:
        raise DimensionTooLarge(f"polynomial path limited to dimension {POLY_LIMIT}")
    # np.poly gives det(x I - M) highest power first; reversing x -> 1/z
    # turns that into det(I - z M) lowest power first.
    coeffs = np.real_if_close(np.poly(M), tol=1e6).astype(float)
    coeffs[0] = 1.0
    lam = perron_pair(M)[0] if M.shape[0] else math.nan
    return FredholmPoly(coeffs, lam)


def reciprocal_series(trunc):
    """Power-series coefficients of ``1/zeta`` up to degree ``n_max``.

    ``f = exp(-sum a_n z^n / n)`` satisfies ``n f_n = -sum_{k<=n} a_k f_(n-k)``.
    """
    a = trunc.coefficients
    f = [1.0]
    for n in range(1, trunc.n_max + 1):
        f.append(-math.fsum(a[k - 1] * f[n - k] for k in range(1, n + 1)) / n)
    return FredholmPoly(np.array(f), 1.0 / trunc.radius_estimate)


def pole_locate(source, tol=1e-12):
    """Smallest positive zero of ``det(I - z M)``, the leading pole of zeta.

    ``source`` is a discretized operator, a :class:`FredholmPoly` or a
    :class:`ZetaTruncation` (whose reciprocal series is used).  The zero is
    bracketed below ``(1 + 1e-3) / lambda``, bisected to 1e-6 and polished
    with Newton's method.
    """
    if isinstance(source, ZetaTruncation):
        source = reciprocal_series(source)
    if isinstance(source, FredholmPoly):
        f, df = source, source.derivative
        lam = source.spectral_radius
    else:
        require_primitive(source.sft)
        M = _matrix(source)
        eye = np.eye(M.shape[0])
        lam = perron_pair(M)[0]

        def f(z):
            return fredholm_det(M, z)

        def df(z):
            # d/dz det(I - zM) = -det(I - zM) tr((I - zM)^-1 M)
            return -f(z) * np.trace(np.linalg.solve(eye - z * M, M))

    lo, hi = 1e-9, (1 + 1e-3) / lam
    flo = f(lo)
    grow = 0
    while np.sign(f(hi)) == np.sign(flo):
        grow += 1
        if grow > 200:
            raise NoRootInRadius(f"no sign change of det(I - zM) on (0, {hi:.6g}]")
        hi *= 1.01
    while hi - lo > 1e-6:
        mid = 0.5 * (lo + hi)
        if np.sign(f(mid)) == np.sign(flo):
            lo = mid
        else:
            hi = mid
    z = 0.5 * (lo + hi)
    for _ in range(60):
        if f(z) == 0:
            return float(z)
        try:
            d = df(z)
        except np.linalg.LinAlgError:
            # I - zM numerically singular: z is a zero to working precision
            return float(z)
        if d == 0:
            break
        step = f(z) / d
        z_new = z - step
        if not lo - 1e-6 <= z_new <= hi + 1e-6:
            raise NewtonDivergence("Newton step left the bracket")
        z = z_new
        if abs(step) <= tol * abs(z):
            return float(z)
    if abs(f(z)) <= 1e-14:
        return float(z)
    raise NewtonDivergence(f"Newton polish did not reach tolerance {tol}")
