"""Power iteration helpers shared by the symbolic and transfer modules."""

import numpy as np

from .errors import NoConvergence

DEFAULT_TOL = 1e-12
DEFAULT_MAX_ITER = 100_000
RESIDUAL_TOL = 1e-10
FLOOR_TOL = 1e-15
STALL_STEPS = 8


def _normalize_sign(x):
    # Force the iterate positive: flip if its max-magnitude entry is negative.
    k = int(np.argmax(np.abs(x)))
    if x[k] < 0:
        x = -x
    return x


def perron_pair(M, tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER):
    """Dominant eigenvalue and right/left eigenvectors of a primitive matrix.

    Both iterations start from the all-ones vector.  The eigenvalue is the
    two-sided Rayleigh quotient ``l @ M @ r / (l @ r)``, which converges at
    twice the rate of the one-sided estimate.

    Returns
    -------
    lam : float
    r, l : ndarray
        Right and left eigenvectors, unit max-norm, entrywise nonnegative.
    iterations : int
    residual : float
        ``max(|M r - lam r|_inf, |M^T l - lam l|_inf) / lam``.
    """
    M = np.asarray(M, dtype=float)
    n = M.shape[0]
    r = np.ones(n)
    l = np.ones(n)
    MT = M.T
    lam_old = np.inf
    best = np.inf
    stall = 0
    for it in range(1, max_iter + 1):
        Mr = M @ r
        lM = MT @ l
        lam = float(l @ Mr) / float(l @ r)
        r = Mr / np.max(np.abs(Mr))
        l = lM / np.max(np.abs(lM))
        if abs(lam - lam_old) <= tol * abs(lam):
            # eigenvalue settles twice as fast as the vectors: keep going
            # until the vector residuals stop improving
            res = max(
                np.max(np.abs(M @ r - lam * r)),
                np.max(np.abs(MT @ l - lam * l)),
            ) / lam
            if res <= FLOOR_TOL:
                return lam, _normalize_sign(r), _normalize_sign(l), it, res
            if res < 0.9 * best or res > 1e3 * FLOOR_TOL and res < best:
                best, stall = res, 0
            else:
                stall += 1
            if stall >= STALL_STEPS and best <= RESIDUAL_TOL:
                return lam, _normalize_sign(r), _normalize_sign(l), it, res
        lam_old = lam
    raise NoConvergence(f"power iteration did not converge in {max_iter} iterations")


def spectral_radius(M, tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER):
    return perron_pair(M, tol, max_iter)[0]


def second_eigenvalue_magnitude(M, lam, r, l, block=4, tol=1e-12, max_iter=20_000):
    """Magnitude of the subdominant eigenvalue by deflated subspace iteration.

    ``B = M - lam * r l^T / (l @ r)`` removes the Perron eigenvalue; a small
    block of vectors is iterated under ``B`` and re-orthogonalized against
    the Perron direction every step.  Ritz values of the block capture
    complex-conjugate pairs, so only the magnitude is trusted.

    Returns ``(magnitude, iterations)``; magnitude 0.0 when the deflated
    operator annihilates everything (rank-one ``M``).
    """
    M = np.asarray(M, dtype=float)
    n = M.shape[0]
    if n == 1:
        return 0.0, 0
    r = r / (l @ r)
    scale = np.max(np.abs(M))

    def deflate(X):
        return X - np.outer(r, l @ X)

    def apply(X):
        return deflate(M @ X - lam * np.outer(r, l @ X))

    b = min(block, n - 1)
    rng = np.random.default_rng(12345)
    Q, _ = np.linalg.qr(deflate(rng.standard_normal((n, b))))
    est_old = np.inf
    for it in range(1, max_iter + 1):
        Z = apply(Q)
        if np.max(np.abs(Z)) <= 1e-14 * scale * np.sqrt(n):
            return 0.0, it
        H = Q.T @ Z
        est = float(np.max(np.abs(np.linalg.eigvals(H))))
        Q, _ = np.linalg.qr(Z)
        if est <= 1e-13 * lam and it > 2:
            return 0.0, it
        if abs(est - est_old) <= tol * max(est, 1e-300) and it > 2:
            return est, it
        est_old = est
    raise NoConvergence(
        f"deflated subspace iteration did not converge in {max_iter} iterations"
    )
