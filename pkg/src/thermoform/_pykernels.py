"""Pure-numpy reference versions of the compiled kernels.

Vectorized across trials / starting points.  The chain sampler draws from
the same per-trial splitmix64 streams and sums in the same order as the
compiled version, so both backends return bit-identical results.
"""

import numpy as np

GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S30, _S27, _S31, _S11 = (np.uint64(s) for s in (30, 27, 31, 11))
_INV53 = 1.0 / 9007199254740992.0
TWO_PI = 2.0 * np.pi


def mix64(z):
    z = np.asarray(z, dtype=np.uint64)
    with np.errstate(over="ignore"):  # wraparound is intended
        z = (z ^ (z >> _S30)) * _M1
        z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


def stream_states(seed, start, stop):
    """Initial splitmix64 state of each trial stream ``start <= t < stop``."""
    base = mix64(np.uint64(seed % 2**64))
    return base ^ mix64(np.arange(start, stop, dtype=np.uint64) + np.uint64(1))


def _uniform(s):
    return (mix64(s) >> _S11).astype(np.float64) * _INV53


def chain_birkhoff_sums(succ, cum, cum0, gvals, n, start, stop, seed):
    """Birkhoff sums ``sum_{t<n} g(state_t)`` of stationary chain paths.

    succ : (S, N) int64, successor state per appended symbol (-1 if none)
    cum : (S, N) float64, cumulative transition probabilities per symbol
    cum0 : (S,) float64, cumulative initial (stationary) distribution
    gvals : (S,) float64, observable per state
    """
    with np.errstate(over="ignore"):
        s = stream_states(seed, start, stop)
        s += GOLDEN
        u = _uniform(s)
        state = (u[:, None] >= cum0[None, :]).sum(axis=1)
        total = gvals[state].copy()
        for _ in range(1, n):
            s += GOLDEN
            u = _uniform(s)
            a = (u[:, None] >= cum[state]).sum(axis=1)
            state = succ[state, a]
            total += gvals[state]
    return total


def lyapunov_sums(M, kvec, amp, eps, x0, v0, n_burn, n_steps):
    """Sum of log unstable growth over ``n_steps`` after ``n_burn`` warm-up steps.

    The map is ``x -> M x + eps * sum_j amp_j sin(2 pi k_j . x)  (mod 1)``.
    Returns one sum per starting point (rows of ``x0``).
    """
    x = np.array(x0, dtype=float)
    P = x.shape[0]
    v = np.tile(np.asarray(v0, dtype=float), (P, 1))
    total = np.zeros(P)
    M = np.asarray(M, dtype=float)
    for t in range(n_burn + n_steps):
        ph = TWO_PI * (x @ kvec.T)
        c = np.cos(ph)
        sn = np.sin(ph)
        # J = M + eps * sum_j amp_j (2 pi cos_j) k_j^T, applied to v
        kv = v @ kvec.T
        w = v @ M.T + eps * TWO_PI * ((c * kv) @ amp)
        norm = np.sqrt(w[:, 0] ** 2 + w[:, 1] ** 2)
        v = w / norm[:, None]
        if t >= n_burn:
            total += np.log(norm)
        x = x @ M.T + eps * (sn @ amp)
        x -= np.floor(x)
    return total
