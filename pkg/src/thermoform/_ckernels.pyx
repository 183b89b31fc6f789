# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: Markov-chain Birkhoff sums and Lyapunov orbit sums.

Must stay in step with ``_pykernels``; the chain sampler is bit-identical.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport sin, cos, sqrt, log, floor, M_PI
from libc.stdint cimport uint64_t, int64_t

cnp.import_array()

cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15ULL


cdef inline uint64_t mix64(uint64_t z) nogil:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)


cdef inline double uniform(uint64_t s) nogil:
    return <double>(mix64(s) >> 11) * (1.0 / 9007199254740992.0)


def chain_birkhoff_sums(const int64_t[:, ::1] succ, const double[:, ::1] cum,
                        const double[::1] cum0, const double[::1] gvals,
                        Py_ssize_t n, Py_ssize_t start, Py_ssize_t stop, seed):
    cdef Py_ssize_t T = stop - start
    cdef Py_ssize_t S = cum0.shape[0]
    cdef Py_ssize_t N = cum.shape[1]
    out_arr = np.empty(T, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef uint64_t base = mix64(<uint64_t>(seed % 2**64))
    cdef uint64_t s
    cdef double u, total
    cdef Py_ssize_t i, t, a, state
    with nogil:
        for i in range(T):
            s = base ^ mix64(<uint64_t>(start + i) + 1)
            s += GOLDEN
            u = uniform(s)
            state = 0
            while state < S and u >= cum0[state]:
                state += 1
            total = gvals[state]
            for t in range(1, n):
                s += GOLDEN
                u = uniform(s)
                a = 0
                while a < N and u >= cum[state, a]:
                    a += 1
                state = succ[state, a]
                total += gvals[state]
            out[i] = total
    return out_arr


def lyapunov_sums(M, const double[:, ::1] kvec, const double[:, ::1] amp, double eps,
                  x0, v0, Py_ssize_t n_burn, Py_ssize_t n_steps):
    cdef double[:, ::1] Mv = np.ascontiguousarray(M, dtype=np.float64)
    cdef double[:, ::1] X = np.array(x0, dtype=np.float64, order="C")
    cdef double[::1] V0 = np.ascontiguousarray(v0, dtype=np.float64)
    cdef Py_ssize_t P = X.shape[0]
    cdef Py_ssize_t K = kvec.shape[0]
    out_arr = np.zeros(P, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef double m00 = Mv[0, 0], m01 = Mv[0, 1], m10 = Mv[1, 0], m11 = Mv[1, 1]
    cdef double twopi = 2.0 * M_PI
    cdef double x, y, v1, v2, w1, w2, nx, ny, ph, c, sn, kv, norm, total
    cdef Py_ssize_t p, t, j
    with nogil:
        for p in range(P):
            x = X[p, 0]
            y = X[p, 1]
            v1 = V0[0]
            v2 = V0[1]
            total = 0.0
            for t in range(n_burn + n_steps):
                w1 = m00 * v1 + m01 * v2
                w2 = m10 * v1 + m11 * v2
                nx = m00 * x + m01 * y
                ny = m10 * x + m11 * y
                for j in range(K):
                    ph = twopi * (kvec[j, 0] * x + kvec[j, 1] * y)
                    c = cos(ph)
                    sn = sin(ph)
                    kv = kvec[j, 0] * v1 + kvec[j, 1] * v2
                    w1 = w1 + eps * twopi * c * kv * amp[j, 0]
                    w2 = w2 + eps * twopi * c * kv * amp[j, 1]
                    nx = nx + eps * sn * amp[j, 0]
                    ny = ny + eps * sn * amp[j, 1]
                norm = sqrt(w1 * w1 + w2 * w2)
                v1 = w1 / norm
                v2 = w2 / norm
                if t >= n_burn:
                    total += log(norm)
                x = nx - floor(nx)
                y = ny - floor(ny)
            out[p] = total
    return out_arr
