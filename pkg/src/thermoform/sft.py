"""Subshifts of finite type: validation, mixing, words, periodic points, entropy.

Words are plain tuples of ints.  Every list of words this module returns is in
lexicographic order, and that order is the canonical state index used by the
transfer operator, the Gibbs weights and the potentials.
"""

from dataclasses import dataclass, field
from functools import cached_property
import math

import numpy as np

from ._linalg import spectral_radius
from .errors import (
    BudgetExceeded,
    NonBinaryEntry,
    NonSquare,
    NotPrimitive,
    ZeroColumn,
    ZeroRow,
)

DEFAULT_WORD_CAP = 10**6

Word = tuple


@dataclass(frozen=True, eq=False)
class TransitionMatrix:
    """Validated 0/1 adjacency matrix of a one-sided subshift of finite type.

    Build with :func:`validate`; the constructor does not re-check.
    """

    entries: np.ndarray
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def size(self):
        return self.entries.shape[0]

    def allowed(self, a, b):
        return bool(self.entries[a, b])

    @cached_property
    def successors(self):
        return tuple(tuple(int(b) for b in np.flatnonzero(row)) for row in self.entries)

    @cached_property
    def primitivity(self):
        return is_primitive(self)

    def __eq__(self, other):
        return isinstance(other, TransitionMatrix) and np.array_equal(
            self.entries, other.entries
        )

    def __hash__(self):
        return hash(self.entries.tobytes())

    def __repr__(self):
        rows = ", ".join(str(list(r)) for r in self.entries.tolist())
        return f"TransitionMatrix([{rows}])"


def validate(raw):
    """Check a raw square 0/1 array and wrap it in a :class:`TransitionMatrix`."""
    arr = np.asarray(raw)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
        raise NonSquare(f"transition matrix must be square, got shape {arr.shape}")
    if not np.all((arr == 0) | (arr == 1)):
        bad = np.argwhere((arr != 0) & (arr != 1))[0]
        raise NonBinaryEntry(
            f"entry {tuple(int(i) for i in bad)} = {arr[tuple(bad)]!r} is not 0 or 1"
        )
    entries = arr.astype(np.int64)
    for i, row in enumerate(entries):
        if not row.any():
            raise ZeroRow(i)
    for j, col in enumerate(entries.T):
        if not col.any():
            raise ZeroColumn(j)
    entries.setflags(write=False)
    return TransitionMatrix(entries)


def is_primitive(A):
    """Return ``(flag, witness_power)``.

    Powers are checked up to the Wielandt bound ``(N-1)**2 + 1``; the witness
    is the least power with all entries positive (``None`` when not
    primitive).
    """
    N = A.size
    B = (A.entries > 0).astype(np.int64)
    P = B.copy()
    for p in range(1, (N - 1) ** 2 + 2):
        if np.all(P > 0):
            return True, p
        P = ((P @ B) > 0).astype(np.int64)
    return False, None


def require_primitive(A):
    flag, _ = A.primitivity
    if not flag:
        raise NotPrimitive("transition matrix is not primitive (SFT is not mixing)")


def topological_entropy(A):
    """Topological entropy in nats: log of the spectral radius of ``A``."""
    require_primitive(A)
    return math.log(spectral_radius(A.entries))


def _int_matpow(M, n):
    # Exact integer power with Python ints (object dtype never overflows).
    R = np.identity(M.shape[0], dtype=object)
    B = M.astype(object)
    while n:
        if n & 1:
            R = R.dot(B)
        B = B.dot(B)
        n >>= 1
    return R


def count_fixed(A, n):
    """``|Fix(sigma^n)| = trace(A^n)`` in exact integer arithmetic."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return int(np.trace(_int_matpow(A.entries, n)))


def count_admissible(A, k):
    """Number of admissible words of length ``k`` (exact)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    P = _int_matpow(A.entries, k - 1)
    return int(P.sum())


def is_admissible(A, w):
    return all(A.entries[a, b] for a, b in zip(w, w[1:]))


def enumerate_admissible(A, k, cap=DEFAULT_WORD_CAP):
    """All admissible words of length ``k`` in lexicographic order."""
    if k < 1:
        raise ValueError("k must be >= 1")
    key = ("adm", k)
    if key in A._cache:
        return A._cache[key]
    total = count_admissible(A, k)
    if total > cap:
        raise BudgetExceeded(f"{total} admissible words of length {k} exceed cap {cap}")
    succ = A.successors
    words = [(a,) for a in range(A.size)]
    for _ in range(k - 1):
        words = [w + (b,) for w in words for b in succ[w[-1]]]
    A._cache[key] = words
    return words


def word_index(A, k, cap=DEFAULT_WORD_CAP):
    """Map from admissible ``k``-word to its position in the canonical order."""
    key = ("idx", k)
    if key not in A._cache:
        A._cache[key] = {w: i for i, w in enumerate(enumerate_admissible(A, k, cap))}
    return A._cache[key]


def enumerate_periodic(A, n, cap=DEFAULT_WORD_CAP):
    """Words of length ``n`` that close up into a period-``n`` point.

    Each returned word ``w`` is admissible and satisfies ``A[w[-1], w[0]] = 1``,
    so it is the repeating block of exactly one point of ``Fix(sigma^n)``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    total = count_fixed(A, n)
    if total > cap:
        raise BudgetExceeded(f"{total} periodic words of length {n} exceed cap {cap}")
    return _periodic_dfs(A, n)


def _periodic_dfs(A, n):
    E = A.entries
    succ = A.successors
    out = []
    for a in range(A.size):
        stack = [(a,)]
        while stack:
            w = stack.pop()
            if len(w) == n:
                if E[w[-1], a]:
                    out.append(w)
                continue
            for b in reversed(succ[w[-1]]):
                stack.append(w + (b,))
    return out
