"""Locally constant potentials of finite range on a subshift of finite type.

A range-``k`` potential stores one real value per admissible ``k``-word, in
the canonical lexicographic order of :func:`thermoform.sft.enumerate_admissible`.
Hölder potentials enter the package only through such discretizations.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InadmissibleWord, InputError, RangeShrink, WordTooShort
from .sft import enumerate_admissible, word_index

DEFAULT_METRIC_BASE = 0.5


@dataclass(frozen=True, eq=False)
class CylinderPotential:
    sft: object
    range: int
    values: np.ndarray

    def __post_init__(self):
        vals = np.array(self.values, dtype=float)
        n_words = len(enumerate_admissible(self.sft, self.range))
        if vals.shape != (n_words,):
            raise InputError(
                f"range-{self.range} potential needs {n_words} values, got shape {vals.shape}"
            )
        if not np.all(np.isfinite(vals)):
            raise InputError("potential values must be finite")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def words(self):
        return enumerate_admissible(self.sft, self.range)

    def value(self, word):
        try:
            return float(self.values[word_index(self.sft, self.range)[tuple(word)]])
        except KeyError:
            raise InadmissibleWord(f"{tuple(word)} is not an admissible {self.range}-word")

    def lift(self, m):
        """Values of the potential on admissible ``m``-words (``m >= range``)."""
        return extend_range(self, m).values

    def sup_norm(self):
        return float(np.max(np.abs(self.values)))

    def __add__(self, other):
        if isinstance(other, CylinderPotential):
            if other.sft != self.sft:
                raise InputError("potentials live on different shifts")
            k = max(self.range, other.range)
            return CylinderPotential(self.sft, k, self.lift(k) + other.lift(k))
        return CylinderPotential(self.sft, self.range, self.values + float(other))

    __radd__ = __add__

    def __neg__(self):
        return CylinderPotential(self.sft, self.range, -self.values)

    def __sub__(self, other):
        return self + (-other if isinstance(other, CylinderPotential) else -float(other))

    def __mul__(self, t):
        return CylinderPotential(self.sft, self.range, float(t) * self.values)

    __rmul__ = __mul__

    def __repr__(self):
        return f"CylinderPotential(range={self.range}, n_values={len(self.values)})"


Observable = CylinderPotential


@dataclass(frozen=True)
class HolderMeta:
    """Hölder data for the shift metric ``d(x, y) = metric_base ** separation``."""

    exponent: float = 1.0
    metric_base: float = DEFAULT_METRIC_BASE
    seminorm: float = 0.0

    def __post_init__(self):
        if not 0 < self.exponent <= 1:
            raise InputError("Hölder exponent must lie in (0, 1]")
        if not 0 < self.metric_base < 1:
            raise InputError("metric base must lie in (0, 1)")
        if self.seminorm < 0:
            raise InputError("seminorm must be nonnegative")


def from_function(A, k, func):
    """Build a range-``k`` potential by evaluating ``func(word)`` on every word."""
    words = enumerate_admissible(A, k)
    return CylinderPotential(A, k, np.array([func(w) for w in words], dtype=float))


def constant_potential(A, c):
    return CylinderPotential(A, 1, np.full(A.size, float(c)))


def zero_potential(A):
    return constant_potential(A, 0.0)


def symbol_potential(A, per_symbol):
    """Range-1 potential with the given value for each symbol."""
    return CylinderPotential(A, 1, np.asarray(per_symbol, dtype=float))


def extend_range(phi, k2):
    """Same potential, re-expressed on ``k2``-words (value read off the first ``range`` symbols)."""
    if k2 < phi.range:
        raise RangeShrink(f"cannot shrink range {phi.range} to {k2}")
    if k2 == phi.range:
        return phi
    idx = word_index(phi.sft, phi.range)
    k = phi.range
    vals = np.array([phi.values[idx[w[:k]]] for w in enumerate_admissible(phi.sft, k2)])
    return CylinderPotential(phi.sft, k2, vals)


def _window(w, j, k, periodic):
    if periodic:
        n = len(w)
        return tuple(w[(j + i) % n] for i in range(k))
    return tuple(w[j:j + k])


def birkhoff_sum(phi, w, n, periodic=False):
    """Sum of ``phi`` over the first ``n`` shifts of the word ``w``.

    With ``periodic=True`` the word is the repeating block of a periodic
    point, read cyclically, and ``n`` is usually ``len(w)``.
    """
    if n == 0:
        return 0.0
    w = tuple(int(a) for a in w)
    k = phi.range
    E = phi.sft.entries
    if periodic:
        if not w:
            raise WordTooShort("empty periodic word")
        closed = w + w[:1]
        if not all(E[a, b] for a, b in zip(closed, closed[1:])):
            raise InadmissibleWord(f"{w} does not close up into a periodic point")
    else:
        if len(w) < n + k - 1:
            raise WordTooShort(f"need {n + k - 1} symbols for {n} steps, got {len(w)}")
        if not all(E[a, b] for a, b in zip(w, w[1:])):
            raise InadmissibleWord(f"{w} is not admissible")
    idx = word_index(phi.sft, k)
    vals = phi.values
    return float(sum(vals[idx[_window(w, j, k, periodic)]] for j in range(n)))


def variation_profile(phi, meta=None):
    """Symbolic variations ``var_j`` for ``j = 0..range`` and the Hölder seminorm.

    ``var_j`` is the largest difference of ``phi`` between two admissible
    ``range``-words sharing their first ``j`` symbols.  The seminorm is
    ``max_j var_j / metric_base ** (exponent * j)``.

    Returns ``(profile, meta)`` where ``profile`` is a list of ``(j, var_j)``
    and ``meta`` is a :class:`HolderMeta` carrying the seminorm.
    """
    meta = meta or HolderMeta()
    k = phi.range
    words = phi.words
    vals = phi.values
    profile = []
    for j in range(k + 1):
        groups = {}
        for w, v in zip(words, vals):
            lo, hi = groups.get(w[:j], (v, v))
            groups[w[:j]] = (min(lo, v), max(hi, v))
        var_j = max(hi - lo for lo, hi in groups.values())
        profile.append((j, float(var_j)))
    seminorm = max(v / meta.metric_base ** (meta.exponent * j) for j, v in profile)
    return profile, HolderMeta(meta.exponent, meta.metric_base, float(seminorm))


def truncation_bound(meta, k):
    """Pressure error bound ``seminorm * metric_base ** (exponent * (k - 1))``
    for replacing a Hölder potential by its range-``k`` discretization."""
    return meta.seminorm * meta.metric_base ** (meta.exponent * (k - 1))


def coboundary(psi):
    """The potential ``psi - psi o sigma``, of range ``psi.range + 1``."""
    k = psi.range
    idx = word_index(psi.sft, k)

    def f(w):
        return psi.values[idx[w[:k]]] - psi.values[idx[w[1:]]]

    return from_function(psi.sft, k + 1, f)
