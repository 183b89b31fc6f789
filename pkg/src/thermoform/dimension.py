"""Hausdorff dimension of conformal repellers from Bowen's equation ``P(-s l) = 0``."""

from dataclasses import dataclass
import math

from .errors import NoConvergence, NotExpanding
from .potentials import CylinderPotential
from .sft import topological_entropy
from .transfer import build_operator, gibbs_weights, leading_triple


@dataclass(frozen=True)
class ConformalRepeller:
    """Symbolic repeller: shift plus ``l = log|Df|`` as a cylinder potential."""

    sft: object
    log_expansion: CylinderPotential

    def __post_init__(self):
        if self.log_expansion.sft != self.sft:
            raise ValueError("expansion potential lives on a different shift")
        if not float(self.log_expansion.values.min()) > 0:
            raise NotExpanding("log-expansion must be strictly positive everywhere")


def _pressure_and_slope(rep, s, m):
    """``P(-s l)`` and its derivative ``-int l dmu_(-s l)``."""
    op = build_operator(rep.sft, -s * rep.log_expansion, m)
    triple = leading_triple(op)
    mean = gibbs_weights(triple).expectation(rep.log_expansion)
    return triple.pressure, -mean


@dataclass
class BowenRoot:
    s_star: float
    residual: float  # P(-s* l)
    bisection_steps: int
    newton_steps: int


def bowen_root(rep, tol=1e-10, m=None):
    """Root of ``s -> P(-s l)`` with diagnostics.

    Bisection on ``[0, P(0) / min l]`` (a guaranteed bracket) down to width
    1e-3, then Newton with the exact derivative, kept inside the bracket.
    Stops when ``|P| <= tol * max l``.
    """
    if tol < 1e-12:
        raise ValueError("tol must be at least 1e-12")
    ell = rep.log_expansion
    m = m if m is not None else max(ell.range, 2)
    lo = 0.0
    p_lo, _ = _pressure_and_slope(rep, 0.0, m)
    hi = p_lo / float(ell.values.min())
    scale = float(ell.values.max())
    if p_lo <= tol * scale:
        return BowenRoot(0.0, p_lo, 0, 0)
    steps = 0
    while hi - lo > 1e-3:
        mid = 0.5 * (lo + hi)
        p, _ = _pressure_and_slope(rep, mid, m)
        steps += 1
        if p > 0:
            lo = mid
        else:
            hi = mid
    s = 0.5 * (lo + hi)
    for it in range(1, 101):
        p, dp = _pressure_and_slope(rep, s, m)
        if abs(p) <= tol * scale:
            return BowenRoot(s, p, steps, it - 1)
        if p > 0:
            lo = s
        else:
            hi = s
        s_new = s - p / dp
        s = s_new if lo <= s_new <= hi else 0.5 * (lo + hi)
    raise NoConvergence("Bowen equation solver did not converge")


def bowen_dimension(rep, tol=1e-10, m=None):
    """Dimension ``s*`` solving ``P(-s* l) = 0``."""
    return bowen_root(rep, tol, m).s_star


def pressure_curve(rep, s_grid, m=None):
    """``[(s, P(-s l))]`` over ``s_grid``; raises if not strictly decreasing in ``s``."""
    m = m if m is not None else max(rep.log_expansion.range, 2)
    rows = [(float(s), _pressure_and_slope(rep, float(s), m)[0]) for s in s_grid]
    ordered = sorted(rows)
    for (s0, p0), (s1, p1) in zip(ordered, ordered[1:]):
        if s1 > s0 and not p1 < p0:
            raise NoConvergence(
                f"pressure curve not strictly decreasing between s={s0} and s={s1}"
            )
    return rows


def closed_form_dimension(rep):
    """``h_top / l`` for a constant expansion rate."""
    vals = rep.log_expansion.values
    if not math.isclose(float(vals.min()), float(vals.max()), rel_tol=0, abs_tol=1e-15):
        raise ValueError("closed form needs a constant expansion rate")
    return topological_entropy(rep.sft) / float(vals[0])
