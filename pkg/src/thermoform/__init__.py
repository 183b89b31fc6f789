"""Thermodynamic formalism for subshifts of finite type and hyperbolic toral maps.

Pressure, Gibbs measures, spectral gaps, correlation decay, CLT variances,
dynamical zeta functions, Bowen dimension and the constants of hyperbolic
toral automorphisms, all computed through exact finite-dimensional
discretizations of the transfer operator.
"""

from .errors import InputError, NumericalError, ThermoformError
from .sft import (
    TransitionMatrix,
    count_admissible,
    count_fixed,
    enumerate_admissible,
    enumerate_periodic,
    is_primitive,
    topological_entropy,
    validate,
)
from .potentials import (
    CylinderPotential,
    HolderMeta,
    birkhoff_sum,
    coboundary,
    constant_potential,
    extend_range,
    from_function,
    symbol_potential,
    variation_profile,
    zero_potential,
)
from .transfer import (
    build_operator,
    check_normalized,
    cylinder_weights,
    gibbs_weights,
    leading_triple,
    normalize,
    pressure,
    rpf_convergence,
    spectral_gap,
)
from .statistics import (
    clt_monte_carlo,
    correlation,
    equilibrium_stability_probe,
    green_kubo,
    pressure_derivative_check,
    wasserstein_ultrametric,
)
from .zeta import fredholm_det, fredholm_poly, orbit_sums, pole_locate, trace_identity_check, zeta_eval
from .smooth import (
    PerturbedMap,
    ToralAutomorphism,
    analyze,
    catmap_report,
    holder_exponent,
    invert,
    lyapunov_cocycle,
    pesin_check,
    unstable_density_product,
)
from .dimension import ConformalRepeller, bowen_dimension, pressure_curve
from .kernels import BACKEND

__version__ = "0.1.0"
